#include "convexkit/rng.hpp"

#include <algorithm>

#include "convexkit/errors.hpp"

namespace convexkit {

std::uint64_t Rng::splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng Rng::stream(std::uint64_t seed, std::uint64_t replicate) {
    return Rng(splitmix64(seed) ^ splitmix64(replicate + 1));
}

double Rng::uniform() { return std::generate_canonical<double, 53>(engine_); }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() { return normal_(engine_); }

std::size_t Rng::index(std::size_t n) {
    if (n == 0) throw DomainError("index over an empty range");
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

std::size_t Rng::from_cumulative(const std::vector<double>& cumulative) {
    if (cumulative.empty() || !(cumulative.back() > 0.0)) throw DomainError("empty or zero-mass distribution");
    const double u = uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<std::size_t>(it - cumulative.begin());
}

Vec Rng::normal_vector(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
}

Vec Rng::unit_vector(Eigen::Index n) {
    for (;;) {
        Vec v = normal_vector(n);
        const double norm = v.norm();
        if (norm > 1e-300) return v / norm;
    }
}

}  // namespace convexkit
