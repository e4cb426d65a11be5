#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "convexkit/linalg.hpp"

namespace convexkit {

// Seedable 64-bit generator (std::mt19937_64). Streams are split
// deterministically: the child for replicate r of seed s is seeded with
// splitmix64(splitmix64(s) ^ splitmix64(r + 1)), so a replicate's draws do not
// depend on how many replicates run or on which thread runs them.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);
    static Rng stream(std::uint64_t seed, std::uint64_t replicate);
    static std::uint64_t splitmix64(std::uint64_t x);

    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);
    double normal();
    std::size_t index(std::size_t n);      // uniform in {0, ..., n-1}
    // Draw from a discrete law given its cumulative table (last entry = total).
    std::size_t from_cumulative(const std::vector<double>& cumulative);
    Vec normal_vector(Eigen::Index n);
    Vec unit_vector(Eigen::Index n);       // uniform on the sphere
    std::uint64_t next_u64() { return engine_(); }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace convexkit
