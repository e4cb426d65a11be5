#include "convexkit/oracles.hpp"

#include "convexkit/errors.hpp"

namespace convexkit {

FirstOrderOracle::FirstOrderOracle(Eigen::Index dim, ValueFn value, GradFn grad, Regularity reg)
    : regularity(std::move(reg)), dim_(dim), value_(std::move(value)), grad_(std::move(grad)) {}

double FirstOrderOracle::value(const Vec& x) {
    ++zeroth_;
    return evaluate(x);
}

Vec FirstOrderOracle::subgradient(const Vec& x) {
    ++first_;
    Vec g = evaluate_subgradient(x);
    if (on_subgradient) on_subgradient(x, g);
    return g;
}

double FirstOrderOracle::evaluate(const Vec& x) const {
    if (x.size() != dim_) throw DimensionMismatch("oracle dimension " + std::to_string(dim_) + ", point " + std::to_string(x.size()));
    return value_(x);
}

Vec FirstOrderOracle::evaluate_subgradient(const Vec& x) const {
    if (x.size() != dim_) throw DimensionMismatch("oracle dimension " + std::to_string(dim_) + ", point " + std::to_string(x.size()));
    return grad_(x);
}

double FirstOrderOracle::require_L() const {
    if (!regularity.L) throw MissingRegularity("Lipschitz constant L not declared");
    return *regularity.L;
}

double FirstOrderOracle::require_beta() const {
    if (!regularity.beta) throw MissingRegularity("smoothness beta not declared");
    return *regularity.beta;
}

double FirstOrderOracle::require_alpha() const {
    if (!regularity.alpha) throw MissingRegularity("strong convexity alpha not declared");
    return *regularity.alpha;
}

}  // namespace convexkit
