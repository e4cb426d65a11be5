#pragma once

#include <functional>
#include <optional>
#include <string>

#include "convexkit/linalg.hpp"

namespace convexkit {

struct Regularity {
    std::optional<double> L;      // Lipschitz constant (dual norm of subgradients)
    std::optional<double> beta;   // smoothness
    std::optional<double> alpha;  // strong convexity
    std::string norm = "l2";
};

// Value and (sub)gradient access to an objective, with query counters.
// value() and subgradient() are algorithm queries and are counted;
// evaluate() is for trace bookkeeping and is not.
class FirstOrderOracle {
public:
    using ValueFn = std::function<double(const Vec&)>;
    using GradFn = std::function<Vec(const Vec&)>;

    FirstOrderOracle() = default;
    FirstOrderOracle(Eigen::Index dim, ValueFn value, GradFn grad, Regularity reg = {});

    Eigen::Index dim() const { return dim_; }
    double value(const Vec& x);
    Vec subgradient(const Vec& x);
    double evaluate(const Vec& x) const;
    Vec evaluate_subgradient(const Vec& x) const;

    long zeroth_calls() const { return zeroth_; }
    long first_calls() const { return first_; }
    void reset_counters() { zeroth_ = first_ = 0; }

    Regularity regularity;
    std::optional<double> f_star;
    std::optional<Vec> x_star;
    std::string name;
    // Called with (x, g) after every counted subgradient query.
    std::function<void(const Vec&, const Vec&)> on_subgradient;

    double require_L() const;
    double require_beta() const;
    double require_alpha() const;

private:
    Eigen::Index dim_ = 0;
    ValueFn value_;
    GradFn grad_;
    long zeroth_ = 0;
    long first_ = 0;
};

}  // namespace convexkit
