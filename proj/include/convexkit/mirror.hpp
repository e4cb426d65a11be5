#pragma once

#include <functional>
#include <string>
#include <vector>

#include "convexkit/oracles.hpp"
#include "convexkit/sets.hpp"
#include "convexkit/trace.hpp"

namespace convexkit {

enum class MirrorKind {
    ball,           // Phi = 1/2 ||x||_2^2 on R^n, paired with any set (Euclidean projection)
    simplex,        // negative entropy on the positive orthant, paired with the simplex
    spectrahedron,  // negative von Neumann entropy on PD matrices, paired with the spectrahedron
};

// A mirror map Phi together with the constraint set X it projects onto.
// Spectrahedron points are column-major flattenings of symmetric matrices.
class MirrorMap {
public:
    MirrorMap(MirrorKind kind, SetPtr set);

    MirrorKind kind() const { return kind_; }
    std::string name() const;
    Eigen::Index dim() const { return set_->dim(); }
    const ConstraintSet& set() const { return *set_; }

    // Throws DomainError outside the closure of D (gradient: outside D).
    double potential(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    // x with grad Phi(x) = theta. Throws GradientMapInversionFailure when the
    // result is not finite.
    Vec inverse_gradient(const Vec& theta) const;
    // argmin over X of D(x, y).
    Vec project(const Vec& y) const;
    // argmin over X of Phi(x) - theta^T x, i.e. project(inverse_gradient(theta)),
    // evaluated with max-subtraction for the entropic maps.
    Vec dual_to_primal(const Vec& theta) const;
    // One mirror step argmin over X of g^T x + D(x, x_t); g carries the step
    // size.
    Vec step(const Vec& x, const Vec& g) const;

    // Strong convexity constant w.r.t. norm(), and R^2 = sup_X Phi - Phi(x_1).
    double rho() const;
    double radius_sq() const;
    // x_1 = argmin over X of Phi.
    Vec initial_point() const;
    double norm(const Vec& x) const;
    double dual_norm(const Vec& g) const;
    std::string norm_name() const;

private:
    Eigen::Index side() const;

    MirrorKind kind_;
    SetPtr set_;
};

// Ball setup on the given set (the unit ball when null), simplex setup on
// Delta_dim, spectrahedron setup on S_side with dim = side^2.
MirrorMap standard_mirror_map(MirrorKind kind, Eigen::Index dim, SetPtr ball_set = nullptr);

// Phi(x) - Phi(y) - grad Phi(y)^T (x - y). Throws DomainError.
double bregman_divergence(const MirrorMap& map, const Vec& x, const Vec& y);

// Step sizes of the guarantees.
double mirror_descent_step(const MirrorMap& map, double L, long t);  // (R/L) sqrt(2 rho / t)
double dual_averaging_step(const MirrorMap& map, double L, long t);  // (R/L) sqrt(rho / (2t))
double mirror_prox_step(const MirrorMap& map, double beta);         // rho / beta

// Guarantees at horizon t.
double mirror_descent_bound(const MirrorMap& map, double L, long t);  // R L sqrt(2 / (rho t))
double dual_averaging_bound(const MirrorMap& map, double L, long t);  // 2 R L sqrt(2 / (rho t))
double mirror_prox_bound(const MirrorMap& map, double beta, long t);  // beta R^2 / (rho t)

// Mirror descent from x_1. Row s holds x_s (s = 1..t); avg_gap is the gap of
// the running average of x_1..x_s.
RunTrace run_mirror_descent(FirstOrderOracle& f, const MirrorMap& map, double eta, long t);

// Dual averaging: x_s = argmin over X of eta sum_{r<s} g_r^T x + Phi(x). Rows
// as for mirror descent.
RunTrace run_dual_averaging(FirstOrderOracle& f, const MirrorMap& map, double eta, long t);
// The dual averaging point for the accumulated gradient sum.
Vec dual_averaging_point(const MirrorMap& map, const Vec& gradient_sum, double eta);

// Mirror prox. Row s holds y_{s+1} (s = 1..t); avg_gap is the gap of the
// average of y_2..y_{s+1}.
RunTrace run_mirror_prox(FirstOrderOracle& f, const MirrorMap& map, double eta, long t);

// Vector-field runs: points[s-1] is the point the field was queried at in
// round s and fields[s-1] the vector used in the regret sum.
struct FieldRun {
    std::vector<Vec> points;
    std::vector<Vec> fields;

    // sum_s g_s^T (x_s - x)
    double regret(const Vec& x) const;
    // sum_s ||g_s||_*^2
    double dual_norm_sq_sum(const MirrorMap& map) const;
};
// Field sequence g_s = field(s, x_s).
using FieldSequence = std::function<Vec(long, const Vec&)>;
FieldRun run_mirror_descent_field(const FieldSequence& field, const MirrorMap& map, double eta, long t);
FieldRun run_dual_averaging_field(const FieldSequence& field, const MirrorMap& map, double eta, long t);
// Mirror prox on a fixed field: points are y_{s+1}, fields are g(y_{s+1}).
FieldRun run_mirror_prox_field(const std::function<Vec(const Vec&)>& field, const MirrorMap& map, double eta,
                               long t);

}  // namespace convexkit
