#pragma once

#include <functional>
#include <string>

#include "convexkit/oracles.hpp"
#include "convexkit/sets.hpp"
#include "convexkit/trace.hpp"

namespace convexkit {

// Step size sequence eta_s for s = 1, 2, ...
struct StepSchedule {
    enum class Kind { constant, harmonic, horizon, time_varying, custom };
    Kind kind = Kind::constant;
    double eta = 1.0;    // constant
    double alpha = 1.0;  // harmonic: 2 / (alpha (s + 1))
    double R = 1.0, L = 1.0;
    long horizon = 1;    // horizon: R / (L sqrt(horizon)); time_varying: R / (L sqrt(s))
    std::function<double(long)> custom;

    double operator()(long s) const;

    static StepSchedule constant_step(double eta);
    static StepSchedule harmonic_step(double alpha);
    static StepSchedule horizon_step(double R, double L, long t);
    static StepSchedule time_varying_step(double R, double L);
};

// Projected subgradient descent. Row s holds x_s (s = 1..t) with avg_gap the
// gap of the running average of x_1..x_s. With the default schedule
// eta = R / (L sqrt t) the guarantee RL/sqrt(t) holds at row t.
RunTrace run_pgd_lipschitz(FirstOrderOracle& f, const ConstraintSet& set, double R, double L, long t,
                           const Vec& x1, std::optional<StepSchedule> schedule = std::nullopt);

// Gradient descent with eta = 1/beta, projected when a set is given. Row s
// holds x_s, s = 1..t.
RunTrace run_gd_smooth(FirstOrderOracle& f, long t, const Vec& x1, const ConstraintSet* set = nullptr);

struct GradientMapping {
    Vec x_plus;
    Vec g;  // beta (x - x_plus)
};
GradientMapping gradient_mapping(FirstOrderOracle& f, const ConstraintSet& set, const Vec& x, double beta);

enum class StronglyConvexVariant {
    lipschitz,             // eta_s = 2/(alpha (s+1)), weighted average
    smooth,                // projected, eta = 1/beta
    smooth_unconstrained,  // eta = 2/(alpha + beta)
};
// Row s holds x_s. For the Lipschitz variant avg_gap is the gap of
// sum_{r<=s} 2r/(s(s+1)) x_r; otherwise it equals gap.
RunTrace run_pgd_strongly(FirstOrderOracle& f, const ConstraintSet& set, StronglyConvexVariant variant, long t,
                          const Vec& x1);

// Conditional gradient with gamma_s = 2/(s+1). Row s holds x_s; the series
// "vertex_count" records the number of distinct LMO outputs used by x_s.
RunTrace run_frank_wolfe(FirstOrderOracle& f, const ConstraintSet& set, long t, const Vec& x1);

// Linear conjugate gradient for A x = b from x0 (default 0). Row s holds x_s
// after s updates (row 0 is x0); the series "residual" holds ||A x_s - b||.
// Stops early once the residual falls to tol * ||b||.
struct LinearCgResult {
    RunTrace trace;
    Vec x;
    long iterations = 0;
    Mat directions;  // columns p_0, p_1, ... (kept when keep_directions)
};
using MatVec = std::function<Vec(const Vec&)>;
LinearCgResult run_linear_cg(const MatVec& A, const Vec& b, long t, double tol = 1e-8, Vec x0 = Vec(),
                             bool keep_directions = false);
LinearCgResult run_linear_cg(const Mat& A, const Vec& b, long t, double tol = 1e-8, Vec x0 = Vec(),
                             bool keep_directions = false);

// argmin over lambda of phi(lambda) by golden section on an expanding bracket;
// stops at bracket width 1e-10 (1 + |lambda|). Throws LineSearchFailure when
// no bracket is found. When the derivative dphi is given, the bracket is
// instead narrowed by bisection on its sign, which resolves the minimizer
// below the resolution of function values.
double line_search(const std::function<double(double)>& phi, double initial_step = 1.0,
                   const std::function<double(double)>& dphi = {});

enum class NonlinearCgVariant { fletcher_reeves, polak_ribiere };
// x_{t+1} = argmin f on x_t + lambda p_t (the search direction is -p_t, with
// p_0 = grad f(x_0)). Row s holds x_s, row 0 the start.
RunTrace run_nonlinear_cg(FirstOrderOracle& f, NonlinearCgVariant variant, long t, const Vec& x0);

// Smallest ball containing B(c1, r1sq) intersected with B(c2, r2sq); balls
// are given by squared radii. Throws EmptyIntersection when they are disjoint
// or a squared radius is negative.
struct EnclosingBall {
    Vec center;
    double radius_sq = 0.0;
};
EnclosingBall enclose_ball_intersection(const Vec& c1, double r1sq, const Vec& c2, double r2sq);

// Normalized two-ball lemma: encloses
// B(0, 1 - eps g^2 - delta) intersected with B(a, g^2 (1 - eps) - delta).
EnclosingBall minimal_enclosing_two_balls(const Vec& a, double g, double eps, double delta);

// Geometric descent from x0 (unconstrained, alpha-strongly convex, beta-smooth).
// Stops early once the radius update cancels to R^2 <= 0 (machine precision).
// Row s holds x_s (row 0 is x0). Series "radius_sq" holds R_s^2 and
// "center_dist_sq" holds ||x* - c_s||^2 when x* is known; "orthogonality"
// the line search residual |grad f(x_s)^T (x_s - c_{s-1})|
// / (||grad f(x_s)|| ||x_s - c_{s-1}||); "branch" the enclosure rule used.
struct GeometricDescentResult {
    RunTrace trace;
    std::vector<Vec> centers;
    std::vector<double> radius_sq;
};
GeometricDescentResult run_geometric_descent(FirstOrderOracle& f, long t, const Vec& x0);

enum class AgdVariant { strongly_convex, smooth };
// Nesterov's method from x_1 = y_1. Row s holds y_s (gap = f(y_s) - f*).
RunTrace run_agd(FirstOrderOracle& f, AgdVariant variant, long t, const Vec& x1);

// lambda_0 = 0, lambda_s = (1 + sqrt(1 + 4 lambda_{s-1}^2)) / 2.
double agd_lambda(long s);

}  // namespace convexkit
