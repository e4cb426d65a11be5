#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "convexkit/linalg.hpp"
#include "convexkit/trace.hpp"

namespace convexkit {

// A nu-self-concordant barrier. value is +inf outside the open domain.
struct Barrier {
    std::string name;
    Eigen::Index dim = 0;
    double nu = 1.0;
    std::function<bool(const Vec&)> in_domain;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<Mat(const Vec&)> hessian;
};

// F(x) = -sum_i log(a_i^T x - b_i) for {x : A x >= b}, nu = m.
Barrier log_barrier_polytope(const Mat& A, const Vec& b);

// F(x) = -log det X over symmetric side x side matrices, nu = side. Points are
// svec coordinates (see svec) so that the Euclidean inner product matches the
// trace inner product.
Barrier log_det_barrier(Eigen::Index side);
// Upper triangle column by column, off-diagonal entries scaled by sqrt 2.
Vec svec(const Mat& X);
Mat smat(const Vec& x);

// F + G on the intersection of the domains; nu adds.
Barrier sum_barriers(const Barrier& F, const Barrier& G);

// z -> F(x0 + N z). nu is unchanged.
Barrier restrict_to_affine(const Barrier& F, const Vec& x0, const Mat& N);

// Particular solution and orthonormal null-space basis of A_eq x = b_eq.
// Throws EmptyInterior when the system is inconsistent.
struct AffineParametrization {
    Vec x0;
    Mat N;
};
AffineParametrization affine_parametrization(const Mat& A_eq, const Vec& b_eq);

// lambda_min(Hess F(x) - grad F(x) grad F(x)^T / nu); nonnegative for a
// 1/nu-exp-concave barrier.
double exp_concavity_margin(const Barrier& F, const Vec& x);

// Newton decrement of F_t(x) = t c^T x + F(x). Throws NotStrictlyFeasible
// outside the domain.
double newton_decrement(const Barrier& F, const Vec& c, double t, const Vec& x);

// ||c||*_x = sqrt(c^T [Hess F(x)]^{-1} c)
double local_dual_norm(const Barrier& F, const Vec& x, const Vec& c);

struct NewtonRun {
    Vec x;
    std::vector<double> decrements;  // decrement before each step and at the end
    long steps = 0;
};

// Minimizes t c^T x + F(x) from x0 until the decrement is at most tol. Steps
// are pure inside {lambda <= 1/4} and damped by 1/(1 + lambda) outside.
// Throws MaxIterations, and EmptyInterior when the iterates run off to
// infinity (no minimizer).
NewtonRun damped_newton_minimize(const Barrier& F, const Vec& c, double t, const Vec& x0, double tol,
                                 long max_steps = 500);

// argmin F
NewtonRun analytic_center(const Barrier& F, const Vec& x0, double tol = 1e-10);

struct CentralPathState {
    double t = 0.0;
    Vec x;
    double decrement = 0.0;  // lambda_{F_t}(x)
};

// Multiplicative schedule factor 1 + 1/(13 sqrt nu).
double path_growth(double nu);
// Number of outer steps after which 2 nu / t_k <= eps.
long path_steps_needed(double nu, double t0, double eps);

struct PathRun {
    std::vector<CentralPathState> states;  // state k = (t_k, x_k), k = 0..K
    RunTrace trace;                        // row k: f_value = c^T x_k, gap vs optimum when given
    Vec x;
    double t_final = 0.0;
    double gap_bound = 0.0;  // 2 nu / t_final
};

// One pure Newton step per outer iteration with t_{k+1} = (1 + 1/(13 sqrt nu)) t_k
// until 2 nu / t_k <= eps. Throws InvariantBroken when a decrement exceeds 1/4.
PathRun path_follow(const Barrier& F, const Vec& c, const Vec& x0, double t0, double eps,
                    std::optional<double> optimum = std::nullopt);

struct PathStart {
    double t0 = 0.0;
    Vec x0;
    long backward_steps = 0;
    std::vector<CentralPathState> backward;  // path for -grad F(y0), t' from 1 downwards
};

// Follows the central path of c' = -grad F(y0) from t' = 1 downwards with
// t'_{k+1} = (1 - 1/(13 sqrt nu)) t'_k until lambda_{F_{t'}}(y_k) <= 1/4 for the
// true objective c.
PathStart path_follow_init(const Barrier& F, const Vec& c, const Vec& y0, long max_steps = 1000000);

// min c^T x subject to A x >= b and A_eq x = b_eq (optional), for a bounded
// feasible region with nonempty relative interior.
struct LinearProgram {
    Mat A;
    Vec b;
    Vec c;
    Mat A_eq;
    Vec b_eq;
};

struct LpResult {
    Vec x;
    double value = 0.0;
    double t_final = 0.0;
    double gap_bound = 0.0;  // certificate 2 nu / t_final
    long phase_one_steps = 0;
    long backward_steps = 0;
    PathRun path;  // in reduced coordinates z, x = x_base + N z (N = I without equalities)
};

// Phase I minimizes s over {A x + s 1 >= b, s <= s_0 + 1} by path following
// until s < 0; a certified nonnegative optimum throws EmptyInterior.
// y0, when given, must be strictly feasible and skips phase I.
LpResult solve_lp(const LinearProgram& lp, double eps, std::optional<Vec> y0 = std::nullopt);

}  // namespace convexkit
