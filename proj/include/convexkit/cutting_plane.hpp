#pragma once

#include <optional>
#include <string>
#include <vector>

#include "convexkit/linalg.hpp"
#include "convexkit/oracles.hpp"
#include "convexkit/rng.hpp"
#include "convexkit/sets.hpp"

namespace convexkit {

// {x : (x - c)^T H^{-1} (x - c) <= 1}
struct Ellipsoid {
    Vec center;
    Mat shape;
    double log_det() const;
};

// Smallest ellipsoid containing {x in E : w^T (x - c) <= 0}. For n = 1 this
// is the half interval. Throws ZeroCutVector for w = 0 and
// NotPositiveDefinite when w^T H w is not positive.
Ellipsoid ellipsoid_update(const Ellipsoid& E, const Vec& w);

struct CutStep {
    long iter = 0;
    Vec query;
    Vec cut;                  // w with the kept side {x : w^T (x - query) <= 0}
    bool feasible = false;    // query point in the set
    double value = 0.0;       // f(query) when feasible and f is given
    double best_value = 0.0;  // min f over feasible queries so far (+inf before the first)
    double log_volume = 0.0;  // volume proxy: log det H, log area, or log volume estimate
    long oracle_calls = 0;    // separation plus first-order queries so far
    int kind = 0;             // Vaidya: 1 constraint removed, 2 constraint added
    long inner_steps = 0;     // Newton steps (Vaidya) or walk steps (randomized)
    double progress = 0.0;    // randomized mode: estimated fraction of volume cut away
};

struct CutTrace {
    std::string algorithm;
    std::vector<CutStep> steps;
    std::optional<Vec> best_point;
    double best_value = 0.0;

    bool found_feasible() const { return best_point.has_value(); }
    // iter, feasible_flag, best_value, log_volume_proxy, oracle_calls
    std::string to_csv() const;
};

// Ellipsoid method from the ball of radius R around the origin. Without f it
// stops at the first feasible center; with f it runs the whole budget and
// tracks the best feasible value. Asserts the per-step volume decrease
// log det H' <= log det H - 1/n. Throws BudgetExhaustedInfeasible when no
// center was feasible.
CutTrace run_ellipsoid(const ConstraintSet& set, FirstOrderOracle* f, double R, double r, long budget);

// 2-D polygons are vertex lists in counter-clockwise order (rows of a k x 2
// matrix).
Vec exact_centroid_2d(const Mat& polygon);
double polygon_area(const Mat& polygon);
// Part of the polygon with w^T (x - z) <= 0.
Mat clip_polygon(const Mat& polygon, const Vec& w, const Vec& z);

struct RandomizedCogParams {
    long samples_per_dim = 100;  // N = samples_per_dim * n
    long walk_steps = 0;         // per sample; 0 means n^2
    long burn_in = 0;            // first iteration; 0 means 10 n^3
    double box_half_width = 1.0; // S_1 = [-L, L]^n
    std::uint64_t seed = 0;
};

enum class CogMode { exact2d, randomized };

// Center of gravity method. exact2d: S_1 is the polygon, tracked exactly in a
// renormalized affine frame so areas far below 1e-12 stay representable.
// randomized: S_1 = [-L, L]^n, the center estimated from hit-and-run samples
// drawn with isotropically rescaled directions, separation cuts when the
// estimate leaves the set. Row t holds the best value over c_1..c_t.
CutTrace run_center_of_gravity(FirstOrderOracle& f, const ConstraintSet& set, CogMode mode, long budget,
                               const Mat& polygon = Mat(), const RandomizedCogParams& params = {});

// {x : A x > b}
struct LocalizationPolytope {
    Mat A;
    Vec b;

    Eigen::Index rows() const { return A.rows(); }
    Vec slack(const Vec& x) const { return A * x - b; }
    bool strictly_feasible(const Vec& x) const;
};

// Simplex with inscribed ball of radius R around the origin (n + 1 rows).
LocalizationPolytope regular_simplex_polytope(Eigen::Index n, double R);

// Hessian of the log barrier, sum a_i a_i^T / s_i^2.
Mat log_barrier_hessian(const LocalizationPolytope& P, const Vec& x);
// sigma_i = H^{-1}[a_i, a_i] / s_i^2; throws NotStrictlyFeasible.
Vec leverage_scores(const LocalizationPolytope& P, const Vec& x);
// v(x) = 1/2 log det H(x).
double volumetric_barrier(const LocalizationPolytope& P, const Vec& x);

struct VolumetricMinimum {
    Vec x;
    long newton_steps = 0;
    double decrement = 0.0;
};
// Damped Newton on v with the approximate Hessian Q(x) = sum sigma_i a_i a_i^T
// / s_i^2 until sqrt(grad^T Q^{-1} grad) <= tol. Throws
// BarrierMinimizationFailure after max_steps.
VolumetricMinimum minimize_volumetric_barrier(const LocalizationPolytope& P, const Vec& x0, double tol = 1e-6,
                                              long max_steps = 500);

// Offset beta for the new row c^T y > beta at x so that
// H(x)^{-1}[c, c] / (c^T x - beta)^2 = sqrt(eps) / 5 (closed form).
double vaidya_insertion_offset(const LocalizationPolytope& P, const Vec& x, const Vec& c, double eps);

// Vaidya's method for the feasibility problem. Each iteration either removes
// the row of smallest leverage (when below eps) or adds the separating row at
// the volumetric center with offset chosen so that its leverage is sqrt(eps)/5.
CutTrace run_vaidya(const ConstraintSet& set, double R, double r, long budget, double eps = 0.006);

}  // namespace convexkit
