#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "convexkit/oracles.hpp"
#include "convexkit/rng.hpp"

namespace convexkit {

// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign fixed).
Mat random_orthogonal(Eigen::Index n, Rng& rng);
// Q diag(eigenvalues) Q^T with Q random orthogonal.
Mat spd_with_spectrum(const Vec& eigenvalues, Rng& rng);
// Spectrum spread linearly between lo and hi (both attained).
Mat random_spd(Eigen::Index n, double lo, double hi, Rng& rng);

// f(x) = 1/2 x^T A x - b^T x with beta = lambda_max(A), alpha = lambda_min(A).
// f_star and x_star are filled in when A is positive definite.
FirstOrderOracle quadratic_problem(const Mat& A, const Vec& b);

// Smooth part plus a separable simple part, lambda * ||x||_1 unless a
// coordinate-wise hook is installed.
struct CompositeProblem {
    FirstOrderOracle smooth;
    double lambda = 0.0;
    // Hook: coordinate_prox(i, theta, v) = argmin_u g_i(u) + (u - v)^2 / (2 theta),
    // with simple(x) = sum_i g_i(x(i)).
    std::function<double(Eigen::Index, double, double)> coordinate_prox;
    std::function<double(const Vec&)> simple;
    // Optimal total value and a minimizer, when known.
    std::optional<double> total_star;
    std::optional<Vec> x_star;

    double simple_value(const Vec& x) const { return simple ? simple(x) : lambda * x.lpNorm<1>(); }
    double total_value(const Vec& x) const { return smooth.evaluate(x) + simple_value(x); }
};

// 1/2 ||W x - y||^2 + lambda ||x||_1, beta = lambda_max(W^T W).
CompositeProblem lasso_problem(const Mat& W, const Vec& y, double lambda);

// Rows of W are the data points w_i; labels in {-1, 1}.
// sum_i max(0, 1 - y_i x^T w_i) + lambda ||x||^2. At a margin of exactly 1
// the zero branch of the hinge subgradient is used.
FirstOrderOracle hinge_problem(const Mat& W, const Vec& labels, double lambda);
// sum_i log(1 + exp(-y_i x^T w_i)) + lambda ||x||^2.
FirstOrderOracle logistic_problem(const Mat& W, const Vec& labels, double lambda);

// Optimum of (1/m) sum_i hinge_i(x) + (alpha/2) ||x||^2 by dual coordinate
// ascent; the duality gap at return certifies f_star.
struct SvmReference {
    Vec x_star;
    double f_star = 0.0;
    double duality_gap = 0.0;
};
SvmReference svm_reference(const Mat& W, const Vec& labels, double alpha, double gap_tol = 1e-11);

// Records the linear span of returned gradients and checks that each query
// point lies in it (the first query must be 0).
class SpanTracker {
public:
    explicit SpanTracker(Eigen::Index dim, double tol = 1e-9) : basis_(dim, 0), tol_(tol) {}
    double distance(const Vec& x) const;
    bool contains(const Vec& x) const { return distance(x) <= tol_ * std::max(1.0, x.norm()); }
    void add(const Vec& g);
    Eigen::Index rank() const { return basis_.cols(); }

private:
    Mat basis_;
    double tol_;
};

// f(x) = gamma * max_{i <= t} x(i) + alpha/2 ||x||^2 with the resisting
// subgradient alpha x + gamma e_i, i the first maximizing coordinate among
// the first t. With check_span the oracle throws InvariantBroken when a query
// leaves the span of earlier answers.
struct ResistingNonsmoothInstance {
    FirstOrderOracle oracle;
    Eigen::Index horizon = 0;
    double gamma = 0.0;
    double alpha = 0.0;
    double radius = 0.0;  // ball on which the Lipschitz constant holds
    std::shared_ptr<SpanTracker> span;
};

ResistingNonsmoothInstance resisting_instance(Eigen::Index dim, Eigen::Index t, double gamma, double alpha,
                                              double radius, bool check_span = false);
// Convex variant: alpha = L / (R (1 + sqrt t)), gamma = L sqrt t / (1 + sqrt t).
ResistingNonsmoothInstance nonsmooth_lower_bound_instance(Eigen::Index dim, Eigen::Index t, double L, double R,
                                                          bool check_span = false);
// Strongly convex variant: gamma = L / 2 on the ball of radius L / (2 alpha).
ResistingNonsmoothInstance strongly_convex_lower_bound_instance(Eigen::Index dim, Eigen::Index t, double L,
                                                                double alpha, bool check_span = false);

// Tridiagonal A_k: 2 on the first k diagonal entries, -1 next to them.
Mat tridiagonal_hard_matrix(Eigen::Index n, Eigen::Index k);

// f(x) = beta/8 x^T A_{2t+1} x - beta/4 x(1) in dimension n >= 2t + 1.
// x_star(i) = 1 - i/(k+1) for i <= k = 2t + 1, f_star = -beta/8 (1 - 1/(k+1)).
FirstOrderOracle smooth_lower_bound_instance(Eigen::Index n, Eigen::Index t, double beta);
double smooth_lower_bound_fstar(Eigen::Index k, double beta);

// n-dimensional truncation of alpha (kappa - 1)/8 (<A x, x> - 2 x(1)) +
// alpha/2 ||x||^2 with A the tridiagonal (2, -1) matrix. x_star is the exact
// minimizer of the truncated function.
FirstOrderOracle strongly_convex_smooth_lower_bound_instance(Eigen::Index n, double kappa, double alpha);

}  // namespace convexkit
