#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "convexkit/mirror.hpp"
#include "convexkit/problems.hpp"
#include "convexkit/trace.hpp"

namespace convexkit {

// Soft threshold tau_alpha(y) = (|y| - alpha)_+ sign(y), coordinate-wise.
Vec prox_l1(double alpha, const Vec& y);

// argmin_x g(x) + ||x - y||^2 / (2 theta) for the problem's simple part.
Vec composite_prox(const CompositeProblem& p, double theta, const Vec& y);

// ISTA with eta = 1/beta. Row s holds x_s (s = 1..t); gap columns use
// total_star when known.
RunTrace run_ista(CompositeProblem& p, long t, const Vec& x1);
// FISTA from x_1 = y_1 with the lambda / gamma sequence of accelerated
// gradient descent. Row s holds y_s.
RunTrace run_fista(CompositeProblem& p, long t, const Vec& x1);

// Guarantees at step t.
double ista_bound(double beta, double dist_sq, long t);   // beta ||x_1 - x*||^2 / (2t)
double fista_bound(double beta, double dist_sq, long t);  // 2 beta ||x_1 - x*||^2 / t^2

// (beta11, beta12, beta22, beta21)
struct SaddleSmoothness {
    double b11 = 0.0, b12 = 0.0, b22 = 0.0, b21 = 0.0;
};

// min over X of max over Y of phi(x, y). grad_x is a subgradient of phi(., y)
// and grad_y one of -phi(x, .).
struct SaddleProblem {
    std::string name;
    MirrorMap x_map;
    MirrorMap y_map;
    std::function<double(const Vec&, const Vec&)> phi;
    std::function<Vec(const Vec&, const Vec&)> grad_x;
    std::function<Vec(const Vec&, const Vec&)> grad_y;
    std::optional<double> L_x, L_y;
    std::optional<SaddleSmoothness> smoothness;
    // Exact inner optimizations max_y phi(x, y) and min_x phi(x, y).
    std::function<double(const Vec&)> max_over_y;
    std::function<double(const Vec&)> min_over_x;
    std::optional<double> value;  // min max, when known
    // Bilinear data (phi = sign x^T A y), kept for entry-sampling oracles.
    std::optional<Mat> matrix;
    double matrix_sign = 1.0;

    double radius_x() const;  // R_X = sqrt(sup Phi_X - min Phi_X)
    double radius_y() const;
};

// max_y phi(x, y) - min_x phi(x, y) from the exact inner optimizations.
// Throws UnsupportedOperation when either is missing.
double duality_gap(const SaddleProblem& p, const Vec& x, const Vec& y);

struct SaddleRun {
    RunTrace trace;  // row s: f_value = max_y phi(avg x, y), gap at (x_s, y_s), avg_gap at the averages
    Vec x_avg;
    Vec y_avg;
};

// SP-MD with a = L_X/R_X, b = L_Y/R_Y, eta = sqrt(2/t); averages of z_1..z_s.
SaddleRun run_sp_md(const SaddleProblem& p, long t);
double sp_md_bound(const SaddleProblem& p, long t);  // (R_X L_X + R_Y L_Y) sqrt(2/t)

// SP-MP with a = 1/R_X^2, b = 1/R_Y^2 and eta = 1/(2M), M the largest of
// beta11 R_X^2, beta22 R_Y^2, beta12 R_X R_Y, beta21 R_X R_Y; averages of
// w_2..w_{s+1}.
SaddleRun run_sp_mp(const SaddleProblem& p, long t);
double sp_mp_constant(const SaddleProblem& p);        // M
double sp_mp_bound(const SaddleProblem& p, long t);   // 4 M / t

// min over Delta_n, max over Delta_m of x^T A y for A n x m, negentropy on both
// sides; L = beta12 = beta21 = max |A_ij|.
SaddleProblem build_matrix_game(const Mat& A);

// Max margin over the unit l2 ball, written as min_x max_{y in Delta_m}
// -x^T A y (columns A_i are the label-signed data, ||A_i||_2 <= B). The value
// is minus the maximal margin; (0, B, 0, B)-smooth.
SaddleProblem build_linear_classification(const Mat& A, double B);
// min_i A_i^T x
double classification_margin(const Mat& A, const Vec& x);

// min over X of max_i f_i(x) as a saddle problem with y in Delta_m. Each f_i
// is L-Lipschitz and beta-smooth w.r.t. the X-setup's norm, giving
// beta11 = beta, beta12 = beta21 = L, beta22 = 0. L_y (a bound on max_i
// |f_i|) and min_over_x are left to the caller.
SaddleProblem build_max_smooth_saddle(std::vector<FirstOrderOracle> fs, const MirrorMap& x_map, double L,
                                      double beta, std::function<double(const Vec&)> min_over_x = {});

}  // namespace convexkit
