#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "convexkit/composite_saddle.hpp"
#include "convexkit/mirror.hpp"
#include "convexkit/oracles.hpp"
#include "convexkit/rng.hpp"
#include "convexkit/sets.hpp"
#include "convexkit/trace.hpp"

namespace convexkit {

// Unbiased stochastic first-order oracle: E[draw(x)] is a subgradient of mean
// at x. B bounds E||g||_*^2 <= B^2 and sigma bounds E||g - grad f||_*^2 <= sigma^2.
struct StochasticOracle {
    std::string name;
    FirstOrderOracle mean;  // exact objective, used for evaluation only
    std::function<Vec(const Vec&, Rng&)> draw;
    std::optional<double> B;
    std::optional<double> sigma;
    long cost_per_draw = 1;  // component gradients per draw
    long calls = 0;          // component gradients used so far

    Vec sample(const Vec& x, Rng& rng);
    double require_B() const;
    double require_sigma() const;
};

// f = (1/m) sum_i f_i with every f_i beta-smooth and f alpha-strongly convex.
struct FiniteSum {
    std::string name;
    Eigen::Index dim = 0;
    long m = 0;
    std::function<double(long, const Vec&)> value_i;
    std::function<Vec(long, const Vec&)> gradient_i;
    double beta = 0.0;
    std::optional<double> alpha;
    std::optional<double> f_star;
    std::optional<Vec> x_star;

    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;  // average of the component gradients
    double kappa() const;              // beta / alpha
    FirstOrderOracle as_oracle() const;
};

// f_i(x) = 1/2 (w_i^T x - y_i)^2 + lambda/2 ||x||^2 for the rows w_i of W.
// beta = max_i ||w_i||^2 + lambda, alpha = lambda_min(W^T W / m) + lambda.
FiniteSum ridge_regression_sum(const Mat& W, const Vec& y, double lambda);

// Uniform component index, one component gradient per draw.
StochasticOracle finite_sum_oracle(const FiniteSum& fs);
// Oracle from a loss-gradient sampler grad_x l(x, xi) with xi drawn inside.
StochasticOracle expectation_oracle(FirstOrderOracle mean, std::function<Vec(const Vec&, Rng&)> sampler,
                                    std::optional<double> B = std::nullopt,
                                    std::optional<double> sigma = std::nullopt);
// grad f(x) + (sigma / sqrt(n)) N(0, I), so that E||g - grad f||_2^2 = sigma^2.
StochasticOracle gaussian_noise_oracle(FirstOrderOracle f, double sigma);
// Average of `batch` independent draws; sigma becomes sqrt(2) B / sqrt(batch)
// when B is declared.
StochasticOracle minibatch_oracle(const StochasticOracle& base, long batch);

// Stochastic mirror descent with a fixed step. Row s holds x_s (s = 1..t),
// avg_gap the gap of the average of x_1..x_s.
RunTrace run_smd(StochasticOracle& g, const MirrorMap& map, double eta, long t, Rng& rng);
// eta = (R/B) sqrt(2 rho / t); guarantee R B sqrt(2 / (rho t)).
double smd_step(const MirrorMap& map, double B, long t);
double smd_bound(const MirrorMap& map, double B, long t);

// SGD with eta_s = 2 / (alpha (s + 1)). Row s holds x_s, avg_gap the gap of
// sum_{r<=s} 2r/(s(s+1)) x_r.
RunTrace run_sgd_strongly(StochasticOracle& g, const ConstraintSet& set, long t, const Vec& x1, Rng& rng);
double sgd_strongly_bound(double B, double alpha, long t);  // 2 B^2 / (alpha (t + 1))

// S-MD on a beta-smooth objective with step 1/(beta + 1/eta) applied to
// Phi / rho, eta = (R/sigma) sqrt(2/t) and R^2 = radius_sq / rho. Row s holds
// x_{s+1}, avg_gap the gap of the average of x_2..x_{s+1}.
RunTrace run_smd_smooth(StochasticOracle& g, const MirrorMap& map, long t, Rng& rng);
double smd_smooth_bound(const MirrorMap& map, double sigma, double beta, long t);  // R sigma sqrt(2/t) + beta R^2 / t

// Mini-batch SGD: t oracle calls in total, t / batch iterations of
// run_smd_smooth on minibatch_oracle(g, batch). Needs B declared.
RunTrace run_minibatch_sgd(StochasticOracle& g, const MirrorMap& map, long batch, long t, Rng& rng);
double minibatch_bound(const MirrorMap& map, double B, double beta, long batch, long t);  // 2RB/sqrt(t) + m beta R^2 / t
long critical_batch(const MirrorMap& map, double B, double beta, long t);                // floor((B/(R beta)) sqrt(t))

// SVRG with eta = 1/(10 beta) and k = ceil(20 kappa) unless given. Row s
// (s = 1..epochs+1) holds the center y^(s); oracle_first counts component
// gradients (m + 2k per epoch).
struct SvrgOptions {
    std::optional<double> eta;
    std::optional<long> k;
    // Called with (epoch, t, x_t^(epoch)) for t = 1..k.
    std::function<void(long, long, const Vec&)> on_inner;
};
RunTrace run_svrg(const FiniteSum& fs, long epochs, const Vec& y1, Rng& rng, const SvrgOptions& opt = {});

// Per-coordinate smoothness beta_i and the sampling law p_gamma(i) ~ beta_i^gamma.
struct CoordinateSmoothness {
    Vec beta;
    double gamma = 0.0;

    Vec probabilities() const;
    std::vector<double> cumulative() const;
    double beta_power_sum() const;  // sum_i beta_i^gamma
    // ||x||_[g] = sqrt(sum beta_i^g x_i^2) and its dual.
    double norm(const Vec& x, double g) const;
    double dual_norm(const Vec& x, double g) const;
};

// An objective with cheap partial derivatives.
struct CoordinateProblem {
    FirstOrderOracle f;
    std::function<double(Eigen::Index, const Vec&)> partial;
    Vec beta;
    long partial_calls = 0;
};
// 1/2 x^T A x - b^T x with beta_i = A_ii.
CoordinateProblem coordinate_quadratic(const Mat& A, const Vec& b);

// RCD(gamma): x_{s+1} = x_s - (1/beta_i) grad_i f(x_s) e_i with i ~ p_gamma.
// Row s holds x_s (s = 1..t).
RunTrace run_rcd(CoordinateProblem& p, double gamma, long t, const Vec& x1, Rng& rng);
double rcd_bound(double R_sq, double beta_power_sum, long t);  // 2 R^2 sum beta^gamma / (t - 1), t >= 2
double rcd_strongly_bound(double kappa_gamma, double gap1, long t);  // (1 - 1/kappa_gamma)^t gap1
// For a quadratic with Hessian A and initial gap gap1: R_{1-gamma}(x_1)^2 =
// 2 gap1 lambda_max(D^{1/2} A^{-1} D^{1/2}) with D = diag(beta^{1-gamma}), and
// the strong convexity alpha = lambda_min(D^{-1/2} A D^{-1/2}) w.r.t. ||.||_[1-gamma].
double rcd_quadratic_radius_sq(const Mat& A, const CoordinateSmoothness& cs, double gap1);
double rcd_quadratic_alpha(const Mat& A, const CoordinateSmoothness& cs);

// Entry-sampling oracles for phi = sign x^T A y. The x-field samples a column
// I ~ y; the y-field samples a row J ~ x (simplex X) or J ~ x^2 / ||x||^2
// (ball X, reweighted by ||x||^2 / x_J). entries counts the entries of A read.
class MatrixSamplingOracle {
public:
    MatrixSamplingOracle(Mat A, double sign, bool ball_x);

    Vec x_law(const Vec& y) const;
    Vec y_law(const Vec& x) const;  // zero vector when x = 0 (the field is then 0)
    Vec x_field(Eigen::Index I);
    Vec y_field(const Vec& x, Eigen::Index J);
    Vec sample_x(const Vec& y, Rng& rng);
    Vec sample_y(const Vec& x, Rng& rng);

    long entries() const { return entries_; }
    // Second-moment bounds: ||A||_max for both fields of a game; for the ball
    // setup B_X = max_i ||A_i||_2 and B_Y = sqrt(sum_j max_i A_ij^2).
    double B_x() const;
    double B_y() const;

private:
    Mat A_;
    double sign_;
    bool ball_x_;
    long entries_ = 0;
};

struct StochasticSaddleRun {
    SaddleRun run;
    long entry_accesses = 0;  // entries of A read by the sampling oracles
    double B_x = 0.0, B_y = 0.0;
};

// S-SP-MD with a = B_X/R_X, b = B_Y/R_Y, eta = sqrt(2/t) on a bilinear
// problem (p.matrix set). Rows are recorded every record_every steps and at t.
StochasticSaddleRun run_s_sp_md(const SaddleProblem& p, long t, Rng& rng, long record_every = 1);
double s_sp_md_bound(const SaddleProblem& p, double B_x, double B_y, long t);  // (R_X B_X + R_Y B_Y) sqrt(2/t)

// Runs count replicates in parallel, replicate i with Rng::stream(seed, i).
std::vector<RunTrace> run_replicates(std::size_t count, std::uint64_t seed,
                                     const std::function<RunTrace(Rng&, std::size_t)>& run);
// Row-wise mean of a column across replicates of equal length.
std::vector<double> mean_curve(const std::vector<RunTrace>& runs, const std::string& column);

}  // namespace convexkit
