#pragma once

#include <memory>
#include <vector>

#include "convexkit/linalg.hpp"
#include "convexkit/rng.hpp"
#include "convexkit/sets.hpp"

namespace convexkit {

// Hit-and-run walk on a convex body: a uniform random direction, then a
// uniform point on the chord through the current point. Chords come from
// ConstraintSet::chord when available, else by bisection on membership.
class BodySampler {
public:
    BodySampler(SetPtr body, Vec start, Rng rng, long walk_steps = 1);

    // One hit-and-run move. Throws DegenerateChord when the chord is shorter
    // than 1e-12.
    const Vec& step();
    // walk_steps moves, returning the point reached.
    const Vec& sample();
    void burn_in(long steps);
    std::vector<Vec> samples(long count);

    // Replaces the body; start must lie in it.
    void set_body(SetPtr body, const Vec& start);
    // Directions become T u / ||T u|| with u uniform on the sphere, which is
    // hit-and-run in the coordinates y = T^{-1} x (the uniform law on the body
    // stays stationary).
    void set_direction_transform(const Mat& T) { transform_ = T; }

    const Vec& current() const { return x_; }
    long walk_steps() const { return walk_steps_; }
    Rng& rng() { return rng_; }

private:
    void chord(const Vec& d, double& lo, double& hi) const;

    SetPtr body_;
    Vec x_;
    Rng rng_;
    long walk_steps_;
    Mat transform_;
};

// 10 n^3 steps, the default burn-in.
long default_burn_in(Eigen::Index dim);

struct IsotropicEstimate {
    Vec mean;
    Mat covariance;
    Mat whitening;    // covariance^{-1/2}
    Mat unwhitening;  // covariance^{1/2}

    Vec whiten(const Vec& x) const { return whitening * (x - mean); }
    Vec unwhiten(const Vec& y) const { return mean + unwhitening * y; }
};

// Empirical mean and covariance of the samples and the symmetric whitening
// transform. Throws RankDeficient with fewer than n + 1 samples or a
// covariance whose smallest eigenvalue is below 1e-12 of its largest.
IsotropicEstimate isotropic_whiten(const std::vector<Vec>& samples);

// Spectral range of the sample covariance of whiten(samples).
struct CovarianceRange {
    double min_eig = 0.0;
    double max_eig = 0.0;
};
CovarianceRange whitened_covariance_range(const IsotropicEstimate& est, const std::vector<Vec>& samples);

// Fraction of the uniform samples kept by the halfspace {x : w^T (x - z) <= 0}
// against the threshold 1/e - ||z|| for a body in isotropic position.
struct CutRetention {
    double fraction = 0.0;
    double threshold = 0.0;
    double std_error = 0.0;
    bool passed = false;  // fraction >= threshold - 3 std_error
};
CutRetention cut_retention_check(const std::vector<Vec>& uniform_samples, const Vec& z, const Vec& w);

// Lower factor F with F F^T = sigma for PSD sigma; pivots at or below 1e-12
// times the largest diagonal entry give zero columns. Throws NotPSD when a
// pivot is below -1e-12 times that scale.
Mat psd_factor(const Mat& sigma);
Vec gaussian_sample(const Mat& sigma, Rng& rng);
Vec gaussian_sample_factor(const Mat& factor, Rng& rng);

// Graph Laplacian D - A of a symmetric nonnegative weight matrix.
Mat graph_laplacian(const Mat& weights);

struct SdpResult {
    Mat X;  // PSD with unit diagonal
    double value = 0.0;  // <L, X>
    long iterations = 0;
    long projection_sweeps = 0;
};
// max <L, X> over PSD X with unit diagonal by projected gradient ascent with
// step 1/(2 ||L||_F); each projection is Dykstra's method on {PSD} and
// {diag = 1}. Stops when the objective changes by at most tol (relative).
SdpResult sdp_relax_maxcut(const Mat& L, long iterations = 5000, double tol = 1e-7);

// max of x^T L x over sign vectors by enumeration (n <= 24).
struct BruteForceCut {
    Vec x;
    double value = 0.0;
};
BruteForceCut brute_force_max_quadratic(const Mat& L);

struct RoundingResult {
    Vec best;  // best sign vector seen
    double best_value = 0.0;
    double mean_value = 0.0;
    double std_error = 0.0;
    Mat sign_correlation;  // empirical E zeta zeta^T
};
// zeta = sign(xi), xi ~ N(0, sigma), sign(0) = +1; the value of zeta is
// zeta^T B zeta. Replicate r uses Rng::stream(seed, r).
RoundingResult sign_round(const Mat& sigma, const Mat& B, long replicates, std::uint64_t seed);
RoundingResult gw_round(const Mat& sigma, const Mat& L, long replicates, std::uint64_t seed);
RoundingResult psd_quadratic_round(const Mat& B, const Mat& sigma, long replicates, std::uint64_t seed);

// Entrywise (2/pi) arcsin(sigma).
Mat arcsin_correlation(const Mat& sigma);

}  // namespace convexkit
