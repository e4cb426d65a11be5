#include "convexkit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "convexkit/errors.hpp"
#include "convexkit/parallel.hpp"

namespace convexkit {

// ---------------------------------------------------------------- hit-and-run

BodySampler::BodySampler(SetPtr body, Vec start, Rng rng, long walk_steps)
    : body_(std::move(body)), x_(std::move(start)), rng_(std::move(rng)), walk_steps_(walk_steps) {
    if (!body_) throw DomainError("sampler needs a body");
    if (walk_steps_ < 1) throw DomainError("walk_steps must be at least 1");
    if (!body_->contains(x_, 0.0)) throw DomainError("sampler start point is outside the body");
}

void BodySampler::chord(const Vec& d, double& lo, double& hi) const {
    if (body_->chord(x_, d, lo, hi)) return;
    // bisection on membership along +d and -d
    const double r = body_->outer_radius();
    const double scale = std::isfinite(r) && r > 0 ? r : 1.0;
    auto reach = [&](double sign) {
        double in = 0.0, out = scale;
        int k = 0;
        while (body_->contains(x_ + sign * out * d, 0.0)) {
            in = out;
            out *= 2.0;
            if (++k > 200) throw DegenerateChord("unbounded chord");
        }
        while (out - in > 1e-10 * std::max(1.0, out)) {
            const double mid = 0.5 * (in + out);
            (body_->contains(x_ + sign * mid * d, 0.0) ? in : out) = mid;
        }
        return in;
    };
    hi = reach(1.0);
    lo = -reach(-1.0);
}

void BodySampler::set_body(SetPtr body, const Vec& start) {
    if (!body) throw DomainError("sampler needs a body");
    if (!body->contains(start, 0.0)) throw DomainError("sampler start point is outside the body");
    body_ = std::move(body);
    x_ = start;
}

const Vec& BodySampler::step() {
    Vec d = rng_.unit_vector(x_.size());
    if (transform_.size() > 0) d = (transform_ * d).normalized();
    double lo = 0.0, hi = 0.0;
    chord(d, lo, hi);
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
    if (hi - lo < 1e-12) throw DegenerateChord("chord length " + std::to_string(hi - lo));
    const Vec y = x_ + rng_.uniform(lo, hi) * d;
    // rounding can put a chord endpoint a hair outside; stay put in that case
    if (body_->contains(y, 1e-9)) x_ = y;
    return x_;
}

const Vec& BodySampler::sample() {
    for (long k = 0; k < walk_steps_; ++k) step();
    return x_;
}

void BodySampler::burn_in(long steps) {
    for (long k = 0; k < steps; ++k) step();
}

std::vector<Vec> BodySampler::samples(long count) {
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) out.push_back(sample());
    return out;
}

long default_burn_in(Eigen::Index dim) { return 10 * static_cast<long>(dim) * dim * dim; }

// ---------------------------------------------------------------- isotropic position

namespace {

void sample_moments(const std::vector<Vec>& samples, Vec& mean, Mat& cov) {
    const Eigen::Index n = samples.front().size();
    const double N = static_cast<double>(samples.size());
    mean = Vec::Zero(n);
    for (const auto& x : samples) mean += x;
    mean /= N;
    cov = Mat::Zero(n, n);
    for (const auto& x : samples) {
        const Vec d = x - mean;
        cov.noalias() += d * d.transpose();
    }
    cov = symmetrize(cov / N);
}

}  // namespace

IsotropicEstimate isotropic_whiten(const std::vector<Vec>& samples) {
    if (samples.empty()) throw RankDeficient("no samples");
    const Eigen::Index n = samples.front().size();
    if (static_cast<Eigen::Index>(samples.size()) < n + 1)
        throw RankDeficient("need at least n + 1 samples");
    IsotropicEstimate est;
    sample_moments(samples, est.mean, est.covariance);
    Eigen::SelfAdjointEigenSolver<Mat> eig(est.covariance);
    const Vec lam = eig.eigenvalues();
    if (!(lam.minCoeff() > 1e-12 * lam.maxCoeff())) throw RankDeficient("samples do not span the space");
    const Mat& V = eig.eigenvectors();
    est.whitening = symmetrize(V * lam.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose());
    est.unwhitening = symmetrize(V * lam.cwiseSqrt().asDiagonal() * V.transpose());
    return est;
}

CovarianceRange whitened_covariance_range(const IsotropicEstimate& est, const std::vector<Vec>& samples) {
    std::vector<Vec> w;
    w.reserve(samples.size());
    for (const auto& x : samples) w.push_back(est.whiten(x));
    Vec mean;
    Mat cov;
    sample_moments(w, mean, cov);
    Eigen::SelfAdjointEigenSolver<Mat> eig(cov, Eigen::EigenvaluesOnly);
    return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

CutRetention cut_retention_check(const std::vector<Vec>& uniform_samples, const Vec& z, const Vec& w) {
    if (uniform_samples.empty()) throw DomainError("no samples");
    long kept = 0;
    for (const auto& x : uniform_samples)
        if (w.dot(x - z) <= 0.0) ++kept;
    CutRetention out;
    const double N = static_cast<double>(uniform_samples.size());
    out.fraction = static_cast<double>(kept) / N;
    out.threshold = 1.0 / std::numbers::e - z.norm();
    out.std_error = std::sqrt(std::max(out.fraction * (1.0 - out.fraction), 0.0) / N);
    out.passed = out.fraction >= out.threshold - 3.0 * out.std_error;
    return out;
}

// ---------------------------------------------------------------- Gaussian sampling

Mat psd_factor(const Mat& sigma) {
    if (sigma.rows() != sigma.cols()) throw DimensionMismatch("covariance must be square");
    const Eigen::Index n = sigma.rows();
    const double scale = std::max(sigma.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    Mat F = Mat::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double d = sigma(j, j) - F.row(j).head(j).squaredNorm();
        if (d < -1e-12 * scale) throw NotPSD("negative pivot " + std::to_string(d));
        if (d <= 1e-12 * scale) continue;
        const double root = std::sqrt(d);
        F(j, j) = root;
        for (Eigen::Index i = j + 1; i < n; ++i)
            F(i, j) = (sigma(i, j) - F.row(i).head(j).dot(F.row(j).head(j))) / root;
    }
    return F;
}

Vec gaussian_sample_factor(const Mat& factor, Rng& rng) { return factor * rng.normal_vector(factor.cols()); }

Vec gaussian_sample(const Mat& sigma, Rng& rng) { return gaussian_sample_factor(psd_factor(sigma), rng); }

// ---------------------------------------------------------------- MAXCUT relaxation

Mat graph_laplacian(const Mat& weights) {
    if (weights.rows() != weights.cols()) throw DimensionMismatch("weight matrix must be square");
    if ((weights - weights.transpose()).cwiseAbs().maxCoeff() > 0) throw DomainError("weights must be symmetric");
    if (weights.minCoeff() < 0) throw DomainError("weights must be nonnegative");
    Mat A = weights;
    A.diagonal().setZero();
    Mat L = -A;
    L.diagonal() = A.rowwise().sum();
    return L;
}

namespace {

Mat project_psd(const Mat& X) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(symmetrize(X));
    const Vec lam = eig.eigenvalues().cwiseMax(0.0);
    return symmetrize(eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose());
}

// Dykstra's alternating projections onto {PSD} and {diag = 1}.
Mat project_elliptope(const Mat& Y, long& sweeps) {
    Mat X = Y, P = Mat::Zero(Y.rows(), Y.cols()), Q = P;
    for (int k = 0; k < 200; ++k) {
        ++sweeps;
        const Mat Yk = project_psd(X + P);
        P = X + P - Yk;
        Mat Xn = Yk + Q;
        Xn.diagonal().setOnes();
        Q = Yk + Q - Xn;
        const double change = (Xn - X).norm();
        X = std::move(Xn);
        if (change < 1e-7 * std::max(1.0, X.norm())) break;
    }
    return X;
}

}  // namespace

SdpResult sdp_relax_maxcut(const Mat& L, long iterations, double tol) {
    if (L.rows() != L.cols()) throw DimensionMismatch("L must be square");
    const Eigen::Index n = L.rows();
    SdpResult out;
    const double fro = L.norm();
    Mat X = Mat::Identity(n, n);
    if (fro == 0.0) {
        out.X = X;
        return out;
    }
    const double eta = 1.0 / (2.0 * fro);
    double prev = (L.array() * X.array()).sum();
    bool converged = false;
    for (long it = 1; it <= iterations; ++it) {
        X = project_elliptope(X + eta * L, out.projection_sweeps);
        out.iterations = it;
        const double v = (L.array() * X.array()).sum();
        const bool small = std::abs(v - prev) <= tol * std::max(1.0, std::abs(v));
        prev = v;
        if (small) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NoConvergence("SDP ascent did not settle within " + std::to_string(iterations) + " iterations");
    // exact feasibility: PSD part, then congruence scaling to unit diagonal
    X = project_psd(X);
    const Vec d = X.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    X = symmetrize(d.asDiagonal() * X * d.asDiagonal());
    X.diagonal().setOnes();
    out.X = X;
    out.value = (L.array() * X.array()).sum();
    return out;
}

BruteForceCut brute_force_max_quadratic(const Mat& L) {
    const Eigen::Index n = L.rows();
    if (n < 1 || n > 24) throw DomainError("brute force supports 1 <= n <= 24");
    BruteForceCut best;
    best.value = -std::numeric_limits<double>::infinity();
    Vec x(n);
    // x(0) = +1 by symmetry
    const unsigned long count = 1UL << (n - 1);
    for (unsigned long mask = 0; mask < count; ++mask) {
        x(0) = 1.0;
        for (Eigen::Index i = 1; i < n; ++i) x(i) = (mask >> (i - 1)) & 1UL ? -1.0 : 1.0;
        const double v = x.dot(L * x);
        if (v > best.value) {
            best.value = v;
            best.x = x;
        }
    }
    return best;
}

// ---------------------------------------------------------------- rounding

RoundingResult sign_round(const Mat& sigma, const Mat& B, long replicates, std::uint64_t seed) {
    if (replicates < 1) throw DomainError("need at least one replicate");
    if (sigma.rows() != B.rows()) throw DimensionMismatch("sigma and B disagree");
    const Eigen::Index n = sigma.rows();
    const Mat F = psd_factor(sigma);
    std::vector<Vec> signs(static_cast<std::size_t>(replicates));
    std::vector<double> values(static_cast<std::size_t>(replicates));
    parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t r) {
        Rng rng = Rng::stream(seed, r);
        const Vec xi = gaussian_sample_factor(F, rng);
        Vec z(n);
        for (Eigen::Index i = 0; i < n; ++i) z(i) = xi(i) >= 0.0 ? 1.0 : -1.0;
        values[r] = z.dot(B * z);
        signs[r] = std::move(z);
    });
    RoundingResult out;
    out.best_value = -std::numeric_limits<double>::infinity();
    out.sign_correlation = Mat::Zero(n, n);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t r = 0; r < values.size(); ++r) {
        sum += values[r];
        sumsq += values[r] * values[r];
        out.sign_correlation.noalias() += signs[r] * signs[r].transpose();
        if (values[r] > out.best_value) {
            out.best_value = values[r];
            out.best = signs[r];
        }
    }
    const double N = static_cast<double>(replicates);
    out.mean_value = sum / N;
    const double var = replicates > 1 ? std::max(0.0, (sumsq - N * out.mean_value * out.mean_value) / (N - 1)) : 0.0;
    out.std_error = std::sqrt(var / N);
    out.sign_correlation /= N;
    return out;
}

RoundingResult gw_round(const Mat& sigma, const Mat& L, long replicates, std::uint64_t seed) {
    return sign_round(sigma, L, replicates, seed);
}

RoundingResult psd_quadratic_round(const Mat& B, const Mat& sigma, long replicates, std::uint64_t seed) {
    return sign_round(sigma, B, replicates, seed);
}

Mat arcsin_correlation(const Mat& sigma) {
    return sigma.unaryExpr([](double v) { return 2.0 / std::numbers::pi * std::asin(std::clamp(v, -1.0, 1.0)); });
}

}  // namespace convexkit
