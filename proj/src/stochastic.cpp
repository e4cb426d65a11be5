#include "convexkit/stochastic.hpp"

#include <cmath>
#include <memory>

#include "convexkit/errors.hpp"
#include "convexkit/parallel.hpp"

namespace convexkit {

Vec StochasticOracle::sample(const Vec& x, Rng& rng) {
    calls += cost_per_draw;
    return draw(x, rng);
}

double StochasticOracle::require_B() const {
    if (!B) throw MissingRegularity("stochastic oracle " + name + " has no second-moment bound B");
    return *B;
}

double StochasticOracle::require_sigma() const {
    if (!sigma) throw MissingRegularity("stochastic oracle " + name + " has no variance bound sigma");
    return *sigma;
}

double FiniteSum::value(const Vec& x) const {
    double v = 0.0;
    for (long i = 0; i < m; ++i) v += value_i(i, x);
    return v / static_cast<double>(m);
}

Vec FiniteSum::gradient(const Vec& x) const {
    Vec g = Vec::Zero(dim);
    for (long i = 0; i < m; ++i) g += gradient_i(i, x);
    return g / static_cast<double>(m);
}

double FiniteSum::kappa() const {
    if (!alpha || !(*alpha > 0.0)) throw MissingRegularity("finite sum " + name + " has no strong convexity");
    return beta / *alpha;
}

FirstOrderOracle FiniteSum::as_oracle() const {
    const FiniteSum self = *this;
    Regularity reg;
    reg.beta = beta;
    reg.alpha = alpha;
    FirstOrderOracle f(
        dim, [self](const Vec& x) { return self.value(x); }, [self](const Vec& x) { return self.gradient(x); }, reg);
    f.name = name;
    f.f_star = f_star;
    f.x_star = x_star;
    return f;
}

FiniteSum ridge_regression_sum(const Mat& W, const Vec& y, double lambda) {
    if (W.rows() != y.size()) throw DimensionMismatch("W and y row counts differ");
    if (W.rows() == 0) throw DomainError("empty data");
    if (lambda < 0.0) throw DomainError("ridge parameter must be nonnegative");
    auto data = std::make_shared<const std::pair<Mat, Vec>>(W, y);
    FiniteSum fs;
    fs.name = "ridge_regression";
    fs.dim = W.cols();
    fs.m = W.rows();
    fs.value_i = [data, lambda](long i, const Vec& x) {
        const double r = data->first.row(i).dot(x) - data->second(i);
        return 0.5 * r * r + 0.5 * lambda * x.squaredNorm();
    };
    fs.gradient_i = [data, lambda](long i, const Vec& x) {
        const double r = data->first.row(i).dot(x) - data->second(i);
        return Vec(r * data->first.row(i).transpose() + lambda * x);
    };
    const double md = static_cast<double>(W.rows());
    fs.beta = W.rowwise().squaredNorm().maxCoeff() + lambda;
    const Mat H = W.transpose() * W / md + lambda * Mat::Identity(W.cols(), W.cols());
    fs.alpha = lambda_min(H);
    if (*fs.alpha > 0.0) {
        fs.x_star = solve_posdef(H, W.transpose() * y / md);
        fs.f_star = fs.value(*fs.x_star);
    }
    return fs;
}

StochasticOracle finite_sum_oracle(const FiniteSum& fs) {
    StochasticOracle g;
    g.name = fs.name + "_component";
    g.mean = fs.as_oracle();
    const auto m = static_cast<std::size_t>(fs.m);
    auto grad_i = fs.gradient_i;
    g.draw = [grad_i, m](const Vec& x, Rng& rng) { return grad_i(static_cast<long>(rng.index(m)), x); };
    return g;
}

StochasticOracle expectation_oracle(FirstOrderOracle mean, std::function<Vec(const Vec&, Rng&)> sampler,
                                    std::optional<double> B, std::optional<double> sigma) {
    StochasticOracle g;
    g.name = mean.name.empty() ? "expectation" : mean.name;
    g.mean = std::move(mean);
    g.draw = std::move(sampler);
    g.B = B;
    g.sigma = sigma;
    return g;
}

StochasticOracle gaussian_noise_oracle(FirstOrderOracle f, double sigma) {
    if (sigma < 0.0) throw DomainError("noise level must be nonnegative");
    const double scale = sigma / std::sqrt(static_cast<double>(f.dim()));
    const FirstOrderOracle exact = f;
    StochasticOracle g = expectation_oracle(
        std::move(f),
        [exact, scale](const Vec& x, Rng& rng) {
            Vec v = exact.evaluate_subgradient(x);
            if (scale > 0.0) v += scale * rng.normal_vector(x.size());
            return v;
        },
        std::nullopt, sigma);
    g.name = "gaussian_noise";
    return g;
}

StochasticOracle minibatch_oracle(const StochasticOracle& base, long batch) {
    if (batch < 1) throw DomainError("batch size must be at least 1");
    StochasticOracle g;
    g.name = base.name + "_batch" + std::to_string(batch);
    g.mean = base.mean;
    auto draw = base.draw;
    g.draw = [draw, batch](const Vec& x, Rng& rng) {
        Vec sum = draw(x, rng);
        for (long i = 1; i < batch; ++i) sum += draw(x, rng);
        return Vec(sum / static_cast<double>(batch));
    };
    g.cost_per_draw = batch * base.cost_per_draw;
    g.B = base.B;
    if (base.B) g.sigma = std::sqrt(2.0) * *base.B / std::sqrt(static_cast<double>(batch));
    return g;
}

double smd_step(const MirrorMap& map, double B, long t) { return mirror_descent_step(map, B, t); }
double smd_bound(const MirrorMap& map, double B, long t) { return mirror_descent_bound(map, B, t); }

namespace {

void check_dims(const StochasticOracle& g, Eigen::Index dim) {
    if (g.mean.dim() != dim) throw DimensionMismatch("oracle and domain dimensions differ");
}

}  // namespace

RunTrace run_smd(StochasticOracle& g, const MirrorMap& map, double eta, long t, Rng& rng) {
    check_dims(g, map.dim());
    TraceRecorder rec(g.mean, "smd");
    Vec x = map.initial_point();
    Vec sum = Vec::Zero(x.size());
    for (long s = 1; s <= t; ++s) {
        sum += x;
        rec.record(s, x, sum / static_cast<double>(s)).oracle_first = g.calls;
        if (s == t) break;
        x = map.step(x, eta * g.sample(x, rng));
    }
    return rec.finish(x, sum / static_cast<double>(t));
}

RunTrace run_sgd_strongly(StochasticOracle& g, const ConstraintSet& set, long t, const Vec& x1, Rng& rng) {
    check_dims(g, set.dim());
    const double alpha = g.mean.require_alpha();
    TraceRecorder rec(g.mean, "sgd_strongly");
    Vec x = set.project(x1);
    Vec weighted = Vec::Zero(x.size());
    Vec out = x;
    for (long s = 1; s <= t; ++s) {
        const double sd = static_cast<double>(s);
        weighted += sd * x;
        out = (2.0 / (sd * (sd + 1.0))) * weighted;
        rec.record(s, x, out).oracle_first = g.calls;
        if (s == t) break;
        x = set.project(x - (2.0 / (alpha * (sd + 1.0))) * g.sample(x, rng));
    }
    return rec.finish(x, out);
}

double sgd_strongly_bound(double B, double alpha, long t) {
    return 2.0 * B * B / (alpha * (static_cast<double>(t) + 1.0));
}

RunTrace run_smd_smooth(StochasticOracle& g, const MirrorMap& map, long t, Rng& rng) {
    check_dims(g, map.dim());
    const double beta = g.mean.require_beta();
    const double sigma = g.require_sigma();
    const double R = std::sqrt(map.radius_sq() / map.rho());
    // 1/eta = 0 when the oracle is exact
    const double inv_eta = sigma > 0.0 ? sigma / (R * std::sqrt(2.0 / static_cast<double>(t))) : 0.0;
    const double scale = map.rho() / (beta + inv_eta);
    TraceRecorder rec(g.mean, "smd_smooth");
    Vec x = map.initial_point();
    Vec sum = Vec::Zero(x.size());
    for (long s = 1; s <= t; ++s) {
        x = map.step(x, scale * g.sample(x, rng));
        sum += x;
        rec.record(s, x, sum / static_cast<double>(s)).oracle_first = g.calls;
    }
    return rec.finish(x, sum / static_cast<double>(t));
}

double smd_smooth_bound(const MirrorMap& map, double sigma, double beta, long t) {
    const double R2 = map.radius_sq() / map.rho();
    const double td = static_cast<double>(t);
    return std::sqrt(R2) * sigma * std::sqrt(2.0 / td) + beta * R2 / td;
}

RunTrace run_minibatch_sgd(StochasticOracle& g, const MirrorMap& map, long batch, long t, Rng& rng) {
    g.require_B();
    const long iters = t / batch;
    if (iters < 1) throw DomainError("fewer oracle calls than one batch");
    StochasticOracle mb = minibatch_oracle(g, batch);
    RunTrace tr = run_smd_smooth(mb, map, iters, rng);
    tr.algorithm = "minibatch_sgd";
    g.calls += mb.calls;
    return tr;
}

double minibatch_bound(const MirrorMap& map, double B, double beta, long batch, long t) {
    const double R2 = map.radius_sq() / map.rho();
    const double td = static_cast<double>(t);
    return 2.0 * std::sqrt(R2) * B / std::sqrt(td) + static_cast<double>(batch) * beta * R2 / td;
}

long critical_batch(const MirrorMap& map, double B, double beta, long t) {
    const double R = std::sqrt(map.radius_sq() / map.rho());
    return std::max(1L, static_cast<long>(std::floor(B / (R * beta) * std::sqrt(static_cast<double>(t)))));
}

RunTrace run_svrg(const FiniteSum& fs, long epochs, const Vec& y1, Rng& rng, const SvrgOptions& opt) {
    if (y1.size() != fs.dim) throw DimensionMismatch("start point dimension differs from the sum's");
    const double eta = opt.eta ? *opt.eta : 1.0 / (10.0 * fs.beta);
    const long k = opt.k ? *opt.k : static_cast<long>(std::ceil(20.0 * fs.kappa()));
    if (k < 1) throw DomainError("epoch length must be positive");
    const FirstOrderOracle f = fs.as_oracle();
    TraceRecorder rec(f, "svrg");
    const auto m = static_cast<std::size_t>(fs.m);
    long calls = 0;
    Vec y = y1;
    for (long s = 1;; ++s) {
        rec.record(s, y, y).oracle_first = calls;
        if (s == epochs + 1) break;
        const Vec full = fs.gradient(y);
        calls += fs.m;
        Vec x = y;
        Vec sum = Vec::Zero(y.size());
        for (long i = 1; i <= k; ++i) {
            if (opt.on_inner) opt.on_inner(s, i, x);
            sum += x;
            const long j = static_cast<long>(rng.index(m));
            x -= eta * (fs.gradient_i(j, x) - fs.gradient_i(j, y) + full);
            calls += 2;
        }
        y = sum / static_cast<double>(k);
    }
    return rec.finish(y, y);
}

Vec CoordinateSmoothness::probabilities() const {
    if (beta.size() == 0 || !(beta.array() > 0.0).all()) throw DomainError("coordinate constants must be positive");
    const Vec w = beta.array().pow(gamma).matrix();
    return w / w.sum();
}

std::vector<double> CoordinateSmoothness::cumulative() const {
    const Vec p = probabilities();
    std::vector<double> c(static_cast<std::size_t>(p.size()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        acc += p(i);
        c[static_cast<std::size_t>(i)] = acc;
    }
    return c;
}

double CoordinateSmoothness::beta_power_sum() const { return beta.array().pow(gamma).sum(); }

double CoordinateSmoothness::norm(const Vec& x, double g) const {
    return std::sqrt((beta.array().pow(g) * x.array().square()).sum());
}

double CoordinateSmoothness::dual_norm(const Vec& x, double g) const {
    return std::sqrt((beta.array().pow(-g) * x.array().square()).sum());
}

CoordinateProblem coordinate_quadratic(const Mat& A, const Vec& b) {
    if (A.rows() != A.cols() || A.rows() != b.size()) throw DimensionMismatch("quadratic data sizes disagree");
    CoordinateProblem p;
    const Mat Q = symmetrize(A);
    const Vec bb = b;
    Regularity reg;
    reg.beta = lambda_max(Q);
    reg.alpha = lambda_min(Q);
    p.f = FirstOrderOracle(
        A.rows(), [Q, bb](const Vec& x) { return 0.5 * x.dot(Q * x) - bb.dot(x); },
        [Q, bb](const Vec& x) { return Vec(Q * x - bb); }, reg);
    p.f.name = "coordinate_quadratic";
    if (*reg.alpha > 0.0) {
        p.f.x_star = solve_posdef(Q, bb);
        p.f.f_star = -0.5 * bb.dot(*p.f.x_star);
    }
    p.partial = [Q, bb](Eigen::Index i, const Vec& x) { return Q.row(i).dot(x) - bb(i); };
    p.beta = Q.diagonal();
    return p;
}

RunTrace run_rcd(CoordinateProblem& p, double gamma, long t, const Vec& x1, Rng& rng) {
    if (gamma < 0.0) throw DomainError("sampling exponent must be nonnegative");
    if (x1.size() != p.beta.size()) throw DimensionMismatch("start point dimension differs from the problem's");
    const CoordinateSmoothness cs{p.beta, gamma};
    const std::vector<double> table = cs.cumulative();
    TraceRecorder rec(p.f, "rcd");
    Vec x = x1;
    for (long s = 1; s <= t; ++s) {
        rec.record(s, x, x).oracle_first = p.partial_calls;
        if (s == t) break;
        const auto i = static_cast<Eigen::Index>(rng.from_cumulative(table));
        x(i) -= p.partial(i, x) / p.beta(i);
        ++p.partial_calls;
    }
    return rec.finish(x, x);
}

double rcd_bound(double R_sq, double beta_power_sum, long t) {
    if (t < 2) throw DomainError("the RCD guarantee needs t >= 2");
    return 2.0 * R_sq * beta_power_sum / (static_cast<double>(t) - 1.0);
}

double rcd_strongly_bound(double kappa_gamma, double gap1, long t) {
    return std::pow(1.0 - 1.0 / kappa_gamma, static_cast<double>(t)) * gap1;
}

double rcd_quadratic_radius_sq(const Mat& A, const CoordinateSmoothness& cs, double gap1) {
    const Vec d = cs.beta.array().pow(0.5 * (1.0 - cs.gamma)).matrix();
    return 2.0 * gap1 * lambda_max(symmetrize(d.asDiagonal() * inverse_posdef(A) * d.asDiagonal()));
}

double rcd_quadratic_alpha(const Mat& A, const CoordinateSmoothness& cs) {
    const Vec d = cs.beta.array().pow(-0.5 * (1.0 - cs.gamma)).matrix();
    return lambda_min(symmetrize(d.asDiagonal() * A * d.asDiagonal()));
}

MatrixSamplingOracle::MatrixSamplingOracle(Mat A, double sign, bool ball_x)
    : A_(std::move(A)), sign_(sign), ball_x_(ball_x) {
    if (A_.size() == 0) throw DomainError("empty matrix");
}

Vec MatrixSamplingOracle::x_law(const Vec& y) const { return y.cwiseMax(0.0); }

Vec MatrixSamplingOracle::y_law(const Vec& x) const {
    if (!ball_x_) return x.cwiseMax(0.0);
    const double n2 = x.squaredNorm();
    if (n2 == 0.0) return Vec::Zero(x.size());
    return x.array().square().matrix() / n2;
}

Vec MatrixSamplingOracle::x_field(Eigen::Index I) {
    entries_ += A_.rows();
    return sign_ * A_.col(I);
}

Vec MatrixSamplingOracle::y_field(const Vec& x, Eigen::Index J) {
    entries_ += A_.cols();
    Vec g = -sign_ * A_.row(J).transpose();
    if (ball_x_) {
        if (x(J) == 0.0) throw ZeroCoordinateSampling("sampled a zero coordinate of x");
        g *= x.squaredNorm() / x(J);
    }
    return g;
}

namespace {

std::size_t draw_index(const Vec& law, Rng& rng) {
    std::vector<double> c(static_cast<std::size_t>(law.size()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < law.size(); ++i) {
        acc += law(i);
        c[static_cast<std::size_t>(i)] = acc;
    }
    return rng.from_cumulative(c);
}

}  // namespace

Vec MatrixSamplingOracle::sample_x(const Vec& y, Rng& rng) {
    return x_field(static_cast<Eigen::Index>(draw_index(x_law(y), rng)));
}

Vec MatrixSamplingOracle::sample_y(const Vec& x, Rng& rng) {
    const Vec law = y_law(x);
    if (law.sum() == 0.0) return Vec::Zero(A_.cols());
    return y_field(x, static_cast<Eigen::Index>(draw_index(law, rng)));
}

double MatrixSamplingOracle::B_x() const {
    return ball_x_ ? A_.colwise().norm().maxCoeff() : A_.cwiseAbs().maxCoeff();
}

double MatrixSamplingOracle::B_y() const {
    if (!ball_x_) return A_.cwiseAbs().maxCoeff();
    return std::sqrt(A_.cwiseAbs2().rowwise().maxCoeff().sum());
}

double s_sp_md_bound(const SaddleProblem& p, double B_x, double B_y, long t) {
    return (p.radius_x() * B_x + p.radius_y() * B_y) * std::sqrt(2.0 / static_cast<double>(t));
}

StochasticSaddleRun run_s_sp_md(const SaddleProblem& p, long t, Rng& rng, long record_every) {
    if (!p.matrix) throw UnsupportedOperation("S-SP-MD needs bilinear data for " + p.name);
    if (p.y_map.kind() != MirrorKind::simplex) throw UnsupportedOperation("S-SP-MD samples the x-field from y in a simplex");
    const bool ball_x = p.x_map.kind() == MirrorKind::ball;
    if (!ball_x && p.x_map.kind() != MirrorKind::simplex) throw UnsupportedOperation("unsupported X-setup for S-SP-MD");
    MatrixSamplingOracle oracle(*p.matrix, p.matrix_sign, ball_x);
    StochasticSaddleRun out;
    out.B_x = oracle.B_x();
    out.B_y = oracle.B_y();
    const double eta = std::sqrt(2.0 / static_cast<double>(t));
    const double a = out.B_x > 0.0 ? out.B_x / p.radius_x() : 1.0;
    const double b = out.B_y > 0.0 ? out.B_y / p.radius_y() : 1.0;
    const bool has_gap = p.max_over_y && p.min_over_x;
    FirstOrderOracle none;
    TraceRecorder rec(none, "s_sp_md");
    Vec x = p.x_map.initial_point(), y = p.y_map.initial_point();
    Vec xsum = Vec::Zero(x.size()), ysum = Vec::Zero(y.size());
    for (long s = 1; s <= t; ++s) {
        xsum += x;
        ysum += y;
        if (s == t || (record_every > 0 && s % record_every == 0)) {
            const double k = static_cast<double>(s);
            const Vec xa = xsum / k, ya = ysum / k;
            const double fv = p.max_over_y ? p.max_over_y(xa) : kNaN;
            TraceRow& row = rec.record_values(s, fv, has_gap ? duality_gap(p, x, y) : kNaN,
                                              has_gap ? duality_gap(p, xa, ya) : kNaN);
            row.oracle_first = oracle.entries();
        }
        if (s == t) break;
        const Vec gx = oracle.sample_x(y, rng);
        const Vec gy = oracle.sample_y(x, rng);
        x = p.x_map.step(x, (eta / a) * gx);
        y = p.y_map.step(y, (eta / b) * gy);
    }
    out.run.x_avg = xsum / static_cast<double>(t);
    out.run.y_avg = ysum / static_cast<double>(t);
    Vec last(x.size() + y.size()), avg(x.size() + y.size());
    last << x, y;
    avg << out.run.x_avg, out.run.y_avg;
    out.run.trace = rec.finish(last, avg);
    out.entry_accesses = oracle.entries();
    return out;
}

std::vector<RunTrace> run_replicates(std::size_t count, std::uint64_t seed,
                                     const std::function<RunTrace(Rng&, std::size_t)>& run) {
    std::vector<RunTrace> out(count);
    parallel_for(count, [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        out[i] = run(rng, i);
    });
    return out;
}

std::vector<double> mean_curve(const std::vector<RunTrace>& runs, const std::string& column) {
    if (runs.empty()) return {};
    std::vector<double> mean = runs.front().column(column);
    for (std::size_t r = 1; r < runs.size(); ++r) {
        const std::vector<double> c = runs[r].column(column);
        if (c.size() != mean.size()) throw DimensionMismatch("replicate traces differ in length");
        for (std::size_t i = 0; i < c.size(); ++i) mean[i] += c[i];
    }
    for (double& v : mean) v /= static_cast<double>(runs.size());
    return mean;
}

}  // namespace convexkit
