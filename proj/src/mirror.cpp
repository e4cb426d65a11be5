#include "convexkit/mirror.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "convexkit/errors.hpp"

namespace convexkit {

namespace {

constexpr double kFloor = 1e-300;

Vec require_finite(Vec x, const char* what) {
    if (!x.allFinite()) throw GradientMapInversionFailure(what);
    return x;
}

// Softmax of theta with max-subtraction, entries floored at 1e-300.
Vec softmax(const Vec& theta) {
    Vec e = (theta.array() - theta.maxCoeff()).exp();
    e /= e.sum();
    return e.cwiseMax(kFloor);
}

Mat unflatten(const Vec& x, Eigen::Index k) {
    if (x.size() != k * k) throw DimensionMismatch("flattened matrix has the wrong size");
    return symmetrize(Eigen::Map<const Mat>(x.data(), k, k));
}

Vec flatten(const Mat& X) { return Eigen::Map<const Vec>(X.data(), X.size()); }

double entropy_term(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

// Simplex iterates stay positive with unit sum; spectrahedron iterates stay PSD
// with unit trace.
void check_iterate(const MirrorMap& map, const Vec& x) {
    if (map.kind() == MirrorKind::simplex) {
        if (!(x.minCoeff() > 0.0) || std::abs(x.sum() - 1.0) > 1e-12)
            throw InvariantBroken("simplex iterate left the relative interior");
    } else if (map.kind() == MirrorKind::spectrahedron) {
        const Eigen::Index k = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(x.size()))));
        const Mat X = unflatten(x, k);
        if (std::abs(X.trace() - 1.0) > 1e-9 || lambda_min(X) < -1e-9)
            throw InvariantBroken("spectrahedron iterate is not a density matrix");
    }
}

}  // namespace

MirrorMap::MirrorMap(MirrorKind kind, SetPtr set) : kind_(kind), set_(std::move(set)) {
    if (!set_) throw DomainError("mirror map needs a constraint set");
    if (kind_ == MirrorKind::simplex && set_->kind() != "simplex")
        throw DomainError("the entropic map is paired with the simplex");
    if (kind_ == MirrorKind::spectrahedron && set_->kind() != "spectrahedron")
        throw DomainError("the von Neumann map is paired with the spectrahedron");
}

std::string MirrorMap::name() const {
    switch (kind_) {
        case MirrorKind::ball: return "ball";
        case MirrorKind::simplex: return "simplex";
        case MirrorKind::spectrahedron: return "spectrahedron";
    }
    return "";
}

Eigen::Index MirrorMap::side() const {
    const auto k = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(dim()))));
    if (k * k != dim()) throw DimensionMismatch("spectrahedron dimension is not a square");
    return k;
}

double MirrorMap::potential(const Vec& x) const {
    if (x.size() != dim()) throw DimensionMismatch("mirror map argument");
    switch (kind_) {
        case MirrorKind::ball: return 0.5 * x.squaredNorm();
        case MirrorKind::simplex: {
            if (x.minCoeff() < 0.0) throw DomainError("negative entry for the entropy");
            double s = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) s += entropy_term(x(i));
            return s;
        }
        case MirrorKind::spectrahedron: {
            const SpectralDecomposition d = sym_eig(unflatten(x, side()));
            if (d.eigenvalues.minCoeff() < -1e-12) throw DomainError("matrix is not PSD");
            double s = 0.0;
            for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) s += entropy_term(d.eigenvalues(i));
            return s;
        }
    }
    return 0.0;
}

Vec MirrorMap::gradient(const Vec& x) const {
    if (x.size() != dim()) throw DimensionMismatch("mirror map argument");
    switch (kind_) {
        case MirrorKind::ball: return x;
        case MirrorKind::simplex:
            if (x.minCoeff() <= 0.0) throw DomainError("entropy gradient needs positive entries");
            return (x.array().log() + 1.0).matrix();
        case MirrorKind::spectrahedron: {
            const Eigen::Index k = side();
            Mat G = matrix_function(
                unflatten(x, k), [](double v) { return std::log(v); }, [](double v) { return v > 0.0; });
            G.diagonal().array() += 1.0;
            return flatten(G);
        }
    }
    return x;
}

Vec MirrorMap::inverse_gradient(const Vec& theta) const {
    if (theta.size() != dim()) throw DimensionMismatch("mirror map argument");
    switch (kind_) {
        case MirrorKind::ball: return theta;
        case MirrorKind::simplex: return require_finite((theta.array() - 1.0).exp().matrix(), "exp overflow");
        case MirrorKind::spectrahedron: {
            const Eigen::Index k = side();
            Mat T = unflatten(theta, k);
            T.diagonal().array() -= 1.0;
            return require_finite(flatten(matrix_exp(T)), "matrix exp overflow");
        }
    }
    return theta;
}

Vec MirrorMap::project(const Vec& y) const {
    if (y.size() != dim()) throw DimensionMismatch("mirror map argument");
    switch (kind_) {
        case MirrorKind::ball: return set_->project(y);
        case MirrorKind::simplex: {
            if (y.minCoeff() <= 0.0) throw DomainError("KL projection needs positive entries");
            return (y / y.sum()).cwiseMax(kFloor);
        }
        case MirrorKind::spectrahedron: {
            const Mat Y = unflatten(y, side());
            const double tr = Y.trace();
            if (!(tr > 0.0)) throw DomainError("trace renormalization needs positive trace");
            return flatten(Y / tr);
        }
    }
    return y;
}

Vec MirrorMap::dual_to_primal(const Vec& theta) const {
    if (theta.size() != dim()) throw DimensionMismatch("mirror map argument");
    switch (kind_) {
        case MirrorKind::ball: return require_finite(set_->project(theta), "non-finite projection");
        case MirrorKind::simplex: return require_finite(softmax(theta), "non-finite dual point");
        case MirrorKind::spectrahedron: {
            const SpectralDecomposition d = sym_eig(unflatten(theta, side()));
            const Vec w = (d.eigenvalues.array() - d.eigenvalues.maxCoeff()).exp().matrix();
            const Mat X = d.eigenvectors * (w / w.sum()).asDiagonal() * d.eigenvectors.transpose();
            return require_finite(flatten(symmetrize(X)), "non-finite dual point");
        }
    }
    return theta;
}

Vec MirrorMap::step(const Vec& x, const Vec& g) const {
    if (g.size() != dim()) throw DimensionMismatch("mirror step direction");
    switch (kind_) {
        case MirrorKind::ball: return require_finite(set_->project(x - g), "non-finite step");
        case MirrorKind::simplex: {
            // log-space multiplicative update y(i) = x(i) exp(-g(i))
            const Vec logx = x.cwiseMax(kFloor).array().log().matrix();
            return dual_to_primal(logx - g);
        }
        case MirrorKind::spectrahedron: {
            const Eigen::Index k = side();
            const Mat L = matrix_function(
                unflatten(x, k), [](double v) { return std::log(std::max(v, kFloor)); },
                [](double v) { return v > -1e-12; });
            return dual_to_primal(flatten(L) - g);
        }
    }
    return x;
}

double MirrorMap::rho() const { return kind_ == MirrorKind::spectrahedron ? 0.5 : 1.0; }

double MirrorMap::radius_sq() const {
    switch (kind_) {
        case MirrorKind::ball: {
            const double R = set_->outer_radius();
            if (!std::isfinite(R)) return std::numeric_limits<double>::infinity();
            return 0.5 * R * R - potential(initial_point());
        }
        case MirrorKind::simplex: return std::log(static_cast<double>(dim()));
        case MirrorKind::spectrahedron: return std::log(static_cast<double>(side()));
    }
    return 0.0;
}

Vec MirrorMap::initial_point() const {
    switch (kind_) {
        case MirrorKind::ball: return set_->project(Vec::Zero(dim()));
        case MirrorKind::simplex: return Vec::Constant(dim(), 1.0 / static_cast<double>(dim()));
        case MirrorKind::spectrahedron: {
            const Eigen::Index k = side();
            return flatten(Mat::Identity(k, k) / static_cast<double>(k));
        }
    }
    return Vec();
}

double MirrorMap::norm(const Vec& x) const {
    switch (kind_) {
        case MirrorKind::ball: return x.norm();
        case MirrorKind::simplex: return x.lpNorm<1>();
        case MirrorKind::spectrahedron: return sym_eig(unflatten(x, side())).eigenvalues.lpNorm<1>();
    }
    return 0.0;
}

double MirrorMap::dual_norm(const Vec& g) const {
    switch (kind_) {
        case MirrorKind::ball: return g.norm();
        case MirrorKind::simplex: return g.lpNorm<Eigen::Infinity>();
        case MirrorKind::spectrahedron: return sym_eig(unflatten(g, side())).eigenvalues.lpNorm<Eigen::Infinity>();
    }
    return 0.0;
}

std::string MirrorMap::norm_name() const {
    switch (kind_) {
        case MirrorKind::ball: return "l2";
        case MirrorKind::simplex: return "l1";
        case MirrorKind::spectrahedron: return "schatten1";
    }
    return "";
}

MirrorMap standard_mirror_map(MirrorKind kind, Eigen::Index dim, SetPtr ball_set) {
    if (dim < 1) throw DomainError("dimension must be at least 1");
    switch (kind) {
        case MirrorKind::ball:
            if (!ball_set) ball_set = std::make_shared<Ball>(dim, 1.0);
            if (ball_set->dim() != dim) throw DimensionMismatch("ball setup set dimension");
            return MirrorMap(kind, ball_set);
        case MirrorKind::simplex: return MirrorMap(kind, std::make_shared<Simplex>(dim));
        case MirrorKind::spectrahedron: {
            const auto k = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(dim))));
            if (k * k != dim) throw DimensionMismatch("spectrahedron dimension is not a square");
            return MirrorMap(kind, std::make_shared<Spectrahedron>(k));
        }
    }
    throw DomainError("unknown mirror map");
}

double bregman_divergence(const MirrorMap& map, const Vec& x, const Vec& y) {
    if (x.size() != map.dim() || y.size() != map.dim()) throw DimensionMismatch("Bregman divergence arguments");
    switch (map.kind()) {
        case MirrorKind::ball: return 0.5 * (x - y).squaredNorm();
        case MirrorKind::simplex: {
            if (x.minCoeff() < 0.0 || y.minCoeff() <= 0.0) throw DomainError("KL needs x >= 0 and y > 0");
            double s = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) s += entropy_term(x(i)) - x(i) * std::log(y(i)) - x(i) + y(i);
            return s;
        }
        case MirrorKind::spectrahedron: {
            // tr(X log X - X log Y - X + Y)
            const Eigen::Index k = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(x.size()))));
            const Mat X = unflatten(x, k), Y = unflatten(y, k);
            const Mat logY = matrix_function(
                Y, [](double v) { return std::log(v); }, [](double v) { return v > 0.0; });
            return map.potential(x) - (X * logY).trace() - X.trace() + Y.trace();
        }
    }
    return 0.0;
}

double mirror_descent_step(const MirrorMap& map, double L, long t) {
    return std::sqrt(map.radius_sq()) / L * std::sqrt(2.0 * map.rho() / static_cast<double>(t));
}

double dual_averaging_step(const MirrorMap& map, double L, long t) {
    return std::sqrt(map.radius_sq()) / L * std::sqrt(map.rho() / (2.0 * static_cast<double>(t)));
}

double mirror_prox_step(const MirrorMap& map, double beta) { return map.rho() / beta; }

double mirror_descent_bound(const MirrorMap& map, double L, long t) {
    return std::sqrt(map.radius_sq()) * L * std::sqrt(2.0 / (map.rho() * static_cast<double>(t)));
}

double dual_averaging_bound(const MirrorMap& map, double L, long t) { return 2.0 * mirror_descent_bound(map, L, t); }

double mirror_prox_bound(const MirrorMap& map, double beta, long t) {
    return beta * map.radius_sq() / (map.rho() * static_cast<double>(t));
}

RunTrace run_mirror_descent(FirstOrderOracle& f, const MirrorMap& map, double eta, long t) {
    if (f.dim() != map.dim()) throw DimensionMismatch("oracle and mirror map dimensions differ");
    TraceRecorder rec(f, "mirror_descent");
    Vec x = map.initial_point();
    Vec sum = Vec::Zero(x.size());
    for (long s = 1; s <= t; ++s) {
        sum += x;
        rec.record(s, x, sum / static_cast<double>(s));
        if (s == t) break;
        x = map.step(x, eta * f.subgradient(x));
        check_iterate(map, x);
    }
    return rec.finish(x, sum / static_cast<double>(t));
}

Vec dual_averaging_point(const MirrorMap& map, const Vec& gradient_sum, double eta) {
    return map.dual_to_primal(-eta * gradient_sum);
}

RunTrace run_dual_averaging(FirstOrderOracle& f, const MirrorMap& map, double eta, long t) {
    if (f.dim() != map.dim()) throw DimensionMismatch("oracle and mirror map dimensions differ");
    TraceRecorder rec(f, "dual_averaging");
    Vec x = map.initial_point();
    Vec gsum = Vec::Zero(x.size());
    Vec sum = Vec::Zero(x.size());
    for (long s = 1; s <= t; ++s) {
        sum += x;
        rec.record(s, x, sum / static_cast<double>(s));
        if (s == t) break;
        gsum += f.subgradient(x);
        x = dual_averaging_point(map, gsum, eta);
        check_iterate(map, x);
    }
    return rec.finish(x, sum / static_cast<double>(t));
}

RunTrace run_mirror_prox(FirstOrderOracle& f, const MirrorMap& map, double eta, long t) {
    if (f.dim() != map.dim()) throw DimensionMismatch("oracle and mirror map dimensions differ");
    TraceRecorder rec(f, "mirror_prox");
    Vec x = map.initial_point();
    Vec y = x;
    Vec sum = Vec::Zero(x.size());
    for (long s = 1; s <= t; ++s) {
        y = map.step(x, eta * f.subgradient(x));
        x = map.step(x, eta * f.subgradient(y));
        check_iterate(map, x);
        sum += y;
        rec.record(s, y, sum / static_cast<double>(s));
    }
    return rec.finish(x, sum / static_cast<double>(t));
}

double FieldRun::regret(const Vec& x) const {
    double r = 0.0;
    for (std::size_t s = 0; s < points.size(); ++s) r += fields[s].dot(points[s] - x);
    return r;
}

double FieldRun::dual_norm_sq_sum(const MirrorMap& map) const {
    double s = 0.0;
    for (const auto& g : fields) {
        const double d = map.dual_norm(g);
        s += d * d;
    }
    return s;
}

FieldRun run_mirror_descent_field(const FieldSequence& field, const MirrorMap& map, double eta, long t) {
    FieldRun run;
    Vec x = map.initial_point();
    for (long s = 1; s <= t; ++s) {
        const Vec g = field(s, x);
        run.points.push_back(x);
        run.fields.push_back(g);
        x = map.step(x, eta * g);
    }
    return run;
}

FieldRun run_dual_averaging_field(const FieldSequence& field, const MirrorMap& map, double eta, long t) {
    FieldRun run;
    Vec x = map.initial_point();
    Vec gsum = Vec::Zero(x.size());
    for (long s = 1; s <= t; ++s) {
        const Vec g = field(s, x);
        run.points.push_back(x);
        run.fields.push_back(g);
        gsum += g;
        x = dual_averaging_point(map, gsum, eta);
    }
    return run;
}

FieldRun run_mirror_prox_field(const std::function<Vec(const Vec&)>& field, const MirrorMap& map, double eta,
                               long t) {
    FieldRun run;
    Vec x = map.initial_point();
    for (long s = 1; s <= t; ++s) {
        const Vec y = map.step(x, eta * field(x));
        const Vec gy = field(y);
        x = map.step(x, eta * gy);
        run.points.push_back(y);
        run.fields.push_back(gy);
    }
    return run;
}

}  // namespace convexkit
