#include "convexkit/composite_saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "convexkit/errors.hpp"

namespace convexkit {

Vec prox_l1(double alpha, const Vec& y) {
    if (alpha < 0.0) throw DomainError("soft threshold needs alpha >= 0");
    return ((y.array().abs() - alpha).max(0.0) * y.array().sign()).matrix();
}

Vec composite_prox(const CompositeProblem& p, double theta, const Vec& y) {
    if (!p.coordinate_prox) return prox_l1(theta * p.lambda, y);
    Vec x(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) x(i) = p.coordinate_prox(i, theta, y(i));
    return x;
}

namespace {

void record_composite(TraceRecorder& rec, const CompositeProblem& p, long s, const Vec& x) {
    const double F = p.total_value(x);
    const double gap = p.total_star ? F - *p.total_star : kNaN;
    TraceRow& row = rec.record_values(s, F, gap, gap);
    if (p.x_star) row.dist_to_opt = (x - *p.x_star).norm();
}

}  // namespace

RunTrace run_ista(CompositeProblem& p, long t, const Vec& x1) {
    const double beta = p.smooth.require_beta();
    TraceRecorder rec(p.smooth, "ista");
    Vec x = x1;
    for (long s = 1; s <= t; ++s) {
        record_composite(rec, p, s, x);
        if (s == t) break;
        x = composite_prox(p, 1.0 / beta, x - p.smooth.subgradient(x) / beta);
    }
    return rec.finish(x, x);
}

RunTrace run_fista(CompositeProblem& p, long t, const Vec& x1) {
    const double beta = p.smooth.require_beta();
    TraceRecorder rec(p.smooth, "fista");
    Vec x = x1, y = x1;
    double lam = 1.0;
    double lam_next = (1.0 + std::sqrt(5.0)) / 2.0;
    for (long s = 1; s <= t; ++s) {
        record_composite(rec, p, s, y);
        if (s == t) break;
        const Vec y_next = composite_prox(p, 1.0 / beta, x - p.smooth.subgradient(x) / beta);
        const double gamma = (1.0 - lam) / lam_next;
        x = (1.0 - gamma) * y_next + gamma * y;
        lam = lam_next;
        lam_next = (1.0 + std::sqrt(1.0 + 4.0 * lam * lam)) / 2.0;
        y = y_next;
    }
    return rec.finish(y, y);
}

double ista_bound(double beta, double dist_sq, long t) { return beta * dist_sq / (2.0 * static_cast<double>(t)); }

double fista_bound(double beta, double dist_sq, long t) {
    const double td = static_cast<double>(t);
    return 2.0 * beta * dist_sq / (td * td);
}

double SaddleProblem::radius_x() const { return std::sqrt(x_map.radius_sq()); }
double SaddleProblem::radius_y() const { return std::sqrt(y_map.radius_sq()); }

double duality_gap(const SaddleProblem& p, const Vec& x, const Vec& y) {
    if (!p.max_over_y || !p.min_over_x) throw UnsupportedOperation("no closed-form inner optimization for " + p.name);
    return p.max_over_y(x) - p.min_over_x(y);
}

namespace {

// Gap surrogate for the trace: the duality gap when both inner problems are
// available, else the primal gap against a known value.
double trace_gap(const SaddleProblem& p, const Vec& x, const Vec& y) {
    if (p.max_over_y && p.min_over_x) return duality_gap(p, x, y);
    if (p.max_over_y && p.value) return p.max_over_y(x) - *p.value;
    return kNaN;
}

struct SaddleRecorder {
    const SaddleProblem& p;
    FirstOrderOracle none;
    TraceRecorder rec;
    Vec xsum, ysum;
    long calls = 0;

    SaddleRecorder(const SaddleProblem& problem, const std::string& name)
        : p(problem), rec(none, name), xsum(Vec::Zero(problem.x_map.dim())), ysum(Vec::Zero(problem.y_map.dim())) {}

    void record(long s, const Vec& x, const Vec& y) {
        xsum += x;
        ysum += y;
        const double k = static_cast<double>(s);
        const Vec xa = xsum / k, ya = ysum / k;
        const double fv = p.max_over_y ? p.max_over_y(xa) : kNaN;
        TraceRow& row = rec.record_values(s, fv, trace_gap(p, x, y), trace_gap(p, xa, ya));
        row.oracle_first = calls;
    }

    SaddleRun finish(const Vec& x, const Vec& y, long s) {
        SaddleRun out;
        out.x_avg = xsum / static_cast<double>(s);
        out.y_avg = ysum / static_cast<double>(s);
        Vec last(x.size() + y.size());
        last << x, y;
        Vec avg(x.size() + y.size());
        avg << out.x_avg, out.y_avg;
        out.trace = rec.finish(last, avg);
        return out;
    }
};

void check_problem(const SaddleProblem& p) {
    if (!p.grad_x || !p.grad_y) throw DomainError("saddle problem needs both partial subgradients");
}

}  // namespace

double sp_md_bound(const SaddleProblem& p, long t) {
    if (!p.L_x || !p.L_y) throw MissingRegularity("SP-MD needs L_X and L_Y");
    return (p.radius_x() * *p.L_x + p.radius_y() * *p.L_y) * std::sqrt(2.0 / static_cast<double>(t));
}

SaddleRun run_sp_md(const SaddleProblem& p, long t) {
    check_problem(p);
    if (!p.L_x || !p.L_y) throw MissingRegularity("SP-MD needs L_X and L_Y");
    const double Rx = p.radius_x(), Ry = p.radius_y();
    const double eta = std::sqrt(2.0 / static_cast<double>(t));
    // a or b = 0 means that side's field vanishes; any positive weight works.
    const double a = *p.L_x > 0.0 ? *p.L_x / Rx : 1.0;
    const double b = *p.L_y > 0.0 ? *p.L_y / Ry : 1.0;
    SaddleRecorder rec(p, "sp_md");
    Vec x = p.x_map.initial_point(), y = p.y_map.initial_point();
    for (long s = 1; s <= t; ++s) {
        rec.record(s, x, y);
        if (s == t) break;
        const Vec gx = p.grad_x(x, y), gy = p.grad_y(x, y);
        ++rec.calls;
        x = p.x_map.step(x, (eta / a) * gx);
        y = p.y_map.step(y, (eta / b) * gy);
    }
    return rec.finish(x, y, t);
}

double sp_mp_constant(const SaddleProblem& p) {
    if (!p.smoothness) throw MissingRegularity("SP-MP needs the smoothness quadruple");
    const SaddleSmoothness& s = *p.smoothness;
    const double Rx = p.radius_x(), Ry = p.radius_y();
    return std::max({s.b11 * Rx * Rx, s.b22 * Ry * Ry, s.b12 * Rx * Ry, s.b21 * Rx * Ry});
}

double sp_mp_bound(const SaddleProblem& p, long t) { return 4.0 * sp_mp_constant(p) / static_cast<double>(t); }

SaddleRun run_sp_mp(const SaddleProblem& p, long t) {
    check_problem(p);
    const double M = sp_mp_constant(p);
    const double Rx2 = p.x_map.radius_sq(), Ry2 = p.y_map.radius_sq();
    // M = 0 means a constant field; any step is then exact.
    const double eta = M > 0.0 ? 1.0 / (2.0 * M) : 1.0;
    SaddleRecorder rec(p, "sp_mp");
    Vec x = p.x_map.initial_point(), y = p.y_map.initial_point();
    Vec u = x, v = y;
    for (long s = 1; s <= t; ++s) {
        // the mirror map is Phi_X / R_X^2 + Phi_Y / R_Y^2
        const Vec gx = p.grad_x(x, y), gy = p.grad_y(x, y);
        u = p.x_map.step(x, (eta * Rx2) * gx);
        v = p.y_map.step(y, (eta * Ry2) * gy);
        const Vec hx = p.grad_x(u, v), hy = p.grad_y(u, v);
        rec.calls += 2;
        x = p.x_map.step(x, (eta * Rx2) * hx);
        y = p.y_map.step(y, (eta * Ry2) * hy);
        rec.record(s, u, v);
    }
    return rec.finish(u, v, t);
}

SaddleProblem build_matrix_game(const Mat& A) {
    if (A.size() == 0) throw DomainError("empty game matrix");
    const double amax = A.cwiseAbs().maxCoeff();
    SaddleProblem p{.name = "matrix_game",
                    .x_map = standard_mirror_map(MirrorKind::simplex, A.rows()),
                    .y_map = standard_mirror_map(MirrorKind::simplex, A.cols())};
    p.phi = [A](const Vec& x, const Vec& y) { return x.dot(A * y); };
    p.grad_x = [A](const Vec&, const Vec& y) { return Vec(A * y); };
    p.grad_y = [A](const Vec& x, const Vec&) { return Vec(-(A.transpose() * x)); };
    p.L_x = amax;
    p.L_y = amax;
    p.smoothness = SaddleSmoothness{0.0, amax, 0.0, amax};
    p.max_over_y = [A](const Vec& x) { return (A.transpose() * x).maxCoeff(); };
    p.min_over_x = [A](const Vec& y) { return (A * y).minCoeff(); };
    p.matrix = A;
    return p;
}

double classification_margin(const Mat& A, const Vec& x) { return (A.transpose() * x).minCoeff(); }

SaddleProblem build_linear_classification(const Mat& A, double B) {
    if (A.size() == 0) throw DomainError("empty data matrix");
    if (A.colwise().norm().maxCoeff() > B * (1.0 + 1e-12)) throw DomainError("a data column exceeds the norm bound B");
    SaddleProblem p{.name = "linear_classification",
                    .x_map = standard_mirror_map(MirrorKind::ball, A.rows()),
                    .y_map = standard_mirror_map(MirrorKind::simplex, A.cols())};
    p.phi = [A](const Vec& x, const Vec& y) { return -x.dot(A * y); };
    p.grad_x = [A](const Vec&, const Vec& y) { return Vec(-(A * y)); };
    p.grad_y = [A](const Vec& x, const Vec&) { return Vec(A.transpose() * x); };
    p.L_x = B;
    p.L_y = B;
    p.smoothness = SaddleSmoothness{0.0, B, 0.0, B};
    p.max_over_y = [A](const Vec& x) { return -(A.transpose() * x).minCoeff(); };
    p.min_over_x = [A](const Vec& y) { return -(A * y).norm(); };
    p.matrix = A;
    p.matrix_sign = -1.0;
    return p;
}

SaddleProblem build_max_smooth_saddle(std::vector<FirstOrderOracle> fs, const MirrorMap& x_map, double L,
                                      double beta, std::function<double(const Vec&)> min_over_x) {
    if (fs.empty()) throw DomainError("need at least one function");
    for (const auto& f : fs)
        if (f.dim() != x_map.dim()) throw DimensionMismatch("function and X-setup dimensions differ");
    auto shared = std::make_shared<std::vector<FirstOrderOracle>>(std::move(fs));
    const auto m = static_cast<Eigen::Index>(shared->size());
    const auto values = [shared, m](const Vec& x) {
        Vec v(m);
        for (Eigen::Index i = 0; i < m; ++i) v(i) = (*shared)[static_cast<std::size_t>(i)].evaluate(x);
        return v;
    };
    SaddleProblem p{.name = "max_of_smooth", .x_map = x_map, .y_map = standard_mirror_map(MirrorKind::simplex, m)};
    p.phi = [values](const Vec& x, const Vec& y) { return values(x).dot(y); };
    p.grad_x = [shared, m](const Vec& x, const Vec& y) {
        Vec g = Vec::Zero(x.size());
        for (Eigen::Index i = 0; i < m; ++i)
            if (y(i) != 0.0) g += y(i) * (*shared)[static_cast<std::size_t>(i)].evaluate_subgradient(x);
        return g;
    };
    p.grad_y = [values](const Vec& x, const Vec&) { return Vec(-values(x)); };
    p.L_x = L;
    p.smoothness = SaddleSmoothness{beta, L, 0.0, L};
    p.max_over_y = [values](const Vec& x) { return values(x).maxCoeff(); };
    p.min_over_x = std::move(min_over_x);
    return p;
}

}  // namespace convexkit
