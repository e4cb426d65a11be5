#include "convexkit/first_order.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "convexkit/errors.hpp"

namespace convexkit {

// ---------------------------------------------------------------- steps

double StepSchedule::operator()(long s) const {
    double v = 0.0;
    switch (kind) {
        case Kind::constant: v = eta; break;
        case Kind::harmonic: v = 2.0 / (alpha * static_cast<double>(s + 1)); break;
        case Kind::horizon: v = R / (L * std::sqrt(static_cast<double>(horizon))); break;
        case Kind::time_varying: v = R / (L * std::sqrt(static_cast<double>(s))); break;
        case Kind::custom: v = custom(s); break;
    }
    if (!(v > 0)) throw DomainError("step size must be positive");
    return v;
}

StepSchedule StepSchedule::constant_step(double eta) {
    StepSchedule s;
    s.kind = Kind::constant;
    s.eta = eta;
    return s;
}

StepSchedule StepSchedule::harmonic_step(double alpha) {
    StepSchedule s;
    s.kind = Kind::harmonic;
    s.alpha = alpha;
    return s;
}

StepSchedule StepSchedule::horizon_step(double R, double L, long t) {
    StepSchedule s;
    s.kind = Kind::horizon;
    s.R = R;
    s.L = L;
    s.horizon = t;
    return s;
}

StepSchedule StepSchedule::time_varying_step(double R, double L) {
    StepSchedule s;
    s.kind = Kind::time_varying;
    s.R = R;
    s.L = L;
    return s;
}

// ---------------------------------------------------------------- subgradient methods

RunTrace run_pgd_lipschitz(FirstOrderOracle& f, const ConstraintSet& set, double R, double L, long t,
                           const Vec& x1, std::optional<StepSchedule> schedule) {
    if (t < 1) throw DomainError("horizon must be at least 1");
    const StepSchedule eta = schedule ? *schedule : StepSchedule::horizon_step(R, L, t);
    TraceRecorder rec(f, "pgd_lipschitz");
    Vec x = set.project(x1);
    Vec sum = Vec::Zero(x.size());
    Vec avg = x;
    for (long s = 1; s <= t; ++s) {
        const Vec g = f.subgradient(x);
        sum += x;
        avg = sum / static_cast<double>(s);
        rec.record(s, x, avg);
        if (s < t) x = set.project(x - eta(s) * g);
    }
    return rec.finish(x, avg);
}

RunTrace run_gd_smooth(FirstOrderOracle& f, long t, const Vec& x1, const ConstraintSet* set) {
    const double beta = f.require_beta();
    TraceRecorder rec(f, set ? "pgd_smooth" : "gd_smooth");
    Vec x = set ? set->project(x1) : x1;
    for (long s = 1; s <= t; ++s) {
        const Vec g = f.subgradient(x);
        rec.record(s, x, x);
        if (s < t) {
            x = x - g / beta;
            if (set) x = set->project(x);
        }
    }
    return rec.finish(x, x);
}

GradientMapping gradient_mapping(FirstOrderOracle& f, const ConstraintSet& set, const Vec& x, double beta) {
    GradientMapping out;
    out.x_plus = set.project(x - f.subgradient(x) / beta);
    out.g = beta * (x - out.x_plus);
    return out;
}

RunTrace run_pgd_strongly(FirstOrderOracle& f, const ConstraintSet& set, StronglyConvexVariant variant, long t,
                          const Vec& x1) {
    const double alpha = f.require_alpha();
    double beta = 0.0;
    if (variant != StronglyConvexVariant::lipschitz) beta = f.require_beta();
    const char* name = variant == StronglyConvexVariant::lipschitz ? "pgd_strongly_lipschitz"
                       : variant == StronglyConvexVariant::smooth  ? "pgd_strongly_smooth"
                                                                   : "gd_strongly_smooth_unconstrained";
    TraceRecorder rec(f, name);
    Vec x = set.project(x1);
    Vec weighted = Vec::Zero(x.size());
    Vec out = x;
    for (long s = 1; s <= t; ++s) {
        const Vec g = f.subgradient(x);
        double eta;
        if (variant == StronglyConvexVariant::lipschitz) {
            const double sd = static_cast<double>(s);
            weighted += sd * x;
            out = (2.0 / (sd * (sd + 1.0))) * weighted;
            rec.record(s, x, out);
            eta = 2.0 / (alpha * (sd + 1.0));
        } else {
            out = x;
            rec.record(s, x, x);
            eta = variant == StronglyConvexVariant::smooth ? 1.0 / beta : 2.0 / (alpha + beta);
        }
        if (s < t) x = set.project(x - eta * g);
    }
    return rec.finish(x, out);
}

RunTrace run_frank_wolfe(FirstOrderOracle& f, const ConstraintSet& set, long t, const Vec& x1) {
    TraceRecorder rec(f, "frank_wolfe");
    Vec x = x1;
    std::set<std::vector<double>> vertices;
    for (long s = 1; s <= t; ++s) {
        const Vec g = f.subgradient(x);
        rec.record(s, x, x);
        rec.add_series("vertex_count", s == 1 ? 1.0 : static_cast<double>(vertices.size()));
        if (s < t) {
            const Vec y = set.lmo(g);
            vertices.insert(std::vector<double>(y.data(), y.data() + y.size()));
            const double gamma = 2.0 / static_cast<double>(s + 1);
            x = (1.0 - gamma) * x + gamma * y;
        }
    }
    return rec.finish(x, x);
}

// ---------------------------------------------------------------- conjugate gradient

LinearCgResult run_linear_cg(const MatVec& A, const Vec& b, long t, double tol, Vec x0, bool keep_directions) {
    const Eigen::Index n = b.size();
    if (x0.size() == 0) x0 = Vec::Zero(n);
    if (x0.size() != n) throw DimensionMismatch("linear_cg: start point and b disagree");
    LinearCgResult out;
    out.trace.algorithm = "linear_cg";
    Vec x = x0;
    long matvecs = 0;
    Vec r = A(x) - b;  // gradient of 1/2 x^T A x - b^T x
    ++matvecs;
    const double bnorm = b.norm();
    auto add_row = [&](long iter) {
        TraceRow row;
        row.iter = iter;
        row.f_value = 0.5 * x.dot(r) - 0.5 * b.dot(x);
        row.grad_norm = r.norm();
        row.oracle_first = matvecs;
        out.trace.rows.push_back(row);
        out.trace.series["residual"].push_back(r.norm());
    };
    add_row(0);
    Vec p = r;
    double rr = r.squaredNorm();
    long it = 0;
    if (keep_directions) out.directions.resize(n, 0);
    while (it < t && std::sqrt(rr) > tol * bnorm) {
        const Vec Ap = A(p);
        ++matvecs;
        const double pAp = p.dot(Ap);
        if (!(pAp > 0.0) || !std::isfinite(pAp))
            throw BreakdownZeroDirection("p^T A p vanished before convergence");
        if (keep_directions) {
            out.directions.conservativeResize(Eigen::NoChange, out.directions.cols() + 1);
            out.directions.col(out.directions.cols() - 1) = p;
        }
        const double step = r.dot(p) / pAp;
        x -= step * p;
        r -= step * Ap;
        ++it;
        add_row(it);
        const double rr_next = r.squaredNorm();
        p = r + (rr_next / rr) * p;
        rr = rr_next;
    }
    out.x = x;
    out.iterations = it;
    out.trace.x_last = x;
    out.trace.x_out = x;
    return out;
}

LinearCgResult run_linear_cg(const Mat& A, const Vec& b, long t, double tol, Vec x0, bool keep_directions) {
    if (A.rows() != A.cols() || A.rows() != b.size()) throw DimensionMismatch("linear_cg: A and b disagree");
    return run_linear_cg([&A](const Vec& v) { return Vec(A * v); }, b, t, tol, std::move(x0), keep_directions);
}

double line_search(const std::function<double(double)>& phi, double initial_step,
                   const std::function<double(double)>& dphi) {
    double h = initial_step > 0 && std::isfinite(initial_step) ? initial_step : 1.0;
    const double f0 = phi(0.0);
    double best_l = 0.0, best_f = f0;
    auto eval = [&](double l) {
        const double v = phi(l);
        if (v < best_f) {
            best_f = v;
            best_l = l;
        }
        return v;
    };
    double a, b, c, fb;
    const double fp = eval(h);
    const double fm = eval(-h);
    if (f0 <= fp && f0 <= fm) {
        a = -h;
        b = 0.0;
        c = h;
        fb = f0;
    } else {
        const double dir = fp < fm ? 1.0 : -1.0;
        a = 0.0;
        b = dir * h;
        fb = std::min(fp, fm);
        double step = 2.0 * h;
        bool bracketed = false;
        for (int k = 0; k < 200; ++k) {
            c = b + dir * step;
            const double fc = eval(c);
            if (!std::isfinite(fc) || fc >= fb) {
                bracketed = true;
                break;
            }
            a = b;
            b = c;
            fb = fc;
            step *= 2.0;
        }
        if (!bracketed) throw LineSearchFailure("no bracket found: function decreases without bound along the line");
        if (a > c) std::swap(a, c);
    }
    if (dphi) {
        double lo = a, hi = c;
        for (int k = 0; k < 500 && hi - lo > 1e-10 * (1.0 + std::abs(0.5 * (lo + hi))); ++k) {
            const double mid = 0.5 * (lo + hi);
            const double d = dphi(mid);
            if (d == 0.0) return mid;
            (d > 0 ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    }
    // golden section on [a, c]
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = a, hi = c;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = eval(x1), f2 = eval(x2);
    for (int k = 0; k < 500; ++k) {
        if (hi - lo <= 1e-10 * (1.0 + std::abs(best_l))) break;
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = eval(x2);
        }
    }
    (void)fb;
    return best_l;
}

RunTrace run_nonlinear_cg(FirstOrderOracle& f, NonlinearCgVariant variant, long t, const Vec& x0) {
    TraceRecorder rec(f, variant == NonlinearCgVariant::fletcher_reeves ? "nonlinear_cg_fr" : "nonlinear_cg_pr");
    Vec x = x0;
    Vec g = f.subgradient(x);
    rec.record(0, x, x);
    const double g0 = g.norm();
    Vec p = g;
    for (long s = 1; s <= t; ++s) {
        if (g.norm() <= 1e-14 * std::max(1.0, g0) || g.norm() == 0.0) break;
        const Vec xs = x, ps = p;
        const double lam = line_search([&](double l) { return f.value(xs + l * ps); }, 1.0 / p.norm());
        x = xs + lam * ps;
        const Vec g_next = f.subgradient(x);
        const double denom = g.squaredNorm();
        const double coef = variant == NonlinearCgVariant::fletcher_reeves ? g_next.squaredNorm() / denom
                                                                            : (g_next - g).dot(g_next) / denom;
        p = g_next + coef * p;
        g = g_next;
        rec.record(s, x, x);
    }
    return rec.finish(x, x);
}

// ---------------------------------------------------------------- geometric descent

EnclosingBall enclose_ball_intersection(const Vec& c1, double r1sq, const Vec& c2, double r2sq) {
    if (r1sq < 0 || r2sq < 0) throw EmptyIntersection("a squared radius is negative");
    const double r1 = std::sqrt(r1sq), r2 = std::sqrt(r2sq);
    const Vec diff = c2 - c1;
    const double d = diff.norm();
    if (d > r1 + r2) throw EmptyIntersection("the balls are disjoint");
    EnclosingBall out;
    if (d <= std::abs(r1 - r2)) {
        // one ball contains the other
        if (r1 <= r2) {
            out.center = c1;
            out.radius_sq = r1sq;
        } else {
            out.center = c2;
            out.radius_sq = r2sq;
        }
        return out;
    }
    const double s = (d * d + r1sq - r2sq) / (2.0 * d);
    if (s <= 0) {
        out.center = c1;
        out.radius_sq = r1sq;
    } else if (s >= d) {
        out.center = c2;
        out.radius_sq = r2sq;
    } else {
        out.center = c1 + (s / d) * diff;
        out.radius_sq = std::max(0.0, r1sq - s * s);
    }
    return out;
}

EnclosingBall minimal_enclosing_two_balls(const Vec& a, double g, double eps, double delta) {
    return enclose_ball_intersection(Vec::Zero(a.size()), 1.0 - eps * g * g - delta, a, g * g * (1.0 - eps) - delta);
}

GeometricDescentResult run_geometric_descent(FirstOrderOracle& f, long t, const Vec& x0) {
    const double alpha = f.require_alpha();
    const double beta = f.require_beta();
    const double kappa = beta / alpha;
    GeometricDescentResult out;
    TraceRecorder rec(f, "geometric_descent");

    Vec x = x0;
    Vec grad = f.subgradient(x);
    Vec c = x - grad / alpha;
    double R2 = (1.0 - 1.0 / kappa) * grad.squaredNorm() / (alpha * alpha);
    rec.record(0, x, x);
    auto push_ball = [&]() {
        out.centers.push_back(c);
        out.radius_sq.push_back(R2);
        rec.add_series("radius_sq", R2);
        rec.add_series("center_dist_sq", f.x_star ? (*f.x_star - c).squaredNorm() : kNaN);
    };
    push_ball();
    rec.add_series("orthogonality", 0.0);
    rec.add_series("branch", 0.0);

    for (long s = 1; s <= t; ++s) {
        if (grad.norm() == 0.0) break;
        const Vec x_plus = x - grad / beta;
        const Vec dir = x_plus - c;
        Vec x_next;
        if (dir.norm() == 0.0) {
            x_next = c;
        } else {
            const Vec cc = c;
            const double lam = line_search([&](double l) { return f.value(cc + l * dir); }, 1.0,
                                           [&](double l) { return f.subgradient(cc + l * dir).dot(dir); });
            x_next = c + lam * dir;
        }
        const Vec g_next = f.subgradient(x_next);
        const double gsq = g_next.squaredNorm() / (alpha * alpha);
        const Vec x_pp = x_next - g_next / alpha;
        const Vec to_x = x_next - c;
        const double ortho = (g_next.norm() > 0 && to_x.norm() > 0)
                                 ? std::abs(g_next.dot(to_x)) / (g_next.norm() * to_x.norm())
                                 : 0.0;
        double branch;
        if (gsq < R2 / 2.0) {
            c = x_pp;
            R2 = gsq * (1.0 - 1.0 / kappa);
            branch = 1.0;
        } else {
            const Vec a = x_pp - c;
            const double num = R2 + to_x.squaredNorm();
            const double R2_next = R2 - gsq / kappa - std::pow(num / (2.0 * a.norm()), 2);
            // cancellation at machine precision: the enclosure carries no more information
            if (R2_next <= 0.0) break;
            c = c + (num / (2.0 * a.squaredNorm())) * a;
            R2 = R2_next;
            branch = 2.0;
        }
        x = x_next;
        grad = g_next;
        rec.record(s, x, x);
        push_ball();
        rec.add_series("orthogonality", ortho);
        rec.add_series("branch", branch);
    }
    out.trace = rec.finish(x, x);
    return out;
}

// ---------------------------------------------------------------- AGD

double agd_lambda(long s) {
    double lam = 0.0;
    for (long k = 1; k <= s; ++k) lam = (1.0 + std::sqrt(1.0 + 4.0 * lam * lam)) / 2.0;
    return lam;
}

RunTrace run_agd(FirstOrderOracle& f, AgdVariant variant, long t, const Vec& x1) {
    const double beta = f.require_beta();
    double q = 0.0;
    if (variant == AgdVariant::strongly_convex) {
        const double kappa = beta / f.require_alpha();
        q = (std::sqrt(kappa) - 1.0) / (std::sqrt(kappa) + 1.0);
    }
    TraceRecorder rec(f, variant == AgdVariant::strongly_convex ? "agd_strongly_convex" : "agd_smooth");
    Vec x = x1, y = x1;
    double lam = 1.0;                                       // lambda_s
    double lam_next = (1.0 + std::sqrt(5.0)) / 2.0;         // lambda_{s+1}
    for (long s = 1; s <= t; ++s) {
        rec.record(s, y, y);
        if (s == t) break;
        const Vec g = f.subgradient(x);
        const Vec y_next = x - g / beta;
        if (variant == AgdVariant::strongly_convex) {
            x = (1.0 + q) * y_next - q * y;
        } else {
            const double gamma = (1.0 - lam) / lam_next;
            x = (1.0 - gamma) * y_next + gamma * y;
            lam = lam_next;
            lam_next = (1.0 + std::sqrt(1.0 + 4.0 * lam * lam)) / 2.0;
        }
        y = y_next;
    }
    return rec.finish(y, y);
}

}  // namespace convexkit
