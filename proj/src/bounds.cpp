#include <algorithm>
#include <cmath>
#include <limits>

#include "convexkit/errors.hpp"
#include "convexkit/harness.hpp"

namespace convexkit {

namespace bounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BoundSpec make(std::string id, std::string rate, std::function<double(long)> curve, std::string quantity = "gap",
               long t_min = 1) {
    BoundSpec b;
    b.id = std::move(id);
    b.rate = std::move(rate);
    b.curve = std::move(curve);
    b.quantity = std::move(quantity);
    b.t_min = t_min;
    return b;
}

BoundSpec at_horizon(BoundSpec b, long t) {
    b.t_min = t;
    b.t_max = t;
    return b;
}

void require_positive(double v, const std::string& what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(what + " must be positive and finite");
}

}  // namespace

BoundSpec pgd_lipschitz(double R, double L, long t) {
    require_positive(R, "R");
    require_positive(L, "L");
    const double v = R * L / std::sqrt(static_cast<double>(t));
    return at_horizon(make("pgd_lipschitz", "R L / sqrt(t)", [v](long) { return v; }, "avg_gap"), t);
}

BoundSpec gd_smooth(double beta, double dist_sq) {
    return make(
        "gd_smooth", "2 beta R^2 / (t - 1)",
        [=](long t) { return t >= 2 ? 2.0 * beta * dist_sq / (static_cast<double>(t) - 1.0) : kInf; }, "gap", 2);
}

BoundSpec pgd_smooth(double beta, double dist_sq, double gap1) {
    return make("pgd_smooth", "(3 beta R^2 + f(x_1) - f*) / t",
                [=](long t) { return (3.0 * beta * dist_sq + gap1) / static_cast<double>(t); });
}

BoundSpec frank_wolfe(double beta, double R) {
    return make(
        "frank_wolfe", "2 beta R^2 / (t + 1)", [=](long t) { return 2.0 * beta * R * R / (static_cast<double>(t) + 1.0); },
        "gap", 2);
}

BoundSpec pgd_strongly_lipschitz(double L, double alpha) {
    require_positive(alpha, "alpha");
    return make("pgd_strongly_lipschitz", "2 L^2 / (alpha (t + 1))",
                [=](long t) { return 2.0 * L * L / (alpha * (static_cast<double>(t) + 1.0)); }, "avg_gap");
}

BoundSpec pgd_strongly_smooth(double kappa, double dist_sq) {
    BoundSpec b = make("pgd_strongly_smooth", "||x_t - x*||^2 <= exp(-(t - 1) / kappa) R^2",
                       [=](long t) { return std::exp(-(static_cast<double>(t) - 1.0) / kappa) * dist_sq; },
                       "dist_sq");
    b.linear = true;
    return b;
}

BoundSpec gd_strongly_unconstrained(double beta, double kappa, double dist_sq) {
    BoundSpec b = make(
        "gd_strongly_unconstrained", "beta / 2 exp(-4 (t - 1) / (kappa + 1)) R^2",
        [=](long t) { return 0.5 * beta * std::exp(-4.0 * (static_cast<double>(t) - 1.0) / (kappa + 1.0)) * dist_sq; });
    b.linear = true;
    return b;
}

BoundSpec agd_smooth(double beta, double dist_sq) {
    return make("agd_smooth", "2 beta R^2 / t^2", [=](long t) {
        const double s = static_cast<double>(t);
        return 2.0 * beta * dist_sq / (s * s);
    });
}

BoundSpec agd_strongly(double alpha, double beta, double dist_sq) {
    require_positive(alpha, "alpha");
    const double kappa = beta / alpha;
    BoundSpec b = make("agd_strongly", "(alpha + beta) / 2 R^2 exp(-(t - 1) / sqrt(kappa))", [=](long t) {
        return 0.5 * (alpha + beta) * dist_sq * std::exp(-(static_cast<double>(t) - 1.0) / std::sqrt(kappa));
    });
    b.linear = true;
    return b;
}

BoundSpec ellipsoid(double B, double R, double r, Eigen::Index n) {
    require_positive(r, "r");
    const double nn = static_cast<double>(n);
    // the guarantee starts once t >= 2 n^2 log(R/r)
    const long t_min = std::max<long>(1, static_cast<long>(std::ceil(2.0 * nn * nn * std::log(R / r))));
    BoundSpec b = make(
        "ellipsoid", "2 B R / r exp(-t / (2 n^2))",
        [=](long t) { return 2.0 * B * R / r * std::exp(-static_cast<double>(t) / (2.0 * nn * nn)); }, "gap", t_min);
    b.linear = true;
    return b;
}

BoundSpec mirror_descent(const MirrorMap& map, double L, long t) {
    const double v = mirror_descent_bound(map, L, t);
    return at_horizon(make("mirror_descent", "R L sqrt(2 / (rho t))", [v](long) { return v; }, "avg_gap"), t);
}

BoundSpec dual_averaging(const MirrorMap& map, double L, long t) {
    const double v = dual_averaging_bound(map, L, t);
    return at_horizon(make("dual_averaging", "2 R L sqrt(2 / (rho t))", [v](long) { return v; }, "avg_gap"), t);
}

BoundSpec mirror_prox(const MirrorMap& map, double beta) {
    const double c = mirror_prox_bound(map, beta, 1);
    return make("mirror_prox", "beta R^2 / (rho t)", [c](long t) { return c / static_cast<double>(t); }, "avg_gap");
}

BoundSpec ista(double beta, double dist_sq) {
    return make("ista", "beta R^2 / (2 t)", [=](long t) { return ista_bound(beta, dist_sq, t); });
}

BoundSpec fista(double beta, double dist_sq) {
    return make("fista", "2 beta R^2 / t^2", [=](long t) { return fista_bound(beta, dist_sq, t); });
}

BoundSpec sp_md(const SaddleProblem& p, long t) {
    const double v = sp_md_bound(p, t);
    return at_horizon(make("sp_md", "(R_X L_X + R_Y L_Y) sqrt(2 / t)", [v](long) { return v; }, "avg_gap"), t);
}

BoundSpec sp_mp(const SaddleProblem& p) {
    const double M = sp_mp_constant(p);
    return make("sp_mp", "4 M / t", [M](long t) { return 4.0 * M / static_cast<double>(t); }, "avg_gap");
}

BoundSpec ipm_certificate(double nu, std::vector<double> t_values) {
    BoundSpec b = make(
        "ipm_certificate", "2 nu / t_k",
        [nu, ts = std::move(t_values)](long k) {
            if (k < 0 || static_cast<std::size_t>(k) >= ts.size()) return kInf;
            return 2.0 * nu / ts[static_cast<std::size_t>(k)];
        },
        "gap", 0);
    b.linear = true;
    return b;
}

BoundSpec smd(const MirrorMap& map, double B, long t) {
    const double v = smd_bound(map, B, t);
    BoundSpec b = at_horizon(make("smd", "R B sqrt(2 / t)", [v](long) { return v; }, "avg_gap"), t);
    b.expectation = true;
    return b;
}

BoundSpec sgd_strongly(double B, double alpha) {
    require_positive(alpha, "alpha");
    BoundSpec b = make("sgd_strongly", "2 B^2 / (alpha (t + 1))",
                       [=](long t) { return sgd_strongly_bound(B, alpha, t); }, "avg_gap");
    b.expectation = true;
    return b;
}

BoundSpec smd_smooth(const MirrorMap& map, double sigma, double beta, long t) {
    const double v = smd_smooth_bound(map, sigma, beta, t);
    BoundSpec b =
        at_horizon(make("smd_smooth", "R sigma sqrt(2 / t) + beta R^2 / t", [v](long) { return v; }, "avg_gap"), t);
    b.expectation = true;
    return b;
}

BoundSpec minibatch(const MirrorMap& map, double B, double beta, long batch, long t) {
    const double v = minibatch_bound(map, B, beta, batch, t);
    BoundSpec b = at_horizon(
        make("minibatch", "2 R B / sqrt(t) + m beta R^2 / t", [v](long) { return v; }, "avg_gap"), t / batch);
    b.expectation = true;
    return b;
}

BoundSpec svrg(double gap1) {
    BoundSpec b = make("svrg", "0.9^s (f(y_1) - f*)",
                       [=](long s) { return std::pow(0.9, static_cast<double>(s) - 1.0) * gap1; });
    b.expectation = true;
    b.linear = true;
    return b;
}

BoundSpec rcd(double R_sq, double beta_power_sum) {
    BoundSpec b = make(
        "rcd", "2 R^2 sum beta_i^gamma / (t - 1)",
        [=](long t) { return t >= 2 ? rcd_bound(R_sq, beta_power_sum, t) : kInf; }, "gap", 2);
    b.expectation = true;
    return b;
}

BoundSpec rcd_strongly(double kappa_gamma, double gap1) {
    BoundSpec b = make("rcd_strongly", "(1 - 1 / kappa_gamma)^t (f(x_1) - f*)",
                       [=](long t) { return rcd_strongly_bound(kappa_gamma, gap1, t - 1); });
    b.expectation = true;
    b.linear = true;
    return b;
}

BoundSpec s_sp_md(const SaddleProblem& p, double B_x, double B_y, long t) {
    const double v = s_sp_md_bound(p, B_x, B_y, t);
    BoundSpec b =
        at_horizon(make("s_sp_md", "(R_X B_X + R_Y B_Y) sqrt(2 / t)", [v](long) { return v; }, "avg_gap"), t);
    b.expectation = true;
    return b;
}

}  // namespace bounds

double row_quantity(const TraceRow& row, const std::string& quantity) {
    if (quantity == "gap") return row.gap;
    if (quantity == "avg_gap") return row.avg_gap;
    if (quantity == "dist_sq") return row.dist_to_opt * row.dist_to_opt;
    if (quantity == "f_value") return row.f_value;
    throw ConfigError("unknown bound quantity '" + quantity + "'");
}

BoundVerdict check_bound(RunTrace& trace, const BoundSpec& bound) {
    BoundVerdict v;
    bool any_value = false;
    for (TraceRow& row : trace.rows) {
        if (!bound.covers(row.iter)) {
            row.bound_value = std::numeric_limits<double>::infinity();
            row.bound_satisfied = 1;
            continue;
        }
        const double limit = bound(row.iter);
        row.bound_value = limit;
        const double q = row_quantity(row, bound.quantity);
        if (std::isnan(q)) {
            row.bound_satisfied = -1;
            continue;
        }
        any_value = true;
        ++v.checked;
        const bool ok = q <= bound.slack * limit;
        row.bound_satisfied = ok ? 1 : 0;
        if (bound.slack * limit > 0.0) v.worst_ratio = std::max(v.worst_ratio, q / (bound.slack * limit));
        else if (q > 0.0) v.worst_ratio = std::numeric_limits<double>::infinity();
        if (!ok && v.passed) {
            v.passed = false;
            v.first_violation = row.iter;
        }
    }
    if (!any_value)
        throw MissingOptimum("no row in the range of '" + bound.id + "' has a value for " + bound.quantity +
                             " (unknown optimum?)");
    return v;
}

RunTrace ensemble_mean(const std::vector<RunTrace>& runs) {
    if (runs.empty()) throw DomainError("empty ensemble");
    RunTrace mean;
    mean.algorithm = runs.front().algorithm;
    mean.rows = runs.front().rows;
    const double k = static_cast<double>(runs.size());
    for (std::size_t i = 0; i < mean.rows.size(); ++i) {
        TraceRow& m = mean.rows[i];
        double f = 0, g = 0, a = 0, d = 0, gn = 0;
        for (const RunTrace& r : runs) {
            if (r.rows.size() != mean.rows.size()) throw DimensionMismatch("replicates differ in length");
            const TraceRow& row = r.rows[i];
            f += row.f_value;
            g += row.gap;
            a += row.avg_gap;
            d += row.dist_to_opt;
            gn += row.grad_norm;
        }
        m.f_value = f / k;
        m.gap = g / k;
        m.avg_gap = a / k;
        m.dist_to_opt = d / k;
        m.grad_norm = gn / k;
        m.bound_value = kNaN;
        m.bound_satisfied = -1;
    }
    double wall = 0.0;
    for (const RunTrace& r : runs) wall += r.wall_seconds;
    mean.wall_seconds = wall;
    return mean;
}

EnsembleCheck check_bound(const std::vector<RunTrace>& runs, const BoundSpec& bound) {
    EnsembleCheck out{ensemble_mean(runs), {}};
    out.verdict = check_bound(out.mean, bound);
    return out;
}

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& gap, bool linear) {
    if (t.size() != gap.size()) throw DimensionMismatch("fit_rate: t and gap differ in length");
    if (t.size() < 10) throw DomainError("fit_rate needs at least 10 points");
    const std::size_t n = t.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(gap[i] > 0.0)) throw NonPositiveGap("gap " + format_double(gap[i]) + " at t = " + format_double(t[i]));
        if (!linear && !(t[i] > 0.0)) throw DomainError("fit_rate needs t > 0");
        x[i] = linear ? t[i] : std::log(t[i]);
        y[i] = std::log(gap[i]);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("fit_rate needs distinct t values");
    RateFit fit;
    fit.slope = sxy / sxx;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - my - fit.slope * (x[i] - mx);
        rss += e * e;
    }
    const double se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    fit.ci_low = fit.slope - 1.96 * se;
    fit.ci_high = fit.slope + 1.96 * se;
    fit.linear = linear;
    fit.contraction = linear ? std::exp(fit.slope) : 0.0;
    fit.points = n;
    return fit;
}

RateFit fit_rate(const RunTrace& trace, const std::string& column, std::size_t window, bool linear) {
    const std::vector<double> values = trace.column(column);
    if (window > values.size()) throw DomainError("fit window exceeds the trace length");
    std::vector<double> t, g;
    for (std::size_t i = values.size() - window; i < values.size(); ++i) {
        t.push_back(static_cast<double>(trace.rows[i].iter));
        g.push_back(values[i]);
    }
    return fit_rate(t, g, linear);
}

}  // namespace convexkit
