#include "convexkit/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>

#include "convexkit/cutting_plane.hpp"
#include "convexkit/errors.hpp"
#include "convexkit/first_order.hpp"
#include "convexkit/parallel.hpp"
#include "convexkit/problems.hpp"
#include "convexkit/sampling.hpp"

namespace convexkit {

namespace {

// Typed access to a JSON parameter object that rejects unknown keys.
class Params {
public:
    Params(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const Json& raw(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) throw ConfigError(where_ + " lacks \"" + key + "\"");
        return j_.at(key);
    }

    double num(const std::string& key, double def) {
        used_.insert(key);
        if (!j_.contains(key)) return def;
        if (!j_.at(key).is_number()) throw ConfigError(where_ + "." + key + " must be a number");
        return j_.at(key).get<double>();
    }

    long integer(const std::string& key, long def) {
        used_.insert(key);
        if (!j_.contains(key)) return def;
        if (!j_.at(key).is_number_integer()) throw ConfigError(where_ + "." + key + " must be an integer");
        return j_.at(key).get<long>();
    }

    std::string str(const std::string& key, const std::string& def) {
        used_.insert(key);
        if (!j_.contains(key)) return def;
        if (!j_.at(key).is_string()) throw ConfigError(where_ + "." + key + " must be a string");
        return j_.at(key).get<std::string>();
    }

    // Throws for keys that were never asked for.
    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!used_.count(key)) throw ConfigError("unknown key \"" + key + "\" in " + where_);
    }

private:
    const Json& j_;
    std::string where_;
    std::set<std::string> used_;
};

long positive(long v, const std::string& what) {
    if (v <= 0) throw ConfigError(what + " must be positive");
    return v;
}

double positive(double v, const std::string& what) {
    if (!(v > 0.0)) throw ConfigError(what + " must be positive");
    return v;
}

FirstOrderOracle distance_oracle(const Vec& a) {
    Regularity reg;
    reg.L = 1.0;
    FirstOrderOracle f(
        a.size(), [a](const Vec& x) { return (x - a).norm(); },
        [a](const Vec& x) {
            const Vec d = x - a;
            const double n = d.norm();
            return n > 0.0 ? Vec(d / n) : Vec(Vec::Zero(d.size()));
        },
        reg);
    f.f_star = 0.0;
    f.x_star = a;
    f.name = "distance";
    return f;
}

void quadratic_kind(ProblemInstance& p, Params& prm, Rng& rng) {
    const long n = positive(prm.integer("dim", 10), "dim");
    const double alpha = prm.num("alpha", 0.01), beta = positive(prm.num("beta", 1.0), "beta");
    if (alpha < 0.0 || alpha > beta) throw ConfigError("need 0 <= alpha <= beta");
    const std::string set = prm.str("set", "unconstrained");
    const double radius = positive(prm.num("radius", 1.0), "radius");
    const double opt_norm = prm.num("opt_norm", 0.5 * radius);
    const double start_norm = prm.num("start_norm", set == "ball" ? radius : 1.0);
    const Mat A = random_spd(n, alpha, beta, rng);
    const Vec x0 = opt_norm * rng.unit_vector(n);
    FirstOrderOracle f = quadratic_problem(A, A * x0);
    f.regularity.alpha = alpha;
    f.x_star = x0;
    f.f_star = f.evaluate(x0);
    p.x1 = start_norm * rng.unit_vector(n);
    if (set == "ball") {
        if (opt_norm >= radius || start_norm > radius) throw ConfigError("optimum and start must lie in the ball");
        p.set = std::make_shared<Ball>(n, radius);
        p.map = standard_mirror_map(MirrorKind::ball, n, p.set);
        p.meta["L"] = beta * (radius + opt_norm);
        p.meta["diameter"] = 2.0 * radius;
        f.regularity.L = p.meta["L"];
    } else if (set == "unconstrained") {
        p.set = std::make_shared<Unconstrained>(n);
    } else {
        throw ConfigError("quadratic set must be \"ball\" or \"unconstrained\"");
    }
    p.meta["beta"] = beta;
    p.meta["alpha"] = alpha;
    if (alpha > 0.0) p.meta["kappa"] = beta / alpha;
    // same arithmetic as the trace's dist_to_opt^2, so row 1 meets its bound exactly
    const double dist1 = (p.x1 - x0).norm();
    p.meta["dist_sq"] = dist1 * dist1;
    p.meta["gap1"] = f.evaluate(p.x1) - *f.f_star;
    p.f = std::move(f);
}

void distance_kind(ProblemInstance& p, Params& prm, Rng& rng) {
    const long n = positive(prm.integer("dim", 10), "dim");
    const double radius = positive(prm.num("radius", 1.0), "radius");
    const double a_norm = prm.num("opt_norm", 0.5 * radius);
    if (a_norm >= radius) throw ConfigError("the minimizer must lie inside the ball");
    const Vec a = a_norm * rng.unit_vector(n);
    p.f = distance_oracle(a);
    p.set = std::make_shared<Ball>(n, radius);
    p.map = standard_mirror_map(MirrorKind::ball, n, p.set);
    p.x1 = Vec::Zero(n);
    p.meta["L"] = 1.0;
    p.meta["R"] = a_norm;  // ||x_1 - x*||
    p.meta["B"] = radius + a_norm;  // sup f - inf f over the ball
    p.meta["radius"] = radius;
}

void simplex_distance_kind(ProblemInstance& p, Params& prm, Rng& rng) {
    const long n = positive(prm.integer("dim", 10), "dim");
    const double scale = prm.num("scale", 1.0);
    const Vec c = scale * rng.normal_vector(n);
    const auto simplex = std::make_shared<Simplex>(n);
    Regularity reg;
    reg.beta = 1.0;
    FirstOrderOracle f(
        n, [c](const Vec& x) { return 0.5 * (x - c).squaredNorm(); }, [c](const Vec& x) { return Vec(x - c); }, reg);
    f.x_star = simplex->project(c);
    f.f_star = f.evaluate(*f.x_star);
    f.name = "simplex_distance";
    p.set = simplex;
    p.map = standard_mirror_map(MirrorKind::simplex, n);
    p.x1 = p.map->initial_point();
    // on the simplex |x_i - c_i| <= max(|c_i|, |1 - c_i|), a bound on ||grad||_inf
    double L_inf = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) L_inf = std::max({L_inf, std::abs(c(i)), std::abs(1.0 - c(i))});
    p.meta["L_map"] = L_inf;
    p.meta["beta_map"] = 1.0;  // ||x - y||_inf <= ||x - y||_1
    p.meta["beta"] = 1.0;
    p.meta["diameter"] = std::sqrt(2.0);
    p.f = std::move(f);
}

void lasso_kind(ProblemInstance& p, Params& prm, Rng& rng) {
    const long m = positive(prm.integer("samples", 30), "samples");
    const long n = positive(prm.integer("dim", 10), "dim");
    if (m < n) throw ConfigError("lasso needs samples >= dim");
    const double lambda = prm.num("lambda", 1e-4);
    // singular values logspace(0, -decades): ill-conditioned, so the sublinear rates are visible
    const double decades = prm.num("decades", 5.0);
    const double noise = prm.num("noise", 0.0);
    const long ref_iters = positive(prm.integer("reference_iterations", 200000), "reference_iterations");
    Vec s(n);
    for (Eigen::Index i = 0; i < n; ++i)
        s(i) = std::pow(10.0, -decades * static_cast<double>(i) / static_cast<double>(std::max<long>(1, n - 1)));
    const Mat U = random_orthogonal(m, rng).leftCols(n);
    const Mat V = random_orthogonal(n, rng);
    const Mat W = U * s.asDiagonal() * V.transpose();
    // target W x0 with x0 of equal weight along every right singular vector:
    // gradient methods then see every curvature scale, the hard case for their rates
    Vec signs(n);
    for (Eigen::Index i = 0; i < n; ++i) signs(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const Vec x0 = V * signs / std::sqrt(static_cast<double>(n));
    const Vec y = W * x0 + noise * rng.normal_vector(m);
    CompositeProblem prob = lasso_problem(W, y, lambda);
    // reference optimum: last point of a long FISTA run on a copy
    CompositeProblem ref = lasso_problem(W, y, lambda);
    const RunTrace long_run = run_fista(ref, ref_iters, Vec::Zero(n));
    prob.x_star = long_run.x_last;
    prob.total_star = prob.total_value(long_run.x_last);
    p.x1 = Vec::Zero(n);
    p.meta["beta"] = *prob.smooth.regularity.beta;
    const double dist1 = (p.x1 - *prob.x_star).norm();
    p.meta["dist_sq"] = dist1 * dist1;
    p.composite = std::move(prob);
}

void matrix_game_kind(ProblemInstance& p, Params& prm, Rng& rng) {
    Mat A;
    if (prm.has("matrix")) {
        A = matrix_from_json(prm.raw("matrix"));
    } else if (prm.has("csv")) {
        A = read_matrix_csv(prm.str("csv", ""));
    } else {
        const long rows = positive(prm.integer("rows", 10), "rows");
        const long cols = positive(prm.integer("cols", 10), "cols");
        const double scale = positive(prm.num("scale", 1.0), "scale");
        A = Mat::NullaryExpr(rows, cols, [&] { return rng.uniform(-scale, scale); });
    }
    p.saddle = build_matrix_game(A);
    p.meta["A_max"] = A.cwiseAbs().maxCoeff();
}

void lp_kind(ProblemInstance& p, Params& prm, Rng& rng) {
    LinearProgram lp;
    if (prm.has("file")) {
        lp = lp_from_json(read_json_file(prm.str("file", "")));
    } else if (prm.has("A")) {
        Json doc = {{"A", prm.raw("A")}, {"b", prm.raw("b")}, {"c", prm.raw("c")}};
        if (prm.has("A_eq")) {
            doc["A_eq"] = prm.raw("A_eq");
            doc["b_eq"] = prm.raw("b_eq");
        }
        lp = lp_from_json(doc);
    } else {
        // the box [-1, 1]^n plus random cuts a^T x >= -U(0.2, 1); the origin is interior
        const long n = positive(prm.integer("dim", 5), "dim");
        const long m = prm.integer("constraints", 3 * n);
        if (m < 2 * n) throw ConfigError("constraints must be at least 2 dim");
        lp.A = Mat::Zero(m, n);
        lp.b = Vec(m);
        for (Eigen::Index i = 0; i < n; ++i) {
            lp.A(2 * i, i) = 1.0;
            lp.A(2 * i + 1, i) = -1.0;
            lp.b(2 * i) = lp.b(2 * i + 1) = -1.0;
        }
        for (Eigen::Index r = 2 * n; r < m; ++r) {
            lp.A.row(r) = rng.unit_vector(n).transpose();
            lp.b(r) = -rng.uniform(0.2, 1.0);
        }
        lp.c = rng.normal_vector(n);
    }
    if (prm.has("optimum")) {
        p.meta["optimum"] = prm.num("optimum", 0.0);
    } else if (lp.A_eq.size() == 0 && lp.A.cols() <= 8) {
        p.meta["optimum"] = lp_vertex_optimum(lp.A, lp.b, lp.c);
    }
    p.lp = std::move(lp);
}

void svm_kind(ProblemInstance& p, Params& prm, Rng& rng) {
    const long m = positive(prm.integer("samples", 40), "samples");
    const long n = positive(prm.integer("dim", 5), "dim");
    const double alpha = positive(prm.num("alpha", 0.1), "alpha");
    const double noise = prm.num("label_noise", 0.3);
    Mat W = Mat::NullaryExpr(m, n, [&] { return rng.normal(); });
    W.rowwise().normalize();
    const Vec w0 = rng.unit_vector(n);
    Vec labels(m);
    for (Eigen::Index i = 0; i < m; ++i) labels(i) = W.row(i).dot(w0) + noise * rng.normal() >= 0.0 ? 1.0 : -1.0;
    const SvmReference ref = svm_reference(W, labels, alpha);
    const auto component = [W, labels, alpha](Eigen::Index i, const Vec& x) {
        Vec g = alpha * x;
        if (labels(i) * W.row(i).dot(x) < 1.0) g -= labels(i) * W.row(i).transpose();
        return g;
    };
    Regularity reg;
    reg.alpha = alpha;
    FirstOrderOracle f(
        n,
        [W, labels, alpha](const Vec& x) {
            return (1.0 - (labels.array() * (W * x).array())).max(0.0).mean() + 0.5 * alpha * x.squaredNorm();
        },
        [component, m](const Vec& x) {
            Vec g = Vec::Zero(x.size());
            for (Eigen::Index i = 0; i < m; ++i) g += component(i, x);
            return Vec(g / static_cast<double>(m));
        },
        reg);
    f.f_star = ref.f_star;
    f.x_star = ref.x_star;
    f.name = "svm";
    p.f = std::move(f);
    p.sampler = [component, m](const Vec& x, Rng& r) {
        return component(static_cast<Eigen::Index>(r.index(static_cast<std::size_t>(m))), x);
    };
    // SGD iterates are convex combinations of x_s and -h/alpha, so they stay
    // in the ball of radius 1/alpha, where ||g|| <= 2 (unit rows)
    p.set = std::make_shared<Ball>(n, 1.0 / alpha);
    p.x1 = Vec::Zero(n);
    p.meta["alpha"] = alpha;
    p.meta["B"] = 2.0;
}

void least_squares_kind(ProblemInstance& p, Params& prm, Rng& rng) {
    const long m = positive(prm.integer("samples", 100), "samples");
    const long n = positive(prm.integer("dim", 8), "dim");
    const double x0_norm = prm.num("opt_norm", 0.5);
    if (x0_norm >= 1.0) throw ConfigError("the minimizer must lie inside the unit ball");
    const Mat W = Mat::NullaryExpr(m, n, [&] { return rng.normal(); }) / std::sqrt(static_cast<double>(n));
    const Vec x0 = x0_norm * rng.unit_vector(n);
    const Vec y = W * x0;
    FiniteSum fs = ridge_regression_sum(W, y, 0.0);
    fs.f_star = 0.0;
    fs.x_star = x0;
    fs.beta = lambda_max(W.transpose() * W / static_cast<double>(m));
    double B = 0.0;  // ||grad f_i(x)|| <= ||w_i|| (||w_i|| + |y_i|) on the unit ball
    for (Eigen::Index i = 0; i < m; ++i) B = std::max(B, W.row(i).norm() * (W.row(i).norm() + std::abs(y(i))));
    p.set = std::make_shared<Ball>(n, 1.0);
    p.map = standard_mirror_map(MirrorKind::ball, n, p.set);
    p.meta["B"] = B;
    p.meta["beta"] = fs.beta;
    p.f = fs.as_oracle();
    p.f->regularity.beta = fs.beta;
    p.finite_sum = std::move(fs);
}

void ridge_kind(ProblemInstance& p, Params& prm, Rng& rng) {
    const long m = positive(prm.integer("samples", 200), "samples");
    const long n = positive(prm.integer("dim", 40), "dim");
    const double kappa = positive(prm.num("kappa", 50.0), "kappa");
    Mat W = Mat::NullaryExpr(m, n, [&] { return rng.normal(); });
    W.rowwise().normalize();
    const Vec y = W * rng.normal_vector(n) + 0.5 * rng.normal_vector(m);
    // unit rows: beta = 1 + lambda and alpha = mu + lambda, so kappa fixes lambda
    const double mu = lambda_min(W.transpose() * W / static_cast<double>(m));
    const double lambda = (1.0 - kappa * mu) / (kappa - 1.0);
    if (!(lambda > 0.0)) throw ConfigError("kappa is too large for this data (the ridge term would be negative)");
    FiniteSum fs = ridge_regression_sum(W, y, lambda);
    p.x1 = Vec::Zero(n);
    p.meta["kappa"] = fs.kappa();
    p.meta["beta"] = fs.beta;
    p.meta["alpha"] = *fs.alpha;
    p.f = fs.as_oracle();
    p.finite_sum = std::move(fs);
}

void coordinate_quadratic_kind(ProblemInstance& p, Params& prm, Rng& rng) {
    const long n = positive(prm.integer("dim", 20), "dim");
    const double spread = prm.num("spread", 2.0);
    const double coupling = prm.num("coupling", 0.1);
    Vec diag(n);
    for (Eigen::Index i = 0; i < n; ++i)
        diag(i) = std::pow(10.0, spread * static_cast<double>(i) / static_cast<double>(std::max<long>(1, n - 1)));
    const Mat Q = random_orthogonal(n, rng);
    const Mat A = diag.cwiseSqrt().asDiagonal() * (Mat::Identity(n, n) + coupling * symmetrize(Q)) *
                  diag.cwiseSqrt().asDiagonal();
    if (!(lambda_min(A) > 0.0)) throw ConfigError("coupling too strong: the Hessian is not positive definite");
    const Vec b = A * rng.normal_vector(n);
    p.coordinate = coordinate_quadratic(A, b);
    p.matrix = A;
    p.x1 = Vec::Zero(n);
    p.meta["gap1"] = p.coordinate->f.evaluate(p.x1) - *p.coordinate->f.f_star;
}

void graph_kind(ProblemInstance& p, Params& prm, Rng& rng) {
    Mat W;
    if (prm.has("csv")) {
        W = read_graph_csv(prm.str("csv", ""));
    } else if (prm.has("edges")) {
        const Json& e = prm.raw("edges");
        std::string text;
        for (const Json& edge : e) {
            if (!edge.is_array() || edge.size() != 3) throw ConfigError("edges are [i, j, weight] triples");
            text += edge[0].dump() + "," + edge[1].dump() + "," + edge[2].dump() + "\n";
        }
        W = parse_graph_csv(text);
    } else {
        const long n = positive(prm.integer("vertices", 8), "vertices");
        const std::string family = prm.str("family", "random");
        W = Mat::Zero(n, n);
        if (family == "complete") {
            W = Mat::Ones(n, n) - Mat::Identity(n, n);
        } else if (family == "cycle") {
            for (Eigen::Index i = 0; i < n; ++i) W(i, (i + 1) % n) = W((i + 1) % n, i) = 1.0;
        } else if (family == "random") {
            const double density = prm.num("density", 0.5);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = i + 1; j < n; ++j)
                    if (rng.uniform() < density) W(i, j) = W(j, i) = 1.0;
        } else {
            throw ConfigError("graph family must be complete, cycle or random");
        }
    }
    p.graph = W;
}

using KindBuilder = void (*)(ProblemInstance&, Params&, Rng&);

const std::map<std::string, KindBuilder>& kind_builders() {
    static const std::map<std::string, KindBuilder> m = {
        {"quadratic", quadratic_kind},
        {"distance", distance_kind},
        {"simplex_distance", simplex_distance_kind},
        {"lasso", lasso_kind},
        {"matrix_game", matrix_game_kind},
        {"lp", lp_kind},
        {"svm", svm_kind},
        {"least_squares", least_squares_kind},
        {"ridge", ridge_kind},
        {"coordinate_quadratic", coordinate_quadratic_kind},
        {"graph", graph_kind},
    };
    return m;
}

// What one algorithm run needs: the algorithm's own RNG and parameters.
struct RunContext {
    ProblemInstance& p;
    Params& params;
    long horizon;
    Rng& rng;
    Json extra;
};

struct AlgorithmImpl {
    std::function<RunTrace(RunContext&)> run;
    // Bound for the given id, built after the run (the IPM certificate needs the path).
    std::function<BoundSpec(const std::string&, const ProblemInstance&, const Json& params, long horizon,
                            const std::vector<RunTrace>&)>
        bound;
};

FirstOrderOracle& need_f(ProblemInstance& p) {
    if (!p.f) throw ConfigError("problem '" + p.spec.kind + "' has no first-order oracle");
    return *p.f;
}

const MirrorMap& need_map(const ProblemInstance& p) {
    if (!p.map) throw ConfigError("problem '" + p.spec.kind + "' has no mirror map (use a ball or simplex problem)");
    return *p.map;
}

double map_L(const ProblemInstance& p) { return p.meta.count("L_map") ? p.at("L_map") : p.at("L"); }
double map_beta(const ProblemInstance& p) { return p.meta.count("beta_map") ? p.at("beta_map") : p.at("beta"); }

std::string str_param(const Json& params, const std::string& key, const std::string& def) {
    return params.contains(key) && params.at(key).is_string() ? params.at(key).get<std::string>() : def;
}

double num_param(const Json& params, const std::string& key, double def) {
    return params.contains(key) && params.at(key).is_number() ? params.at(key).get<double>() : def;
}

StochasticOracle noisy_oracle(ProblemInstance& p, double sigma) {
    return gaussian_noise_oracle(need_f(p), sigma);
}

RunTrace cut_trace_to_run(const CutTrace& ct, const FirstOrderOracle& f) {
    RunTrace tr;
    tr.algorithm = ct.algorithm;
    for (const CutStep& s : ct.steps) {
        TraceRow r;
        r.iter = s.iter;
        r.f_value = s.best_value;
        if (f.f_star && std::isfinite(s.best_value)) r.gap = s.best_value - *f.f_star;
        r.avg_gap = r.gap;
        r.oracle_first = s.oracle_calls;
        tr.rows.push_back(r);
    }
    if (ct.best_point) tr.x_last = tr.x_out = *ct.best_point;
    return tr;
}

const std::map<std::string, AlgorithmImpl>& algorithm_impls() {
    static const std::map<std::string, AlgorithmImpl> m = [] {
        std::map<std::string, AlgorithmImpl> a;
        a["pgd_lipschitz"] = {
            [](RunContext& c) {
                const double R = c.p.meta.count("R") ? c.p.at("R") : std::sqrt(c.p.at("dist_sq"));
                return run_pgd_lipschitz(need_f(c.p), *c.p.set, R, c.p.at("L"), c.horizon, c.p.x1);
            },
            [](const std::string&, const ProblemInstance& p, const Json&, long t, const std::vector<RunTrace>&) {
                const double R = p.meta.count("R") ? p.at("R") : std::sqrt(p.at("dist_sq"));
                return bounds::pgd_lipschitz(R, p.at("L"), t);
            }};
        a["gd_smooth"] = {
            [](RunContext& c) {
                const bool constrained = c.p.meta.count("diameter") > 0;
                return run_gd_smooth(need_f(c.p), c.horizon, c.p.x1, constrained ? c.p.set.get() : nullptr);
            },
            [](const std::string& id, const ProblemInstance& p, const Json&, long, const std::vector<RunTrace>&) {
                if (id == "pgd_smooth") return bounds::pgd_smooth(p.at("beta"), p.at("dist_sq"), p.at("gap1"));
                return bounds::gd_smooth(p.at("beta"), p.at("dist_sq"));
            }};
        a["pgd_strongly"] = {
            [](RunContext& c) {
                const std::string v = c.params.str("variant", "smooth");
                StronglyConvexVariant variant;
                if (v == "lipschitz") variant = StronglyConvexVariant::lipschitz;
                else if (v == "smooth") variant = StronglyConvexVariant::smooth;
                else if (v == "smooth_unconstrained") variant = StronglyConvexVariant::smooth_unconstrained;
                else throw ConfigError("variant must be lipschitz, smooth or smooth_unconstrained");
                return run_pgd_strongly(need_f(c.p), *c.p.set, variant, c.horizon, c.p.x1);
            },
            [](const std::string& id, const ProblemInstance& p, const Json&, long, const std::vector<RunTrace>&) {
                if (id == "pgd_strongly_lipschitz") return bounds::pgd_strongly_lipschitz(p.at("L"), p.at("alpha"));
                if (id == "gd_strongly_unconstrained")
                    return bounds::gd_strongly_unconstrained(p.at("beta"), p.at("kappa"), p.at("dist_sq"));
                return bounds::pgd_strongly_smooth(p.at("kappa"), p.at("dist_sq"));
            }};
        a["frank_wolfe"] = {
            [](RunContext& c) { return run_frank_wolfe(need_f(c.p), *c.p.set, c.horizon, c.p.x1); },
            [](const std::string&, const ProblemInstance& p, const Json&, long, const std::vector<RunTrace>&) {
                return bounds::frank_wolfe(p.at("beta"), p.at("diameter"));
            }};
        a["agd"] = {
            [](RunContext& c) {
                const std::string v = c.params.str("variant", "smooth");
                if (v != "smooth" && v != "strongly_convex") throw ConfigError("variant must be smooth or strongly_convex");
                return run_agd(need_f(c.p), v == "smooth" ? AgdVariant::smooth : AgdVariant::strongly_convex,
                               c.horizon, c.p.x1);
            },
            [](const std::string& id, const ProblemInstance& p, const Json&, long, const std::vector<RunTrace>&) {
                if (id == "agd_strongly") return bounds::agd_strongly(p.at("alpha"), p.at("beta"), p.at("dist_sq"));
                return bounds::agd_smooth(p.at("beta"), p.at("dist_sq"));
            }};
        a["ellipsoid"] = {
            [](RunContext& c) {
                FirstOrderOracle& f = need_f(c.p);
                const double radius = c.p.at("radius");
                return cut_trace_to_run(run_ellipsoid(*c.p.set, &f, radius, radius, c.horizon), f);
            },
            [](const std::string&, const ProblemInstance& p, const Json&, long, const std::vector<RunTrace>&) {
                return bounds::ellipsoid(p.at("B"), p.at("radius"), p.at("radius"), p.set->dim());
            }};
        a["mirror_descent"] = {
            [](RunContext& c) {
                const MirrorMap& map = need_map(c.p);
                return run_mirror_descent(need_f(c.p), map, mirror_descent_step(map, map_L(c.p), c.horizon),
                                          c.horizon);
            },
            [](const std::string&, const ProblemInstance& p, const Json&, long t, const std::vector<RunTrace>&) {
                return bounds::mirror_descent(need_map(p), map_L(p), t);
            }};
        a["dual_averaging"] = {
            [](RunContext& c) {
                const MirrorMap& map = need_map(c.p);
                return run_dual_averaging(need_f(c.p), map, dual_averaging_step(map, map_L(c.p), c.horizon),
                                          c.horizon);
            },
            [](const std::string&, const ProblemInstance& p, const Json&, long t, const std::vector<RunTrace>&) {
                return bounds::dual_averaging(need_map(p), map_L(p), t);
            }};
        a["mirror_prox"] = {
            [](RunContext& c) {
                const MirrorMap& map = need_map(c.p);
                return run_mirror_prox(need_f(c.p), map, mirror_prox_step(map, map_beta(c.p)), c.horizon);
            },
            [](const std::string&, const ProblemInstance& p, const Json&, long, const std::vector<RunTrace>&) {
                return bounds::mirror_prox(need_map(p), map_beta(p));
            }};
        a["ista"] = {[](RunContext& c) { return run_ista(*c.p.composite, c.horizon, c.p.x1); },
                     [](const std::string&, const ProblemInstance& p, const Json&, long, const std::vector<RunTrace>&) {
                         return bounds::ista(p.at("beta"), p.at("dist_sq"));
                     }};
        a["fista"] = {[](RunContext& c) { return run_fista(*c.p.composite, c.horizon, c.p.x1); },
                      [](const std::string&, const ProblemInstance& p, const Json&, long,
                         const std::vector<RunTrace>&) { return bounds::fista(p.at("beta"), p.at("dist_sq")); }};
        a["sp_md"] = {[](RunContext& c) { return run_sp_md(*c.p.saddle, c.horizon).trace; },
                      [](const std::string&, const ProblemInstance& p, const Json&, long t,
                         const std::vector<RunTrace>&) { return bounds::sp_md(*p.saddle, t); }};
        a["sp_mp"] = {[](RunContext& c) { return run_sp_mp(*c.p.saddle, c.horizon).trace; },
                      [](const std::string&, const ProblemInstance& p, const Json&, long,
                         const std::vector<RunTrace>&) { return bounds::sp_mp(*p.saddle); }};
        a["ipm"] = {
            [](RunContext& c) {
                const double eps = positive(c.params.num("eps", 1e-8), "eps");
                const LpResult r = solve_lp(*c.p.lp, eps);
                RunTrace tr = r.path.trace;
                // path rows hold c'^T z in reduced coordinates; shift to c^T x
                const double offset = r.value - tr.last().f_value;
                for (TraceRow& row : tr.rows) {
                    row.f_value += offset;
                    row.gap = row.avg_gap =
                        c.p.meta.count("optimum") ? row.f_value - c.p.at("optimum") : kNaN;
                }
                tr.x_last = tr.x_out = r.x;
                c.extra["lp"] = lp_result_to_json(r);
                return tr;
            },
            [](const std::string&, const ProblemInstance& p, const Json&, long, const std::vector<RunTrace>& runs) {
                const auto& ts = runs.front().series.at("t");
                return bounds::ipm_certificate(static_cast<double>(p.lp->A.rows()), ts);
            }};
        a["smd"] = {
            [](RunContext& c) {
                const double sigma = c.params.num("sigma", 0.1);
                const MirrorMap& map = need_map(c.p);
                StochasticOracle g = noisy_oracle(c.p, sigma);
                const double B = std::sqrt(map_L(c.p) * map_L(c.p) + sigma * sigma);
                return run_smd(g, map, smd_step(map, B, c.horizon), c.horizon, c.rng);
            },
            [](const std::string&, const ProblemInstance& p, const Json& params, long t, const std::vector<RunTrace>&) {
                const double sigma = num_param(params, "sigma", 0.1);
                return bounds::smd(need_map(p), std::sqrt(map_L(p) * map_L(p) + sigma * sigma), t);
            }};
        a["sgd_strongly"] = {
            [](RunContext& c) {
                if (!c.p.sampler) throw ConfigError("problem '" + c.p.spec.kind + "' has no gradient sampler");
                StochasticOracle g = expectation_oracle(need_f(c.p), c.p.sampler, c.p.at("B"));
                return run_sgd_strongly(g, *c.p.set, c.horizon, c.p.x1, c.rng);
            },
            [](const std::string&, const ProblemInstance& p, const Json&, long, const std::vector<RunTrace>&) {
                return bounds::sgd_strongly(p.at("B"), p.at("alpha"));
            }};
        a["smd_smooth"] = {
            [](RunContext& c) {
                StochasticOracle g = noisy_oracle(c.p, c.params.num("sigma", 0.1));
                return run_smd_smooth(g, need_map(c.p), c.horizon, c.rng);
            },
            [](const std::string&, const ProblemInstance& p, const Json& params, long t, const std::vector<RunTrace>&) {
                return bounds::smd_smooth(need_map(p), num_param(params, "sigma", 0.1), p.at("beta"), t);
            }};
        a["minibatch_sgd"] = {
            [](RunContext& c) {
                const MirrorMap& map = need_map(c.p);
                const long batch = positive(
                    c.params.integer("batch", critical_batch(map, c.p.at("B"), c.p.at("beta"), c.horizon)), "batch");
                StochasticOracle g = finite_sum_oracle(*c.p.finite_sum);
                g.mean.regularity.beta = c.p.at("beta");
                g.B = c.p.at("B");
                return run_minibatch_sgd(g, map, batch, c.horizon, c.rng);
            },
            [](const std::string&, const ProblemInstance& p, const Json& params, long t, const std::vector<RunTrace>&) {
                const MirrorMap& map = need_map(p);
                const long batch = params.contains("batch") ? params.at("batch").get<long>()
                                                            : critical_batch(map, p.at("B"), p.at("beta"), t);
                return bounds::minibatch(map, p.at("B"), p.at("beta"), batch, t);
            }};
        a["svrg"] = {[](RunContext& c) { return run_svrg(*c.p.finite_sum, c.horizon, c.p.x1, c.rng); },
                     [](const std::string&, const ProblemInstance&, const Json&, long,
                        const std::vector<RunTrace>& runs) { return bounds::svrg(runs.front().rows.front().gap); }};
        a["rcd"] = {
            [](RunContext& c) {
                const double gamma = c.params.num("gamma", 0.5);
                return run_rcd(*c.p.coordinate, gamma, c.horizon, c.p.x1, c.rng);
            },
            [](const std::string& id, const ProblemInstance& p, const Json& params, long,
               const std::vector<RunTrace>&) {
                const CoordinateSmoothness cs{p.coordinate->beta, num_param(params, "gamma", 0.5)};
                if (id == "rcd") return bounds::rcd(rcd_quadratic_radius_sq(p.matrix, cs, p.at("gap1")), cs.beta_power_sum());
                return bounds::rcd_strongly(cs.beta_power_sum() / rcd_quadratic_alpha(p.matrix, cs), p.at("gap1"));
            }};
        a["s_sp_md"] = {
            [](RunContext& c) {
                const long every = positive(c.params.integer("record_every", std::max<long>(1, c.horizon / 200)),
                                            "record_every");
                StochasticSaddleRun r = run_s_sp_md(*c.p.saddle, c.horizon, c.rng, every);
                c.extra["entry_accesses"] = r.entry_accesses;
                return r.run.trace;
            },
            [](const std::string&, const ProblemInstance& p, const Json&, long t, const std::vector<RunTrace>&) {
                const double a_max = p.at("A_max");
                return bounds::s_sp_md(*p.saddle, a_max, a_max, t);
            }};
        a["gw_round"] = {
            [](RunContext& c) {
                const Mat L = graph_laplacian(*c.p.graph);
                const SdpResult sdp = sdp_relax_maxcut(L);
                const RoundingResult rr = gw_round(sdp.X, L, c.horizon, c.rng.next_u64());
                RunTrace tr;
                tr.algorithm = "gw_round";
                TraceRow row;
                row.iter = c.horizon;
                row.f_value = rr.mean_value;
                if (L.rows() <= 16) {
                    // shortfall below 0.878 OPT, compared against 3 standard errors
                    const double opt = brute_force_max_quadratic(L).value;
                    row.gap = row.avg_gap = 0.878 * opt - rr.mean_value;
                    c.extra["opt"] = opt;
                }
                tr.rows.push_back(row);
                tr.series["std_error"].push_back(rr.std_error);
                tr.x_last = tr.x_out = rr.best;
                c.extra["cut"] = cut_to_json(rr.best, rr.best_value);
                c.extra["sdp_value"] = sdp.value;
                c.extra["mean_value"] = rr.mean_value;
                c.extra["std_error"] = rr.std_error;
                return tr;
            },
            [](const std::string&, const ProblemInstance&, const Json&, long, const std::vector<RunTrace>& runs) {
                BoundSpec b;
                b.id = "gw_ratio";
                b.rate = "E zeta^T L zeta >= 0.878 max x^T L x (shortfall <= 3 standard errors)";
                const double se = runs.front().series.at("std_error").front();
                b.curve = [se](long) { return 3.0 * se; };
                b.expectation = false;  // the standard error already carries the sampling slack
                return b;
            }};
        return a;
    }();
    return m;
}

std::string family_of(const std::string& id) {
    for (const CatalogEntry& e : algorithm_catalog())
        if (e.id == id) return e.family;
    throw ConfigError("unknown algorithm '" + id + "'");
}

const CatalogEntry& algorithm_entry(const std::string& id) {
    for (const CatalogEntry& e : algorithm_catalog())
        if (e.id == id) return e;
    throw ConfigError("unknown algorithm '" + id + "'");
}

}  // namespace

double ProblemInstance::at(const std::string& key) const {
    const auto it = meta.find(key);
    if (it == meta.end()) throw ConfigError("problem '" + spec.kind + "' does not provide '" + key + "'");
    return it->second;
}

ProblemSpec problem_spec_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("problem must be an object");
    ProblemSpec s;
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") {
            if (!value.is_string()) throw ConfigError("problem.kind must be a string");
            s.kind = value.get<std::string>();
        } else if (key == "params") {
            if (!value.is_object()) throw ConfigError("problem.params must be an object");
            s.params = value;
        } else if (key == "seed") {
            if (!value.is_number_unsigned()) throw ConfigError("problem.seed must be a nonnegative integer");
            s.seed = value.get<std::uint64_t>();
        } else {
            throw ConfigError("unknown key \"" + key + "\" in problem");
        }
    }
    if (s.kind.empty()) throw ConfigError("problem lacks \"kind\"");
    if (!kind_builders().count(s.kind)) throw ConfigError("unknown problem kind '" + s.kind + "'");
    return s;
}

Json problem_spec_to_json(const ProblemSpec& spec) {
    return {{"kind", spec.kind}, {"params", spec.params}, {"seed", spec.seed}};
}

ProblemInstance build_problem(const ProblemSpec& spec) {
    const auto it = kind_builders().find(spec.kind);
    if (it == kind_builders().end()) throw ConfigError("unknown problem kind '" + spec.kind + "'");
    ProblemInstance p;
    p.spec = spec;
    Params prm(spec.params, "problem.params");
    Rng rng(spec.seed);
    it->second(p, prm, rng);
    prm.finish();
    return p;
}

const std::vector<CatalogEntry>& problem_catalog() {
    static const std::vector<CatalogEntry> c = {
        {"quadratic", "", "1/2 x^T A x - b^T x, spectrum in [alpha, beta]; set ball or unconstrained", {}, {}},
        {"distance", "", "||x - a||_2 on a Euclidean ball (1-Lipschitz, nonsmooth)", {}, {}},
        {"simplex_distance", "", "1/2 ||x - c||^2 on the probability simplex", {}, {}},
        {"lasso", "", "1/2 ||W x - y||^2 + lambda ||x||_1", {}, {}},
        {"matrix_game", "", "min over the simplex, max over the simplex of x^T A y (inline, CSV or random)", {}, {}},
        {"lp", "", "min c^T x subject to A x >= b (JSON {A, b, c}, inline or random)", {}, {}},
        {"svm", "", "(1/m) sum hinge + alpha/2 ||x||^2 with component sampling", {}, {}},
        {"least_squares", "", "(1/m) sum 1/2 (w_i^T x - y_i)^2 with an exact fit in the unit ball", {}, {}},
        {"ridge", "", "ridge regression finite sum with prescribed condition number", {}, {}},
        {"coordinate_quadratic", "", "quadratic with widely spread coordinate smoothness", {}, {}},
        {"graph", "", "weighted graph for MAXCUT (edge-list CSV, inline edges or a family)", {}, {}},
    };
    return c;
}

const std::vector<CatalogEntry>& algorithm_catalog() {
    static const std::vector<CatalogEntry> c = {
        {"pgd_lipschitz", "first_order", "projected subgradient descent, eta = R/(L sqrt t)", {"distance", "quadratic"}, {"pgd_lipschitz"}},
        {"gd_smooth", "first_order", "gradient descent with eta = 1/beta (projected on a ball)", {"quadratic"}, {"gd_smooth", "pgd_smooth"}},
        {"pgd_strongly", "first_order", "strongly convex PGD (variant: lipschitz, smooth, smooth_unconstrained)", {"quadratic"},
         {"pgd_strongly_smooth", "pgd_strongly_lipschitz", "gd_strongly_unconstrained"}},
        {"frank_wolfe", "first_order", "conditional gradient with gamma_s = 2/(s+1)", {"quadratic", "simplex_distance"}, {"frank_wolfe"}},
        {"agd", "first_order", "Nesterov's accelerated gradient descent (variant: smooth, strongly_convex)", {"quadratic"},
         {"agd_smooth", "agd_strongly"}},
        {"ellipsoid", "cutting_plane", "ellipsoid method with a first-order oracle", {"distance"}, {"ellipsoid"}},
        {"mirror_descent", "mirror", "mirror descent with the horizon step", {"simplex_distance", "quadratic", "distance"}, {"mirror_descent"}},
        {"dual_averaging", "mirror", "dual averaging with the horizon step", {"simplex_distance", "quadratic", "distance"}, {"dual_averaging"}},
        {"mirror_prox", "mirror", "mirror prox with eta = rho / beta", {"simplex_distance", "quadratic"}, {"mirror_prox"}},
        {"ista", "composite", "proximal gradient descent", {"lasso"}, {"ista"}},
        {"fista", "composite", "accelerated proximal gradient descent", {"lasso"}, {"fista"}},
        {"sp_md", "saddle", "saddle point mirror descent", {"matrix_game"}, {"sp_md"}},
        {"sp_mp", "saddle", "saddle point mirror prox", {"matrix_game"}, {"sp_mp"}},
        {"ipm", "interior_point", "barrier path following (phase I, backward init, short steps)", {"lp"}, {"ipm_certificate"}},
        {"smd", "stochastic", "stochastic mirror descent with Gaussian gradient noise (param sigma)", {"quadratic", "distance"}, {"smd"}},
        {"sgd_strongly", "stochastic", "SGD with eta_s = 2/(alpha (s+1)) and weighted averaging", {"svm"}, {"sgd_strongly"}},
        {"smd_smooth", "stochastic", "S-MD on a smooth objective with Gaussian noise (param sigma)", {"quadratic"}, {"smd_smooth"}},
        {"minibatch_sgd", "stochastic", "mini-batch SGD, horizon = oracle calls (param batch, default critical)", {"least_squares"}, {"minibatch"}},
        {"svrg", "stochastic", "SVRG, horizon = epochs", {"ridge"}, {"svrg"}},
        {"rcd", "stochastic", "random coordinate descent RCD(gamma) (param gamma)", {"coordinate_quadratic"}, {"rcd_strongly", "rcd"}},
        {"s_sp_md", "stochastic", "stochastic saddle point mirror descent with entry sampling", {"matrix_game"}, {"s_sp_md"}},
        {"gw_round", "sampling", "MAXCUT SDP relaxation and Goemans-Williamson rounding, horizon = replicates", {"graph"}, {"gw_ratio"}},
    };
    return c;
}

const std::vector<CatalogEntry>& bound_catalog() {
    static const std::vector<CatalogEntry> c = [] {
        std::vector<CatalogEntry> out;
        const auto add = [&out](const std::string& id, const std::string& rate) {
            out.push_back({id, "", rate, {}, {}});
        };
        add("pgd_lipschitz", "R L / sqrt(t)");
        add("gd_smooth", "2 beta R^2 / (t - 1)");
        add("pgd_smooth", "(3 beta R^2 + f(x_1) - f*) / t");
        add("frank_wolfe", "2 beta R^2 / (t + 1)");
        add("pgd_strongly_lipschitz", "2 L^2 / (alpha (t + 1))");
        add("pgd_strongly_smooth", "||x_t - x*||^2 <= exp(-(t - 1) / kappa) R^2");
        add("gd_strongly_unconstrained", "beta / 2 exp(-4 (t - 1) / (kappa + 1)) R^2");
        add("agd_smooth", "2 beta R^2 / t^2");
        add("agd_strongly", "(alpha + beta) / 2 R^2 exp(-(t - 1) / sqrt(kappa))");
        add("ellipsoid", "2 B R / r exp(-t / (2 n^2))");
        add("mirror_descent", "R L sqrt(2 / (rho t))");
        add("dual_averaging", "2 R L sqrt(2 / (rho t))");
        add("mirror_prox", "beta R^2 / (rho t)");
        add("ista", "beta R^2 / (2 t)");
        add("fista", "2 beta R^2 / t^2");
        add("sp_md", "(R_X L_X + R_Y L_Y) sqrt(2 / t)");
        add("sp_mp", "4 M / t");
        add("ipm_certificate", "2 nu / t_k");
        add("smd", "R B sqrt(2 / t) (mean over seeds)");
        add("sgd_strongly", "2 B^2 / (alpha (t + 1)) (mean over seeds)");
        add("smd_smooth", "R sigma sqrt(2 / t) + beta R^2 / t (mean over seeds)");
        add("minibatch", "2 R B / sqrt(t) + m beta R^2 / t (mean over seeds)");
        add("svrg", "0.9^s (f(y_1) - f*) (mean over seeds)");
        add("rcd", "2 R^2 sum beta_i^gamma / (t - 1) (mean over seeds)");
        add("rcd_strongly", "(1 - 1 / kappa_gamma)^t (f(x_1) - f*) (mean over seeds)");
        add("s_sp_md", "(R_X B_X + R_Y B_Y) sqrt(2 / t) (mean over seeds)");
        add("gw_ratio", "mean cut >= 0.878 OPT - 3 standard errors");
        return out;
    }();
    return c;
}

ExperimentConfig parse_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    bool has_problem = false, has_algorithm = false, has_horizon = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "problem") {
            c.problem = problem_spec_from_json(value);
            has_problem = true;
        } else if (key == "algorithm") {
            if (!value.is_object()) throw ConfigError("algorithm must be an object {\"id\", \"params\"}");
            for (const auto& [k, v] : value.items()) {
                if (k == "id") {
                    if (!v.is_string()) throw ConfigError("algorithm.id must be a string");
                    c.algorithm = v.get<std::string>();
                } else if (k == "params") {
                    if (!v.is_object()) throw ConfigError("algorithm.params must be an object");
                    c.params = v;
                } else {
                    throw ConfigError("unknown key \"" + k + "\" in algorithm");
                }
            }
            if (c.algorithm.empty()) throw ConfigError("algorithm lacks \"id\"");
            has_algorithm = true;
        } else if (key == "horizon") {
            if (!value.is_number_integer() || value.get<long>() <= 0)
                throw ConfigError("horizon must be a positive integer");
            c.horizon = value.get<long>();
            has_horizon = true;
        } else if (key == "seeds") {
            if (!value.is_number_integer() || value.get<long>() <= 0)
                throw ConfigError("seeds must be a positive integer");
            c.seeds = value.get<long>();
        } else if (key == "bound") {
            if (!value.is_object()) throw ConfigError("bound must be an object {\"id\", \"slack\"}");
            for (const auto& [k, v] : value.items()) {
                if (k == "id") {
                    if (!v.is_string()) throw ConfigError("bound.id must be a string");
                    c.bound_id = v.get<std::string>();
                } else if (k == "slack") {
                    if (!v.is_number() || !(v.get<double>() >= 1.0)) throw ConfigError("bound.slack must be >= 1");
                    c.slack = v.get<double>();
                } else {
                    throw ConfigError("unknown key \"" + k + "\" in bound");
                }
            }
        } else {
            throw ConfigError("unknown top-level key \"" + key + "\"");
        }
    }
    if (!has_problem) throw ConfigError("config lacks \"problem\"");
    if (!has_algorithm) throw ConfigError("config lacks \"algorithm\"");
    if (!has_horizon) throw ConfigError("config lacks \"horizon\"");
    const CatalogEntry& entry = algorithm_entry(c.algorithm);
    if (std::find(entry.problems.begin(), entry.problems.end(), c.problem.kind) == entry.problems.end())
        throw ConfigError("algorithm '" + c.algorithm + "' does not run on problem kind '" + c.problem.kind + "'");
    if (!c.bound_id.empty() && c.bound_id != "none" &&
        std::find(entry.bounds.begin(), entry.bounds.end(), c.bound_id) == entry.bounds.end())
        throw ConfigError("bound '" + c.bound_id + "' does not apply to algorithm '" + c.algorithm + "'");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    ExperimentConfig c = parse_config(read_json_file(path));
    c.source = path;
    return c;
}

namespace {

// The default bound follows the variant or set the run uses.
std::string default_bound(const ExperimentConfig& c, const ProblemInstance& p) {
    const CatalogEntry& e = algorithm_entry(c.algorithm);
    const std::string variant = str_param(c.params, "variant", "");
    if (c.algorithm == "gd_smooth") return p.meta.count("diameter") ? "pgd_smooth" : "gd_smooth";
    if (c.algorithm == "pgd_strongly") {
        if (variant == "lipschitz") return "pgd_strongly_lipschitz";
        if (variant == "smooth_unconstrained") return "gd_strongly_unconstrained";
    }
    if (c.algorithm == "agd" && variant == "strongly_convex") return "agd_strongly";
    return e.bounds.front();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult res;
    res.config = config;
    res.family = family_of(config.algorithm);
    const AlgorithmImpl& impl = algorithm_impls().at(config.algorithm);
    const ProblemInstance base = build_problem(config.problem);

    // validate the algorithm parameters once, before any replicate runs
    {
        ProblemInstance probe = base;
        Params prm(config.params, "algorithm.params");
        static const std::map<std::string, std::vector<std::string>> known = {
            {"pgd_strongly", {"variant"}}, {"agd", {"variant"}},           {"ipm", {"eps"}},
            {"smd", {"sigma"}},            {"smd_smooth", {"sigma"}},      {"minibatch_sgd", {"batch"}},
            {"rcd", {"gamma"}},            {"s_sp_md", {"record_every"}},
        };
        prm.integer("seed", 0);
        if (known.count(config.algorithm))
            for (const std::string& k : known.at(config.algorithm)) {
                if (k == "variant") prm.str(k, "");
                else if (k == "batch" || k == "record_every") prm.integer(k, 1);
                else prm.num(k, 0.0);
            }
        prm.finish();
    }
    const std::uint64_t algo_seed = static_cast<std::uint64_t>(
        config.params.contains("seed") ? config.params.at("seed").get<long>() : 1L);

    const std::size_t count = static_cast<std::size_t>(config.seeds);
    res.runs.resize(count);
    std::vector<Json> extras(count, Json::object());
    parallel_for(count, [&](std::size_t i) {
        ProblemInstance p = base;
        Params prm(config.params, "algorithm.params");
        Rng rng = Rng::stream(algo_seed, i);
        RunContext ctx{p, prm, config.horizon, rng, Json::object()};
        res.runs[i] = impl.run(ctx);
        extras[i] = std::move(ctx.extra);
    });
    for (std::size_t i = 0; i < count; ++i) res.replicate_seeds.push_back(i);
    res.extra = extras.front();
    for (const RunTrace& r : res.runs)
        if (!r.rows.empty()) res.oracle_calls += r.last().oracle_first + r.last().oracle_zeroth;

    std::string bound_id = config.bound_id.empty() ? default_bound(config, base) : config.bound_id;
    if (bound_id != "none") {
        BoundSpec b = impl.bound(bound_id, base, config.params, config.horizon, res.runs);
        b.slack = config.slack.value_or(b.expectation && count > 1 ? 1.1 : 1.0);
        if (count > 1) {
            EnsembleCheck ec = check_bound(res.runs, b);
            res.reported = std::move(ec.mean);
            res.verdict = ec.verdict;
        } else {
            res.reported = res.runs.front();
            res.verdict = check_bound(res.reported, b);
        }
        res.bound = std::move(b);
    } else {
        res.reported = count > 1 ? ensemble_mean(res.runs) : res.runs.front();
    }

    // rate fit over the trailing half of the rows above the roundoff floor
    // (1e-9 of the first positive value)
    const std::string quantity = res.bound ? res.bound->quantity : "gap";
    std::vector<double> ts, gs;
    double floor = 0.0;
    for (const TraceRow& row : res.reported.rows) {
        const double q = row_quantity(row, quantity);
        if (!(q > 0.0) || !std::isfinite(q) || row.iter <= 0) continue;
        if (floor == 0.0) floor = 1e-9 * q;
        if (q <= floor) break;
        ts.push_back(static_cast<double>(row.iter));
        gs.push_back(q);
    }
    if (ts.size() >= 20) {
        const std::size_t half = ts.size() / 2;
        res.fit = fit_rate(std::vector<double>(ts.end() - static_cast<long>(half), ts.end()),
                           std::vector<double>(gs.end() - static_cast<long>(half), gs.end()),
                           res.bound && res.bound->linear);
    }
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

Json result_to_json(const ExperimentResult& r) {
    Json out;
    out["source"] = r.config.source;
    out["algorithm"] = r.config.algorithm;
    out["family"] = r.family;
    out["problem"] = problem_spec_to_json(r.config.problem);
    out["params"] = r.config.params;
    out["horizon"] = r.config.horizon;
    out["seeds"] = r.config.seeds;
    out["iterations"] = r.reported.rows.empty() ? 0 : r.reported.last().iter;
    out["oracle_calls"] = r.oracle_calls;
    if (!r.reported.rows.empty()) {
        const TraceRow& last = r.reported.last();
        out["final"] = {{"f_value", last.f_value}, {"gap", last.gap}, {"avg_gap", last.avg_gap}};
    }
    if (r.bound) {
        out["bound"] = {{"id", r.bound->id},
                        {"rate", r.bound->rate},
                        {"quantity", r.bound->quantity},
                        {"slack", r.bound->slack},
                        {"expectation", r.bound->expectation}};
        out["verdict"] = {{"passed", r.verdict->passed},
                          {"checked_rows", r.verdict->checked},
                          {"worst_ratio", r.verdict->worst_ratio}};
        out["verdict"]["first_violation"] =
            r.verdict->first_violation ? Json(*r.verdict->first_violation) : Json(nullptr);
    } else {
        out["bound"] = nullptr;
        out["verdict"] = nullptr;
    }
    if (r.fit)
        out["fit"] = {{"slope", r.fit->slope},
                      {"ci", {r.fit->ci_low, r.fit->ci_high}},
                      {"linear", r.fit->linear},
                      {"contraction", r.fit->contraction},
                      {"points", r.fit->points}};
    else
        out["fit"] = nullptr;
    out["extra"] = r.extra;
    out["wall_seconds"] = r.wall_seconds;
    return out;
}

void write_experiment(const ExperimentResult& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path d(dir);
    write_text_file((d / "trace.csv").string(), trace_csv(r.reported));
    write_text_file((d / "result.json").string(), result_to_json(r).dump(2) + "\n");
    if (r.runs.size() > 1) {
        const std::string column = r.bound ? (r.bound->quantity == "dist_sq" ? "dist_sq" : r.bound->quantity) : "gap";
        write_text_file((d / "replicates.csv").string(),
                        replicate_summary_csv(r.runs, r.replicate_seeds, column, "trace.csv"));
    }
    if (r.extra.contains("cut")) write_text_file((d / "cut.json").string(), r.extra.at("cut").dump(2) + "\n");
    if (r.extra.contains("lp")) write_text_file((d / "lp.json").string(), r.extra.at("lp").dump(2) + "\n");
}

std::string markdown_report(const std::vector<Json>& results) {
    std::string out =
        "| algorithm | problem | bound | rate verified | iterations | oracle calls | fitted slope |\n"
        "|---|---|---|---|---|---|---|\n";
    for (const Json& r : results) {
        std::string verified = "not checked", bound = "-";
        if (r.contains("bound") && r.at("bound").is_object()) {
            bound = r.at("bound").at("id").get<std::string>();
            const Json& v = r.at("verdict");
            if (v.at("passed").get<bool>())
                verified = "yes: " + r.at("bound").at("rate").get<std::string>();
            else
                verified = "no (violated at t = " + v.at("first_violation").dump() + ")";
        }
        std::string slope = "-";
        if (r.contains("fit") && r.at("fit").is_object()) {
            const Json& f = r.at("fit");
            char buf[64];
            if (f.at("linear").get<bool>())
                std::snprintf(buf, sizeof buf, "contraction %.4f", f.at("contraction").get<double>());
            else
                std::snprintf(buf, sizeof buf, "%.3f", f.at("slope").get<double>());
            slope = buf;
        }
        out += "| " + r.at("algorithm").get<std::string>() + " | " + r.at("problem").at("kind").get<std::string>() +
               " | " + bound + " | " + verified + " | " + r.at("iterations").dump() + " | " +
               r.at("oracle_calls").dump() + " | " + slope + " |\n";
    }
    return out;
}

std::vector<Json> collect_results(const std::string& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("no such directory: " + dir);
    std::vector<std::string> paths;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().filename() == "result.json") paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    std::vector<Json> out;
    for (const std::string& p : paths) out.push_back(read_json_file(p));
    return out;
}

// Brute-force optimum of min c^T x over {A x >= b}: every n-subset of rows is
// solved as equalities and the best feasible vertex kept.
double lp_vertex_optimum(const Mat& A, const Vec& b, const Vec& c) {
    const Eigen::Index m = A.rows(), n = A.cols();
    if (m < n) throw DomainError("fewer constraints than variables: the region has no vertex");
    std::vector<Eigen::Index> pick(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) pick[static_cast<std::size_t>(i)] = i;
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        Mat S(n, n);
        Vec r(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            S.row(i) = A.row(pick[static_cast<std::size_t>(i)]);
            r(i) = b(pick[static_cast<std::size_t>(i)]);
        }
        Eigen::FullPivLU<Mat> lu(S);
        if (lu.rank() == n) {
            const Vec x = lu.solve(r);
            if (((A * x - b).array() >= -1e-9).all()) best = std::min(best, c.dot(x));
        }
        Eigen::Index i = n - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - n + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (Eigen::Index j = i + 1; j < n; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    if (!std::isfinite(best)) throw EmptyInterior("no feasible vertex");
    return best;
}

}  // namespace convexkit
