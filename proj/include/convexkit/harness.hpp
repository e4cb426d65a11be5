#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "convexkit/composite_saddle.hpp"
#include "convexkit/interior_point.hpp"
#include "convexkit/io.hpp"
#include "convexkit/mirror.hpp"
#include "convexkit/stochastic.hpp"
#include "convexkit/trace.hpp"

namespace convexkit {

// A closed-form guarantee t -> bound(t) compared against one trace column.
// Rows outside [t_min, t_max] carry no claim (the bound is +inf there).
struct BoundSpec {
    std::string id;
    std::string rate;  // the rate as a formula, e.g. "2 beta R^2 / (t - 1)"
    std::function<double(long)> curve;
    std::string quantity = "gap";  // trace column: gap, avg_gap or dist_sq
    bool expectation = false;      // holds for the mean over seeds
    double slack = 1.0;
    long t_min = 1;
    std::optional<long> t_max;  // horizon-tuned steps only cover the horizon
    bool linear = false;        // geometric rate (fit log gap against t)

    double operator()(long t) const { return curve(t); }
    bool covers(long t) const { return t >= t_min && (!t_max || t <= *t_max); }
};

// Closed-form guarantees, one per result; constants as in the statements.
namespace bounds {
BoundSpec pgd_lipschitz(double R, double L, long t);                 // R L / sqrt(t), at t
BoundSpec gd_smooth(double beta, double dist_sq);                    // 2 beta ||x1 - x*||^2 / (t - 1)
BoundSpec pgd_smooth(double beta, double dist_sq, double gap1);      // (3 beta ||x1 - x*||^2 + gap1) / t
BoundSpec frank_wolfe(double beta, double R);                        // 2 beta R^2 / (t + 1), t >= 2
BoundSpec pgd_strongly_lipschitz(double L, double alpha);            // 2 L^2 / (alpha (t + 1))
BoundSpec pgd_strongly_smooth(double kappa, double dist_sq);         // ||x_t - x*||^2 <= e^{-(t-1)/kappa} d1
BoundSpec gd_strongly_unconstrained(double beta, double kappa, double dist_sq);  // beta/2 e^{-4(t-1)/(kappa+1)} d1
BoundSpec agd_smooth(double beta, double dist_sq);                   // 2 beta ||x1 - x*||^2 / t^2
BoundSpec agd_strongly(double alpha, double beta, double dist_sq);   // (alpha + beta)/2 d1 e^{-(t-1)/sqrt(kappa)}
BoundSpec ellipsoid(double B, double R, double r, Eigen::Index n);   // 2 B R / r e^{-t/(2 n^2)}
BoundSpec mirror_descent(const MirrorMap& map, double L, long t);
BoundSpec dual_averaging(const MirrorMap& map, double L, long t);
BoundSpec mirror_prox(const MirrorMap& map, double beta);
BoundSpec ista(double beta, double dist_sq);
BoundSpec fista(double beta, double dist_sq);
BoundSpec sp_md(const SaddleProblem& p, long t);
BoundSpec sp_mp(const SaddleProblem& p);
// 2 nu / t_k along a recorded path (t_k indexed by the row's iter).
BoundSpec ipm_certificate(double nu, std::vector<double> t_values);
BoundSpec smd(const MirrorMap& map, double B, long t);
BoundSpec sgd_strongly(double B, double alpha);
BoundSpec smd_smooth(const MirrorMap& map, double sigma, double beta, long t);
// Checked at iteration t / batch, the last one.
BoundSpec minibatch(const MirrorMap& map, double B, double beta, long batch, long t);
BoundSpec svrg(double gap1);  // row s: 0.9^{s-1} gap1
BoundSpec rcd(double R_sq, double beta_power_sum);
BoundSpec rcd_strongly(double kappa_gamma, double gap1);  // row s: (1 - 1/kappa)^{s-1} gap1
BoundSpec s_sp_md(const SaddleProblem& p, double B_x, double B_y, long t);
}  // namespace bounds

struct BoundVerdict {
    bool passed = true;
    std::optional<long> first_violation;  // iter of the first violating row
    long checked = 0;                     // rows the bound covered
    double worst_ratio = 0.0;             // max over covered rows of value / (slack bound)
};

// Value of a trace row for a bound quantity.
double row_quantity(const TraceRow& row, const std::string& quantity);

// PASS iff value(t) <= slack bound(t) on every covered row. Annotates
// bound_value (the unslacked curve, +inf outside the covered range) and
// bound_satisfied. Throws MissingOptimum when no covered row has a value.
BoundVerdict check_bound(RunTrace& trace, const BoundSpec& bound);

// Row-wise mean over replicates of equal length; oracle counters and
// iteration indices come from the first replicate.
RunTrace ensemble_mean(const std::vector<RunTrace>& runs);

struct EnsembleCheck {
    RunTrace mean;
    BoundVerdict verdict;
};
EnsembleCheck check_bound(const std::vector<RunTrace>& runs, const BoundSpec& bound);

// Least-squares fit of log gap against log t (polynomial rates) or against t
// (linear rates, with contraction = exp(slope)). The interval is slope +-
// 1.96 standard errors.
struct RateFit {
    double slope = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool linear = false;
    double contraction = 0.0;
    std::size_t points = 0;
};
// Throws DomainError with fewer than 10 points and NonPositiveGap for gaps <= 0.
RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& gap, bool linear = false);
// Fit over the trailing window rows of a trace column.
RateFit fit_rate(const RunTrace& trace, const std::string& column, std::size_t window, bool linear = false);

// A problem instance document {"kind": string, "params": {...}, "seed": int}.
struct ProblemSpec {
    std::string kind;
    Json params = Json::object();
    std::uint64_t seed = 0;
};
ProblemSpec problem_spec_from_json(const Json& j);
Json problem_spec_to_json(const ProblemSpec& spec);

// Everything an algorithm may need, built deterministically from the spec.
// meta holds the constants the guarantees use (R, L, beta, alpha, B, ...).
struct ProblemInstance {
    ProblemSpec spec;
    std::optional<FirstOrderOracle> f;
    SetPtr set;
    Vec x1;
    std::optional<MirrorMap> map;
    std::optional<CompositeProblem> composite;
    std::optional<SaddleProblem> saddle;
    std::optional<LinearProgram> lp;
    std::optional<FiniteSum> finite_sum;
    std::optional<CoordinateProblem> coordinate;
    std::optional<Mat> graph;
    Mat matrix;  // problem data some guarantees need (RCD Hessian)
    // Unbiased gradient sampler of f, for problems with a natural one.
    std::function<Vec(const Vec&, Rng&)> sampler;
    std::map<std::string, double> meta;

    double at(const std::string& key) const;  // throws ConfigError when absent
};
// Throws ConfigError for unknown kinds, unknown or invalid parameters.
ProblemInstance build_problem(const ProblemSpec& spec);

// Optimal value of min c^T x over {A x >= b} by enumerating vertices; for
// small dimensions only. Throws EmptyInterior when no vertex is feasible.
double lp_vertex_optimum(const Mat& A, const Vec& b, const Vec& c);

struct CatalogEntry {
    std::string id;
    std::string family;  // tag used by suite filters
    std::string description;
    std::vector<std::string> problems;  // problem kinds (algorithms only)
    std::vector<std::string> bounds;    // admissible bound ids, the first is the default
};
const std::vector<CatalogEntry>& problem_catalog();
const std::vector<CatalogEntry>& algorithm_catalog();
const std::vector<CatalogEntry>& bound_catalog();

struct ExperimentConfig {
    ProblemSpec problem;
    std::string algorithm;
    Json params = Json::object();
    long horizon = 0;
    long seeds = 1;
    std::string bound_id;         // empty: the algorithm's default; "none": no check
    std::optional<double> slack;  // default 1.0, or 1.1 for expectation bounds
    std::string source;           // config path, for reports
};
// Throws ConfigError on schema violations (unknown keys included).
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);

struct ExperimentResult {
    ExperimentConfig config;
    std::string family;
    std::vector<RunTrace> runs;
    std::vector<std::uint64_t> replicate_seeds;
    RunTrace reported;  // the single run, or the ensemble mean
    std::optional<BoundSpec> bound;
    std::optional<BoundVerdict> verdict;
    std::optional<RateFit> fit;
    long oracle_calls = 0;  // summed over replicates
    double wall_seconds = 0.0;
    Json extra = Json::object();  // algorithm-specific output (cut, LP certificate)
};
ExperimentResult run_experiment(const ExperimentConfig& config);

Json result_to_json(const ExperimentResult& r);
// trace.csv, result.json, and replicates.csv / cut.json / lp.json when relevant.
void write_experiment(const ExperimentResult& r, const std::string& dir);

// Markdown table: algorithm, problem, bound, rate verified, iterations,
// oracle calls, fitted slope. A rate is claimed only for passing checks.
std::string markdown_report(const std::vector<Json>& results);
// All result.json files below dir, sorted by path.
std::vector<Json> collect_results(const std::string& dir);

}  // namespace convexkit
