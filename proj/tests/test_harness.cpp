#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "convexkit/errors.hpp"
#include "convexkit/first_order.hpp"
#include "convexkit/harness.hpp"

using namespace convexkit;

namespace {

Json quadratic_gd_config(long horizon = 100) {
    return Json::parse(R"({"problem": {"kind": "quadratic", "params": {"dim": 20, "alpha": 0.0, "beta": 1.0}, "seed": 7},
                           "algorithm": {"id": "gd_smooth"}, "horizon": )" +
                       std::to_string(horizon) + "}");
}

RunTrace synthetic(const std::function<double(long)>& gap, long n) {
    RunTrace tr;
    for (long t = 1; t <= n; ++t) {
        TraceRow r;
        r.iter = t;
        r.gap = r.avg_gap = gap(t);
        tr.rows.push_back(r);
    }
    return tr;
}

}  // namespace

TEST_CASE("check_bound") {
    SUBCASE("gradient descent on a quadratic passes 2 beta R^2 / (t - 1)") {
        const ExperimentResult r = run_experiment(parse_config(quadratic_gd_config()));
        REQUIRE(r.verdict);
        CHECK(r.verdict->passed);
        CHECK(r.bound->id == "gd_smooth");
        CHECK(r.verdict->checked == 99);  // t = 1 is outside the bound's range
        CHECK(std::isinf(r.reported.rows.front().bound_value));
        for (const TraceRow& row : r.reported.rows) CHECK(row.bound_satisfied == 1);
    }
    SUBCASE("a halved curve fails at the first violating row") {
        const ExperimentConfig c = parse_config(quadratic_gd_config());
        const ProblemInstance p = build_problem(c.problem);
        FirstOrderOracle f = *p.f;
        RunTrace tr = run_gd_smooth(f, 100, p.x1);
        const BoundSpec full = bounds::gd_smooth(p.at("beta"), p.at("dist_sq"));
        BoundSpec tight = full;
        const double ratio = check_bound(tr, full).worst_ratio;
        REQUIRE(ratio > 0.0);
        // scale so the curve sits just below the worst row
        tight.curve = [full, ratio](long t) { return 0.5 * ratio * full(t); };
        const BoundVerdict v = check_bound(tr, tight);
        CHECK_FALSE(v.passed);
        REQUIRE(v.first_violation);
        long expected = -1;
        for (const TraceRow& row : tr.rows)
            if (row.iter >= 2 && row.gap > 0.5 * ratio * full(row.iter)) {
                expected = row.iter;
                break;
            }
        CHECK(*v.first_violation == expected);
        CHECK(tr.rows[static_cast<std::size_t>(expected - 1)].bound_satisfied == 0);

        BoundSpec halved = full;
        halved.curve = [full](long t) { return 0.5 * full(t); };
        RunTrace bad = synthetic([&](long t) { return t >= 2 ? 0.75 * full(t) : 1.0; }, 20);
        const BoundVerdict hv = check_bound(bad, halved);
        CHECK_FALSE(hv.passed);
        CHECK(*hv.first_violation == 2);
        CHECK(check_bound(bad, full).passed);
    }
    SUBCASE("SP-MP duality gap passes without a known optimum") {
        const ExperimentResult r = run_experiment(parse_config(Json::parse(
            R"({"problem": {"kind": "matrix_game", "params": {"rows": 10, "cols": 10}, "seed": 4},
                "algorithm": {"id": "sp_mp"}, "horizon": 500})")));
        CHECK(r.verdict->passed);
        CHECK(r.verdict->checked == 500);
        CHECK(r.bound->quantity == "avg_gap");
    }
    SUBCASE("no optimum and no surrogate") {
        RunTrace tr = synthetic([](long) { return std::numeric_limits<double>::quiet_NaN(); }, 10);
        CHECK_THROWS_AS(check_bound(tr, bounds::agd_smooth(1.0, 1.0)), MissingOptimum);
        // an LP without a reference optimum has no gap column either
        const Json lp = Json::parse(R"({"problem": {"kind": "lp", "params": {"dim": 10, "constraints": 20}, "seed": 1},
                                        "algorithm": {"id": "ipm"}, "horizon": 1})");
        CHECK_THROWS_AS(run_experiment(parse_config(lp)), MissingOptimum);
    }
    SUBCASE("ensemble mode compares the seed mean") {
        std::vector<RunTrace> runs = {synthetic([](long t) { return 2.0 / t; }, 20),
                                      synthetic([](long t) { return 0.2 / t; }, 20)};
        BoundSpec b = bounds::agd_smooth(1.0, 1.0);
        b.curve = [](long t) { return 1.2 / t; };
        const EnsembleCheck e = check_bound(runs, b);
        CHECK(e.verdict.passed);  // mean 1.1 / t
        CHECK(e.mean.rows[4].gap == doctest::Approx(1.1 / 5));
        CHECK_FALSE(check_bound(runs[0], b).passed);
    }
    SUBCASE("horizon-tuned bounds only cover the horizon") {
        const BoundSpec b = bounds::pgd_lipschitz(1.0, 1.0, 100);
        CHECK_FALSE(b.covers(99));
        CHECK(b.covers(100));
        CHECK(b(100) == doctest::Approx(0.1));
    }
}

TEST_CASE("fit_rate") {
    std::vector<double> t, inv, geo, bad;
    for (int k = 1; k <= 50; ++k) {
        t.push_back(k);
        inv.push_back(3.0 / k);
        geo.push_back(5.0 * std::pow(0.9, k));
        bad.push_back(k == 30 ? 0.0 : 1.0 / k);
    }
    const RateFit a = fit_rate(t, inv);
    CHECK(std::abs(a.slope + 1.0) <= 0.01);
    CHECK(a.ci_low <= a.slope);
    CHECK(a.ci_high >= a.slope);
    CHECK(a.points == 50);
    const RateFit b = fit_rate(t, geo, true);
    CHECK(std::abs(b.contraction - 0.9) <= 0.001);
    CHECK_THROWS_AS(fit_rate(t, bad), NonPositiveGap);
    CHECK_THROWS_AS(fit_rate(std::vector<double>(t.begin(), t.begin() + 9),
                             std::vector<double>(inv.begin(), inv.begin() + 9)),
                    DomainError);

    const RunTrace tr = synthetic([](long s) { return 1.0 / (static_cast<double>(s) * s); }, 100);
    CHECK(std::abs(fit_rate(tr, "gap", 50).slope + 2.0) <= 0.01);
    CHECK_THROWS_AS(fit_rate(tr, "gap", 200), DomainError);

    SUBCASE("FISTA on LASSO") {
        const Json j = Json::parse(R"({"problem": {"kind": "lasso", "params": {"lambda": 0.0001}, "seed": 9},
                                       "algorithm": {"id": "fista"}, "horizon": 300})");
        const ExperimentResult r = run_experiment(parse_config(j));
        REQUIRE(r.fit);
        MESSAGE("FISTA slope " << r.fit->slope);
        CHECK(r.fit->slope >= -2.3);
        CHECK(r.fit->slope <= -1.7);
        CHECK(r.verdict->passed);
    }
}

TEST_CASE("configuration errors") {
    const auto rejects = [](const std::string& text) {
        CHECK_THROWS_AS(parse_config(Json::parse(text)), ConfigError);
    };
    const std::string ok = R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "gd_smooth"}, "horizon": 10})";
    CHECK_NOTHROW(parse_config(Json::parse(ok)));
    rejects(R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "gd_smooth"}, "horizon": 10, "extra": 1})");
    rejects(R"({"problem": {"kind": "quadratic", "size": 3}, "algorithm": {"id": "gd_smooth"}, "horizon": 10})");
    rejects(R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "gd_smooth", "step": 1}, "horizon": 10})");
    rejects(R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "no_such"}, "horizon": 10})");
    rejects(R"({"problem": {"kind": "no_such"}, "algorithm": {"id": "gd_smooth"}, "horizon": 10})");
    rejects(R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "gd_smooth"}, "horizon": -1})");
    rejects(R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "gd_smooth"}, "horizon": 2.5})");
    rejects(R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "gd_smooth"}})");
    rejects(R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "gd_smooth"}, "horizon": 10, "seeds": 0})");
    rejects(R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "fista"}, "horizon": 10})");
    rejects(R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "gd_smooth"}, "horizon": 10,
                "bound": {"id": "fista"}})");
    rejects(R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "gd_smooth"}, "horizon": 10,
                "bound": {"slack": 0.5}})");
    rejects(R"([1, 2])");
    CHECK_THROWS_AS(parse_json("{\"problem\": ", "bad.json"), ParseError);

    // parameters are validated when the experiment is built
    const auto fails_at_run = [](const std::string& text) {
        CHECK_THROWS_AS(run_experiment(parse_config(Json::parse(text))), ConfigError);
    };
    fails_at_run(R"({"problem": {"kind": "quadratic", "params": {"dimension": 3}}, "algorithm": {"id": "gd_smooth"},
                     "horizon": 10})");
    fails_at_run(R"({"problem": {"kind": "quadratic", "params": {"dim": "3"}}, "algorithm": {"id": "gd_smooth"},
                     "horizon": 10})");
    fails_at_run(R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "agd", "params": {"variant": "x"}},
                     "horizon": 10})");
    fails_at_run(R"({"problem": {"kind": "quadratic"}, "algorithm": {"id": "agd", "params": {"momentum": 1}},
                     "horizon": 10})");
    fails_at_run(R"({"problem": {"kind": "ridge", "params": {"kappa": 1e9}}, "algorithm": {"id": "svrg"},
                     "horizon": 2})");
}

TEST_CASE("determinism and oracle accounting") {
    const ExperimentConfig c = parse_config(quadratic_gd_config(50));
    CHECK(trace_csv(run_experiment(c).reported) == trace_csv(run_experiment(c).reported));

    const Json sgd = Json::parse(R"({"problem": {"kind": "svm", "seed": 6}, "algorithm": {"id": "sgd_strongly"},
                                     "horizon": 200, "seeds": 8})");
    const ExperimentResult a = run_experiment(parse_config(sgd));
    const ExperimentResult b = run_experiment(parse_config(sgd));
    CHECK(trace_csv(a.reported) == trace_csv(b.reported));
    CHECK(a.runs.size() == 8);
    CHECK(a.bound->slack == doctest::Approx(1.1));
    CHECK(trace_csv(a.runs[0]) != trace_csv(a.runs[1]));

    // reported oracle calls equal the counters of an independent run
    const ProblemInstance p = build_problem(c.problem);
    FirstOrderOracle f = *p.f;
    f.reset_counters();
    run_gd_smooth(f, 50, p.x1);
    CHECK(run_experiment(c).oracle_calls == f.first_calls() + f.zeroth_calls());
}

TEST_CASE("problem instances") {
    for (const CatalogEntry& e : algorithm_catalog()) {
        CHECK_FALSE(e.family.empty());
        CHECK_FALSE(e.bounds.empty());
        for (const std::string& kind : e.problems) {
            bool listed = false;
            for (const CatalogEntry& pe : problem_catalog()) listed = listed || pe.id == kind;
            CHECK_MESSAGE(listed, kind);
        }
        for (const std::string& id : e.bounds) {
            bool listed = false;
            for (const CatalogEntry& be : bound_catalog()) listed = listed || be.id == id;
            CHECK_MESSAGE(listed, id);
        }
    }
    const ProblemInstance q = build_problem(problem_spec_from_json(Json::parse(
        R"({"kind": "quadratic", "params": {"dim": 6, "alpha": 0.5, "beta": 2.0, "set": "ball", "opt_norm": 0.3}, "seed": 1})")));
    CHECK(q.f->evaluate_subgradient(*q.f->x_star).norm() < 1e-10);
    CHECK(q.f->x_star->norm() == doctest::Approx(0.3));
    CHECK(q.at("kappa") == doctest::Approx(4.0));
    CHECK_THROWS_AS(q.at("sigma"), ConfigError);

    const ProblemInstance lp = build_problem(problem_spec_from_json(Json::parse(
        R"({"kind": "lp", "params": {"A": [[1, 0], [0, 1], [-1, -1]], "b": [0, 0, -1], "c": [-1, -2]}})")));
    CHECK(lp.at("optimum") == doctest::Approx(-2.0));
    CHECK(lp_vertex_optimum(lp.lp->A, lp.lp->b, lp.lp->c) == doctest::Approx(-2.0));

    const ProblemInstance g = build_problem(problem_spec_from_json(
        Json::parse(R"({"kind": "graph", "params": {"edges": [[0, 1, 2.0], [1, 2, 1.0]]}})")));
    CHECK(g.graph->rows() == 3);
    CHECK((*g.graph)(1, 0) == 2.0);
}

TEST_CASE("input and output formats") {
    SUBCASE("matrix CSV") {
        const Mat A = parse_matrix_csv("1, 2,3\n\n4,5,6.5\n");
        CHECK(A.rows() == 2);
        CHECK(A(1, 2) == 6.5);
        CHECK_THROWS_AS(parse_matrix_csv("1,2\n3\n"), ParseError);
        CHECK_THROWS_AS(parse_matrix_csv("1,x\n"), ParseError);
        CHECK_THROWS_AS(parse_matrix_csv(""), ParseError);
    }
    SUBCASE("graph edge list") {
        const Mat W = parse_graph_csv("i,j,w\n0,1,1.5\n2,1,2\n0,1,0.5\n");
        CHECK(W.rows() == 3);
        CHECK(W(0, 1) == 2.0);
        CHECK(W(1, 2) == 2.0);
        CHECK(W.isApprox(W.transpose()));
        CHECK_THROWS_AS(parse_graph_csv("0,0,1\n"), DomainError);
        CHECK_THROWS_AS(parse_graph_csv("0,1,-1\n"), DomainError);
        CHECK_THROWS_AS(parse_graph_csv("0,1,1\nfoo\n"), ParseError);
        CHECK_THROWS_AS(parse_graph_csv("0.5,1,1\n"), ParseError);
    }
    SUBCASE("LP JSON") {
        const LinearProgram lp = lp_from_json(Json::parse(R"({"A": [[1, 0], [0, 1]], "b": [0, 0], "c": [1, 1]})"));
        CHECK(lp.A.rows() == 2);
        CHECK(lp.c(1) == 1.0);
        CHECK_THROWS_AS(lp_from_json(Json::parse(R"({"A": [[1, 0]], "b": [0], "c": [1, 1], "d": 1})")), ParseError);
        CHECK_THROWS_AS(lp_from_json(Json::parse(R"({"A": [[1, 0], [1]], "b": [0, 0], "c": [1, 1]})")), ParseError);
        CHECK_THROWS_AS(lp_from_json(Json::parse(R"({"A": [[1, 0]], "b": [0, 1], "c": [1, 1]})")), DimensionMismatch);
        CHECK_THROWS_AS(lp_from_json(Json::parse(R"({"A": [[1, 0]], "b": [0], "c": ["1", 1]})")), ParseError);
    }
    SUBCASE("cut and trace formats") {
        Vec s(4);
        s << 1, -1, -1, 1;
        const Json cut = cut_to_json(s, 3.0);
        CHECK(cut.at("partition") == "1001");
        CHECK(cut.at("value") == 3.0);
        CHECK(format_double(0.1) == "0.10000000000000001");
        CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
        RunTrace tr = synthetic([](long t) { return 1.0 / t; }, 2);
        tr.rows[0].bound_satisfied = 1;
        const std::string csv = trace_csv(tr);
        CHECK(csv.rfind("iter,f_value,gap,avg_gap,bound_value,bound_satisfied,oracle_zeroth,oracle_first\n", 0) == 0);
        CHECK(csv.find(",true,") != std::string::npos);
        CHECK(csv.find(",,0,0\n") != std::string::npos);  // unchecked row
    }
}

TEST_CASE("results and reports") {
    const auto dir = std::filesystem::temp_directory_path() / "convexkit_test_harness";
    std::filesystem::remove_all(dir);
    const ExperimentResult pass = run_experiment(parse_config(quadratic_gd_config(30)));
    write_experiment(pass, (dir / "a").string());
    CHECK(std::filesystem::exists(dir / "a" / "trace.csv"));
    CHECK(read_text_file((dir / "a" / "trace.csv").string()) == trace_csv(pass.reported));

    // a failing check must not be reported as a verified rate
    ExperimentConfig c = parse_config(quadratic_gd_config(30));
    ExperimentResult fail = run_experiment(c);
    BoundSpec b = *fail.bound;
    const BoundSpec orig = b;
    b.curve = [orig](long t) { return 1e-6 * orig(t); };
    fail.verdict = check_bound(fail.reported, b);
    fail.bound = b;
    REQUIRE_FALSE(fail.verdict->passed);
    write_experiment(fail, (dir / "b").string());

    const std::vector<Json> results = collect_results(dir.string());
    REQUIRE(results.size() == 2);
    const std::string md = markdown_report(results);
    CHECK(md.find("| algorithm | problem | bound | rate verified | iterations | oracle calls | fitted slope |") == 0);
    CHECK(md.find("yes: 2 beta R^2 / (t - 1)") != std::string::npos);
    CHECK(md.find("no (violated at t = 2)") != std::string::npos);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(collect_results(dir.string()), ConfigError);
}
