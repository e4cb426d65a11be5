#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "convexkit/errors.hpp"
#include "convexkit/first_order.hpp"
#include "convexkit/mirror.hpp"
#include "convexkit/problems.hpp"
#include "convexkit/rng.hpp"

using namespace convexkit;

namespace {

Vec random_simplex_point(Eigen::Index n, Rng& rng) {
    Vec x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = -std::log(rng.uniform(1e-12, 1.0));
    return x / x.sum();
}

Vec random_density(Eigen::Index k, Rng& rng) {
    const Mat Q = random_orthogonal(k, rng);
    const Vec lam = random_simplex_point(k, rng);
    const Mat X = Q * lam.asDiagonal() * Q.transpose();
    return Eigen::Map<const Vec>(X.data(), X.size());
}

Vec flat(const Mat& X) { return Eigen::Map<const Vec>(X.data(), X.size()); }

double slope(const std::vector<double>& t, const std::vector<double>& v) {
    const double n = static_cast<double>(t.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double a = std::log(t[i]), b = std::log(v[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// f(x) = 1/2 ||x - p||^2 with p chosen so that the minimizer over the simplex
// sits on an edge with an active third coordinate.
FirstOrderOracle edge_quadratic() {
    Vec p(3);
    p << 0.8, 0.5, -0.6;
    FirstOrderOracle f(
        3, [p](const Vec& x) { return 0.5 * (x - p).squaredNorm(); }, [p](const Vec& x) { return Vec(x - p); });
    f.f_star = 0.2025;
    return f;
}

}  // namespace

TEST_CASE("mirror maps") {
    Rng rng(11);
    const MirrorMap ball = standard_mirror_map(MirrorKind::ball, 4);
    const MirrorMap simplex = standard_mirror_map(MirrorKind::simplex, 5);
    const MirrorMap spec = standard_mirror_map(MirrorKind::spectrahedron, 9);

    SUBCASE("constants") {
        CHECK(ball.rho() == 1.0);
        CHECK(ball.radius_sq() == doctest::Approx(0.5));
        CHECK(simplex.rho() == 1.0);
        CHECK(simplex.radius_sq() == doctest::Approx(std::log(5.0)));
        CHECK(spec.rho() == 0.5);
        CHECK(spec.radius_sq() == doctest::Approx(std::log(3.0)));
        CHECK((spec.initial_point() - flat(Mat::Identity(3, 3) / 3.0)).norm() < 1e-15);
        // the supremum of the potential is attained at a vertex
        CHECK(simplex.potential(Vec::Unit(5, 2)) - simplex.potential(simplex.initial_point()) ==
              doctest::Approx(simplex.radius_sq()));
    }
    SUBCASE("gradient map inversion") {
        for (int k = 0; k < 20; ++k) {
            const Vec th4 = rng.normal_vector(4), th5 = 3.0 * rng.normal_vector(5);
            Mat S = rng.normal_vector(9).reshaped(3, 3);
            S = symmetrize(S);
            CHECK((ball.gradient(ball.inverse_gradient(th4)) - th4).norm() <= 1e-8);
            CHECK((simplex.gradient(simplex.inverse_gradient(th5)) - th5).norm() <= 1e-8);
            CHECK((spec.gradient(spec.inverse_gradient(flat(S))) - flat(S)).norm() <= 1e-8);
        }
        CHECK_THROWS_AS(simplex.inverse_gradient(Vec::Constant(5, 1000.0)), GradientMapInversionFailure);
        CHECK_THROWS_AS(simplex.gradient(Vec::Unit(5, 0)), DomainError);
    }
    SUBCASE("Bregman divergence") {
        CHECK(bregman_divergence(simplex, simplex.initial_point(), simplex.initial_point()) == doctest::Approx(0.0));
        Vec e(4);
        e << 1, 0, 0, 0;
        CHECK(bregman_divergence(ball, e, Vec::Zero(4)) == doctest::Approx(0.5));
        const MirrorMap s2 = standard_mirror_map(MirrorKind::simplex, 2);
        Vec x(2), y(2);
        x << 0.5, 0.5;
        y << 0.25, 0.75;
        CHECK(bregman_divergence(s2, x, y) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)));
        CHECK_THROWS_AS(bregman_divergence(s2, x, Vec::Unit(2, 0)), DomainError);
        for (int k = 0; k < 200; ++k) {
            const Vec a = random_simplex_point(5, rng), b = random_simplex_point(5, rng);
            const double d = bregman_divergence(simplex, a, b);
            CHECK(d >= 0.5 * std::pow((a - b).lpNorm<1>(), 2) - 1e-12);
            const Vec A = random_density(3, rng), B = random_density(3, rng);
            CHECK(bregman_divergence(spec, A, B) >= 0.25 * std::pow(spec.norm(A - B), 2) - 1e-10);
            // the closed form agrees with the definition
            const double def = spec.potential(A) - spec.potential(B) - spec.gradient(B).dot(A - B);
            CHECK(bregman_divergence(spec, A, B) == doctest::Approx(def).epsilon(1e-9));
        }
    }
    SUBCASE("simplex projection is renormalization") {
        const MirrorMap s2 = standard_mirror_map(MirrorKind::simplex, 2);
        CHECK((s2.project(Vec::Constant(2, 0.2)) - Vec::Constant(2, 0.5)).norm() < 1e-15);
    }
    SUBCASE("Bregman projection optimality and Pythagoras") {
        const MirrorMap b3 = standard_mirror_map(MirrorKind::ball, 3);
        for (int k = 0; k < 100; ++k) {
            const Vec y = (rng.uniform(0.1, 3.0) * rng.normal_vector(5)).cwiseAbs() + Vec::Constant(5, 1e-3);
            const Vec p = simplex.project(y);
            const Vec x = random_simplex_point(5, rng);
            CHECK((simplex.gradient(p) - simplex.gradient(y)).dot(p - x) <= 1e-9);
            CHECK(bregman_divergence(simplex, x, p) + bregman_divergence(simplex, p, y) <=
                  bregman_divergence(simplex, x, y) + 1e-9);
            const Vec yb = 2.0 * rng.normal_vector(3);
            const Vec pb = b3.project(yb);
            const Vec xb = rng.uniform() * rng.unit_vector(3);
            CHECK((b3.gradient(pb) - b3.gradient(yb)).dot(pb - xb) <= 1e-9);
            CHECK(bregman_divergence(b3, xb, pb) + bregman_divergence(b3, pb, yb) <=
                  bregman_divergence(b3, xb, yb) + 1e-9);
        }
    }
    SUBCASE("ball step is a projected subgradient step") {
        for (int k = 0; k < 20; ++k) {
            const Vec x = 0.5 * rng.unit_vector(4), g = rng.normal_vector(4);
            CHECK((ball.step(x, g) - ball.set().project(x - g)).norm() < 1e-15);
        }
    }
    SUBCASE("diagonal spectrahedron reproduces the simplex") {
        const MirrorMap s3 = standard_mirror_map(MirrorKind::simplex, 3);
        const Vec x = random_simplex_point(3, rng), g = rng.normal_vector(3);
        const Vec X = flat(Mat(x.asDiagonal())), G = flat(Mat(g.asDiagonal()));
        const Mat Y = spec.step(X, G).reshaped(3, 3);
        CHECK((Y.diagonal() - s3.step(x, g)).norm() < 1e-12);
        CHECK((Mat(Y.diagonal().asDiagonal()) - Y).norm() < 1e-12);
        CHECK(spec.potential(X) == doctest::Approx(s3.potential(x)));
        CHECK(spec.dual_norm(G) == doctest::Approx(g.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("mirror descent") {
    SUBCASE("ball setup equals projected subgradient descent") {
        Rng rng(12);
        const Vec a = 2.0 * rng.unit_vector(3);
        FirstOrderOracle f(
            3, [a](const Vec& x) { return (x - a).norm(); },
            [a](const Vec& x) { return Vec((x - a) / (x - a).norm()); });
        auto set = std::make_shared<Ball>(3, 1.0);
        const MirrorMap map = standard_mirror_map(MirrorKind::ball, 3, set);
        const RunTrace md = run_mirror_descent(f, map, 0.05, 50);
        const RunTrace pgd =
            run_pgd_lipschitz(f, *set, 1.0, 1.0, 50, map.initial_point(), StepSchedule::constant_step(0.05));
        REQUIRE(md.rows.size() == pgd.rows.size());
        for (std::size_t i = 0; i < md.rows.size(); ++i) CHECK(md.rows[i].f_value == doctest::Approx(pgd.rows[i].f_value));
    }
    SUBCASE("linear objective gives multiplicative weights") {
        Vec c(4);
        c << 0.3, -0.2, 0.9, 0.1;
        FirstOrderOracle f(4, [c](const Vec& x) { return c.dot(x); }, [c](const Vec&) { return c; });
        const MirrorMap map = standard_mirror_map(MirrorKind::simplex, 4);
        const double eta = 0.1;
        Vec x = map.initial_point();
        for (long s = 1; s < 30; ++s) x = map.step(x, eta * c);
        Vec w = (-eta * 29.0 * c).array().exp().matrix();
        CHECK((x - w / w.sum()).norm() < 1e-12);
        const RunTrace tr = run_mirror_descent(f, map, eta, 30);
        CHECK(tr.x_last.isApprox(x, 1e-12));
    }
    SUBCASE("zero field is stationary") {
        const MirrorMap map = standard_mirror_map(MirrorKind::simplex, 6);
        const FieldRun run = run_mirror_descent_field([](long, const Vec& x) { return Vec(Vec::Zero(x.size())); }, map,
                                                      1.0, 20);
        for (const auto& x : run.points) CHECK((x - map.initial_point()).norm() == 0.0);
    }
    SUBCASE("entropic rate with l_inf bounded subgradients") {
        const Eigen::Index n = 1000;
        Rng rng(13);
        const Vec p = random_simplex_point(n, rng);
        FirstOrderOracle f(
            n, [p](const Vec& x) { return (x - p).lpNorm<1>(); },
            [p](const Vec& x) { return Vec((x - p).array().sign().matrix()); });
        f.f_star = 0.0;
        const MirrorMap map = standard_mirror_map(MirrorKind::simplex, n);
        for (long t : {100L, 400L, 1600L}) {
            const RunTrace tr = run_mirror_descent(f, map, mirror_descent_step(map, 1.0, t), t);
            const double bound = mirror_descent_bound(map, 1.0, t);
            CHECK(bound == doctest::Approx(std::sqrt(2.0 * std::log(1000.0) / t)));
            CHECK(tr.last().avg_gap <= bound);
            // the Euclidean guarantee with L = sqrt(n), R = sqrt(2) is far weaker
            CHECK(bound < std::sqrt(2.0 * n / t) / 5.0);
            CHECK(tr.x_last.minCoeff() > 0.0);
            CHECK(std::abs(tr.x_last.sum() - 1.0) <= 1e-12);
        }
    }
    SUBCASE("spectrahedron linear objective") {
        Rng rng(14);
        const Mat C = symmetrize(rng.normal_vector(16).reshaped(4, 4));
        const Vec c = flat(C);
        FirstOrderOracle f(16, [c](const Vec& x) { return c.dot(x); }, [c](const Vec&) { return c; });
        f.f_star = lambda_min(C);
        const MirrorMap map = standard_mirror_map(MirrorKind::spectrahedron, 16);
        const double L = map.dual_norm(c);
        const long t = 400;
        const RunTrace tr = run_mirror_descent(f, map, mirror_descent_step(map, L, t), t);
        CHECK(tr.last().avg_gap <= mirror_descent_bound(map, L, t));
        const Mat X = tr.x_last.reshaped(4, 4);
        CHECK(std::abs(X.trace() - 1.0) <= 1e-9);
        CHECK(lambda_min(X) >= -1e-9);
    }
    SUBCASE("regret bound for arbitrary fields") {
        const MirrorMap map = standard_mirror_map(MirrorKind::simplex, 2);
        // adversary pushes against the heavier coordinate
        const FieldSequence adversary = [](long, const Vec& x) {
            return Vec(x(0) >= 0.5 ? Vec::Unit(2, 0) : Vec(-Vec::Unit(2, 0)));
        };
        for (double eta : {0.01, 0.1, 0.5}) {
            const FieldRun md = run_mirror_descent_field(adversary, map, eta, 500);
            const FieldRun da = run_dual_averaging_field(adversary, map, eta, 500);
            for (int v = 0; v < 2; ++v) {
                const Vec x = Vec::Unit(2, v);
                CHECK(md.regret(x) <= map.radius_sq() / eta + eta / (2.0 * map.rho()) * md.dual_norm_sq_sum(map));
                CHECK(da.regret(x) <= map.radius_sq() / eta + 2.0 * eta / map.rho() * da.dual_norm_sq_sum(map));
            }
        }
    }
}

TEST_CASE("dual averaging") {
    SUBCASE("unconstrained ball setup is gradient descent on the running sum") {
        Rng rng(15);
        const MirrorMap map(MirrorKind::ball, std::make_shared<Unconstrained>(3));
        std::vector<Vec> gs;
        for (int s = 0; s < 10; ++s) gs.push_back(rng.normal_vector(3));
        const FieldRun run = run_dual_averaging_field([&](long s, const Vec&) { return gs[s - 1]; }, map, 0.3, 10);
        Vec x = Vec::Zero(3);
        for (int s = 0; s < 10; ++s) {
            CHECK((run.points[s] - x).norm() < 1e-14);
            x -= 0.3 * gs[s];
        }
    }
    SUBCASE("linear objective on the simplex concentrates on the best coordinate") {
        Vec c(3);
        c << 0.5, 0.2, 0.4;
        FirstOrderOracle f(3, [c](const Vec& x) { return c.dot(x); }, [c](const Vec&) { return c; });
        f.f_star = 0.2;
        const MirrorMap map = standard_mirror_map(MirrorKind::simplex, 3);
        const RunTrace tr = run_dual_averaging(f, map, 0.5, 200);
        // softmin of -eta (t - 1) c
        Vec w = (-0.5 * 199.0 * c).array().exp().matrix();
        CHECK((tr.x_last - w / w.sum()).norm() < 1e-12);
        CHECK(tr.x_last(1) > 1.0 - 1e-6);
    }
    SUBCASE("the point depends only on the gradient sum") {
        Rng rng(16);
        const MirrorMap map = standard_mirror_map(MirrorKind::simplex, 6);
        std::vector<Vec> gs;
        for (int s = 0; s < 12; ++s) gs.push_back(rng.normal_vector(6));
        std::vector<int> order(12);
        std::iota(order.begin(), order.end(), 0);
        Vec sum = Vec::Zero(6);
        for (int i : order) sum += gs[i];
        const Vec x = dual_averaging_point(map, sum, 0.2);
        for (int k = 0; k < 10; ++k) {
            std::shuffle(order.begin(), order.end(), rng.engine());
            Vec perm = Vec::Zero(6);
            for (int i : order) perm += gs[i];
            CHECK((dual_averaging_point(map, perm, 0.2) - x).norm() < 1e-12);
        }
    }
    SUBCASE("rate with the theorem step") {
        const Eigen::Index n = 200;
        Rng rng(17);
        const Vec p = random_simplex_point(n, rng);
        FirstOrderOracle f(
            n, [p](const Vec& x) { return (x - p).lpNorm<1>(); },
            [p](const Vec& x) { return Vec((x - p).array().sign().matrix()); });
        f.f_star = 0.0;
        const MirrorMap map = standard_mirror_map(MirrorKind::simplex, n);
        for (long t : {50L, 500L}) {
            const RunTrace tr = run_dual_averaging(f, map, dual_averaging_step(map, 1.0, t), t);
            CHECK(tr.last().avg_gap <= dual_averaging_bound(map, 1.0, t));
        }
    }
}

TEST_CASE("mirror prox") {
    SUBCASE("smooth quadratic on the simplex meets the bound at every step") {
        Rng rng(18);
        const Mat A = rng.normal_vector(40).reshaped(8, 5);
        const Vec b = rng.normal_vector(8);
        const Mat AtA = A.transpose() * A;
        FirstOrderOracle f(
            5, [A, b](const Vec& x) { return 0.5 * (A * x - b).squaredNorm(); },
            [A, b](const Vec& x) { return Vec(A.transpose() * (A * x - b)); });
        // reference optimum by projected gradient descent
        Simplex sx(5);
        Vec z = Vec::Constant(5, 0.2);
        const double Lg = lambda_max(AtA);
        for (int k = 0; k < 20000; ++k) z = sx.project(z - (AtA * z - A.transpose() * b) / Lg);
        f.f_star = f.evaluate(z);
        const double beta = AtA.cwiseAbs().maxCoeff();  // l1 -> l_inf smoothness
        const MirrorMap map = standard_mirror_map(MirrorKind::simplex, 5);
        const RunTrace tr = run_mirror_prox(f, map, mirror_prox_step(map, beta), 500);
        for (const auto& row : tr.rows) CHECK(row.avg_gap <= mirror_prox_bound(map, beta, row.iter) + 1e-12);
        CHECK(f.first_calls() == 1000);
    }
    SUBCASE("zero field is stationary") {
        const MirrorMap map = standard_mirror_map(MirrorKind::simplex, 4);
        const FieldRun run = run_mirror_prox_field([](const Vec& x) { return Vec(Vec::Zero(x.size())); }, map, 1.0, 5);
        for (const auto& y : run.points) CHECK((y - map.initial_point()).norm() == 0.0);
    }
    SUBCASE("field regret bound") {
        // bilinear game field on the simplex of (x, y) is monotone and Lipschitz
        Mat B(3, 3);
        B << 0, 1, -2, -1, 0, 3, 2, -3, 0;  // skew-symmetric
        const MirrorMap map = standard_mirror_map(MirrorKind::simplex, 3);
        const double beta = B.cwiseAbs().maxCoeff();
        const auto field = [B](const Vec& x) { return Vec(B * x); };
        const FieldRun run = run_mirror_prox_field(field, map, map.rho() / beta, 300);
        for (int v = 0; v < 3; ++v)
            CHECK(run.regret(Vec::Unit(3, v)) <= beta * map.radius_sq() / map.rho() + 1e-9);
    }
    SUBCASE("rates: 1/t for mirror prox against 1/sqrt(t) for mirror descent") {
        FirstOrderOracle f = edge_quadratic();
        const MirrorMap map = standard_mirror_map(MirrorKind::simplex, 3);
        const double beta = 1.0, L = 1.5;
        const std::vector<long> ts = {100, 400, 1600, 6400};
        std::vector<double> t_md, gap_md, t_mp, gap_mp;
        const RunTrace mp = run_mirror_prox(f, map, mirror_prox_step(map, beta), ts.back());
        for (long t : ts) {
            const RunTrace md = run_mirror_descent(f, map, mirror_descent_step(map, L, t), t);
            t_md.push_back(static_cast<double>(t));
            gap_md.push_back(md.last().avg_gap);
            t_mp.push_back(static_cast<double>(t));
            gap_mp.push_back(mp.rows[static_cast<std::size_t>(t - 1)].avg_gap);
        }
        const double smd = slope(t_md, gap_md), smp = slope(t_mp, gap_mp);
        MESSAGE("mirror descent slope " << smd << ", mirror prox slope " << smp);
        CHECK(smd >= -0.65);
        CHECK(smd <= -0.35);
        CHECK(smp >= -1.15);
        CHECK(smp <= -0.85);
    }
}
