#include <doctest.h>

#include <cmath>

#include "convexkit/errors.hpp"
#include "convexkit/interior_point.hpp"
#include "convexkit/rng.hpp"
#include "lp_oracle.hpp"

using namespace convexkit;

namespace {

Barrier box_barrier(const Vec& lo, const Vec& hi) {
    const Eigen::Index n = lo.size();
    Mat A = Mat::Zero(2 * n, n);
    Vec b(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(2 * i, i) = 1.0;
        A(2 * i + 1, i) = -1.0;
        b(2 * i) = lo(i);
        b(2 * i + 1) = -hi(i);
    }
    return log_barrier_polytope(A, b);
}

Vec fd_gradient(const Barrier& F, const Vec& x, double h) {
    Vec g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const Vec e = h * Vec::Unit(x.size(), i);
        g(i) = (F.value(x + e) - F.value(x - e)) / (2.0 * h);
    }
    return g;
}

Mat fd_hessian(const Barrier& F, const Vec& x, double h) {
    Mat H(x.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const Vec e = h * Vec::Unit(x.size(), i);
        H.col(i) = (F.gradient(x + e) - F.gradient(x - e)) / (2.0 * h);
    }
    return H;
}

// Random point of {A x >= b} by shrinking a random direction toward the origin.
Vec interior_sample(Rng& rng, const Mat& A, const Vec& b) {
    Vec x = 0.9 * rng.uniform() * rng.unit_vector(A.cols());
    while (!((A * x - b).array() > 0.0).all()) x *= 0.5;
    return x;
}

Vec random_pd_svec(Rng& rng, Eigen::Index n) {
    const Mat G = Mat::NullaryExpr(n, n, [&] { return rng.normal(); });
    return svec(G * G.transpose() / static_cast<double>(n) + 0.3 * Mat::Identity(n, n));
}

}  // namespace

TEST_CASE("log barriers: closed forms against finite differences") {
    SUBCASE("unit interval: minimizer one half") {
        const Barrier F = box_barrier(Vec::Zero(1), Vec::Ones(1));
        CHECK(F.nu == 2.0);
        const NewtonRun r = analytic_center(F, Vec::Constant(1, 0.9));
        CHECK(r.x(0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(F.value(Vec::Constant(1, 0.5)) == doctest::Approx(2.0 * std::log(2.0)));
        CHECK(std::isinf(F.value(Vec::Constant(1, 1.5))));
    }
    SUBCASE("-log x: decrement of F is 1 everywhere") {
        const Barrier F = log_barrier_polytope(Mat::Ones(1, 1), Vec::Zero(1));
        for (const double x : {1e-3, 0.5, 1.0, 7.0, 1e4})
            CHECK(newton_decrement(F, Vec::Zero(1), 0.0, Vec::Constant(1, x)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("random polytopes") {
        Rng rng(7);
        for (int rep = 0; rep < 10; ++rep) {
            const auto lp = lp_oracle::random_lp(rng, 4, 12);
            const Barrier F = log_barrier_polytope(lp.A, lp.b);
            CHECK(F.nu == 12.0);
            for (int k = 0; k < 5; ++k) {
                const Vec x = interior_sample(rng, lp.A, lp.b);
                const Mat H = F.hessian(x);
                CHECK((H - fd_hessian(F, x, 1e-6)).cwiseAbs().maxCoeff() <= 1e-5 * (1.0 + H.cwiseAbs().maxCoeff()));
                CHECK((F.gradient(x) - fd_gradient(F, x, 1e-6)).norm() <= 1e-5 * (1.0 + F.gradient(x).norm()));
                CHECK(lambda_min(H) > 0.0);
                CHECK(exp_concavity_margin(F, x) >= -1e-9 * lambda_max(H));
                // barrier property along a ray to the boundary
                const Vec d = rng.unit_vector(4);
                double s_max = 1e300;
                const Vec ad = lp.A * d, slack = lp.A * x - lp.b;
                for (Eigen::Index i = 0; i < ad.size(); ++i)
                    if (ad(i) < 0.0) s_max = std::min(s_max, -slack(i) / ad(i));
                double prev = F.value(x + 0.5 * s_max * d);
                for (const double frac : {0.9, 0.99, 0.999999, 1.0 - 1e-12}) {
                    const double v = F.value(x + frac * s_max * d);
                    CHECK(v > prev);
                    prev = v;
                }
                CHECK(prev > F.value(x) + 20.0);
            }
        }
    }
    SUBCASE("log det over symmetric matrices") {
        Rng rng(11);
        for (const Eigen::Index n : {1, 2, 3, 4}) {
            const Barrier F = log_det_barrier(n);
            CHECK(F.nu == static_cast<double>(n));
            CHECK(F.dim == n * (n + 1) / 2);
            const Vec x = random_pd_svec(rng, n);
            const Mat X = smat(x);
            CHECK((smat(svec(X)) - X).norm() <= 1e-14);
            const Mat Y = smat(random_pd_svec(rng, n));
            CHECK(svec(X).dot(svec(Y)) == doctest::Approx((X * Y).trace()).epsilon(1e-12));
            CHECK(F.value(x) == doctest::Approx(-std::log(X.determinant())).epsilon(1e-10));
            const Mat H = F.hessian(x);
            CHECK((H - fd_hessian(F, x, 1e-6)).cwiseAbs().maxCoeff() <= 1e-5 * (1.0 + H.cwiseAbs().maxCoeff()));
            CHECK((F.gradient(x) - fd_gradient(F, x, 1e-6)).norm() <= 1e-5 * (1.0 + F.gradient(x).norm()));
            CHECK(exp_concavity_margin(F, x) >= -1e-9 * lambda_max(H));
            CHECK_FALSE(F.in_domain(svec(-Mat::Identity(n, n))));
        }
    }
    SUBCASE("sums and affine restrictions") {
        const Barrier F = box_barrier(Vec::Zero(2), Vec::Ones(2));
        const Barrier S = sum_barriers(F, F);
        CHECK(S.nu == 8.0);
        const Vec x = (Vec(2) << 0.3, 0.6).finished();
        CHECK(S.value(x) == doctest::Approx(2.0 * F.value(x)));
        // restriction to the diagonal x = (s, s)
        const Mat N = Vec::Ones(2) / std::sqrt(2.0);
        const Barrier R = restrict_to_affine(F, Vec::Zero(2), N);
        const Vec z = Vec::Constant(1, 0.4 * std::sqrt(2.0));
        CHECK(R.value(z) == doctest::Approx(F.value(Vec::Constant(2, 0.4))));
        CHECK((R.hessian(z) - fd_hessian(R, z, 1e-6)).norm() <= 1e-5 * (1.0 + R.hessian(z).norm()));
        const AffineParametrization P = affine_parametrization(Mat::Ones(1, 3), Vec::Ones(1));
        CHECK(P.N.cols() == 2);
        CHECK((P.N.transpose() * P.N - Mat::Identity(2, 2)).norm() <= 1e-12);
        CHECK((Mat::Ones(1, 3) * P.N).norm() <= 1e-12);
        CHECK(P.x0.sum() == doctest::Approx(1.0));
        Mat Aeq(2, 2);
        Aeq << 1, 1, 2, 2;
        CHECK_THROWS_AS(affine_parametrization(Aeq, Vec::Ones(2)), EmptyInterior);
    }
}

TEST_CASE("Newton decrement") {
    const Barrier logx = log_barrier_polytope(Mat::Ones(1, 1), Vec::Zero(1));
    SUBCASE("zero on the central path") {
        for (const double t : {0.1, 1.0, 25.0})
            CHECK(newton_decrement(logx, Vec::Ones(1), t, Vec::Constant(1, 1.0 / t)) <= 1e-14);
        const Barrier F = box_barrier(-Vec::Ones(3), Vec::Ones(3));
        CHECK(newton_decrement(F, Vec::Ones(3), 0.0, Vec::Zero(3)) <= 1e-14);
    }
    SUBCASE("outside the domain") {
        CHECK_THROWS_AS(newton_decrement(logx, Vec::Ones(1), 1.0, Vec::Constant(1, -1.0)), NotStrictlyFeasible);
    }
    SUBCASE("update identity on the box LP") {
        const Barrier F = box_barrier(Vec::Zero(3), Vec::Ones(3));
        const Vec c = (Vec(3) << 1.0, -0.5, 2.0).finished();
        for (const double t : {0.5, 3.0, 40.0}) {
            const Vec xt = damped_newton_minimize(F, c, t, Vec::Constant(3, 0.5), 1e-14).x;
            for (const double tp : {t * 1.01, t * 1.3, t * 3.0}) {
                const double lhs = newton_decrement(F, c, tp, xt);
                CHECK(lhs == doctest::Approx((tp - t) * local_dual_norm(F, xt, c)).epsilon(1e-9));
            }
        }
    }
    SUBCASE("shift bound off the path") {
        Rng rng(3);
        const auto lp = lp_oracle::random_lp(rng, 3, 10);
        const Barrier F = log_barrier_polytope(lp.A, lp.b);
        for (int k = 0; k < 50; ++k) {
            const Vec x = interior_sample(rng, lp.A, lp.b);
            const double t = rng.uniform(0.01, 10.0), tp = t * rng.uniform(1.0, 3.0);
            const double bound = (tp / t) * newton_decrement(F, lp.c, t, x) + (tp / t - 1.0) * std::sqrt(F.nu);
            CHECK(newton_decrement(F, lp.c, tp, x) <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("damped Newton") {
    SUBCASE("quadratic decay from decrement 1/4") {
        // F_t(x) = t x - log x has decrement |t x - 1|
        const Barrier logx = log_barrier_polytope(Mat::Ones(1, 1), Vec::Zero(1));
        const NewtonRun r = damped_newton_minimize(logx, Vec::Ones(1), 2.0, Vec::Constant(1, 1.25 / 2.0), 1e-15);
        REQUIRE(r.decrements.size() >= 3);
        CHECK(r.decrements[0] == doctest::Approx(0.25));
        CHECK(r.decrements[1] <= 0.125);
        CHECK(r.decrements[2] <= 0.03125);
        CHECK(r.x(0) == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("start at the minimizer") {
        const Barrier F = box_barrier(Vec::Zero(2), Vec::Ones(2));
        const NewtonRun r = analytic_center(F, Vec::Constant(2, 0.5));
        CHECK(r.steps == 0);
        CHECK(r.decrements.size() == 1);
    }
    SUBCASE("analytic center with row multiplicities") {
        // lower row repeated p times, upper q times: the 1-d center solves
        // -p/(x - l) + q/(u - x) = 0, found here by bisection
        Rng rng(5);
        const Eigen::Index n = 4;
        std::vector<Eigen::Index> p(n), q(n);
        Vec lo(n), hi(n);
        Eigen::Index rows = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            p[static_cast<std::size_t>(i)] = 1 + static_cast<Eigen::Index>(rng.index(3));
            q[static_cast<std::size_t>(i)] = 1 + static_cast<Eigen::Index>(rng.index(3));
            lo(i) = rng.uniform(-2.0, 0.0);
            hi(i) = lo(i) + rng.uniform(0.5, 3.0);
            rows += p[static_cast<std::size_t>(i)] + q[static_cast<std::size_t>(i)];
        }
        Mat A = Mat::Zero(rows, n);
        Vec b(rows);
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < p[static_cast<std::size_t>(i)]; ++k, ++r) {
                A(r, i) = 1.0;
                b(r) = lo(i);
            }
            for (Eigen::Index k = 0; k < q[static_cast<std::size_t>(i)]; ++k, ++r) {
                A(r, i) = -1.0;
                b(r) = -hi(i);
            }
        }
        const Barrier F = log_barrier_polytope(A, b);
        const Vec start = lo + 0.05 * (hi - lo);
        const NewtonRun run = analytic_center(F, start, 1e-13);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double pi = static_cast<double>(p[static_cast<std::size_t>(i)]);
            const double qi = static_cast<double>(q[static_cast<std::size_t>(i)]);
            double a = lo(i), z = hi(i);
            for (int k = 0; k < 200; ++k) {
                const double mid = 0.5 * (a + z);
                if (-pi / (mid - lo(i)) + qi / (hi(i) - mid) >= 0.0) {
                    z = mid;
                } else {
                    a = mid;
                }
            }
            CHECK(run.x(i) == doctest::Approx(0.5 * (a + z)).epsilon(1e-10));
        }
        // quadratic decay once inside the region
        for (std::size_t k = 0; k + 1 < run.decrements.size(); ++k)
            if (run.decrements[k] <= 0.25) CHECK(run.decrements[k + 1] <= 2.0 * run.decrements[k] * run.decrements[k]);
        CHECK(run.decrements.front() > 0.25);
    }
    SUBCASE("no minimizer and step cap") {
        const Barrier logx = log_barrier_polytope(Mat::Ones(1, 1), Vec::Zero(1));
        CHECK_THROWS_AS(analytic_center(logx, Vec::Ones(1)), EmptyInterior);
        const Barrier F = box_barrier(Vec::Zero(2), Vec::Ones(2));
        CHECK_THROWS_AS(damped_newton_minimize(F, Vec::Zero(2), 0.0, Vec::Constant(2, 1e-6), 1e-12, 2), MaxIterations);
    }
}

TEST_CASE("path following") {
    SUBCASE("min x over [0, 1]") {
        const Barrier F = box_barrier(Vec::Zero(1), Vec::Ones(1));
        const Vec c = Vec::Ones(1);
        const PathStart st = path_follow_init(F, c, Vec::Constant(1, 0.8));
        CHECK(newton_decrement(F, c, st.t0, st.x0) <= 0.25);
        const double eps = 1e-8;
        const PathRun run = path_follow(F, c, st.x0, st.t0, eps, 0.0);
        for (const auto& s : run.states) {
            CHECK(s.x(0) <= 2.0 * F.nu / s.t);
            CHECK(s.decrement <= 0.25);
        }
        CHECK(run.x(0) <= eps);
        CHECK(run.trace.rows.size() == run.states.size());
        // outer step count against the schedule
        const long k = static_cast<long>(run.states.size()) - 1;
        const long need = path_steps_needed(F.nu, st.t0, eps);
        CHECK(std::abs(k - need) <= 2);
        CHECK(static_cast<double>(k) <= (1.0 + 13.0 * std::sqrt(F.nu)) * std::log(2.0 * F.nu / (st.t0 * eps)) + 1.0);
    }
    SUBCASE("random LPs against vertex enumeration") {
        Rng rng(2024);
        for (int rep = 0; rep < 8; ++rep) {
            const auto lp = lp_oracle::random_lp(rng, 5, 12);
            const double opt = lp_oracle::vertex_optimum(lp.A, lp.b, lp.c);
            const Barrier F = log_barrier_polytope(lp.A, lp.b);
            const PathStart st = path_follow_init(F, lp.c, Vec::Zero(5));
            const double eps = 1e-7;
            const PathRun run = path_follow(F, lp.c, st.x0, st.t0, eps, opt);
            const double sqnu = std::sqrt(F.nu);
            for (std::size_t k = 0; k < run.states.size(); ++k) {
                const auto& s = run.states[k];
                CHECK(lp.c.dot(s.x) - opt <= 2.0 * F.nu / s.t + 1e-12);
                CHECK(s.decrement <= 0.25);
                if (k + 1 < run.states.size()) {
                    const double r = run.states[k + 1].t / s.t;
                    CHECK(r == doctest::Approx(path_growth(F.nu)).epsilon(1e-14));
                    CHECK(newton_decrement(F, lp.c, run.states[k + 1].t, s.x) <= r * s.decrement + (r - 1.0) * sqnu + 1e-12);
                }
            }
            CHECK(lp.c.dot(run.x) - opt <= eps);
            CHECK(lp.c.dot(run.x) - opt >= -1e-9);
            CHECK(run.gap_bound <= eps);
        }
    }
    SUBCASE("bad start or understated nu") {
        const Barrier F = box_barrier(Vec::Zero(2), Vec::Ones(2));
        CHECK_THROWS_AS(path_follow(F, Vec::Ones(2), Vec::Constant(2, 0.01), 10.0, 1e-6), InvariantBroken);
        Barrier G = F;
        G.nu = 1e-4;
        const PathStart st = path_follow_init(F, Vec::Ones(2), Vec::Constant(2, 0.5));
        CHECK_THROWS_AS(path_follow(G, Vec::Ones(2), st.x0, st.t0, 1e-6), InvariantBroken);
    }
}

TEST_CASE("backward initialization") {
    SUBCASE("from the analytic center the iterate never moves") {
        const Barrier F = box_barrier(Vec::Zero(3), Vec::Ones(3));
        const Vec c = (Vec(3) << 3.0, -1.0, 2.0).finished();
        const PathStart st = path_follow_init(F, c, Vec::Constant(3, 0.5));
        CHECK(st.backward_steps > 0);
        for (const auto& s : st.backward) CHECK((s.x - Vec::Constant(3, 0.5)).norm() <= 1e-14);
        CHECK(newton_decrement(F, c, st.t0, st.x0) <= 0.25);
        // the handoff parameter is the first t' below 1/(4 ||c||*)
        CHECK(st.t0 * local_dual_norm(F, st.x0, c) <= 0.25);
        CHECK(st.t0 / (1.0 - 1.0 / (13.0 * std::sqrt(F.nu))) * local_dual_norm(F, st.x0, c) > 0.25);
    }
    SUBCASE("skewed start on a box") {
        Rng rng(9);
        const Vec lo = -Vec::Ones(4), hi = (Vec(4) << 1.0, 3.0, 0.5, 10.0).finished();
        const Barrier F = box_barrier(lo, hi);
        for (int rep = 0; rep < 5; ++rep) {
            Vec y0(4);
            for (Eigen::Index i = 0; i < 4; ++i) y0(i) = lo(i) + (hi(i) - lo(i)) * (rep % 2 ? 1e-4 : 1.0 - 1e-3);
            const Vec c = rng.normal_vector(4);
            const PathStart st = path_follow_init(F, c, y0);
            // independent handoff check from the closed-form gradient and Hessian
            Vec g(4), h(4);
            for (Eigen::Index i = 0; i < 4; ++i) {
                const double a = st.x0(i) - lo(i), z = hi(i) - st.x0(i);
                g(i) = st.t0 * c(i) - 1.0 / a + 1.0 / z;
                h(i) = 1.0 / (a * a) + 1.0 / (z * z);
            }
            CHECK(std::sqrt((g.array().square() / h.array()).sum()) <= 0.25);
            const double shrink = 1.0 - 1.0 / (13.0 * std::sqrt(F.nu));
            for (std::size_t k = 0; k + 1 < st.backward.size(); ++k) {
                CHECK(st.backward[k + 1].t / st.backward[k].t == doctest::Approx(shrink).epsilon(1e-14));
                CHECK(st.backward[k + 1].decrement <= 0.25);
            }
            CHECK(shrink == doctest::Approx(2.0 - path_growth(F.nu)).epsilon(1e-14));
        }
    }
    SUBCASE("infeasible start") {
        const Barrier F = box_barrier(Vec::Zero(1), Vec::Ones(1));
        CHECK_THROWS_AS(path_follow_init(F, Vec::Ones(1), Vec::Constant(1, 2.0)), NotStrictlyFeasible);
    }
}

TEST_CASE("LP solver") {
    SUBCASE("random LPs with phase I") {
        Rng rng(31);
        for (int rep = 0; rep < 10; ++rep) {
            const Eigen::Index n = 2 + rep % 5, m = 2 * n + 1 + static_cast<Eigen::Index>(rng.index(3));
            auto lp = lp_oracle::random_lp(rng, n, m);
            // move the region away from the origin so that phase I has work to do
            const Vec shift = 3.0 * rng.unit_vector(n);
            lp.b += lp.A * shift;
            const double opt = lp_oracle::vertex_optimum(lp.A, lp.b, lp.c);
            const LpResult res = solve_lp(lp, 1e-8);
            CHECK(res.phase_one_steps > 0);
            CHECK(res.value - opt <= 1e-8);
            CHECK(res.value - opt >= -1e-9);
            CHECK(res.gap_bound <= 1e-8);
            CHECK(((lp.A * res.x - lp.b).array() > 0.0).all());
        }
    }
    SUBCASE("given start skips phase I") {
        Rng rng(4);
        const auto lp = lp_oracle::random_lp(rng, 3, 8);
        const LpResult res = solve_lp(lp, 1e-8, Vec::Zero(3));
        CHECK(res.phase_one_steps == 0);
        CHECK(res.value == doctest::Approx(lp_oracle::vertex_optimum(lp.A, lp.b, lp.c)).epsilon(1e-7));
        CHECK_THROWS_AS(solve_lp(lp, 1e-8, Vec::Constant(3, 5.0)), NotStrictlyFeasible);
    }
    SUBCASE("equality constraints: the simplex") {
        LinearProgram lp;
        lp.A = Mat::Identity(4, 4);
        lp.b = Vec::Zero(4);
        lp.c = (Vec(4) << 0.3, -0.2, 0.9, -0.1).finished();
        lp.A_eq = Mat::Ones(1, 4);
        lp.b_eq = Vec::Ones(1);
        const LpResult res = solve_lp(lp, 1e-9);
        CHECK(res.value == doctest::Approx(-0.2).epsilon(1e-8));
        CHECK(res.x.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(res.x(1) == doctest::Approx(1.0).epsilon(1e-7));
    }
    SUBCASE("empty interior") {
        LinearProgram lp;
        lp.A = (Mat(2, 1) << 1.0, -1.0).finished();
        lp.c = Vec::Ones(1);
        lp.b = (Vec(2) << 1.0, 0.0).finished();  // x >= 1 and x <= 0
        CHECK_THROWS_AS(solve_lp(lp, 1e-6), EmptyInterior);
        lp.b = (Vec(2) << 0.0, 0.0).finished();  // the single point x = 0
        CHECK_THROWS_AS(solve_lp(lp, 1e-6), EmptyInterior);
    }
}

TEST_CASE("log det barrier on the spectrahedron with diagonal data") {
    // min <C, X> over {X psd, tr X = 1} equals min_i C_ii for diagonal C
    for (const Eigen::Index n : {2, 3, 4}) {
        Vec diag(n);
        for (Eigen::Index i = 0; i < n; ++i) diag(i) = std::cos(1.0 + 2.0 * static_cast<double>(i));
        const Barrier F = log_det_barrier(n);
        const AffineParametrization P = affine_parametrization(svec(Mat::Identity(n, n)).transpose(), Vec::Ones(1));
        const Barrier R = restrict_to_affine(F, P.x0, P.N);
        CHECK(R.nu == static_cast<double>(n));
        const Vec c = P.N.transpose() * svec(Mat(diag.asDiagonal()));
        const Vec z0 = P.N.transpose() * (svec(Mat::Identity(n, n) / static_cast<double>(n)) - P.x0);
        const PathStart st = path_follow_init(R, c, z0);
        const PathRun run = path_follow(R, c, st.x0, st.t0, 1e-8);
        const Mat X = smat(P.x0 + P.N * run.x);
        CHECK(X.trace() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((X.diagonal().dot(diag)) - diag.minCoeff() <= 1e-8);
        CHECK((X.diagonal().dot(diag)) - diag.minCoeff() >= -1e-12);
        for (const auto& s : run.states) CHECK(s.decrement <= 0.25);
    }
}
