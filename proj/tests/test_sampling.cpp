#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "convexkit/errors.hpp"
#include "convexkit/problems.hpp"
#include "convexkit/sampling.hpp"

using namespace convexkit;

namespace {

Mat complete_graph(Eigen::Index n) { return Mat::Ones(n, n) - Mat::Identity(n, n); }

double min_eig(const Mat& M) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(M, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

// Random PSD matrix with unit diagonal (normalized Gram matrix).
Mat random_correlation(Eigen::Index n, Rng& rng) {
    Mat G(n, n + 2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n + 2; ++j) G(i, j) = rng.normal();
    for (Eigen::Index i = 0; i < n; ++i) G.row(i).normalize();
    return symmetrize(G * G.transpose());
}

}  // namespace

TEST_CASE("hit-and-run on a ball") {
    auto ball = std::make_shared<Ball>(3, 2.0);
    double lo, hi;
    const Vec x = Vec::Constant(3, 0.3);
    const Vec d = Vec::Unit(3, 0);
    REQUIRE(ball->chord(x, d, lo, hi));
    CHECK((x + lo * d).norm() == doctest::Approx(2.0));
    CHECK((x + hi * d).norm() == doctest::Approx(2.0));
    BodySampler s(ball, Vec::Zero(3), Rng(1));
    s.burn_in(default_burn_in(3));
    Vec mean = Vec::Zero(3);
    double r2 = 0.0;
    const long N = 100000;
    for (long k = 0; k < N; ++k) {
        const Vec& y = s.step();
        REQUIRE(ball->contains(y, 1e-9));
        mean += y;
        r2 += y.squaredNorm();
    }
    mean /= N;
    // uniform on the ball of radius 2 in dimension 3: E||x||^2 = 3/5 * 4
    CHECK(mean.norm() < 0.05);
    CHECK(r2 / N == doctest::Approx(2.4).epsilon(0.02));
}

TEST_CASE("hit-and-run moments on a box") {
    auto box = std::make_shared<Box>(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
    BodySampler s(box, Vec::Zero(2), Rng(2));
    s.burn_in(default_burn_in(2));
    const long N = 100000;
    Vec m1 = Vec::Zero(2), m2 = Vec::Zero(2);
    for (long k = 0; k < N; ++k) {
        const Vec& y = s.step();
        REQUIRE(box->contains(y, 1e-9));
        m1 += y;
        m2 += y.cwiseProduct(y);
    }
    m1 /= N;
    m2 /= N;
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(m1(i)) <= 0.02);
        CHECK(std::abs(m2(i) - 1.0 / 3.0) <= 0.02);
    }
}

TEST_CASE("hit-and-run falls back to membership bisection") {
    // the l1 ball has no closed-form chord
    auto l1 = std::make_shared<L1Ball>(2, 1.0);
    BodySampler s(l1, Vec::Zero(2), Rng(3));
    s.burn_in(1000);
    const long N = 50000;
    double m2 = 0.0;
    for (long k = 0; k < N; ++k) {
        const Vec& y = s.step();
        REQUIRE(l1->contains(y, 1e-9));
        m2 += y(0) * y(0);
    }
    // uniform on the unit l1 ball in the plane: E x^2 = 1/6
    CHECK(std::abs(m2 / N - 1.0 / 6.0) <= 0.02);
}

TEST_CASE("degenerate chord") {
    auto box = std::make_shared<Box>(Vec::Constant(2, 0.0), Vec::Constant(2, 1e-14));
    BodySampler s(box, Vec::Constant(2, 5e-15), Rng(4));
    CHECK_THROWS_AS(s.step(), DegenerateChord);
}

TEST_CASE("isotropic whitening") {
    Rng rng(5);
    SUBCASE("isotropic Gaussian cloud") {
        std::vector<Vec> xs;
        for (int k = 0; k < 20000; ++k) xs.push_back(rng.normal_vector(4));
        const IsotropicEstimate est = isotropic_whiten(xs);
        CHECK((est.whitening - Mat::Identity(4, 4)).norm() < 0.1);
    }
    SUBCASE("anisotropic cloud") {
        std::vector<Vec> xs;
        for (int k = 0; k < 20000; ++k) {
            Vec x = rng.normal_vector(2);
            x(1) *= 10.0;
            xs.push_back(x + Vec::Constant(2, 3.0));
        }
        const IsotropicEstimate est = isotropic_whiten(xs);
        const CovarianceRange r = whitened_covariance_range(est, xs);
        CHECK(r.min_eig == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.max_eig == doctest::Approx(1.0).epsilon(1e-9));
        Vec m = Vec::Zero(2);
        for (const auto& x : xs) m += est.whiten(x);
        CHECK(m.norm() / xs.size() < 1e-10);
        // fresh batch lands near isotropy
        std::vector<Vec> fresh;
        for (int k = 0; k < 5000; ++k) {
            Vec x = rng.normal_vector(2);
            x(1) *= 10.0;
            fresh.push_back(x + Vec::Constant(2, 3.0));
        }
        const CovarianceRange f = whitened_covariance_range(est, fresh);
        CHECK(f.min_eig > 0.9);
        CHECK(f.max_eig < 1.1);
    }
    SUBCASE("rank deficiency") {
        std::vector<Vec> xs(2, Vec::Zero(3));
        CHECK_THROWS_AS(isotropic_whiten(xs), RankDeficient);
        std::vector<Vec> line;
        for (int k = 0; k < 10; ++k) line.push_back(Vec::Constant(3, rng.normal()));
        CHECK_THROWS_AS(isotropic_whiten(line), RankDeficient);
    }
}

TEST_CASE("cut through an estimated centroid") {
    Rng rng(6);
    // the cube [-sqrt 3, sqrt 3]^3 is in isotropic position
    const double a = std::sqrt(3.0);
    std::vector<Vec> xs;
    for (int k = 0; k < 20000; ++k) {
        Vec x(3);
        for (int i = 0; i < 3; ++i) x(i) = rng.uniform(-a, a);
        xs.push_back(x);
    }
    for (int k = 0; k < 20; ++k) {
        const Vec w = rng.unit_vector(3);
        const CutRetention c0 = cut_retention_check(xs, Vec::Zero(3), w);
        CHECK(c0.threshold == doctest::Approx(1.0 / std::numbers::e));
        CHECK(c0.passed);
        const Vec z = 0.1 * rng.unit_vector(3);
        const CutRetention c1 = cut_retention_check(xs, z, w);
        CHECK(c1.threshold == doctest::Approx(1.0 / std::numbers::e - 0.1));
        CHECK(c1.passed);
    }
    const CutRetention miss = cut_retention_check(xs, Vec::Constant(3, 10.0), Vec::Constant(3, 1.0));
    CHECK(miss.fraction == 1.0);
    CHECK(miss.passed);
}

TEST_CASE("Gaussian sampling") {
    Rng rng(7);
    SUBCASE("correlated pair") {
        Mat S(2, 2);
        S << 1.0, 0.9, 0.9, 1.0;
        const Mat F = psd_factor(S);
        CHECK((F * F.transpose() - S).norm() < 1e-14);
        Mat C = Mat::Zero(2, 2);
        const int N = 100000;
        for (int k = 0; k < N; ++k) {
            const Vec x = gaussian_sample_factor(F, rng);
            C += x * x.transpose();
        }
        C /= N;
        CHECK((C - S).operatorNorm() <= 0.05 * S.operatorNorm());
        CHECK(C(0, 1) / std::sqrt(C(0, 0) * C(1, 1)) == doctest::Approx(0.9).epsilon(0.01));
    }
    SUBCASE("rank one") {
        const Vec v = Vec::LinSpaced(3, 1.0, 3.0);
        const Mat S = v * v.transpose();
        for (int k = 0; k < 100; ++k) {
            const Vec x = gaussian_sample(S, rng);
            CHECK((x - v * (v.dot(x) / v.squaredNorm())).norm() < 1e-10 * std::max(1.0, x.norm()));
        }
    }
    SUBCASE("not PSD") {
        Mat S = Mat::Identity(2, 2);
        S(1, 1) = -1.0;
        CHECK_THROWS_AS(psd_factor(S), NotPSD);
    }
}

TEST_CASE("MAXCUT relaxation") {
    SUBCASE("single edge") {
        const Mat L = graph_laplacian(complete_graph(2));
        const SdpResult r = sdp_relax_maxcut(L);
        CHECK(r.X(0, 1) == doctest::Approx(-1.0).epsilon(1e-6));
        CHECK(r.value == doctest::Approx(4.0).epsilon(1e-6));
        CHECK(brute_force_max_quadratic(L).value == 4.0);
    }
    SUBCASE("triangle") {
        const Mat L = graph_laplacian(complete_graph(3));
        CHECK((L * Vec::Ones(3)).norm() == 0.0);
        CHECK(brute_force_max_quadratic(L).value == 8.0);
        const SdpResult r = sdp_relax_maxcut(L);
        CHECK(r.value >= 8.0);
        CHECK(r.value == doctest::Approx(9.0).epsilon(1e-5));
        for (int i = 0; i < 3; ++i) CHECK(r.X(i, i) == 1.0);
        CHECK(min_eig(r.X) >= -1e-8);
    }
    SUBCASE("dominance on random graphs") {
        Rng rng(8);
        for (int rep = 0; rep < 5; ++rep) {
            Mat A = Mat::Zero(9, 9);
            for (int i = 0; i < 9; ++i)
                for (int j = i + 1; j < 9; ++j) A(i, j) = A(j, i) = rng.uniform() < 0.5 ? 1.0 : 0.0;
            const Mat L = graph_laplacian(A);
            const SdpResult r = sdp_relax_maxcut(L);
            CHECK(r.value >= brute_force_max_quadratic(L).value);
            CHECK(min_eig(r.X) >= -1e-8);
            CHECK((r.X.diagonal() - Vec::Ones(9)).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
    SUBCASE("invalid weights") {
        Mat A = complete_graph(3);
        A(0, 1) = -1.0;
        A(1, 0) = -1.0;
        CHECK_THROWS_AS(graph_laplacian(A), DomainError);
    }
}

TEST_CASE("sign rounding") {
    SUBCASE("triangle") {
        const Mat L = graph_laplacian(complete_graph(3));
        const SdpResult r = sdp_relax_maxcut(L);
        const RoundingResult g = gw_round(r.X, L, 10000, 9);
        CHECK(g.mean_value >= 0.878 * 8.0 - 3.0 * g.std_error);
        CHECK(g.best_value == 8.0);
    }
    SUBCASE("independent signs") {
        const RoundingResult g = sign_round(Mat::Identity(4, 4), Mat::Identity(4, 4), 20000, 10);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                if (i == j) CHECK(g.sign_correlation(i, j) == 1.0);
                else CHECK(std::abs(g.sign_correlation(i, j)) < 3.0 / std::sqrt(20000.0) * 1.5);
            }
    }
    SUBCASE("arcsin identity") {
        Rng rng(11);
        const Mat S = random_correlation(5, rng);
        const long N = 20000;
        const RoundingResult g = sign_round(S, Mat::Identity(5, 5), N, 12);
        const Mat expected = arcsin_correlation(S);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                const double p = expected(i, j);
                const double se = std::sqrt(std::max(1.0 - p * p, 1e-12) / N);
                CHECK(std::abs(g.sign_correlation(i, j) - p) <= 3.0 * se + 1e-12);
            }
    }
    SUBCASE("arcsin dominance") {
        Rng rng(13);
        for (int rep = 0; rep < 50; ++rep) {
            const Mat S = random_correlation(2 + rep % 9, rng);
            const Mat D = arcsin_correlation(S) * (std::numbers::pi / 2.0) - S;
            CHECK(min_eig(D) >= -1e-8);
        }
    }
    SUBCASE("PSD quadratics") {
        const Mat I = Mat::Identity(6, 6);
        CHECK(psd_quadratic_round(I, I, 100, 14).mean_value == 6.0);
        const Mat J = Mat::Ones(6, 6);
        const SdpResult rj = sdp_relax_maxcut(J);
        const RoundingResult gj = psd_quadratic_round(J, rj.X, 10000, 15);
        CHECK(gj.mean_value >= 2.0 / std::numbers::pi * 36.0 - 3.0 * gj.std_error);
        Rng rng(16);
        Mat G(8, 8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) G(i, j) = rng.normal();
        const Mat B = symmetrize(G * G.transpose());
        const SdpResult rb = sdp_relax_maxcut(B);
        const RoundingResult gb = psd_quadratic_round(B, rb.X, 10000, 17);
        const double opt = brute_force_max_quadratic(B).value;
        CHECK(rb.value >= opt);
        CHECK(gb.mean_value >= 2.0 / std::numbers::pi * opt - 3.0 * gb.std_error);
    }
}
