#include "convexkit/cutting_plane.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "convexkit/errors.hpp"
#include "convexkit/sampling.hpp"

namespace convexkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// ---------------------------------------------------------------- ellipsoid

double Ellipsoid::log_det() const {
    Eigen::LLT<Mat> llt(shape);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("ellipsoid shape");
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Ellipsoid ellipsoid_update(const Ellipsoid& E, const Vec& w) {
    const Eigen::Index n = E.center.size();
    if (w.size() != n) throw DimensionMismatch("cut vector dimension");
    if (w.cwiseAbs().maxCoeff() == 0.0) throw ZeroCutVector("cut vector is zero");
    const Vec Hw = E.shape * w;
    const double wHw = w.dot(Hw);
    if (!(wHw > 0.0)) throw NotPositiveDefinite("w^T H w is not positive");
    Ellipsoid out;
    if (n == 1) {
        const double half = std::sqrt(E.shape(0, 0));
        out.center = E.center - Vec::Constant(1, (w(0) > 0 ? 0.5 : -0.5) * half);
        out.shape = E.shape / 4.0;
        return out;
    }
    const double nd = static_cast<double>(n);
    out.center = E.center - Hw / ((nd + 1.0) * std::sqrt(wHw));
    out.shape = symmetrize((nd * nd / (nd * nd - 1.0)) * (E.shape - (2.0 / (nd + 1.0)) * (Hw * Hw.transpose()) / wHw));
    return out;
}

std::string CutTrace::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "iter,feasible_flag,best_value,log_volume_proxy,oracle_calls\n";
    for (const auto& s : steps)
        os << s.iter << ',' << (s.feasible ? 1 : 0) << ',' << s.best_value << ',' << s.log_volume << ','
           << s.oracle_calls << '\n';
    return os.str();
}

CutTrace run_ellipsoid(const ConstraintSet& set, FirstOrderOracle* f, double R, double r, long budget) {
    const Eigen::Index n = set.dim();
    if (!(R > 0) || !(r > 0) || r > R) throw DomainError("need 0 < r <= R");
    CutTrace tr;
    tr.algorithm = "ellipsoid";
    tr.best_value = kInf;
    Ellipsoid E{Vec::Zero(n), R * R * Mat::Identity(n, n)};
    double logdet = E.log_det();
    long calls = 0;
    for (long t = 0; t < budget; ++t) {
        CutStep step;
        step.iter = t;
        step.query = E.center;
        ++calls;
        const auto sep = set.separate(E.center);
        if (sep) {
            step.cut = *sep;
        } else {
            step.feasible = true;
            if (!f) {
                tr.best_point = E.center;
                tr.best_value = 0.0;
                step.best_value = 0.0;
                step.log_volume = logdet;
                step.oracle_calls = calls;
                tr.steps.push_back(step);
                return tr;
            }
            step.value = f->value(E.center);
            step.cut = f->subgradient(E.center);
            ++calls;
            if (step.value < tr.best_value) {
                tr.best_value = step.value;
                tr.best_point = E.center;
            }
        }
        step.best_value = tr.best_value;
        step.log_volume = logdet;
        step.oracle_calls = calls;
        tr.steps.push_back(step);
        if (step.cut.cwiseAbs().maxCoeff() == 0.0) break;  // zero subgradient: the center is optimal
        // Below the volume of the r-ball no r-ball fits in the localizer.
        if (!tr.best_point && logdet < 2.0 * static_cast<double>(n) * std::log(r))
            throw BudgetExhaustedInfeasible("localizer volume fell below the r-ball after " + std::to_string(t + 1) +
                                            " steps");
        try {
            E = ellipsoid_update(E, step.cut);
            if ((t + 1) % 50 == 0) cholesky(E.shape);
        } catch (const NotPositiveDefinite&) {
            if (tr.best_point) break;  // shape exhausted double precision
            throw;
        }
        const double next = E.log_det();
        if (next > logdet - 1.0 / static_cast<double>(n) + 1e-9 * std::max(1.0, std::abs(logdet)))
            throw InvariantBroken("ellipsoid volume did not shrink by exp(-1/(2n))");
        logdet = next;
    }
    if (!tr.best_point) throw BudgetExhaustedInfeasible("no feasible center within " + std::to_string(budget) + " steps");
    return tr;
}

// ---------------------------------------------------------------- polygons

double polygon_area(const Mat& P) {
    double a = 0.0;
    const Eigen::Index k = P.rows();
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::Index j = (i + 1) % k;
        a += P(i, 0) * P(j, 1) - P(j, 0) * P(i, 1);
    }
    return 0.5 * a;
}

Vec exact_centroid_2d(const Mat& P) {
    if (P.cols() != 2 || P.rows() < 3) throw DegeneratePolygon("need at least three vertices in the plane");
    const double A = polygon_area(P);
    if (A < 1e-12) throw DegeneratePolygon("area " + std::to_string(A));
    Vec c = Vec::Zero(2);
    const Eigen::Index k = P.rows();
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::Index j = (i + 1) % k;
        const double cr = P(i, 0) * P(j, 1) - P(j, 0) * P(i, 1);
        c(0) += (P(i, 0) + P(j, 0)) * cr;
        c(1) += (P(i, 1) + P(j, 1)) * cr;
    }
    return c / (6.0 * A);
}

Mat clip_polygon(const Mat& P, const Vec& w, const Vec& z) {
    std::vector<Eigen::RowVector2d> out;
    const Eigen::Index k = P.rows();
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::RowVector2d p = P.row(i), q = P.row((i + 1) % k);
        const double fp = w(0) * (p(0) - z(0)) + w(1) * (p(1) - z(1));
        const double fq = w(0) * (q(0) - z(0)) + w(1) * (q(1) - z(1));
        if (fp <= 0) out.push_back(p);
        if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) out.push_back(p + (fp / (fp - fq)) * (q - p));
    }
    Mat R(static_cast<Eigen::Index>(out.size()), 2);
    for (std::size_t i = 0; i < out.size(); ++i) R.row(static_cast<Eigen::Index>(i)) = out[i];
    return R;
}

namespace {

// Centroid and covariance of the uniform law on a polygon.
void polygon_moments(const Mat& P, Vec& c, Mat& cov) {
    const double A = polygon_area(P);
    c = exact_centroid_2d(P);
    double xx = 0.0, yy = 0.0, xy = 0.0;
    const Eigen::Index k = P.rows();
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::Index j = (i + 1) % k;
        const double x0 = P(i, 0), y0 = P(i, 1), x1 = P(j, 0), y1 = P(j, 1);
        const double cr = x0 * y1 - x1 * y0;
        xx += cr * (x0 * x0 + x0 * x1 + x1 * x1);
        yy += cr * (y0 * y0 + y0 * y1 + y1 * y1);
        xy += cr * (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0);
    }
    cov.resize(2, 2);
    cov(0, 0) = xx / (12.0 * A) - c(0) * c(0);
    cov(1, 1) = yy / (12.0 * A) - c(1) * c(1);
    cov(0, 1) = cov(1, 0) = xy / (24.0 * A) - c(0) * c(1);
}

// Polygon in the frame x = origin + M y.
struct FramedPolygon {
    Mat poly;
    Vec origin;
    Mat M;
    double log_det_M = 0.0;

    // Re-centres and whitens poly, absorbing the map into the frame.
    void normalize() {
        Vec c;
        Mat cov;
        polygon_moments(poly, c, cov);
        Eigen::LLT<Mat> llt(cov);
        if (llt.info() != Eigen::Success) throw DegeneratePolygon("polygon moment matrix is singular");
        const Mat Lc = llt.matrixL();
        // y = c + Lc y'
        Mat next(poly.rows(), 2);
        for (Eigen::Index i = 0; i < poly.rows(); ++i)
            next.row(i) = Lc.triangularView<Eigen::Lower>().solve(Vec(poly.row(i).transpose() - c)).transpose();
        origin += M * c;
        M = M * Lc;
        log_det_M += std::log(Lc(0, 0) * Lc(1, 1));
        poly = next;
    }
};

}  // namespace

// ---------------------------------------------------------------- center of gravity

namespace {

CutTrace cog_exact2d(FirstOrderOracle& f, const Mat& polygon, long budget) {
    if (polygon.cols() != 2) throw DomainError("exact center of gravity needs a polygon in the plane");
    CutTrace tr;
    tr.algorithm = "center_of_gravity_exact2d";
    tr.best_value = kInf;
    FramedPolygon S{polygon, Vec::Zero(2), Mat::Identity(2, 2), 0.0};
    S.normalize();
    long calls = 0;
    for (long t = 1; t <= budget; ++t) {
        const Vec cy = exact_centroid_2d(S.poly);
        CutStep step;
        step.iter = t;
        step.query = S.origin + S.M * cy;
        step.feasible = true;
        step.value = f.value(step.query);
        step.cut = f.subgradient(step.query);
        ++calls;
        if (step.value < tr.best_value) {
            tr.best_value = step.value;
            tr.best_point = step.query;
        }
        step.best_value = tr.best_value;
        step.log_volume = std::log(polygon_area(S.poly)) + S.log_det_M;
        step.oracle_calls = calls;
        tr.steps.push_back(step);
        if (step.cut.cwiseAbs().maxCoeff() == 0.0) break;
        const Vec wy = S.M.transpose() * step.cut;
        S.poly = clip_polygon(S.poly, wy, cy);
        S.normalize();
    }
    return tr;
}

CutTrace cog_randomized(FirstOrderOracle& f, const ConstraintSet& set, long budget, const RandomizedCogParams& p) {
    const Eigen::Index n = set.dim();
    CutTrace tr;
    tr.algorithm = "center_of_gravity_randomized";
    tr.best_value = kInf;
    const double L = p.box_half_width;
    Mat A(2 * n, n);
    A << Mat::Identity(n, n), -Mat::Identity(n, n);
    auto poly = std::make_shared<Polytope>(A, Vec::Constant(2 * n, L), L * std::sqrt(static_cast<double>(n)));
    const long N = p.samples_per_dim * n;
    const long walk = p.walk_steps > 0 ? p.walk_steps : static_cast<long>(n * n);
    BodySampler sampler(poly, Vec::Zero(n), Rng(p.seed), walk);
    sampler.burn_in(p.burn_in > 0 ? p.burn_in : default_burn_in(n));
    double log_volume = static_cast<double>(n) * std::log(2.0 * L);
    long calls = 0;
    for (long t = 1; t <= budget; ++t) {
        const std::vector<Vec> batch = sampler.samples(N);
        const IsotropicEstimate est = isotropic_whiten(batch);
        sampler.set_direction_transform(est.unwhitening);
        CutStep step;
        step.iter = t;
        step.query = est.mean;
        step.inner_steps = N * walk;
        ++calls;
        const auto sep = set.separate(est.mean);
        if (sep) {
            step.cut = *sep;
        } else {
            step.feasible = true;
            step.value = f.value(est.mean);
            step.cut = f.subgradient(est.mean);
            ++calls;
            if (step.value < tr.best_value) {
                tr.best_value = step.value;
                tr.best_point = est.mean;
            }
        }
        step.best_value = tr.best_value;
        step.oracle_calls = calls;
        if (step.cut.cwiseAbs().maxCoeff() == 0.0) {
            step.log_volume = log_volume;
            tr.steps.push_back(step);
            break;
        }
        // fresh batch to estimate the removed volume fraction
        const std::vector<Vec> fresh = sampler.samples(N);
        step.inner_steps += N * walk;
        const double offset = step.cut.dot(est.mean);
        long kept = 0;
        const Vec* restart = nullptr;
        for (const auto& x : fresh)
            if (step.cut.dot(x) <= offset) {
                ++kept;
                restart = &x;
            }
        const double retained = static_cast<double>(kept) / static_cast<double>(N);
        step.progress = 1.0 - retained;
        log_volume += std::log(std::max(retained, 1.0 / static_cast<double>(N)));
        step.log_volume = log_volume;
        tr.steps.push_back(step);
        auto next = std::make_shared<Polytope>(*poly);
        next->add_row(step.cut, offset);
        Vec start = sampler.current();
        if (step.cut.dot(start) > offset) {
            if (!restart) throw SamplerFailure("no sample survived the cut");
            start = *restart;
        }
        poly = next;
        sampler.set_body(poly, start);
        sampler.burn_in(10 * walk);
    }
    return tr;
}

}  // namespace

CutTrace run_center_of_gravity(FirstOrderOracle& f, const ConstraintSet& set, CogMode mode, long budget,
                               const Mat& polygon, const RandomizedCogParams& params) {
    if (mode == CogMode::exact2d) {
        if (set.dim() != 2) throw DomainError("exact center of gravity is limited to dimension 2");
        return cog_exact2d(f, polygon, budget);
    }
    return cog_randomized(f, set, budget, params);
}

// ---------------------------------------------------------------- Vaidya

bool LocalizationPolytope::strictly_feasible(const Vec& x) const { return rows() == 0 || slack(x).minCoeff() > 0.0; }

LocalizationPolytope regular_simplex_polytope(Eigen::Index n, double R) {
    Mat M = Mat::Identity(n + 1, n + 1);
    M.col(0).setOnes();
    Eigen::HouseholderQR<Mat> qr(M);
    const Mat Q = qr.householderQ();
    const Mat B = Q.rightCols(n);  // orthonormal basis of the complement of 1
    LocalizationPolytope P;
    P.A.resize(n + 1, n);
    for (Eigen::Index i = 0; i <= n; ++i) P.A.row(i) = -B.row(i).normalized();
    P.b = Vec::Constant(n + 1, -R);
    return P;
}

Mat log_barrier_hessian(const LocalizationPolytope& P, const Vec& x) {
    const Vec s = P.slack(x);
    if (s.size() > 0 && !(s.minCoeff() > 0.0)) throw NotStrictlyFeasible("slack " + std::to_string(s.minCoeff()));
    const Mat As = s.cwiseInverse().asDiagonal() * P.A;
    return symmetrize(As.transpose() * As);
}

namespace {

struct BarrierState {
    Vec s;
    Vec sigma;
    Mat As;  // rows a_i / s_i
    Eigen::LLT<Mat> H;
    double v = 0.0;
};

BarrierState barrier_state(const LocalizationPolytope& P, const Vec& x) {
    BarrierState st;
    st.s = P.slack(x);
    if (!(st.s.minCoeff() > 0.0)) throw NotStrictlyFeasible("slack " + std::to_string(st.s.minCoeff()));
    st.As = st.s.cwiseInverse().asDiagonal() * P.A;
    st.H.compute(symmetrize(st.As.transpose() * st.As));
    if (st.H.info() != Eigen::Success) throw BarrierMinimizationFailure("barrier Hessian is singular (unbounded polytope)");
    const Mat Z = st.H.matrixL().solve(st.As.transpose());  // L^{-1} (a_i / s_i)
    st.sigma = Z.colwise().squaredNorm().transpose();
    st.v = st.H.matrixLLT().diagonal().array().log().sum();
    return st;
}

}  // namespace

Vec leverage_scores(const LocalizationPolytope& P, const Vec& x) { return barrier_state(P, x).sigma; }

double volumetric_barrier(const LocalizationPolytope& P, const Vec& x) { return barrier_state(P, x).v; }

VolumetricMinimum minimize_volumetric_barrier(const LocalizationPolytope& P, const Vec& x0, double tol,
                                              long max_steps) {
    VolumetricMinimum out;
    out.x = x0;
    for (long k = 0; k <= max_steps; ++k) {
        const BarrierState st = barrier_state(P, out.x);
        const Vec grad = -(st.As.transpose() * st.sigma);
        const Mat Q = symmetrize(st.As.transpose() * st.sigma.asDiagonal() * st.As);
        Eigen::LLT<Mat> q(Q);
        if (q.info() != Eigen::Success) throw BarrierMinimizationFailure("approximate Hessian is singular");
        const Vec dx = -q.solve(grad);
        out.decrement = std::sqrt(std::max(0.0, -grad.dot(dx)));
        if (out.decrement <= tol) return out;
        if (k == max_steps) break;
        double step = 1.0 / (1.0 + out.decrement);
        bool moved = false;
        for (int j = 0; j < 60; ++j) {
            const Vec y = out.x + step * dx;
            if (P.strictly_feasible(y)) {
                const double vy = barrier_state(P, y).v;
                if (vy <= st.v + 0.25 * step * grad.dot(dx)) {
                    out.x = y;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        ++out.newton_steps;
        if (!moved) throw BarrierMinimizationFailure("line search stalled at decrement " + std::to_string(out.decrement));
    }
    throw BarrierMinimizationFailure("decrement " + std::to_string(out.decrement) + " after " +
                                     std::to_string(max_steps) + " Newton steps");
}

double vaidya_insertion_offset(const LocalizationPolytope& P, const Vec& x, const Vec& c, double eps) {
    const BarrierState st = barrier_state(P, x);
    const double hc = c.dot(st.H.solve(c));
    return c.dot(x) - std::sqrt(hc / (std::sqrt(eps) / 5.0));
}

CutTrace run_vaidya(const ConstraintSet& set, double R, double r, long budget, double eps) {
    const Eigen::Index n = set.dim();
    if (!(R > 0) || !(r > 0) || r > R) throw DomainError("need 0 < r <= R");
    if (!(eps > 0) || eps > 0.006) throw DomainError("Vaidya's constant must lie in (0, 0.006]");
    CutTrace tr;
    tr.algorithm = "vaidya";
    tr.best_value = kInf;
    LocalizationPolytope P = regular_simplex_polytope(n, R);
    Vec x = Vec::Zero(n);
    long calls = 0;
    const double target = std::sqrt(eps) / 5.0;
    for (long t = 0; t < budget; ++t) {
        const VolumetricMinimum vm = minimize_volumetric_barrier(P, x);
        x = vm.x;
        const BarrierState st = barrier_state(P, x);
        CutStep step;
        step.iter = t;
        step.query = x;
        step.inner_steps = vm.newton_steps;
        step.log_volume = -st.v;
        Eigen::Index imin = 0;
        const double smin = st.sigma.minCoeff(&imin);
        if (smin < eps) {
            step.kind = 1;
            const Eigen::Index m = P.rows();
            for (Eigen::Index i = imin; i + 1 < m; ++i) {
                P.A.row(i) = P.A.row(i + 1);
                P.b(i) = P.b(i + 1);
            }
            P.A.conservativeResize(m - 1, Eigen::NoChange);
            P.b.conservativeResize(m - 1);
        } else {
            step.kind = 2;
            ++calls;
            const auto sep = set.separate(x);
            if (!sep) {
                step.feasible = true;
                tr.best_point = x;
                tr.best_value = 0.0;
                step.best_value = 0.0;
                step.oracle_calls = calls;
                tr.steps.push_back(step);
                return tr;
            }
            // set inside {y : c^T y > beta} with c = -w
            const Vec c = -*sep;
            step.cut = *sep;
            const double beta = c.dot(x) - std::sqrt(c.dot(st.H.solve(c)) / target);
            P.A.conservativeResize(P.rows() + 1, Eigen::NoChange);
            P.A.row(P.rows() - 1) = c.transpose();
            P.b.conservativeResize(P.b.size() + 1);
            P.b(P.b.size() - 1) = beta;
        }
        step.best_value = tr.best_value;
        step.oracle_calls = calls;
        tr.steps.push_back(step);
    }
    throw BudgetExhaustedInfeasible("no feasible volumetric center within " + std::to_string(budget) + " steps");
}

}  // namespace convexkit
