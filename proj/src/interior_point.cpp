#include "convexkit/interior_point.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "convexkit/errors.hpp"

namespace convexkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dim(const Barrier& F, const Vec& x) {
    if (x.size() != F.dim) throw DimensionMismatch("point dimension differs from the barrier's");
}

struct NewtonDirection {
    Vec d;  // [Hess F]^{-1} (t c + grad F)
    double decrement = 0.0;
};

NewtonDirection newton_direction(const Barrier& F, const Vec& c, double t, const Vec& x) {
    check_dim(F, x);
    if (!F.in_domain(x)) throw NotStrictlyFeasible("point outside the open domain of " + F.name);
    Vec g = F.gradient(x);
    if (t != 0.0) g += t * c;
    NewtonDirection out;
    out.d = solve_posdef(F.hessian(x), g);
    out.decrement = std::sqrt(std::max(0.0, g.dot(out.d)));
    return out;
}

}  // namespace

Barrier log_barrier_polytope(const Mat& A, const Vec& b) {
    if (A.rows() == 0 || A.cols() == 0) throw DomainError("polytope barrier needs at least one constraint");
    if (A.rows() != b.size()) throw DimensionMismatch("A and b row counts differ");
    Barrier F;
    F.name = "log_barrier_polytope";
    F.dim = A.cols();
    F.nu = static_cast<double>(A.rows());
    F.in_domain = [A, b](const Vec& x) { return ((A * x - b).array() > 0.0).all(); };
    F.value = [A, b](const Vec& x) {
        const Vec s = A * x - b;
        if (!(s.array() > 0.0).all()) return kInf;
        return -s.array().log().sum();
    };
    F.gradient = [A, b](const Vec& x) {
        const Vec s = A * x - b;
        return Vec(-(A.transpose() * s.cwiseInverse()));
    };
    F.hessian = [A, b](const Vec& x) {
        const Vec w = (A * x - b).cwiseInverse();
        return Mat(A.transpose() * w.cwiseAbs2().asDiagonal() * A);
    };
    return F;
}

Vec svec(const Mat& X) {
    if (X.rows() != X.cols()) throw DimensionMismatch("svec needs a square matrix");
    const Eigen::Index n = X.rows();
    Vec x(n * (n + 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i <= j; ++i) x(k++) = i == j ? X(i, i) : std::sqrt(2.0) * X(i, j);
    return x;
}

Mat smat(const Vec& x) {
    const auto n = static_cast<Eigen::Index>(std::lround((std::sqrt(8.0 * static_cast<double>(x.size()) + 1.0) - 1.0) / 2.0));
    if (n * (n + 1) / 2 != x.size()) throw DimensionMismatch("length is not a triangular number");
    Mat X(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double v = i == j ? x(k) : x(k) / std::sqrt(2.0);
            X(i, j) = v;
            X(j, i) = v;
            ++k;
        }
    return X;
}

namespace {

std::optional<Eigen::LLT<Mat>> pd_factor(const Vec& x) {
    Eigen::LLT<Mat> llt(smat(x));
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Vec d = llt.matrixL().toDenseMatrix().diagonal();
    if (!(d.array() > 0.0).all() || !d.allFinite()) return std::nullopt;
    return llt;
}

Mat inverse_from(const Eigen::LLT<Mat>& llt, Eigen::Index n) { return llt.solve(Mat::Identity(n, n)); }

}  // namespace

Barrier log_det_barrier(Eigen::Index side) {
    if (side < 1) throw DomainError("matrix side must be positive");
    Barrier F;
    F.name = "log_det_barrier";
    F.dim = side * (side + 1) / 2;
    F.nu = static_cast<double>(side);
    F.in_domain = [](const Vec& x) { return pd_factor(x).has_value(); };
    F.value = [](const Vec& x) {
        const auto llt = pd_factor(x);
        if (!llt) return kInf;
        return -2.0 * llt->matrixL().toDenseMatrix().diagonal().array().log().sum();
    };
    F.gradient = [side](const Vec& x) {
        const auto llt = pd_factor(x);
        if (!llt) throw NotStrictlyFeasible("matrix is not positive definite");
        return Vec(-svec(inverse_from(*llt, side)));
    };
    // column k is svec(X^{-1} E_k X^{-1}) for the k-th svec basis matrix E_k
    F.hessian = [side](const Vec& x) {
        const auto llt = pd_factor(x);
        if (!llt) throw NotStrictlyFeasible("matrix is not positive definite");
        const Mat Xi = inverse_from(*llt, side);
        const Eigen::Index d = x.size();
        Mat H(d, d);
        for (Eigen::Index k = 0; k < d; ++k) {
            const Mat E = smat(Vec::Unit(d, k));
            H.col(k) = svec(Xi * E * Xi);
        }
        return symmetrize(H);
    };
    return F;
}

Barrier sum_barriers(const Barrier& F, const Barrier& G) {
    if (F.dim != G.dim) throw DimensionMismatch("barrier dimensions differ");
    Barrier S;
    S.name = F.name + "+" + G.name;
    S.dim = F.dim;
    S.nu = F.nu + G.nu;
    S.in_domain = [F, G](const Vec& x) { return F.in_domain(x) && G.in_domain(x); };
    S.value = [F, G](const Vec& x) {
        if (!F.in_domain(x) || !G.in_domain(x)) return kInf;
        return F.value(x) + G.value(x);
    };
    S.gradient = [F, G](const Vec& x) { return Vec(F.gradient(x) + G.gradient(x)); };
    S.hessian = [F, G](const Vec& x) { return Mat(F.hessian(x) + G.hessian(x)); };
    return S;
}

Barrier restrict_to_affine(const Barrier& F, const Vec& x0, const Mat& N) {
    if (x0.size() != F.dim || N.rows() != F.dim) throw DimensionMismatch("affine map does not land in the barrier's space");
    Barrier R;
    R.name = F.name + "|affine";
    R.dim = N.cols();
    R.nu = F.nu;
    R.in_domain = [F, x0, N](const Vec& z) { return F.in_domain(x0 + N * z); };
    R.value = [F, x0, N](const Vec& z) { return F.value(x0 + N * z); };
    R.gradient = [F, x0, N](const Vec& z) { return Vec(N.transpose() * F.gradient(x0 + N * z)); };
    R.hessian = [F, x0, N](const Vec& z) { return Mat(N.transpose() * F.hessian(x0 + N * z) * N); };
    return R;
}

AffineParametrization affine_parametrization(const Mat& A_eq, const Vec& b_eq) {
    if (A_eq.rows() != b_eq.size()) throw DimensionMismatch("A_eq and b_eq row counts differ");
    const Eigen::Index n = A_eq.cols();
    Eigen::JacobiSVD<Mat> svd(A_eq, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(static_cast<double>(std::max(A_eq.rows(), n)) * 1e-12);
    const Eigen::Index rank = svd.rank();
    AffineParametrization out;
    out.x0 = rank > 0 ? Vec(svd.solve(b_eq)) : Vec(Vec::Zero(n));
    const double resid = (A_eq * out.x0 - b_eq).norm();
    if (resid > 1e-9 * (1.0 + b_eq.norm())) throw EmptyInterior("equality constraints are inconsistent");
    out.N = svd.matrixV().rightCols(n - rank);
    return out;
}

double exp_concavity_margin(const Barrier& F, const Vec& x) {
    check_dim(F, x);
    const Vec g = F.gradient(x);
    return lambda_min(symmetrize(F.hessian(x) - g * g.transpose() / F.nu));
}

double newton_decrement(const Barrier& F, const Vec& c, double t, const Vec& x) {
    return newton_direction(F, c, t, x).decrement;
}

double local_dual_norm(const Barrier& F, const Vec& x, const Vec& c) {
    check_dim(F, x);
    if (!F.in_domain(x)) throw NotStrictlyFeasible("point outside the open domain of " + F.name);
    return std::sqrt(std::max(0.0, c.dot(solve_posdef(F.hessian(x), c))));
}

NewtonRun damped_newton_minimize(const Barrier& F, const Vec& c, double t, const Vec& x0, double tol,
                                 long max_steps) {
    NewtonRun run;
    run.x = x0;
    const double scale = 1.0 + x0.norm();
    for (;;) {
        const NewtonDirection nd = newton_direction(F, c, t, run.x);
        run.decrements.push_back(nd.decrement);
        if (nd.decrement <= tol) return run;
        if (run.steps >= max_steps) throw MaxIterations("Newton decrement still " + std::to_string(nd.decrement));
        const double step = nd.decrement <= 0.25 ? 1.0 : 1.0 / (1.0 + nd.decrement);
        run.x -= step * nd.d;
        ++run.steps;
        if (!run.x.allFinite() || run.x.norm() > 1e12 * scale)
            throw EmptyInterior("Newton iterates diverge: no minimizer of the barrier objective");
        if (!F.in_domain(run.x)) throw BarrierMinimizationFailure("Newton step left the domain");
    }
}

NewtonRun analytic_center(const Barrier& F, const Vec& x0, double tol) {
    return damped_newton_minimize(F, Vec::Zero(F.dim), 0.0, x0, tol);
}

double path_growth(double nu) { return 1.0 + 1.0 / (13.0 * std::sqrt(nu)); }

long path_steps_needed(double nu, double t0, double eps) {
    const double ratio = 2.0 * nu / (t0 * eps);
    if (ratio <= 1.0) return 0;
    return static_cast<long>(std::ceil(std::log(ratio) / std::log(path_growth(nu))));
}

namespace {

PathRun follow(const Barrier& F, const Vec& c, const Vec& x0, double t0, double eps, std::optional<double> optimum,
               const std::function<bool(const CentralPathState&)>& stop) {
    if (!(t0 > 0.0) || !(eps > 0.0)) throw DomainError("path following needs t0 > 0 and eps > 0");
    check_dim(F, x0);
    if (c.size() != F.dim) throw DimensionMismatch("objective dimension differs from the barrier's");
    const double growth = path_growth(F.nu);
    FirstOrderOracle none;
    TraceRecorder rec(none, "path_follow");
    PathRun run;
    CentralPathState st{t0, x0, newton_decrement(F, c, t0, x0)};
    if (st.decrement > 0.25) throw InvariantBroken("start point has decrement " + std::to_string(st.decrement));
    for (long k = 0;; ++k) {
        run.states.push_back(st);
        const double fv = c.dot(st.x);
        const double gap = optimum ? fv - *optimum : kNaN;
        rec.record_values(k, fv, gap, gap).oracle_first = k;
        rec.add_series("t", st.t);
        rec.add_series("decrement", st.decrement);
        rec.add_series("gap_bound", 2.0 * F.nu / st.t);
        if (2.0 * F.nu / st.t <= eps || (stop && stop(st))) break;
        st.t *= growth;
        st.x -= solve_posdef(F.hessian(st.x), st.t * c + F.gradient(st.x));
        if (!F.in_domain(st.x)) throw InvariantBroken("Newton step left the domain at step " + std::to_string(k + 1));
        st.decrement = newton_decrement(F, c, st.t, st.x);
        if (st.decrement > 0.25)
            throw InvariantBroken("decrement " + std::to_string(st.decrement) + " exceeds 1/4 at step " +
                                  std::to_string(k + 1));
    }
    run.x = st.x;
    run.t_final = st.t;
    run.gap_bound = 2.0 * F.nu / st.t;
    run.trace = rec.finish(st.x, st.x);
    return run;
}

}  // namespace

PathRun path_follow(const Barrier& F, const Vec& c, const Vec& x0, double t0, double eps,
                    std::optional<double> optimum) {
    return follow(F, c, x0, t0, eps, optimum, {});
}

PathStart path_follow_init(const Barrier& F, const Vec& c, const Vec& y0, long max_steps) {
    check_dim(F, y0);
    if (c.size() != F.dim) throw DimensionMismatch("objective dimension differs from the barrier's");
    if (!F.in_domain(y0)) throw NotStrictlyFeasible("initial point outside the open domain of " + F.name);
    const Vec c_aux = -F.gradient(y0);
    const double shrink = 1.0 - 1.0 / (13.0 * std::sqrt(F.nu));
    PathStart out;
    CentralPathState st{1.0, y0, 0.0};
    for (;;) {
        out.backward.push_back(st);
        if (newton_decrement(F, c, st.t, st.x) <= 0.25) break;
        if (out.backward_steps >= max_steps) throw MaxIterations("backward phase did not reach the handoff region");
        st.t *= shrink;
        st.x -= solve_posdef(F.hessian(st.x), st.t * c_aux + F.gradient(st.x));
        ++out.backward_steps;
        if (!F.in_domain(st.x)) throw InvariantBroken("backward Newton step left the domain");
        st.decrement = newton_decrement(F, c_aux, st.t, st.x);
        if (st.decrement > 0.25)
            throw InvariantBroken("backward decrement " + std::to_string(st.decrement) + " exceeds 1/4");
    }
    out.t0 = st.t;
    out.x0 = st.x;
    return out;
}

LpResult solve_lp(const LinearProgram& lp, double eps, std::optional<Vec> y0) {
    const Eigen::Index n = lp.A.cols();
    if (lp.A.rows() == 0) throw DomainError("LP needs at least one inequality");
    if (lp.b.size() != lp.A.rows() || lp.c.size() != n) throw DimensionMismatch("LP data sizes disagree");
    const bool has_eq = lp.A_eq.rows() > 0;
    if (has_eq && lp.A_eq.cols() != n) throw DimensionMismatch("A_eq column count differs from A's");

    // x = x_base + N z
    AffineParametrization par{Vec::Zero(n), Mat::Identity(n, n)};
    if (has_eq) par = affine_parametrization(lp.A_eq, lp.b_eq);
    if (par.N.cols() == 0) throw EmptyInterior("equality constraints leave a single point");
    const Mat A = lp.A * par.N;
    const Vec b = lp.b - lp.A * par.x0;
    const Vec c = par.N.transpose() * lp.c;
    const Eigen::Index d = par.N.cols();
    const Eigen::Index m = A.rows();

    LpResult res;
    Vec z;
    if (y0) {
        if (y0->size() != n) throw DimensionMismatch("initial point dimension differs from the LP's");
        z = par.N.transpose() * (*y0 - par.x0);
        if (!((A * z - b).array() > 0.0).all()) throw NotStrictlyFeasible("initial point is not strictly feasible");
    } else {
        // min s over {A z + s 1 >= b, s <= s0 + 1}, started from (0, s0)
        const double s0 = std::max(0.0, b.maxCoeff()) + 1.0;
        Mat A1 = Mat::Zero(m + 1, d + 1);
        A1.topLeftCorner(m, d) = A;
        A1.col(d).head(m).setOnes();
        A1(m, d) = -1.0;
        Vec b1(m + 1);
        b1 << b, -(s0 + 1.0);
        const Barrier F1 = log_barrier_polytope(A1, b1);
        const Vec c1 = Vec::Unit(d + 1, d);
        Vec w0 = Vec::Zero(d + 1);
        w0(d) = s0;
        const PathStart st1 = path_follow_init(F1, c1, w0);
        const PathRun ph1 = follow(F1, c1, st1.x0, st1.t0, 1e-12, std::nullopt, [&](const CentralPathState& s) {
            return s.x(d) < 0.0 || s.x(d) - 2.0 * F1.nu / s.t >= 0.0;
        });
        res.phase_one_steps = st1.backward_steps + static_cast<long>(ph1.states.size()) - 1;
        if (!(ph1.x(d) < 0.0)) throw EmptyInterior("no strictly feasible point: phase I optimum is nonnegative");
        z = ph1.x.head(d);
    }

    const Barrier F = log_barrier_polytope(A, b);
    const PathStart start = path_follow_init(F, c, z);
    res.backward_steps = start.backward_steps;
    res.path = path_follow(F, c, start.x0, start.t0, eps);
    res.x = par.x0 + par.N * res.path.x;
    res.value = lp.c.dot(res.x);
    res.t_final = res.path.t_final;
    res.gap_bound = res.path.gap_bound;
    return res;
}

}  // namespace convexkit
