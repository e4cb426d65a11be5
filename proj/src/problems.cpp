#include "convexkit/problems.hpp"

#include <algorithm>
#include <cmath>

#include "convexkit/errors.hpp"

namespace convexkit {

Mat random_orthogonal(Eigen::Index n, Rng& rng) {
    Mat G(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) G(i, j) = rng.normal();
    Eigen::HouseholderQR<Mat> qr(G);
    Mat Q = qr.householderQ();
    const Mat R = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j)
        if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    return Q;
}

Mat spd_with_spectrum(const Vec& eigenvalues, Rng& rng) {
    const Mat Q = random_orthogonal(eigenvalues.size(), rng);
    return symmetrize(Q * eigenvalues.asDiagonal() * Q.transpose());
}

Mat random_spd(Eigen::Index n, double lo, double hi, Rng& rng) {
    Vec e(n);
    for (Eigen::Index i = 0; i < n; ++i) e(i) = n == 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return spd_with_spectrum(e, rng);
}

namespace {

void check_labels(const Mat& W, const Vec& labels) {
    if (W.rows() != labels.size()) throw DimensionMismatch("one label per data row is required");
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        if (labels(i) != 1.0 && labels(i) != -1.0) throw DomainError("labels must be -1 or 1");
}

// log(1 + exp(z)) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

FirstOrderOracle quadratic_problem(const Mat& A_in, const Vec& b) {
    const Mat A = symmetrize(A_in);
    if (A.rows() != b.size()) throw DimensionMismatch("quadratic: A and b disagree");
    const auto eig = sym_eig(A);
    Regularity reg;
    reg.beta = eig.eigenvalues(0);
    reg.alpha = std::max(0.0, eig.eigenvalues(A.rows() - 1));
    FirstOrderOracle f(
        A.rows(), [A, b](const Vec& x) { return 0.5 * x.dot(A * x) - b.dot(x); },
        [A, b](const Vec& x) { return Vec(A * x - b); }, reg);
    if (*reg.alpha > 1e-12 * std::max(1.0, *reg.beta)) {
        const Vec xs = solve_posdef(A, b);
        f.x_star = xs;
        f.f_star = -0.5 * b.dot(xs);
    }
    f.name = "quadratic";
    return f;
}

CompositeProblem lasso_problem(const Mat& W, const Vec& y, double lambda) {
    if (W.rows() != y.size()) throw DimensionMismatch("lasso: W and y disagree");
    if (lambda < 0) throw DomainError("lasso: lambda must be nonnegative");
    Regularity reg;
    const Mat G = W.transpose() * W;
    reg.beta = lambda_max(G);
    reg.alpha = std::max(0.0, lambda_min(G));
    CompositeProblem p;
    p.smooth = FirstOrderOracle(
        W.cols(), [W, y](const Vec& x) { return 0.5 * (W * x - y).squaredNorm(); },
        [W, y](const Vec& x) { return Vec(W.transpose() * (W * x - y)); }, reg);
    p.smooth.name = "lasso";
    p.lambda = lambda;
    return p;
}

FirstOrderOracle hinge_problem(const Mat& W, const Vec& labels, double lambda) {
    check_labels(W, labels);
    Regularity reg;
    reg.alpha = 2.0 * lambda;
    FirstOrderOracle f(
        W.cols(),
        [W, labels, lambda](const Vec& x) {
            const Vec margin = labels.cwiseProduct(W * x);
            return (1.0 - margin.array()).max(0.0).sum() + lambda * x.squaredNorm();
        },
        [W, labels, lambda](const Vec& x) {
            const Vec margin = labels.cwiseProduct(W * x);
            Vec g = 2.0 * lambda * x;
            for (Eigen::Index i = 0; i < W.rows(); ++i)
                if (margin(i) < 1.0) g -= labels(i) * W.row(i).transpose();
            return g;
        },
        reg);
    f.name = "svm_hinge";
    return f;
}

FirstOrderOracle logistic_problem(const Mat& W, const Vec& labels, double lambda) {
    check_labels(W, labels);
    Regularity reg;
    reg.beta = 0.25 * lambda_max(W.transpose() * W) + 2.0 * lambda;
    reg.alpha = 2.0 * lambda;
    FirstOrderOracle f(
        W.cols(),
        [W, labels, lambda](const Vec& x) {
            const Vec margin = labels.cwiseProduct(W * x);
            double s = 0.0;
            for (Eigen::Index i = 0; i < margin.size(); ++i) s += softplus(-margin(i));
            return s + lambda * x.squaredNorm();
        },
        [W, labels, lambda](const Vec& x) {
            const Vec margin = labels.cwiseProduct(W * x);
            Vec coef(margin.size());
            for (Eigen::Index i = 0; i < margin.size(); ++i) coef(i) = -labels(i) * sigmoid(-margin(i));
            return Vec(W.transpose() * coef + 2.0 * lambda * x);
        },
        reg);
    f.name = "logistic";
    return f;
}

SvmReference svm_reference(const Mat& W, const Vec& labels, double alpha, double gap_tol) {
    check_labels(W, labels);
    if (alpha <= 0) throw DomainError("svm_reference: alpha must be positive");
    const Eigen::Index m = W.rows();
    const double cap = 1.0 / static_cast<double>(m);
    const Vec row_sq = W.rowwise().squaredNorm();
    Vec a = Vec::Zero(m);
    Vec x = Vec::Zero(W.cols());  // x = (1/alpha) sum a_i y_i w_i

    auto primal = [&](const Vec& z) {
        return cap * (1.0 - labels.cwiseProduct(W * z).array()).max(0.0).sum() + 0.5 * alpha * z.squaredNorm();
    };
    auto dual = [&]() { return a.sum() - 0.5 * alpha * x.squaredNorm(); };

    SvmReference out;
    for (int sweep = 0; sweep < 200000; ++sweep) {
        for (Eigen::Index i = 0; i < m; ++i) {
            if (row_sq(i) == 0) continue;
            const double grad = 1.0 - labels(i) * W.row(i).dot(x);
            const double next = std::clamp(a(i) + alpha * grad / row_sq(i), 0.0, cap);
            const double delta = next - a(i);
            if (delta != 0.0) {
                a(i) = next;
                x += (delta * labels(i) / alpha) * W.row(i).transpose();
            }
        }
        const double gap = primal(x) - dual();
        if (gap <= gap_tol) {
            out.x_star = x;
            out.f_star = primal(x);
            out.duality_gap = gap;
            return out;
        }
    }
    throw NoConvergence("svm_reference: dual coordinate ascent did not certify the optimum");
}

double SpanTracker::distance(const Vec& x) const {
    if (basis_.cols() == 0) return x.norm();
    return (x - basis_ * (basis_.transpose() * x)).norm();
}

void SpanTracker::add(const Vec& g) {
    Vec r = g;
    // two rounds of Gram-Schmidt for stability
    for (int k = 0; k < 2 && basis_.cols() > 0; ++k) r -= basis_ * (basis_.transpose() * r);
    const double n = r.norm();
    if (n <= 1e-12 * std::max(1.0, g.norm())) return;
    basis_.conservativeResize(Eigen::NoChange, basis_.cols() + 1);
    basis_.col(basis_.cols() - 1) = r / n;
}

ResistingNonsmoothInstance resisting_instance(Eigen::Index dim, Eigen::Index t, double gamma, double alpha,
                                              double radius, bool check_span) {
    if (t < 1) throw DomainError("horizon must be at least 1");
    if (t > dim) throw HorizonExceedsDimension("horizon " + std::to_string(t) + " exceeds dimension " + std::to_string(dim));
    ResistingNonsmoothInstance inst;
    inst.horizon = t;
    inst.gamma = gamma;
    inst.alpha = alpha;
    inst.radius = radius;
    if (check_span) inst.span = std::make_shared<SpanTracker>(dim);
    auto span = inst.span;
    Regularity reg;
    reg.L = alpha * radius + gamma;
    if (alpha > 0) reg.alpha = alpha;
    inst.oracle = FirstOrderOracle(
        dim, [t, gamma, alpha](const Vec& x) { return gamma * x.head(t).maxCoeff() + 0.5 * alpha * x.squaredNorm(); },
        [t, gamma, alpha](const Vec& x) {
            Eigen::Index i = 0;
            // Eigen's maxCoeff returns the first maximizer.
            x.head(t).maxCoeff(&i);
            Vec g = alpha * x;
            g(i) += gamma;
            return g;
        },
        reg);
    Vec xs = Vec::Zero(dim);
    if (alpha > 0) {
        xs.head(t).setConstant(-gamma / (alpha * static_cast<double>(t)));
        inst.oracle.x_star = xs;
        inst.oracle.f_star = -gamma * gamma / (2.0 * alpha * static_cast<double>(t));
    }
    if (span) {
        inst.oracle.on_subgradient = [span](const Vec& x, const Vec& g) {
            if (!span->contains(x))
                throw InvariantBroken("query point leaves the span of previous subgradients (distance " +
                                      std::to_string(span->distance(x)) + ")");
            span->add(g);
        };
    }
    inst.oracle.name = "resisting_nonsmooth";
    return inst;
}

ResistingNonsmoothInstance nonsmooth_lower_bound_instance(Eigen::Index dim, Eigen::Index t, double L, double R,
                                                          bool check_span) {
    if (L <= 0 || R <= 0) throw DomainError("L and R must be positive");
    const double st = std::sqrt(static_cast<double>(t));
    return resisting_instance(dim, t, L * st / (1.0 + st), L / (R * (1.0 + st)), R, check_span);
}

ResistingNonsmoothInstance strongly_convex_lower_bound_instance(Eigen::Index dim, Eigen::Index t, double L,
                                                                double alpha, bool check_span) {
    if (L <= 0 || alpha <= 0) throw DomainError("L and alpha must be positive");
    // On the ball of radius L/(2 alpha) the Lipschitz constant is alpha R + gamma = L.
    return resisting_instance(dim, t, L / 2.0, alpha, L / (2.0 * alpha), check_span);
}

Mat tridiagonal_hard_matrix(Eigen::Index n, Eigen::Index k) {
    if (k > n || k < 1) throw DomainError("tridiagonal_hard_matrix needs 1 <= k <= n");
    Mat A = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < k; ++i) {
        A(i, i) = 2.0;
        if (i + 1 < k) A(i, i + 1) = A(i + 1, i) = -1.0;
    }
    return A;
}

double smooth_lower_bound_fstar(Eigen::Index k, double beta) {
    return -beta / 8.0 * (1.0 - 1.0 / static_cast<double>(k + 1));
}

FirstOrderOracle smooth_lower_bound_instance(Eigen::Index n, Eigen::Index t, double beta) {
    const Eigen::Index k = 2 * t + 1;
    if (k > n) throw HorizonExceedsDimension("2t + 1 = " + std::to_string(k) + " exceeds dimension " + std::to_string(n));
    const Mat A = tridiagonal_hard_matrix(n, k);
    Regularity reg;
    reg.beta = beta;
    FirstOrderOracle f(
        n, [A, beta](const Vec& x) { return beta / 8.0 * x.dot(A * x) - beta / 4.0 * x(0); },
        [A, beta](const Vec& x) {
            Vec g = beta / 4.0 * (A * x);
            g(0) -= beta / 4.0;
            return g;
        },
        reg);
    Vec xs = Vec::Zero(n);
    for (Eigen::Index i = 1; i <= k; ++i) xs(i - 1) = 1.0 - static_cast<double>(i) / static_cast<double>(k + 1);
    f.x_star = xs;
    f.f_star = smooth_lower_bound_fstar(k, beta);
    f.name = "tridiagonal_smooth";
    return f;
}

FirstOrderOracle strongly_convex_smooth_lower_bound_instance(Eigen::Index n, double kappa, double alpha) {
    if (kappa <= 1 || alpha <= 0) throw DomainError("need kappa > 1 and alpha > 0");
    const Mat A = tridiagonal_hard_matrix(n, n);
    const double c = alpha * (kappa - 1.0) / 8.0;
    Regularity reg;
    reg.alpha = alpha;
    reg.beta = alpha * kappa;
    FirstOrderOracle f(
        n, [A, c, alpha](const Vec& x) { return c * (x.dot(A * x) - 2.0 * x(0)) + 0.5 * alpha * x.squaredNorm(); },
        [A, c, alpha](const Vec& x) {
            Vec g = 2.0 * c * (A * x) + alpha * x;
            g(0) -= 2.0 * c;
            return g;
        },
        reg);
    const Mat H = 2.0 * c * A + alpha * Mat::Identity(n, n);
    Vec rhs = Vec::Zero(n);
    rhs(0) = 2.0 * c;
    const Vec xs = solve_posdef(H, rhs);
    f.x_star = xs;
    f.f_star = f.evaluate(xs);
    f.name = "tridiagonal_strongly_convex";
    return f;
}

}  // namespace convexkit
