#include "convexkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "convexkit/errors.hpp"

namespace convexkit {

Mat symmetrize(const Mat& M) {
    if (M.rows() != M.cols()) throw DimensionMismatch("matrix is not square");
    return 0.5 * (M + M.transpose());
}

double max_abs(const Mat& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

Mat cholesky(const Mat& M) {
    if (M.rows() != M.cols()) throw DimensionMismatch("cholesky needs a square matrix");
    const Eigen::Index n = M.rows();
    const double floor = static_cast<double>(n) * 1e-14 * max_abs(M);
    Mat L = Mat::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = M(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (!(d > floor)) throw NotPositiveDefinite("pivot " + std::to_string(j) + " is " + std::to_string(d));
        const double ljj = std::sqrt(d);
        L(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = M(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / ljj;
        }
    }
    return L;
}

SpectralDecomposition sym_eig(const Mat& M_in) {
    Mat A = symmetrize(M_in);
    const Eigen::Index n = A.rows();
    Mat V = Mat::Identity(n, n);
    const double total = A.norm();
    const double threshold = 1e-12 * total;

    auto off_norm = [&]() {
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = j + 1; i < n; ++i) s += 2.0 * A(i, j) * A(i, j);
        return std::sqrt(s);
    };

    bool converged = off_norm() <= threshold;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                // Rotation angle that zeroes A(p, q) (Golub & Van Loan, sym.schur2).
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                A(p, q) = A(q, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
        converged = off_norm() <= threshold;
    }
    if (!converged) throw NoConvergence("Jacobi eigensolver exceeded 100 sweeps");

    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return A(a, a) > A(b, b); });
    SpectralDecomposition out{Vec(n), Mat(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = A(order[k], order[k]);
        out.eigenvectors.col(k) = V.col(order[k]);
    }
    return out;
}

Mat matrix_function(const Mat& M, const std::function<double(double)>& f,
                    const std::function<bool(double)>& in_domain) {
    const SpectralDecomposition eig = sym_eig(M);
    Vec fl(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < fl.size(); ++i) {
        const double lam = eig.eigenvalues(i);
        if (in_domain && !in_domain(lam)) throw DomainError("eigenvalue " + std::to_string(lam) + " outside domain");
        fl(i) = f(lam);
        if (!std::isfinite(fl(i))) throw DomainError("function not finite at eigenvalue " + std::to_string(lam));
    }
    return symmetrize(eig.eigenvectors * fl.asDiagonal() * eig.eigenvectors.transpose());
}

Mat matrix_exp(const Mat& M) {
    return matrix_function(M, [](double x) { return std::exp(x); });
}

Mat matrix_log(const Mat& M) {
    return matrix_function(M, [](double x) { return std::log(x); }, [](double x) { return x > 0.0; });
}

Vec cholesky_solve(const Mat& L, const Vec& b) {
    const Eigen::Index n = L.rows();
    if (b.size() != n) throw DimensionMismatch("right-hand side size");
    Vec y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = b(i);
        for (Eigen::Index k = 0; k < i; ++k) s -= L(i, k) * y(k);
        y(i) = s / L(i, i);
    }
    Vec x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double s = y(i);
        for (Eigen::Index k = i + 1; k < n; ++k) s -= L(k, i) * x(k);
        x(i) = s / L(i, i);
    }
    return x;
}

Vec solve_posdef(const Mat& M, const Vec& b) { return cholesky_solve(cholesky(M), b); }

Mat inverse_posdef(const Mat& M) {
    const Mat L = cholesky(M);
    const Eigen::Index n = M.rows();
    Mat inv(n, n);
    for (Eigen::Index j = 0; j < n; ++j) inv.col(j) = cholesky_solve(L, Vec::Unit(n, j));
    return symmetrize(inv);
}

double log_det_posdef(const Mat& M) {
    const Mat L = cholesky(M);
    return 2.0 * L.diagonal().array().log().sum();
}

double lambda_max(const Mat& M) { return sym_eig(M).eigenvalues(0); }

double lambda_min(const Mat& M) {
    const Vec ev = sym_eig(M).eigenvalues;
    return ev(ev.size() - 1);
}

}  // namespace convexkit
