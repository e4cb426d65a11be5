#pragma once

#include <Eigen/Dense>
#include <functional>

namespace convexkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct SpectralDecomposition {
    Vec eigenvalues;   // descending
    Mat eigenvectors;  // column k pairs with eigenvalues(k)
};

// (M + M^T) / 2, so that entries are exactly symmetric.
Mat symmetrize(const Mat& M);

double max_abs(const Mat& M);

// Lower-triangular L with L L^T = M. Throws NotPositiveDefinite when a pivot
// falls to dim * 1e-14 * max|M| or below.
Mat cholesky(const Mat& M);

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Converges when the
// off-diagonal Frobenius norm is at most 1e-12 times the full Frobenius norm;
// throws NoConvergence after 100 sweeps.
SpectralDecomposition sym_eig(const Mat& M);

// V diag(f(lambda)) V^T. Throws DomainError when f is not finite at an
// eigenvalue or when in_domain rejects one.
Mat matrix_function(const Mat& M, const std::function<double(double)>& f,
                    const std::function<bool(double)>& in_domain = {});
Mat matrix_exp(const Mat& M);
Mat matrix_log(const Mat& M);

// Solves L L^T x = b given the lower factor.
Vec cholesky_solve(const Mat& L, const Vec& b);
Vec solve_posdef(const Mat& M, const Vec& b);
Mat inverse_posdef(const Mat& M);
double log_det_posdef(const Mat& M);

double lambda_max(const Mat& M);
double lambda_min(const Mat& M);

}  // namespace convexkit
