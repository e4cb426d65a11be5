#include "convexkit/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "convexkit/errors.hpp"

namespace convexkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dim(const Vec& x, Eigen::Index n) {
    if (x.size() != n) throw DimensionMismatch("set dimension " + std::to_string(n) + ", point " + std::to_string(x.size()));
}

}  // namespace

Vec ConstraintSet::lmo(const Vec&) const {
    throw UnsupportedOperation("linear minimization oracle not available for " + kind());
}

bool ConstraintSet::chord(const Vec&, const Vec&, double&, double&) const { return false; }

double Unconstrained::outer_radius() const { return kInf; }
double Unconstrained::inner_radius() const { return kInf; }

// ---------------------------------------------------------------- Ball

Ball::Ball(Eigen::Index dim, double radius, Vec center) : radius_(radius), center_(std::move(center)) {
    if (radius <= 0) throw DomainError("ball radius must be positive");
    if (center_.size() == 0) center_ = Vec::Zero(dim);
    check_dim(center_, dim);
}

Vec Ball::project(const Vec& x) const {
    check_dim(x, dim());
    const Vec d = x - center_;
    const double r = d.norm();
    if (r <= radius_) return x;
    return center_ + d * (radius_ / r);
}

Vec Ball::lmo(const Vec& g) const {
    check_dim(g, dim());
    const double n = g.norm();
    if (n == 0) return center_;
    return center_ - g * (radius_ / n);
}

bool Ball::contains(const Vec& x, double tol) const {
    check_dim(x, dim());
    return (x - center_).norm() <= radius_ + tol;
}

std::optional<Vec> Ball::separate(const Vec& x) const {
    if (contains(x, 0.0)) return std::nullopt;
    return Vec((x - center_).normalized());
}

bool Ball::chord(const Vec& x, const Vec& d, double& lo, double& hi) const {
    // |x - c + s d|^2 = r^2
    const Vec y = x - center_;
    const double a = d.squaredNorm();
    if (a == 0) return false;
    const double b = y.dot(d);
    const double c = y.squaredNorm() - radius_ * radius_;
    const double disc = b * b - a * c;
    if (disc < 0) {
        lo = hi = 0;
        return true;
    }
    const double sq = std::sqrt(disc);
    lo = (-b - sq) / a;
    hi = (-b + sq) / a;
    return true;
}

// ---------------------------------------------------------------- Simplex

Vec project_simplex(const Vec& y, double mass) {
    const Eigen::Index n = y.size();
    std::vector<double> u(y.data(), y.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        cumsum += u[j];
        const double t = (cumsum - mass) / static_cast<double>(j + 1);
        if (u[j] - t > 0) theta = t;
    }
    return (y.array() - theta).max(0.0).matrix();
}

Vec Simplex::project(const Vec& x) const {
    check_dim(x, dim_);
    return project_simplex(x, mass_);
}

Vec Simplex::lmo(const Vec& g) const {
    check_dim(g, dim_);
    Eigen::Index i;
    g.minCoeff(&i);
    Vec v = Vec::Zero(dim_);
    v(i) = mass_;
    return v;
}

bool Simplex::contains(const Vec& x, double tol) const {
    check_dim(x, dim_);
    return x.minCoeff() >= -tol && std::abs(x.sum() - mass_) <= tol * std::max(1.0, mass_) * std::sqrt(static_cast<double>(dim_));
}

std::optional<Vec> Simplex::separate(const Vec& x) const {
    if (contains(x, 0.0)) return std::nullopt;
    // The separator from the projection is valid for any closed convex set.
    const Vec w = x - project(x);
    if (w.norm() == 0) return std::nullopt;
    return Vec(w.normalized());
}

// ---------------------------------------------------------------- L1 ball

Vec L1Ball::project(const Vec& x) const {
    check_dim(x, dim_);
    if (x.lpNorm<1>() <= radius_) return x;
    const Vec a = project_simplex(x.cwiseAbs(), radius_);
    return a.cwiseProduct(x.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; }));
}

Vec L1Ball::lmo(const Vec& g) const {
    check_dim(g, dim_);
    Eigen::Index i;
    g.cwiseAbs().maxCoeff(&i);
    Vec v = Vec::Zero(dim_);
    v(i) = g(i) > 0 ? -radius_ : radius_;
    return v;
}

bool L1Ball::contains(const Vec& x, double tol) const {
    check_dim(x, dim_);
    return x.lpNorm<1>() <= radius_ + tol;
}

std::optional<Vec> L1Ball::separate(const Vec& x) const {
    if (contains(x, 0.0)) return std::nullopt;
    Vec w = x.unaryExpr([](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); });
    return Vec(w.normalized());
}

double L1Ball::inner_radius() const { return radius_ / std::sqrt(static_cast<double>(dim_)); }

// ---------------------------------------------------------------- Box

Box::Box(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    check_dim(hi_, lo_.size());
    if ((hi_ - lo_).minCoeff() < 0) throw DomainError("box lower bound exceeds upper bound");
}

Vec Box::project(const Vec& x) const {
    check_dim(x, dim());
    return x.cwiseMax(lo_).cwiseMin(hi_);
}

Vec Box::lmo(const Vec& g) const {
    check_dim(g, dim());
    Vec v(dim());
    for (Eigen::Index i = 0; i < dim(); ++i) v(i) = g(i) > 0 ? lo_(i) : hi_(i);
    return v;
}

bool Box::contains(const Vec& x, double tol) const {
    check_dim(x, dim());
    return (x - lo_).minCoeff() >= -tol && (hi_ - x).minCoeff() >= -tol;
}

std::optional<Vec> Box::separate(const Vec& x) const {
    check_dim(x, dim());
    Eigen::Index i_lo, i_hi;
    const double v_lo = (lo_ - x).maxCoeff(&i_lo);
    const double v_hi = (x - hi_).maxCoeff(&i_hi);
    if (v_lo <= 0 && v_hi <= 0) return std::nullopt;
    Vec w = Vec::Zero(dim());
    if (v_hi >= v_lo) w(i_hi) = 1.0;
    else w(i_lo) = -1.0;
    return w;
}

double Box::outer_radius() const { return lo_.cwiseAbs().cwiseMax(hi_.cwiseAbs()).norm(); }

double Box::inner_radius() const { return 0.5 * (hi_ - lo_).minCoeff(); }

bool Box::chord(const Vec& x, const Vec& d, double& lo, double& hi) const {
    lo = -kInf;
    hi = kInf;
    for (Eigen::Index i = 0; i < dim(); ++i) {
        if (d(i) == 0) {
            if (x(i) < lo_(i) || x(i) > hi_(i)) {
                lo = hi = 0;
                return true;
            }
            continue;
        }
        double a = (lo_(i) - x(i)) / d(i);
        double b = (hi_(i) - x(i)) / d(i);
        if (a > b) std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) return false;
    return true;
}

// ---------------------------------------------------------------- Spectrahedron

Mat Spectrahedron::unflatten(const Vec& x) const {
    check_dim(x, n_ * n_);
    return Eigen::Map<const Mat>(x.data(), n_, n_);
}

Vec Spectrahedron::flatten(const Mat& X) { return Eigen::Map<const Vec>(X.data(), X.size()); }

Vec Spectrahedron::project(const Vec& x) const {
    const auto eig = sym_eig(symmetrize(unflatten(x)));
    const Vec lam = project_simplex(eig.eigenvalues, mass_);
    return flatten(eig.eigenvectors * lam.asDiagonal() * eig.eigenvectors.transpose());
}

Vec Spectrahedron::lmo(const Vec& g) const {
    const auto eig = sym_eig(symmetrize(unflatten(g)));
    const Vec v = eig.eigenvectors.col(n_ - 1);
    return flatten(mass_ * v * v.transpose());
}

bool Spectrahedron::contains(const Vec& x, double tol) const {
    const Mat X = unflatten(x);
    if ((X - X.transpose()).cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(X.trace() - mass_) > tol * std::max(1.0, mass_) * static_cast<double>(n_)) return false;
    return sym_eig(symmetrize(X)).eigenvalues.minCoeff() >= -tol;
}

std::optional<Vec> Spectrahedron::separate(const Vec& x) const {
    if (contains(x, 0.0)) return std::nullopt;
    const Vec w = x - project(x);
    if (w.norm() == 0) return std::nullopt;
    return Vec(w.normalized());
}

// ---------------------------------------------------------------- Polytope

Polytope::Polytope(Mat A, Vec b, double outer_radius_hint) : A_(std::move(A)), b_(std::move(b)), outer_hint_(outer_radius_hint) {
    check_dim(b_, A_.rows());
}

void Polytope::add_row(const Vec& a, double beta) {
    check_dim(a, A_.cols());
    A_.conservativeResize(A_.rows() + 1, Eigen::NoChange);
    A_.row(A_.rows() - 1) = a.transpose();
    b_.conservativeResize(b_.size() + 1);
    b_(b_.size() - 1) = beta;
}

Vec Polytope::project(const Vec& x) const {
    check_dim(x, dim());
    if (contains(x, 0.0)) return x;
    const Eigen::Index m = A_.rows();
    const Vec row_sq = A_.rowwise().squaredNorm();
    Vec y = x;
    Mat incr = Mat::Zero(dim(), m);
    for (int sweep = 0; sweep < 100000; ++sweep) {
        const Vec prev = y;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (row_sq(i) == 0) continue;
            const Vec z = y + incr.col(i);
            const double viol = A_.row(i).dot(z) - b_(i);
            const Vec p = viol > 0 ? Vec(z - (viol / row_sq(i)) * A_.row(i).transpose()) : z;
            incr.col(i) = z - p;
            y = p;
        }
        if ((y - prev).norm() <= 1e-12 * std::max(1.0, y.norm())) return y;
    }
    throw NoConvergence("Dykstra projection onto polytope did not converge");
}

bool Polytope::contains(const Vec& x, double tol) const {
    check_dim(x, dim());
    if (A_.rows() == 0) return true;
    return (A_ * x - b_).maxCoeff() <= tol;
}

std::optional<Vec> Polytope::separate(const Vec& x) const {
    check_dim(x, dim());
    if (A_.rows() == 0) return std::nullopt;
    const Vec norms = A_.rowwise().norm();
    Vec viol = A_ * x - b_;
    for (Eigen::Index i = 0; i < viol.size(); ++i) viol(i) = norms(i) > 0 ? viol(i) / norms(i) : -kInf;
    Eigen::Index i;
    if (viol.maxCoeff(&i) <= 0) return std::nullopt;
    return Vec(A_.row(i).transpose() / norms(i));
}

double Polytope::outer_radius() const {
    if (outer_hint_ > 0) return outer_hint_;
    return kInf;
}

double Polytope::inner_radius() const { return 0.0; }

bool Polytope::chord(const Vec& x, const Vec& d, double& lo, double& hi) const {
    lo = -kInf;
    hi = kInf;
    const Vec ad = A_ * d;
    const Vec slack = b_ - A_ * x;
    for (Eigen::Index i = 0; i < ad.size(); ++i) {
        if (ad(i) > 0) hi = std::min(hi, slack(i) / ad(i));
        else if (ad(i) < 0) lo = std::max(lo, slack(i) / ad(i));
        else if (slack(i) < 0) {
            lo = hi = 0;
            return true;
        }
    }
    return std::isfinite(lo) && std::isfinite(hi);
}

SetPtr standard_set(const std::string& kind, Eigen::Index dim, double radius) {
    if (kind == "ball") return std::make_shared<Ball>(dim, radius);
    if (kind == "simplex") return std::make_shared<Simplex>(dim, radius);
    if (kind == "l1ball") return std::make_shared<L1Ball>(dim, radius);
    if (kind == "box") return std::make_shared<Box>(Vec::Constant(dim, -radius), Vec::Constant(dim, radius));
    if (kind == "spectrahedron") return std::make_shared<Spectrahedron>(dim, radius);
    if (kind == "unconstrained") return std::make_shared<Unconstrained>(dim);
    throw ConfigError("unknown constraint set kind '" + kind + "'");
}

}  // namespace convexkit
