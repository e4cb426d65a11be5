#pragma once

#include <memory>
#include <optional>
#include <string>

#include "convexkit/linalg.hpp"

namespace convexkit {

// A convex body with Euclidean projection, linear minimization, membership
// and separation. separate(x) returns w with w^T x > w^T y for every y in the
// set, and is empty exactly when contains(x) holds.
class ConstraintSet {
public:
    virtual ~ConstraintSet() = default;
    virtual std::string kind() const = 0;
    virtual Eigen::Index dim() const = 0;
    virtual Vec project(const Vec& x) const = 0;
    virtual Vec lmo(const Vec& g) const;
    virtual bool contains(const Vec& x, double tol = 1e-9) const = 0;
    virtual std::optional<Vec> separate(const Vec& x) const = 0;
    // Radius of a ball centered at the origin containing the set, and radius
    // of some ball contained in it (0 when the interior is empty).
    virtual double outer_radius() const = 0;
    virtual double inner_radius() const = 0;
    // Euclidean diameter (or an upper bound on it).
    virtual double diameter() const { return 2.0 * outer_radius(); }
    // Parameter range [lo, hi] of the chord {x + s d} inside the set, when it
    // can be computed in closed form.
    virtual bool chord(const Vec& x, const Vec& d, double& lo, double& hi) const;
};

using SetPtr = std::shared_ptr<const ConstraintSet>;

class Unconstrained : public ConstraintSet {
public:
    explicit Unconstrained(Eigen::Index dim) : dim_(dim) {}
    std::string kind() const override { return "unconstrained"; }
    Eigen::Index dim() const override { return dim_; }
    Vec project(const Vec& x) const override { return x; }
    bool contains(const Vec&, double) const override { return true; }
    std::optional<Vec> separate(const Vec&) const override { return std::nullopt; }
    double outer_radius() const override;
    double inner_radius() const override;

private:
    Eigen::Index dim_;
};

class Ball : public ConstraintSet {
public:
    Ball(Eigen::Index dim, double radius, Vec center = Vec());
    std::string kind() const override { return "ball"; }
    Eigen::Index dim() const override { return center_.size(); }
    Vec project(const Vec& x) const override;
    Vec lmo(const Vec& g) const override;
    bool contains(const Vec& x, double tol = 1e-9) const override;
    std::optional<Vec> separate(const Vec& x) const override;
    double outer_radius() const override { return center_.norm() + radius_; }
    double inner_radius() const override { return radius_; }
    double diameter() const override { return 2.0 * radius_; }
    bool chord(const Vec& x, const Vec& d, double& lo, double& hi) const override;
    double radius() const { return radius_; }
    const Vec& center() const { return center_; }

private:
    double radius_;
    Vec center_;
};

// {x >= 0, sum x = mass}
class Simplex : public ConstraintSet {
public:
    explicit Simplex(Eigen::Index dim, double mass = 1.0) : dim_(dim), mass_(mass) {}
    std::string kind() const override { return "simplex"; }
    Eigen::Index dim() const override { return dim_; }
    Vec project(const Vec& x) const override;
    Vec lmo(const Vec& g) const override;
    bool contains(const Vec& x, double tol = 1e-9) const override;
    std::optional<Vec> separate(const Vec& x) const override;
    double outer_radius() const override { return mass_; }
    double inner_radius() const override { return 0.0; }
    double diameter() const override { return mass_ * std::sqrt(2.0); }
    double mass() const { return mass_; }

private:
    Eigen::Index dim_;
    double mass_;
};

// {||x||_1 <= radius}
class L1Ball : public ConstraintSet {
public:
    L1Ball(Eigen::Index dim, double radius) : dim_(dim), radius_(radius) {}
    std::string kind() const override { return "l1ball"; }
    Eigen::Index dim() const override { return dim_; }
    Vec project(const Vec& x) const override;
    Vec lmo(const Vec& g) const override;
    bool contains(const Vec& x, double tol = 1e-9) const override;
    std::optional<Vec> separate(const Vec& x) const override;
    double outer_radius() const override { return radius_; }
    double inner_radius() const override;
    double radius() const { return radius_; }

private:
    Eigen::Index dim_;
    double radius_;
};

class Box : public ConstraintSet {
public:
    Box(Vec lo, Vec hi);
    std::string kind() const override { return "box"; }
    Eigen::Index dim() const override { return lo_.size(); }
    Vec project(const Vec& x) const override;
    Vec lmo(const Vec& g) const override;
    bool contains(const Vec& x, double tol = 1e-9) const override;
    std::optional<Vec> separate(const Vec& x) const override;
    double outer_radius() const override;
    double inner_radius() const override;
    double diameter() const override { return (hi_ - lo_).norm(); }
    bool chord(const Vec& x, const Vec& d, double& lo, double& hi) const override;
    const Vec& lower() const { return lo_; }
    const Vec& upper() const { return hi_; }

private:
    Vec lo_, hi_;
};

// Symmetric n x n matrices X >= 0 with trace(X) = mass, stored as the
// column-major flattening of X (dimension n^2).
class Spectrahedron : public ConstraintSet {
public:
    explicit Spectrahedron(Eigen::Index n, double mass = 1.0) : n_(n), mass_(mass) {}
    std::string kind() const override { return "spectrahedron"; }
    Eigen::Index dim() const override { return n_ * n_; }
    Eigen::Index side() const { return n_; }
    Vec project(const Vec& x) const override;
    Vec lmo(const Vec& g) const override;
    bool contains(const Vec& x, double tol = 1e-9) const override;
    std::optional<Vec> separate(const Vec& x) const override;
    double outer_radius() const override { return mass_; }
    double inner_radius() const override { return 0.0; }
    double diameter() const override { return mass_ * std::sqrt(2.0); }

    Mat unflatten(const Vec& x) const;
    static Vec flatten(const Mat& X);

private:
    Eigen::Index n_;
    double mass_;
};

// {x : A x <= b}
class Polytope : public ConstraintSet {
public:
    Polytope(Mat A, Vec b, double outer_radius_hint = -1.0);
    std::string kind() const override { return "polytope"; }
    Eigen::Index dim() const override { return A_.cols(); }
    // Euclidean projection by Dykstra's alternating projections onto the
    // half-spaces; accurate to about 1e-12 in the iterate change.
    Vec project(const Vec& x) const override;
    bool contains(const Vec& x, double tol = 1e-9) const override;
    // Most violated row, normalized.
    std::optional<Vec> separate(const Vec& x) const override;
    double outer_radius() const override;
    double inner_radius() const override;
    bool chord(const Vec& x, const Vec& d, double& lo, double& hi) const override;
    const Mat& A() const { return A_; }
    const Vec& b() const { return b_; }
    void add_row(const Vec& a, double beta);

private:
    Mat A_;
    Vec b_;
    double outer_hint_;
};

// Euclidean projection onto {x >= 0, sum x = mass} by sorting.
Vec project_simplex(const Vec& y, double mass = 1.0);

// kind in {ball, simplex, l1ball, box, spectrahedron}; for box the set is
// [-radius, radius]^dim, for simplex and spectrahedron radius is the mass, and
// for spectrahedron dim is the matrix side.
SetPtr standard_set(const std::string& kind, Eigen::Index dim, double radius = 1.0);

}  // namespace convexkit
