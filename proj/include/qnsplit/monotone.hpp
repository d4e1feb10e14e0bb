#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "qnsplit/linear_operator.hpp"
#include "qnsplit/vector.hpp"

namespace qnsplit {

/// Resolvent step: a scalar tau or a per-component diagonal (the inverse of
/// a diagonal metric).
struct Step {
    double scalar = 1.0;
    Vector diagonal;  // empty means scalar

    static Step of(double tau) { return Step{tau, Vector()}; }
    static Step diag(Vector d) { return Step{0.0, std::move(d)}; }

    bool is_scalar() const noexcept { return diagonal.size() == 0; }
    double at(Eigen::Index i) const { return is_scalar() ? scalar : diagonal[i]; }
};

/// Maximally monotone operator T given through its identity-metric resolvent
/// J_{tau T} = (I + tau T)^{-1}, plus its strong-monotonicity modulus.
class MonotoneBlock {
public:
    explicit MonotoneBlock(double gamma = 0.0);
    virtual ~MonotoneBlock() = default;

    virtual Vector resolve(const Vector& z, const Step& step) const = 0;

    /// An element of the Clarke Jacobian of z -> resolve(z, step), applied to
    /// `dir`. Empty when the block has no cheap generalized derivative.
    virtual std::optional<Vector> resolve_derivative(const Vector& z, const Step& step,
                                                     const Vector& dir) const;

    /// Distance from v to T(x); +inf when x lies outside dom T.
    virtual double inclusion_residual(const Vector& x, const Vector& v) const = 0;

    virtual std::string name() const = 0;

    double gamma() const noexcept { return gamma_; }

private:
    double gamma_;
};

using MonotoneBlockPtr = std::shared_ptr<const MonotoneBlock>;

/// T = 0; resolvent is the identity.
MonotoneBlockPtr make_zero_operator();
/// Normal cone of the box [lo, hi]^n (infinite bounds allowed).
MonotoneBlockPtr make_box_normal_cone(double lo, double hi);
/// Normal cone of { y : |y_i|_2 <= mu for every interleaved pair }.
MonotoneBlockPtr make_pairwise_ball_normal_cone(double mu);
/// Subdifferential of lam * |x|_1.
MonotoneBlockPtr make_soft_shrinkage(double lam);
/// Subdifferential of lam * sum_i |p_i|_2 over interleaved pairs.
MonotoneBlockPtr make_group_shrinkage(double lam);

/// Single-valued cocoercive map with cocoercivity beta and strong
/// monotonicity gamma_b.
struct CocoerciveMap {
    std::function<Vector(const Vector&)> apply;
    double beta = 1.0;
    double gamma_b = 0.0;

    Vector operator()(const Vector& x) const { return apply(x); }
};

CocoerciveMap make_zero_map();
/// B(x) = s x, cocoercive with beta = 1/s and strongly monotone with s.
CocoerciveMap make_scaled_identity_map(double s);
/// B(x) = A^T (A x - b); beta = 1 / ||A||^2 from the declared norm bound.
CocoerciveMap make_quadratic_gradient(LinearOperatorPtr a, Vector b);

/// A^T (A x - b).
Vector grad_quadratic(const LinearOperator& a, const Vector& b, const Vector& x);

}  // namespace qnsplit
