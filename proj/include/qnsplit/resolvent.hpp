#pragma once

#include "qnsplit/metric.hpp"
#include "qnsplit/monotone.hpp"
#include "qnsplit/root_solvers.hpp"

namespace qnsplit {

/// Everything needed to evaluate the r-dimensional root function
///
///   l(a) = a + U^T (z - J^M_T(z - b -/+ M^{-1} U a))
///
/// whose root a* gives J^V_T for V = M +/- U U^T (b = 0) or the
/// forward-backward point J^V_T(z - V^{-1} B z) (b = M^{-1} B z). The upper
/// sign of -/+ belongs to V = M + U U^T.
class RootContext {
public:
    /// `shift` may be empty (no forward step). The base must expose a
    /// resolvent step (scaled identity or diagonal).
    RootContext(MonotoneBlockPtr t, SpdBasePtr base, MetricSign sign, Matrix u, Vector z, Vector shift = Vector());

    Eigen::Index rank() const noexcept { return u_.cols(); }
    const Matrix& directions() const noexcept { return u_; }
    const Vector& z() const noexcept { return z_; }
    MetricSign sign() const noexcept { return sign_; }
    const MonotoneBlock& block() const noexcept { return *t_; }
    const SpdBase& base() const noexcept { return *base_; }
    const Step& step() const noexcept { return step_; }

    /// z - b -/+ M^{-1} U a.
    Vector argument(const Vector& alpha) const;
    /// J^M_T(argument(alpha)).
    Vector resolvent_at(const Vector& alpha) const;
    Vector eval(const Vector& alpha) const;
    /// Clarke-Jacobian element of l at alpha; finite differences when the
    /// block has no generalized derivative.
    Matrix jacobian(const Vector& alpha) const;

    /// Root bracket half-width for r = 1 from |u| (2 |z| + |J^V_T(0)|), with
    /// J^V_T(0) estimated by one fixed-point refinement from J^M_T(0).
    double zeta_estimate() const;

private:
    MonotoneBlockPtr t_;
    SpdBasePtr base_;
    MetricSign sign_;
    Matrix u_;
    Vector z_;
    Vector base_point_;  // z - b
    Matrix minv_u_;      // cached M^{-1} U
    Step step_;
};

/// l(alpha) for the context.
Vector eval_root_l(const RootContext& ctx, const Vector& alpha);

/// |u| (2 |z| + |J^V_T(0)|) for r = 1.
double prop_zeta(const Vector& u, const Vector& z, const Vector& jv_at_zero);

/// Solves l(a) = 0: hybrid bisection/Newton for r = 1, damped semi-smooth
/// Newton from 0 otherwise. Throws RootSolveError on failure.
RootSolveReport solve_root(const RootContext& ctx, const RootConfig& cfg);

struct PerturbedResult {
    Vector x_star;
    RootSolveReport report;
};

/// J^V_T(z) for V = M +/- U U^T. U with zero columns gives J^M_T(z).
PerturbedResult resolve_perturbed(const MonotoneBlockPtr& t, const SpdBasePtr& m, MetricSign sign, const Matrix& u,
                                  const Vector& z, const RootConfig& cfg = {});

/// J^V_A(z - V^{-1} B z) without forming V^{-1}: one M^{-1} application for
/// B z plus the cached M^{-1} U.
PerturbedResult fb_step_perturbed(const MonotoneBlockPtr& a, const CocoerciveMap& b, const SpdBasePtr& m,
                                  MetricSign sign, const Matrix& u, const Vector& z, const RootConfig& cfg = {});

}  // namespace qnsplit
