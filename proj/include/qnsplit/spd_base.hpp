#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "qnsplit/linear_operator.hpp"
#include "qnsplit/monotone.hpp"

namespace qnsplit {

/// Symmetric positive definite base metric M0.
///
/// Three kinds are supported: a scaled identity, a positive diagonal and the
/// primal-dual block [[T^{-1}, -K^T], [-K, S^{-1}]] whose step operators T
/// and S are scalars or diagonals.
class SpdBase {
public:
    struct ScaledIdentity {
        Eigen::Index n;
        double scale;
        double inverse;  // stored separately so from_step(tau) inverts to tau exactly
    };
    struct Diagonal {
        Vector d;
    };
    struct PdhgBlock {
        Step tau;
        Step sigma;
        LinearOperatorPtr k;
    };

    static SpdBase scaled_identity(Eigen::Index n, double scale);
    /// (1/tau) I with apply_inverse multiplying by tau exactly.
    static SpdBase from_step(Eigen::Index n, double tau);
    static SpdBase diagonal(Vector d);
    /// Throws AssumptionViolation unless tau*sigma*||K||^2 < 1 (declared bound).
    static SpdBase pdhg_block(Step tau, Step sigma, LinearOperatorPtr k);

    Eigen::Index dim() const;
    Vector apply(const Vector& x) const;
    /// For the block kind this runs conjugate gradients on the dual Schur
    /// complement to relative residual `cg_tol`; intended for diagnostics and
    /// safeguards.
    Vector apply_inverse(const Vector& x, double cg_tol = 1e-14) const;

    /// C with ||M0|| <= C.
    double norm_bound() const;
    /// sigma with M0 >= sigma I.
    double rho_min() const;

    /// For scaled-identity and diagonal bases, J^{M0}_T = J_{step T} with
    /// this step. Empty for the block kind.
    std::optional<Step> resolvent_step() const;

    std::string kind() const;
    Matrix dense() const;

    const std::variant<ScaledIdentity, Diagonal, PdhgBlock>& data() const noexcept { return data_; }

private:
    explicit SpdBase(std::variant<ScaledIdentity, Diagonal, PdhgBlock> d) : data_(std::move(d)) {}
    std::variant<ScaledIdentity, Diagonal, PdhgBlock> data_;
};

using SpdBasePtr = std::shared_ptr<const SpdBase>;

/// Multiplies x by a scalar or diagonal step.
Vector scale_by(const Step& step, const Vector& x);
double step_max(const Step& step);

}  // namespace qnsplit
