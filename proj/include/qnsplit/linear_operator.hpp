#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qnsplit/vector.hpp"

namespace qnsplit {

/// Bounded linear map between finite-dimensional real spaces.
///
/// Every concrete kind carries a declared operator-norm upper bound that
/// solvers use for step-size and positive-definiteness checks.
class LinearOperator {
public:
    LinearOperator(Eigen::Index in_dim, Eigen::Index out_dim);
    virtual ~LinearOperator() = default;

    Eigen::Index in_dim() const noexcept { return in_dim_; }
    Eigen::Index out_dim() const noexcept { return out_dim_; }

    Vector apply(const Vector& x) const;
    Vector adjoint(const Vector& y) const;

    /// Upper bound on the spectral norm.
    virtual double norm_bound() const = 0;
    virtual std::string kind() const = 0;

protected:
    virtual Vector apply_unchecked(const Vector& x) const = 0;
    virtual Vector adjoint_unchecked(const Vector& y) const = 0;

private:
    Eigen::Index in_dim_;
    Eigen::Index out_dim_;
};

using LinearOperatorPtr = std::shared_ptr<const LinearOperator>;

enum class Boundary { zero, symmetric };

LinearOperatorPtr make_identity(Eigen::Index n);
LinearOperatorPtr make_scaled_identity(Eigen::Index n, double scale);
LinearOperatorPtr make_dense(Matrix m);
LinearOperatorPtr make_diagonal(Vector d);

/// Forward differences on a rows x cols image stored row-major. The output
/// interleaves (dx, dy) per pixel; the last column/row has zero difference
/// (replicate boundary). Declared norm bound sqrt(8).
LinearOperatorPtr make_forward_difference_2d(Eigen::Index rows, Eigen::Index cols);

/// 2-D correlation with an odd-sized kernel on a rows x cols row-major image.
/// With Boundary::symmetric (half-sample reflection) a symmetric nonnegative
/// kernel summing to one yields a doubly stochastic operator.
LinearOperatorPtr make_convolution_2d(const Matrix& kernel, Eigen::Index rows, Eigen::Index cols,
                                      Boundary boundary = Boundary::symmetric);

/// Block operator; `blocks[i][j]` maps column block j into row block i.
/// Null entries are zero blocks. Every row and column needs at least one
/// non-null entry so the block sizes are determined.
LinearOperatorPtr make_block(std::vector<std::vector<LinearOperatorPtr>> blocks);

/// Power iteration on L^T L; returns an estimate of ||L||.
double estimate_operator_norm(const LinearOperator& op, int iterations = 200,
                              std::uint64_t seed = 7);

/// Dense matrix of the operator, column by column. Only for small sizes.
Matrix to_dense(const LinearOperator& op);

}  // namespace qnsplit
