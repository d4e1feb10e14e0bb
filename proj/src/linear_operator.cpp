#include "qnsplit/linear_operator.hpp"

#include <cmath>
#include <random>

namespace qnsplit {

LinearOperator::LinearOperator(Eigen::Index in_dim, Eigen::Index out_dim)
    : in_dim_(in_dim), out_dim_(out_dim) {
    if (in_dim <= 0 || out_dim <= 0) throw ParameterError("linear operator dimensions must be positive");
}

Vector LinearOperator::apply(const Vector& x) const {
    require_dim(x, in_dim_, kind() + " apply");
    return apply_unchecked(x);
}

Vector LinearOperator::adjoint(const Vector& y) const {
    require_dim(y, out_dim_, kind() + " adjoint");
    return adjoint_unchecked(y);
}

namespace {

class ScaledIdentityOperator final : public LinearOperator {
public:
    ScaledIdentityOperator(Eigen::Index n, double s) : LinearOperator(n, n), scale_(s) {}
    double norm_bound() const override { return std::abs(scale_); }
    std::string kind() const override { return scale_ == 1.0 ? "identity" : "scaled-identity"; }

protected:
    Vector apply_unchecked(const Vector& x) const override {
        if (scale_ == 1.0) return x;
        return scale_ * x;
    }
    Vector adjoint_unchecked(const Vector& y) const override { return apply_unchecked(y); }

private:
    double scale_;
};

class DenseOperator final : public LinearOperator {
public:
    explicit DenseOperator(Matrix m)
        : LinearOperator(m.cols(), m.rows()), m_(std::move(m)), bound_(m_.norm()) {}
    double norm_bound() const override { return bound_; }
    std::string kind() const override { return "dense"; }

protected:
    Vector apply_unchecked(const Vector& x) const override { return m_ * x; }
    Vector adjoint_unchecked(const Vector& y) const override { return m_.transpose() * y; }

private:
    Matrix m_;
    double bound_;  // Frobenius norm
};

class DiagonalOperator final : public LinearOperator {
public:
    explicit DiagonalOperator(Vector d)
        : LinearOperator(d.size(), d.size()), d_(std::move(d)), bound_(d_.cwiseAbs().maxCoeff()) {}
    double norm_bound() const override { return bound_; }
    std::string kind() const override { return "diagonal"; }

protected:
    Vector apply_unchecked(const Vector& x) const override { return d_.cwiseProduct(x); }
    Vector adjoint_unchecked(const Vector& y) const override { return d_.cwiseProduct(y); }

private:
    Vector d_;
    double bound_;
};

class ForwardDifference2d final : public LinearOperator {
public:
    ForwardDifference2d(Eigen::Index rows, Eigen::Index cols)
        : LinearOperator(rows * cols, 2 * rows * cols), rows_(rows), cols_(cols) {}
    double norm_bound() const override { return std::sqrt(8.0); }
    std::string kind() const override { return "forward-difference-2d"; }

protected:
    Vector apply_unchecked(const Vector& x) const override {
        Vector out(out_dim());
        for (Eigen::Index r = 0; r < rows_; ++r) {
            for (Eigen::Index c = 0; c < cols_; ++c) {
                const Eigen::Index i = r * cols_ + c;
                out[2 * i] = c + 1 < cols_ ? x[i + 1] - x[i] : 0.0;
                out[2 * i + 1] = r + 1 < rows_ ? x[i + cols_] - x[i] : 0.0;
            }
        }
        return out;
    }

    Vector adjoint_unchecked(const Vector& y) const override {
        Vector out = Vector::Zero(in_dim());
        for (Eigen::Index r = 0; r < rows_; ++r) {
            for (Eigen::Index c = 0; c < cols_; ++c) {
                const Eigen::Index i = r * cols_ + c;
                if (c + 1 < cols_) {
                    out[i + 1] += y[2 * i];
                    out[i] -= y[2 * i];
                }
                if (r + 1 < rows_) {
                    out[i + cols_] += y[2 * i + 1];
                    out[i] -= y[2 * i + 1];
                }
            }
        }
        return out;
    }

private:
    Eigen::Index rows_;
    Eigen::Index cols_;
};

// Maps an out-of-range coordinate back into [0, n) or returns -1 (zero padding).
Eigen::Index boundary_index(Eigen::Index i, Eigen::Index n, Boundary b) {
    if (i >= 0 && i < n) return i;
    if (b == Boundary::zero) return -1;
    const Eigen::Index period = 2 * n;
    Eigen::Index m = ((i % period) + period) % period;
    return m < n ? m : period - 1 - m;
}

class Convolution2d final : public LinearOperator {
public:
    Convolution2d(const Matrix& kernel, Eigen::Index rows, Eigen::Index cols, Boundary boundary)
        : LinearOperator(rows * cols, rows * cols),
          kernel_(kernel), rows_(rows), cols_(cols), boundary_(boundary) {
        if (kernel.rows() % 2 == 0 || kernel.cols() % 2 == 0)
            throw ParameterError("convolution kernel must have odd side lengths");
        bound_ = compute_bound();
    }
    double norm_bound() const override { return bound_; }
    std::string kind() const override { return "convolution-2d"; }

protected:
    Vector apply_unchecked(const Vector& x) const override {
        Vector out = Vector::Zero(out_dim());
        visit([&](Eigen::Index dst, Eigen::Index src, double w) { out[dst] += w * x[src]; });
        return out;
    }

    Vector adjoint_unchecked(const Vector& y) const override {
        Vector out = Vector::Zero(in_dim());
        visit([&](Eigen::Index dst, Eigen::Index src, double w) { out[src] += w * y[dst]; });
        return out;
    }

private:
    template <class F>
    void visit(F&& f) const {
        const Eigen::Index hr = kernel_.rows() / 2;
        const Eigen::Index hc = kernel_.cols() / 2;
        for (Eigen::Index r = 0; r < rows_; ++r) {
            for (Eigen::Index c = 0; c < cols_; ++c) {
                const Eigen::Index dst = r * cols_ + c;
                for (Eigen::Index kr = 0; kr < kernel_.rows(); ++kr) {
                    const Eigen::Index sr = boundary_index(r + kr - hr, rows_, boundary_);
                    if (sr < 0) continue;
                    for (Eigen::Index kc = 0; kc < kernel_.cols(); ++kc) {
                        const Eigen::Index sc = boundary_index(c + kc - hc, cols_, boundary_);
                        if (sc < 0) continue;
                        f(dst, sr * cols_ + sc, kernel_(kr, kc));
                    }
                }
            }
        }
    }

    // sqrt(||A||_1 ||A||_inf) from absolute row and column sums.
    double compute_bound() const {
        Vector row_sum = Vector::Zero(out_dim());
        Vector col_sum = Vector::Zero(in_dim());
        visit([&](Eigen::Index dst, Eigen::Index src, double w) {
            row_sum[dst] += std::abs(w);
            col_sum[src] += std::abs(w);
        });
        return std::sqrt(row_sum.maxCoeff() * col_sum.maxCoeff());
    }

    Matrix kernel_;
    Eigen::Index rows_;
    Eigen::Index cols_;
    Boundary boundary_;
    double bound_ = 0.0;
};

class BlockOperator final : public LinearOperator {
public:
    BlockOperator(std::vector<std::vector<LinearOperatorPtr>> blocks, std::vector<Eigen::Index> row_sizes,
                  std::vector<Eigen::Index> col_sizes)
        : LinearOperator(sum(col_sizes), sum(row_sizes)),
          blocks_(std::move(blocks)), row_sizes_(std::move(row_sizes)), col_sizes_(std::move(col_sizes)) {
        double frob = 0.0;
        for (const auto& row : blocks_)
            for (const auto& b : row)
                if (b) frob += b->norm_bound() * b->norm_bound();
        bound_ = std::sqrt(frob);
    }
    double norm_bound() const override { return bound_; }
    std::string kind() const override { return "block"; }

protected:
    Vector apply_unchecked(const Vector& x) const override {
        Vector out = Vector::Zero(out_dim());
        Eigen::Index ro = 0;
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            Eigen::Index co = 0;
            for (std::size_t j = 0; j < blocks_[i].size(); ++j) {
                if (blocks_[i][j]) out.segment(ro, row_sizes_[i]) += blocks_[i][j]->apply(x.segment(co, col_sizes_[j]));
                co += col_sizes_[j];
            }
            ro += row_sizes_[i];
        }
        return out;
    }

    Vector adjoint_unchecked(const Vector& y) const override {
        Vector out = Vector::Zero(in_dim());
        Eigen::Index ro = 0;
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            Eigen::Index co = 0;
            for (std::size_t j = 0; j < blocks_[i].size(); ++j) {
                if (blocks_[i][j]) out.segment(co, col_sizes_[j]) += blocks_[i][j]->adjoint(y.segment(ro, row_sizes_[i]));
                co += col_sizes_[j];
            }
            ro += row_sizes_[i];
        }
        return out;
    }

private:
    static Eigen::Index sum(const std::vector<Eigen::Index>& v) {
        Eigen::Index s = 0;
        for (auto x : v) s += x;
        return s;
    }

    std::vector<std::vector<LinearOperatorPtr>> blocks_;
    std::vector<Eigen::Index> row_sizes_;
    std::vector<Eigen::Index> col_sizes_;
    double bound_ = 0.0;
};

}  // namespace

LinearOperatorPtr make_identity(Eigen::Index n) { return std::make_shared<ScaledIdentityOperator>(n, 1.0); }

LinearOperatorPtr make_scaled_identity(Eigen::Index n, double scale) {
    return std::make_shared<ScaledIdentityOperator>(n, scale);
}

LinearOperatorPtr make_dense(Matrix m) { return std::make_shared<DenseOperator>(std::move(m)); }

LinearOperatorPtr make_diagonal(Vector d) { return std::make_shared<DiagonalOperator>(std::move(d)); }

LinearOperatorPtr make_forward_difference_2d(Eigen::Index rows, Eigen::Index cols) {
    return std::make_shared<ForwardDifference2d>(rows, cols);
}

LinearOperatorPtr make_convolution_2d(const Matrix& kernel, Eigen::Index rows, Eigen::Index cols,
                                      Boundary boundary) {
    return std::make_shared<Convolution2d>(kernel, rows, cols, boundary);
}

LinearOperatorPtr make_block(std::vector<std::vector<LinearOperatorPtr>> blocks) {
    if (blocks.empty() || blocks.front().empty()) throw ParameterError("block operator needs at least one block");
    const std::size_t n_cols = blocks.front().size();
    std::vector<Eigen::Index> row_sizes(blocks.size(), -1);
    std::vector<Eigen::Index> col_sizes(n_cols, -1);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].size() != n_cols) throw ParameterError("block operator rows must have equal length");
        for (std::size_t j = 0; j < n_cols; ++j) {
            const auto& b = blocks[i][j];
            if (!b) continue;
            if (row_sizes[i] >= 0 && row_sizes[i] != b->out_dim())
                throw DimensionError("block row " + std::to_string(i), static_cast<long>(row_sizes[i]),
                                     static_cast<long>(b->out_dim()));
            if (col_sizes[j] >= 0 && col_sizes[j] != b->in_dim())
                throw DimensionError("block column " + std::to_string(j), static_cast<long>(col_sizes[j]),
                                     static_cast<long>(b->in_dim()));
            row_sizes[i] = b->out_dim();
            col_sizes[j] = b->in_dim();
        }
    }
    for (auto s : row_sizes)
        if (s < 0) throw ParameterError("block operator has an all-zero block row");
    for (auto s : col_sizes)
        if (s < 0) throw ParameterError("block operator has an all-zero block column");
    return std::make_shared<BlockOperator>(std::move(blocks), std::move(row_sizes), std::move(col_sizes));
}

double estimate_operator_norm(const LinearOperator& op, int iterations, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Vector v(op.in_dim());
    for (auto& e : v) e = normal(rng);
    v.normalize();
    double estimate = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Vector w = op.adjoint(op.apply(v));
        const double n = w.norm();
        if (n == 0.0) return 0.0;
        estimate = std::sqrt(n);
        v = w / n;
    }
    return estimate;
}

Matrix to_dense(const LinearOperator& op) {
    Matrix m(op.out_dim(), op.in_dim());
    Vector e = Vector::Zero(op.in_dim());
    for (Eigen::Index j = 0; j < op.in_dim(); ++j) {
        e[j] = 1.0;
        m.col(j) = op.apply(e);
        e[j] = 0.0;
    }
    return m;
}

}  // namespace qnsplit
