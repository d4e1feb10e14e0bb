#include "qnsplit/monotone.hpp"

#include <cmath>
#include <limits>

#include "qnsplit/prox.hpp"

namespace qnsplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)); }

void require_pair_steps(const Step& step, Eigen::Index n, const char* what) {
    if (step.is_scalar()) return;
    require_dim(step.diagonal, n, what);
    for (Eigen::Index i = 0; i < n; i += 2)
        if (step.diagonal[i] != step.diagonal[i + 1])
            throw ParameterError(std::string(what) + ": diagonal steps must agree within each pixel pair");
}

class ZeroOperator final : public MonotoneBlock {
public:
    Vector resolve(const Vector& z, const Step&) const override { return z; }
    std::optional<Vector> resolve_derivative(const Vector&, const Step&, const Vector& dir) const override {
        return dir;
    }
    double inclusion_residual(const Vector&, const Vector& v) const override { return v.norm(); }
    std::string name() const override { return "zero"; }
};

class BoxNormalCone final : public MonotoneBlock {
public:
    BoxNormalCone(double lo, double hi) : lo_(lo), hi_(hi) {
        if (!(lo <= hi)) throw ParameterError("box normal cone: lower bound exceeds upper bound");
    }

    Vector resolve(const Vector& z, const Step&) const override { return prox_box(z, lo_, hi_); }

    std::optional<Vector> resolve_derivative(const Vector& z, const Step&, const Vector& dir) const override {
        Vector out(dir.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = (z[i] > lo_ && z[i] < hi_) ? dir[i] : 0.0;
        return out;
    }

    double inclusion_residual(const Vector& x, const Vector& v) const override {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double slack = 1e-9 * (1.0 + std::abs(x[i]));
            if (x[i] < lo_ - slack || x[i] > hi_ + slack) return kInf;
            const bool at_lo = near(x[i], lo_);
            const bool at_hi = near(x[i], hi_);
            double d;
            if (at_lo && at_hi) d = 0.0;
            else if (at_hi) d = std::max(0.0, -v[i]);
            else if (at_lo) d = std::max(0.0, v[i]);
            else d = std::abs(v[i]);
            acc += d * d;
        }
        return std::sqrt(acc);
    }

    std::string name() const override { return "box"; }

private:
    double lo_;
    double hi_;
};

class PairwiseBallNormalCone final : public MonotoneBlock {
public:
    explicit PairwiseBallNormalCone(double mu) : mu_(mu) {
        if (!(mu > 0.0)) throw ParameterError("pairwise ball: radius must be positive");
    }

    Vector resolve(const Vector& z, const Step& step) const override {
        require_pair_steps(step, z.size(), "pairwise ball resolve");
        return project_pairwise_l2_ball(z, mu_);
    }

    std::optional<Vector> resolve_derivative(const Vector& z, const Step&, const Vector& dir) const override {
        Vector out = dir;
        for (Eigen::Index i = 0; i < z.size(); i += 2) {
            const double n = std::hypot(z[i], z[i + 1]);
            if (n <= mu_) continue;
            const double px = z[i] / n, py = z[i + 1] / n;
            const double radial = px * dir[i] + py * dir[i + 1];
            const double f = mu_ / n;
            out[i] = f * (dir[i] - radial * px);
            out[i + 1] = f * (dir[i + 1] - radial * py);
        }
        return out;
    }

    double inclusion_residual(const Vector& x, const Vector& v) const override {
        if (x.size() % 2 != 0) throw ParameterError("pairwise ball: odd dimension");
        double acc = 0.0;
        for (Eigen::Index i = 0; i < x.size(); i += 2) {
            const double n = std::hypot(x[i], x[i + 1]);
            if (n > mu_ * (1.0 + 1e-9) + 1e-12) return kInf;
            if (!near(n, mu_)) {
                acc += v[i] * v[i] + v[i + 1] * v[i + 1];
                continue;
            }
            // Normal cone at a boundary point is the outward ray.
            const double px = x[i] / n, py = x[i + 1] / n;
            const double c = std::max(0.0, v[i] * px + v[i + 1] * py);
            const double rx = v[i] - c * px, ry = v[i + 1] - c * py;
            acc += rx * rx + ry * ry;
        }
        return std::sqrt(acc);
    }

    std::string name() const override { return "l2inf-ball"; }

private:
    double mu_;
};

class SoftShrinkage final : public MonotoneBlock {
public:
    explicit SoftShrinkage(double lam) : lam_(lam) {
        if (lam < 0.0) throw ParameterError("soft shrinkage: threshold must be nonnegative");
    }

    Vector resolve(const Vector& z, const Step& step) const override {
        if (step.is_scalar()) return soft_threshold(z, lam_ * step.scalar);
        require_dim(step.diagonal, z.size(), "soft shrinkage step");
        Vector out(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            const double a = std::abs(z[i]) - lam_ * step.diagonal[i];
            out[i] = a > 0.0 ? std::copysign(a, z[i]) : 0.0;
        }
        return out;
    }

    std::optional<Vector> resolve_derivative(const Vector& z, const Step& step, const Vector& dir) const override {
        Vector out(dir.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = std::abs(z[i]) > lam_ * step.at(i) ? dir[i] : 0.0;
        return out;
    }

    double inclusion_residual(const Vector& x, const Vector& v) const override {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            double d;
            if (std::abs(x[i]) <= 1e-14) d = std::max(0.0, std::abs(v[i]) - lam_);
            else d = std::abs(v[i] - std::copysign(lam_, x[i]));
            acc += d * d;
        }
        return std::sqrt(acc);
    }

    std::string name() const override { return "soft-shrinkage"; }

private:
    double lam_;
};

class GroupShrinkage final : public MonotoneBlock {
public:
    explicit GroupShrinkage(double lam) : lam_(lam) {
        if (lam < 0.0) throw ParameterError("group shrinkage: threshold must be nonnegative");
    }

    Vector resolve(const Vector& z, const Step& step) const override {
        require_pair_steps(step, z.size(), "group shrinkage resolve");
        return prox_group_l21(z, lam_ * step.at(0));
    }

    std::optional<Vector> resolve_derivative(const Vector& z, const Step& step, const Vector& dir) const override {
        Vector out(dir.size());
        for (Eigen::Index i = 0; i < z.size(); i += 2) {
            const double t = lam_ * step.at(i);
            const double n = std::hypot(z[i], z[i + 1]);
            if (n <= t) {
                out[i] = out[i + 1] = 0.0;
                continue;
            }
            const double px = z[i] / n, py = z[i + 1] / n;
            const double radial = px * dir[i] + py * dir[i + 1];
            const double f = 1.0 - t / n;
            out[i] = f * dir[i] + (t / n) * radial * px;
            out[i + 1] = f * dir[i + 1] + (t / n) * radial * py;
        }
        return out;
    }

    double inclusion_residual(const Vector& x, const Vector& v) const override {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < x.size(); i += 2) {
            const double n = std::hypot(x[i], x[i + 1]);
            if (n <= 1e-14) {
                const double e = std::max(0.0, std::hypot(v[i], v[i + 1]) - lam_);
                acc += e * e;
            } else {
                const double rx = v[i] - lam_ * x[i] / n, ry = v[i + 1] - lam_ * x[i + 1] / n;
                acc += rx * rx + ry * ry;
            }
        }
        return std::sqrt(acc);
    }

    std::string name() const override { return "group-shrinkage"; }

private:
    double lam_;
};

}  // namespace

MonotoneBlock::MonotoneBlock(double gamma) : gamma_(gamma) {
    if (gamma < 0.0) throw ParameterError("monotonicity modulus must be nonnegative");
}

std::optional<Vector> MonotoneBlock::resolve_derivative(const Vector&, const Step&, const Vector&) const {
    return std::nullopt;
}

MonotoneBlockPtr make_zero_operator() { return std::make_shared<ZeroOperator>(); }
MonotoneBlockPtr make_box_normal_cone(double lo, double hi) { return std::make_shared<BoxNormalCone>(lo, hi); }
MonotoneBlockPtr make_pairwise_ball_normal_cone(double mu) { return std::make_shared<PairwiseBallNormalCone>(mu); }
MonotoneBlockPtr make_soft_shrinkage(double lam) { return std::make_shared<SoftShrinkage>(lam); }
MonotoneBlockPtr make_group_shrinkage(double lam) { return std::make_shared<GroupShrinkage>(lam); }

CocoerciveMap make_zero_map() {
    return CocoerciveMap{[](const Vector& x) { return Vector(Vector::Zero(x.size())); },
                         std::numeric_limits<double>::infinity(), 0.0};
}

CocoerciveMap make_scaled_identity_map(double s) {
    if (!(s > 0.0)) throw ParameterError("scaled identity map needs a positive scale");
    return CocoerciveMap{[s](const Vector& x) { return Vector(s * x); }, 1.0 / s, s};
}

CocoerciveMap make_quadratic_gradient(LinearOperatorPtr a, Vector b) {
    require_dim(b, a->out_dim(), "quadratic gradient data");
    const double l = a->norm_bound();
    return CocoerciveMap{[a, b = std::move(b)](const Vector& x) { return grad_quadratic(*a, b, x); },
                         1.0 / (l * l), 0.0};
}

Vector grad_quadratic(const LinearOperator& a, const Vector& b, const Vector& x) {
    require_dim(b, a.out_dim(), "grad_quadratic data");
    return a.adjoint(a.apply(x) - b);
}

}  // namespace qnsplit
