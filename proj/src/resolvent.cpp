#include "qnsplit/resolvent.hpp"

#include <cmath>

namespace qnsplit {

RootContext::RootContext(MonotoneBlockPtr t, SpdBasePtr base, MetricSign sign, Matrix u, Vector z, Vector shift)
    : t_(std::move(t)), base_(std::move(base)), sign_(sign), u_(std::move(u)), z_(std::move(z)) {
    if (!t_ || !base_) throw ParameterError("root context needs an operator and a base metric");
    const Eigen::Index n = base_->dim();
    require_dim(z_, n, "root context point");
    if (u_.rows() != n && u_.cols() > 0) throw DimensionError("root context directions", static_cast<long>(n),
                                                              static_cast<long>(u_.rows()));
    auto step = base_->resolvent_step();
    if (!step) throw ParameterError("root context: base metric '" + base_->kind() + "' has no resolvent step");
    step_ = std::move(*step);
    if (u_.cols() > 0) {
        if (sign_ == MetricSign::none) throw ParameterError("root context: directions given without a sign");
        Matrix normalized = u_;
        for (Eigen::Index j = 0; j < u_.cols(); ++j) {
            const double nj = u_.col(j).norm();
            if (nj == 0.0) throw ParameterError("root context: zero direction");
            normalized.col(j) /= nj;
        }
        const double gram_det = (normalized.transpose() * normalized).determinant();
        if (!(gram_det > 1e-12)) throw ParameterError("root context: directions are not linearly independent");
        minv_u_.resize(n, u_.cols());
        for (Eigen::Index j = 0; j < u_.cols(); ++j) minv_u_.col(j) = base_->apply_inverse(u_.col(j));
    } else {
        minv_u_.resize(n, 0);
    }
    if (shift.size() == 0) {
        base_point_ = z_;
    } else {
        require_dim(shift, n, "root context shift");
        base_point_ = z_ - shift;
    }
}

Vector RootContext::argument(const Vector& alpha) const {
    require_dim(alpha, rank(), "root function argument");
    if (rank() == 0) return base_point_;
    const Vector w = minv_u_ * alpha;
    return sign_ == MetricSign::plus ? Vector(base_point_ - w) : Vector(base_point_ + w);
}

Vector RootContext::resolvent_at(const Vector& alpha) const { return t_->resolve(argument(alpha), step_); }

Vector RootContext::eval(const Vector& alpha) const {
    return alpha + u_.transpose() * (z_ - resolvent_at(alpha));
}

Matrix RootContext::jacobian(const Vector& alpha) const {
    const Eigen::Index r = rank();
    const Vector arg = argument(alpha);
    Matrix dj(base_->dim(), r);
    for (Eigen::Index j = 0; j < r; ++j) {
        auto col = t_->resolve_derivative(arg, step_, minv_u_.col(j));
        if (!col) return finite_difference_jacobian([this](const Vector& a) { return eval(a); }, alpha);
        dj.col(j) = *col;
    }
    const Matrix core = u_.transpose() * dj;
    Matrix g = Matrix::Identity(r, r);
    return sign_ == MetricSign::plus ? Matrix(g + core) : Matrix(g - core);
}

double prop_zeta(const Vector& u, const Vector& z, const Vector& jv_at_zero) {
    return u.norm() * (2.0 * z.norm() + jv_at_zero.norm());
}

double RootContext::zeta_estimate() const {
    // J^V_T(0) = J^M_T(-/+ M^{-1} U a0) where a0 = U^T J^V_T(0); one
    // fixed-point step started at J^M_T(0).
    const Vector zero = Vector::Zero(base_->dim());
    const Vector x0 = t_->resolve(zero, step_);
    const Vector a1 = u_.transpose() * x0;
    const Vector w = minv_u_ * a1;
    const Vector x1 = t_->resolve(sign_ == MetricSign::plus ? Vector(-w) : w, step_);
    const double norm_u = u_.norm();
    return norm_u * (z_.norm() + base_point_.norm() + x1.norm());
}

Vector eval_root_l(const RootContext& ctx, const Vector& alpha) { return ctx.eval(alpha); }

RootSolveReport solve_root(const RootContext& ctx, const RootConfig& cfg) {
    RootSolveReport rep;
    if (ctx.rank() == 0) {
        rep.alpha_star = Vector(0);
        rep.converged = true;
        return rep;
    }
    if (ctx.rank() == 1) {
        auto l = [&](double a) { return ctx.eval(Vector::Constant(1, a))[0]; };
        auto slope = [&](double a) { return ctx.jacobian(Vector::Constant(1, a))(0, 0); };
        const double l0 = l(0.0);
        if (std::abs(l0) <= cfg.residual_tol) {
            rep.alpha_star = Vector::Zero(1);
            rep.residual = std::abs(l0);
            rep.converged = true;
            rep.method = RootMethod::hybrid;
            return rep;
        }
        const double zeta = bracket_root(l, ctx.zeta_estimate(), cfg.max_bracket_doublings);
        rep = hybrid_root(l, slope, zeta, cfg);
    } else {
        rep = newton_root([&](const Vector& a) { return ctx.eval(a); },
                          [&](const Vector& a) { return ctx.jacobian(a); }, Vector::Zero(ctx.rank()), cfg);
    }
    if (!rep.converged) throw RootSolveError("low-rank resolvent root solve did not converge", rep.residual);
    return rep;
}

PerturbedResult resolve_perturbed(const MonotoneBlockPtr& t, const SpdBasePtr& m, MetricSign sign, const Matrix& u,
                                  const Vector& z, const RootConfig& cfg) {
    const bool empty = u.cols() == 0 || sign == MetricSign::none;
    RootContext ctx(t, m, empty ? MetricSign::none : sign, empty ? Matrix(m->dim(), 0) : u, z);
    PerturbedResult out;
    out.report = solve_root(ctx, cfg);
    out.x_star = ctx.resolvent_at(out.report.alpha_star);
    return out;
}

PerturbedResult fb_step_perturbed(const MonotoneBlockPtr& a, const CocoerciveMap& b, const SpdBasePtr& m,
                                  MetricSign sign, const Matrix& u, const Vector& z, const RootConfig& cfg) {
    const bool empty = u.cols() == 0 || sign == MetricSign::none;
    Vector shift = m->apply_inverse(b(z));
    RootContext ctx(a, m, empty ? MetricSign::none : sign, empty ? Matrix(m->dim(), 0) : u, z, std::move(shift));
    PerturbedResult out;
    out.report = solve_root(ctx, cfg);
    out.x_star = ctx.resolvent_at(out.report.alpha_star);
    return out;
}

}  // namespace qnsplit
