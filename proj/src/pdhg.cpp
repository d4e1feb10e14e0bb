#include "qnsplit/pdhg.hpp"

#include <chrono>
#include <cmath>

namespace qnsplit {

double SaddleProblem::beta() const { return std::min(grad_g.beta, grad_f.beta); }

void SaddleProblem::validate() const {
    if (!k) throw ParameterError("saddle problem needs a coupling operator");
    if (!g || !f) throw ParameterError("saddle problem needs both nonsmooth blocks");
    if (!grad_g.apply || !grad_f.apply) throw ParameterError("saddle problem needs both smooth gradients");
    if (!(beta() > 0.0)) throw ParameterError("saddle problem cocoercivity must be positive");
}

Vector SaddleProblem::b(const Vector& z) const {
    require_dim(z, dim(), "saddle iterate");
    return join(grad_g(z.head(primal_dim())), grad_f(z.tail(dual_dim())));
}

CocoerciveMap SaddleProblem::joint_b() const {
    const SaddleProblem self = *this;
    return CocoerciveMap{[self](const Vector& z) { return self.b(z); }, beta(),
                         std::min(grad_g.gamma_b, grad_f.gamma_b)};
}

PdhgMetric build_pdhg_metric(Step tau, Step sigma, LinearOperatorPtr k) {
    if (!k) throw ParameterError("pdhg metric needs a coupling operator");
    auto positive = [](const Step& s) {
        return s.is_scalar() ? s.scalar > 0.0 : (s.diagonal.size() > 0 && s.diagonal.minCoeff() > 0.0);
    };
    if (!positive(tau) || !positive(sigma)) throw ParameterError("pdhg steps must be positive");
    auto base = std::make_shared<const SpdBase>(SpdBase::pdhg_block(tau, sigma, k));
    return PdhgMetric{std::move(tau), std::move(sigma), std::move(k), std::move(base)};
}

PdhgMetric build_pdhg_metric(double tau, double sigma, LinearOperatorPtr k) {
    return build_pdhg_metric(Step::of(tau), Step::of(sigma), std::move(k));
}

Vector join(const Vector& x, const Vector& y) {
    Vector z(x.size() + y.size());
    z << x, y;
    return z;
}

namespace {

/// Evaluates z+(a) and l(a) for a fixed zbar.
class PdhgRoot {
public:
    PdhgRoot(const SaddleProblem& sp, const PdhgMetric& m, MetricSign sign, const Matrix& u, const Vector& xbar,
             const Vector& ybar)
        : sp_(sp), m_(m), u_(u), xbar_(xbar), ybar_(ybar) {
        const double s = sign == MetricSign::minus ? -1.0 : 1.0;
        x_base_ = xbar - scale_by(m.tau, sp.grad_g(xbar) + sp.k->adjoint(ybar));
        gy_ = sp.grad_f(ybar);
        if (u.cols() > 0) {
            tux_ = -s * scale_by_cols(m.tau, u.topRows(sp.primal_dim()));
            suy_ = -s * scale_by_cols(m.sigma, u.bottomRows(sp.dual_dim()));
        }
    }

    void step(const Vector& alpha, Vector& x, Vector& y, Vector* xa = nullptr, Vector* ya = nullptr) const {
        Vector xarg = u_.cols() > 0 ? Vector(x_base_ + tux_ * alpha) : x_base_;
        x = sp_.g->resolve(xarg, m_.tau);
        Vector yarg = ybar_ + scale_by(m_.sigma, sp_.k->apply(2.0 * x - xbar_) - gy_);
        if (u_.cols() > 0) yarg += suy_ * alpha;
        y = sp_.f->resolve(yarg, m_.sigma);
        if (xa) *xa = std::move(xarg);
        if (ya) *ya = std::move(yarg);
    }

    Vector eval(const Vector& alpha) const {
        Vector x, y;
        step(alpha, x, y);
        return alpha + u_.topRows(sp_.primal_dim()).transpose() * (xbar_ - x) +
               u_.bottomRows(sp_.dual_dim()).transpose() * (ybar_ - y);
    }

    /// Chain rule through the prox derivatives; finite differences when a
    /// block has none.
    Matrix jacobian(const Vector& alpha) const {
        Vector x, y, xa, ya;
        step(alpha, x, y, &xa, &ya);
        const Eigen::Index r = u_.cols();
        Matrix jac = Matrix::Identity(r, r);
        for (Eigen::Index j = 0; j < r; ++j) {
            auto dx = sp_.g->resolve_derivative(xa, m_.tau, tux_.col(j));
            if (!dx) return finite_difference_jacobian([this](const Vector& a) { return eval(a); }, alpha);
            Vector dy_in = scale_by(m_.sigma, sp_.k->apply(2.0 * *dx)) + suy_.col(j);
            auto dy = sp_.f->resolve_derivative(ya, m_.sigma, dy_in);
            if (!dy) return finite_difference_jacobian([this](const Vector& a) { return eval(a); }, alpha);
            jac.col(j) -= u_.topRows(sp_.primal_dim()).transpose() * *dx +
                          u_.bottomRows(sp_.dual_dim()).transpose() * *dy;
        }
        return jac;
    }

    double zeta() const {
        Vector x, y;
        const Vector zero = Vector::Zero(u_.cols());
        step(zero, x, y);
        const double zbar = std::sqrt(xbar_.squaredNorm() + ybar_.squaredNorm());
        const double zp = std::sqrt(x.squaredNorm() + y.squaredNorm());
        return u_.norm() * (zbar + zp) + eval(zero).norm();
    }

private:
    static Matrix scale_by_cols(const Step& s, const Matrix& m) {
        if (s.is_scalar()) return s.scalar * m;
        return s.diagonal.asDiagonal() * m;
    }

    const SaddleProblem& sp_;
    const PdhgMetric& m_;
    const Matrix& u_;
    const Vector& xbar_;
    const Vector& ybar_;
    Vector x_base_;
    Vector gy_;
    Matrix tux_;
    Matrix suy_;
};

}  // namespace

PdhgStepResult pdhg_fb_step(const SaddleProblem& sp, const PdhgMetric& m, MetricSign sign, const Matrix& u,
                            const Vector& xbar, const Vector& ybar, const RootConfig& cfg) {
    require_dim(xbar, sp.primal_dim(), "pdhg primal point");
    require_dim(ybar, sp.dual_dim(), "pdhg dual point");
    PdhgStepResult out;
    const bool empty = u.cols() == 0 || sign == MetricSign::none;
    if (empty) {
        out.x = sp.g->resolve(xbar - scale_by(m.tau, sp.grad_g(xbar) + sp.k->adjoint(ybar)), m.tau);
        out.y = sp.f->resolve(ybar + scale_by(m.sigma, sp.k->apply(2.0 * out.x - xbar) - sp.grad_f(ybar)), m.sigma);
        out.report.alpha_star = Vector(0);
        out.report.converged = true;
        return out;
    }
    if (u.rows() != sp.dim())
        throw DimensionError("pdhg directions", static_cast<long>(sp.dim()), static_cast<long>(u.rows()));

    PdhgRoot root(sp, m, sign, u, xbar, ybar);
    RootSolveReport rep;
    if (u.cols() == 1) {
        auto l = [&](double a) { return root.eval(Vector::Constant(1, a))[0]; };
        auto slope = [&](double a) { return root.jacobian(Vector::Constant(1, a))(0, 0); };
        const double l0 = l(0.0);
        if (std::abs(l0) <= cfg.residual_tol) {
            rep.alpha_star = Vector::Zero(1);
            rep.residual = std::abs(l0);
            rep.converged = true;
            rep.method = RootMethod::hybrid;
        } else {
            const double zeta = bracket_root(l, root.zeta(), cfg.max_bracket_doublings);
            rep = hybrid_root(l, slope, zeta, cfg);
        }
    } else {
        rep = newton_root([&](const Vector& a) { return root.eval(a); },
                          [&](const Vector& a) { return root.jacobian(a); }, Vector::Zero(u.cols()), cfg);
    }
    if (!rep.converged) throw RootSolveError("pdhg low-rank root solve did not converge", rep.residual);
    root.step(rep.alpha_star, out.x, out.y);
    out.report = std::move(rep);
    return out;
}

double saddle_inclusion_residual(const SaddleProblem& sp, const Vector& z, const Vector& v) {
    require_dim(z, sp.dim(), "saddle point");
    require_dim(v, sp.dim(), "saddle residual direction");
    const Vector x = z.head(sp.primal_dim());
    const Vector y = z.tail(sp.dual_dim());
    const double rx = sp.g->inclusion_residual(x, v.head(sp.primal_dim()) - sp.k->adjoint(y));
    const double ry = sp.f->inclusion_residual(y, v.tail(sp.dual_dim()) + sp.k->apply(x));
    return std::hypot(rx, ry);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void check_setup(const SaddleProblem& sp, const PdhgMetric& m, const Vector& z0) {
    sp.validate();
    require_dim(z0, sp.dim(), "pdhg initial point");
    if (m.base->dim() != sp.dim())
        throw DimensionError("pdhg metric", static_cast<long>(sp.dim()), static_cast<long>(m.base->dim()));
}

RootConfig scheduled(const SolverConfig& config, long k) {
    RootConfig rc = config.root;
    rc.residual_tol = scheduled_root_tol(config.root, config.root_tol_schedule, k);
    return rc;
}

void fill_metric_fields(IterateRecord& rec, const QuasiNewtonMetric& metric) {
    rec.metric_sign = metric.perturbed() ? metric.sign : MetricSign::none;
    rec.gamma = metric.perturbed() ? metric.gamma : 0.0;
}

}  // namespace

SolveResult run_iqn_pdhg(const SaddleProblem& sp, const PdhgMetric& m, const Vector& z0, const SolverConfig& config,
                         const IterateObserver& observer) {
    check_setup(sp, m, z0);
    const Eigen::Index n = sp.primal_dim(), d = sp.dual_dim();
    const double beta = sp.beta();
    SolveResult out;
    Vector z = z0, z_prev = z0;
    Vector bz = sp.b(z), bz_prev = bz;
    for (long k = 0; k < config.max_iter; ++k) {
        const auto t0 = Clock::now();
        IterateRecord rec;
        rec.k = k;
        try {
            const MetricUpdate upd = update_metric(m.base, z - z_prev, bz - bz_prev, k, config.metric, beta);
            out.schedule.record(upd);
            if (config.keep_metrics) out.metrics.push_back(upd.metric);
            fill_metric_fields(rec, upd.metric);

            rec.diff_norm = (z - z_prev).norm();
            rec.step_param = alpha_schedule(config.alpha, k, rec.diff_norm);
            const Vector zbar = rec.step_param == 0.0 ? z : inertial_step(z, z_prev, rec.step_param);

            const RootConfig rc = scheduled(config, k);
            rec.root_tol = rc.residual_tol;
            PdhgStepResult step =
                pdhg_fb_step(sp, m, upd.metric.sign, upd.metric.factor(), zbar.head(n), zbar.tail(d), rc);
            rec.root_iterations = step.report.total_iterations();
            rec.root_residual = step.report.residual;

            Vector z_next = join(step.x, step.y);
            rec.fb_residual = (z_next - zbar).norm();
            z_prev = std::move(z);
            z = std::move(z_next);
            bz_prev = std::move(bz);
            bz = sp.b(z);
        } catch (const std::exception& e) {
            throw SolverError(e.what(), k);
        }
        rec.time_ms = elapsed_ms(t0);
        out.records.push_back(rec);
        if (observer) observer(rec, z, z);
        if (rec.fb_residual / (1.0 + z.norm()) <= config.stop_tol) {
            out.converged = true;
            break;
        }
    }
    out.z = std::move(z);
    return out;
}

SolveResult run_rqn_pdhg(const SaddleProblem& sp, const PdhgMetric& m, const Vector& z0, const SolverConfig& config,
                         const IterateObserver& observer) {
    check_setup(sp, m, z0);
    const Eigen::Index n = sp.primal_dim(), d = sp.dual_dim();
    const double beta = sp.beta();
    SolveResult out;
    Vector z = z0, z_prev = z0;
    Vector bz = sp.b(z), bz_prev = bz;
    for (long k = 0; k < config.max_iter; ++k) {
        const auto t0 = Clock::now();
        IterateRecord rec;
        rec.k = k;
        bool solved = false;
        Vector fb_point;
        try {
            const MetricUpdate upd = update_metric(m.base, z - z_prev, bz - bz_prev, k, config.metric, beta);
            out.schedule.record(upd);
            if (config.keep_metrics) out.metrics.push_back(upd.metric);
            fill_metric_fields(rec, upd.metric);
            rec.diff_norm = (z - z_prev).norm();

            const RootConfig rc = scheduled(config, k);
            rec.root_tol = rc.residual_tol;
            PdhgStepResult step = pdhg_fb_step(sp, m, upd.metric.sign, upd.metric.factor(), z.head(n), z.tail(d), rc);
            rec.root_iterations = step.report.total_iterations();
            rec.root_residual = step.report.residual;

            Vector z_tilde = join(step.x, step.y);
            fb_point = z_tilde;
            const Vector diff = z - z_tilde;
            rec.fb_residual = diff.norm();
            z_prev = z;
            if (rec.fb_residual / (1.0 + z.norm()) <= config.stop_tol) {
                solved = true;
                z = std::move(z_tilde);
            } else {
                const Vector v = metric_apply(upd.metric, diff) + sp.b(z_tilde) - bz;
                const double vv = v.squaredNorm();
                if (vv == 0.0) {
                    solved = true;
                    z = std::move(z_tilde);
                } else {
                    rec.step_param = diff.dot(v) / (2.0 * vv);
                    z -= rec.step_param * v;
                }
            }
            bz_prev = std::move(bz);
            bz = sp.b(z);
        } catch (const std::exception& e) {
            throw SolverError(e.what(), k);
        }
        rec.time_ms = elapsed_ms(t0);
        out.records.push_back(rec);
        if (observer) observer(rec, z, fb_point);
        if (solved) {
            out.converged = true;
            break;
        }
    }
    out.z = std::move(z);
    return out;
}

}  // namespace qnsplit
