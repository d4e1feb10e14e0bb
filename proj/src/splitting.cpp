#include "qnsplit/splitting.hpp"

#include <chrono>
#include <cmath>

namespace qnsplit {

void InclusionProblem::validate() const {
    if (!a) throw ParameterError("inclusion problem needs a set-valued operator");
    if (!b.apply) throw ParameterError("inclusion problem needs a single-valued operator");
    if (dim <= 0) throw ParameterError("inclusion problem dimension must be positive");
    if (!(b.beta > 0.0)) throw ParameterError("cocoercivity beta must be positive");
    if (b.gamma_b < 0.0) throw ParameterError("gamma_B must be nonnegative");
}

std::string to_string(AlphaKind k) {
    switch (k) {
        case AlphaKind::constant: return "constant";
        case AlphaKind::fig1: return "fig1";
        case AlphaKind::fig2: return "fig2";
        case AlphaKind::fig2_min: return "fig2-min";
        case AlphaKind::fig3: return "fig3";
        default: return "none";
    }
}

AlphaKind parse_alpha_kind(const std::string& s) {
    for (auto k : {AlphaKind::none, AlphaKind::constant, AlphaKind::fig1, AlphaKind::fig2, AlphaKind::fig2_min,
                   AlphaKind::fig3})
        if (to_string(k) == s) return k;
    throw ParameterError("unknown alpha schedule '" + s + "'");
}

double alpha_schedule(const AlphaSchedule& s, long k, double diff_norm) {
    if (k < 0 || diff_norm < 0.0) throw ParameterError("alpha schedule needs k >= 0 and a nonnegative difference");
    const double kk = static_cast<double>(k);
    const double d = std::max(diff_norm, diff_norm * diff_norm);
    double a = 0.0;
    switch (s.kind) {
        case AlphaKind::none: return 0.0;
        case AlphaKind::constant: a = s.value; break;
        case AlphaKind::fig1:
        case AlphaKind::fig2:
        case AlphaKind::fig2_min: {
            double base;
            if (k == 0) base = s.kind == AlphaKind::fig1 ? 10.0 : 1.0;
            else base = d > 0.0 ? 10.0 / (std::pow(kk, 1.1) * d) : 10.0 / std::pow(kk, 1.1);
            if (s.kind == AlphaKind::fig2 && k > 0) a = std::max(base, 1.0);
            else if (s.kind == AlphaKind::fig2_min && k > 0) a = std::min(base, 1.0);
            else a = base;
            break;
        }
        case AlphaKind::fig3:
            if (k == 0) a = 10.0;
            else a = 10.0 / std::max(kk * kk, kk * kk * diff_norm * diff_norm);
            break;
    }
    return std::min(a, s.lambda);
}

Vector inertial_step(const Vector& z_k, const Vector& z_km1, double alpha_k) {
    require_dim(z_km1, z_k.size(), "inertial step");
    return z_k + alpha_k * (z_k - z_km1);
}

std::optional<double> relaxation_coefficient(const QuasiNewtonMetric& mk, const CocoerciveMap& b, const Vector& z,
                                             const Vector& z_tilde) {
    const Vector d = z - z_tilde;
    const Vector v = metric_apply(mk, d) - (b(z) - b(z_tilde));
    const double vv = v.squaredNorm();
    if (vv == 0.0) return std::nullopt;
    return d.dot(v) / (2.0 * vv);
}

double scheduled_root_tol(const RootConfig& root, bool schedule, long k) {
    if (!schedule || k < 1) return root.residual_tol;
    const double kk = static_cast<double>(k);
    return std::max(root.residual_tol / (kk * kk), 1e-15);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void check_setup(const InclusionProblem& problem, const SpdBasePtr& m0, const Vector& z0) {
    problem.validate();
    if (!m0) throw ParameterError("solver needs a base metric");
    require_dim(z0, problem.dim, "initial point");
    if (m0->dim() != problem.dim)
        throw DimensionError("base metric", static_cast<long>(problem.dim), static_cast<long>(m0->dim()));
}

}  // namespace

SolveResult run_inertial_qnfbs(const InclusionProblem& problem, const SpdBasePtr& m0, const Vector& z0,
                               const SolverConfig& config, const IterateObserver& observer) {
    check_setup(problem, m0, z0);
    SolveResult out;
    Vector z = z0, z_prev = z0;
    Vector bz = problem.b(z), bz_prev = bz;
    for (long k = 0; k < config.max_iter; ++k) {
        const auto t0 = Clock::now();
        IterateRecord rec;
        rec.k = k;
        try {
            const MetricUpdate upd = update_metric(m0, z - z_prev, bz - bz_prev, k, config.metric, problem.b.beta);
            out.schedule.record(upd);
            if (config.keep_metrics) out.metrics.push_back(upd.metric);

            rec.diff_norm = (z - z_prev).norm();
            rec.step_param = alpha_schedule(config.alpha, k, rec.diff_norm);
            const Vector zbar = rec.step_param == 0.0 ? z : inertial_step(z, z_prev, rec.step_param);

            RootConfig rc = config.root;
            rc.residual_tol = scheduled_root_tol(config.root, config.root_tol_schedule, k);
            rec.root_tol = rc.residual_tol;
            PerturbedResult step =
                fb_step_perturbed(problem.a, problem.b, m0, upd.metric.sign, upd.metric.factor(), zbar, rc);

            rec.root_iterations = step.report.total_iterations();
            rec.root_residual = step.report.residual;
            rec.fb_residual = (step.x_star - zbar).norm();
            rec.metric_sign = upd.metric.perturbed() ? upd.metric.sign : MetricSign::none;
            rec.gamma = upd.metric.perturbed() ? upd.metric.gamma : 0.0;

            z_prev = std::move(z);
            z = std::move(step.x_star);
            bz_prev = std::move(bz);
            bz = problem.b(z);
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

SolveResult run_relaxed_qnfbs(const InclusionProblem& problem, const SpdBasePtr& m0, const Vector& z0,
                              const SolverConfig& config, const IterateObserver& observer) {
    check_setup(problem, m0, z0);
    SolveResult out;
    Vector z = z0, z_prev = z0;
    Vector bz = problem.b(z), bz_prev = bz;
    for (long k = 0; k < config.max_iter; ++k) {
        const auto t0 = Clock::now();
        IterateRecord rec;
        rec.k = k;
        bool solved = false;
        Vector fb_point;
        try {
            const MetricUpdate upd = update_metric(m0, z - z_prev, bz - bz_prev, k, config.metric, problem.b.beta);
            out.schedule.record(upd);
            if (config.keep_metrics) out.metrics.push_back(upd.metric);
            rec.diff_norm = (z - z_prev).norm();

            RootConfig rc = config.root;
            rc.residual_tol = scheduled_root_tol(config.root, config.root_tol_schedule, k);
            rec.root_tol = rc.residual_tol;
            PerturbedResult step =
                fb_step_perturbed(problem.a, problem.b, m0, upd.metric.sign, upd.metric.factor(), z, rc);
            rec.root_iterations = step.report.total_iterations();
            rec.root_residual = step.report.residual;
            rec.metric_sign = upd.metric.perturbed() ? upd.metric.sign : MetricSign::none;
            rec.gamma = upd.metric.perturbed() ? upd.metric.gamma : 0.0;

            fb_point = step.x_star;
            const Vector d = z - step.x_star;
            rec.fb_residual = d.norm();
            if (rec.fb_residual / (1.0 + z.norm()) <= config.stop_tol) {
                solved = true;
                z_prev = z;
                z = std::move(step.x_star);
            } else {
                const Vector bz_tilde = problem.b(step.x_star);
                const Vector v = metric_apply(upd.metric, d) - (bz - bz_tilde);
                const double vv = v.squaredNorm();
                if (vv == 0.0) {
                    solved = true;
                    z_prev = z;
                    z = std::move(step.x_star);
                } else {
                    rec.step_param = d.dot(v) / (2.0 * vv);
                    z_prev = z;
                    z = z - rec.step_param * v;
                }
            }
            bz_prev = std::move(bz);
            bz = problem.b(z);
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
