#pragma once

#include "qnsplit/splitting.hpp"

namespace qnsplit {

/// min_x max_y <K x, y> + g(x) + G(x) - f(y) - F(y).
///
/// g and f enter through their subdifferentials (resolved with the primal
/// and dual steps), G and F through cocoercive gradients.
struct SaddleProblem {
    LinearOperatorPtr k;
    MonotoneBlockPtr g;
    MonotoneBlockPtr f;
    CocoerciveMap grad_g;
    CocoerciveMap grad_f;

    Eigen::Index primal_dim() const { return k->in_dim(); }
    Eigen::Index dual_dim() const { return k->out_dim(); }
    Eigen::Index dim() const { return primal_dim() + dual_dim(); }
    double beta() const;
    void validate() const;

    /// B(x, y) = (grad G(x), grad F(y)).
    Vector b(const Vector& z) const;
    CocoerciveMap joint_b() const;
};

/// Block metric M = [[T^{-1}, -K^T], [-K, S^{-1}]].
struct PdhgMetric {
    Step tau;
    Step sigma;
    LinearOperatorPtr k;
    SpdBasePtr base;

    double rho_min() const { return base->rho_min(); }
    Matrix dense() const { return base->dense(); }
};

/// Throws ParameterError for nonpositive steps and AssumptionViolation when
/// tau sigma ||K||^2 >= 1.
PdhgMetric build_pdhg_metric(Step tau, Step sigma, LinearOperatorPtr k);
PdhgMetric build_pdhg_metric(double tau, double sigma, LinearOperatorPtr k);

Vector join(const Vector& x, const Vector& y);

struct PdhgStepResult {
    Vector x;
    Vector y;
    RootSolveReport report;
};

/// Forward-backward step in the metric M +/- U U^T:
///   x+ = prox_g(xbar - T grad G(xbar) - T K^T ybar -/+ T U_x a)
///   y+ = prox_f(ybar - S grad F(ybar) + S K (2 x+ - xbar) -/+ S U_y a)
/// where a solves a + U^T (zbar - z+(a)) = 0. No inverse of M is needed.
/// U has dim() rows (primal block first); zero columns give the classical
/// PDHG step.
PdhgStepResult pdhg_fb_step(const SaddleProblem& sp, const PdhgMetric& m, MetricSign sign, const Matrix& u,
                            const Vector& xbar, const Vector& ybar, const RootConfig& cfg = {});

/// Distance from v to T(z) for T(x, y) = (dg(x) + K^T y, df(y) - K x).
double saddle_inclusion_residual(const SaddleProblem& sp, const Vector& z, const Vector& v);

/// Inertial quasi-Newton PDHG. Iterates are z = (x, y).
SolveResult run_iqn_pdhg(const SaddleProblem& sp, const PdhgMetric& m, const Vector& z0, const SolverConfig& config,
                         const IterateObserver& observer = {});

/// Quasi-Newton PDHG with relaxation step.
SolveResult run_rqn_pdhg(const SaddleProblem& sp, const PdhgMetric& m, const Vector& z0, const SolverConfig& config,
                         const IterateObserver& observer = {});

}  // namespace qnsplit
