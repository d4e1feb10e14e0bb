#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qnsplit/metric.hpp"
#include "qnsplit/monotone.hpp"
#include "qnsplit/resolvent.hpp"

namespace qnsplit {

/// Find z with 0 in A z + B z.
struct InclusionProblem {
    MonotoneBlockPtr a;
    CocoerciveMap b;
    Eigen::Index dim = 0;

    void validate() const;
};

enum class AlphaKind { none, constant, fig1, fig2, fig2_min, fig3 };

std::string to_string(AlphaKind k);
AlphaKind parse_alpha_kind(const std::string& s);

/// Inertial parameter rule. The fig* kinds reproduce the extrapolation
/// schedules used in the imaging experiments; `fig2` keeps the literal
/// max{., 1} form and therefore never decays below 1.
struct AlphaSchedule {
    AlphaKind kind = AlphaKind::none;
    double value = 0.0;    // constant kind
    double lambda = 10.0;  // upper clamp
};

/// alpha_k for iteration k with d = |z_k - z_{k-1}|, clamped into (0, lambda].
double alpha_schedule(const AlphaSchedule& s, long k, double diff_norm);

/// z_k + alpha (z_k - z_{k-1}).
Vector inertial_step(const Vector& z_k, const Vector& z_km1, double alpha_k);

enum class SolverVariant { inertial, relaxed };

struct SolverConfig {
    SolverVariant variant = SolverVariant::inertial;
    MetricRule metric;
    AlphaSchedule alpha;
    long max_iter = 1000;
    /// Stop when |z_k - z~_k| / (1 + |z_k|) <= stop_tol.
    double stop_tol = 1e-9;
    RootConfig root;
    /// Root residual tolerance tol_k = root.residual_tol / k^2 (floored at
    /// 1e-15) standing in for the summable error sequence.
    bool root_tol_schedule = true;
    bool keep_metrics = false;
};

struct IterateRecord {
    long k = 0;
    double diff_norm = 0.0;   // |z_k - z_{k-1}|
    double step_param = 0.0;  // alpha_k (inertial) or t_k (relaxed)
    int root_iterations = 0;
    double root_residual = 0.0;
    double root_tol = 0.0;
    double fb_residual = 0.0;  // |z_k - z~_k| (relaxed) or |z_{k+1} - zbar_k| (inertial)
    MetricSign metric_sign = MetricSign::none;
    double gamma = 0.0;
    double time_ms = 0.0;
};

/// Called exactly once per iteration, in order, with the new iterate z_{k+1}
/// and the forward-backward point of the iteration (z_{k+1} itself for the
/// inertial variants, z~_k for the relaxed ones).
using IterateObserver = std::function<void(const IterateRecord&, const Vector& z, const Vector& fb_point)>;

struct SolveResult {
    Vector z;
    std::vector<IterateRecord> records;
    bool converged = false;
    MetricScheduleState schedule;
    std::vector<QuasiNewtonMetric> metrics;  // only with keep_metrics
};

/// t_k = <d, v> / (2 |v|^2) with d = z - z~ and v = M_k d - (B z - B z~).
/// Empty when v = 0, i.e. z~ already solves the inclusion.
std::optional<double> relaxation_coefficient(const QuasiNewtonMetric& mk, const CocoerciveMap& b, const Vector& z,
                                             const Vector& z_tilde);

double scheduled_root_tol(const RootConfig& root, bool schedule, long k);

/// Inertial quasi-Newton forward-backward splitting.
SolveResult run_inertial_qnfbs(const InclusionProblem& problem, const SpdBasePtr& m0, const Vector& z0,
                               const SolverConfig& config, const IterateObserver& observer = {});

/// Quasi-Newton forward-backward splitting with relaxation step.
SolveResult run_relaxed_qnfbs(const InclusionProblem& problem, const SpdBasePtr& m0, const Vector& z0,
                              const SolverConfig& config, const IterateObserver& observer = {});

}  // namespace qnsplit
