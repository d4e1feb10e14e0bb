#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qnsplit/spd_base.hpp"

namespace qnsplit {

enum class MetricSign { none, plus, minus };

std::string to_string(MetricSign s);

/// V = M0 +/- gamma * U U^T with U an n x r matrix of directions.
struct QuasiNewtonMetric {
    SpdBasePtr base;
    MetricSign sign = MetricSign::none;
    double gamma = 0.0;
    Matrix directions;  // n x r, may have zero columns

    static QuasiNewtonMetric unperturbed(SpdBasePtr base);

    Eigen::Index dim() const { return base->dim(); }
    bool perturbed() const { return sign != MetricSign::none && gamma > 0.0 && directions.cols() > 0; }
    /// sqrt(gamma) * U, the factor of the low-rank term.
    Matrix factor() const;
    Matrix dense() const;
    /// Upper bound on ||V||.
    double norm_bound() const;
};

/// M0 x +/- gamma U (U^T x) without assembling V.
Vector metric_apply(const QuasiNewtonMetric& v, const Vector& x);

/// Direction of the zero-memory SR1 update. `sign == none` means no update
/// (V = M0); `diagnostic` says why.
struct Osr1Direction {
    MetricSign sign = MetricSign::none;
    Vector u;
    double curvature = 0.0;  // <y - M0 s, s>
    std::string diagnostic;
};

/// d = y - M0 s, u = d / sqrt(|<d, s>|), sign from <d, s>. Curvature with
/// |<d, s>| <= 1e-12 |d| |s| is treated as degenerate.
Osr1Direction osr1_direction(const SpdBase& m0, const Vector& s, const Vector& y);

/// Scale for which (M0 +/- gamma u u^T) s = y holds exactly under the
/// normalization of osr1_direction; always 1.
constexpr double secant_gamma() noexcept { return 1.0; }

/// min(requested, c * (rho_min(M0) - 1/beta) / |u|^2). Throws
/// AssumptionViolation when rho_min(M0) <= 1/beta.
double safeguard_gamma_minus(const SpdBase& m0, const Vector& u, double beta, double c,
                             double requested = std::numeric_limits<double>::infinity());

/// Summable schedule eta_k = eta0 / k^2 (k >= 1; k = 0 uses k = 1).
double summable_eta(long k, double eta0);

/// gamma_k = min(eta_k, rho_min(M0) - 1/beta) / |u|^2; zero when u = 0.
double safeguard_gamma_summable(long k, const Vector& u, double eta0, const SpdBase& m0, double beta);

enum class MetricMode { off, secant, safeguard_a2, safeguard_a1, fixed };

std::string to_string(MetricMode m);
MetricMode parse_metric_mode(const std::string& s);

/// How gamma_k is picked from an osr1 direction.
struct MetricRule {
    MetricMode mode = MetricMode::off;
    double gamma_hat = 1.0;  // fixed mode: gamma = gamma_hat / |u|^2
    double c = 0.5;          // safeguard fraction in (0, 1)
    double eta0 = 1.0;       // summable schedule scale
    /// Minus-sign updates are capped so that gamma u^T M0^{-1} u <= spd_cap,
    /// keeping V positive definite for the secant and fixed modes.
    double spd_cap = 0.9;
};

struct MetricUpdate {
    QuasiNewtonMetric metric;
    Osr1Direction direction;
    double requested_gamma = 0.0;
    double eta = 0.0;  // schedule value used by safeguard_a1, else 0
    bool capped = false;
};

/// Builds M_k from the secant pair (s, y) = (z_k - z_{k-1}, B z_k - B z_{k-1}).
MetricUpdate update_metric(const SpdBasePtr& m0, const Vector& s, const Vector& y, long k, const MetricRule& rule,
                           double beta);

/// Running bookkeeping of the metric sequence.
struct MetricScheduleState {
    std::vector<double> eta;
    double eta_sum = 0.0;
    double sup_norm = 0.0;
    long minus_updates = 0;
    long plus_updates = 0;
    long capped_updates = 0;

    void record(const MetricUpdate& u);
};

struct AssumptionRow {
    long k = 0;
    double margin = 0.0;         // estimate of rho_min(M_k - I/beta)
    bool a2_margin_ok = false;   // margin >= c
    double norm = 0.0;           // ||M_k||
    bool a2_bound_ok = false;    // norm <= C
    double required_eta = 0.0;   // smallest eta with (1 + eta) M_k >= M_{k+1}
    bool a1_chain_ok = true;     // required_eta <= declared eta_k (last row: true)
    bool positive_definite = false;
};

struct AssumptionReport {
    std::vector<AssumptionRow> rows;
    bool dense = true;  // false when Rayleigh sampling was used
    bool a1_holds() const;
    bool a2_holds() const;
};

/// Checks Assumptions 1 and 2 along a metric history. Dense eigen
/// computations up to dimension 64, Rayleigh sampling above. Never throws on
/// violations; it only reports.
AssumptionReport assumption_report(const std::vector<QuasiNewtonMetric>& history, double beta, double c,
                                   double bound_c, const std::function<double(long)>& eta);

}  // namespace qnsplit
