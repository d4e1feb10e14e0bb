#include "qnsplit/metric.hpp"

#include <cmath>
#include <random>

namespace qnsplit {

std::string to_string(MetricSign s) {
    switch (s) {
        case MetricSign::plus: return "plus";
        case MetricSign::minus: return "minus";
        default: return "none";
    }
}

std::string to_string(MetricMode m) {
    switch (m) {
        case MetricMode::secant: return "secant";
        case MetricMode::safeguard_a2: return "safeguard-a2";
        case MetricMode::safeguard_a1: return "safeguard-a1";
        case MetricMode::fixed: return "fixed";
        default: return "off";
    }
}

MetricMode parse_metric_mode(const std::string& s) {
    for (auto m : {MetricMode::off, MetricMode::secant, MetricMode::safeguard_a2, MetricMode::safeguard_a1,
                   MetricMode::fixed})
        if (to_string(m) == s) return m;
    throw ParameterError("unknown metric mode '" + s + "'");
}

QuasiNewtonMetric QuasiNewtonMetric::unperturbed(SpdBasePtr base) {
    QuasiNewtonMetric v;
    v.directions = Matrix(base->dim(), 0);
    v.base = std::move(base);
    return v;
}

Matrix QuasiNewtonMetric::factor() const {
    if (!perturbed()) return Matrix(dim(), 0);
    return std::sqrt(gamma) * directions;
}

Matrix QuasiNewtonMetric::dense() const {
    Matrix m = base->dense();
    if (!perturbed()) return m;
    const Matrix low = gamma * directions * directions.transpose();
    return sign == MetricSign::plus ? Matrix(m + low) : Matrix(m - low);
}

double QuasiNewtonMetric::norm_bound() const {
    double b = base->norm_bound();
    if (perturbed() && sign == MetricSign::plus) b += gamma * directions.squaredNorm();
    return b;
}

Vector metric_apply(const QuasiNewtonMetric& v, const Vector& x) {
    Vector out = v.base->apply(x);
    if (!v.perturbed()) return out;
    const Vector coeff = v.gamma * (v.directions.transpose() * x);
    if (v.sign == MetricSign::plus) out.noalias() += v.directions * coeff;
    else out.noalias() -= v.directions * coeff;
    return out;
}

Osr1Direction osr1_direction(const SpdBase& m0, const Vector& s, const Vector& y) {
    require_dim(s, m0.dim(), "osr1 step");
    require_dim(y, m0.dim(), "osr1 gradient difference");
    Osr1Direction out;
    const double s_norm = s.norm();
    if (s_norm == 0.0) {
        out.diagnostic = "zero step s; metric left at M0";
        return out;
    }
    const Vector d = y - m0.apply(s);
    const double curv = d.dot(s);
    out.curvature = curv;
    if (std::abs(curv) <= 1e-12 * d.norm() * s_norm || curv == 0.0) {
        out.diagnostic = "degenerate curvature <y - M0 s, s>; metric left at M0";
        return out;
    }
    out.sign = curv > 0.0 ? MetricSign::plus : MetricSign::minus;
    out.u = d / std::sqrt(std::abs(curv));
    return out;
}

double safeguard_gamma_minus(const SpdBase& m0, const Vector& u, double beta, double c, double requested) {
    if (!(c > 0.0 && c < 1.0)) throw ParameterError("safeguard fraction c must lie in (0, 1)");
    const double margin = m0.rho_min() - 1.0 / beta;
    if (!(margin > 0.0))
        throw AssumptionViolation("rho_min(M0 - I/beta) = " + std::to_string(margin) +
                                  " is not positive; minus-sign safeguard impossible");
    const double n2 = u.squaredNorm();
    if (n2 == 0.0) return std::min(requested, 0.0);
    return std::min(requested, c * margin / n2);
}

double summable_eta(long k, double eta0) {
    const double kk = static_cast<double>(std::max(k, 1L));
    return eta0 / (kk * kk);
}

double safeguard_gamma_summable(long k, const Vector& u, double eta0, const SpdBase& m0, double beta) {
    const double margin = m0.rho_min() - 1.0 / beta;
    if (!(margin > 0.0))
        throw AssumptionViolation("rho_min(M0 - I/beta) = " + std::to_string(margin) +
                                  " is not positive; summable safeguard impossible");
    const double n2 = u.squaredNorm();
    if (n2 == 0.0) return 0.0;
    return std::min(summable_eta(k, eta0), margin) / n2;
}

MetricUpdate update_metric(const SpdBasePtr& m0, const Vector& s, const Vector& y, long k, const MetricRule& rule,
                           double beta) {
    MetricUpdate out;
    out.metric = QuasiNewtonMetric::unperturbed(m0);
    if (rule.mode == MetricMode::off || k < 1) return out;
    out.direction = osr1_direction(*m0, s, y);
    if (out.direction.sign == MetricSign::none) return out;

    const Vector& u = out.direction.u;
    const bool minus = out.direction.sign == MetricSign::minus;
    double g = 0.0;
    switch (rule.mode) {
        case MetricMode::secant: g = secant_gamma(); break;
        case MetricMode::fixed: g = rule.gamma_hat / u.squaredNorm(); break;
        case MetricMode::safeguard_a2:
            g = minus ? safeguard_gamma_minus(*m0, u, beta, rule.c, secant_gamma()) : secant_gamma();
            break;
        case MetricMode::safeguard_a1:
            out.eta = summable_eta(k, rule.eta0);
            g = safeguard_gamma_summable(k, u, rule.eta0, *m0, beta);
            break;
        case MetricMode::off: break;
    }
    out.requested_gamma = g;
    // u^T M0^{-1} u <= |u|^2 / rho_min, so the solve is skipped when that
    // bound already meets the cap.
    if (minus && (rule.mode == MetricMode::secant || rule.mode == MetricMode::fixed) &&
        g * u.squaredNorm() > rule.spd_cap * m0->rho_min()) {
        const double q = u.dot(m0->apply_inverse(u, 1e-8));
        if (g * q > rule.spd_cap) {
            g = rule.spd_cap / q;
            out.capped = true;
        }
    }
    if (!(g > 0.0) || !std::isfinite(g)) return out;
    out.metric.sign = out.direction.sign;
    out.metric.gamma = g;
    out.metric.directions = u;
    return out;
}

void MetricScheduleState::record(const MetricUpdate& u) {
    eta.push_back(u.eta);
    eta_sum += u.eta;
    sup_norm = std::max(sup_norm, u.metric.norm_bound());
    if (u.metric.perturbed()) {
        if (u.metric.sign == MetricSign::plus) ++plus_updates;
        else ++minus_updates;
    }
    if (u.capped) ++capped_updates;
}

bool AssumptionReport::a1_holds() const {
    for (const auto& r : rows)
        if (!r.a1_chain_ok || !r.positive_definite) return false;
    return true;
}

bool AssumptionReport::a2_holds() const {
    for (const auto& r : rows)
        if (!r.a2_margin_ok || !r.a2_bound_ok) return false;
    return true;
}

AssumptionReport assumption_report(const std::vector<QuasiNewtonMetric>& history, double beta, double c,
                                   double bound_c, const std::function<double(long)>& eta) {
    AssumptionReport rep;
    if (history.empty()) return rep;
    const Eigen::Index n = history.front().dim();
    const double inv_beta = std::isfinite(beta) ? 1.0 / beta : 0.0;
    rep.dense = n <= 64;

    if (rep.dense) {
        std::vector<Matrix> dense;
        dense.reserve(history.size());
        for (const auto& m : history) dense.push_back(m.dense());
        for (std::size_t k = 0; k < history.size(); ++k) {
            AssumptionRow row;
            row.k = static_cast<long>(k);
            Eigen::SelfAdjointEigenSolver<Matrix> es(dense[k], Eigen::EigenvaluesOnly);
            const double lmin = es.eigenvalues().minCoeff();
            row.positive_definite = lmin > 0.0;
            row.margin = lmin - inv_beta;
            row.norm = es.eigenvalues().cwiseAbs().maxCoeff();
            if (k + 1 < history.size()) {
                if (row.positive_definite) {
                    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(dense[k + 1], dense[k],
                                                                         Eigen::EigenvaluesOnly);
                    row.required_eta = std::max(0.0, ges.eigenvalues().maxCoeff() - 1.0);
                } else {
                    row.required_eta = std::numeric_limits<double>::infinity();
                }
            }
            rep.rows.push_back(row);
        }
    } else {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> normal;
        std::vector<Vector> samples;
        for (int i = 0; i < 32; ++i) {
            Vector x(n);
            for (auto& e : x) e = normal(rng);
            samples.push_back(x.normalized());
        }
        for (std::size_t k = 0; k < history.size(); ++k) {
            std::vector<Vector> xs = samples;
            for (std::size_t j = k; j < std::min(k + 2, history.size()); ++j)
                for (Eigen::Index col = 0; col < history[j].directions.cols(); ++col)
                    if (history[j].directions.col(col).norm() > 0.0)
                        xs.push_back(history[j].directions.col(col).normalized());
            AssumptionRow row;
            row.k = static_cast<long>(k);
            double lmin = std::numeric_limits<double>::infinity();
            double ratio = 0.0;
            for (const auto& x : xs) {
                const double q = x.dot(metric_apply(history[k], x));
                lmin = std::min(lmin, q);
                if (k + 1 < history.size() && q > 0.0)
                    ratio = std::max(ratio, x.dot(metric_apply(history[k + 1], x)) / q);
            }
            row.positive_definite = lmin > 0.0;
            row.margin = lmin - inv_beta;
            row.norm = history[k].norm_bound();
            row.required_eta = std::max(0.0, ratio - 1.0);
            rep.rows.push_back(row);
        }
    }
    for (auto& row : rep.rows) {
        row.a2_margin_ok = row.margin >= c;
        row.a2_bound_ok = row.norm <= bound_c;
        const bool last = static_cast<std::size_t>(row.k) + 1 == rep.rows.size();
        row.a1_chain_ok = last || row.required_eta <= eta(row.k) + 1e-12;
    }
    return rep;
}

}  // namespace qnsplit
