#include "qnsplit/root_solvers.hpp"

#include <cmath>
#include <limits>

#include "qnsplit/errors.hpp"

namespace qnsplit {

std::string to_string(RootMethod m) {
    switch (m) {
        case RootMethod::bisection: return "bisection";
        case RootMethod::newton: return "newton";
        case RootMethod::hybrid: return "hybrid";
        default: return "none";
    }
}

RootSolveReport bisection_root(const ScalarFunction& l, double zeta, double tol, int max_iter,
                               double residual_tol) {
    RootSolveReport rep;
    rep.method = RootMethod::bisection;
    double lo = -zeta, hi = zeta;
    const double f_lo = l(lo), f_hi = l(hi);
    if ((f_lo > 0.0 && f_hi > 0.0) || (f_lo < 0.0 && f_hi < 0.0))
        throw RootSolveError("bisection: root not bracketed by [-zeta, zeta]",
                             std::min(std::abs(f_lo), std::abs(f_hi)));
    double prev = std::numeric_limits<double>::quiet_NaN();
    double alpha = 0.0, f = 0.0;
    for (int k = 0; k < max_iter; ++k) {
        alpha = 0.5 * (lo + hi);
        f = l(alpha);
        ++rep.bisection_iterations;
        if (f > 0.0) hi = alpha;
        else lo = alpha;
        if (std::abs(f) <= residual_tol || (k >= 1 && std::abs(alpha - prev) < tol)) {
            rep.converged = true;
            break;
        }
        prev = alpha;
    }
    rep.alpha_star = Vector::Constant(1, alpha);
    rep.residual = std::abs(f);
    return rep;
}

Matrix finite_difference_jacobian(const VectorFunction& l, const Vector& alpha) {
    const Eigen::Index r = alpha.size();
    Matrix g(r, r);
    for (Eigen::Index j = 0; j < r; ++j) {
        const double h = 1e-6 * (1.0 + std::abs(alpha[j]));
        Vector ap = alpha, am = alpha;
        ap[j] += h;
        am[j] -= h;
        g.col(j) = (l(ap) - l(am)) / (2.0 * h);
    }
    return g;
}

namespace {

// Minimal-residual iterations on G d = -f until ||G d + f|| <= eta ||G||_2.
Vector inexact_solve(const Matrix& g, const Vector& f, double eta) {
    const double gnorm = Eigen::JacobiSVD<Matrix>(g).singularValues()(0);
    Vector d = Vector::Zero(f.size());
    Vector res = -f;
    for (int it = 0; it < 100 && res.norm() > eta * gnorm; ++it) {
        const Vector gr = g * res;
        const double den = gr.squaredNorm();
        if (den == 0.0) break;
        const double w = gr.dot(res) / den;
        d += w * res;
        res -= w * gr;
    }
    return d;
}

}  // namespace

RootSolveReport newton_root(const VectorFunction& l, const JacobianFunction& jacobian, Vector alpha0,
                            const RootConfig& cfg) {
    RootSolveReport rep;
    rep.method = RootMethod::newton;
    Vector alpha = std::move(alpha0);
    Vector f = l(alpha);
    double fn = f.norm();
    for (int it = 0; it < cfg.newton_max && fn > cfg.residual_tol; ++it) {
        const Matrix g = jacobian ? jacobian(alpha) : finite_difference_jacobian(l, alpha);
        Vector step;
        if (cfg.newton_eta > 0.0) {
            step = inexact_solve(g, f, cfg.newton_eta);
        } else {
            Eigen::FullPivLU<Matrix> lu(g);
            if (!lu.isInvertible()) {
                rep.singular_jacobian = true;
                break;
            }
            step = lu.solve(-f);
        }
        // Damped step: the Newton direction is a descent direction for |l|^2.
        double t = 1.0;
        Vector cand = alpha + step;
        Vector fc = l(cand);
        for (int h = 0; h < 30 && fc.norm() >= fn && fn > 0.0; ++h) {
            t *= 0.5;
            cand = alpha + t * step;
            fc = l(cand);
        }
        ++rep.newton_iterations;
        if (fc.norm() >= fn) {
            alpha = cand;
            f = fc;
            fn = f.norm();
            break;
        }
        alpha = cand;
        f = fc;
        fn = f.norm();
    }
    rep.alpha_star = alpha;
    rep.residual = fn;
    rep.converged = fn <= cfg.residual_tol;
    return rep;
}

double bracket_root(const ScalarFunction& l, double zeta, int max_doublings) {
    double z = zeta > 0.0 ? zeta : 1.0;
    double best = std::numeric_limits<double>::infinity();
    for (int d = 0; d <= max_doublings; ++d) {
        const double lo = l(-z), hi = l(z);
        if (lo <= 0.0 && hi >= 0.0) return z;
        best = std::min({best, std::abs(lo), std::abs(hi)});
        z *= 2.0;
    }
    throw RootSolveError("root bound violated: l(-zeta) and l(zeta) share a sign after " +
                             std::to_string(max_doublings) + " doublings",
                         best);
}

RootSolveReport hybrid_root(const ScalarFunction& l, const ScalarFunction& slope, double zeta,
                            const RootConfig& cfg) {
    RootSolveReport rep;
    rep.method = RootMethod::hybrid;
    double lo = -zeta, hi = zeta;
    const double switch_width = cfg.switch_width > 0.0 ? cfg.switch_width : 1e-3 * 2.0 * zeta;
    const double width_tol = cfg.width_rel * zeta;
    const int cap = cfg.bisection_max + cfg.newton_max;

    double alpha = 0.0;
    double f = std::numeric_limits<double>::infinity();
    auto finish = [&](double a, double fa, bool ok) {
        rep.alpha_star = Vector::Constant(1, a);
        rep.residual = std::abs(fa);
        rep.converged = ok;
        return rep;
    };
    auto shrink = [&](double a, double fa) {
        if (fa > 0.0) hi = std::min(hi, a);
        else lo = std::max(lo, a);
    };
    auto slope_at = [&](double a) {
        if (slope) return slope(a);
        const double h = 1e-6 * (1.0 + std::abs(a));
        return (l(a + h) - l(a - h)) / (2.0 * h);
    };

    double target_width = switch_width;
    while (rep.total_iterations() < cap) {
        // Bisection phase.
        while (hi - lo > target_width && rep.bisection_iterations < cfg.bisection_max) {
            alpha = 0.5 * (lo + hi);
            f = l(alpha);
            ++rep.bisection_iterations;
            if (std::abs(f) <= cfg.residual_tol) return finish(alpha, f, true);
            shrink(alpha, f);
            if (hi - lo <= width_tol) return finish(0.5 * (lo + hi), f, true);
        }
        if (hi - lo <= width_tol || rep.bisection_iterations >= cfg.bisection_max)
            return finish(alpha, f, hi - lo <= width_tol);

        // Newton phase from the bracket midpoint.
        alpha = 0.5 * (lo + hi);
        f = l(alpha);
        ++rep.newton_iterations;
        if (std::abs(f) <= cfg.residual_tol) return finish(alpha, f, true);
        shrink(alpha, f);
        int stalls = 0;
        bool fallback = false;
        while (!fallback && rep.total_iterations() < cap && rep.newton_iterations < cfg.newton_max) {
            const double g = slope_at(alpha);
            if (!(g > 0.0) || !std::isfinite(g)) {
                fallback = true;
                break;
            }
            const double cand = alpha - f / g;
            if (!(cand > lo && cand < hi)) {
                fallback = true;
                break;
            }
            const double fc = l(cand);
            ++rep.newton_iterations;
            if (std::abs(fc) <= cfg.residual_tol) return finish(cand, fc, true);
            shrink(cand, fc);
            stalls = std::abs(fc) >= std::abs(f) ? stalls + 1 : 0;
            alpha = cand;
            f = fc;
            if (stalls >= 3) fallback = true;
            if (hi - lo <= width_tol) return finish(alpha, f, true);
        }
        if (!fallback) break;
        ++rep.resumes;
        target_width = 0.25 * (hi - lo);
    }
    return finish(alpha, f, std::abs(f) <= cfg.residual_tol || hi - lo <= width_tol);
}

}  // namespace qnsplit
