#pragma once

#include <functional>
#include <string>

#include "qnsplit/vector.hpp"

namespace qnsplit {

struct RootConfig {
    double residual_tol = 1e-10;
    /// Bisection stops once consecutive midpoints differ by less than
    /// width_rel * zeta.
    double width_rel = 1e-12;
    int newton_max = 50;
    int bisection_max = 200;
    /// Hybrid switches from bisection to Newton once the bracket is this
    /// narrow; 0 selects 1e-3 * 2 zeta.
    double switch_width = 0.0;
    /// Inexact Newton: accept ||G d + l|| <= eta ||G||. 0 means an exact solve.
    double newton_eta = 0.0;
    /// Doublings of zeta tried when the bracket does not contain the root.
    int max_bracket_doublings = 8;
};

enum class RootMethod { none, bisection, newton, hybrid };

std::string to_string(RootMethod m);

struct RootSolveReport {
    Vector alpha_star;
    double residual = 0.0;
    int bisection_iterations = 0;
    int newton_iterations = 0;
    int resumes = 0;  // hybrid: times Newton handed back to bisection
    RootMethod method = RootMethod::none;
    bool converged = false;
    bool singular_jacobian = false;

    int total_iterations() const { return bisection_iterations + newton_iterations; }
};

using ScalarFunction = std::function<double(double)>;
using VectorFunction = std::function<Vector(const Vector&)>;
using JacobianFunction = std::function<Matrix(const Vector&)>;

/// Bisection on [-zeta, zeta] for an increasing scalar function. Stops when
/// consecutive midpoints differ by less than `tol`, or when |l| <=
/// residual_tol. Throws RootSolveError when l(-zeta) and l(zeta) share a sign.
RootSolveReport bisection_root(const ScalarFunction& l, double zeta, double tol, int max_iter,
                               double residual_tol = 0.0);

/// Semi-smooth Newton with a Clarke-Jacobian element per step. A missing
/// jacobian (empty function) falls back to central differences. Steps that
/// fail to decrease |l| are damped by halving.
RootSolveReport newton_root(const VectorFunction& l, const JacobianFunction& jacobian, Vector alpha0,
                            const RootConfig& cfg);

/// Bisection down to cfg.switch_width, then safeguarded Newton from the
/// midpoint. Newton steps leaving the bracket, or three steps without a
/// residual decrease, hand control back to bisection.
RootSolveReport hybrid_root(const ScalarFunction& l, const ScalarFunction& slope, double zeta,
                            const RootConfig& cfg);

/// Central-difference Jacobian with step 1e-6 (1 + |alpha_j|).
Matrix finite_difference_jacobian(const VectorFunction& l, const Vector& alpha);

/// Grows zeta (doubling) until l(-zeta) <= 0 <= l(zeta). Throws
/// RootSolveError after `max_doublings` failures.
double bracket_root(const ScalarFunction& l, double zeta, int max_doublings);

}  // namespace qnsplit
