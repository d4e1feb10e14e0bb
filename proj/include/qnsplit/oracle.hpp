#pragma once

#include <iosfwd>

#include "qnsplit/monotone.hpp"

namespace qnsplit {

struct OracleResult {
    Vector x;
    long iterations = 0;
    double step_change = 0.0;
    bool converged = false;
};

/// Solves V (z - x) in T(x) for a dense SPD V by plain forward-backward
/// splitting on 0 in T(x) + V (x - z) with step 1/|V|. Uses only the
/// identity-metric resolvent of T; shares no code with the low-rank calculus.
OracleResult dense_resolvent_oracle(const MonotoneBlock& t, const Matrix& v, const Vector& z, double tol = 1e-12,
                                    long max_iter = 2000000);

/// Runs the built-in oracle-equivalence checks and prints one line per
/// check. Returns true when all pass.
bool run_selftest(std::ostream& out);

}  // namespace qnsplit
