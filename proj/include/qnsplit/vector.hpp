#pragma once

#include <Eigen/Dense>

#include <string>

#include "qnsplit/errors.hpp"

namespace qnsplit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline void require_dim(const Vector& x, Eigen::Index n, const std::string& what) {
    if (x.size() != n) throw DimensionError(what, static_cast<long>(n), static_cast<long>(x.size()));
}

inline bool all_finite(const Vector& x) { return x.allFinite(); }

}  // namespace qnsplit
