#pragma once

#include "qnsplit/vector.hpp"

namespace qnsplit {

/// Componentwise clamp into [lo, hi]. Infinite bounds are allowed.
Vector prox_box(const Vector& z, double lo, double hi);

/// Radial projection of every interleaved pixel pair onto the disc of radius mu.
Vector project_pairwise_l2_ball(const Vector& y, double mu);

/// Per-pair group shrinkage p * max(0, 1 - lam / |p|).
Vector prox_group_l21(const Vector& v, double lam);

/// Componentwise soft thresholding sign(z) max(|z| - t, 0).
Vector soft_threshold(const Vector& z, double t);

/// max_i |p_i|_2 over interleaved pairs.
double norm_l2_inf(const Vector& y);

/// sum_i |p_i|_2 over interleaved pairs.
double norm_l21(const Vector& y);

}  // namespace qnsplit
