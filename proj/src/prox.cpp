#include "qnsplit/prox.hpp"

#include <algorithm>
#include <cmath>

namespace qnsplit {

namespace {

void require_pairs(const Vector& v, const char* what) {
    if (v.size() % 2 != 0)
        throw ParameterError(std::string(what) + ": pairwise operation needs an even dimension, got " +
                             std::to_string(v.size()));
}

}  // namespace

Vector prox_box(const Vector& z, double lo, double hi) {
    if (!(lo <= hi)) throw ParameterError("prox_box: lower bound exceeds upper bound");
    return z.cwiseMax(lo).cwiseMin(hi);
}

Vector project_pairwise_l2_ball(const Vector& y, double mu) {
    require_pairs(y, "project_pairwise_l2_ball");
    if (!(mu > 0.0)) throw ParameterError("project_pairwise_l2_ball: radius must be positive");
    Vector out = y;
    for (Eigen::Index i = 0; i < y.size(); i += 2) {
        const double n = std::hypot(y[i], y[i + 1]);
        // a few ulps of slack keep the projection exactly idempotent
        if (n > mu * (1.0 + 1e-15)) {
            const double f = mu / n;
            out[i] *= f;
            out[i + 1] *= f;
        }
    }
    return out;
}

Vector prox_group_l21(const Vector& v, double lam) {
    require_pairs(v, "prox_group_l21");
    if (lam < 0.0) throw ParameterError("prox_group_l21: threshold must be nonnegative");
    Vector out = v;
    if (lam == 0.0) return out;
    for (Eigen::Index i = 0; i < v.size(); i += 2) {
        const double n = std::hypot(v[i], v[i + 1]);
        const double f = n > lam ? 1.0 - lam / n : 0.0;
        out[i] *= f;
        out[i + 1] *= f;
    }
    return out;
}

Vector soft_threshold(const Vector& z, double t) {
    Vector out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double a = std::abs(z[i]) - t;
        out[i] = a > 0.0 ? std::copysign(a, z[i]) : 0.0;
    }
    return out;
}

double norm_l2_inf(const Vector& y) {
    require_pairs(y, "norm_l2_inf");
    double m = 0.0;
    for (Eigen::Index i = 0; i < y.size(); i += 2) m = std::max(m, std::hypot(y[i], y[i + 1]));
    return m;
}

double norm_l21(const Vector& y) {
    require_pairs(y, "norm_l21");
    double s = 0.0;
    for (Eigen::Index i = 0; i < y.size(); i += 2) s += std::hypot(y[i], y[i + 1]);
    return s;
}

}  // namespace qnsplit
