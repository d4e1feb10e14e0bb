#pragma once

#include <random>

#include "qnsplit/vector.hpp"

namespace qnsplit::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    Vector vec(Eigen::Index n, double scale = 1.0) {
        Vector v(n);
        for (auto& e : v) e = scale * normal();
        return v;
    }
    Matrix mat(Eigen::Index r, Eigen::Index c, double scale = 1.0) {
        Matrix m(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i) m(i, j) = scale * normal();
        return m;
    }
    Matrix spd(Eigen::Index n, double lo = 0.5) {
        const Matrix a = mat(n, n);
        return a * a.transpose() / static_cast<double>(n) + lo * Matrix::Identity(n, n);
    }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace qnsplit::testing
