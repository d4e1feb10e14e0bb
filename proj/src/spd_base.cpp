#include "qnsplit/spd_base.hpp"

#include <cmath>

namespace qnsplit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(const Step& s, const char* what) {
    if (s.is_scalar() ? !(s.scalar > 0.0) : !(s.diagonal.size() > 0 && s.diagonal.minCoeff() > 0.0))
        throw ParameterError(std::string(what) + " must be positive");
}

Vector inverse_scale(const Step& step, const Vector& x) {
    return step.is_scalar() ? Vector(x / step.scalar) : Vector(x.cwiseQuotient(step.diagonal));
}

double step_min(const Step& s) { return s.is_scalar() ? s.scalar : s.diagonal.minCoeff(); }

// Conjugate gradients for the SPD system S^{-1} w - K T K^T w = rhs.
Vector solve_schur(const SpdBase::PdhgBlock& b, const Vector& rhs, double tol) {
    auto op = [&](const Vector& w) {
        return Vector(inverse_scale(b.sigma, w) - b.k->apply(scale_by(b.tau, b.k->adjoint(w))));
    };
    Vector w = Vector::Zero(rhs.size());
    Vector r = rhs;
    Vector p = r;
    double rr = r.squaredNorm();
    const double stop = tol * tol * std::max(rr, 1e-300);
    for (int it = 0; it < 1000 && rr > stop; ++it) {
        const Vector ap = op(p);
        const double alpha = rr / p.dot(ap);
        w += alpha * p;
        r -= alpha * ap;
        const double rr_new = r.squaredNorm();
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    return w;
}

}  // namespace

Vector scale_by(const Step& step, const Vector& x) {
    return step.is_scalar() ? Vector(step.scalar * x) : Vector(step.diagonal.cwiseProduct(x));
}

double step_max(const Step& s) { return s.is_scalar() ? s.scalar : s.diagonal.maxCoeff(); }

SpdBase SpdBase::scaled_identity(Eigen::Index n, double scale) {
    if (n <= 0 || !(scale > 0.0)) throw ParameterError("scaled identity metric needs n > 0 and scale > 0");
    return SpdBase(ScaledIdentity{n, scale, 1.0 / scale});
}

SpdBase SpdBase::from_step(Eigen::Index n, double tau) {
    if (n <= 0 || !(tau > 0.0)) throw ParameterError("metric step must be positive");
    return SpdBase(ScaledIdentity{n, 1.0 / tau, tau});
}

SpdBase SpdBase::diagonal(Vector d) {
    if (d.size() == 0 || !(d.minCoeff() > 0.0)) throw ParameterError("diagonal metric needs positive entries");
    return SpdBase(Diagonal{std::move(d)});
}

SpdBase SpdBase::pdhg_block(Step tau, Step sigma, LinearOperatorPtr k) {
    if (!k) throw ParameterError("pdhg metric needs a coupling operator");
    require_positive(tau, "pdhg tau");
    require_positive(sigma, "pdhg sigma");
    if (!tau.is_scalar()) require_dim(tau.diagonal, k->in_dim(), "pdhg tau diagonal");
    if (!sigma.is_scalar()) require_dim(sigma.diagonal, k->out_dim(), "pdhg sigma diagonal");
    const double l = k->norm_bound();
    const double prod = step_max(tau) * step_max(sigma) * l * l;
    if (!(prod < 1.0))
        throw AssumptionViolation("pdhg metric is not positive definite: tau*sigma*||K||^2 = " +
                                  std::to_string(prod) + " >= 1");
    return SpdBase(PdhgBlock{std::move(tau), std::move(sigma), std::move(k)});
}

Eigen::Index SpdBase::dim() const {
    return std::visit(overloaded{[](const ScaledIdentity& s) { return s.n; },
                                 [](const Diagonal& d) { return d.d.size(); },
                                 [](const PdhgBlock& b) { return b.k->in_dim() + b.k->out_dim(); }},
                      data_);
}

Vector SpdBase::apply(const Vector& x) const {
    require_dim(x, dim(), "metric apply");
    return std::visit(overloaded{[&](const ScaledIdentity& s) { return Vector(s.scale * x); },
                                 [&](const Diagonal& d) { return Vector(d.d.cwiseProduct(x)); },
                                 [&](const PdhgBlock& b) {
                                     const Eigen::Index nx = b.k->in_dim(), ny = b.k->out_dim();
                                     Vector out(nx + ny);
                                     const auto xs = x.head(nx);
                                     const auto ys = x.tail(ny);
                                     out.head(nx) = inverse_scale(b.tau, xs) - b.k->adjoint(ys);
                                     out.tail(ny) = inverse_scale(b.sigma, ys) - b.k->apply(xs);
                                     return out;
                                 }},
                      data_);
}

Vector SpdBase::apply_inverse(const Vector& x, double cg_tol) const {
    require_dim(x, dim(), "metric apply_inverse");
    return std::visit(overloaded{[&](const ScaledIdentity& s) { return Vector(s.inverse * x); },
                                 [&](const Diagonal& d) { return Vector(x.cwiseQuotient(d.d)); },
                                 [&](const PdhgBlock& b) {
                                     // [T^{-1} -K^T; -K S^{-1}] (wx, wy) = (ux, uy):
                                     // wx = T (ux + K^T wy), (S^{-1} - K T K^T) wy = uy + K T ux.
                                     const Eigen::Index nx = b.k->in_dim(), ny = b.k->out_dim();
                                     const Vector ux = x.head(nx);
                                     const Vector uy = x.tail(ny);
                                     const Vector wy = solve_schur(b, uy + b.k->apply(scale_by(b.tau, ux)), cg_tol);
                                     Vector out(nx + ny);
                                     out.head(nx) = scale_by(b.tau, ux + b.k->adjoint(wy));
                                     out.tail(ny) = wy;
                                     return out;
                                 }},
                      data_);
}

double SpdBase::norm_bound() const {
    return std::visit(overloaded{[](const ScaledIdentity& s) { return s.scale; },
                                 [](const Diagonal& d) { return d.d.maxCoeff(); },
                                 [](const PdhgBlock& b) {
                                     return std::max(1.0 / step_min(b.tau), 1.0 / step_min(b.sigma)) +
                                            b.k->norm_bound();
                                 }},
                      data_);
}

double SpdBase::rho_min() const {
    return std::visit(overloaded{[](const ScaledIdentity& s) { return s.scale; },
                                 [](const Diagonal& d) { return d.d.minCoeff(); },
                                 [](const PdhgBlock& b) {
                                     const double t = step_max(b.tau), s = step_max(b.sigma);
                                     return (1.0 - std::sqrt(t * s) * b.k->norm_bound()) *
                                            std::min(1.0 / t, 1.0 / s);
                                 }},
                      data_);
}

std::optional<Step> SpdBase::resolvent_step() const {
    return std::visit(overloaded{[](const ScaledIdentity& s) -> std::optional<Step> { return Step::of(s.inverse); },
                                 [](const Diagonal& d) -> std::optional<Step> {
                                     return Step::diag(d.d.cwiseInverse());
                                 },
                                 [](const PdhgBlock&) -> std::optional<Step> { return std::nullopt; }},
                      data_);
}

std::string SpdBase::kind() const {
    return std::visit(overloaded{[](const ScaledIdentity&) { return std::string("scaled-identity"); },
                                 [](const Diagonal&) { return std::string("diagonal"); },
                                 [](const PdhgBlock&) { return std::string("pdhg-block"); }},
                      data_);
}

Matrix SpdBase::dense() const {
    const Eigen::Index n = dim();
    Matrix m(n, n);
    Vector e = Vector::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        e[j] = 1.0;
        m.col(j) = apply(e);
        e[j] = 0.0;
    }
    return m;
}

}  // namespace qnsplit
