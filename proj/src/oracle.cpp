#include "qnsplit/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "qnsplit/pdhg.hpp"

namespace qnsplit {

OracleResult dense_resolvent_oracle(const MonotoneBlock& t, const Matrix& v, const Vector& z, double tol,
                                    long max_iter) {
    if (v.rows() != v.cols()) throw DimensionError("oracle metric", v.rows(), v.cols());
    require_dim(z, v.rows(), "oracle point");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (v + v.transpose()), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0)) throw AssumptionViolation("oracle metric is not positive definite");
    // step 2/(lmin + lmax) gives contraction factor (lmax - lmin)/(lmax + lmin)
    const double step = 2.0 / (lmin + lmax);
    const double q = (lmax - lmin) / (lmax + lmin);
    OracleResult r;
    r.x = z;
    for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
        Vector next = t.resolve(r.x - step * (v * (r.x - z)), Step::of(step));
        r.step_change = (next - r.x).norm();
        r.x = std::move(next);
        // distance to the fixed point is at most q/(1-q) times the last step
        if (r.step_change * q / (1.0 - q) <= tol * (1.0 + r.x.norm()) || r.step_change == 0.0) {
            r.converged = true;
            break;
        }
    }
    return r;
}

namespace {

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << v;
    return os.str();
}

struct Check {
    std::ostream& out;
    bool ok = true;
    void operator()(const std::string& name, bool pass, const std::string& detail) {
        out << (pass ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
        ok = ok && pass;
    }
};

}  // namespace

bool run_selftest(std::ostream& out) {
    Check check{out};
    std::mt19937_64 rng(20241017);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto rand_vec = [&](Eigen::Index n, double s) {
        Vector v(n);
        for (auto& e : v) e = s * unif(rng);
        return v;
    };

    // Low-rank resolvent against the dense oracle.
    {
        double worst = 0.0;
        int count = 0;
        const std::vector<MonotoneBlockPtr> blocks{make_box_normal_cone(-0.5, 0.5), make_soft_shrinkage(0.3),
                                                   make_pairwise_ball_normal_cone(0.7)};
        for (int i = 0; i < 60; ++i) {
            const Eigen::Index n = 2 * (1 + static_cast<Eigen::Index>(rng() % 4));
            const auto& t = blocks[static_cast<std::size_t>(i) % blocks.size()];
            const double scale = 1.0 + 0.5 * (unif(rng) + 1.0);
            auto m = std::make_shared<const SpdBase>(SpdBase::scaled_identity(n, scale));
            const MetricSign sign = i % 2 == 0 ? MetricSign::plus : MetricSign::minus;
            Vector u = rand_vec(n, 1.0);
            if (sign == MetricSign::minus) u *= std::sqrt(0.7 * scale) / u.norm();
            const Vector z = rand_vec(n, 2.0);
            const Matrix uu = u * u.transpose();
            const Matrix v = m->dense() + (sign == MetricSign::plus ? uu : Matrix(-uu));
            const PerturbedResult got = resolve_perturbed(t, m, sign, u, z);
            const OracleResult want = dense_resolvent_oracle(*t, v, z);
            worst = std::max(worst, (got.x_star - want.x).norm());
            ++count;
        }
        check("resolvent-oracle", worst <= 1e-8,
              std::to_string(count) + " instances, max error " + sci(worst));
    }

    // Metric off and no inertia reproduces forward-backward splitting.
    {
        const Eigen::Index n = 6;
        Matrix a = Matrix::Random(n, n);
        auto aop = make_dense(a);
        const Vector b = rand_vec(n, 1.0);
        InclusionProblem prob{make_box_normal_cone(-0.3, 0.3), make_quadratic_gradient(aop, b), n};
        const double tau = prob.b.beta;
        auto m = std::make_shared<const SpdBase>(SpdBase::from_step(n, tau));
        SolverConfig cfg;
        cfg.max_iter = 200;
        cfg.stop_tol = 0.0;
        const Vector z0 = rand_vec(n, 1.0);
        const SolveResult res = run_inertial_qnfbs(prob, m, z0, cfg);
        Vector z = z0;
        for (long k = 0; k < static_cast<long>(res.records.size()); ++k)
            z = prob.a->resolve(z - tau * prob.b(z), Step::of(tau));
        check("fbs-reduction", z == res.z, "max difference " + sci((z - res.z).cwiseAbs().maxCoeff()));
    }

    // U empty gives the classical PDHG step.
    {
        const Eigen::Index n = 3, d = 4;
        auto k = make_dense(Matrix::Random(d, n));
        SaddleProblem sp{k, make_box_normal_cone(-1.0, 1.0), make_pairwise_ball_normal_cone(0.5),
                         make_quadratic_gradient(make_identity(n), rand_vec(n, 1.0)), make_scaled_identity_map(1.0)};
        const double tau = 0.3, sigma = 0.3 / (k->norm_bound() * k->norm_bound());
        const PdhgMetric m = build_pdhg_metric(tau, sigma, k);
        const Vector x = rand_vec(n, 1.0), y = rand_vec(d, 1.0);
        const PdhgStepResult s = pdhg_fb_step(sp, m, MetricSign::none, Matrix(n + d, 0), x, y);
        const Vector xp = sp.g->resolve(x - tau * (sp.grad_g(x) + k->adjoint(y)), Step::of(tau));
        const Vector yp = sp.f->resolve(y + sigma * (k->apply(2.0 * xp - x) - sp.grad_f(y)), Step::of(sigma));
        check("pdhg-reduction", s.x == xp && s.y == yp, "exact comparison");
    }
    return check.ok;
}

}  // namespace qnsplit
