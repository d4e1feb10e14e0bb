// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "qnsplit/bench.hpp"
#include "qnsplit/oracle.hpp"
#include "qnsplit/prox.hpp"
#include "qnsplit/resolvent.hpp"
#include "qnsplit/splitting.hpp"
#include "support.hpp"

using namespace qnsplit;
using qnsplit::testing::Gen;

namespace {

// Pinned tolerances and budgets.
constexpr double kOracleTol = 1e-8;
constexpr double kOracleRuntimeS = 30.0;
constexpr int kOracleInstances = 200;
constexpr int kRootPairs = 1000;
constexpr int kBracketInstances = 100;
constexpr double kLawSlack = 1e-10;
constexpr int kNewtonMax = 5;
constexpr double kNewtonResidual = 1e-10;
constexpr int kOrthantInstances = 100;
constexpr double kSecantTol = 1e-10;
constexpr int kSafeguardInstances = 100;
constexpr double kEigTol = 1e-10;
constexpr long kFejerReferenceIters = 50000;
constexpr long kFejerIters = 600;
constexpr double kFejerSlack = 1e-9;
constexpr double kFejerRuntimeS = 120.0;
constexpr long kIdentityIters = 500;
constexpr long kFig1Budget = 12000;
constexpr double kFig1Fraction = 1e-3;
constexpr double kFig1RuntimeS = 300.0;
constexpr double kFig3PdGap = 1e-6;
constexpr double kInclusionTol = 1e-8;
constexpr int kInclusionSteps = 100;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double v) {
    std::ostringstream os;
    os << std::setprecision(2) << std::scientific << v;
    return os.str();
}

std::string fixed1(double v) {
    std::ostringstream os;
    os << std::setprecision(1) << std::fixed << v;
    return os.str();
}

Vector s1(double v) { return Vector::Constant(1, v); }

double lambda_min(const Matrix& m) { return Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff(); }
double lambda_max(const Matrix& m) { return Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().maxCoeff(); }

// Random instance of the resolvent calculus: block from the catalog, positive
// diagonal base metric (paired per slot for the ball), low-rank directions.
struct Instance {
    MonotoneBlockPtr t;
    SpdBasePtr m;
    MetricSign sign;
    Matrix u;
    Vector z;
    double spread;  // |M^{-1/2} U|^2
};

Instance random_instance(Gen& g, long max_rank, long kind = -1) {
    if (kind < 0) kind = g.integer(0, 2);
    const Eigen::Index n = kind == 1 ? 2 * g.integer(1, 4) : g.integer(1, 8);
    Instance in;
    switch (kind) {
        case 0: in.t = make_box_normal_cone(-g.uniform(0.2, 1.0), g.uniform(0.2, 1.0)); break;
        case 1: in.t = make_pairwise_ball_normal_cone(g.uniform(0.3, 1.5)); break;
        default: in.t = make_soft_shrinkage(g.uniform(0.1, 1.0)); break;
    }
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = (kind == 1 && i % 2 == 1) ? d[i - 1] : g.uniform(0.5, 3.0);
    in.m = std::make_shared<const SpdBase>(SpdBase::diagonal(d));
    const Eigen::Index r = g.integer(1, std::min<long>(max_rank, n));
    in.sign = g.coin() ? MetricSign::plus : MetricSign::minus;
    in.u = g.mat(n, r);
    const Matrix minv = d.cwiseInverse().asDiagonal();
    const double spread = lambda_max(in.u.transpose() * minv * in.u);
    if (in.sign == MetricSign::minus) in.u *= std::sqrt(g.uniform(0.1, 0.9) / spread);
    in.spread = lambda_max(in.u.transpose() * minv * in.u);
    in.z = g.vec(n, 2.0);
    return in;
}

Matrix dense_v(const Instance& in) {
    const Matrix uu = in.u * in.u.transpose();
    return in.m->dense() + (in.sign == MetricSign::plus ? uu : Matrix(-uu));
}

Outcome criterion_oracle() {
    Gen g(1001);
    const auto t0 = Clock::now();
    double worst = 0.0;
    int oracle_failures = 0;
    for (int i = 0; i < kOracleInstances; ++i) {
        const Instance in = random_instance(g, 3);
        const Vector got = resolve_perturbed(in.t, in.m, in.sign, in.u, in.z).x_star;
        const OracleResult ref = dense_resolvent_oracle(*in.t, dense_v(in), in.z, 1e-12);
        if (!ref.converged) ++oracle_failures;
        worst = std::max(worst, (got - ref.x).norm());
    }
    const double secs = seconds_since(t0);
    return {worst <= kOracleTol && oracle_failures == 0 && secs < kOracleRuntimeS,
            "worst deviation " + sci(worst) + " over " + std::to_string(kOracleInstances) + " instances (limit " +
                sci(kOracleTol) + "), oracle failures " + std::to_string(oracle_failures) + ", " + fixed1(secs) +
                " s (limit " + fixed1(kOracleRuntimeS) + " s)"};
}

Outcome criterion_root_laws() {
    Gen g(1002);
    int law_failures = 0;
    double worst_lip = 0.0;
    for (int i = 0; i < kRootPairs; ++i) {
        const Instance in = random_instance(g, 3);
        const RootContext ctx(in.t, in.m, in.sign, in.u, in.z);
        const Vector a = g.vec(in.u.cols(), 3.0), b = g.vec(in.u.cols(), 3.0);
        const Vector dl = eval_root_l(ctx, a) - eval_root_l(ctx, b), da = a - b;
        // <l(a) - l(b), a - b> >= (1 - |M^{-1/2}U|^2) |a - b|^2 for the minus sign, >= |a - b|^2 for plus
        const double modulus = in.sign == MetricSign::plus ? 1.0 : 1.0 - in.spread;
        const double lip = 1.0 + in.spread;
        const bool mono = dl.dot(da) > 0.0 && dl.dot(da) >= modulus * da.squaredNorm() * (1.0 - kLawSlack);
        const bool lipschitz = dl.norm() <= lip * da.norm() * (1.0 + kLawSlack);
        worst_lip = std::max(worst_lip, dl.norm() / (lip * da.norm()));
        if (!mono || !lipschitz) ++law_failures;
    }
    int contained = 0;
    RootConfig tight;
    tight.residual_tol = 1e-13;
    for (int i = 0; i < kBracketInstances; ++i) {
        const Instance in = random_instance(g, 1);
        const RootContext ctx(in.t, in.m, in.sign, in.u, in.z);
        const double alpha = solve_root(ctx, tight).alpha_star[0];
        const Vector zero = Vector::Zero(in.z.size());
        const Vector jv0 = resolve_perturbed(in.t, in.m, in.sign, in.u, zero, tight).x_star;
        if (std::abs(alpha) <= prop_zeta(in.u.col(0), in.z, jv0)) ++contained;
    }
    return {law_failures == 0 && contained == kBracketInstances,
            std::to_string(kRootPairs - law_failures) + "/" + std::to_string(kRootPairs) +
                " pairs monotone and Lipschitz (max |dl|/(L|da|) " + sci(worst_lip) + "), bracket holds the root in " +
                std::to_string(contained) + "/" + std::to_string(kBracketInstances)};
}

Outcome criterion_newton() {
    Gen g(1003);
    int failures = 0, worst_newton = 0;
    long worst_excess = -1000;
    for (int i = 0; i < kOrthantInstances; ++i) {
        const Eigen::Index n = g.integer(2, 8);
        auto t = make_box_normal_cone(0.0, std::numeric_limits<double>::infinity());
        auto m = std::make_shared<const SpdBase>(SpdBase::scaled_identity(n, g.uniform(0.5, 2.0)));
        const MetricSign sign = g.coin() ? MetricSign::plus : MetricSign::minus;
        Matrix u = g.mat(n, 1);
        if (sign == MetricSign::minus) u *= std::sqrt(g.uniform(0.1, 0.9) * m->rho_min()) / u.norm();
        const Vector z = g.vec(n, 2.0);
        const RootContext ctx(t, m, sign, u, z);
        const Vector jv0 = resolve_perturbed(t, m, sign, u, Vector::Zero(n)).x_star;
        const double zeta = prop_zeta(u.col(0), z, jv0);
        for (double frac : {0.05, 1e-3}) {
            RootConfig cfg;
            cfg.residual_tol = kNewtonResidual;
            cfg.switch_width = frac * 2.0 * zeta;
            const RootSolveReport rep = hybrid_root([&](double a) { return eval_root_l(ctx, s1(a))[0]; },
                                                    [&](double a) { return ctx.jacobian(s1(a))(0, 0); }, zeta, cfg);
            const long bound = static_cast<long>(std::ceil(std::log2(2.0 * zeta / cfg.switch_width))) + 10;
            worst_newton = std::max(worst_newton, rep.newton_iterations);
            worst_excess = std::max(worst_excess, static_cast<long>(rep.total_iterations()) - bound);
            if (!rep.converged || rep.residual > kNewtonResidual || rep.newton_iterations > kNewtonMax ||
                rep.total_iterations() > bound)
                ++failures;
        }
    }
    return {failures == 0, "orthant family, " + std::to_string(2 * kOrthantInstances) + " solves: max Newton steps " +
                               std::to_string(worst_newton) + " (limit " + std::to_string(kNewtonMax) +
                               "), max total minus bound " + std::to_string(worst_excess) + ", failures " +
                               std::to_string(failures)};
}

SpdBasePtr random_base(Gen& g, Eigen::Index n, double floor) {
    switch (g.integer(0, 2)) {
        case 0: return std::make_shared<const SpdBase>(SpdBase::scaled_identity(n, floor + g.uniform(0.1, 2.0)));
        case 1: {
            Vector d(n);
            for (auto& e : d) e = floor + g.uniform(0.1, 3.0);
            return std::make_shared<const SpdBase>(SpdBase::diagonal(d));
        }
        default: {
            // block metric; the steps put rho_min well above the floor
            const Eigen::Index nx = std::max<Eigen::Index>(1, n / 2), ny = n - nx;
            auto k = make_dense(g.mat(ny, nx));
            const double l = k->norm_bound();
            const double tau = 1.0 / (floor + g.uniform(2.0, 4.0)) / 2.0;
            const double sigma = g.uniform(0.2, 0.6) / (tau * l * l);
            return std::make_shared<const SpdBase>(SpdBase::pdhg_block(Step::of(tau), Step::of(sigma), k));
        }
    }
}

Outcome criterion_secant_safeguard() {
    Gen g(1004);
    int secant_ok = 0, secant_cases = 0;
    double worst_secant = 0.0;
    for (int i = 0; i < kSafeguardInstances; ++i) {
        const Eigen::Index n = g.integer(2, 32);
        const SpdBasePtr m0 = random_base(g, n, 0.0);
        const Matrix b = g.spd(n, 0.1);
        const Vector s = g.vec(n), y = b * s;
        const Osr1Direction dir = osr1_direction(*m0, s, y);
        if (dir.sign == MetricSign::none) continue;
        ++secant_cases;
        const QuasiNewtonMetric v{m0, dir.sign, secant_gamma(), Matrix(dir.u)};
        const double err = (metric_apply(v, s) - y).norm() / (1.0 + y.norm());
        worst_secant = std::max(worst_secant, err);
        if (err <= kSecantTol) ++secant_ok;
    }
    int guarded = 0, minus = 0;
    double worst_slack = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kSafeguardInstances; ++i) {
        const Eigen::Index n = g.integer(2, 32);
        const SpdBasePtr m0 = random_base(g, n, 1.0);
        const double rho = m0->rho_min();
        // B with |B| = 1/beta below rho_min(M0), so every update has the minus sign
        const Matrix braw = g.spd(n, 0.1);
        const double inv_beta = rho * g.uniform(0.2, 0.8);
        const Matrix b = braw * (inv_beta / lambda_max(braw));
        const double beta = 1.0 / inv_beta;
        MetricRule rule;
        rule.mode = MetricMode::safeguard_a2;
        rule.c = g.uniform(0.1, 0.9);
        const Vector s = g.vec(n);
        const MetricUpdate upd = update_metric(m0, s, b * s, g.integer(1, 50), rule, beta);
        if (upd.metric.sign == MetricSign::minus) ++minus;
        const double c_prime = (1.0 - rule.c) * (rho - inv_beta);
        const double lmin = lambda_min(upd.metric.dense() - inv_beta * Matrix::Identity(n, n));
        worst_slack = std::min(worst_slack, lmin - c_prime);
        if (lmin >= c_prime - kEigTol * (1.0 + m0->norm_bound())) ++guarded;
    }
    return {secant_cases == secant_ok && secant_cases > 0 && guarded == kSafeguardInstances &&
                minus == kSafeguardInstances,
            "secant " + std::to_string(secant_ok) + "/" + std::to_string(secant_cases) + " (worst " +
                sci(worst_secant) + "), safeguarded minus metrics " + std::to_string(guarded) + "/" +
                std::to_string(kSafeguardInstances) + " (min lambda_min - c' " + sci(worst_slack) + ")"};
}

ImageProblem preset_problem(ImageFamily f, long side) {
    ExperimentConfig c = preset(f);
    c.problem.rows = c.problem.cols = side;
    return build_problem(c.problem);
}

SolverConfig plain_config(long iters) {
    SolverConfig c;
    c.max_iter = iters;
    c.stop_tol = 0.0;
    return c;
}

Outcome criterion_fejer() {
    const auto t0 = Clock::now();
    const ExperimentConfig pc = preset(ImageFamily::denoising);
    const ImageProblem p = preset_problem(ImageFamily::denoising, 32);
    const PdhgMetric m = p.metric();
    const Vector z_star = run_iqn_pdhg(p.saddle, m, p.initial_point(), plain_config(kFejerReferenceIters)).z;

    SolverConfig c = plain_config(kFejerIters);
    c.variant = SolverVariant::relaxed;
    c.metric = pc.metric;  // fixed gamma_hat / |u|^2
    c.root.residual_tol = 1e-12;
    c.root_tol_schedule = false;
    std::vector<double> dist{(p.initial_point() - z_star).norm()};
    run_rqn_pdhg(p.saddle, m, p.initial_point(), c,
                 [&](const IterateRecord&, const Vector& z, const Vector&) { dist.push_back((z - z_star).norm()); });
    double worst = 0.0;
    for (std::size_t k = 1; k < dist.size(); ++k) worst = std::max(worst, (dist[k] - dist[k - 1]) / dist[0]);
    const auto q = fit_linear_rate(dist, 0, static_cast<long>(dist.size()) - 1, 1e-10 * dist[0]);
    const double margin = m.rho_min() - 1.0 / p.saddle.beta();
    const double secs = seconds_since(t0);
    return {worst <= kFejerSlack && q && *q < 1.0 && secs < kFejerRuntimeS,
            "32x32 denoising, " + std::to_string(dist.size() - 1) + " relaxed steps: max relative increase " +
                sci(worst) + " (limit " + sci(kFejerSlack) + "), fitted q " + (q ? sci(*q) : "-") +
                ", rho_min - 1/beta = " + sci(margin) + " vs gamma_hat " + sci(pc.metric.gamma_hat) + ", " +
                fixed1(secs) + " s (limit " + fixed1(kFejerRuntimeS) + " s)"};
}

Outcome criterion_identities() {
    Gen g(1006);
    // FBS on a box-constrained least squares problem
    const Eigen::Index n = 20;
    const Matrix a = g.mat(n, n) + 1.5 * Matrix::Identity(n, n);
    const Vector rhs = g.vec(n, 2.0);
    const InclusionProblem ip{make_box_normal_cone(-0.5, 0.5), make_quadratic_gradient(make_dense(a), rhs), n};
    const double tau = 0.9 * ip.b.beta;
    const Vector z0 = g.vec(n);
    std::vector<Vector> got;
    run_inertial_qnfbs(ip, std::make_shared<const SpdBase>(SpdBase::from_step(n, tau)), z0, plain_config(kIdentityIters),
                       [&](const IterateRecord&, const Vector& z, const Vector&) { got.push_back(z); });
    bool fbs_same = got.size() == static_cast<std::size_t>(kIdentityIters);
    Vector z = z0;
    for (const Vector& zk : got) {
        const Vector shift = tau * ip.b(z);
        z = ip.a->resolve(z - shift, Step::of(tau));
        fbs_same = fbs_same && (z.array() == zk.array()).all();
    }

    // PDHG on a 16x16 deconvolution instance
    const ImageProblem p = preset_problem(ImageFamily::deconvolution, 16);
    const SaddleProblem& sp = p.saddle;
    const double t = p.tau, s = p.sigma;
    auto classical = [&](const Vector& x, const Vector& y) {
        const Vector xn = sp.g->resolve(x - t * (sp.grad_g(x) + sp.k->adjoint(y)), Step::of(t));
        const Vector yn = sp.f->resolve(y + s * (sp.k->apply(2.0 * xn - x) - sp.grad_f(y)), Step::of(s));
        return join(xn, yn);
    };
    const Eigen::Index nx = sp.primal_dim(), ny = sp.dual_dim();
    std::vector<Vector> pd;
    run_iqn_pdhg(sp, p.metric(), p.initial_point(), plain_config(kIdentityIters),
                 [&](const IterateRecord&, const Vector& zk, const Vector&) { pd.push_back(zk); });
    bool pdhg_same = pd.size() == static_cast<std::size_t>(kIdentityIters);
    Vector w = p.initial_point();
    for (const Vector& zk : pd) {
        w = classical(w.head(nx), w.tail(ny));
        pdhg_same = pdhg_same && (w.array() == zk.array()).all();
    }

    int empty_same = 0;
    for (int i = 0; i < 100; ++i) {
        const Vector xb = g.vec(nx, 100.0).array() + 128.0, yb = g.vec(ny, 0.01);
        const PdhgStepResult r = pdhg_fb_step(sp, p.metric(), MetricSign::none, Matrix(sp.dim(), 0), xb, yb);
        if ((join(r.x, r.y).array() == classical(xb, yb).array()).all()) ++empty_same;
    }
    return {fbs_same && pdhg_same && empty_same == 100,
            std::string("FBS ") + (fbs_same ? "identical" : "differs") + " over " + std::to_string(got.size()) +
                " iterations, PDHG " + (pdhg_same ? "identical" : "differs") + " over " + std::to_string(pd.size()) +
                ", empty-U steps identical " + std::to_string(empty_same) + "/100"};
}

struct Reached {
    long iterations;
};

Outcome criterion_fig1() {
    const auto t0 = Clock::now();
    ExperimentConfig c = preset(ImageFamily::deconvolution);
    c.iterations = kFig1Budget;
    const ImageProblem p = build_problem(c.problem);
    const ReferenceValue ref = reference_gap(p, c.reference_iterations, cache_dir_from_env());
    const double threshold = kFig1Fraction * (primal_value(p, p.b.pixels) - ref.primal);
    const PdhgMetric m = p.metric();
    const Eigen::Index nx = p.saddle.primal_dim();

    std::map<Algorithm, std::optional<long>> iters;
    for (Algorithm alg : all_algorithms()) {
        const SolverConfig sc = solver_config_for(alg, c);
        auto obs = [&](const IterateRecord& rec, const Vector&, const Vector& fb) {
            if (primal_value(p, fb.head(nx)) - ref.primal <= threshold) throw Reached{rec.k + 1};
        };
        try {
            if (sc.variant == SolverVariant::relaxed) run_rqn_pdhg(p.saddle, m, p.initial_point(), sc, obs);
            else run_iqn_pdhg(p.saddle, m, p.initial_point(), sc, obs);
            iters[alg] = std::nullopt;
        } catch (const Reached& r) {
            iters[alg] = r.iterations;
        }
    }
    auto before = [](const std::optional<long>& a, const std::optional<long>& b) {
        return a && (!b || *a < *b);
    };
    bool ok = true;
    std::string detail;
    for (Algorithm alg : all_algorithms()) {
        detail += to_string(alg) + "=" + (iters[alg] ? std::to_string(*iters[alg]) : ">" + std::to_string(kFig1Budget)) +
                  " ";
    }
    for (Algorithm alg : {Algorithm::qn_fbs, Algorithm::rqn_fbs, Algorithm::iqn_fbs}) {
        const bool faster = before(iters[alg], iters[Algorithm::fbs]) && before(iters[alg], iters[Algorithm::ifbs]);
        if (!faster) detail += "[" + to_string(alg) + " not faster] ";
        ok = ok && faster;
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < kFig1RuntimeS;
    return {ok, "64x64 deconvolution, iterations to gap <= 1e-3 initial: " + detail + fixed1(secs) + " s (limit " +
                    fixed1(kFig1RuntimeS) + " s)"};
}

Outcome criterion_fig3() {
    ExperimentConfig c = preset(ImageFamily::denoising);
    c.iterations = 500;
    const RunSummary s = run_experiment(c, cache_dir_from_env(), false);
    bool ok = true;
    std::string detail;
    std::optional<long> fbs_hit, iqn_hit;
    for (const AlgorithmRun& r : s.runs) {
        const bool contracts = r.rate && *r.rate < 1.0;
        ok = ok && contracts;
        detail += to_string(r.algorithm) + " q=" + (r.rate ? sci(*r.rate) : "-") + " ";
        const auto hit = AlgorithmRun::first_below(r.pd_gap, kFig3PdGap);
        if (r.algorithm == Algorithm::fbs) fbs_hit = hit;
        if (r.algorithm == Algorithm::iqn_fbs) iqn_hit = hit;
    }
    const bool iqn_first = iqn_hit && (!fbs_hit || *iqn_hit < *fbs_hit);
    auto show = [](const std::optional<long>& h) { return h ? std::to_string(*h) : std::string("never"); };
    return {ok && iqn_first, "64x64 denoising: " + detail + "; pd-gap <= 1e-6 at iqn-fbs " + show(iqn_hit) +
                                 ", fbs " + show(fbs_hit)};
}

Outcome criterion_inclusion() {
    Gen g(1009);
    double worst = 0.0;
    for (int i = 0; i < kInclusionSteps; ++i) {
        const Eigen::Index nx = g.integer(1, 4), ny = 2 * g.integer(1, 2);
        const Matrix k = g.mat(ny, nx);
        auto kop = make_dense(k);
        auto pick = [&](bool dual) -> MonotoneBlockPtr {
            switch (g.integer(0, dual ? 2 : 1)) {
                case 0: return make_box_normal_cone(-g.uniform(0.2, 1.0), g.uniform(0.2, 1.0));
                case 1: return make_soft_shrinkage(g.uniform(0.1, 1.0));
                default: return make_pairwise_ball_normal_cone(g.uniform(0.3, 1.5));
            }
        };
        SaddleProblem sp{kop, pick(false), pick(true),
                         make_quadratic_gradient(make_scaled_identity(nx, g.uniform(0.2, 1.0)), g.vec(nx)),
                         make_quadratic_gradient(make_scaled_identity(ny, g.uniform(0.2, 1.0)), g.vec(ny))};
        const double l = kop->norm_bound();
        const double tau = g.uniform(0.3, 0.9) / l;
        const PdhgMetric m = build_pdhg_metric(tau, g.uniform(0.2, 0.9) / (tau * l * l), kop);
        const Vector zk = g.vec(sp.dim(), 2.0);
        const PdhgStepResult r =
            pdhg_fb_step(sp, m, MetricSign::none, Matrix(sp.dim(), 0), zk.head(nx), zk.tail(ny));
        const Vector z1 = join(r.x, r.y);
        // M(z_k - z_{k+1}) - B(z_k) in T(z_{k+1}), checked block by block
        const Vector v = m.dense() * (zk - z1) - sp.b(zk);
        const double rx = sp.g->inclusion_residual(r.x, v.head(nx) - sp.k->adjoint(r.y));
        const double ry = sp.f->inclusion_residual(r.y, v.tail(ny) + sp.k->apply(r.x));
        worst = std::max(worst, std::hypot(rx, ry));
    }
    return {worst <= kInclusionTol, "worst residual " + sci(worst) + " over " + std::to_string(kInclusionSteps) +
                                        " steps (limit " + sci(kInclusionTol) + ")"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"resolvent oracle equivalence", criterion_oracle},
        {"root function laws", criterion_root_laws},
        {"semi-smooth Newton on the orthant family", criterion_newton},
        {"secant equation and safeguards", criterion_secant_safeguard},
        {"relaxed solver Fejer monotonicity", criterion_fejer},
        {"reduction identities", criterion_identities},
        {"deconvolution iterations to 1e-3 gap", criterion_fig1},
        {"denoising rates and pd-gap", criterion_fig3},
        {"plain PDHG step inclusion", criterion_inclusion},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS " : "FAIL ") << i + 1 << " " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
