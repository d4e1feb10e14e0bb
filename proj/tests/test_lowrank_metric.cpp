#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "qnsplit/metric.hpp"
#include "support.hpp"

using namespace qnsplit;
using qnsplit::testing::Gen;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

SpdBasePtr identity_base(Eigen::Index n, double s = 1.0) {
    return std::make_shared<const SpdBase>(SpdBase::scaled_identity(n, s));
}

double min_eig(const Matrix& m) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
}

SpdBasePtr random_base(Gen& g, Eigen::Index n) {
    switch (g.integer(0, 2)) {
        case 0: return identity_base(n, g.uniform(0.5, 3.0));
        case 1: {
            Vector d(n);
            for (auto& e : d) e = g.uniform(0.5, 3.0);
            return std::make_shared<const SpdBase>(SpdBase::diagonal(d));
        }
        default: {
            const Eigen::Index nx = std::max<Eigen::Index>(1, n / 2);
            auto k = make_dense(g.mat(n - nx, nx));
            const double l = k->norm_bound();
            return std::make_shared<const SpdBase>(SpdBase::pdhg_block(Step::of(0.6 / l), Step::of(0.6 / l), k));
        }
    }
}

}  // namespace

TEST_CASE("SpdBase kinds invert, stay symmetric and bound their spectrum") {
    Gen g(21);
    for (int i = 0; i < 30; ++i) {
        const Eigen::Index n = g.integer(2, 12);
        auto m = random_base(g, n);
        const Vector x = g.vec(n), y = g.vec(n);
        CHECK((m->apply_inverse(m->apply(x)) - x).norm() <= 1e-10 * x.norm());
        CHECK(std::abs(m->apply(x).dot(y) - x.dot(m->apply(y))) <= 1e-12 * (1 + x.norm() * y.norm()));
        const Matrix d = m->dense();
        CHECK(min_eig(d) >= m->rho_min() * (1 - 1e-12));
        CHECK(Eigen::JacobiSVD<Matrix>(d).singularValues()(0) <= m->norm_bound() * (1 + 1e-12));
    }
}

TEST_CASE("from_step inverts to the step exactly") {
    auto m = SpdBase::from_step(3, 0.1);
    const Vector x = Vector::Constant(3, 0.7);
    CHECK(m.apply_inverse(x) == Vector(0.1 * x));
    CHECK(m.resolvent_step()->scalar == 0.1);
}

TEST_CASE("osr1_direction examples") {
    auto m0 = identity_base(2);
    const Osr1Direction plus = osr1_direction(*m0, v2(1, 0), v2(2, 0));
    CHECK(plus.sign == MetricSign::plus);
    CHECK(plus.u == v2(1, 0));

    const Osr1Direction none = osr1_direction(*m0, v2(1, 3), v2(1, 3));
    CHECK(none.sign == MetricSign::none);

    const Osr1Direction minus = osr1_direction(*m0, v2(1, 0), v2(0.5, 0));
    CHECK(minus.sign == MetricSign::minus);
    CHECK(minus.u[0] == doctest::Approx(-0.70710678118654752).epsilon(1e-15));
    CHECK(minus.u[1] == 0.0);

    const Osr1Direction zero = osr1_direction(*m0, v2(0, 0), v2(1, 0));
    CHECK(zero.sign == MetricSign::none);
    CHECK(!zero.diagnostic.empty());
}

TEST_CASE("secant_gamma satisfies the examples") {
    auto m0 = identity_base(2);
    CHECK(secant_gamma() == 1.0);
    for (auto [y, sign] : {std::pair{v2(2, 0), MetricSign::plus}, std::pair{v2(0.5, 0), MetricSign::minus}}) {
        const Osr1Direction d = osr1_direction(*m0, v2(1, 0), y);
        REQUIRE(d.sign == sign);
        QuasiNewtonMetric v{m0, d.sign, secant_gamma(), d.u};
        CHECK((metric_apply(v, v2(1, 0)) - y).norm() <= 1e-15);
    }
    QuasiNewtonMetric unperturbed = QuasiNewtonMetric::unperturbed(m0);
    CHECK(metric_apply(unperturbed, v2(1, 0)) == v2(1, 0));
}

TEST_CASE("safeguard_gamma_minus examples") {
    auto m0 = std::make_shared<const SpdBase>(SpdBase::scaled_identity(2, 2.0));
    CHECK(safeguard_gamma_minus(*m0, v2(1, 0), 1.0, 0.5) == doctest::Approx(0.5));
    CHECK(safeguard_gamma_minus(*m0, v2(2, 0), 1.0, 0.5) == doctest::Approx(0.125));
    CHECK(safeguard_gamma_minus(*m0, v2(1, 0), 1.0, 0.5, 0.0) == 0.0);
    CHECK_THROWS_AS(safeguard_gamma_minus(*m0, v2(1, 0), 0.5, 0.5), AssumptionViolation);
    CHECK_THROWS_AS(safeguard_gamma_minus(*m0, v2(1, 0), 1.0, 1.5), ParameterError);
}

TEST_CASE("safeguard_gamma_summable examples") {
    auto m0 = std::make_shared<const SpdBase>(SpdBase::scaled_identity(2, 2.0));
    CHECK(safeguard_gamma_summable(2, v2(1, 0), 1.0, *m0, 1.0) == doctest::Approx(0.25));
    CHECK(safeguard_gamma_summable(100000, v2(1, 0), 1.0, *m0, 1.0) < 1e-9);
    CHECK(safeguard_gamma_summable(2, v2(0, 0), 1.0, *m0, 1.0) == 0.0);
    CHECK(summable_eta(0, 3.0) == 3.0);
}

TEST_CASE("metric_apply examples") {
    auto m0 = identity_base(2);
    QuasiNewtonMetric v{m0, MetricSign::plus, 1.0, v2(1, 0)};
    CHECK(metric_apply(v, v2(1, 1)) == v2(2, 1));
    CHECK(metric_apply(v, v2(0, 3)) == v2(0, 3));
    CHECK_THROWS_AS(metric_apply(v, Vector::Ones(3)), DimensionError);
}

TEST_CASE("property: secant condition with gamma = 1 for random SPD bases") {
    Gen g(22);
    int tested = 0;
    for (int i = 0; i < 200; ++i) {
        const Eigen::Index n = g.integer(2, 10);
        auto m0 = random_base(g, n);
        const Vector s = g.vec(n), y = g.vec(n, 2.0);
        const Vector d = y - m0->apply(s);
        if (std::abs(d.dot(s)) <= 1e-6) continue;
        const Osr1Direction dir = osr1_direction(*m0, s, y);
        QuasiNewtonMetric v{m0, dir.sign, secant_gamma(), dir.u};
        CHECK((metric_apply(v, s) - y).norm() <= 1e-10 * y.norm());
        ++tested;
    }
    CHECK(tested > 150);
}

TEST_CASE("property: safeguarded minus metrics keep the margin") {
    Gen g(23);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Index n = g.integer(2, 32);
        Vector d(n);
        for (auto& e : d) e = g.uniform(2.0, 5.0);
        auto m0 = std::make_shared<const SpdBase>(SpdBase::diagonal(d));
        const double beta = 1.0, c = g.uniform(0.1, 0.9);
        const Vector u = g.vec(n, g.uniform(0.1, 10.0));
        const double gamma = safeguard_gamma_minus(*m0, u, beta, c);
        const Matrix v = m0->dense() - gamma * u * u.transpose() - Matrix::Identity(n, n) / beta;
        const double margin = m0->rho_min() - 1.0 / beta;
        CHECK(min_eig(v) >= (1.0 - c) * margin - 1e-10);
    }
}

TEST_CASE("property: metric_apply equals dense assembly") {
    Gen g(24);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Index n = g.integer(2, 32), r = g.integer(1, 3);
        auto m0 = random_base(g, n);
        QuasiNewtonMetric v{m0, g.coin() ? MetricSign::plus : MetricSign::minus, g.uniform(0, 2), g.mat(n, r)};
        const Vector x = g.vec(n);
        CHECK((metric_apply(v, x) - v.dense() * x).norm() <= 1e-12 * (1 + v.dense().norm() * x.norm()));
    }
}

TEST_CASE("update_metric follows the rule") {
    auto m0 = identity_base(2);
    MetricRule rule;
    rule.mode = MetricMode::off;
    CHECK(!update_metric(m0, v2(1, 0), v2(2, 0), 3, rule, 1.0).metric.perturbed());
    rule.mode = MetricMode::secant;
    CHECK(!update_metric(m0, v2(1, 0), v2(2, 0), 0, rule, 1.0).metric.perturbed());
    const MetricUpdate up = update_metric(m0, v2(1, 0), v2(2, 0), 1, rule, 1.0);
    CHECK(up.metric.sign == MetricSign::plus);
    CHECK(up.metric.gamma == 1.0);
    rule.mode = MetricMode::fixed;
    rule.gamma_hat = 5.0;
    const MetricUpdate fixed = update_metric(m0, v2(2, 0), v2(4, 0), 1, rule, 1.0);
    CHECK(fixed.metric.gamma * fixed.direction.u.squaredNorm() == doctest::Approx(5.0));
}

TEST_CASE("minus updates are capped to stay positive definite") {
    auto m0 = identity_base(2);
    MetricRule rule;
    rule.mode = MetricMode::fixed;
    rule.gamma_hat = 5.0;
    const MetricUpdate up = update_metric(m0, v2(1, 0), v2(0.5, 0), 1, rule, 1.0);
    REQUIRE(up.metric.sign == MetricSign::minus);
    CHECK(up.capped);
    CHECK(min_eig(up.metric.dense()) >= 0.1 - 1e-12);
}

TEST_CASE("metric mode parsing round trips") {
    for (auto m : {MetricMode::off, MetricMode::secant, MetricMode::safeguard_a2, MetricMode::safeguard_a1,
                   MetricMode::fixed})
        CHECK(parse_metric_mode(to_string(m)) == m);
    CHECK_THROWS_AS(parse_metric_mode("bfgs"), ParameterError);
}

TEST_CASE("assumption_report examples") {
    auto m0 = std::make_shared<const SpdBase>(SpdBase::scaled_identity(8, 3.0));
    const auto zero_eta = [](long) { return 0.0; };
    std::vector<QuasiNewtonMetric> constant(5, QuasiNewtonMetric::unperturbed(m0));
    const AssumptionReport rc = assumption_report(constant, 1.0, 0.5, 10.0, zero_eta);
    CHECK(rc.dense);
    CHECK(rc.a1_holds());
    CHECK(rc.a2_holds());

    // gamma_k = 5 / |u_k|^2 with alternating directions: no summable eta works.
    Gen g(25);
    std::vector<QuasiNewtonMetric> fixed;
    for (int k = 0; k < 6; ++k) {
        const Vector u = g.vec(8);
        fixed.push_back(QuasiNewtonMetric{m0, MetricSign::plus, 5.0 / u.squaredNorm(), u});
    }
    const AssumptionReport rf = assumption_report(fixed, 1.0, 0.5, 100.0,
                                                  [](long k) { return 1.0 / double((k + 1) * (k + 1)); });
    CHECK(!rf.a1_holds());

    // A minus metric beyond the safeguard violates the A2 margin.
    Vector u = Vector::Zero(8);
    u[0] = 1.0;
    std::vector<QuasiNewtonMetric> breach{QuasiNewtonMetric{m0, MetricSign::minus, 1.9, u}};
    const AssumptionReport rb = assumption_report(breach, 1.0, 0.5, 10.0, zero_eta);
    CHECK(!rb.a2_holds());
    CHECK(rb.rows[0].positive_definite);
}

TEST_CASE("assumption_report samples above dimension 64") {
    auto m0 = std::make_shared<const SpdBase>(SpdBase::scaled_identity(80, 3.0));
    std::vector<QuasiNewtonMetric> h(3, QuasiNewtonMetric::unperturbed(m0));
    const AssumptionReport r = assumption_report(h, 1.0, 0.5, 10.0, [](long) { return 0.0; });
    CHECK(!r.dense);
    CHECK(r.a2_holds());
}

TEST_CASE("schedule state partial sums never decrease") {
    auto m0 = std::make_shared<const SpdBase>(SpdBase::scaled_identity(2, 3.0));
    MetricRule rule;
    rule.mode = MetricMode::safeguard_a1;
    MetricScheduleState st;
    double prev = 0.0;
    Gen g(26);
    for (long k = 0; k < 20; ++k) {
        st.record(update_metric(m0, g.vec(2), g.vec(2), k, rule, 1.0));
        CHECK(st.eta_sum >= prev);
        prev = st.eta_sum;
    }
}
