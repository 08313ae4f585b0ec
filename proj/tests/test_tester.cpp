// Gaussian tester checks: parameter formulas, analytic oracles for the
// Monte Carlo statistic, claim bounds, and reproducibility.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "specmix/errors.hpp"
#include "specmix/mixture.hpp"
#include "specmix/rng.hpp"
#include "specmix/sampling.hpp"
#include "specmix/tester.hpp"

using namespace specmix;

TEST_CASE("closed-form parameter audit at k=3, d=1, delta=10, eps=0.1") {
    auto f = select_params_formulas(3, 1, 10.0, 0.1, Profile::paper);
    CHECK(f.s2p == doctest::Approx(28.698471352259028).epsilon(1e-12));
    CHECK(f.sigma2 == doctest::Approx(55.396942704518056).epsilon(1e-12));
    CHECK(f.gamma == doctest::Approx(0.0044841361487904731).epsilon(1e-12));
    CHECK(f.s2_hat == doctest::Approx(11.810193359837562).epsilon(1e-12));
    CHECK(f.M2 == doctest::Approx(2458.5640731623558).epsilon(1e-12));
    CHECK(f.theta == doctest::Approx(0.95649523620456987).epsilon(1e-12));
}

TEST_CASE("select_params enforces the eps precondition") {
    CHECK_THROWS_AS(select_params(3, 1, 2.0, 2.0, Profile::paper), PreconditionError);
    CHECK_THROWS_AS(select_params(3, 1, 2.0, 2.0, Profile::practical), PreconditionError);
    CHECK_THROWS_AS(select_params(1, 1, 2.0, 0.01, Profile::paper), PreconditionError);
    CHECK_NOTHROW(select_params(1, 1, 2.0, 0.2, Profile::practical));
}

TEST_CASE("paper-profile budgets exceed the cap and say so") {
    CHECK_THROWS_AS(select_params(3, 1, 2.0, 0.01, Profile::paper), BudgetExceeded);
}

TEST_CASE("derived truncation radius always satisfies M^2 >= 5 d sigma^2") {
    RngStream rng(2, 0);
    for (int rep = 0; rep < 500; ++rep) {
        const int k = 1 + static_cast<int>(rng.next_u64() % 8);
        const int d = 1 + static_cast<int>(rng.next_u64() % 4);
        const double delta = 0.5 + 8.0 * rng.u01();
        const double mind = std::min(static_cast<double>(d),
                                     std::log(static_cast<double>(std::max(k, 2))));
        for (Profile pr : {Profile::paper, Profile::practical}) {
            if (pr == Profile::paper && k < 2) continue;
            const double cap = (pr == Profile::paper)
                                   ? std::min(delta / 100.0, delta / (32.0 * std::sqrt(mind)))
                                   : delta / 4.0;
            const double eps = cap * (0.1 + 0.85 * rng.u01());
            auto f = select_params_formulas(k, d, delta, eps, pr);
            CHECK(f.M2 >= 5.0 * d * f.sigma2 * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("threshold sandwich and the paper-profile gap") {
    RngStream rng(3, 0);
    for (int rep = 0; rep < 500; ++rep) {
        const int k = 2 + static_cast<int>(rng.next_u64() % 8);
        const double delta = 1.0 + 8.0 * rng.u01();
        const double eps = delta / 100.0 * (0.05 + 0.9 * rng.u01());
        auto f = select_params_formulas(k, 1, delta, eps, Profile::paper);
        const double u = f.s2p * eps * eps;
        const double hi = std::exp(-u / 16.0), lo = std::exp(-u / 4.0);
        CHECK(hi > f.theta);
        CHECK(f.theta > lo);
        if (u <= 1.0) CHECK(hi - lo >= 8.0 * f.gamma);
    }
}

TEST_CASE("analytic main term") {
    CHECK(analytic_main_term({{0.0}}, {0.0}, 3.0) == doctest::Approx(1.0));
    CHECK(analytic_main_term({{0.0}, {3.0}, {6.0}}, {0.0}, 1.0) ==
          doctest::Approx(1.0342194892707524).epsilon(1e-14));
    // Translation identity: shifting both the means and the reference point.
    const double a = analytic_main_term({{0.0}, {3.0}, {6.0}}, {3.0}, 1.0);
    const double b = analytic_main_term({{-3.0}, {0.0}, {3.0}}, {0.0}, 1.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-15));
}

namespace {
TesterParams oracle_params(double M, std::uint64_t N) {
    TesterParams p;
    p.sigma = 1.0;
    p.M = M;
    p.gamma = 0.01;
    p.theta = 0.5;
    p.N = N;
    return p;
}
}  // namespace

TEST_CASE("estimator agrees with the analytic oracle, k=1") {
    MixtureModel m;
    m.family = FamilyId::gaussian;
    m.d = 1;
    m.k = 1;
    m.means = {{0.0}};
    auto p = oracle_params(4.0, 1000000);
    auto r = estimate_T_detailed(m, {0.0}, p, 101);
    const double trunc = truncation_bound(m.means, {0.0}, p);
    CHECK(trunc == doctest::Approx(std::exp(-16.0 / 5.0)).epsilon(1e-12));
    CHECK(std::abs(r.value.real() - 1.0) <= 3.0 * (r.stderr_re() + trunc));
}

TEST_CASE("estimator agrees with the analytic oracle, k=3") {
    MixtureModel m;
    m.family = FamilyId::gaussian;
    m.d = 1;
    m.k = 3;
    m.means = {{0.0}, {3.0}, {6.0}};
    auto p = oracle_params(4.0, 1000000);
    auto r = estimate_T_detailed(m, {0.0}, p, 102);
    const double main = analytic_main_term(m.means, {0.0}, 1.0);
    CHECK(main == doctest::Approx(1.0342194892707524).epsilon(1e-13));
    CHECK(std::abs(r.value.real() - main) <=
          3.0 * r.stderr_re() + truncation_bound(m.means, {0.0}, p));
}

TEST_CASE("estimator vanishes far from every mean") {
    MixtureModel m;
    m.family = FamilyId::gaussian;
    m.d = 1;
    m.k = 3;
    m.means = {{0.0}, {3.0}, {6.0}};
    auto p = oracle_params(4.0, 1000000);
    auto r = estimate_T(m, {20.0}, p, 103);
    CHECK(std::abs(r) <= 0.05);
}

TEST_CASE("estimate_T is deterministic in the seed") {
    MixtureModel m;
    m.family = FamilyId::gaussian;
    m.d = 2;
    m.k = 2;
    m.means = {{0.0, 0.0}, {3.0, 1.0}};
    auto p = oracle_params(4.0, 200000);
    auto a = estimate_T(m, {0.5, 0.0}, p, 7);
    auto b = estimate_T(m, {0.5, 0.0}, p, 7);
    auto c = estimate_T(m, {0.5, 0.0}, p, 8);
    CHECK(a.real() == b.real());
    CHECK(a.imag() == b.imag());
    CHECK(a != c);
}

TEST_CASE("testing is translation equivariant bitwise") {
    MixtureModel m;
    m.family = FamilyId::gaussian;
    m.d = 1;
    m.k = 3;
    m.means = {{0.0}, {2.0}, {4.0}};
    auto p = select_params(3, 1, 2.0, 0.4, Profile::practical);
    p.N = 300000;
    auto v1 = test(m, {2.0}, p, 55);
    MixtureModel shifted = m;
    for (auto& mu : shifted.means) mu[0] -= 2.0;
    auto v2 = test(shifted, {0.0}, p, 55);
    CHECK(v1.accept == v2.accept);
    CHECK(v1.statistic.real() == v2.statistic.real());
    CHECK(v1.statistic.imag() == v2.statistic.imag());
    CHECK(v1.accept == (v1.statistic.real() >= v1.threshold));
}

TEST_CASE("component-sum bounds on an explicit fixture") {
    const double sigma = std::sqrt(55.396942704518056);
    auto sb = s_bounds({{0.0}, {3.0}, {6.0}}, sigma, 3.0, 1, 3);
    const double s2p = sigma * sigma / 2.0 + 1.0;
    const double s1_exact = std::exp(-s2p * 9.0 / 4.0) + std::exp(-s2p * 36.0 / 4.0);
    const double s2_exact = 1.0 + std::exp(-9.0 / 4.0) + std::exp(-36.0 / 4.0);
    CHECK(sb.s1 == doctest::Approx(s1_exact).epsilon(1e-12));
    CHECK(sb.s2 == doctest::Approx(s2_exact).epsilon(1e-12));
    CHECK(sb.hypothesis_ok);
    CHECK(sb.s1 <= sb.s1_bound);
    CHECK(sb.s2 <= sb.s2_bound);
}

TEST_CASE("component-sum bounds: k=1 edge and hypothesis gate") {
    auto one = s_bounds({{0.0}}, 2.0, 1.0, 1, 1);
    CHECK(one.s1 == doctest::Approx(0.0));
    auto weak = s_bounds({{0.0}, {1.0}}, 0.1, 1.0, 1, 2);  // tiny sigma
    CHECK_FALSE(weak.hypothesis_ok);
}

TEST_CASE("chi-square tail bound checks") {
    CHECK(chi_square_tail_check(1, 5.0));
    CHECK(chi_square_tail_check(2, 10.0));
    CHECK(chi_square_tail_check(3, 15.0));
    CHECK_THROWS_AS(chi_square_tail_check(2, 9.0), PreconditionError);
}

TEST_CASE("worst-case per-sample RMS grows with k and bounds the magnitude") {
    const double r1 = worst_case_rms(1, 1, 4.0, 20.0);
    const double r3 = worst_case_rms(3, 1, 4.0, 20.0);
    CHECK(r1 > 0.0);
    CHECK(r3 == doctest::Approx(3.0 * r1).epsilon(1e-12));
    // The RMS never exceeds the per-term magnitude bound 2^{d/2} k e^{M^2/4}.
    CHECK(r3 <= 3.0 * std::sqrt(2.0) * std::exp(5.0));
}

TEST_CASE("tester parameter JSON round trip") {
    auto p = select_params(5, 1, 2.0, 0.2, Profile::practical);
    auto back = TesterParams::from_json(p.to_json());
    CHECK(back.sigma == p.sigma);
    CHECK(back.M == p.M);
    CHECK(back.gamma == p.gamma);
    CHECK(back.theta == p.theta);
    CHECK(back.N == p.N);
    CHECK(back.profile == p.profile);
}
