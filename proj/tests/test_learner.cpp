// Learner checks: candidate budget closed form, single-linkage clustering,
// plan derivation, and end-to-end structural invariants.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "specmix/errors.hpp"
#include "specmix/learner.hpp"
#include "specmix/mixture.hpp"
#include "specmix/rng.hpp"

using namespace specmix;

TEST_CASE("candidate budget closed form at k=10, d=1, eps=0.2") {
    auto cb = candidate_budget(10, 1, 0.2);
    // r* = eps/2 = 0.1; p = r e^{-r^2/2} / (sqrt(2) k Gamma(3/2)).
    CHECK(cb.p == doctest::Approx(0.0079390509495423).epsilon(1e-10));
    CHECK(cb.N == static_cast<std::uint64_t>(std::ceil(2.0 * std::log(10.0) / cb.p)));
    CHECK(cb.N == 581);
}

TEST_CASE("candidate budget uses the interior maximizer when eps/2 > sqrt(d)") {
    auto cb = candidate_budget(4, 1, 4.0);  // r* = sqrt(1) = 1
    const double p_at_1 = std::exp(-0.5) / (std::sqrt(2.0) * 4.0 * (std::sqrt(M_PI) / 2.0));
    CHECK(cb.p == doctest::Approx(p_at_1).epsilon(1e-12));
}

TEST_CASE("candidate hit probability decreases in k") {
    double prev = 1.0;
    for (int k = 2; k <= 100; ++k) {
        auto cb = candidate_budget(k, 1, 0.2);
        CHECK(cb.p < prev);
        prev = cb.p;
    }
}

TEST_CASE("single-linkage clustering examples") {
    auto c = cluster({{0.0}, {0.1}, {5.0}}, 0.2);
    REQUIRE(c.size() == 2);
    CHECK(c[0] == std::vector<std::size_t>{0, 1});
    CHECK(c[1] == std::vector<std::size_t>{2});

    auto same = cluster({{1.0}, {1.0}, {1.0}, {1.0}}, 0.01);
    CHECK(same.size() == 1);
}

TEST_CASE("clustering output is a partition ordered by smallest member") {
    RngStream rng(5, 0);
    Points pts;
    for (int i = 0; i < 60; ++i) pts.push_back({10.0 * rng.u01(), 10.0 * rng.u01()});
    auto blocks = cluster(pts, 0.8);
    std::set<std::size_t> seen;
    std::size_t prev_min = 0;
    bool first = true;
    for (const auto& b : blocks) {
        REQUIRE_FALSE(b.empty());
        std::size_t mn = b.front();
        for (std::size_t i : b) {
            CHECK(seen.insert(i).second);  // disjoint
            mn = std::min(mn, i);
        }
        if (!first) CHECK(mn > prev_min);
        prev_min = mn;
        first = false;
    }
    CHECK(seen.size() == pts.size());  // union = input
    // Chaining property: points closer than the threshold share a block.
    std::vector<std::size_t> label(pts.size());
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (std::size_t i : blocks[b]) label[i] = b;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (l2_distance(pts[i], pts[j]) <= 0.8) CHECK(label[i] == label[j]);
}

TEST_CASE("per-call seed derivation is deterministic and spreads") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
    CHECK(derive_seed(2, 2, 3) != derive_seed(1, 2, 3));
}

TEST_CASE("plan derivation: odd vote counts and capped per-call budgets") {
    LearnerConfig cfg;
    cfg.k = 5;
    cfg.d = 1;
    cfg.delta = 2.0;
    cfg.eps = 0.2;
    auto plan = plan_learn(cfg);
    CHECK(plan.votes_per_candidate % 2 == 1);
    CHECK(plan.per_call.N <= plan.tester.N);
    CHECK(plan.per_call.theta == plan.tester.theta);
    CHECK(plan.candidates > 0);

    cfg.call_budget_scale = 0.5;
    auto half = plan_learn(cfg);
    CHECK(half.per_call.N ==
          static_cast<std::uint64_t>(std::ceil(0.5 * static_cast<double>(plan.tester.N))));
}

namespace {
MixtureModel grid_model(int k, double spacing) {
    MixtureModel m;
    m.family = FamilyId::gaussian;
    m.d = 1;
    m.k = k;
    for (int i = 0; i < k; ++i) m.means.push_back({spacing * i});
    return m;
}
}  // namespace

TEST_CASE("learn is bitwise reproducible") {
    auto m = grid_model(3, 2.0);
    LearnerConfig cfg;
    cfg.k = 3;
    cfg.d = 1;
    cfg.delta = 2.0;
    cfg.eps = 0.2;
    auto a = learn(m, cfg, 71);
    auto b = learn(m, cfg, 71);
    CHECK(a.means_hat == b.means_hat);
    CHECK(a.candidates_drawn == b.candidates_drawn);
    CHECK(a.tester_calls == b.tester_calls);
}

TEST_CASE("learn structural invariants on a separated fixture") {
    auto m = grid_model(3, 2.0);
    LearnerConfig cfg;
    cfg.k = 3;
    cfg.d = 1;
    cfg.delta = 2.0;
    cfg.eps = 0.2;
    auto r = learn(m, cfg, 71);
    REQUIRE(r.means_hat.size() == 3);
    REQUIRE(r.clusters.size() == 3);
    // Each representative is a member of its cluster.
    for (std::size_t c = 0; c < 3; ++c) {
        bool member = false;
        for (const auto& pt : r.clusters[c]) member = member || pt == r.means_hat[c];
        CHECK(member);
    }
    // Cross-cluster survivors must sit strictly outside the 2 eps
    // single-linkage radius, otherwise the blocks would have chained.
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a + 1; b < 3; ++b)
            for (const auto& pa : r.clusters[a])
                for (const auto& pb : r.clusters[b])
                    CHECK(l2_distance(pa, pb) > 2.0 * cfg.eps);
    CHECK(r.tester_calls > 0);
    CHECK(r.candidates_drawn > 0);
}

TEST_CASE("learn recovers a single component") {
    auto m = grid_model(1, 1.0);
    LearnerConfig cfg;
    cfg.k = 1;
    cfg.d = 1;
    cfg.delta = 2.0;
    cfg.eps = 0.2;
    auto r = learn(m, cfg, 13);
    REQUIRE(r.means_hat.size() == 1);
    CHECK(std::abs(r.means_hat[0][0]) <= 0.2);
}

TEST_CASE("learn rejects configs that violate the eps precondition") {
    auto m = grid_model(3, 2.0);
    LearnerConfig cfg;
    cfg.k = 3;
    cfg.d = 1;
    cfg.delta = 2.0;
    cfg.eps = 1.0;  // practical profile requires eps < delta/4
    CHECK_THROWS_AS(learn(m, cfg, 1), PreconditionError);
}
