// Geometry and analytic-utility checks: separation, bottleneck matching,
// norm lower bounds, ball volumes, and model serialization.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specmix/errors.hpp"
#include "specmix/mixture.hpp"
#include "specmix/rng.hpp"
#include "specmix/sampling.hpp"

using namespace specmix;

namespace {
Points translated(const Points& pts, const Vec& shift) {
    Points out = pts;
    for (auto& p : out)
        for (std::size_t t = 0; t < shift.size(); ++t) p[t] += shift[t];
    return out;
}
}  // namespace

TEST_CASE("separation on a 1-D grid") {
    CHECK(separation({{0.0}, {3.0}, {6.0}}) == doctest::Approx(3.0));
}

TEST_CASE("separation single-point convention is +infinity") {
    CHECK(std::isinf(separation({{0.0, 0.0}})));
    CHECK(std::isinf(separation({})));
}

TEST_CASE("separation of 50 shuffled points on a unit grid is 1") {
    Points pts;
    for (int i = 0; i < 50; ++i) pts.push_back({static_cast<double>(i)});
    RngStream rng(7, 0);
    for (std::size_t i = pts.size(); i > 1; --i)
        std::swap(pts[i - 1], pts[rng.next_u64() % i]);
    CHECK(separation(pts) == doctest::Approx(1.0));
    // Brute-force oracle.
    double best = 1e300;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::min(best, l2_distance(pts[i], pts[j]));
    CHECK(separation(pts) == doctest::Approx(best));
}

TEST_CASE("separation is permutation and translation invariant, scales linearly") {
    RngStream rng(11, 0);
    Points pts;
    for (int i = 0; i < 8; ++i) pts.push_back({rng.normal() * 3, rng.normal() * 3});
    const double base = separation(pts);

    Points perm = pts;
    std::reverse(perm.begin(), perm.end());
    CHECK(separation(perm) == doctest::Approx(base));

    CHECK(separation(translated(pts, {4.2, -1.7})) == doctest::Approx(base));

    Points scaled = pts;
    for (auto& p : scaled)
        for (double& x : p) x *= 2.5;
    CHECK(separation(scaled) == doctest::Approx(2.5 * base));
}

TEST_CASE("epsilon_close nearest assignment") {
    auto r = epsilon_close({{0.0}, {1.0}}, {{-0.02}, {1.05}}, 0.1);
    CHECK(r.matched);
    REQUIRE(r.permutation.has_value());
    CHECK((*r.permutation)[0] == 0);
    CHECK((*r.permutation)[1] == 1);
    CHECK(r.max_distance == doctest::Approx(0.05));
}

TEST_CASE("epsilon_close rejects two estimates on the same target") {
    auto r = epsilon_close({{0.0}, {1.0}}, {{0.5}, {0.5}}, 0.1);
    CHECK_FALSE(r.matched);
}

TEST_CASE("epsilon_close of a set against itself is a zero-cost match") {
    RngStream rng(3, 0);
    Points pts;
    for (int i = 0; i < 5; ++i) pts.push_back({rng.normal(), rng.normal()});
    auto r = epsilon_close(pts, pts, 1e-9);
    CHECK(r.matched);
    CHECK(r.max_distance == doctest::Approx(0.0));
}

TEST_CASE("epsilon_close finds the unique permutation for eps < delta/2 noise") {
    // Bottleneck cost must equal the exhaustive-permutation oracle for k <= 6.
    RngStream rng(19, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const int k = 2 + static_cast<int>(rng.next_u64() % 5);
        Points truth = generate_separated_means(k, 2, 2.0, 12.0, rng);
        Points est = truth;
        for (auto& p : est) {
            // Noise of norm <= eps/2 = 0.25.
            double nx = rng.normal(), ny = rng.normal();
            double nn = std::sqrt(nx * nx + ny * ny);
            double r = 0.25 * rng.u01();
            p[0] += r * nx / nn;
            p[1] += r * ny / nn;
        }
        auto res = epsilon_close(truth, est, 0.5);
        CHECK(res.matched);
        REQUIRE(res.permutation.has_value());
        // Exhaustive oracle: minimum over all permutations of the max distance.
        std::vector<int> idx(k);
        std::iota(idx.begin(), idx.end(), 0);
        double best = 1e300;
        std::vector<int> best_perm;
        do {
            double worst = 0.0;
            for (int i = 0; i < k; ++i)
                worst = std::max(worst, l2_distance(truth[i], est[idx[i]]));
            if (worst < best) { best = worst; best_perm = idx; }
        } while (std::next_permutation(idx.begin(), idx.end()));
        CHECK(res.max_distance == doctest::Approx(best));
        for (int i = 0; i < k; ++i) CHECK((*res.permutation)[i] == best_perm[i]);
    }
}

TEST_CASE("epsilon_close size mismatch is an error") {
    CHECK_THROWS_AS(epsilon_close({{0.0}}, {{0.0}, {1.0}}, 0.1), PreconditionError);
}

TEST_CASE("norm_lower_bound closed form") {
    CHECK(norm_lower_bound(1.0, 2, 9) == doctest::Approx(0.75));
    CHECK(norm_lower_bound(2.0, 1, 2) == doctest::Approx(1.0));
    CHECK_THROWS_AS(norm_lower_bound(1.0, 1, 1), PreconditionError);
}

TEST_CASE("norm_lower_bound holds on random separated sets") {
    RngStream rng(23, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const int d = 1 + static_cast<int>(rng.next_u64() % 3);
        const int k = 2 + static_cast<int>(rng.next_u64() % 12);
        const double delta = 0.5 + 2.0 * rng.u01();
        Points pts = generate_separated_means(k, d, delta, delta * (3.0 + k), rng);
        // The bound is stated for sets whose nearest point sits at the origin.
        std::vector<double> norms;
        const Vec zero(d, 0.0);
        std::size_t nearest = 0;
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (l2_distance(pts[i], zero) < l2_distance(pts[nearest], zero))
                nearest = i;
        Vec origin = pts[nearest];
        for (const auto& p : pts) norms.push_back(l2_distance(p, origin));
        std::sort(norms.begin(), norms.end());
        for (int j = 2; j <= k; ++j)
            CHECK(norms[j - 1] >= norm_lower_bound(delta, d, j) - 1e-12);
    }
}

TEST_CASE("ball_volume closed forms and the (2r)^d bound") {
    CHECK(ball_volume(2, 1.0) == doctest::Approx(3.14159265358979324));
    CHECK(ball_volume(3, 1.0) == doctest::Approx(4.18879020478639098));
    CHECK(ball_volume(7, 0.5) <= 1.0);
    for (int d = 1; d <= 20; ++d)
        for (double r : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0})
            CHECK(ball_volume(d, r) <= std::pow(2.0 * r, d) * (1.0 + 1e-12));
}

TEST_CASE("MixtureModel JSON round trip") {
    MixtureModel m;
    m.family = FamilyId::laplace;
    m.d = 1;
    m.k = 3;
    m.means = {{0.25}, {-1.5}, {3.75}};
    auto back = MixtureModel::from_json(m.to_json());
    CHECK(back.family == m.family);
    CHECK(back.d == m.d);
    CHECK(back.k == m.k);
    CHECK(back.means == m.means);
}

TEST_CASE("MixtureModel validation") {
    MixtureModel m;
    m.family = FamilyId::gaussian;
    m.d = 2;
    m.k = 2;
    m.means = {{0.0, 0.0}};  // wrong count
    CHECK_THROWS_AS(m.validate(), PreconditionError);
    m.means = {{0.0, 0.0}, {1.0, 1.0}};
    CHECK_NOTHROW(m.validate());
    m.family = FamilyId::cauchy;  // non-Gaussian requires d = 1
    CHECK_THROWS_AS(m.validate(), PreconditionError);
}

TEST_CASE("family names round trip") {
    for (FamilyId f : {FamilyId::gaussian, FamilyId::cauchy, FamilyId::logistic,
                       FamilyId::laplace, FamilyId::gumbel, FamilyId::exponential})
        CHECK(family_from_name(family_name(f)) == f);
    CHECK_THROWS_AS(family_from_name("weibull"), PreconditionError);
}
