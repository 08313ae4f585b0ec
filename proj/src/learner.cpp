#include "specmix/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "specmix/errors.hpp"
#include "specmix/math_util.hpp"
#include "specmix/sampling.hpp"

namespace specmix {

double LearnerConfig::effective_vote_multiplier() const {
    if (vote_multiplier > 0.0) return vote_multiplier;
    return profile == Profile::paper ? 5.0 : 0.65;
}

double LearnerConfig::effective_candidate_multiplier() const {
    if (candidate_multiplier > 0.0) return candidate_multiplier;
    return profile == Profile::paper ? 1.0 : 3.0;
}

double LearnerConfig::effective_call_budget_scale() const {
    if (call_budget_scale > 0.0) return call_budget_scale;
    return profile == Profile::paper ? 1.0 : 0.1;
}

std::string LearnResult::to_json() const {
    nlohmann::json j;
    j["means_hat"] = means_hat;
    std::vector<std::size_t> sizes;
    for (const auto& c : clusters) sizes.push_back(c.size());
    j["cluster_sizes"] = sizes;
    j["candidates_drawn"] = candidates_drawn;
    j["tester_calls"] = tester_calls;
    j["wall_time_ms"] = wall_time_ms;
    return j.dump(2);
}

CandidateBudget candidate_budget(int k, int d, double eps) {
    if (k < 2) throw PreconditionError("candidate_budget requires k >= 2");
    if (!(eps > 0.0)) throw PreconditionError("candidate_budget requires eps > 0");
    const double rstar = std::min(eps / 2.0, std::sqrt(static_cast<double>(d)));
    const double p = std::pow(rstar, d) * std::exp(-0.5 * rstar * rstar) /
                     (std::pow(2.0, 0.5 * d) * k * gamma_real(0.5 * d + 1.0));
    CandidateBudget out;
    out.p = p;
    out.N = static_cast<std::uint64_t>(std::ceil(2.0 * std::log(static_cast<double>(k)) / p));
    return out;
}

std::vector<std::vector<std::size_t>> cluster(const Points& points, double threshold) {
    if (!(threshold > 0.0)) throw PreconditionError("cluster requires threshold > 0");
    const std::size_t n = points.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (l2_distance(points[i], points[j]) <= threshold) {
                std::size_t ri = find(i), rj = find(j);
                if (ri != rj) parent[ri] = rj;
            }
    std::vector<std::vector<std::size_t>> blocks;
    std::vector<long> block_of(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = find(i);
        if (block_of[r] < 0) {
            block_of[r] = static_cast<long>(blocks.size());
            blocks.emplace_back();
        }
        blocks[block_of[r]].push_back(i);
    }
    return blocks;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = seed ^ (a * 0xd1342543de82ef95ULL) ^ (b * 0xaf251af3b0f025b5ULL);
    return splitmix64(s);
}

LearnResult learn_with_tester(
    const Points& candidates, int k, double eps, std::uint64_t R,
    const std::function<bool(const Vec&, std::uint64_t)>& tester_call,
    std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    Points accepted;
    std::vector<std::uint64_t> votes_of_accepted;
    std::uint64_t calls = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        std::uint64_t yes = 0;
        for (std::uint64_t r = 0; r < R; ++r) {
            // Stop once the outcome is decided: remaining votes cannot flip a
            // strict majority either way.
            if (2 * yes > R || 2 * (yes + (R - r)) <= R) break;
            ++calls;
            if (tester_call(candidates[i], derive_seed(seed, i + 1, r + 1))) ++yes;
        }
        if (2 * yes > R) {  // strict majority; ties reject
            accepted.push_back(candidates[i]);
            votes_of_accepted.push_back(yes);
        }
    }
    const auto blocks = accepted.empty()
                            ? std::vector<std::vector<std::size_t>>{}
                            : cluster(accepted, 2.0 * eps);
    if (blocks.size() != static_cast<std::size_t>(k))
        throw ClusterCountMismatch(blocks.size(), k);

    LearnResult res;
    res.candidates_drawn = candidates.size();
    res.tester_calls = calls;
    const int d = static_cast<int>(candidates.front().size());
    for (const auto& block : blocks) {
        // Representative: the member closest to the vote-weighted cluster
        // mean. Weighting by accept votes pulls the pick toward the cluster
        // core and away from spill-side stragglers.
        Vec centroid(d, 0.0);
        double wsum = 0.0;
        for (std::size_t idx : block) {
            const double w = static_cast<double>(votes_of_accepted[idx]);
            for (int t = 0; t < d; ++t) centroid[t] += w * accepted[idx][t];
            wsum += w;
        }
        for (int t = 0; t < d; ++t) centroid[t] /= wsum;
        std::size_t best = block.front();
        double best_dist = l2_distance(accepted[best], centroid);
        for (std::size_t idx : block) {
            const double dist = l2_distance(accepted[idx], centroid);
            if (dist < best_dist) {
                best_dist = dist;
                best = idx;
            }
        }
        res.means_hat.push_back(accepted[best]);
        Points members;
        for (std::size_t idx : block) members.push_back(accepted[idx]);
        res.clusters.push_back(std::move(members));
    }
    res.wall_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
    return res;
}

LearnPlan plan_learn(const LearnerConfig& config) {
    LearnPlan plan;
    plan.tester = select_params(config.k, config.d, config.delta, config.eps,
                                config.profile, config.sample_budget_cap);
    plan.per_call = plan.tester;
    const double scale = config.effective_call_budget_scale();
    plan.per_call.N = std::min<std::uint64_t>(
        plan.tester.N,
        std::max<std::uint64_t>(
            static_cast<std::uint64_t>(std::ceil(scale * static_cast<double>(plan.tester.N))),
            config.call_budget_floor));

    // Candidate count: baseline ceil(2 ln k / p) times the profile
    // multiplier; ln k floored at 1 so k = 1 still draws candidates.
    const double rstar =
        std::min(config.eps / 2.0, std::sqrt(static_cast<double>(config.d)));
    const double p = std::pow(rstar, config.d) * std::exp(-0.5 * rstar * rstar) /
                     (std::pow(2.0, 0.5 * config.d) * config.k *
                      gamma_real(0.5 * config.d + 1.0));
    const double logk = std::max(std::log(static_cast<double>(config.k)), 1.0);
    const double n_exact =
        std::ceil(config.effective_candidate_multiplier() * 2.0 * logk / p);
    if (!(n_exact <= static_cast<double>(config.candidate_cap)))
        throw BudgetExceeded("learn: candidate count " + std::to_string(n_exact) +
                             " exceeds cap");
    plan.candidates = static_cast<std::uint64_t>(n_exact);

    std::uint64_t R = static_cast<std::uint64_t>(std::ceil(
        config.effective_vote_multiplier() * std::log(static_cast<double>(plan.candidates))));
    if (R < 1) R = 1;
    if (R % 2 == 0) ++R;  // even R wastes a vote: ties reject
    plan.votes_per_candidate = R;
    return plan;
}

LearnResult learn(const MixtureModel& model, const LearnerConfig& config,
                  std::uint64_t seed) {
    model.validate();
    if (model.family != FamilyId::gaussian)
        throw PreconditionError("learn: Gaussian mixtures only; use general_learn");
    const LearnPlan plan = plan_learn(config);
    RngStream cand_rng(seed, 0xc0ffee);
    const Points candidates = sample(model, plan.candidates, cand_rng);
    auto call = [&](const Vec& mu_star, std::uint64_t call_seed) {
        return test(model, mu_star, plan.per_call, call_seed).accept;
    };
    return learn_with_tester(candidates, config.k, config.eps,
                             plan.votes_per_candidate, call, seed);
}

}  // namespace specmix
