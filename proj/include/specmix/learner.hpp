#pragma once
// Full mean recovery: sample candidates, majority-vote the tester on each,
// single-linkage cluster the survivors at radius 2 eps, one representative
// per cluster.
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "specmix/mixture.hpp"
#include "specmix/tester.hpp"

namespace specmix {

struct LearnerConfig {
    int k = 2;
    int d = 1;
    double delta = 1.0;
    double eps = 0.1;
    Profile profile = Profile::practical;
    // R = ceil(vote_multiplier ln N) tester calls per candidate; nonpositive
    // means "profile default" (paper 5, practical 0.65).
    double vote_multiplier = 0.0;
    // Candidate count multiplier on the baseline ceil(2 ln k / p);
    // nonpositive means profile default (paper 1, practical 3).
    double candidate_multiplier = 0.0;
    // Per-vote tester calls run at max(ceil(scale * N_tester), floor)
    // samples; majority voting re-amplifies the confidence that a full-size
    // call would have. Nonpositive scale means profile default
    // (paper 1.0, practical 0.1).
    double call_budget_scale = 0.0;
    std::uint64_t call_budget_floor = 30000;
    std::uint64_t candidate_cap = 10000000;
    std::uint64_t sample_budget_cap = 1000000000ULL;

    double effective_vote_multiplier() const;
    double effective_candidate_multiplier() const;
    double effective_call_budget_scale() const;
};

struct LearnResult {
    Points means_hat;
    std::vector<Points> clusters;
    std::uint64_t candidates_drawn = 0;
    std::uint64_t tester_calls = 0;
    double wall_time_ms = 0.0;

    std::string to_json() const;
};

// Candidate-hit probability p and baseline candidate count N = ceil(2 ln k / p)
// with p = max_{0<=r<=eps/2} r^d e^{-r^2/2} / (2^{d/2} k Gamma(d/2+1)),
// maximized at r* = min{eps/2, sqrt(d)}.
struct CandidateBudget {
    double p = 0.0;
    std::uint64_t N = 0;
};
CandidateBudget candidate_budget(int k, int d, double eps);

// Single-linkage clustering: indices i, i' in the same block iff chained
// through pairwise distances <= threshold. Blocks ordered by smallest member
// index.
std::vector<std::vector<std::size_t>> cluster(const Points& points, double threshold);

// Shared vote-and-cluster engine: `tester_call(candidate, call_seed)` runs
// one Accept/Reject call. Throws ClusterCountMismatch when the accepted
// candidates do not form exactly k clusters.
LearnResult learn_with_tester(
    const Points& candidates, int k, double eps, std::uint64_t R,
    const std::function<bool(const Vec&, std::uint64_t)>& tester_call,
    std::uint64_t seed);

// End-to-end Gaussian learner over a generative mixture model.
LearnResult learn(const MixtureModel& model, const LearnerConfig& config,
                  std::uint64_t seed);

// Derived per-run quantities, exposed for harnesses and the CLI.
struct LearnPlan {
    TesterParams tester;        // full-size tester parameters
    TesterParams per_call;      // same with the reduced per-vote budget
    std::uint64_t candidates = 0;
    std::uint64_t votes_per_candidate = 0;
};
LearnPlan plan_learn(const LearnerConfig& config);

// Deterministic per-call seed derivation shared by all learners.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace specmix
