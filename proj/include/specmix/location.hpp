#pragma once
// General location-family tester/learner: characteristic-function registry,
// the CF-normalized frequency estimator, and the exponential / mixed-linear-
// regression reductions.
#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "specmix/learner.hpp"
#include "specmix/mixture.hpp"
#include "specmix/tester.hpp"

namespace specmix {

// Closed-form characteristic function of the base (location-0) family at
// frequency xi (d = 1 for all non-Gaussian families).
std::complex<double> cf_evaluate(FamilyId family, double xi);

// Certified lower bound on min_{|xi| <= M} |CF(xi)|. All registry CFs are
// radially monotone, so the minimum sits at |xi| = M. Throws when the value
// underflows double precision.
double cf_min_modulus(FamilyId family, double M);

struct GeneralTesterParams {
    double sigma = 1.0;
    double M = 1.0;
    double gamma = 0.0;
    double theta = 0.0;
    std::uint64_t N = 1;
    double delta_M = 1.0;  // certified CF modulus floor on the probed ball
    Profile profile = Profile::practical;
};

struct GeneralParamFormulas {
    double sigma2;
    double M2;
    double gamma;
    double theta;
    double delta_M;
    double n_exact;
};

GeneralParamFormulas general_select_params_formulas(int k, int d, double delta,
                                                    double eps, FamilyId family,
                                                    Profile profile);

GeneralTesterParams general_select_params(int k, int d, double delta, double eps,
                                          FamilyId family, Profile profile,
                                          std::uint64_t budget_cap = 1000000000ULL);

// Mixture-independent per-sample RMS bound of the general estimator under
// its importance-sampled frequency draw (proposal ~ phi_sigma/|CF| on the
// truncation ball): k * integral over [-M, M] of phi_sigma(xi)/|CF(xi)|.
double general_rms_bound(FamilyId family, int k, double sigma2, double M2);

// Averages k e^{i xi (X - mu*)} / CF(xi) over truncated-Gaussian xi; accepts
// iff Re >= theta. The frequency is importance-sampled from a proposal
// proportional to phi_sigma/|CF| with exact density-ratio weights, which
// leaves the expectation unchanged and keeps the per-term magnitude near its
// RMS (see general_rms_bound). Exponential models are evaluated through
// their Gumbel reduction (locations are the stored ln lambda).
Verdict general_test(const MixtureModel& model, const Vec& mu_star,
                     const GeneralTesterParams& params, std::uint64_t seed);

EstimateResult general_estimate_T(const MixtureModel& model, const Vec& mu_star,
                                  const GeneralTesterParams& params,
                                  std::uint64_t seed);

// Candidate budget ceil(2 k ln k / delta_hit) (ln k floored at 1) with
// delta_hit = P_{X~D}[|X| <= eps/2] from the closed-form CDF.
struct GeneralCandidateBudget {
    double delta_hit = 0.0;
    std::uint64_t N = 0;
};
GeneralCandidateBudget general_candidate_budget(FamilyId family, int k, double eps);

// Majority vote + 2 eps clustering, exactly as the Gaussian learner, with
// general_test as the inner tester.
LearnResult general_learn(const MixtureModel& model, const LearnerConfig& config,
                          std::uint64_t seed);

// x -> -ln x; learning then targets ln lambda. Throws on nonpositive input.
std::vector<double> exponential_reduction(const std::vector<double>& samples);

// Discards pairs with |x| < 1; emits y/x + noise, noise ~ N(0, 1 - 1/x^2).
// Output is a unit-variance Gaussian mixture over the regression weights.
std::vector<double> mlr_reduction(const std::vector<std::pair<double, double>>& pairs,
                                  RngStream& rng);

// Learns MLR weights from a pair source: `pair_source(seed, n)` returns n
// fresh i.i.d. pairs. Reduction + Gaussian tester on the reduced stream.
LearnResult mlr_learn(
    const std::function<std::vector<std::pair<double, double>>(std::uint64_t, std::size_t)>&
        pair_source,
    const LearnerConfig& config, std::uint64_t seed);

// One-line registry descriptions for the CLI `families` command.
struct FamilyInfo {
    FamilyId id;
    const char* density;
    const char* cf;
    const char* reductions;
};
std::vector<FamilyInfo> family_registry();

}  // namespace specmix
