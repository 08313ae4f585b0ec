#pragma once
// Accept/Reject tester for "is some component mean within eps/2 of mu*?",
// built on the truncated-Gaussian-frequency Fourier statistic, plus the
// analytic oracles used to validate it.
#include <complex>
#include <cstdint>
#include <map>
#include <string>

#include "specmix/mixture.hpp"
#include "specmix/rng.hpp"

namespace specmix {

enum class Profile { paper, practical };

Profile profile_from_name(const std::string& name);
std::string profile_name(Profile p);

struct TesterParams {
    double sigma = 1.0;    // frequency std
    double M = 1.0;        // frequency truncation radius
    double gamma = 0.0;    // target estimation error
    double theta = 0.0;    // acceptance threshold
    std::uint64_t N = 1;   // sample budget
    Profile profile = Profile::practical;
    std::map<std::string, double> constants;

    std::string to_json() const;
    static TesterParams from_json(const std::string& text);
};

struct Verdict {
    bool accept = false;
    std::complex<double> statistic{0.0, 0.0};
    double threshold = 0.0;
    double error_budget = 0.0;
    std::uint64_t n_used = 0;

    std::string to_json() const;
};

// All derived quantities as exact reals (no budget enforcement); used by the
// formula-audit tests and internally by select_params.
struct ParamFormulas {
    double s2p;      // sigma^2/2 + 1
    double sigma2;
    double gamma;
    double s2_hat;   // component-sum bound used inside M^2
    double M2;
    double theta;
    double n_exact;  // may be astronomically large in the paper profile
};

ParamFormulas select_params_formulas(int k, int d, double delta, double eps,
                                     Profile profile);

// Parameter selection. The conservative profile enforces the tight gate
// eps < min{delta/100, delta/(32 sqrt(min{d, ln k}))} and k >= 2; the
// practical profile enforces eps < delta/4. Throws BudgetExceeded when the
// derived N exceeds budget_cap.
TesterParams select_params(int k, int d, double delta, double eps,
                           Profile profile,
                           std::uint64_t budget_cap = 1000000000ULL);

// Detailed estimator output: the statistic plus the raw sums needed for an
// empirical standard error.
struct EstimateResult {
    std::complex<double> value{0.0, 0.0};
    double sum_sq_re = 0.0;  // sum of squared per-term real parts
    double sum_sq_im = 0.0;
    std::uint64_t n_used = 0;

    double stderr_re() const;
};

// Monte Carlo estimate of the tester statistic for a Gaussian mixture:
// average over N fresh (X, xi) draws of
//   2^{d/2} k e^{|xi|^2/4} e^{-|X - mu*|^2/2} e^{i xi.(X - mu*)} 1{|xi| <= M},
// xi ~ N(0, sigma^2 I). Truncated xi draws contribute exactly zero and still
// consume budget. Accumulation is compensated summation on (Re, Im)
// separately; per-term magnitudes are computed in the log domain.
// Sampling is chunked with one RNG substream per chunk derived from `seed`,
// so results are bitwise reproducible.
EstimateResult estimate_T_detailed(const MixtureModel& model, const Vec& mu_star,
                                   const TesterParams& params, std::uint64_t seed);

std::complex<double> estimate_T(const MixtureModel& model, const Vec& mu_star,
                                const TesterParams& params, std::uint64_t seed);

// Same estimator over a pre-drawn sample set (xi drawn from rng); used when
// the caller owns the data rather than a generative model. k is the
// component count entering the estimator's prefactor.
EstimateResult estimate_T_samples(const Points& samples, int k, const Vec& mu_star,
                                  const TesterParams& params, RngStream& rng);

// Accept iff Re(T-hat) >= theta (ties accept). Internally shifts the model
// by -mu_star and evaluates at the origin, so test(model, mu*) is bitwise
// identical to test(shifted model, 0) at the same seed.
Verdict test(const MixtureModel& model, const Vec& mu_star,
             const TesterParams& params, std::uint64_t seed);

// Exact main term sum_j e^{-(sigma^2/2+1) |mu_j - mu*|^2 / 4}.
double analytic_main_term(const Points& means, const Vec& mu_star, double sigma);

// Truncation part of the estimator's bias bound:
// e^{-M^2/(5 sigma^2)} sum_j e^{-|mu_j - mu*|^2/4}.
double truncation_bound(const Points& means, const Vec& mu_star,
                        const TesterParams& params);

struct SBounds {
    double s1 = 0.0;
    double s2 = 0.0;
    double s1_bound = 0.0;
    double s2_bound = 0.0;
    bool hypothesis_ok = false;  // (sigma^2/2+1) delta^2 >= 100 min{ln k, d}
};

// Exact S1/S2 sums (means sorted by norm internally) and their claimed
// bounds.
SBounds s_bounds(const Points& means, double sigma, double delta, int d, int k);

// Verifies P(chi^2_d >= t) <= e^{-t/5} via the exact incomplete-gamma CDF.
bool chi_square_tail_check(int d, double t);

// Worst-case per-sample root-mean-square magnitude of the estimator's real
// part (mixture-independent); drives the practical-profile sample count.
double worst_case_rms(int k, int d, double sigma2, double M2);

}  // namespace specmix
