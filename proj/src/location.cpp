#include "specmix/location.hpp"

#include <algorithm>
#include <cmath>

#include "specmix/detail/kernel.hpp"
#include "specmix/errors.hpp"
#include "specmix/math_util.hpp"
#include "specmix/sampling.hpp"

namespace specmix {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kPracticalCSigmaGen = 2.4;
constexpr double kPracticalCMGen = 0.5;
constexpr double kPracticalCStderrGen = 7.0;
const double kPaperCN = 4.0 * std::log(12.0);

int family_tag(FamilyId f) {
    switch (f) {
        case FamilyId::gaussian: return 0;
        case FamilyId::cauchy: return 1;
        case FamilyId::logistic: return 2;
        case FamilyId::laplace: return 3;
        case FamilyId::gumbel: return 4;
        case FamilyId::exponential: return 4;  // via the Gumbel reduction
    }
    throw PreconditionError("unknown family");
}

// Exponential mixtures are learned through x -> -ln x, which turns Exp(lambda)
// into the Gumbel location family at ln lambda — exactly the stored parameter.
MixtureModel as_location_model(const MixtureModel& model) {
    if (model.family != FamilyId::exponential) return model;
    MixtureModel g = model;
    g.family = FamilyId::gumbel;
    return g;
}
}  // namespace

std::complex<double> cf_evaluate(FamilyId family, double xi) {
    switch (family) {
        case FamilyId::gaussian:
            return {std::exp(-0.5 * xi * xi), 0.0};
        case FamilyId::cauchy:
            return {std::exp(-std::fabs(xi)), 0.0};
        case FamilyId::logistic: {
            const double px = kPi * xi;
            return {std::fabs(px) < 1e-8 ? 1.0 : px / std::sinh(px), 0.0};
        }
        case FamilyId::laplace:
            return {1.0 / (1.0 + xi * xi), 0.0};
        case FamilyId::gumbel:
        case FamilyId::exponential:  // reduced form
            return gamma_complex(std::complex<double>(1.0, -xi));
    }
    throw PreconditionError("unknown family");
}

double cf_min_modulus(FamilyId family, double M) {
    if (!(M > 0.0)) throw PreconditionError("cf_min_modulus requires M > 0");
    // Every registry CF modulus decreases in |xi|, so the minimum is at M.
    double v;
    switch (family) {
        case FamilyId::gaussian: v = std::exp(-0.5 * M * M); break;
        case FamilyId::cauchy: v = std::exp(-M); break;
        case FamilyId::logistic: v = kPi * M / std::sinh(kPi * M); break;
        case FamilyId::laplace: v = 1.0 / (1.0 + M * M); break;
        case FamilyId::gumbel:
        case FamilyId::exponential:
            // |Gamma(1 - iM)| = sqrt(pi M / sinh(pi M)).
            v = std::sqrt(kPi * M / std::sinh(kPi * M));
            break;
        default: throw PreconditionError("unknown family");
    }
    if (!(v > 1e-300))
        throw PreconditionError("cf_min_modulus underflows double precision at M = " +
                                std::to_string(M));
    return v;
}

double general_rms_bound(FamilyId family, int k, double sigma2, double M2) {
    const double M = std::sqrt(M2);
    const double inv_norm = 1.0 / std::sqrt(2.0 * kPi * sigma2);
    auto integrand = [&](double x) {
        const double cf = std::abs(cf_evaluate(family, x));
        return inv_norm * std::exp(-0.5 * x * x / sigma2) / cf;
    };
    // Even integrand; the mass near +-M dominates for fast-decaying CFs. With
    // the frequency drawn from a proposal proportional to this integrand, the
    // per-sample magnitude is k times its integral.
    const double scale = integrand(M) + integrand(0.0);
    const double integral = 2.0 * integrate(integrand, 0.0, M, 1e-12 * scale * M);
    return static_cast<double>(k) * integral;
}

GeneralParamFormulas general_select_params_formulas(int k, int d, double delta,
                                                    double eps, FamilyId family,
                                                    Profile profile) {
    GeneralParamFormulas f{};
    const double mind = (k >= 2) ? std::min(static_cast<double>(d), std::log(static_cast<double>(k)))
                                 : static_cast<double>(d);
    const double log_ratio = std::log(delta / eps);
    if (profile == Profile::paper) {
        f.sigma2 = (512.0 / (delta * delta)) * (mind + log_ratio);
        f.M2 = 10.0 * f.sigma2 * (d + std::log(static_cast<double>(k)) + log_ratio);
    } else {
        f.sigma2 = (kPracticalCSigmaGen / (delta * delta)) * (mind + log_ratio);
        f.M2 = std::max(5.0 * d * f.sigma2,
                        kPracticalCMGen * f.sigma2 *
                            (d + std::log(static_cast<double>(k)) + log_ratio));
    }
    const double u = f.sigma2 * eps * eps;
    f.gamma = u / 32.0;
    f.theta = 0.5 * (std::exp(-u / 8.0) + std::exp(-u / 2.0));
    f.delta_M = cf_min_modulus(family, std::sqrt(f.M2));
    if (profile == Profile::paper) {
        const double per_term = static_cast<double>(k) / f.delta_M;
        f.n_exact = std::ceil(kPaperCN * std::pow(per_term / f.gamma, 2.0));
    } else {
        const double rms = general_rms_bound(family, k, f.sigma2, f.M2);
        f.n_exact = std::ceil(std::pow(rms / (kPracticalCStderrGen * f.gamma), 2.0));
    }
    return f;
}

GeneralTesterParams general_select_params(int k, int d, double delta, double eps,
                                          FamilyId family, Profile profile,
                                          std::uint64_t budget_cap) {
    if (k < 1 || d != 1 || !(delta > 0.0) || !(eps > 0.0))
        throw PreconditionError("general_select_params: requires d = 1, k >= 1");
    if (profile == Profile::paper) {
        if (k < 2)
            throw PreconditionError("general_select_params: paper profile requires k >= 2");
        const double mind = std::min(static_cast<double>(d), std::log(static_cast<double>(k)));
        const double lim = std::min(delta / 32.0, delta / (32.0 * std::sqrt(mind)));
        if (!(eps < lim))
            throw PreconditionError("general_select_params: eps = " + std::to_string(eps) +
                                    " violates eps < min{delta/32, delta/(32 sqrt(min{d, ln k}))} = " +
                                    std::to_string(lim));
    } else if (!(eps < delta / 4.0)) {
        throw PreconditionError("general_select_params: eps violates eps < delta/4");
    }
    const GeneralParamFormulas f =
        general_select_params_formulas(k, d, delta, eps, family, profile);
    if (!(f.n_exact <= static_cast<double>(budget_cap)))
        throw BudgetExceeded("general_select_params: required sample count " +
                             std::to_string(f.n_exact) + " exceeds budget cap");
    GeneralTesterParams p;
    p.sigma = std::sqrt(f.sigma2);
    p.M = std::sqrt(f.M2);
    p.gamma = f.gamma;
    p.theta = f.theta;
    p.delta_M = f.delta_M;
    p.N = static_cast<std::uint64_t>(f.n_exact);
    p.profile = profile;
    return p;
}

EstimateResult general_estimate_T(const MixtureModel& model, const Vec& mu_star,
                                  const GeneralTesterParams& params,
                                  std::uint64_t seed) {
    const MixtureModel loc = as_location_model(model);
    loc.validate();
    if (mu_star.size() != 1)
        throw PreconditionError("general_estimate_T: d = 1 only");
    std::vector<double> shifted(loc.k);
    for (int j = 0; j < loc.k; ++j) shifted[j] = loc.means[j][0] - mu_star[0];

    detail::GeneralKernel kernel(shifted.data(), loc.k, family_tag(loc.family),
                                 params.sigma, params.M * params.M);
    KahanSum re, im, re2, im2;
    const std::uint64_t n = params.N;
    const std::uint64_t nchunks = (n + detail::kChunk - 1) / detail::kChunk;
    for (std::uint64_t c = 0; c < nchunks; ++c) {
        const std::uint64_t lo = c * detail::kChunk;
        const std::size_t len =
            static_cast<std::size_t>(std::min<std::uint64_t>(detail::kChunk, n - lo));
        RngStream rng(seed, c);
        const detail::ChunkSums sums = kernel.process(rng, len);
        re.add(sums.re);
        im.add(sums.im);
        re2.add(sums.re2);
        im2.add(sums.im2);
    }
    EstimateResult r;
    r.n_used = n;
    const double inv_n = 1.0 / static_cast<double>(n);
    r.value = {re.sum * inv_n, im.sum * inv_n};
    r.sum_sq_re = re2.sum;
    r.sum_sq_im = im2.sum;
    return r;
}

Verdict general_test(const MixtureModel& model, const Vec& mu_star,
                     const GeneralTesterParams& params, std::uint64_t seed) {
    const EstimateResult est = general_estimate_T(model, mu_star, params, seed);
    Verdict v;
    v.statistic = est.value;
    v.threshold = params.theta;
    v.error_budget = params.gamma;
    v.n_used = est.n_used;
    v.accept = est.value.real() >= params.theta;
    return v;
}

GeneralCandidateBudget general_candidate_budget(FamilyId family, int k, double eps) {
    if (k < 1 || !(eps > 0.0))
        throw PreconditionError("general_candidate_budget: bad arguments");
    const FamilyId base = family == FamilyId::exponential ? FamilyId::gumbel : family;
    const double hit = base_cdf(base, eps / 2.0) - base_cdf(base, -eps / 2.0);
    if (!(hit > 0.0)) throw PreconditionError("general_candidate_budget: zero hit probability");
    GeneralCandidateBudget out;
    out.delta_hit = hit;
    const double logk = std::max(std::log(static_cast<double>(k)), 1.0);
    out.N = static_cast<std::uint64_t>(std::ceil(2.0 * k * logk / hit));
    return out;
}

LearnResult general_learn(const MixtureModel& model, const LearnerConfig& config,
                          std::uint64_t seed) {
    const MixtureModel loc = as_location_model(model);
    loc.validate();
    GeneralTesterParams params =
        general_select_params(config.k, 1, config.delta, config.eps, loc.family,
                              config.profile, config.sample_budget_cap);
    GeneralTesterParams per_call = params;
    const double scale = config.effective_call_budget_scale();
    per_call.N = std::min<std::uint64_t>(
        params.N,
        std::max<std::uint64_t>(
            static_cast<std::uint64_t>(std::ceil(scale * static_cast<double>(params.N))),
            config.call_budget_floor));

    const GeneralCandidateBudget base = general_candidate_budget(loc.family, config.k, config.eps);
    const double n_exact =
        std::ceil(config.effective_candidate_multiplier() * static_cast<double>(base.N));
    if (!(n_exact <= static_cast<double>(config.candidate_cap)))
        throw BudgetExceeded("general_learn: candidate count exceeds cap");
    const auto n_cand = static_cast<std::uint64_t>(n_exact);

    std::uint64_t R = static_cast<std::uint64_t>(std::ceil(
        config.effective_vote_multiplier() * std::log(static_cast<double>(n_cand))));
    if (R < 1) R = 1;
    if (R % 2 == 0) ++R;

    RngStream cand_rng(seed, 0xc0ffee);
    Points candidates = sample(loc, n_cand, cand_rng);
    // Heavy-tailed families throw far-flung candidates; cap the reach so the
    // clustering stage is not flooded by isolated rejects. (The tester would
    // reject them anyway; this only saves calls.)
    double reach = 0.0;
    for (const auto& m : loc.means) reach = std::max(reach, std::fabs(m[0]));
    reach += 10.0 * config.delta;
    Points kept;
    for (auto& c : candidates)
        if (std::fabs(c[0]) <= reach) kept.push_back(std::move(c));
    if (kept.empty()) kept.push_back({0.0});

    auto call = [&](const Vec& mu_star, std::uint64_t call_seed) {
        return general_test(loc, mu_star, per_call, call_seed).accept;
    };
    LearnResult res = learn_with_tester(kept, config.k, config.eps, R, call, seed);
    res.candidates_drawn = n_cand;
    return res;
}

std::vector<double> exponential_reduction(const std::vector<double>& samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (double x : samples) {
        if (!(x > 0.0))
            throw PreconditionError("exponential_reduction: nonpositive sample");
        out.push_back(-std::log(x));
    }
    return out;
}

std::vector<double> mlr_reduction(const std::vector<std::pair<double, double>>& pairs,
                                  RngStream& rng) {
    std::vector<double> out;
    out.reserve(pairs.size() / 2);
    for (const auto& [x, y] : pairs) {
        if (std::fabs(x) < 1.0) continue;
        const double var = 1.0 - 1.0 / (x * x);
        out.push_back(y / x + std::sqrt(var) * rng.normal());
    }
    return out;
}

LearnResult mlr_learn(
    const std::function<std::vector<std::pair<double, double>>(std::uint64_t, std::size_t)>&
        pair_source,
    const LearnerConfig& config, std::uint64_t seed) {
    const LearnPlan plan = plan_learn(config);

    // Reduced samples for one consumer: request raw pairs with headroom over
    // the ~0.3173 retention rate, top up if the draw runs short.
    auto reduced_batch = [&](std::uint64_t batch_seed, std::size_t want) {
        RngStream noise(batch_seed, 0x6e6f6973);
        std::vector<double> out;
        std::uint64_t sub = 0;
        while (out.size() < want) {
            const std::size_t need = want - out.size();
            const auto raw = pair_source(derive_seed(batch_seed, 0x70617972, sub++),
                                         static_cast<std::size_t>(need / 0.30 + 64));
            const auto red = mlr_reduction(raw, noise);
            out.insert(out.end(), red.begin(), red.end());
        }
        out.resize(want);
        return out;
    };

    const auto cand_values = reduced_batch(derive_seed(seed, 0xca, 0), plan.candidates);
    Points candidates;
    candidates.reserve(cand_values.size());
    for (double v : cand_values) candidates.push_back({v});

    auto call = [&](const Vec& mu_star, std::uint64_t call_seed) {
        const auto values = reduced_batch(call_seed, plan.per_call.N);
        Points samples;
        samples.reserve(values.size());
        for (double v : values) samples.push_back({v});
        RngStream xi_rng(call_seed, 0x78690000);
        const EstimateResult est =
            estimate_T_samples(samples, config.k, mu_star, plan.per_call, xi_rng);
        return est.value.real() >= plan.per_call.theta;
    };
    return learn_with_tester(candidates, config.k, config.eps,
                             plan.votes_per_candidate, call, seed);
}

std::vector<FamilyInfo> family_registry() {
    return {
        {FamilyId::gaussian, "(2 pi)^{-d/2} e^{-|x-mu|^2/2}", "e^{-|xi|^2/2}", "none"},
        {FamilyId::cauchy, "1/(pi (1+(x-mu)^2))", "e^{-|xi|}", "none"},
        {FamilyId::logistic, "e^{-(x-mu)}/(1+e^{-(x-mu)})^2", "pi xi / sinh(pi xi)", "none"},
        {FamilyId::laplace, "(1/2) e^{-|x-mu|}", "1/(1+xi^2)", "none"},
        {FamilyId::gumbel, "e^{-(x-mu)} e^{-e^{-(x-mu)}}", "Gamma(1 - i xi)", "none"},
        {FamilyId::exponential, "lambda e^{-lambda x} (x > 0)",
         "via -ln x -> Gumbel(ln lambda)", "exponential_reduction"},
    };
}

}  // namespace specmix
