#include "specmix/tester.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "specmix/detail/kernel.hpp"
#include "specmix/errors.hpp"
#include "specmix/math_util.hpp"

namespace specmix {

namespace {
constexpr double kLn2 = 0.69314718055994530941723212145818;

// Practical-profile defaults, tuned on the Monte Carlo fixtures:
// c_sigma scales sigma^2/2+1, c_gamma divides into gamma, c_M scales the
// log-sum form of M^2 (floored at 5 d sigma^2), c_stderr sets the per-call
// accuracy target as a multiple of gamma.
constexpr double kPracticalCSigma = 4.2;
constexpr double kPracticalCGamma = 16.0;
constexpr double kPracticalCM = 0.5;
constexpr double kPracticalCStderr = 7.0;
// Paper-profile Hoeffding constant: two-sided bounds on Re and Im at
// failure probability 1/12 each, per-part accuracy gamma/sqrt(2).
const double kPaperCN = 4.0 * std::log(12.0);

int env_threads() {
    const char* v = std::getenv("SPECMIX_THREADS");
    if (!v) return 1;
    int n = std::atoi(v);
    return n >= 1 ? n : 1;
}
}  // namespace

Profile profile_from_name(const std::string& name) {
    if (name == "paper") return Profile::paper;
    if (name == "practical") return Profile::practical;
    throw PreconditionError("unknown profile: " + name);
}

std::string profile_name(Profile p) {
    return p == Profile::paper ? "paper" : "practical";
}

std::string TesterParams::to_json() const {
    nlohmann::json j;
    j["sigma"] = sigma;
    j["M"] = M;
    j["gamma"] = gamma;
    j["theta"] = theta;
    j["N"] = N;
    j["profile"] = profile_name(profile);
    j["constants"] = constants;
    return j.dump(2);
}

TesterParams TesterParams::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TesterParams p;
    p.sigma = j.at("sigma").get<double>();
    p.M = j.at("M").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.theta = j.at("theta").get<double>();
    p.N = j.at("N").get<std::uint64_t>();
    p.profile = profile_from_name(j.at("profile").get<std::string>());
    if (j.contains("constants"))
        p.constants = j.at("constants").get<std::map<std::string, double>>();
    return p;
}

std::string Verdict::to_json() const {
    nlohmann::json j;
    j["decision"] = accept ? "Accept" : "Reject";
    j["re_statistic"] = statistic.real();
    j["im_statistic"] = statistic.imag();
    j["theta"] = threshold;
    j["gamma"] = error_budget;
    j["n_used"] = n_used;
    return j.dump(2);
}

double worst_case_rms(int k, int d, double sigma2, double M2) {
    // Exact worst-case second moment of the estimator's real part:
    // 2^d k^2 3^{-d/2} E[e^{sigma^2 W / 2} 1{W <= M^2/sigma^2}], W ~ chi^2_d.
    const double upper = M2 / sigma2;
    const double half_d = 0.5 * d;
    const double log_norm = -half_d * kLn2 - std::lgamma(half_d);
    // Integrate over v = sqrt(w): the substitution turns the w^{d/2-1}
    // density factor into a smooth 2 v^{d-1}, so adaptive Simpson converges
    // at every d (the raw integrand is singular at 0 for d = 1).
    auto log_f = [&](double v) {
        const double w = v * v;
        return std::log(2.0) + (d - 1.0) * std::log(v) + 0.5 * sigma2 * w -
               0.5 * w + log_norm;
    };
    const double vmax = std::sqrt(upper);
    // Peak-scale in the log domain so large sigma^2 cannot overflow inside
    // the quadrature; an inf result then surfaces only in the final
    // recombination (and as BudgetExceeded in select_params).
    double log_peak = log_f(vmax);
    for (int i = 1; i < 64; ++i)
        log_peak = std::max(log_peak, log_f(vmax * i / 64.0));
    auto scaled = [&](double v) {
        if (v <= 0.0) return d == 1 ? std::exp(std::log(2.0) + log_norm - log_peak) : 0.0;
        return std::exp(log_f(v) - log_peak);
    };
    const double part = integrate(scaled, 0.0, vmax, 1e-13 * vmax);
    const double log_second = d * kLn2 + 2.0 * std::log(static_cast<double>(k)) -
                              half_d * std::log(3.0) + log_peak +
                              std::log(std::max(part, 1e-300));
    return std::exp(0.5 * log_second);
}

ParamFormulas select_params_formulas(int k, int d, double delta, double eps,
                                     Profile profile) {
    ParamFormulas f{};
    const double mind = (k >= 2) ? std::min(static_cast<double>(d), std::log(static_cast<double>(k)))
                                 : static_cast<double>(d);
    const double log_ratio = std::log(delta / eps);
    const double s2_hat =
        10.0 * std::min(static_cast<double>(k),
                        1.0 + std::pow(32.0 * d / (delta * delta), 0.5 * d + 1.0));
    f.s2_hat = s2_hat;
    if (profile == Profile::paper) {
        f.s2p = (512.0 / (delta * delta)) * (mind + log_ratio);
        f.sigma2 = 2.0 * (f.s2p - 1.0);
        const double u = f.s2p * eps * eps;
        f.gamma = u / 64.0;
        f.M2 = 5.0 * f.sigma2 * (d + std::log(s2_hat) + std::log(64.0 / u));
        f.theta = 0.5 * (std::exp(-u / 16.0) + std::exp(-u / 4.0));
        // Hoeffding count from the per-sample sup bound B = 2^{d/2} k e^{M^2/4}.
        const double log_B = 0.5 * d * kLn2 + std::log(static_cast<double>(k)) + 0.25 * f.M2;
        f.n_exact = std::ceil(kPaperCN * std::exp(2.0 * (log_B - std::log(f.gamma))));
    } else {
        f.s2p = std::max((kPracticalCSigma / (delta * delta)) * (mind + log_ratio),
                         1.0 + 1e-9);
        f.sigma2 = 2.0 * (f.s2p - 1.0);
        const double u = f.s2p * eps * eps;
        f.gamma = u / kPracticalCGamma;
        f.M2 = std::max(5.0 * d * f.sigma2,
                        kPracticalCM * f.sigma2 *
                            (d + std::log(s2_hat) +
                             std::log(std::max(kPracticalCGamma / u, 1.0))));
        f.theta = 0.5 * (std::exp(-u / 16.0) + std::exp(-u / 4.0));
        // Variance-based count: per-call standard error c_stderr * gamma.
        const double rms = worst_case_rms(k, d, f.sigma2, f.M2);
        f.n_exact = std::ceil(std::pow(rms / (kPracticalCStderr * f.gamma), 2.0));
    }
    return f;
}

TesterParams select_params(int k, int d, double delta, double eps,
                           Profile profile, std::uint64_t budget_cap) {
    if (k < 1 || d < 1 || !(delta > 0.0) || !(eps > 0.0))
        throw PreconditionError("select_params: bad arguments");
    if (profile == Profile::paper) {
        if (k < 2) throw PreconditionError("select_params: paper profile requires k >= 2");
        const double mind = std::min(static_cast<double>(d), std::log(static_cast<double>(k)));
        const double lim = std::min(delta / 100.0, delta / (32.0 * std::sqrt(mind)));
        if (!(eps < lim))
            throw PreconditionError("select_params: eps = " + std::to_string(eps) +
                                    " violates eps < min{delta/100, delta/(32 sqrt(min{d, ln k}))} = " +
                                    std::to_string(lim));
    } else {
        if (!(eps < delta / 4.0))
            throw PreconditionError("select_params: eps = " + std::to_string(eps) +
                                    " violates eps < delta/4 = " + std::to_string(delta / 4.0));
    }
    const ParamFormulas f = select_params_formulas(k, d, delta, eps, profile);
    if (!(f.n_exact <= static_cast<double>(budget_cap)))
        throw BudgetExceeded("select_params: required sample count " +
                             std::to_string(f.n_exact) + " exceeds budget cap " +
                             std::to_string(budget_cap));
    TesterParams p;
    p.sigma = std::sqrt(f.sigma2);
    p.M = std::sqrt(f.M2);
    p.gamma = f.gamma;
    p.theta = f.theta;
    p.N = static_cast<std::uint64_t>(f.n_exact);
    p.profile = profile;
    if (profile == Profile::paper) {
        p.constants = {{"c_sigma", 512.0}, {"c_M", 5.0}, {"c_gamma", 64.0},
                       {"c_N", kPaperCN}};
    } else {
        p.constants = {{"c_sigma", kPracticalCSigma}, {"c_M", kPracticalCM},
                       {"c_gamma", kPracticalCGamma}, {"c_stderr", kPracticalCStderr}};
    }
    return p;
}

double EstimateResult::stderr_re() const {
    if (n_used < 2) return 0.0;
    const double n = static_cast<double>(n_used);
    const double mean = value.real();
    const double var = std::max(sum_sq_re / n - mean * mean, 0.0);
    return std::sqrt(var / n);
}

namespace {
struct QuadKahan {
    KahanSum re, im, re2, im2;
    void add(const detail::ChunkSums& c) {
        re.add(c.re);
        im.add(c.im);
        re2.add(c.re2);
        im2.add(c.im2);
    }
};

void check_overflow(int k, int d, double M2) {
    // Per-term magnitude bound 2^{d/2} k e^{M^2/4} must stay finite.
    const double log_bound = 0.5 * d * kLn2 + std::log(static_cast<double>(k)) + 0.25 * M2;
    if (log_bound > 700.0)
        throw PreconditionError(
            "estimate_T: per-term bound e^{M^2/4} overflows double precision");
}
}  // namespace

EstimateResult estimate_T_detailed(const MixtureModel& model, const Vec& mu_star,
                                   const TesterParams& params, std::uint64_t seed) {
    model.validate();
    if (static_cast<int>(mu_star.size()) != model.d)
        throw PreconditionError("estimate_T: mu_star dimension mismatch");
    check_overflow(model.k, model.d, params.M * params.M);

    // Shift the means once; the kernel then evaluates at the origin. This is
    // what makes test(model, mu*) bitwise equal to test(shifted model, 0).
    std::vector<double> shifted(static_cast<std::size_t>(model.k) * model.d);
    for (int j = 0; j < model.k; ++j)
        for (int t = 0; t < model.d; ++t)
            shifted[static_cast<std::size_t>(j) * model.d + t] =
                model.means[j][t] - mu_star[t];

    const double pref = std::exp(0.5 * model.d * kLn2) * model.k;
    const std::uint64_t n = params.N;
    const std::uint64_t nchunks = (n + detail::kChunk - 1) / detail::kChunk;
    const int nthreads = std::min<std::uint64_t>(env_threads(), nchunks);

    auto run_range = [&](std::uint64_t c0, std::uint64_t c1, QuadKahan& acc) {
        detail::GaussianKernel kernel(shifted.data(), model.k, model.d,
                                      params.sigma, params.M * params.M, pref);
        for (std::uint64_t c = c0; c < c1; ++c) {
            const std::uint64_t lo = c * detail::kChunk;
            const std::size_t len =
                static_cast<std::size_t>(std::min<std::uint64_t>(detail::kChunk, n - lo));
            RngStream rng(seed, c);
            acc.add(kernel.process(rng, len));
        }
    };

    QuadKahan total;
    if (nthreads <= 1) {
        run_range(0, nchunks, total);
    } else {
        // Contiguous chunk ranges per worker; partials merged in worker
        // order, so the result is deterministic for a fixed worker count.
        std::vector<QuadKahan> parts(nthreads);
        std::vector<std::thread> workers;
        const std::uint64_t per = (nchunks + nthreads - 1) / nthreads;
        for (int w = 0; w < nthreads; ++w) {
            const std::uint64_t c0 = per * w;
            const std::uint64_t c1 = std::min<std::uint64_t>(c0 + per, nchunks);
            if (c0 >= c1) break;
            workers.emplace_back(run_range, c0, c1, std::ref(parts[w]));
        }
        for (auto& t : workers) t.join();
        for (const auto& p : parts) {
            total.re.add(p.re.sum);
            total.im.add(p.im.sum);
            total.re2.add(p.re2.sum);
            total.im2.add(p.im2.sum);
        }
    }

    EstimateResult r;
    r.n_used = n;
    const double inv_n = 1.0 / static_cast<double>(n);
    r.value = {total.re.sum * inv_n, total.im.sum * inv_n};
    r.sum_sq_re = total.re2.sum;
    r.sum_sq_im = total.im2.sum;
    return r;
}

std::complex<double> estimate_T(const MixtureModel& model, const Vec& mu_star,
                                const TesterParams& params, std::uint64_t seed) {
    return estimate_T_detailed(model, mu_star, params, seed).value;
}

EstimateResult estimate_T_samples(const Points& samples, int k, const Vec& mu_star,
                                  const TesterParams& params, RngStream& rng) {
    if (samples.size() < params.N)
        throw PreconditionError("estimate_T: fewer samples than the budget N");
    const int d = static_cast<int>(mu_star.size());
    check_overflow(k, d, params.M * params.M);
    const double M2 = params.M * params.M;
    const double log_pref = 0.5 * d * kLn2 + std::log(static_cast<double>(k));
    QuadKahan acc;
    for (std::uint64_t i = 0; i < params.N; ++i) {
        const Vec& x = samples[i];
        double q1 = 0.0, q2 = 0.0, dot = 0.0;
        for (int t = 0; t < d; ++t) {
            const double xi = params.sigma * rng.normal();
            const double y = x[t] - mu_star[t];
            q1 += xi * xi;
            q2 += y * y;
            dot += xi * y;
        }
        detail::ChunkSums c;
        if (q1 <= M2) {
            const double mag = std::exp(log_pref + 0.25 * q1 - 0.5 * q2);
            c.re = mag * std::cos(dot);
            c.im = mag * std::sin(dot);
            c.re2 = c.re * c.re;
            c.im2 = c.im * c.im;
        }
        acc.add(c);
    }
    EstimateResult r;
    r.n_used = params.N;
    const double inv_n = 1.0 / static_cast<double>(params.N);
    r.value = {acc.re.sum * inv_n, acc.im.sum * inv_n};
    r.sum_sq_re = acc.re2.sum;
    r.sum_sq_im = acc.im2.sum;
    return r;
}

Verdict test(const MixtureModel& model, const Vec& mu_star,
             const TesterParams& params, std::uint64_t seed) {
    const EstimateResult est = estimate_T_detailed(model, mu_star, params, seed);
    Verdict v;
    v.statistic = est.value;
    v.threshold = params.theta;
    v.error_budget = params.gamma;
    v.n_used = est.n_used;
    v.accept = est.value.real() >= params.theta;  // ties accept
    return v;
}

double analytic_main_term(const Points& means, const Vec& mu_star, double sigma) {
    const double coef = (sigma * sigma / 2.0 + 1.0) / 4.0;
    double sum = 0.0;
    for (const auto& m : means) {
        const double dist = l2_distance(m, mu_star);
        sum += std::exp(-coef * dist * dist);
    }
    return sum;
}

double truncation_bound(const Points& means, const Vec& mu_star,
                        const TesterParams& params) {
    double sum = 0.0;
    for (const auto& m : means) {
        const double dist = l2_distance(m, mu_star);
        sum += std::exp(-dist * dist / 4.0);
    }
    return std::exp(-(params.M * params.M) / (5.0 * params.sigma * params.sigma)) * sum;
}

SBounds s_bounds(const Points& means, double sigma, double delta, int d, int k) {
    if (static_cast<int>(means.size()) != k)
        throw PreconditionError("s_bounds: means size != k");
    Points sorted = means;
    std::sort(sorted.begin(), sorted.end(), [](const Vec& a, const Vec& b) {
        double na = 0.0, nb = 0.0;
        for (double v : a) na += v * v;
        for (double v : b) nb += v * v;
        return na < nb;
    });
    const double s2p = sigma * sigma / 2.0 + 1.0;
    SBounds out;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        double n2 = 0.0;
        for (double v : sorted[j]) n2 += v * v;
        out.s2 += std::exp(-n2 / 4.0);
        if (j >= 1) out.s1 += std::exp(-s2p * n2 / 4.0);
    }
    out.s1_bound = 2.0 * std::exp(-s2p * delta * delta / 64.0) *
                   std::min(static_cast<double>(k), std::pow(2.0, d));
    out.s2_bound = 10.0 * std::min(static_cast<double>(k),
                                   1.0 + std::pow(32.0 * d / (delta * delta), 0.5 * d + 1.0));
    out.hypothesis_ok =
        s2p * delta * delta >=
        100.0 * std::min(std::log(static_cast<double>(k)), static_cast<double>(d));
    return out;
}

bool chi_square_tail_check(int d, double t) {
    if (t < 5.0 * d)
        throw PreconditionError("chi_square_tail_check requires t >= 5d");
    return chi_square_tail(d, t) <= std::exp(-t / 5.0);
}

}  // namespace specmix
