#pragma once
// Internal chunked Monte Carlo kernels. Compiled in their own translation
// units with value-unsafe fast math; everything here returns plain per-chunk
// sums, and the callers (compiled value-safe) do the compensated
// accumulation across chunks.
#include <cstddef>
#include <cstdint>
#include <vector>

#include "specmix/rng.hpp"

namespace specmix::detail {

inline constexpr std::size_t kChunk = 2048;

struct ChunkSums {
    double re = 0.0;
    double im = 0.0;
    double re2 = 0.0;
    double im2 = 0.0;
};

// Estimator terms for a Gaussian mixture whose means are ALREADY shifted by
// -mu*: per sample, pref * e^{|xi|^2/4 - |Y|^2/2} * (cos, sin)(xi.Y) with
// Y = shifted_mean[j] + standard normal noise, xi ~ N(0, sigma^2 I_d),
// zeroed when |xi|^2 > M2.
class GaussianKernel {
public:
    GaussianKernel(const double* shifted_means, int k, int d, double sigma,
                   double M2, double pref);
    // Processes n <= kChunk samples drawn from rng; returns plain sums.
    ChunkSums process(RngStream& rng, std::size_t n);

private:
    ChunkSums process_1d(RngStream& rng, std::size_t n);
    const double* means_;
    int k_, d_;
    double sigma_, M2_, pref_;
    std::vector<double> gx_, xi_, scratch_, q1_, q2_, dot_, mag_, c_, s_;
    std::vector<std::uint32_t> comp_;
};

// General-family estimator terms at d = 1, locations ALREADY shifted by
// -mu*. The target statistic is the truncated-Gaussian frequency average of
// k e^{i xi y} / CF(xi); the frequency is drawn by importance sampling from a
// piecewise-uniform proposal on [-M, M] with bin mass proportional to
// phi_sigma(xi)/|CF(xi)|, and each term carries the exact density ratio
// k phi_sigma(xi) / (q(xi) CF(xi)), so the expectation is unchanged while the
// per-term magnitude stays O(k * integral of phi/|CF|) instead of
// O(k / min |CF|). `family_tag` selects the sampling transform and CF:
// 0=gaussian, 1=cauchy, 2=logistic, 3=laplace, 4=gumbel.
class GeneralKernel {
public:
    GeneralKernel(const double* shifted_locs, int k, int family_tag,
                  double sigma, double M2);
    ChunkSums process(RngStream& rng, std::size_t n);

private:
    const double* locs_;
    int k_, family_;
    double sigma_, M2_;
    double bin_width_ = 0.0;
    std::vector<double> bin_base_;      // k / q(xi) for each proposal bin
    std::vector<double> cdf_;           // cumulative bin probabilities
    std::vector<std::uint32_t> guide_;  // uniform -> starting bin index
    std::vector<double> y_, xi_, scratch_, u_, wre_, wim_, c_, s_;
    std::vector<std::uint32_t> comp_;
};

}  // namespace specmix::detail
