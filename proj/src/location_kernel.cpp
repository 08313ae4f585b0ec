// Chunked general-family estimator kernel (d = 1), compiled with -ffast-math.
// Straight array passes; the value-safe caller does the compensated
// accumulation.
#include "specmix/detail/kernel.hpp"

#include <cmath>
#include <complex>

#include "specmix/math_util.hpp"

namespace specmix::detail {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr std::size_t kBins = 8192;
constexpr std::size_t kGuide = 65536;

double cf_modulus(int family, double xi) {
    switch (family) {
        case 0: return std::exp(-0.5 * xi * xi);
        case 1: return std::exp(-std::fabs(xi));
        case 2: {
            const double px = kPi * xi;
            return std::fabs(px) < 1e-8 ? 1.0 : px / std::sinh(px);
        }
        case 3: return 1.0 / (1.0 + xi * xi);
        default: {  // gumbel
            const double px = kPi * xi;
            return std::fabs(px) < 1e-8
                       ? 1.0
                       : std::sqrt(px / std::sinh(px));
        }
    }
}
}  // namespace

GeneralKernel::GeneralKernel(const double* shifted_locs, int k, int family_tag,
                             double sigma, double M2)
    : locs_(shifted_locs), k_(k), family_(family_tag), sigma_(sigma), M2_(M2) {
    y_.resize(kChunk);
    xi_.resize(kChunk);
    scratch_.resize(kChunk);
    u_.resize(kChunk);
    wre_.resize(kChunk);
    wim_.resize(kChunk);
    c_.resize(kChunk);
    s_.resize(kChunk);
    comp_.resize(kChunk);

    // Proposal over |xi| in [0, M]: bin mass ~ phi_sigma(mid)/|CF(mid)|. Any
    // positive bin mass keeps the estimator unbiased (the density ratio below
    // is exact); this shape just minimizes the weight spread.
    const double M = std::sqrt(M2);
    bin_width_ = M / static_cast<double>(kBins);
    std::vector<double> mass(kBins);
    double total = 0.0;
    for (std::size_t b = 0; b < kBins; ++b) {
        const double mid = (static_cast<double>(b) + 0.5) * bin_width_;
        mass[b] = std::exp(-0.5 * mid * mid / (sigma * sigma)) /
                  cf_modulus(family_, mid);
        total += mass[b];
    }
    cdf_.resize(kBins);
    bin_base_.resize(kBins);
    double run = 0.0;
    for (std::size_t b = 0; b < kBins; ++b) {
        const double p = mass[b] / total;
        run += p;
        cdf_[b] = run;
        // Sign is drawn separately, so the density at xi inside bin b is
        // p / (2 bin_width); bin_base = k / q.
        bin_base_[b] = static_cast<double>(k_) * 2.0 * bin_width_ / p;
    }
    cdf_[kBins - 1] = 1.0;
    guide_.resize(kGuide);
    std::size_t b = 0;
    for (std::size_t g = 0; g < kGuide; ++g) {
        const double u = static_cast<double>(g) / static_cast<double>(kGuide);
        while (b + 1 < kBins && cdf_[b] < u) ++b;
        guide_[g] = static_cast<std::uint32_t>(b);
    }
}

ChunkSums GeneralKernel::process(RngStream& rng, std::size_t n) {
    // Component picks and frequency signs from one integer draw each.
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t r = rng.next_u64();
        comp_[i] = static_cast<std::uint32_t>(r % static_cast<std::uint64_t>(k_));
        s_[i] = (r & (1ULL << 32)) ? 1.0 : -1.0;
    }

    // Frequency draw: bin by inverse CDF with a guide table, uniform offset
    // inside the bin; u_ keeps the exact k/q factor of the drawn bin.
    rng.fill_u01(u_.data(), n);
    rng.fill_u01(scratch_.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = u_[i];
        std::size_t b = guide_[static_cast<std::size_t>(u * static_cast<double>(kGuide))];
        while (cdf_[b] < u) ++b;
        xi_[i] = s_[i] * (static_cast<double>(b) + scratch_[i]) * bin_width_;
        u_[i] = bin_base_[b];
    }

    // Gaussian frequency density (the target law the weights restore).
    const double inv_norm = 1.0 / std::sqrt(2.0 * kPi * sigma_ * sigma_);
    for (std::size_t i = 0; i < n; ++i)
        c_[i] = ::exp(-0.5 * xi_[i] * xi_[i] / (sigma_ * sigma_));
    for (std::size_t i = 0; i < n; ++i) u_[i] *= inv_norm * c_[i];

    // Divide by CF(xi): real for the symmetric families, complex for Gumbel.
    switch (family_) {
        case 0:
            for (std::size_t i = 0; i < n; ++i)
                wre_[i] = u_[i] * ::exp(0.5 * xi_[i] * xi_[i]);
            for (std::size_t i = 0; i < n; ++i) wim_[i] = 0.0;
            break;
        case 1:
            for (std::size_t i = 0; i < n; ++i)
                wre_[i] = u_[i] * ::exp(::fabs(xi_[i]));
            for (std::size_t i = 0; i < n; ++i) wim_[i] = 0.0;
            break;
        case 2:
            for (std::size_t i = 0; i < n; ++i) {
                const double px = kPi * xi_[i];
                wre_[i] = u_[i] * (::fabs(px) < 1e-8 ? 1.0 : ::sinh(px) / px);
            }
            for (std::size_t i = 0; i < n; ++i) wim_[i] = 0.0;
            break;
        case 3:
            for (std::size_t i = 0; i < n; ++i)
                wre_[i] = u_[i] * (1.0 + xi_[i] * xi_[i]);
            for (std::size_t i = 0; i < n; ++i) wim_[i] = 0.0;
            break;
        case 4:
            for (std::size_t i = 0; i < n; ++i) {
                const std::complex<double> w =
                    u_[i] / gamma_complex(std::complex<double>(1.0, -xi_[i]));
                wre_[i] = w.real();
                wim_[i] = w.imag();
            }
            break;
    }

    // Base draws into y_ via the family's inverse-CDF transform.
    switch (family_) {
        case 0:  // gaussian
            rng.fill_normal(y_.data(), scratch_.data(), n + (n & 1));
            break;
        case 1:  // cauchy
            rng.fill_u01(u_.data(), n);
            for (std::size_t i = 0; i < n; ++i) y_[i] = ::tan(kPi * (u_[i] - 0.5));
            break;
        case 2:  // logistic
            rng.fill_u01(u_.data(), n);
            for (std::size_t i = 0; i < n; ++i) y_[i] = ::log(u_[i] / (1.0 - u_[i]));
            break;
        case 3:  // laplace
            rng.fill_u01(u_.data(), n);
            for (std::size_t i = 0; i < n; ++i)
                y_[i] = u_[i] < 0.5 ? ::log(2.0 * u_[i]) : -::log(2.0 - 2.0 * u_[i]);
            break;
        case 4:  // gumbel
            rng.fill_u01(u_.data(), n);
            for (std::size_t i = 0; i < n; ++i) y_[i] = -::log(-::log(u_[i]));
            break;
    }
    for (std::size_t i = 0; i < n; ++i) y_[i] += locs_[comp_[i]];

    for (std::size_t i = 0; i < n; ++i) c_[i] = ::cos(xi_[i] * y_[i]);
    for (std::size_t i = 0; i < n; ++i) s_[i] = ::sin(xi_[i] * y_[i]);

    ChunkSums out;
    for (std::size_t i = 0; i < n; ++i) {
        const double tr = wre_[i] * c_[i] - wim_[i] * s_[i];
        const double ti = wre_[i] * s_[i] + wim_[i] * c_[i];
        out.re += tr;
        out.im += ti;
        out.re2 += tr * tr;
        out.im2 += ti * ti;
    }
    return out;
}

}  // namespace specmix::detail
