// Chunked Gaussian-mixture estimator kernel. Compiled with -ffast-math:
// every loop below is a straight array pass so the compiler can emit the
// vectorized exp/log/sin/cos routines. No compensated arithmetic lives here.
#include "specmix/detail/kernel.hpp"

#include <cmath>

namespace specmix::detail {

GaussianKernel::GaussianKernel(const double* shifted_means, int k, int d,
                               double sigma, double M2, double pref)
    : means_(shifted_means), k_(k), d_(d), sigma_(sigma), M2_(M2), pref_(pref) {
    gx_.resize(kChunk * d);
    xi_.resize(kChunk * d);
    scratch_.resize(kChunk * d);
    q1_.resize(kChunk);
    q2_.resize(kChunk);
    dot_.resize(kChunk);
    mag_.resize(kChunk);
    c_.resize(kChunk);
    s_.resize(kChunk);
    comp_.resize(kChunk);
}

ChunkSums GaussianKernel::process(RngStream& rng, std::size_t n) {
    if (d_ == 1) return process_1d(rng, n);
    const std::size_t nd = n * d_;
    // Component picks, then the two normal blocks (sample noise, frequency).
    for (std::size_t i = 0; i < n; ++i)
        comp_[i] = static_cast<std::uint32_t>(rng.next_u64() % static_cast<std::uint64_t>(k_));
    rng.fill_normal(gx_.data(), scratch_.data(), nd + (nd & 1));
    rng.fill_normal(xi_.data(), scratch_.data(), nd + (nd & 1));

    // Shift noise by the (already mu*-shifted) component mean: gx becomes Y.
    for (std::size_t i = 0; i < n; ++i) {
        const double* m = means_ + comp_[i] * d_;
        for (int t = 0; t < d_; ++t) gx_[i * d_ + t] += m[t];
    }
    // Scale frequencies to N(0, sigma^2).
    for (std::size_t i = 0; i < nd; ++i) xi_[i] *= sigma_;

    // Quadratics: |xi|^2, |Y|^2, xi.Y.
    for (std::size_t i = 0; i < n; ++i) {
        double a = 0.0, b = 0.0, dd = 0.0;
        for (int t = 0; t < d_; ++t) {
            const double xv = xi_[i * d_ + t];
            const double yv = gx_[i * d_ + t];
            a += xv * xv;
            b += yv * yv;
            dd += xv * yv;
        }
        q1_[i] = a;
        q2_[i] = b;
        dot_[i] = dd;
    }
    // Magnitude, phase, truncation mask.
    for (std::size_t i = 0; i < n; ++i)
        mag_[i] = ::exp(0.25 * q1_[i] - 0.5 * q2_[i]);
    for (std::size_t i = 0; i < n; ++i) c_[i] = ::cos(dot_[i]);
    for (std::size_t i = 0; i < n; ++i) s_[i] = ::sin(dot_[i]);
    for (std::size_t i = 0; i < n; ++i)
        mag_[i] = (q1_[i] <= M2_) ? pref_ * mag_[i] : 0.0;

    ChunkSums out;
    for (std::size_t i = 0; i < n; ++i) {
        const double tr = mag_[i] * c_[i];
        const double ti = mag_[i] * s_[i];
        out.re += tr;
        out.im += ti;
        out.re2 += tr * tr;
        out.im2 += ti * ti;
    }
    return out;
}

// Fused d = 1 path: one Box-Muller pair per sample supplies both the sample
// noise (r cos) and the frequency (r sin) -- the pair is independent by
// construction -- cutting the array passes roughly in half.
ChunkSums GaussianKernel::process_1d(RngStream& rng, std::size_t n) {
    double* u1 = gx_.data();    // uniform for the radius
    double* a = xi_.data();     // uniform angle
    double* r = scratch_.data();
    double* gc = q1_.data();
    double* gs = q2_.data();
    double* e1 = dot_.data();
    double* ph = mag_.data();
    double* re = c_.data();
    double* im = s_.data();
    for (std::size_t i = 0; i < n; ++i) {
        u1[i] = rng.u01();
        a[i] = 6.283185307179586476925286766559 * rng.u01();
    }
    for (std::size_t i = 0; i < n; ++i) r[i] = ::log(u1[i]);
    for (std::size_t i = 0; i < n; ++i) r[i] = ::sqrt(-2.0 * r[i]);
    for (std::size_t i = 0; i < n; ++i) gc[i] = ::cos(a[i]);
    for (std::size_t i = 0; i < n; ++i) gs[i] = ::sin(a[i]);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() %
                                                       static_cast<std::uint64_t>(k_));
        const double y = means_[j] + r[i] * gc[i];  // X - mu*
        const double xi = sigma_ * r[i] * gs[i];
        const bool keep = xi * xi <= M2_;
        // exp(-2000) underflows to exactly zero, implementing the truncation.
        e1[i] = keep ? (0.25 * xi * xi - 0.5 * y * y) : -2000.0;
        ph[i] = xi * y;
    }
    for (std::size_t i = 0; i < n; ++i) e1[i] = pref_ * ::exp(e1[i]);
    for (std::size_t i = 0; i < n; ++i) re[i] = e1[i] * ::cos(ph[i]);
    for (std::size_t i = 0; i < n; ++i) im[i] = e1[i] * ::sin(ph[i]);
    ChunkSums out;
    for (std::size_t i = 0; i < n; ++i) {
        out.re += re[i];
        out.im += im[i];
        out.re2 += re[i] * re[i];
        out.im2 += im[i] * im[i];
    }
    return out;
}

}  // namespace specmix::detail
