#pragma once
// Seeded, splittable random streams. xoshiro256++ seeded through splitmix64:
// identical (seed, stream_id) pairs reproduce identical sequences, distinct
// stream_ids give statistically independent streams. Chosen over
// std::mt19937_64 because the estimator kernels draw ~1e9 variates per run.
#include <cmath>
#include <cstdint>
#include <cstddef>

namespace specmix {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t sm = seed ^ (stream_id * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
        for (auto& word : s_) word = splitmix64(sm);
        has_cached_normal_ = false;
        cached_normal_ = 0.0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on the open interval (0,1): never 0 or 1, so tan/ln transforms
    // stay finite.
    double u01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the Box-Muller pair transform.
    double normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        double u = u01(), v = u01();
        double r = std::sqrt(-2.0 * std::log(u));
        double a = 6.283185307179586476925286766559 * v;
        cached_normal_ = r * std::sin(a);
        has_cached_normal_ = true;
        return r * std::cos(a);
    }

    // Array fills used by the vectorized kernels: plain loops over
    // preallocated buffers so the compiler can emit SIMD libm calls.
    void fill_u01(double* out, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Fills out[0..n) with standard normals; n must be even. scratch must
    // hold n doubles. Box-Muller split into separate log/sqrt and sin/cos
    // passes (each pass is a pure array loop).
    void fill_normal(double* out, double* scratch, std::size_t n) {
        const std::size_t h = n / 2;
        fill_u01(out, n);
        // Global-namespace math calls: these are the declarations carrying
        // the SIMD variants, so the passes vectorize under fast-math builds.
        for (std::size_t i = 0; i < h; ++i)
            scratch[i] = ::sqrt(-2.0 * ::log(out[i]));
        for (std::size_t i = 0; i < h; ++i)
            scratch[h + i] = 6.283185307179586476925286766559 * out[h + i];
        for (std::size_t i = 0; i < h; ++i)
            out[i] = scratch[i] * ::cos(scratch[h + i]);
        for (std::size_t i = 0; i < h; ++i)
            out[h + i] = scratch[i] * ::sin(scratch[h + i]);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
    bool has_cached_normal_;
    double cached_normal_;
};

// Kahan (compensated) accumulator: exact enough for 1e9-term sums whose
// magnitudes span e^{M^2/4}.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

}  // namespace specmix
