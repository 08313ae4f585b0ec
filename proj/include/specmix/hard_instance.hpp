#pragma once
// Indistinguishable-pair construction at d = 1: two delta-separated point
// sets whose first t moments agree, with certified and numerically integrated
// total-variation distance between the induced unit-variance mixtures.
#include <cstdint>
#include <string>
#include <vector>

namespace specmix {

struct HardInstancePair {
    std::vector<double> mu_P;
    std::vector<double> mu_Q;
    int t = 0;               // moment-matching order
    double delta = 0.0;      // separation
    double R = 0.0;          // base radius
    std::vector<double> moment_residuals;  // |m_{t'}(P) - m_{t'}(Q)|, t' = 1..t
    double param_distance = 0.0;           // bottleneck distance P vs Q

    std::string to_json() const;
};

struct LowerBoundParams {
    double C = 0.0;  // hardness exponent
    int k = 0;
    int d = 0;
    double t = 0.0;
    double R = 0.0;
    double delta = 0.0;

    std::string to_json() const;
};

// t = 4 C ln k, R = sqrt(C ln k)/10, delta = R d / (6 e t). Throws
// PreconditionError naming the violated hypothesis among
// C >= 100, d <= ln k / ln ln k, ln(8 e C) <= (1 - 1/e) ln k / d.
LowerBoundParams lower_bound_params(int k, int d, double C);

// Builds the pair from a 3*delta-spaced base grid inside [-R, R] perturbed
// antipodally by c(x) x with c(x) = delta / max_i |x_i|, where x on the unit
// sphere is found by multistart local search driving the squared moment
// mismatch below 1e-18 (Gauss-Newton polish after a Nelder-Mead coarse
// phase). N = 2, t = 1 uses the exact antisymmetric closed form.
// Preconditions: t + 1 <= N <= R / (3 delta) (the antipodal zero needs the
// sphere dimension to cover the t moment constraints). Throws SearchExhausted
// when no start reaches tolerance.
HardInstancePair build_moment_matched_pair(int N, int t, double delta, double R,
                                           std::uint64_t seed = 1);

struct TvBound {
    double value = 0.0;   // eps_tail + sqrt(Vol_1(R'))/2 * l2
    double l2_sq = 0.0;   // squared L2 distance bound between the mixtures
    bool vacuous = false; // value >= 1 certifies nothing
};

// Requires t / (4R) >= sqrt(5 d) (d = 1 here), eps_tail in (0, 1), and the
// pair's moments matched to 1e-9. Factorials are evaluated in the log domain.
TvBound tv_upper_bound(const HardInstancePair& pair, double eps_tail);

// (1/2) integral of |p - q| for the uniform mixtures of N(mu_i, 1), adaptive
// quadrature over [min mu - 10, max mu + 10], absolute tolerance 1e-9.
double tv_numeric(const HardInstancePair& pair);

}  // namespace specmix
