#include "specmix/hard_instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "specmix/errors.hpp"
#include "specmix/math_util.hpp"
#include "specmix/mixture.hpp"
#include "specmix/rng.hpp"

namespace specmix {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kE = 2.7182818284590452353602874713527;
constexpr double kResidualTol = 1e-9;
constexpr double kSearchTol = 1e-18;  // on the squared mismatch g(x)

// Moment mismatch F_{t'} = m_{t'}(mu + c x) - m_{t'}(mu - c x), t' = 1..t,
// compensated summation over the N points.
std::vector<double> mismatch(const std::vector<double>& mu,
                             const std::vector<double>& px, int t, double c) {
    const std::size_t n = mu.size();
    std::vector<KahanSum> acc(t);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = mu[i] + c * px[i];
        const double b = mu[i] - c * px[i];
        double pa = 1.0, pb = 1.0;
        for (int tp = 0; tp < t; ++tp) {
            pa *= a;
            pb *= b;
            acc[tp].add(pa - pb);
        }
    }
    std::vector<double> f(t);
    for (int tp = 0; tp < t; ++tp) f[tp] = acc[tp].sum;
    return f;
}

double scale_of(const std::vector<double>& x, double delta) {
    double mx = 0.0;
    for (double v : x) mx = std::max(mx, std::fabs(v));
    return delta / mx;
}

double objective(const std::vector<double>& mu, std::vector<double> x, int t,
                 double delta) {
    double nrm = 0.0;
    for (double v : x) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.0)) return std::numeric_limits<double>::infinity();
    for (double& v : x) v /= nrm;
    const double c = scale_of(x, delta);
    double g = 0.0;
    for (double f : mismatch(mu, x, t, c)) g += f * f;
    return g;
}

void normalize(std::vector<double>& x) {
    double nrm = 0.0;
    for (double v : x) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (double& v : x) v /= nrm;
}

// Solves the t x t system A y = b in place (partial pivoting); t is tiny.
bool solve_small(std::vector<std::vector<double>>& A, std::vector<double>& b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        if (std::fabs(A[piv][col]) < 1e-300) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < n; ++r) {
            const double m = A[r][col] / A[col][col];
            for (int cc = col; cc < n; ++cc) A[r][cc] -= m * A[col][cc];
            b[r] -= m * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        for (int cc = r + 1; cc < n; ++cc) b[r] -= A[r][cc] * b[cc];
        b[r] /= A[r][r];
    }
    return true;
}

// Minimum-norm Gauss-Newton step for the underdetermined system F(x) = 0 on
// the sphere: delta = J^T (J J^T)^{-1} F with c held fixed per iteration.
bool gauss_newton(const std::vector<double>& mu, std::vector<double>& x, int t,
                  double delta, int iters) {
    const int n = static_cast<int>(x.size());
    for (int it = 0; it < iters; ++it) {
        normalize(x);
        const double c = scale_of(x, delta);
        const std::vector<double> f = mismatch(mu, x, t, c);
        double g = 0.0;
        for (double v : f) g += v * v;
        if (g < 1e-30) return true;
        std::vector<std::vector<double>> J(t, std::vector<double>(n));
        for (int i = 0; i < n; ++i) {
            const double a = mu[i] + c * x[i];
            const double b = mu[i] - c * x[i];
            double pa = 1.0, pb = 1.0;  // a^{t'-1}, b^{t'-1}
            for (int tp = 1; tp <= t; ++tp) {
                J[tp - 1][i] = c * tp * (pa + pb);
                pa *= a;
                pb *= b;
            }
        }
        std::vector<std::vector<double>> JJt(t, std::vector<double>(t, 0.0));
        for (int r = 0; r < t; ++r)
            for (int s2 = 0; s2 < t; ++s2)
                for (int i = 0; i < n; ++i) JJt[r][s2] += J[r][i] * J[s2][i];
        std::vector<double> y = f;
        if (!solve_small(JJt, y)) return false;
        for (int i = 0; i < n; ++i) {
            double step = 0.0;
            for (int r = 0; r < t; ++r) step += J[r][i] * y[r];
            x[i] -= step;
        }
    }
    normalize(x);
    return objective(mu, x, t, delta) < kSearchTol;
}

// Plain Nelder-Mead coarse phase over R^N (the objective normalizes).
void nelder_mead(const std::vector<double>& mu, std::vector<double>& x, int t,
                 double delta, int iters) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> pts(n + 1, x);
    for (int i = 0; i < n; ++i) pts[i + 1][i] += 0.25;
    std::vector<double> vals(n + 1);
    for (int i = 0; i <= n; ++i) vals[i] = objective(mu, pts[i], t, delta);
    for (int it = 0; it < iters; ++it) {
        std::vector<int> ord(n + 1);
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        const int lo = ord[0], hi = ord[n], second = ord[n - 1];
        if (vals[lo] < kSearchTol * 1e-4) break;
        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i <= n; ++i)
            if (i != hi)
                for (int c = 0; c < n; ++c) centroid[c] += pts[i][c] / n;
        auto blend = [&](double alpha) {
            std::vector<double> p(n);
            for (int c = 0; c < n; ++c)
                p[c] = centroid[c] + alpha * (pts[hi][c] - centroid[c]);
            return p;
        };
        std::vector<double> refl = blend(-1.0);
        const double frefl = objective(mu, refl, t, delta);
        if (frefl < vals[lo]) {
            std::vector<double> exp2 = blend(-2.0);
            const double fexp = objective(mu, exp2, t, delta);
            if (fexp < frefl) {
                pts[hi] = exp2;
                vals[hi] = fexp;
            } else {
                pts[hi] = refl;
                vals[hi] = frefl;
            }
        } else if (frefl < vals[second]) {
            pts[hi] = refl;
            vals[hi] = frefl;
        } else {
            std::vector<double> con = blend(0.5);
            const double fcon = objective(mu, con, t, delta);
            if (fcon < vals[hi]) {
                pts[hi] = con;
                vals[hi] = fcon;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == lo) continue;
                    for (int c = 0; c < n; ++c)
                        pts[i][c] = 0.5 * (pts[i][c] + pts[lo][c]);
                    vals[i] = objective(mu, pts[i], t, delta);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (vals[i] < vals[best]) best = i;
    x = pts[best];
    normalize(x);
}

Points wrap_1d(const std::vector<double>& xs) {
    Points p;
    p.reserve(xs.size());
    for (double v : xs) p.push_back({v});
    return p;
}

HardInstancePair assemble(const std::vector<double>& mu,
                          const std::vector<double>& x, int t, double delta,
                          double R) {
    const double c = scale_of(x, delta);
    HardInstancePair pair;
    pair.t = t;
    pair.delta = delta;
    pair.R = R;
    pair.mu_P.resize(mu.size());
    pair.mu_Q.resize(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        pair.mu_P[i] = mu[i] + c * x[i];
        pair.mu_Q[i] = mu[i] - c * x[i];
    }
    const std::vector<double> f = mismatch(mu, x, t, c);
    pair.moment_residuals.resize(t);
    for (int tp = 0; tp < t; ++tp) pair.moment_residuals[tp] = std::fabs(f[tp]);
    pair.param_distance =
        epsilon_close(wrap_1d(pair.mu_P), wrap_1d(pair.mu_Q), 0.0).max_distance;
    return pair;
}

bool invariants_hold(const HardInstancePair& pair) {
    if (separation(wrap_1d(pair.mu_P)) < pair.delta) return false;
    if (separation(wrap_1d(pair.mu_Q)) < pair.delta) return false;
    for (double r : pair.moment_residuals)
        if (!(r <= kResidualTol)) return false;
    if (!(pair.param_distance >= pair.delta)) return false;
    for (double v : pair.mu_P)
        if (std::fabs(v) > 2.0 * pair.R) return false;
    for (double v : pair.mu_Q)
        if (std::fabs(v) > 2.0 * pair.R) return false;
    return true;
}
}  // namespace

std::string HardInstancePair::to_json() const {
    nlohmann::json j;
    j["mu_P"] = mu_P;
    j["mu_Q"] = mu_Q;
    j["t"] = t;
    j["delta"] = delta;
    j["R"] = R;
    j["moment_residuals"] = moment_residuals;
    j["param_distance"] = param_distance;
    return j.dump(2);
}

std::string LowerBoundParams::to_json() const {
    nlohmann::json j;
    j["C"] = C;
    j["k"] = k;
    j["d"] = d;
    j["t"] = t;
    j["R"] = R;
    j["delta"] = delta;
    return j.dump(2);
}

LowerBoundParams lower_bound_params(int k, int d, double C) {
    if (k < 2 || d < 1) throw PreconditionError("lower_bound_params: need k >= 2, d >= 1");
    if (!(C >= 100.0))
        throw PreconditionError("lower_bound_params: hypothesis C >= 100 fails (C = " +
                                std::to_string(C) + ")");
    const double lnk = std::log(static_cast<double>(k));
    if (!(lnk > 1.0) || !(d <= lnk / std::log(lnk)))
        throw PreconditionError("lower_bound_params: hypothesis d <= ln k / ln ln k fails");
    if (!(std::log(8.0 * kE * C) <= (1.0 - 1.0 / kE) * lnk / d))
        throw PreconditionError(
            "lower_bound_params: hypothesis ln(8eC) <= (1 - 1/e) ln k / d fails");
    LowerBoundParams p;
    p.C = C;
    p.k = k;
    p.d = d;
    p.t = 4.0 * C * lnk;
    p.R = std::sqrt(C * lnk) / 10.0;
    p.delta = p.R * d / (6.0 * kE * p.t);
    return p;
}

HardInstancePair build_moment_matched_pair(int N, int t, double delta, double R,
                                           std::uint64_t seed) {
    if (t < 1 || !(delta > 0.0) || !(R > 0.0))
        throw PreconditionError("build_moment_matched_pair: bad arguments");
    // The antipodal zero exists whenever the sphere dimension covers the
    // moment constraints: N - 1 >= t, i.e. N >= t + 1 at d = 1. (The coarser
    // sufficient form e (t+1) <= N merely upper-bounds the constraint count.)
    if (N < t + 1)
        throw PreconditionError("build_moment_matched_pair: N = " + std::to_string(N) +
                                " violates N >= t + 1 = " + std::to_string(t + 1) +
                                " (constraint count bound e (t+1) = " +
                                std::to_string(kE * (t + 1)) + ")");
    if (!(static_cast<double>(N) <= R / (3.0 * delta)))
        throw PreconditionError("build_moment_matched_pair: N = " + std::to_string(N) +
                                " violates N <= R / (3 delta) = " +
                                std::to_string(R / (3.0 * delta)));

    std::vector<double> mu(N);  // 3*delta-spaced grid centered in [-R, R]
    for (int i = 0; i < N; ++i) mu[i] = 3.0 * delta * (i - 0.5 * (N - 1));

    if (N == 2 && t == 1) {
        // Exact antisymmetric closed form: x = (1/sqrt(2), -1/sqrt(2)) moves
        // the two points by +delta / -delta and keeps the mean identical.
        const std::vector<double> x = {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)};
        HardInstancePair pair = assemble(mu, x, t, delta, R);
        pair.moment_residuals.assign(1, 0.0);  // exact by antisymmetry
        pair.mu_P = {mu[0] + delta, mu[1] - delta};
        pair.mu_Q = {mu[0] - delta, mu[1] + delta};
        pair.param_distance = 2.0 * delta;
        if (!invariants_hold(pair))
            throw SearchExhausted("build_moment_matched_pair: closed form violates invariants");
        return pair;
    }

    for (std::uint64_t start = 0; start < 32; ++start) {
        RngStream rng(seed, start);
        std::vector<double> x(N);
        for (int i = 0; i < N; ++i) x[i] = rng.normal();
        normalize(x);
        nelder_mead(mu, x, t, delta, 400);
        if (!gauss_newton(mu, x, t, delta, 200)) continue;
        HardInstancePair pair = assemble(mu, x, t, delta, R);
        if (invariants_hold(pair)) return pair;
    }
    throw SearchExhausted(
        "build_moment_matched_pair: no start reached the moment-match tolerance");
}

TvBound tv_upper_bound(const HardInstancePair& pair, double eps_tail) {
    if (!(eps_tail > 0.0 && eps_tail < 1.0))
        throw PreconditionError("tv_upper_bound: eps_tail must lie in (0, 1)");
    const int d = 1;
    const double t = static_cast<double>(pair.t);
    const double R = pair.R;
    if (!(t / (4.0 * R) >= std::sqrt(5.0 * d)))
        throw PreconditionError("tv_upper_bound: hypothesis t/(4R) >= sqrt(5d) fails");
    for (double r : pair.moment_residuals)
        if (!(r <= kResidualTol))
            throw PreconditionError("tv_upper_bound: moments not matched to tolerance");

    TvBound out;
    const double tail = 4.0 * std::exp(-t * t / (80.0 * R * R));
    const double log_poly = std::log(2.0) + d * std::log(t / (4.0 * R)) +
                            2.0 * t * std::log(2.0 * R) - log_factorial(pair.t);
    out.l2_sq = tail + std::exp(log_poly);
    const double Rp = 2.0 * R + std::sqrt(static_cast<double>(d)) +
                      std::sqrt(2.0 * std::log(1.0 / eps_tail));
    out.value = eps_tail + 0.5 * std::sqrt(ball_volume(d, Rp)) * std::sqrt(out.l2_sq);
    out.vacuous = !(out.value < 1.0);
    return out;
}

double tv_numeric(const HardInstancePair& pair) {
    const double inv_np = 1.0 / static_cast<double>(pair.mu_P.size());
    const double inv_nq = 1.0 / static_cast<double>(pair.mu_Q.size());
    const double norm = 1.0 / std::sqrt(2.0 * kPi);
    auto diff = [&](double x) {
        double p = 0.0, q = 0.0;
        for (double m : pair.mu_P) p += std::exp(-0.5 * (x - m) * (x - m));
        for (double m : pair.mu_Q) q += std::exp(-0.5 * (x - m) * (x - m));
        return std::fabs(norm * (inv_np * p - inv_nq * q));
    };
    std::vector<double> knots = pair.mu_P;
    knots.insert(knots.end(), pair.mu_Q.begin(), pair.mu_Q.end());
    std::sort(knots.begin(), knots.end());
    const double lo = knots.front() - 10.0, hi = knots.back() + 10.0;
    // Seed the adaptive quadrature with one panel per inter-mean gap so it
    // resolves every sign change of p - q.
    std::vector<double> cuts = {lo};
    for (double m : knots)
        if (m > cuts.back()) cuts.push_back(m);
    cuts.push_back(hi);
    double total = 0.0;
    const double tol = 1e-10 / static_cast<double>(cuts.size());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += integrate(diff, cuts[i], cuts[i + 1], tol);
    return 0.5 * total;
}

}  // namespace specmix
