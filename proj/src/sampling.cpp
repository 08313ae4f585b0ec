#include "specmix/sampling.hpp"

#include <cmath>
#include <string>

#include "specmix/errors.hpp"
#include "specmix/math_util.hpp"

namespace specmix {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
}

Points generate_separated_means(int k, int d, double delta, double radius,
                                RngStream& rng, std::size_t proposal_cap) {
    if (k < 1 || d < 1 || delta < 0.0 || radius <= 0.0)
        throw PreconditionError("generate_separated_means: bad arguments");
    // Packing bound: k disjoint (delta/2)-balls must fit in the
    // (radius + delta/2)-ball.
    if (k * std::pow(delta / 2.0, d) > std::pow(radius + delta / 2.0, d))
        throw PreconditionError(
            "packing infeasible: k (delta/2)^d = " +
            std::to_string(k * std::pow(delta / 2.0, d)) + " exceeds (radius+delta/2)^d = " +
            std::to_string(std::pow(radius + delta / 2.0, d)));
    Points out;
    out.reserve(k);
    std::size_t proposals = 0;
    while (static_cast<int>(out.size()) < k) {
        if (++proposals > proposal_cap)
            throw BudgetExceeded("generate_separated_means: proposal cap exceeded");
        // Uniform proposal in the ball via rejection from the bounding cube.
        Vec p(d);
        double norm2;
        do {
            norm2 = 0.0;
            for (int i = 0; i < d; ++i) {
                p[i] = radius * (2.0 * rng.u01() - 1.0);
                norm2 += p[i] * p[i];
            }
        } while (norm2 > radius * radius);
        bool ok = true;
        for (const auto& q : out) {
            if (l2_distance(p, q) < delta) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(std::move(p));
    }
    return out;
}

double base_draw_1d(FamilyId family, RngStream& rng) {
    switch (family) {
        case FamilyId::gaussian:
            return rng.normal();
        case FamilyId::cauchy:
            return std::tan(kPi * (rng.u01() - 0.5));
        case FamilyId::logistic: {
            double u = rng.u01();
            return std::log(u / (1.0 - u));
        }
        case FamilyId::laplace: {
            double e = -std::log(rng.u01());
            return rng.u01() < 0.5 ? -e : e;
        }
        case FamilyId::gumbel:
            return -std::log(-std::log(rng.u01()));
        case FamilyId::exponential:
            // Location-0 convention: Exp(1); callers apply the rate.
            return -std::log(rng.u01());
    }
    throw PreconditionError("unknown family");
}

Points sample(const MixtureModel& model, std::size_t n, RngStream& rng) {
    model.validate();
    Points out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(model.k));
        Vec x(model.d);
        if (model.family == FamilyId::gaussian) {
            for (int t = 0; t < model.d; ++t)
                x[t] = model.means[j][t] + rng.normal();
        } else if (model.family == FamilyId::exponential) {
            // Stored parameter is ln(lambda): draw Exp(lambda) = -ln(u)/lambda.
            double lambda = std::exp(model.means[j][0]);
            x[0] = -std::log(rng.u01()) / lambda;
        } else {
            x[0] = model.means[j][0] + base_draw_1d(model.family, rng);
        }
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<std::pair<double, double>> sample_mlr(const std::vector<double>& weights,
                                                  std::size_t n, RngStream& rng) {
    if (weights.empty()) throw PreconditionError("sample_mlr: empty weights");
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    const auto k = static_cast<std::uint64_t>(weights.size());
    for (std::size_t i = 0; i < n; ++i) {
        double x = rng.normal();
        int j = static_cast<int>(rng.next_u64() % k);
        double y = weights[j] * x + rng.normal();
        out.emplace_back(x, y);
    }
    return out;
}

double base_cdf(FamilyId family, double x) {
    switch (family) {
        case FamilyId::gaussian:
            return normal_cdf(x);
        case FamilyId::cauchy:
            return 0.5 + std::atan(x) / kPi;
        case FamilyId::logistic:
            return 1.0 / (1.0 + std::exp(-x));
        case FamilyId::laplace:
            return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
        case FamilyId::gumbel:
            return std::exp(-std::exp(-x));
        case FamilyId::exponential:
            return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x);
    }
    throw PreconditionError("unknown family");
}

}  // namespace specmix
