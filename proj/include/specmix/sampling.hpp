#pragma once
// Seeded generation of separated truth models and of i.i.d. samples from
// every supported mixture family.
#include <cstddef>
#include <utility>
#include <vector>

#include "specmix/mixture.hpp"
#include "specmix/rng.hpp"

namespace specmix {

// Rejection-samples k points with pairwise separation >= delta inside the
// centered ball of the given radius. Throws PreconditionError when the
// packing bound k (delta/2)^d > (radius + delta/2)^d makes this infeasible,
// BudgetExceeded after the proposal cap.
Points generate_separated_means(int k, int d, double delta, double radius,
                                RngStream& rng, std::size_t proposal_cap = 1000000);

// One draw from the base (location-0) distribution of the family.
// Gaussian handles any d; the others are 1-D (inverse-CDF transforms).
double base_draw_1d(FamilyId family, RngStream& rng);

// n i.i.d. draws from the mixture: component uniform on [k], then base draw
// shifted by the component location. For exponential, means store ln(lambda)
// and draws are -ln(u)/lambda (no shift; the rate is the parameter).
Points sample(const MixtureModel& model, std::size_t n, RngStream& rng);

// Mixed linear regression pairs: X ~ N(0,1), j uniform, Y ~ N(w_j X, 1).
std::vector<std::pair<double, double>> sample_mlr(const std::vector<double>& weights,
                                                  std::size_t n, RngStream& rng);

// Closed-form CDF of the base family at x (location 0, unit scale).
double base_cdf(FamilyId family, double x);

}  // namespace specmix
