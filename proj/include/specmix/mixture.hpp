#pragma once
// Domain types for mixtures plus the separation / closeness geometry and the
// small analytic utilities shared by every other module.
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace specmix {

using Vec = std::vector<double>;
using Points = std::vector<Vec>;

enum class FamilyId { gaussian, cauchy, logistic, laplace, gumbel, exponential };

std::string family_name(FamilyId f);
FamilyId family_from_name(const std::string& name);

// A k-component location mixture with uniform weights 1/k. For the
// exponential family the stored per-component parameter is ln(lambda).
struct MixtureModel {
    FamilyId family = FamilyId::gaussian;
    int d = 1;
    int k = 1;
    Points means;

    void validate() const;                 // throws PreconditionError
    std::string to_json() const;
    static MixtureModel from_json(const std::string& text);
};

// Result of the bottleneck matching between two equal-size point sets.
struct MatchingResult {
    bool matched = false;
    std::optional<std::vector<int>> permutation;  // a[i] <-> b[perm[i]]
    double max_distance = 0.0;
};

double l2_distance(const Vec& a, const Vec& b);

// Minimum pairwise l2 distance; +infinity for fewer than 2 points.
double separation(const Points& means);

// Exact bottleneck bipartite matching: binary search over the k^2 pairwise
// distances with an augmenting-path matching test at each threshold.
MatchingResult epsilon_close(const Points& a, const Points& b, double eps);

// max{delta/2, delta * j^(1/d) / 4} for the j-th smallest norm, j >= 2.
double norm_lower_bound(double delta, int d, int j);

// Volume of the d-ball of radius r: pi^(d/2) r^d / Gamma(d/2 + 1).
double ball_volume(int d, double r);

}  // namespace specmix
