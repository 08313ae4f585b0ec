#include "specmix/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include <json.hpp>

#include "specmix/errors.hpp"
#include "specmix/math_util.hpp"

namespace specmix {

std::string family_name(FamilyId f) {
    switch (f) {
        case FamilyId::gaussian: return "gaussian";
        case FamilyId::cauchy: return "cauchy";
        case FamilyId::logistic: return "logistic";
        case FamilyId::laplace: return "laplace";
        case FamilyId::gumbel: return "gumbel";
        case FamilyId::exponential: return "exponential";
    }
    throw PreconditionError("unknown family id");
}

FamilyId family_from_name(const std::string& name) {
    for (FamilyId f : {FamilyId::gaussian, FamilyId::cauchy, FamilyId::logistic,
                       FamilyId::laplace, FamilyId::gumbel, FamilyId::exponential}) {
        if (family_name(f) == name) return f;
    }
    throw PreconditionError("unknown family: " + name);
}

void MixtureModel::validate() const {
    if (k < 1) throw PreconditionError("k must be >= 1");
    if (d < 1) throw PreconditionError("d must be >= 1");
    if (static_cast<int>(means.size()) != k)
        throw PreconditionError("means must have exactly k entries");
    for (const auto& m : means)
        if (static_cast<int>(m.size()) != d)
            throw PreconditionError("every mean must have dimension d");
    if (family != FamilyId::gaussian && d != 1)
        throw PreconditionError("non-Gaussian families require d = 1");
}

std::string MixtureModel::to_json() const {
    nlohmann::json j;
    j["family"] = family_name(family);
    j["d"] = d;
    j["k"] = k;
    j["means"] = means;
    return j.dump(2);
}

MixtureModel MixtureModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    MixtureModel m;
    m.family = family_from_name(j.at("family").get<std::string>());
    m.d = j.at("d").get<int>();
    m.k = j.at("k").get<int>();
    m.means = j.at("means").get<Points>();
    m.validate();
    return m;
}

double l2_distance(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw PreconditionError("dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        s += diff * diff;
    }
    return std::sqrt(s);
}

double separation(const Points& means) {
    if (means.size() < 2) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < means.size(); ++i)
        for (std::size_t j = i + 1; j < means.size(); ++j)
            best = std::min(best, l2_distance(means[i], means[j]));
    return best;
}

namespace {
// Augmenting-path bipartite matching restricted to edges with
// dist(a_i, b_j) <= threshold. Returns the matching (b index per a index)
// if perfect, else nullopt.
std::optional<std::vector<int>> perfect_matching(
    const std::vector<std::vector<double>>& dist, double threshold) {
    const int n = static_cast<int>(dist.size());
    std::vector<int> match_b(n, -1);  // b -> a
    std::vector<char> visited(n);
    std::function<bool(int)> try_augment = [&](int a) {
        for (int b = 0; b < n; ++b) {
            if (visited[b] || dist[a][b] > threshold) continue;
            visited[b] = 1;
            if (match_b[b] < 0 || try_augment(match_b[b])) {
                match_b[b] = a;
                return true;
            }
        }
        return false;
    };
    for (int a = 0; a < n; ++a) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!try_augment(a)) return std::nullopt;
    }
    std::vector<int> match_a(n);
    for (int b = 0; b < n; ++b) match_a[match_b[b]] = b;
    return match_a;
}
}  // namespace

MatchingResult epsilon_close(const Points& a, const Points& b, double eps) {
    if (a.size() != b.size()) throw PreconditionError("point set size mismatch");
    const int n = static_cast<int>(a.size());
    std::vector<std::vector<double>> dist(n, std::vector<double>(n));
    std::set<double> thresholds;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            dist[i][j] = l2_distance(a[i], b[j]);
            thresholds.insert(dist[i][j]);
        }
    // Binary search over the sorted distinct distances for the smallest
    // threshold admitting a perfect matching (the bottleneck cost).
    std::vector<double> ts(thresholds.begin(), thresholds.end());
    int lo = 0, hi = static_cast<int>(ts.size()) - 1;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (perfect_matching(dist, ts[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    MatchingResult r;
    r.max_distance = ts[lo];
    r.permutation = perfect_matching(dist, ts[lo]);
    r.matched = r.max_distance <= eps;
    return r;
}

double norm_lower_bound(double delta, int d, int j) {
    if (j < 2) throw PreconditionError("norm_lower_bound requires j >= 2");
    return std::max(delta / 2.0,
                    delta * std::pow(static_cast<double>(j), 1.0 / d) / 4.0);
}

double ball_volume(int d, double r) {
    if (r < 0.0) throw PreconditionError("ball_volume requires r >= 0");
    const double pi = 3.1415926535897932384626433832795;
    return std::pow(pi, d / 2.0) * std::pow(r, d) / gamma_real(d / 2.0 + 1.0);
}

}  // namespace specmix
