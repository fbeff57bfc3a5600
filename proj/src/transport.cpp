#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "manifoldq/transport.hpp"

namespace mfq {

CostMatrix cost_matrix(const ManifoldSpec& spec, const std::vector<ManifoldPoint>& sources,
                       const std::vector<ManifoldPoint>& targets) {
    CostMatrix cm;
    cm.rows = static_cast<int>(sources.size());
    cm.cols = static_cast<int>(targets.size());
    cm.c.resize(static_cast<std::size_t>(cm.rows) * cm.cols);
    for (const auto& y : sources) validate_point(spec, y);
    for (const auto& z : targets) validate_point(spec, z);
    for (int i = 0; i < cm.rows; ++i) {
        for (int j = 0; j < cm.cols; ++j) {
            double d = geodesic_distance(spec, sources[i], targets[j]);
            cm.at(i, j) = 0.5 * d * d;
        }
    }
    return cm;
}

MonotonicityReport check_cyclical_monotonicity(
    const ManifoldSpec& spec,
    const std::vector<std::pair<ManifoldPoint, ManifoldPoint>>& support_pairs, int k_max,
    int trials, std::uint64_t seed) {
    MonotonicityReport rep;
    rep.trials = trials;
    const int n = static_cast<int>(support_pairs.size());
    if (n < 2 || k_max < 2) return rep;  // only the identity permutation exists

    // cache pair costs once
    std::vector<double> base(n);
    for (int i = 0; i < n; ++i)
        base[i] = 0.5 * std::pow(geodesic_distance(spec, support_pairs[i].first,
                                                   support_pairs[i].second),
                                 2.0);

    std::mt19937_64 rng(seed);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const int kcap = std::min(k_max, n);
    std::uniform_int_distribution<int> ksize(2, kcap);
    for (int t = 0; t < trials; ++t) {
        int k = ksize(rng);
        // partial Fisher-Yates for a random k-subset
        for (int s = 0; s < k; ++s) {
            std::uniform_int_distribution<int> pick(s, n - 1);
            std::swap(idx[s], idx[pick(rng)]);
        }
        // cyclic shift: pair y_{i+1} with z_i
        double cur = 0.0, shifted = 0.0;
        for (int s = 0; s < k; ++s) {
            int a = idx[s], b = idx[(s + 1) % k];
            cur += base[a];
            shifted += 0.5 * std::pow(geodesic_distance(spec, support_pairs[b].first,
                                                        support_pairs[a].second),
                                      2.0);
        }
        rep.max_violation = std::max(rep.max_violation, cur - shifted);
    }
    return rep;
}

}  // namespace mfq
