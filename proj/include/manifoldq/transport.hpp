#pragma once

#include <cstdint>
#include <vector>

#include "manifoldq/geometry.hpp"

namespace mfq {

// Dense cost matrix with entries d^2(y_i, z_j)/2, row-major.
struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> c;

    double at(int i, int j) const { return c[static_cast<std::size_t>(i) * cols + j]; }
    double& at(int i, int j) { return c[static_cast<std::size_t>(i) * cols + j]; }
};

CostMatrix cost_matrix(const ManifoldSpec& spec, const std::vector<ManifoldPoint>& sources,
                       const std::vector<ManifoldPoint>& targets);

// Optimal permutation: perm[i] is the target index of source i.
struct AssignmentPlan {
    std::vector<int> perm;
    double objective = 0.0;
};

AssignmentPlan solve_assignment(const CostMatrix& cost);

// Sparse transport plan. Row sums equal 1/rows, column sums equal the input
// weights (both up to the integer mass scaling, < 1e-9 per marginal).
struct Coupling {
    struct Entry {
        int i = 0;
        int j = 0;
        double mass = 0.0;
    };
    int rows = 0;
    int cols = 0;
    std::vector<Entry> entries;
    double objective = 0.0;
    // dual-feasibility certificate: min reduced cost over all arcs
    double min_reduced_cost = 0.0;
};

Coupling solve_kantorovich(const CostMatrix& cost, const std::vector<double>& col_weights);

struct MonotonicityReport {
    double max_violation = 0.0;  // >= 0; > tol indicates a non-optimal plan
    int trials = 0;
};

// Randomized check of c-cyclical monotonicity on a plan's support: samples
// index subsets of size <= k_max and evaluates cyclic reassignments.
MonotonicityReport check_cyclical_monotonicity(
    const ManifoldSpec& spec,
    const std::vector<std::pair<ManifoldPoint, ManifoldPoint>>& support_pairs, int k_max,
    int trials, std::uint64_t seed);

}  // namespace mfq
