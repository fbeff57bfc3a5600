#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "manifoldq/transport.hpp"

namespace mfq {

// Shortest-augmenting-path assignment with dual potentials (Jonker-Volgenant
// family). One Dijkstra-like scan per row; exact for finite costs.
AssignmentPlan solve_assignment(const CostMatrix& cost) {
    if (cost.rows != cost.cols) throw std::invalid_argument("assignment needs a square cost");
    const int n = cost.rows;
    for (double x : cost.c)
        if (!std::isfinite(x)) throw std::invalid_argument("assignment cost has non-finite entry");

    const double inf = std::numeric_limits<double>::infinity();
    // 1-based with a virtual column 0; p[j] = row matched to column j
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost.at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    AssignmentPlan plan;
    plan.perm.assign(n, -1);
    for (int j = 1; j <= n; ++j) plan.perm[p[j] - 1] = j - 1;
    plan.objective = 0.0;
    for (int i = 0; i < n; ++i) plan.objective += cost.at(i, plan.perm[i]);
    return plan;
}

}  // namespace mfq
