#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "manifoldq/transport.hpp"

namespace mfq {

namespace {

constexpr std::int64_t kMassScale = 1'000'000'000;

// Largest-remainder rounding of a simplex vector to integers summing to total.
std::vector<std::int64_t> scale_masses(const std::vector<double>& w, std::int64_t total) {
    const int n = static_cast<int>(w.size());
    std::vector<std::int64_t> out(n);
    std::vector<std::pair<double, int>> fracs(n);
    std::int64_t used = 0;
    for (int j = 0; j < n; ++j) {
        double exact = w[j] * static_cast<double>(total);
        out[j] = static_cast<std::int64_t>(std::floor(exact));
        fracs[j] = {exact - static_cast<double>(out[j]), j};
        used += out[j];
    }
    std::int64_t left = total - used;
    std::sort(fracs.begin(), fracs.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::int64_t k = 0; k < left; ++k) out[fracs[static_cast<std::size_t>(k)].second] += 1;
    return out;
}

// Transportation network simplex on the dense bipartite graph. Node ids:
// rows 0..N-1, columns N..N+m-1. The basis is a spanning tree; each non-root
// node stores the flow on the arc to its parent (flow runs row -> column).
class TransportSimplex {
public:
    TransportSimplex(const CostMatrix& cost, const std::vector<int>& col_ids,
                     const std::vector<std::int64_t>& supply,
                     const std::vector<std::int64_t>& demand)
        : cost_(cost), col_ids_(col_ids), N_(cost.rows), m_(static_cast<int>(col_ids.size())) {
        const int V = N_ + m_;
        parent_.assign(V, -1);
        flow_.assign(V, 0);
        depth_.assign(V, 0);
        pot_.assign(V, 0.0);
        order_.reserve(V);
        build_initial_tree(supply, demand);
        refresh_tree();
    }

    void run() {
        double cmax = 0.0;
        for (double x : cost_.c) cmax = std::max(cmax, std::abs(x));
        const double enter_eps = 1e-12 * (1.0 + cmax);
        const std::size_t narcs = static_cast<std::size_t>(N_) * m_;
        const std::size_t block =
            std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt((double)narcs)));
        std::size_t scan = 0;
        long long guard = 400LL * (N_ + m_) + 200000;
        while (guard-- > 0) {
            int bi = -1, bj = -1;
            double best = -enter_eps;
            std::size_t seen = 0;
            bool found = false;
            while (seen < narcs) {
                std::size_t stop = std::min(narcs, seen + block);
                for (; seen < stop; ++seen, scan = (scan + 1 == narcs ? 0 : scan + 1)) {
                    int i = static_cast<int>(scan / m_);
                    int jj = static_cast<int>(scan % m_);
                    double r = cost_.at(i, col_ids_[jj]) - pot_[i] - pot_[N_ + jj];
                    if (r < best) {
                        best = r;
                        bi = i;
                        bj = jj;
                        found = true;
                    }
                }
                if (found) break;
            }
            if (!found) return;
            pivot(bi, bj);
        }
        throw std::runtime_error("transport simplex iteration guard exceeded");
    }

    Coupling extract() const {
        Coupling cp;
        cp.rows = N_;
        cp.cols = cost_.cols;
        const int V = N_ + m_;
        for (int x = 0; x < V; ++x) {
            if (parent_[x] < 0 || flow_[x] == 0) continue;
            int rn = x < N_ ? x : parent_[x];
            int cn = x < N_ ? parent_[x] : x;
            cp.entries.push_back({rn, col_ids_[cn - N_],
                                  static_cast<double>(flow_[x]) / kMassScale});
        }
        std::sort(cp.entries.begin(), cp.entries.end(), [](const auto& a, const auto& b) {
            return a.i != b.i ? a.i < b.i : a.j < b.j;
        });
        cp.objective = 0.0;
        for (const auto& e : cp.entries) cp.objective += e.mass * cost_.at(e.i, e.j);
        double minr = 0.0;
        for (int i = 0; i < N_; ++i)
            for (int jj = 0; jj < m_; ++jj)
                minr = std::min(minr, cost_.at(i, col_ids_[jj]) - pot_[i] - pot_[N_ + jj]);
        cp.min_reduced_cost = minr;
        return cp;
    }

private:
    void build_initial_tree(const std::vector<std::int64_t>& supply,
                            const std::vector<std::int64_t>& demand) {
        // northwest-corner staircase: a spanning tree with N+m-1 basic arcs
        struct Arc {
            int r, c;
            std::int64_t f;
        };
        std::vector<Arc> arcs;
        arcs.reserve(N_ + m_ - 1);
        int i = 0, jj = 0;
        std::int64_t ar = supply[0], bc = demand[0];
        for (;;) {
            std::int64_t f = std::min(ar, bc);
            arcs.push_back({i, jj, f});
            ar -= f;
            bc -= f;
            if (i == N_ - 1 && jj == m_ - 1) break;
            if (ar == 0 && i < N_ - 1) {
                ++i;
                ar = supply[i];
            } else {
                ++jj;
                bc = demand[jj];
            }
        }
        std::vector<std::vector<std::pair<int, std::int64_t>>> adj(N_ + m_);
        for (const auto& a : arcs) {
            adj[a.r].push_back({N_ + a.c, a.f});
            adj[N_ + a.c].push_back({a.r, a.f});
        }
        // BFS from node 0 to orient the tree
        std::vector<int> stack = {0};
        std::vector<char> seen(N_ + m_, 0);
        seen[0] = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (auto [y, f] : adj[x]) {
                if (seen[y]) continue;
                seen[y] = 1;
                parent_[y] = x;
                flow_[y] = f;
                stack.push_back(y);
            }
        }
    }

    // recompute children/depth/potentials from parent pointers
    void refresh_tree() {
        const int V = N_ + m_;
        children_.assign(V, {});
        for (int x = 0; x < V; ++x)
            if (parent_[x] >= 0) children_[parent_[x]].push_back(x);
        order_.clear();
        depth_[0] = 0;
        pot_[0] = 0.0;
        std::vector<int> stack = {0};
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            order_.push_back(x);
            for (int y : children_[x]) {
                depth_[y] = depth_[x] + 1;
                double c = arc_cost(y);
                pot_[y] = c - pot_[x];  // on basic arcs u_i + v_j = c_ij
                stack.push_back(y);
            }
        }
    }

    double arc_cost(int child) const {
        int p = parent_[child];
        int rn = child < N_ ? child : p;
        int cn = child < N_ ? p : child;
        return cost_.at(rn, col_ids_[cn - N_]);
    }

    void pivot(int ei, int ejj) {
        const int an = ei, bn = N_ + ejj;
        pathA_.clear();
        pathB_.clear();
        int x = an, y = bn;
        while (depth_[x] > depth_[y]) {
            pathA_.push_back(x);
            x = parent_[x];
        }
        while (depth_[y] > depth_[x]) {
            pathB_.push_back(y);
            y = parent_[y];
        }
        while (x != y) {
            pathA_.push_back(x);
            x = parent_[x];
            pathB_.push_back(y);
            y = parent_[y];
        }
        // pushing delta along an->bn: on the b side traversal runs child->parent,
        // on the a side parent->child; row-children decrease on the a side,
        // column-children decrease on the b side
        std::int64_t delta = std::numeric_limits<std::int64_t>::max();
        int leave = -1;
        bool leave_on_a = false;
        for (int z : pathB_) {
            if (z >= N_ && flow_[z] < delta) {
                delta = flow_[z];
                leave = z;
                leave_on_a = false;
            }
        }
        for (int z : pathA_) {
            if (z < N_ && flow_[z] < delta) {
                delta = flow_[z];
                leave = z;
                leave_on_a = true;
            }
        }
        if (leave < 0) throw std::runtime_error("transport simplex: unbounded pivot");
        for (int z : pathB_) flow_[z] += (z >= N_) ? -delta : delta;
        for (int z : pathA_) flow_[z] += (z < N_) ? -delta : delta;

        // re-root the detached subtree at the entering arc's endpoint
        int start = leave_on_a ? an : bn;
        int attach = leave_on_a ? bn : an;
        std::vector<int> chain;
        for (int z = start; z != leave; z = parent_[z]) chain.push_back(z);
        chain.push_back(leave);
        std::vector<std::int64_t> chain_flow(chain.size());
        for (std::size_t k = 0; k < chain.size(); ++k) chain_flow[k] = flow_[chain[k]];
        for (std::size_t k = chain.size() - 1; k >= 1; --k) {
            parent_[chain[k]] = chain[k - 1];
            flow_[chain[k]] = chain_flow[k - 1];
        }
        parent_[start] = attach;
        flow_[start] = delta;
        refresh_tree();
    }

    const CostMatrix& cost_;
    std::vector<int> col_ids_;
    int N_, m_;
    std::vector<int> parent_;
    std::vector<std::int64_t> flow_;
    std::vector<int> depth_;
    std::vector<double> pot_;
    std::vector<std::vector<int>> children_;
    std::vector<int> order_;
    std::vector<int> pathA_, pathB_;
};

}  // namespace

Coupling solve_kantorovich(const CostMatrix& cost, const std::vector<double>& col_weights) {
    if (static_cast<int>(col_weights.size()) != cost.cols)
        throw std::invalid_argument("weight count does not match cost columns");
    if (cost.rows < 1 || cost.cols < 1) throw std::invalid_argument("empty cost matrix");
    for (double x : cost.c)
        if (!std::isfinite(x)) throw std::invalid_argument("cost has non-finite entry");
    double wsum = 0.0;
    for (double w : col_weights) {
        if (w < 0.0) throw std::invalid_argument("negative column weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw std::invalid_argument("column weights must sum to 1");

    // zero-weight columns carry no mass; drop them from the network
    std::vector<int> active;
    std::vector<double> w;
    for (int j = 0; j < cost.cols; ++j) {
        if (col_weights[j] > 0.0) {
            active.push_back(j);
            w.push_back(col_weights[j] / wsum);
        }
    }

    const int N = cost.rows;
    std::vector<double> rw(N, 1.0 / N);
    auto supply = scale_masses(rw, kMassScale);
    auto demand = scale_masses(w, kMassScale);

    TransportSimplex simplex(cost, active, supply, demand);
    simplex.run();
    return simplex.extract();
}

}  // namespace mfq
