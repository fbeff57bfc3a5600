// End-to-end acceptance checks for the quantile-contour pipeline. Each check
// prints a single PASS/FAIL line; the process exits nonzero if any fails.
//
// Independent oracles used here: exhaustive permutation search (assignment),
// successive-shortest-paths min-cost flow (Kantorovich), closed-form latitude
// profiles, and large-sample population proxies.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "manifoldq/io.hpp"
#include "manifoldq/presets.hpp"
#include "manifoldq/regression.hpp"

using namespace mfq;

namespace {

const double kPi = 3.14159265358979323846;
constexpr std::int64_t kMassScale = 1'000'000'000;

int g_failures = 0;

class Check {
public:
    explicit Check(int number, std::string label)
        : number_(number), label_(std::move(label)), start_(clock::now()) {}

    void report(bool ok, const std::string& detail = "") {
        auto secs = std::chrono::duration<double>(clock::now() - start_).count();
        std::ostringstream line;
        line << "criterion " << (number_ < 10 ? " " : "") << number_ << " ["
             << (ok ? "PASS" : "FAIL") << "] " << label_;
        if (!detail.empty()) line << " -- " << detail;
        line.setf(std::ios::fixed);
        line.precision(1);
        line << " (" << secs << " s)";
        std::cout << line.str() << std::endl;
        if (!ok) ++g_failures;
    }

private:
    using clock = std::chrono::steady_clock;
    int number_;
    std::string label_;
    clock::time_point start_;
};

ManifoldPoint s2_point(double x, double y, double z) {
    ManifoldPoint p;
    p.f.push_back({x, y, z});
    return p;
}

double brute_force_min(const CostMatrix& cm) {
    std::vector<int> idx(cm.rows);
    std::iota(idx.begin(), idx.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int i = 0; i < cm.rows; ++i) total += cm.at(i, idx[i]);
        best = std::min(best, total);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

// Largest-remainder rounding of a simplex vector to integers summing to
// `total`; mirrors the integerization used by the production solver so the
// oracle works on the identical discrete problem.
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

// Successive-shortest-paths min-cost flow on the dense bipartite transport
// graph (Bellman-Ford potentials, bottleneck augmentation).
double ssp_transport(const CostMatrix& cm, const std::vector<std::int64_t>& supply,
                     const std::vector<std::int64_t>& demand) {
    const int N = cm.rows, n = cm.cols;
    const int src = N + n, dst = N + n + 1, V = N + n + 2;
    struct Arc {
        int to;
        std::int64_t cap;
        double cost;
        int rev;
    };
    std::vector<std::vector<Arc>> g(V);
    auto add = [&](int a, int b, std::int64_t cap, double cost) {
        g[a].push_back({b, cap, cost, static_cast<int>(g[b].size())});
        g[b].push_back({a, 0, -cost, static_cast<int>(g[a].size()) - 1});
    };
    std::int64_t need = 0;
    for (int i = 0; i < N; ++i) {
        add(src, i, supply[i], 0.0);
        need += supply[i];
    }
    for (int j = 0; j < n; ++j) add(N + j, dst, demand[j], 0.0);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < n; ++j) add(i, N + j, supply[i], cm.at(i, j));

    double total = 0.0;
    while (need > 0) {
        std::vector<double> dist(V, std::numeric_limits<double>::infinity());
        std::vector<int> pv(V, -1), pe(V, -1);
        dist[src] = 0.0;
        for (int it = 0; it < V; ++it) {
            bool changed = false;
            for (int u = 0; u < V; ++u) {
                if (!std::isfinite(dist[u])) continue;
                for (std::size_t e = 0; e < g[u].size(); ++e) {
                    const Arc& a = g[u][e];
                    if (a.cap > 0 && dist[u] + a.cost < dist[a.to] - 1e-15) {
                        dist[a.to] = dist[u] + a.cost;
                        pv[a.to] = u;
                        pe[a.to] = static_cast<int>(e);
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }
        if (!std::isfinite(dist[dst])) return std::numeric_limits<double>::quiet_NaN();
        std::int64_t push = need;
        for (int v = dst; v != src; v = pv[v]) push = std::min(push, g[pv[v]][pe[v]].cap);
        for (int v = dst; v != src; v = pv[v]) {
            Arc& a = g[pv[v]][pe[v]];
            a.cap -= push;
            g[v][a.rev].cap += push;
            total += static_cast<double>(push) * a.cost;
        }
        need -= push;
    }
    return total;
}

std::set<std::vector<double>> flat_set(const std::vector<ManifoldPoint>& pts) {
    std::set<std::vector<double>> out;
    for (const auto& p : pts) out.insert(p.flat());
    return out;
}

bool is_subset(const std::vector<ManifoldPoint>& small, const std::vector<ManifoldPoint>& big) {
    auto bs = flat_set(big);
    for (const auto& p : small)
        if (!bs.count(p.flat())) return false;
    return true;
}

// --------------------------------------------------------------------------

void check_assignment_exactness() {
    Check c(1, "assignment objective equals exhaustive search (n = 2..8, 200 reps each)");
    auto s2 = ManifoldSpec::parse("s2");
    int bad = 0, total = 0;
    double worst = 0.0;
    for (int n = 2; n <= 8; ++n) {
        for (int rep = 0; rep < 200; ++rep) {
            std::uint64_t seed = 1000 * static_cast<std::uint64_t>(n) + rep;
            auto ys = uniform_sample(s2, n, 2 * seed);
            auto zs = uniform_sample(s2, n, 2 * seed + 1);
            auto cm = cost_matrix(s2, ys, zs);
            auto plan = solve_assignment(cm);
            double diff = std::abs(plan.objective - brute_force_min(cm));
            worst = std::max(worst, diff);
            if (diff > 1e-12) ++bad;
            ++total;
        }
    }
    std::ostringstream d;
    d << total << " instances, worst gap " << worst;
    c.report(bad == 0, d.str());
}

void check_kantorovich() {
    Check c(2, "unbalanced plans match a min-cost-flow oracle (100 instances)");
    auto s2 = ManifoldSpec::parse("s2");
    std::mt19937_64 rng(4242);
    int bad = 0;
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        int N = 2 + static_cast<int>(rng() % 5);  // 2..6
        int n = 1 + static_cast<int>(rng() % 5);  // 1..5
        auto rows = uniform_sample(s2, N, rng());
        auto cols = uniform_sample(s2, n, rng());
        auto cm = cost_matrix(s2, rows, cols);

        std::vector<double> w(n);
        double ws = 0.0;
        std::exponential_distribution<double> ex(1.0);
        for (auto& x : w) {
            x = ex(rng) + 0.05;
            ws += x;
        }
        for (auto& x : w) x /= ws;

        auto cp = solve_kantorovich(cm, w);

        auto supply = scale_masses(std::vector<double>(N, 1.0 / N), kMassScale);
        auto demand = scale_masses(w, kMassScale);
        double oracle = ssp_transport(cm, supply, demand) / static_cast<double>(kMassScale);
        double gap = std::abs(cp.objective - oracle);
        worst = std::max(worst, gap);
        if (gap > 1e-9) ++bad;

        std::vector<double> rm(N, 0.0), colm(n, 0.0);
        for (const auto& e : cp.entries) {
            rm[e.i] += e.mass;
            colm[e.j] += e.mass;
        }
        for (int i = 0; i < N; ++i)
            if (std::abs(rm[i] - 1.0 / N) > 1e-9) ++bad;
        for (int j = 0; j < n; ++j)
            if (std::abs(colm[j] - w[j]) > 1e-9) ++bad;
    }
    std::ostringstream d;
    d << "worst objective gap " << worst;
    c.report(bad == 0, d.str());
}

void check_monotonicity() {
    Check c(3, "optimal plans are cyclically monotone (n = 50, 1000 cycles, k <= 4)");
    auto s2 = ManifoldSpec::parse("s2");
    double worst = 0.0;
    for (int inst = 0; inst < 5; ++inst) {
        auto ys = uniform_sample(s2, 50, 600 + inst);
        auto zs = uniform_sample(s2, 50, 700 + inst);
        auto plan = solve_assignment(cost_matrix(s2, ys, zs));
        std::vector<std::pair<ManifoldPoint, ManifoldPoint>> pairs;
        for (int i = 0; i < 50; ++i) pairs.emplace_back(ys[i], zs[plan.perm[i]]);
        auto rep = check_cyclical_monotonicity(s2, pairs, 4, 1000, 800 + inst);
        worst = std::max(worst, rep.max_violation);
    }
    std::ostringstream d;
    d << "max sampled violation " << worst;
    c.report(worst <= 1e-9, d.str());
}

void check_latitude_profile() {
    Check c(4, "latitude profile matches closed forms");
    bool ok = true;
    double worst2 = 0.0;
    for (int t = 1; t <= 99; ++t) {
        double tau = t / 100.0;
        worst2 = std::max(worst2,
                          std::abs(latitude_profile(2, tau) - std::acos(1 - 2 * tau) / kPi));
    }
    ok = ok && worst2 < 1e-9;
    for (double tau : {0.0, 0.123, 0.5, 0.87, 1.0})
        ok = ok && std::abs(latitude_profile(1, tau) - tau) < 1e-12;
    for (int p = 1; p <= 5; ++p) ok = ok && std::abs(latitude_profile(p, 0.5) - 0.5) < 1e-10;
    std::ostringstream d;
    d << "p=2 worst error " << worst2;
    c.report(ok, d.str());
}

void check_rank_counts() {
    Check c(5, "rank multiset is {0^5, 1^50, ..., 10^50} on every preset at n = 505");
    std::vector<std::string> bad;
    for (const auto& name : {"T1", "T2", "T3", "Ta", "Tb", "Tc",
                             "S1", "S2", "S3", "Sa", "Sb", "Sc"}) {
        auto spec = preset_manifold(name);
        auto sample = sample_preset(name, 505, 910);
        auto fit = fit_quantiles(spec, sample, CenterRule::frechet_cap(), 10, 50, 5, 911);
        std::map<int, int> counts;
        for (int r : fit.ranks) counts[r]++;
        bool ok = counts[0] == 5;
        for (int r = 1; r <= 10; ++r) ok = ok && counts[r] == 50;
        if (!ok) bad.push_back(name);
    }
    std::ostringstream d;
    d << "12 presets";
    if (!bad.empty()) {
        d << ", failing:";
        for (const auto& n : bad) d << ' ' << n;
    }
    c.report(bad.empty(), d.str());
}

void check_distribution_freeness() {
    Check c(6, "rank law of one observation is distribution-free (n = 13, 2000 seeds)");
    auto s2 = ManifoldSpec::parse("s2");
    const int M = 2000;
    auto rank_law = [&](bool use_vmf) {
        std::vector<double> law(4, 0.0);
        for (int m = 0; m < M; ++m) {
            std::vector<ManifoldPoint> sample;
            if (use_vmf) {
                VmfParams vp;
                vp.mu = s2_point(0, 0, 1);
                vp.kappa = 5.0;
                sample = vmf_sample(vp, 13, 20000 + m);
            } else {
                sample = uniform_sample(s2, 13, 20000 + m);
            }
            auto fit = fit_quantiles(s2, sample, CenterRule::frechet_cap(), 3, 4, 1, 30000 + m);
            law[fit.ranks[0]] += 1.0 / M;
        }
        return law;
    };
    auto lu = rank_law(false);
    auto lv = rank_law(true);
    double tv = 0.0;
    for (int j = 0; j <= 3; ++j) tv += 0.5 * std::abs(lu[j] - lv[j]);
    bool ok = tv < 0.03;
    double worst_dev = 0.0;
    for (int j = 1; j <= 3; ++j) {
        worst_dev = std::max({worst_dev, std::abs(lu[j] - 4.0 / 13), std::abs(lv[j] - 4.0 / 13)});
    }
    ok = ok && worst_dev < 0.03;
    std::ostringstream d;
    d << "TV " << tv << ", worst |P(R=j) - 4/13| " << worst_dev;
    c.report(ok, d.str());
}

void check_glivenko_cantelli() {
    Check c(7, "max transport displacement shrinks for uniform data (n = 121, 1009, 4001)");
    auto s2 = ManifoldSpec::parse("s2");
    struct Regime {
        int n, nR, nS;
    };
    std::vector<Regime> regimes = {{121, 4, 30}, {1009, 12, 84}, {4001, 40, 100}};
    std::vector<double> medians;
    for (const auto& rg : regimes) {
        std::vector<double> maxima;
        for (int s = 0; s < 20; ++s) {
            auto sample = uniform_sample(s2, rg.n, 40000 + 100 * rg.n + s);
            auto fit = fit_quantiles(s2, sample, CenterRule::frechet_cap(), rg.nR, rg.nS, 1,
                                     50000 + s);
            double worst = 0.0;
            for (int i = 0; i < rg.n; ++i)
                worst = std::max(worst, geodesic_distance(s2, sample[i],
                                                          fit.grid.points[fit.assignment[i]]));
            maxima.push_back(worst);
        }
        std::nth_element(maxima.begin(), maxima.begin() + 10, maxima.end());
        medians.push_back(maxima[10]);
    }
    bool ok = medians[0] > medians[1] && medians[1] > medians[2] && medians[2] < 0.35;
    std::ostringstream d;
    d << "median max displacement " << medians[0] << " > " << medians[1] << " > " << medians[2]
      << " rad";
    c.report(ok, d.str());
}

void check_region_content() {
    Check c(8, "region r holds about r/41 of fresh mass (S1, n = 4001, r = 10, 20, 30)");
    auto s2 = ManifoldSpec::parse("s2");
    auto sample = sample_preset("S1", 4001, 61000);
    auto fit = fit_quantiles(s2, sample, CenterRule::frechet_cap(), 40, 100, 1, 61001);
    auto eval = sample_preset("S1", 100000, 61002);

    // membership proxy: an evaluation point belongs to region r when its
    // nearest fitted sample point has rank <= r
    std::vector<int> nn_rank(eval.size());
    for (std::size_t e = 0; e < eval.size(); ++e) {
        double best = -2.0;
        int arg = 0;
        const auto& q = eval[e].f[0];
        for (std::size_t i = 0; i < sample.size(); ++i) {
            const auto& p = sample[i].f[0];
            double dot = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
            if (dot > best) {
                best = dot;
                arg = static_cast<int>(i);
            }
        }
        nn_rank[e] = fit.ranks[arg];
    }
    bool ok = true;
    std::ostringstream d;
    for (int r : {10, 20, 30}) {
        int inside = 0;
        for (int rk : nn_rank)
            if (rk <= r) ++inside;
        double frac = inside / static_cast<double>(eval.size());
        ok = ok && std::abs(frac - r / 41.0) < 0.05;
        d << "r=" << r << ": " << frac << " (target " << r / 41.0 << ") ";
    }
    c.report(ok, d.str());
}

void check_figure_regimes() {
    Check c(9, "full-scale contour and regression recipes run with nested output");
    bool ok = true;
    std::ostringstream d;

    // unconditional, cap: 4001 points, 40 rings of 100
    {
        auto t2 = ManifoldSpec::parse("t2");
        auto sample = sample_preset("T3", 4001, 71000);
        auto fit = fit_quantiles(t2, sample, CenterRule::frechet_cap(), 40, 100, 1, 71001);
        std::vector<int> rs = {0, 5, 10, 20, 28};
        for (std::size_t k = 0; k + 1 < rs.size(); ++k)
            ok = ok && is_subset(extract_region(fit, rs[k]), extract_region(fit, rs[k + 1]));
    }
    // unconditional, strip: 41 center copies, 20 bands of 198
    {
        auto s2 = ManifoldSpec::parse("s2");
        auto sample = sample_preset("Sb", 4001, 72000);
        auto fit = fit_quantiles(s2, sample, CenterRule::frechet_strip(0), 20, 198, 41, 72001);
        std::vector<int> rs = {0, 5, 9, 12, 16};
        for (std::size_t k = 0; k + 1 < rs.size(); ++k)
            ok = ok && is_subset(extract_region(fit, rs[k]), extract_region(fit, rs[k + 1]));
    }
    d << "unconditional nesting " << (ok ? "ok" : "BROKEN");

    // conditional, torus response: n = 10^4 draws, reference grid of 2001,
    // trimmed-Gaussian window of pi/10 at a fixed covariate
    ManifoldPoint xs;
    xs.f.push_back({0.75, 0.65, std::sqrt(0.015)});
    {
        auto pre = regression_preset("TS1");
        auto data = sample_regression_preset("TS1", 10000, 73000);
        auto wf = WeightFunction::kernel_fn(kPi / 10);
        auto cap = fit_conditional(pre.response_spec, pre.covariate_space, data.x, data.y,
                                   Covariate{xs}, wf, CenterRule::frechet_cap(), 20, 100, 1,
                                   73001);
        auto strip = fit_conditional(pre.response_spec, pre.covariate_space, data.x, data.y,
                                     Covariate{xs}, wf, CenterRule::frechet_strip(0), 20, 100, 24,
                                     73002);
        std::vector<int> rs = {0, 5, 8, 12, 16};
        bool nest = true;
        for (std::size_t k = 0; k + 1 < rs.size(); ++k) {
            nest = nest && is_subset(extract_conditional_region(cap, rs[k]),
                                     extract_conditional_region(cap, rs[k + 1]));
            nest = nest && is_subset(extract_conditional_region(strip, rs[k]),
                                     extract_conditional_region(strip, rs[k + 1]));
        }
        ok = ok && nest;
        d << ", conditional nesting " << (nest ? "ok" : "BROKEN");
    }

    // conditional accuracy: sphere response at a circle covariate; compare
    // the r = 12 contour against a large-sample proxy of the conditional law
    {
        auto pre = regression_preset("SS1");
        ManifoldPoint xc;
        xc.f.push_back({0.6, 0.8});
        std::vector<double> dists;
        for (int s = 0; s < 10; ++s) {
            auto data = sample_regression_preset("SS1", 10000, 74000 + s);
            auto fit = fit_conditional(pre.response_spec, pre.covariate_space, data.x, data.y,
                                       Covariate{xc}, WeightFunction::kernel_fn(kPi / 10),
                                       CenterRule::frechet_cap(), 20, 100, 1, 74100 + s);
            auto contour = extract_conditional_contour(fit, 12);

            // proxy: empirical cap of matching content around the proxy mean
            auto draws = sample_conditional("SS1", Covariate{xc}, 100000, 74200 + s);
            auto mean = frechet_mean(pre.response_spec,
                                     {draws.begin(), draws.begin() + 2000});
            std::vector<double> rad(draws.size());
            for (std::size_t i = 0; i < draws.size(); ++i)
                rad[i] = geodesic_distance(pre.response_spec, mean, draws[i]);
            double tau = (1.0 + 12 * 100) / 2001.0;
            auto cut = rad.begin() + static_cast<std::ptrdiff_t>(tau * rad.size());
            std::nth_element(rad.begin(), cut, rad.end());
            double delta = *cut;
            auto frame = tangent_frame(mean.f[0]);
            std::vector<ManifoldPoint> proxy;
            for (int k = 0; k < 720; ++k) {
                double phi = 2 * kPi * k / 720;
                TangentVector v;
                v.base = mean;
                v.f.push_back({0.0, 0.0, 0.0});
                for (int cmp = 0; cmp < 3; ++cmp)
                    v.f[0][cmp] =
                        delta * (std::cos(phi) * frame[0][cmp] + std::sin(phi) * frame[1][cmp]);
                proxy.push_back(exp_map(pre.response_spec, mean, v));
            }
            dists.push_back(hausdorff_distance(pre.response_spec, contour, proxy));
        }
        std::nth_element(dists.begin(), dists.begin() + 5, dists.end());
        ok = ok && dists[5] < 0.25;
        d << ", conditional d_H median " << dists[5] << " rad";
    }
    c.report(ok, d.str());
}

void check_uniform_weight_reduction() {
    Check c(10, "k-NN with k = n reproduces the unconditional contours");
    auto t2 = ManifoldSpec::parse("t2");
    const int n = 1 + 5 * 40;
    auto sample = sample_preset("T2", n, 81000);
    std::vector<Covariate> xs;
    for (int i = 0; i < n; ++i) xs.push_back(Covariate{std::vector<double>{i * 0.1}});

    const std::uint64_t seed = 81001;
    auto ufit = fit_quantiles(t2, sample, CenterRule::frechet_cap(), 5, 40, 1, seed);
    auto cfit = fit_conditional(t2, CovariateSpace::euclidean(1), xs, sample,
                                Covariate{std::vector<double>{0.0}}, WeightFunction::knn(n),
                                CenterRule::frechet_cap(), 5, 40, 1, seed);
    double worst = 0.0;
    for (int r = 1; r <= 5; ++r)
        worst = std::max(worst, hausdorff_distance(t2, extract_contour(ufit, r),
                                                   extract_conditional_contour(cfit, r)));
    std::ostringstream d;
    d << "worst contour d_H " << worst;
    c.report(worst < 1e-9, d.str());
}

void check_comets() {
    Check c(11, "orbital-element fixture: 3901 points, cap and strip contours");
    auto t2 = ManifoldSpec::parse("t2");
    auto data = io::read_comets_csv(std::string(MFQ_DATA_DIR) + "/comets.csv");
    bool ok = data.records.size() == 3901;

    std::vector<ManifoldPoint> pts;
    for (const auto& r : data.records)
        pts.push_back(point_from_angles(t2, {r.omega, r.Omega}));

    auto cap = fit_quantiles(t2, pts, CenterRule::frechet_cap(), 39, 100, 1, 90001);
    auto strip = fit_quantiles(t2, pts, CenterRule::frechet_strip(0), 40, 96, 61, 90002);
    ok = ok && cap.sample.size() == 3901 && strip.sample.size() == 3901;

    for (int r : {0, 10, 18, 26, 34}) {
        ok = ok && !extract_contour(cap, r).empty();
        ok = ok && !extract_contour(strip, r).empty();
    }

    double omega0 = angles_from_point(t2, extract_contour(cap, 0)[0])[0];
    ok = ok && omega0 >= 1.0 && omega0 <= 2.0;

    std::ostringstream d;
    d << "center perihelion argument " << omega0 << " rad";
    c.report(ok, d.str());
}

}  // namespace

int main() {
    check_assignment_exactness();
    check_kantorovich();
    check_monotonicity();
    check_latitude_profile();
    check_rank_counts();
    check_distribution_freeness();
    check_glivenko_cantelli();
    check_region_content();
    check_figure_regimes();
    check_uniform_weight_reduction();
    check_comets();
    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all 11 criteria passed" << std::endl;
    return 0;
}
