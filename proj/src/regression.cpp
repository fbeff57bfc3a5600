#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "manifoldq/regression.hpp"

namespace mfq {

CovariateSpace CovariateSpace::euclidean(int dim) {
    if (dim < 1) throw std::invalid_argument("Euclidean covariate dimension must be >= 1");
    CovariateSpace s;
    s.kind = Kind::Euclidean;
    s.dim = dim;
    return s;
}

CovariateSpace CovariateSpace::on_manifold(ManifoldSpec spec) {
    CovariateSpace s;
    s.kind = Kind::Manifold;
    s.manifold = std::move(spec);
    return s;
}

double CovariateSpace::distance(const Covariate& a, const Covariate& b) const {
    if (kind == Kind::Euclidean) {
        const auto& va = std::get<std::vector<double>>(a);
        const auto& vb = std::get<std::vector<double>>(b);
        if (static_cast<int>(va.size()) != dim || static_cast<int>(vb.size()) != dim)
            throw DimensionError("covariate dimension mismatch");
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += (va[i] - vb[i]) * (va[i] - vb[i]);
        return std::sqrt(s);
    }
    return geodesic_distance(manifold, std::get<ManifoldPoint>(a), std::get<ManifoldPoint>(b));
}

WeightFunction WeightFunction::knn(int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    WeightFunction w;
    w.kind = Kind::Knn;
    w.k = k;
    return w;
}

WeightFunction WeightFunction::kernel_fn(double bandwidth, KernelType type) {
    if (bandwidth <= 0.0) throw std::invalid_argument("bandwidth must be positive");
    WeightFunction w;
    w.kind = Kind::Kernel;
    w.bandwidth = bandwidth;
    w.kernel = type;
    return w;
}

std::vector<double> knn_weights(const CovariateSpace& space, const Covariate& x,
                                const std::vector<Covariate>& covariates, int k) {
    const int n = static_cast<int>(covariates.size());
    if (k < 1 || k > n) throw std::invalid_argument("k must lie in [1, n]");
    std::vector<std::pair<double, int>> d(n);
    for (int j = 0; j < n; ++j) d[j] = {space.distance(x, covariates[j]), j};
    // distance ties broken by smallest index
    std::stable_sort(d.begin(), d.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> w(n, 0.0);
    for (int s = 0; s < k; ++s) w[d[s].second] = 1.0 / k;
    return w;
}

std::vector<double> kernel_weights(const CovariateSpace& space, const Covariate& x,
                                   const std::vector<Covariate>& covariates, double h,
                                   WeightFunction::KernelType type) {
    if (h <= 0.0) throw std::invalid_argument("bandwidth must be positive");
    const int n = static_cast<int>(covariates.size());
    std::vector<double> w(n, 0.0);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        double u = space.distance(x, covariates[j]) / h;
        if (u > 1.0) continue;  // support [0,1], boundary inclusive
        double kv = type == WeightFunction::KernelType::TrimmedGaussian ? std::exp(-u * u) : 1.0;
        w[j] = kv;
        sum += kv;
    }
    if (sum <= 0.0) throw EmptyWindowError("no covariate within bandwidth of the query");
    for (auto& v : w) v /= sum;
    return w;
}

std::vector<double> compute_weights(const CovariateSpace& space, const Covariate& x,
                                    const std::vector<Covariate>& covariates,
                                    const WeightFunction& wf) {
    if (wf.kind == WeightFunction::Kind::Knn)
        return knn_weights(space, x, covariates, wf.k);
    return kernel_weights(space, x, covariates, wf.bandwidth, wf.kernel);
}

ManifoldPoint conditional_frechet_mean(const ManifoldSpec& spec,
                                       const std::vector<ManifoldPoint>& responses,
                                       const std::vector<double>& weights) {
    return frechet_mean(spec, responses, weights);
}

ConditionalFit fit_conditional(const ManifoldSpec& spec, const CovariateSpace& cov_space,
                               const std::vector<Covariate>& covariates,
                               const std::vector<ManifoldPoint>& responses, const Covariate& x,
                               const WeightFunction& wf, const CenterRule& rule, int N_R, int N_S,
                               int N_0, std::uint64_t seed, GridMode mode) {
    const int n = static_cast<int>(responses.size());
    if (n == 0 || static_cast<int>(covariates.size()) != n)
        throw std::invalid_argument("covariate/response count mismatch");
    const int N = N_0 + N_R * N_S;
    for (const auto& y : responses) validate_point(spec, y);

    ConditionalFit fit;
    fit.spec = spec;
    fit.responses = responses;
    fit.weights = compute_weights(cov_space, x, covariates, wf);
    fit.theta_hat = conditional_frechet_mean(spec, responses, fit.weights);

    CenterSpec center;
    if (rule.kind == CenterRule::Kind::FixedCenter) {
        center = rule.fixed;
        fit.pole = center.kind == CenterSpec::Kind::TorusEquator ? ManifoldPoint{} : center.point;
    } else {
        // Step 1: transport the reference uniform grid onto the weighted
        // sample, then read the pole off the column of the support point
        // nearest the conditional mean.
        std::vector<ManifoldPoint> g0 = uniform_sample(spec, N, derive_seed(seed, 1));
        Coupling plan = solve_kantorovich(cost_matrix(spec, g0, responses), fit.weights);

        int jstar = -1;
        double dbest = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (fit.weights[j] <= 0.0) continue;
            double d = geodesic_distance(spec, responses[j], fit.theta_hat);
            if (d < dbest) {
                dbest = d;
                jstar = j;
            }
        }
        if (jstar < 0) throw EmptyWindowError("weight vector has empty support");

        int ell = -1;
        double mbest = -1.0;
        double tie_d = std::numeric_limits<double>::infinity();
        for (const auto& e : plan.entries) {
            if (e.j != jstar) continue;
            double d = geodesic_distance(spec, g0[e.i], fit.theta_hat);
            if (e.mass > mbest + 1e-15 ||
                (std::abs(e.mass - mbest) <= 1e-15 && d < tie_d)) {
                mbest = e.mass;
                tie_d = d;
                ell = e.i;
            }
        }
        if (ell < 0) throw std::runtime_error("empty transport column for the support point");
        ManifoldPoint gstar = g0[ell];
        if (rule.kind == CenterRule::Kind::FrechetCap) {
            center = CenterSpec::cap(gstar);
        } else {
            if (spec.factors[rule.factor] == 1) {
                double a = std::atan2(gstar.f[rule.factor][1], gstar.f[rule.factor][0]);
                center = CenterSpec::torus_equator(rule.factor, a);
            } else {
                center = CenterSpec::strip(rule.factor, gstar);
            }
        }
        fit.pole = std::move(gstar);
    }

    fit.grid = build_grid(spec, center, N_R, N_S, N_0, derive_seed(seed, 2), mode);
    fit.coupling = solve_kantorovich(cost_matrix(spec, fit.grid.points, responses), fit.weights);

    // Step-2 conditional quantile map: per grid row, the sample point with
    // maximal plan mass; ties resolved by proximity to the ring-0 grid
    // points, then by sample index.
    std::vector<ManifoldPoint> ring0;
    for (int g = 0; g < fit.grid.size(); ++g)
        if (fit.grid.ring_index[g] == 0) ring0.push_back(fit.grid.points[g]);
    auto center_dist = [&](int j) {
        if (ring0.empty()) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : ring0)
            best = std::min(best, geodesic_distance(spec, responses[j], c));
        return best;
    };

    fit.qmap.assign(N, -1);
    std::vector<double> best_mass(N, -1.0), best_tie(N, 0.0);
    for (const auto& e : fit.coupling.entries) {
        int i = e.i, j = e.j;
        if (fit.qmap[i] < 0 || e.mass > best_mass[i] + 1e-15) {
            fit.qmap[i] = j;
            best_mass[i] = e.mass;
            best_tie[i] = center_dist(j);
        } else if (std::abs(e.mass - best_mass[i]) <= 1e-15) {
            double d = center_dist(j);
            if (d < best_tie[i] - 1e-15 ||
                (std::abs(d - best_tie[i]) <= 1e-15 && j < fit.qmap[i])) {
                fit.qmap[i] = j;
                best_mass[i] = e.mass;
                best_tie[i] = d;
            }
        }
    }
    for (int i = 0; i < N; ++i)
        if (fit.qmap[i] < 0) throw std::runtime_error("grid row received no mass");

    std::vector<int> images = fit.qmap;
    std::sort(images.begin(), images.end());
    fit.distinct_images =
        static_cast<int>(std::unique(images.begin(), images.end()) - images.begin());
    return fit;
}

namespace {

std::vector<ManifoldPoint> dedupe(std::vector<ManifoldPoint> pts) {
    std::vector<std::vector<double>> flat;
    std::vector<ManifoldPoint> out;
    for (auto& p : pts) {
        auto f = p.flat();
        bool seen = false;
        for (const auto& g : flat) {
            double m = 0.0;
            for (std::size_t c = 0; c < f.size(); ++c) m = std::max(m, std::abs(f[c] - g[c]));
            if (m < 1e-12) {
                seen = true;
                break;
            }
        }
        if (!seen) {
            flat.push_back(std::move(f));
            out.push_back(std::move(p));
        }
    }
    return out;
}

}  // namespace

std::vector<ManifoldPoint> extract_conditional_contour(const ConditionalFit& fit, int r) {
    if (r < 0 || r > fit.grid.nR || (r == 0 && fit.grid.n0 == 0))
        throw std::invalid_argument("contour order out of range");
    std::vector<ManifoldPoint> pts;
    for (int g = 0; g < fit.grid.size(); ++g)
        if (fit.grid.ring_index[g] == r) pts.push_back(fit.responses[fit.qmap[g]]);
    return dedupe(std::move(pts));
}

std::vector<ManifoldPoint> extract_conditional_region(const ConditionalFit& fit, int r) {
    if (r < 0 || r > fit.grid.nR || (r == 0 && fit.grid.n0 == 0))
        throw std::invalid_argument("region order out of range");
    std::vector<ManifoldPoint> pts;
    for (int g = 0; g < fit.grid.size(); ++g)
        if (fit.grid.ring_index[g] <= r) pts.push_back(fit.responses[fit.qmap[g]]);
    return dedupe(std::move(pts));
}

}  // namespace mfq
