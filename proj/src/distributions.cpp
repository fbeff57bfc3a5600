#include "manifoldq/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mfq {

namespace {

constexpr double kPi = std::numbers::pi;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> unit_gaussian(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(d);
    double nn = 0.0;
    do {
        for (auto& x : v) x = gauss(rng);
        nn = 0.0;
        for (double x : v) nn += x * x;
    } while (nn < 1e-24);
    nn = std::sqrt(nn);
    for (auto& x : v) x /= nn;
    return v;
}

// Wood (1994) latitude rejection, valid for any sphere S^p (ambient m = p+1).
std::vector<double> vmf_draw(const std::vector<double>& mu, double kappa, std::mt19937_64& rng) {
    const int m = static_cast<int>(mu.size());
    if (kappa <= 0.0) return unit_gaussian(m, rng);

    const double mm1 = static_cast<double>(m - 1);
    const double b = (-2.0 * kappa + std::sqrt(4.0 * kappa * kappa + mm1 * mm1)) / mm1;
    const double x0 = (1.0 - b) / (1.0 + b);
    const double c = kappa * x0 + mm1 * std::log(1.0 - x0 * x0);

    std::gamma_distribution<double> gamma_half(mm1 / 2.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double w = 0.0;
    for (;;) {
        double g1 = gamma_half(rng), g2 = gamma_half(rng);
        double z = g1 / (g1 + g2);
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        double u = unif(rng);
        if (kappa * w + mm1 * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
    }

    auto frame = tangent_frame(mu);
    std::vector<double> dir;
    if (m == 2) {
        std::uniform_real_distribution<double> sign(0.0, 1.0);
        dir = {sign(rng) < 0.5 ? -1.0 : 1.0};
    } else {
        dir = unit_gaussian(m - 1, rng);
    }
    std::vector<double> y(m);
    const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
    for (int i = 0; i < m; ++i) {
        double tang = 0.0;
        for (int j = 0; j < m - 1; ++j) tang += frame[j][i] * dir[j];
        y[i] = w * mu[i] + s * tang;
    }
    double nn = std::sqrt(dot(y, y));
    for (auto& x : y) x /= nn;
    return y;
}

double von_mises_angle(double mu, double kappa, std::mt19937_64& rng) {
    std::vector<double> m2 = {std::cos(mu), std::sin(mu)};
    auto y = vmf_draw(m2, kappa, rng);
    return std::atan2(y[1], y[0]);
}

double log_sphere_area(int p) {
    // surface area of S^p in R^{p+1}: 2 pi^{(p+1)/2} / Gamma((p+1)/2)
    return std::log(2.0) + ((p + 1) / 2.0) * std::log(kPi) - std::lgamma((p + 1) / 2.0);
}

double bsvm_energy(const BsvmParams& p, double phi1, double phi2) {
    return p.kappa1 * std::cos(phi1 - p.mu1) + p.kappa2 * std::cos(phi2 - p.mu2) +
           p.lambda * std::sin(phi1 - p.mu1) * std::sin(phi2 - p.mu2);
}

double bsvm_log_partition(const BsvmParams& p, int grid) {
    // periodic rectangle rule over [-pi,pi)^2
    double emax = std::abs(p.kappa1) + std::abs(p.kappa2) + std::abs(p.lambda);
    double acc = 0.0;
    const double h = 2.0 * kPi / grid;
    for (int i = 0; i < grid; ++i) {
        double phi1 = -kPi + (i + 0.5) * h;
        for (int j = 0; j < grid; ++j) {
            double phi2 = -kPi + (j + 0.5) * h;
            acc += std::exp(bsvm_energy(p, phi1, phi2) - emax);
        }
    }
    return emax + std::log(acc) + 2.0 * std::log(h);
}

ManifoldPoint sample_component(const ComponentParams& comp, std::mt19937_64& rng);

}  // namespace

std::vector<std::vector<double>> tangent_frame(const std::vector<double>& mu) {
    const int m = static_cast<int>(mu.size());
    std::vector<double> u(m, 0.0);
    u[m - 1] = 1.0;
    for (int i = 0; i < m; ++i) u[i] -= mu[i];
    double un = std::sqrt(dot(u, u));
    std::vector<std::vector<double>> cols;
    if (un < 1e-12) {
        // mu == e_m, frame is the first m-1 standard basis vectors
        for (int j = 0; j < m - 1; ++j) {
            std::vector<double> e(m, 0.0);
            e[j] = 1.0;
            cols.push_back(std::move(e));
        }
        return cols;
    }
    for (auto& x : u) x /= un;
    for (int j = 0; j < m - 1; ++j) {
        std::vector<double> e(m, 0.0);
        e[j] = 1.0;
        double c = 2.0 * u[j];
        for (int i = 0; i < m; ++i) e[i] -= c * u[i];
        cols.push_back(std::move(e));
    }
    return cols;
}

std::vector<ManifoldPoint> vmf_sample(const VmfParams& params, int n, std::uint64_t seed) {
    if (params.mu.num_factors() != 1) throw DimensionError("vMF requires a single sphere factor");
    std::mt19937_64 rng(seed);
    std::vector<ManifoldPoint> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        ManifoldPoint y;
        y.f.push_back(vmf_draw(params.mu.f[0], params.kappa, rng));
        out.push_back(std::move(y));
    }
    return out;
}

double vmf_logdensity(const VmfParams& params, const ManifoldPoint& y) {
    const int p = static_cast<int>(params.mu.f[0].size()) - 1;
    const double kappa = params.kappa;
    if (kappa < 1e-12) return -log_sphere_area(p);
    double logc;
    if (p == 2) {
        // C = kappa / (4 pi sinh kappa), written to stay finite for large kappa
        logc = std::log(kappa) - std::log(4.0 * kPi) - kappa -
               std::log1p(-std::exp(-2.0 * kappa)) + std::log(2.0);
    } else {
        const double nu = (p - 1) / 2.0;
        logc = nu * std::log(kappa) - ((p + 1) / 2.0) * std::log(2.0 * kPi) -
               std::log(std::cyl_bessel_i(nu, kappa));
    }
    return logc + kappa * dot(y.f[0], params.mu.f[0]);
}

std::vector<ManifoldPoint> tangent_vmf_sample(const TangentVmfParams& params, int n,
                                              std::uint64_t seed) {
    const auto& mu = params.mu.f[0];
    if (mu.size() != 3) throw DimensionError("tangent vMF is defined on S^2 here");
    auto frame = tangent_frame(mu);
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> ga(params.beta_a, 1.0), gb(params.beta_b, 1.0);
    std::vector<ManifoldPoint> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        double x = ga(rng), y = gb(rng);
        double v = 2.0 * (x / (x + y)) - 1.0;
        auto u = vmf_draw(params.nu, params.kappa, rng);
        double s = std::sqrt(std::max(0.0, 1.0 - v * v));
        std::vector<double> pt(3);
        for (int c = 0; c < 3; ++c)
            pt[c] = v * mu[c] + s * (frame[0][c] * u[0] + frame[1][c] * u[1]);
        double nn = std::sqrt(dot(pt, pt));
        for (auto& e : pt) e /= nn;
        ManifoldPoint yp;
        yp.f.push_back(std::move(pt));
        out.push_back(std::move(yp));
    }
    return out;
}

BsvmSampleResult bsvm_sample(const BsvmParams& params, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    BsvmSampleResult res;
    res.points.reserve(n);
    long long attempts = 0;
    const double la = std::abs(params.lambda);
    for (int i = 0; i < n; ++i) {
        for (;;) {
            ++attempts;
            double phi1 = params.kappa1 > 0 ? von_mises_angle(params.mu1, params.kappa1, rng)
                                            : -kPi + 2.0 * kPi * unif(rng);
            double phi2 = params.kappa2 > 0 ? von_mises_angle(params.mu2, params.kappa2, rng)
                                            : -kPi + 2.0 * kPi * unif(rng);
            double logacc =
                params.lambda * std::sin(phi1 - params.mu1) * std::sin(phi2 - params.mu2) - la;
            if (std::log(unif(rng)) <= logacc) {
                ManifoldPoint y;
                y.f.push_back({std::cos(phi1), std::sin(phi1)});
                y.f.push_back({std::cos(phi2), std::sin(phi2)});
                res.points.push_back(std::move(y));
                break;
            }
        }
    }
    res.acceptance_rate = attempts > 0 ? static_cast<double>(n) / attempts : 1.0;
    return res;
}

BsvmDensity::BsvmDensity(const BsvmParams& params) : params_(params) {
    log_norm_ = bsvm_log_partition(params, 512);
    double refined = bsvm_log_partition(params, 1024);
    if (std::abs(log_norm_ - refined) > 1e-8 * std::max(1.0, std::abs(refined)))
        log_norm_ = refined;
}

double BsvmDensity::logdensity(double phi1, double phi2) const {
    return bsvm_energy(params_, phi1, phi2) - log_norm_;
}

namespace {
ManifoldPoint sample_component(const ComponentParams& comp, std::mt19937_64& rng) {
    if (const auto* v = std::get_if<VmfParams>(&comp)) {
        ManifoldPoint y;
        y.f.push_back(vmf_draw(v->mu.f[0], v->kappa, rng));
        return y;
    }
    if (const auto* t = std::get_if<TangentVmfParams>(&comp)) {
        std::uint64_t sub = rng();
        return tangent_vmf_sample(*t, 1, sub)[0];
    }
    const auto& b = std::get<BsvmParams>(comp);
    std::uint64_t sub = rng();
    return bsvm_sample(b, 1, sub).points[0];
}
}  // namespace

std::vector<ManifoldPoint> mixture_sample(const ManifoldSpec& spec, const MixtureParams& params,
                                          int n, std::uint64_t seed) {
    if (params.weights.size() != params.components.size() || params.components.empty())
        throw std::invalid_argument("mixture needs matching weights/components");
    double wsum = 0.0;
    for (double w : params.weights) {
        if (w < 0) throw std::invalid_argument("negative mixture weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw std::invalid_argument("mixture weights must sum to 1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<ManifoldPoint> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        double u = unif(rng), acc = 0.0;
        std::size_t c = params.components.size() - 1;
        for (std::size_t k = 0; k < params.weights.size(); ++k) {
            acc += params.weights[k];
            if (u <= acc) {
                c = k;
                break;
            }
        }
        ManifoldPoint y = sample_component(params.components[c], rng);
        if (!y.conforms(spec)) throw DimensionError("mixture component does not match spec");
        out.push_back(std::move(y));
    }
    return out;
}

}  // namespace mfq
