#include <algorithm>
#include <cmath>
#include <random>

#include "manifoldq/presets.hpp"

namespace mfq {

namespace {

const double kPi = 3.14159265358979323846;

ManifoldPoint sphere_pt(std::initializer_list<double> coords) {
    std::vector<double> v(coords);
    double n = 0.0;
    for (double c : v) n += c * c;
    n = std::sqrt(n);
    for (double& c : v) c /= n;
    ManifoldPoint p;
    p.f.push_back(std::move(v));
    return p;
}

VmfParams vmf(std::initializer_list<double> mu, double kappa) {
    return VmfParams{sphere_pt(mu), kappa};
}

BsvmParams bsvm(double m1, double m2, double k1, double k2, double lam) {
    return BsvmParams{m1, m2, k1, k2, lam};
}

MixtureParams single(ComponentParams p) {
    MixtureParams m;
    m.weights = {1.0};
    m.components = {std::move(p)};
    return m;
}

MixtureParams mix(std::vector<double> w, std::vector<ComponentParams> c) {
    MixtureParams m;
    m.weights = std::move(w);
    m.components = std::move(c);
    return m;
}

TangentVmfParams tvmf(std::initializer_list<double> mu, std::initializer_list<double> nu,
                      double kappa, double a, double b) {
    TangentVmfParams p;
    p.mu = sphere_pt(mu);
    p.nu = std::vector<double>(nu);
    p.kappa = kappa;
    p.beta_a = a;
    p.beta_b = b;
    return p;
}

MixtureParams three_bsvm_mix(double k1, double k2, double k3) {
    return mix({3.0 / 7.0, 3.0 / 7.0, 1.0 / 7.0},
               {bsvm(-kPi / 2, kPi / 2, k1, k1, -2.0), bsvm(kPi / 2, kPi / 2, k2, k2, 2.0),
                bsvm(0.0, -kPi / 5, k3, k3, 0.0)});
}

MixtureParams three_vmf_mix(double k1, double k2, double k3) {
    return mix({0.3, 0.3, 0.4},
               {vmf({0.3, 0.4, std::sqrt(0.75)}, k1), vmf({-0.3, -0.4, std::sqrt(0.75)}, k2),
                vmf({-0.3, 0.2, std::sqrt(0.87)}, k3)});
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"T1", "T2", "T3", "S1", "S2", "S3", "Ta", "Tb", "Tc", "Sa", "Sb", "Sc", "uniform"};
}

bool is_preset(const std::string& name) {
    auto all = preset_names();
    return std::find(all.begin(), all.end(), name) != all.end();
}

ManifoldSpec preset_manifold(const std::string& name) {
    if (name == "uniform")
        throw UnknownPresetError("'uniform' has no intrinsic manifold; pass one explicitly");
    if (!is_preset(name)) throw UnknownPresetError("unknown preset: " + name);
    return ManifoldSpec::parse(name[0] == 'T' ? "t2" : "s2");
}

MixtureParams preset_params(const std::string& name) {
    if (name == "T1") return single(bsvm(0, 0, 3, 3, 0));
    if (name == "T2") return single(bsvm(0, 0, 3, 3, 1.5));
    if (name == "T3" || name == "Tc") return three_bsvm_mix(4, 4, 6);
    if (name == "Ta") return single(bsvm(0, 0, 2.5, 0, 0));
    if (name == "Tb") return single(bsvm(0, 0, 2.5, 0, 2));
    if (name == "S1") return single(vmf({0, 0, 1}, 10));
    if (name == "S2") return single(tvmf({0, 0, 1}, {0.7, std::sqrt(0.51)}, 10, 2, 8));
    if (name == "S3" || name == "Sc") return three_vmf_mix(20, 20, 20);
    if (name == "Sa") return mix({0.3, 0.7}, {vmf({0, 0, 1}, 1), vmf({0, 0, -1}, 2)});
    if (name == "Sb")
        return mix({0.3, 0.7},
                   {tvmf({0, 0, 1}, {0.7, std::sqrt(0.51)}, 2, 5, 2), vmf({0, 0, -1}, 3)});
    throw UnknownPresetError("unknown preset: " + name);
}

std::vector<ManifoldPoint> sample_preset(const std::string& name, int n, std::uint64_t seed,
                                         const ManifoldSpec* uniform_manifold) {
    if (name == "uniform") {
        if (!uniform_manifold)
            throw UnknownPresetError("'uniform' requires an explicit manifold");
        return uniform_sample(*uniform_manifold, n, seed);
    }
    return mixture_sample(preset_manifold(name), preset_params(name), n, seed);
}

std::vector<std::string> regression_preset_names() {
    return {"TS1", "TS1*", "TS1**", "TS2", "TS3", "TS3*", "SS1", "SS2", "SS2*",
            "TR1", "TR2", "SR"};
}

bool is_regression_preset(const std::string& name) {
    auto all = regression_preset_names();
    return std::find(all.begin(), all.end(), name) != all.end();
}

RegressionPreset regression_preset(const std::string& name) {
    if (!is_regression_preset(name)) throw UnknownPresetError("unknown regression preset: " + name);
    RegressionPreset p;
    p.name = name;
    if (name[0] == 'T' && name[1] == 'S') {
        p.response_spec = ManifoldSpec::parse("t2");
        p.covariate_space = CovariateSpace::on_manifold(ManifoldSpec::parse("s2"));
    } else if (name[0] == 'S' && name[1] == 'S') {
        p.response_spec = ManifoldSpec::parse("s2");
        p.covariate_space = CovariateSpace::on_manifold(ManifoldSpec::parse("s1"));
    } else {  // TR1, TR2, SR
        p.response_spec = ManifoldSpec::parse(name[0] == 'T' ? "t2" : "s2");
        p.covariate_space = CovariateSpace::euclidean(1);
    }
    return p;
}

namespace {

// covariate coordinates, independent of representation
std::vector<double> cov_coords(const Covariate& x) {
    if (std::holds_alternative<std::vector<double>>(x)) return std::get<std::vector<double>>(x);
    return std::get<ManifoldPoint>(x).flat();
}

std::vector<Covariate> sample_covariates(const std::string& name, int n, std::uint64_t seed) {
    std::vector<Covariate> out;
    out.reserve(n);
    if (name[0] == 'T' && name[1] == 'R') {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 5.0);
        for (int i = 0; i < n; ++i) out.emplace_back(std::vector<double>{u(rng)});
        return out;
    }
    if (name == "SR") {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 5.0);
        for (int i = 0; i < n; ++i) out.emplace_back(std::vector<double>{u(rng)});
        return out;
    }
    if (name[0] == 'S') {  // SS*: vMF_1((0,1), 3)
        for (auto& p : vmf_sample(vmf({0, 1}, 3), n, seed)) out.emplace_back(std::move(p));
        return out;
    }
    // TS*: vMF_2(mu_X, kappa_X)
    double kappa_x = (name == "TS1" || name == "TS2" || name == "TS3" || name == "TS3*") ? 1.0
                                                                                        : 2.0;
    VmfParams px = name == "TS1**" ? vmf({0.3, 0.3, std::sqrt(0.82)}, kappa_x)
                                   : vmf({0.7, 0.7, std::sqrt(0.02)}, kappa_x);
    for (auto& p : vmf_sample(px, n, seed)) out.emplace_back(std::move(p));
    return out;
}

}  // namespace

MixtureParams conditional_params(const std::string& name, const Covariate& x) {
    if (!is_regression_preset(name)) throw UnknownPresetError("unknown regression preset: " + name);
    const std::vector<double> c = cov_coords(x);
    if (name == "TS1" || name == "TS1*" || name == "TS1**" || name == "TS3" || name == "TS3*") {
        double s = std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]);
        if (name == "TS1") return single(bsvm(0, 0, std::exp(s), 2, 1));
        if (name == "TS1*")
            return single(bsvm(0, 0, std::exp(3 * std::abs(c[0])), std::exp(3 * std::abs(c[1])), 1));
        if (name == "TS1**")
            return single(bsvm(0, 0, 6, 6, 10 * (std::abs(c[0]) + std::abs(c[1]))));
        if (name == "TS3") return single(bsvm(0, 0, std::exp(s), 0, 1));
        double d = std::abs(c[0] - c[1]);  // TS3*
        return single(bsvm(0, 0, 2 * d, 0, std::exp(d)));
    }
    if (name == "TS2") {
        double s = std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]);
        return mix({3.0 / 7.0, 3.0 / 7.0, 1.0 / 7.0},
                   {bsvm(-kPi / 2, kPi / 2, std::exp(2 * c[0]), std::exp(2 * c[0]), -2.0),
                    bsvm(kPi / 2, kPi / 2, std::exp(2 * c[1]), std::exp(2 * c[1]), 2.0),
                    bsvm(0.0, -kPi / 5, std::exp(s), std::exp(s), 0.0)});
    }
    if (name == "SS1") return single(vmf({0, 0, 1}, 5 * std::exp(c[0])));
    if (name == "SS2")
        return three_vmf_mix(6 * std::exp(c[0]), 4 * std::exp(2 * c[1]),
                             2 * std::exp(3 * c[0] + 2 * c[1]));
    if (name == "SS2*") {
        double k = std::exp(std::abs(c[1]) / (std::abs(c[0]) + 0.25));
        return three_vmf_mix(k, k, k);
    }
    double xv = c[0];
    if (name == "TR1") return single(bsvm(0, 0, 2, 2, xv * xv - 9));
    if (name == "TR2") return single(bsvm(0, 0, 2, 0, xv * xv - 9));
    // SR
    double k = (xv - 5) * (xv - 5);
    return three_vmf_mix(k, k, k);
}

std::vector<ManifoldPoint> sample_conditional(const std::string& name, const Covariate& x, int n,
                                              std::uint64_t seed) {
    return mixture_sample(regression_preset(name).response_spec, conditional_params(name, x), n,
                          seed);
}

RegressionSample sample_regression_preset(const std::string& name, int n, std::uint64_t seed) {
    const RegressionPreset p = regression_preset(name);
    RegressionSample out;
    out.x = sample_covariates(name, n, derive_seed(seed, 1));
    out.y.reserve(n);
    std::mt19937_64 sub(derive_seed(seed, 2));
    for (int i = 0; i < n; ++i) {
        auto yi = mixture_sample(p.response_spec, conditional_params(name, out.x[i]), 1, sub());
        out.y.push_back(std::move(yi[0]));
    }
    return out;
}

}  // namespace mfq
