#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "manifoldq/geometry.hpp"

namespace mfq {

// von Mises-Fisher on S^p, density proportional to exp(kappa * y.mu).
struct VmfParams {
    ManifoldPoint mu;  // single sphere factor
    double kappa = 0.0;
};

// Tangent vMF on S^2: Y = V mu + sqrt(1 - V^2) Gamma_mu U with
// V = 2 Beta(a, b) - 1 and U ~ vMF_1(nu, kappa) on the circle.
struct TangentVmfParams {
    ManifoldPoint mu;
    std::vector<double> nu;  // unit vector in R^2
    double kappa = 0.0;
    double beta_a = 1.0;
    double beta_b = 1.0;
};

// Bivariate Sine von Mises on T^2.
struct BsvmParams {
    double mu1 = 0.0, mu2 = 0.0;
    double kappa1 = 0.0, kappa2 = 0.0;
    double lambda = 0.0;
};

using ComponentParams = std::variant<VmfParams, TangentVmfParams, BsvmParams>;

struct MixtureParams {
    std::vector<double> weights;
    std::vector<ComponentParams> components;
};

std::vector<ManifoldPoint> vmf_sample(const VmfParams& params, int n, std::uint64_t seed);
double vmf_logdensity(const VmfParams& params, const ManifoldPoint& y);

std::vector<ManifoldPoint> tangent_vmf_sample(const TangentVmfParams& params, int n,
                                              std::uint64_t seed);

struct BsvmSampleResult {
    std::vector<ManifoldPoint> points;
    double acceptance_rate = 1.0;
};
BsvmSampleResult bsvm_sample(const BsvmParams& params, int n, std::uint64_t seed);

// Normalization constant cached at construction (tensor-product trapezoid
// quadrature on a 512x512 angular grid, checked against a 1024x1024
// refinement).
class BsvmDensity {
public:
    explicit BsvmDensity(const BsvmParams& params);
    double logdensity(double phi1, double phi2) const;
    double log_norm() const { return log_norm_; }

private:
    BsvmParams params_;
    double log_norm_;
};

std::vector<ManifoldPoint> mixture_sample(const ManifoldSpec& spec, const MixtureParams& params,
                                          int n, std::uint64_t seed);

// Deterministic semi-orthogonal completion of mu (Householder reflection
// mapping e_{p+1} to mu); columns span the tangent space at mu.
std::vector<std::vector<double>> tangent_frame(const std::vector<double>& mu);

}  // namespace mfq
