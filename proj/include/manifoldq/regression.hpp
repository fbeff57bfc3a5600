#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "manifoldq/quantile.hpp"

namespace mfq {

class EmptyWindowError : public std::runtime_error {
public:
    explicit EmptyWindowError(const std::string& what) : std::runtime_error(what) {}
};

// Covariates live either in R^d (l2 metric) or on a product-of-spheres
// manifold (geodesic metric).
using Covariate = std::variant<std::vector<double>, ManifoldPoint>;

struct CovariateSpace {
    enum class Kind { Euclidean, Manifold };
    Kind kind = Kind::Euclidean;
    int dim = 1;            // Euclidean dimension
    ManifoldSpec manifold;  // Manifold case

    static CovariateSpace euclidean(int dim);
    static CovariateSpace on_manifold(ManifoldSpec spec);
    double distance(const Covariate& a, const Covariate& b) const;
};

struct WeightFunction {
    enum class Kind { Knn, Kernel };
    enum class KernelType { TrimmedGaussian, Box };
    Kind kind = Kind::Knn;
    int k = 1;            // Knn
    double bandwidth = 1.0;  // Kernel
    KernelType kernel = KernelType::TrimmedGaussian;

    static WeightFunction knn(int k);
    static WeightFunction kernel_fn(double bandwidth, KernelType type = KernelType::TrimmedGaussian);
};

// Exactly k entries equal to 1/k on the k nearest covariates (distance ties
// broken by smallest index).
std::vector<double> knn_weights(const CovariateSpace& space, const Covariate& x,
                                const std::vector<Covariate>& covariates, int k);

// w_j proportional to K(d(x, X_j)/h); K is the trimmed Gaussian e^{-u^2} or
// the box kernel, both supported on u in [0,1] (boundary inclusive). Throws
// EmptyWindowError when no covariate lies within h.
std::vector<double> kernel_weights(const CovariateSpace& space, const Covariate& x,
                                   const std::vector<Covariate>& covariates, double h,
                                   WeightFunction::KernelType type);

std::vector<double> compute_weights(const CovariateSpace& space, const Covariate& x,
                                    const std::vector<Covariate>& covariates,
                                    const WeightFunction& wf);

// Weighted Fréchet mean of the responses (same solver as the unconditional
// mean; zero-weight responses are ignored).
ManifoldPoint conditional_frechet_mean(const ManifoldSpec& spec,
                                       const std::vector<ManifoldPoint>& responses,
                                       const std::vector<double>& weights);

struct ConditionalFit {
    ManifoldSpec spec;
    std::vector<double> weights;
    ManifoldPoint theta_hat;  // conditional Fréchet mean at the query
    ManifoldPoint pole;       // Step-1 grid-point anchor of the center
    StructuredGrid grid;
    Coupling coupling;        // Step-2 transport plan (grid rows x sample cols)
    std::vector<int> qmap;    // grid index -> sample index (argmax of the plan)
    std::vector<ManifoldPoint> responses;
    int distinct_images = 0;  // number of distinct sample points in qmap
};

ConditionalFit fit_conditional(const ManifoldSpec& spec, const CovariateSpace& cov_space,
                               const std::vector<Covariate>& covariates,
                               const std::vector<ManifoldPoint>& responses, const Covariate& x,
                               const WeightFunction& wf, const CenterRule& rule, int N_R, int N_S,
                               int N_0, std::uint64_t seed, GridMode mode = GridMode::IID);

// Q_w images of ring r (contour) / rings <= r (region); duplicates collapsed.
std::vector<ManifoldPoint> extract_conditional_contour(const ConditionalFit& fit, int r);
std::vector<ManifoldPoint> extract_conditional_region(const ConditionalFit& fit, int r);

}  // namespace mfq
