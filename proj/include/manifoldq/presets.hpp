#pragma once

#include <string>

#include "manifoldq/distributions.hpp"
#include "manifoldq/regression.hpp"

namespace mfq {

class UnknownPresetError : public std::runtime_error {
public:
    explicit UnknownPresetError(const std::string& what) : std::runtime_error(what) {}
};

// Named simulation scenarios. Unconditional presets: T1-T3, Ta-Tc on the
// 2-torus; S1-S3, Sa-Sc on the 2-sphere; plus "uniform" (any manifold,
// supplied by the caller).
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);

// Manifold a named preset lives on. Throws for "uniform", whose manifold is
// the caller's choice.
ManifoldSpec preset_manifold(const std::string& name);

// Parameters as a (possibly single-component) mixture. Throws for "uniform".
MixtureParams preset_params(const std::string& name);

// uniform_manifold is consulted only for "uniform" and required there.
std::vector<ManifoldPoint> sample_preset(const std::string& name, int n, std::uint64_t seed,
                                         const ManifoldSpec* uniform_manifold = nullptr);

// Regression scenarios: TS1, TS1*, TS1**, TS2, TS3, TS3* (sphere covariate,
// torus response); SS1, SS2, SS2* (circle covariate, sphere response);
// TR1, TR2, SR (real covariate on [0,5]).
std::vector<std::string> regression_preset_names();
bool is_regression_preset(const std::string& name);

struct RegressionPreset {
    std::string name;
    ManifoldSpec response_spec;
    CovariateSpace covariate_space;
};
RegressionPreset regression_preset(const std::string& name);

struct RegressionSample {
    std::vector<Covariate> x;
    std::vector<ManifoldPoint> y;
};
RegressionSample sample_regression_preset(const std::string& name, int n, std::uint64_t seed);

// Conditional response law at a fixed covariate value; exposed so population
// proxies for conditional contours can be drawn directly.
MixtureParams conditional_params(const std::string& name, const Covariate& x);
std::vector<ManifoldPoint> sample_conditional(const std::string& name, const Covariate& x, int n,
                                              std::uint64_t seed);

}  // namespace mfq
