#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfq {

class CutLocusError : public std::runtime_error {
public:
    explicit CutLocusError(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Product of unit spheres S^{p_1} x ... x S^{p_k}. A torus T^p is p circle
// factors, a single sphere S^p is one factor.
struct ManifoldSpec {
    std::vector<int> factors;

    int num_factors() const { return static_cast<int>(factors.size()); }
    int dim() const;          // intrinsic dimension, sum of p_i
    int ambient_dim() const;  // sum of (p_i + 1)
    bool is_torus() const;    // all factors are circles
    bool is_single_sphere() const { return factors.size() == 1; }

    // "s2", "t3", "s1xs2", ... Factors "s<p>" joined by "x"; "t<p>" expands
    // to p circle factors.
    static ManifoldSpec parse(const std::string& name);
    std::string name() const;
};

// Extrinsic representation: one unit vector in R^{p_i+1} per factor.
struct ManifoldPoint {
    std::vector<std::vector<double>> f;

    int num_factors() const { return static_cast<int>(f.size()); }
    bool conforms(const ManifoldSpec& spec) const;
    // Flat concatenation in spec order.
    std::vector<double> flat() const;
    static ManifoldPoint from_flat(const ManifoldSpec& spec, const std::vector<double>& coords);
};

// Tangent vector at `base`: per-factor vectors orthogonal to the base factor.
struct TangentVector {
    ManifoldPoint base;
    std::vector<std::vector<double>> f;

    double norm() const;  // product norm, l2 over factor norms
    std::vector<double> flat() const;
};

double geodesic_distance(const ManifoldSpec& spec, const ManifoldPoint& y, const ManifoldPoint& z);
ManifoldPoint exp_map(const ManifoldSpec& spec, const ManifoldPoint& y, const TangentVector& v);
TangentVector log_map(const ManifoldSpec& spec, const ManifoldPoint& y, const ManifoldPoint& z);
double cut_locus_distance(const ManifoldSpec& spec, const ManifoldPoint& y, const ManifoldPoint& z);
std::vector<ManifoldPoint> uniform_sample(const ManifoldSpec& spec, int n, std::uint64_t seed);

// Circle-factor convenience codec. Angles live in [-pi, pi).
double wrap_angle(double a);
ManifoldPoint point_from_angles(const ManifoldSpec& spec, const std::vector<double>& angles);
std::vector<double> angles_from_point(const ManifoldSpec& spec, const ManifoldPoint& y);

void validate_point(const ManifoldSpec& spec, const ManifoldPoint& y);

}  // namespace mfq
