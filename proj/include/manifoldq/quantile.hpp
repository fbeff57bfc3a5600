#pragma once

#include <cstdint>
#include <vector>

#include "manifoldq/geometry.hpp"
#include "manifoldq/transport.hpp"

namespace mfq {

// s(tau) for the latitude profile on S^p:
//   int_0^s sin^{p-1}(pi t) dt / int_0^1 sin^{p-1}(pi t) dt = tau.
// Strictly increasing, s(0)=0, s(1)=1, s(1/2)=1/2.
double latitude_profile(int p, double tau);
// forward direction (probability content of the cap with latitude pi*s)
double latitude_content(int p, double s);

// Weighted Fréchet mean: candidate scan over the sample followed by
// Riemannian gradient descent with Armijo backtracking. Empty weights mean
// uniform 1/n.
ManifoldPoint frechet_mean(const ManifoldSpec& spec, const std::vector<ManifoldPoint>& points,
                           const std::vector<double>& weights = {});

// Central submanifold M0 together with its normal field.
//  - Cap: M0 = {pole} (sphere / torus), or pole-factor latitude center for
//    polyspheres (contours ride factor 0 of the product; the remaining
//    factors stay uniform).
//  - Strip: M0 = equator of sphere factor `factor` w.r.t. `point`.
//  - TorusEquator: M0 = {angle} x T^{p-1} on circle component `factor`.
struct CenterSpec {
    enum class Kind { Cap, Strip, TorusEquator };
    Kind kind = Kind::Cap;
    ManifoldPoint point;  // Cap pole / Strip reference pole
    int factor = 0;       // Strip sphere-factor index or TorusEquator component
    double angle = 0.0;   // TorusEquator center angle

    static CenterSpec cap(ManifoldPoint pole);
    static CenterSpec strip(int factor, ManifoldPoint pole);
    static CenterSpec torus_equator(int component, double angle);
};

enum class GridMode {
    IID,         // i.i.d. uniform points on each contour
    Equispaced,  // equally spaced points; contours must be one-dimensional
    Fibered,     // shared normal geodesics through all rings
};

// Construction record of a grid point: exp_base(t * normal) reproduces the
// point; `normal` is the raw normal-field vector (norm pi for caps, pi/2 for
// sphere strips). Ring-0 points have a zero normal.
struct GridPointRecord {
    ManifoldPoint base;
    TangentVector normal;
    double t = 0.0;
    int fiber = -1;  // shared-geodesic index (Fibered grids only)
};

struct StructuredGrid {
    ManifoldSpec spec;
    CenterSpec center;
    int n0 = 0, nR = 0, nS = 0;
    GridMode mode = GridMode::IID;
    std::vector<ManifoldPoint> points;
    std::vector<int> ring_index;  // 0 for center copies, 1..nR for contours
    std::vector<GridPointRecord> record;

    int size() const { return static_cast<int>(points.size()); }
};

StructuredGrid build_grid(const ManifoldSpec& spec, const CenterSpec& center, int n_R, int n_S,
                          int n_0, std::uint64_t seed, GridMode mode);

// How the center submanifold is estimated from the data.
struct CenterRule {
    enum class Kind { FrechetCap, FrechetStrip, FixedCenter };
    Kind kind = Kind::FrechetCap;
    int factor = 0;    // FrechetStrip: sphere factor / torus component
    CenterSpec fixed;  // FixedCenter payload

    static CenterRule frechet_cap();
    static CenterRule frechet_strip(int factor);
    static CenterRule fixed_center(CenterSpec center);
};

struct QuantileFit {
    ManifoldSpec spec;
    std::vector<ManifoldPoint> sample;
    StructuredGrid grid;
    std::vector<int> assignment;  // sample index -> grid index (bijection)
    std::vector<int> ranks;       // ring index of the image
    std::vector<TangentVector> signs;  // unit normal of the image, zero on ring 0
    ManifoldPoint theta_hat;      // pole estimate anchoring the center
};

QuantileFit fit_quantiles(const ManifoldSpec& spec, const std::vector<ManifoldPoint>& sample,
                          const CenterRule& rule, int n_R, int n_S, int n_0, std::uint64_t seed,
                          GridMode mode = GridMode::IID);

// Skip center estimation / grid construction and match against a caller-built
// grid (|sample| must equal grid.size()).
QuantileFit fit_with_grid(const ManifoldSpec& spec, const std::vector<ManifoldPoint>& sample,
                          const StructuredGrid& grid);

// Sample points whose image lies on ring r / within rings 0..r.
std::vector<ManifoldPoint> extract_contour(const QuantileFit& fit, int r);
std::vector<ManifoldPoint> extract_region(const QuantileFit& fit, int r);

double hausdorff_distance(const ManifoldSpec& spec, const std::vector<ManifoldPoint>& set_a,
                          const std::vector<ManifoldPoint>& set_b);

// Deterministic per-stream seed derivation (splitmix64 mix); shared by the
// unconditional and conditional pipelines so that matching seeds reproduce
// matching reference grids.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mfq
