#include "manifoldq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace mfq {

namespace {

constexpr double kPi = std::numbers::pi;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

double sphere_distance(const std::vector<double>& a, const std::vector<double>& b) {
    // dot products of unit vectors can overshoot [-1,1] by ~1e-16
    double c = std::clamp(dot(a, b), -1.0, 1.0);
    if (c > 0.5) {
        // arccos amplifies rounding near c = 1 (identical points come out at
        // ~2e-8); the chordal form is exact there
        double chord2 = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) chord2 += (a[j] - b[j]) * (a[j] - b[j]);
        return 2.0 * std::asin(0.5 * std::sqrt(chord2));
    }
    return std::acos(c);
}

}  // namespace

int ManifoldSpec::dim() const {
    int p = 0;
    for (int pi : factors) p += pi;
    return p;
}

int ManifoldSpec::ambient_dim() const {
    int d = 0;
    for (int pi : factors) d += pi + 1;
    return d;
}

bool ManifoldSpec::is_torus() const {
    if (factors.empty()) return false;
    return std::all_of(factors.begin(), factors.end(), [](int p) { return p == 1; });
}

ManifoldSpec ManifoldSpec::parse(const std::string& name) {
    ManifoldSpec spec;
    std::stringstream ss(name);
    std::string tok;
    while (std::getline(ss, tok, 'x')) {
        if (tok.size() < 2 || (tok[0] != 's' && tok[0] != 't'))
            throw DimensionError("bad manifold token: '" + tok + "'");
        int p = 0;
        try {
            p = std::stoi(tok.substr(1));
        } catch (...) {
            throw DimensionError("bad manifold token: '" + tok + "'");
        }
        if (p < 1) throw DimensionError("factor dimension must be >= 1 in '" + name + "'");
        if (tok[0] == 's') {
            spec.factors.push_back(p);
        } else {
            for (int i = 0; i < p; ++i) spec.factors.push_back(1);
        }
    }
    if (spec.factors.empty()) throw DimensionError("empty manifold spec '" + name + "'");
    return spec;
}

std::string ManifoldSpec::name() const {
    if (is_torus() && factors.size() > 1) return "t" + std::to_string(factors.size());
    std::string out;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) out += "x";
        out += "s" + std::to_string(factors[i]);
    }
    return out;
}

bool ManifoldPoint::conforms(const ManifoldSpec& spec) const {
    if (num_factors() != spec.num_factors()) return false;
    for (int i = 0; i < num_factors(); ++i) {
        if (static_cast<int>(f[i].size()) != spec.factors[i] + 1) return false;
        if (std::abs(norm2(f[i]) - 1.0) > 1e-12) return false;
    }
    return true;
}

std::vector<double> ManifoldPoint::flat() const {
    std::vector<double> out;
    for (const auto& fi : f) out.insert(out.end(), fi.begin(), fi.end());
    return out;
}

ManifoldPoint ManifoldPoint::from_flat(const ManifoldSpec& spec, const std::vector<double>& coords) {
    if (static_cast<int>(coords.size()) != spec.ambient_dim())
        throw DimensionError("flat coordinate count does not match spec");
    ManifoldPoint y;
    std::size_t k = 0;
    for (int pi : spec.factors) {
        y.f.emplace_back(coords.begin() + k, coords.begin() + k + pi + 1);
        k += pi + 1;
    }
    return y;
}

double TangentVector::norm() const {
    double s = 0.0;
    for (const auto& fi : f) s += dot(fi, fi);
    return std::sqrt(s);
}

std::vector<double> TangentVector::flat() const {
    std::vector<double> out;
    for (const auto& fi : f) out.insert(out.end(), fi.begin(), fi.end());
    return out;
}

void validate_point(const ManifoldSpec& spec, const ManifoldPoint& y) {
    if (!y.conforms(spec)) throw DimensionError("point does not conform to " + spec.name());
}

double geodesic_distance(const ManifoldSpec& spec, const ManifoldPoint& y, const ManifoldPoint& z) {
    validate_point(spec, y);
    validate_point(spec, z);
    double s = 0.0;
    for (int i = 0; i < spec.num_factors(); ++i) {
        double di = sphere_distance(y.f[i], z.f[i]);
        s += di * di;
    }
    return std::sqrt(s);
}

ManifoldPoint exp_map(const ManifoldSpec& spec, const ManifoldPoint& y, const TangentVector& v) {
    validate_point(spec, y);
    if (v.base.num_factors() != y.num_factors())
        throw DimensionError("tangent vector base mismatch");
    // chordal comparison: arccos of a near-1 dot product amplifies rounding
    for (int i = 0; i < y.num_factors(); ++i)
        for (std::size_t j = 0; j < y.f[i].size(); ++j)
            if (std::abs(v.base.f[i][j] - y.f[i][j]) > 1e-9)
                throw DimensionError("tangent vector not based at y");

    ManifoldPoint out;
    out.f.resize(spec.num_factors());
    for (int i = 0; i < spec.num_factors(); ++i) {
        const auto& yi = y.f[i];
        const auto& vi = v.f[i];
        double t = norm2(vi);
        auto& oi = out.f[i];
        oi.resize(yi.size());
        if (t == 0.0) {
            oi = yi;
            continue;
        }
        double c = std::cos(t), s = std::sin(t) / t;
        for (std::size_t j = 0; j < yi.size(); ++j) oi[j] = c * yi[j] + s * vi[j];
        // renormalize to stop drift in iterated constructions
        double nn = norm2(oi);
        for (auto& x : oi) x /= nn;
    }
    return out;
}

TangentVector log_map(const ManifoldSpec& spec, const ManifoldPoint& y, const ManifoldPoint& z) {
    validate_point(spec, y);
    validate_point(spec, z);
    TangentVector v;
    v.base = y;
    v.f.resize(spec.num_factors());
    for (int i = 0; i < spec.num_factors(); ++i) {
        const auto& yi = y.f[i];
        const auto& zi = z.f[i];
        double c = std::clamp(dot(yi, zi), -1.0, 1.0);
        if (c < -1.0 + 1e-12)
            throw CutLocusError("log_map: factor " + std::to_string(i) + " is antipodal");
        double theta = std::acos(c);
        auto& vi = v.f[i];
        vi.assign(yi.size(), 0.0);
        if (theta < 1e-15) continue;
        // component of z orthogonal to y, rescaled to arc length
        double s = std::sin(theta);
        for (std::size_t j = 0; j < yi.size(); ++j) vi[j] = (zi[j] - c * yi[j]) * theta / s;
    }
    return v;
}

double cut_locus_distance(const ManifoldSpec& spec, const ManifoldPoint& y, const ManifoldPoint& z) {
    validate_point(spec, y);
    validate_point(spec, z);
    double m = kPi;
    for (int i = 0; i < spec.num_factors(); ++i)
        m = std::min(m, kPi - sphere_distance(y.f[i], z.f[i]));
    return m;
}

std::vector<ManifoldPoint> uniform_sample(const ManifoldSpec& spec, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<ManifoldPoint> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        ManifoldPoint y;
        y.f.resize(spec.num_factors());
        for (int k = 0; k < spec.num_factors(); ++k) {
            auto& fk = y.f[k];
            fk.resize(spec.factors[k] + 1);
            double nn = 0.0;
            do {
                for (auto& x : fk) x = gauss(rng);
                nn = norm2(fk);
            } while (nn < 1e-12);
            for (auto& x : fk) x /= nn;
        }
        out.push_back(std::move(y));
    }
    return out;
}

double wrap_angle(double a) {
    double w = std::fmod(a + kPi, 2.0 * kPi);
    if (w < 0) w += 2.0 * kPi;
    return w - kPi;
}

ManifoldPoint point_from_angles(const ManifoldSpec& spec, const std::vector<double>& angles) {
    if (!spec.is_torus() || static_cast<int>(angles.size()) != spec.num_factors())
        throw DimensionError("angle codec requires a torus spec and one angle per factor");
    ManifoldPoint y;
    for (double a : angles) y.f.push_back({std::cos(a), std::sin(a)});
    return y;
}

std::vector<double> angles_from_point(const ManifoldSpec& spec, const ManifoldPoint& y) {
    validate_point(spec, y);
    if (!spec.is_torus()) throw DimensionError("angle codec requires a torus spec");
    std::vector<double> out;
    for (const auto& fi : y.f) out.push_back(std::atan2(fi[1], fi[0]));
    return out;
}

}  // namespace mfq
