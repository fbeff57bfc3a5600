#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "manifoldq/quantile.hpp"

namespace mfq {

namespace {

constexpr double kPi = std::numbers::pi;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void normalize(std::vector<double>& v) {
    double n = std::sqrt(dot(v, v));
    for (auto& x : v) x /= n;
}

// Householder completion of a unit vector: columns orthonormal to mu.
std::vector<std::vector<double>> tangent_basis(const std::vector<double>& mu) {
    std::vector<double> h(mu.size(), 0.0);
    h.back() = 1.0;
    for (std::size_t i = 0; i < mu.size(); ++i) h[i] -= mu[i];
    double hn = std::sqrt(dot(h, h));
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j + 1 < mu.size(); ++j) {
        std::vector<double> e(mu.size(), 0.0);
        e[j] = 1.0;
        if (hn >= 1e-12) {
            double c = 2.0 * (h[j] / hn);
            for (std::size_t i = 0; i < mu.size(); ++i) e[i] -= c * (h[i] / hn);
        }
        cols.push_back(std::move(e));
    }
    return cols;
}

// ---- latitude profile ------------------------------------------------------

double sin_pow(double t, int p) { return std::pow(std::sin(kPi * t), p - 1); }

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

double latitude_normalizer(int p) {
    static thread_local std::vector<double> cache;  // index p
    if (p < static_cast<int>(cache.size()) && cache[p] > 0.0) return cache[p];
    auto f = [p](double t) { return sin_pow(t, p); };
    double v = adaptive_simpson(f, 0.0, 1.0, 1e-13);
    if (p >= static_cast<int>(cache.size())) cache.resize(p + 1, 0.0);
    cache[p] = v;
    return v;
}

}  // namespace

double latitude_content(int p, double s) {
    if (p < 1) throw std::invalid_argument("sphere dimension must be >= 1");
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    if (p == 1) return s;
    auto f = [p](double t) { return sin_pow(t, p); };
    return adaptive_simpson(f, 0.0, s, 1e-13) / latitude_normalizer(p);
}

double latitude_profile(int p, double tau) {
    if (p < 1) throw std::invalid_argument("sphere dimension must be >= 1");
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("tau must lie in [0,1]");
    if (p == 1) return tau;
    if (tau == 0.0) return 0.0;
    if (tau == 1.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    // content is strictly increasing; bisect to 1e-10
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        double c = latitude_content(p, mid);
        if (std::abs(c - tau) < 1e-10 && hi - lo < 1e-10) return mid;
        (c < tau ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---- Fréchet mean ----------------------------------------------------------

ManifoldPoint frechet_mean(const ManifoldSpec& spec, const std::vector<ManifoldPoint>& points,
                           const std::vector<double>& weights) {
    const int n = static_cast<int>(points.size());
    if (n == 0) throw std::invalid_argument("frechet_mean: empty input");
    std::vector<double> w = weights;
    if (w.empty()) w.assign(n, 1.0 / n);
    if (static_cast<int>(w.size()) != n)
        throw std::invalid_argument("frechet_mean: weight count mismatch");
    double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    if (wsum <= 0.0) throw std::invalid_argument("frechet_mean: weights sum to zero");
    for (double& x : w) x /= wsum;

    auto objective = [&](const ManifoldPoint& y) {
        double o = 0.0;
        for (int j = 0; j < n; ++j) {
            if (w[j] == 0.0) continue;
            double d = geodesic_distance(spec, points[j], y);
            o += 0.5 * w[j] * d * d;
        }
        return o;
    };

    // candidate scan over the sample
    int best = 0;
    double fbest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double o = objective(points[i]);
        if (o < fbest) {
            fbest = o;
            best = i;
        }
    }
    ManifoldPoint y = points[best];
    double fy = fbest;

    for (int iter = 0; iter < 200; ++iter) {
        TangentVector g;
        g.base = y;
        g.f.resize(spec.num_factors());
        for (int k = 0; k < spec.num_factors(); ++k) g.f[k].assign(y.f[k].size(), 0.0);
        bool ok = true;
        for (int j = 0; j < n; ++j) {
            if (w[j] == 0.0) continue;
            try {
                TangentVector lj = log_map(spec, y, points[j]);
                for (int k = 0; k < spec.num_factors(); ++k)
                    for (std::size_t c = 0; c < lj.f[k].size(); ++c)
                        g.f[k][c] += w[j] * lj.f[k][c];
            } catch (const CutLocusError&) {
                ok = false;
                break;
            }
        }
        if (!ok) break;  // gradient undefined at the cut locus; keep best point
        double gn = g.norm();
        if (gn < 1e-9) break;

        double t = 1.0;
        bool accepted = false;
        while (t > 1e-12) {
            TangentVector step = g;
            for (auto& fk : step.f)
                for (auto& x : fk) x *= t;
            ManifoldPoint y2 = exp_map(spec, y, step);
            double f2 = objective(y2);
            if (f2 <= fy - 1e-4 * t * gn * gn) {
                y = y2;
                fy = f2;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
    }
    return y;
}

// ---- CenterSpec / CenterRule helpers --------------------------------------

CenterSpec CenterSpec::cap(ManifoldPoint pole) {
    CenterSpec c;
    c.kind = Kind::Cap;
    c.point = std::move(pole);
    return c;
}

CenterSpec CenterSpec::strip(int factor, ManifoldPoint pole) {
    CenterSpec c;
    c.kind = Kind::Strip;
    c.factor = factor;
    c.point = std::move(pole);
    return c;
}

CenterSpec CenterSpec::torus_equator(int component, double angle) {
    CenterSpec c;
    c.kind = Kind::TorusEquator;
    c.factor = component;
    c.angle = wrap_angle(angle);
    return c;
}

CenterRule CenterRule::frechet_cap() { return CenterRule{Kind::FrechetCap, 0, {}}; }

CenterRule CenterRule::frechet_strip(int factor) {
    CenterRule r;
    r.kind = Kind::FrechetStrip;
    r.factor = factor;
    return r;
}

CenterRule CenterRule::fixed_center(CenterSpec center) {
    CenterRule r;
    r.kind = Kind::FixedCenter;
    r.fixed = std::move(center);
    return r;
}

// ---- grid construction -----------------------------------------------------

namespace {

struct GridBuilder {
    const ManifoldSpec& spec;
    const CenterSpec& center;
    int nR, nS, n0;
    GridMode mode;
    std::mt19937_64 rng;
    StructuredGrid out;

    GridBuilder(const ManifoldSpec& s, const CenterSpec& c, int nR_, int nS_, int n0_,
                std::uint64_t seed, GridMode m)
        : spec(s), center(c), nR(nR_), nS(nS_), n0(n0_), mode(m), rng(seed) {
        out.spec = spec;
        out.center = center;
        out.n0 = n0;
        out.nR = nR;
        out.nS = nS;
        out.mode = m;
        out.points.reserve(n0 + nR * nS);
    }

    double tau(int r) const { return static_cast<double>(r) / (nR + 1); }

    double unif() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

    std::vector<double> unit_vec(int d) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> v(d);
        double nn = 0.0;
        do {
            for (auto& x : v) x = gauss(rng);
            nn = dot(v, v);
        } while (nn < 1e-24);
        double s = 1.0 / std::sqrt(nn);
        for (auto& x : v) x *= s;
        return v;
    }

    std::vector<double> uniform_factor(int p) {
        // uniform point on S^p (ambient p+1)
        return unit_vec(p + 1);
    }

    void push(ManifoldPoint pt, int ring, GridPointRecord rec) {
        out.points.push_back(std::move(pt));
        out.ring_index.push_back(ring);
        out.record.push_back(std::move(rec));
    }

    TangentVector zero_normal(const ManifoldPoint& base) {
        TangentVector v;
        v.base = base;
        v.f.resize(base.num_factors());
        for (int k = 0; k < base.num_factors(); ++k) v.f[k].assign(base.f[k].size(), 0.0);
        return v;
    }

    // --- sphere cap (single factor) ---
    void sphere_cap() {
        const auto& pole = center.point;
        const int p = spec.factors[0];
        std::vector<std::vector<double>> frame = tangent_basis(pole.f[0]);
        auto ambient_dir = [&](const std::vector<double>& alpha) {
            std::vector<double> w(pole.f[0].size(), 0.0);
            for (int l = 0; l < p; ++l)
                for (std::size_t i = 0; i < w.size(); ++i) w[i] += alpha[l] * frame[l][i];
            return w;
        };
        if (n0 < 1) throw std::invalid_argument("cap grids need n_0 >= 1");
        for (int i = 0; i < n0; ++i) push(pole, 0, {pole, zero_normal(pole), 0.0, -1});

        std::vector<std::vector<double>> fibers;
        if (mode == GridMode::Fibered) {
            if (p == 2) {
                double phase = 2.0 * kPi * unif();
                for (int i = 0; i < nS; ++i)
                    fibers.push_back({std::cos(phase + 2.0 * kPi * i / nS),
                                      std::sin(phase + 2.0 * kPi * i / nS)});
            } else {
                for (int i = 0; i < nS; ++i) fibers.push_back(unit_vec(p));
            }
        }
        for (int r = 1; r <= nR; ++r) {
            double s = latitude_profile(p, tau(r));
            double lat = kPi * s;
            double phase = 2.0 * kPi * unif();
            for (int i = 0; i < nS; ++i) {
                std::vector<double> alpha;
                int fiber = -1;
                if (mode == GridMode::Fibered) {
                    alpha = fibers[i];
                    fiber = i;
                } else if (mode == GridMode::Equispaced) {
                    if (p != 2)
                        throw std::invalid_argument("equispaced grids need 1-d contours");
                    double a = phase + 2.0 * kPi * i / nS;
                    alpha = {std::cos(a), std::sin(a)};
                } else {
                    alpha = unit_vec(p);
                }
                auto w = ambient_dir(alpha);
                ManifoldPoint pt;
                pt.f.push_back(std::vector<double>(w.size()));
                for (std::size_t c = 0; c < w.size(); ++c)
                    pt.f[0][c] = std::cos(lat) * pole.f[0][c] + std::sin(lat) * w[c];
                normalize(pt.f[0]);
                TangentVector nv = zero_normal(pole);
                for (std::size_t c = 0; c < w.size(); ++c) nv.f[0][c] = kPi * w[c];
                push(std::move(pt), r, {pole, std::move(nv), s, fiber});
            }
        }
    }

    // --- torus cap (all circle factors) ---
    void torus_cap() {
        const int p = spec.num_factors();
        std::vector<double> t0 = angles_from_point(spec, center.point);
        auto boundary_vec = [&]() {
            // uniform on the boundary of [-pi,pi]^p
            int k = std::uniform_int_distribution<int>(0, p - 1)(rng);
            double sgn = unif() < 0.5 ? -1.0 : 1.0;
            std::vector<double> v(p);
            for (int j = 0; j < p; ++j) v[j] = -kPi + 2.0 * kPi * unif();
            v[k] = sgn * kPi;
            return v;
        };
        auto square_walk = [&](double u) {
            // perimeter parameterization of the boundary of [-pi,pi]^2
            int side = static_cast<int>(std::floor(u / (2.0 * kPi))) % 4;
            double w = std::fmod(u, 2.0 * kPi) - kPi;
            switch (side) {
                case 0: return std::vector<double>{kPi, w};
                case 1: return std::vector<double>{-w, kPi};
                case 2: return std::vector<double>{-kPi, -w};
                default: return std::vector<double>{w, -kPi};
            }
        };
        if (n0 < 1) throw std::invalid_argument("cap grids need n_0 >= 1");
        const ManifoldPoint& pole = center.point;
        for (int i = 0; i < n0; ++i) push(pole, 0, {pole, zero_normal(pole), 0.0, -1});

        std::vector<std::vector<double>> fibers;
        if (mode == GridMode::Fibered) {
            if (p == 2) {
                double phase = 8.0 * kPi * unif();
                for (int i = 0; i < nS; ++i)
                    fibers.push_back(square_walk(std::fmod(phase + 8.0 * kPi * i / nS, 8.0 * kPi)));
            } else {
                for (int i = 0; i < nS; ++i) fibers.push_back(boundary_vec());
            }
        }
        for (int r = 1; r <= nR; ++r) {
            double s = std::pow(tau(r), 1.0 / p);
            double phase = 8.0 * kPi * unif();
            for (int i = 0; i < nS; ++i) {
                std::vector<double> v;
                int fiber = -1;
                if (mode == GridMode::Fibered) {
                    v = fibers[i];
                    fiber = i;
                } else if (mode == GridMode::Equispaced) {
                    if (p != 2)
                        throw std::invalid_argument("equispaced grids need 1-d contours");
                    v = square_walk(std::fmod(phase + 8.0 * kPi * i / nS, 8.0 * kPi));
                } else {
                    v = boundary_vec();
                }
                std::vector<double> ang(p);
                for (int j = 0; j < p; ++j) ang[j] = wrap_angle(t0[j] + s * v[j]);
                ManifoldPoint pt = point_from_angles(spec, ang);
                TangentVector nv = zero_normal(pole);
                for (int j = 0; j < p; ++j) {
                    nv.f[j][0] = -std::sin(t0[j]) * v[j];
                    nv.f[j][1] = std::cos(t0[j]) * v[j];
                }
                push(std::move(pt), r, {pole, std::move(nv), s, fiber});
            }
        }
    }

    // --- polysphere cap: factor-0 latitude rings, remaining factors uniform ---
    void polysphere_cap() {
        const auto& pole0 = center.point.f[0];
        const int p0 = spec.factors[0];
        std::vector<std::vector<double>> frame = tangent_basis(pole0);
        auto rest_point = [&]() {
            std::vector<std::vector<double>> rest;
            for (int k = 1; k < spec.num_factors(); ++k) rest.push_back(uniform_factor(spec.factors[k]));
            return rest;
        };
        auto assemble = [&](std::vector<double> f0, std::vector<std::vector<double>> rest) {
            ManifoldPoint pt;
            pt.f.push_back(std::move(f0));
            for (auto& r : rest) pt.f.push_back(std::move(r));
            return pt;
        };
        for (int i = 0; i < n0; ++i) {
            ManifoldPoint base = assemble(pole0, rest_point());
            push(base, 0, {base, zero_normal(base), 0.0, -1});
        }
        std::vector<std::vector<double>> fibers;
        std::vector<std::vector<std::vector<double>>> fiber_rest;
        if (mode == GridMode::Fibered) {
            for (int i = 0; i < nS; ++i) {
                fibers.push_back(unit_vec(p0));
                fiber_rest.push_back(rest_point());
            }
        }
        for (int r = 1; r <= nR; ++r) {
            double s = latitude_profile(p0, tau(r));
            double lat = kPi * s;
            for (int i = 0; i < nS; ++i) {
                std::vector<double> alpha;
                std::vector<std::vector<double>> rest;
                int fiber = -1;
                if (mode == GridMode::Fibered) {
                    alpha = fibers[i];
                    rest = fiber_rest[i];
                    fiber = i;
                } else if (mode == GridMode::Equispaced) {
                    throw std::invalid_argument("equispaced grids need 1-d contours");
                } else {
                    alpha = unit_vec(p0);
                    rest = rest_point();
                }
                std::vector<double> w(pole0.size(), 0.0);
                for (int l = 0; l < p0; ++l)
                    for (std::size_t c = 0; c < w.size(); ++c) w[c] += alpha[l] * frame[l][c];
                std::vector<double> f0(pole0.size());
                for (std::size_t c = 0; c < f0.size(); ++c)
                    f0[c] = std::cos(lat) * pole0[c] + std::sin(lat) * w[c];
                normalize(f0);
                ManifoldPoint base = assemble(pole0, rest);
                ManifoldPoint pt = assemble(std::move(f0), std::move(rest));
                TangentVector nv = zero_normal(base);
                for (std::size_t c = 0; c < w.size(); ++c) nv.f[0][c] = kPi * w[c];
                push(std::move(pt), r, {std::move(base), std::move(nv), s, fiber});
            }
        }
    }

    // --- equatorial strip on a sphere factor; other factors uniform ---
    void sphere_strip() {
        const int j = center.factor;
        if (j < 0 || j >= spec.num_factors()) throw std::invalid_argument("strip factor out of range");
        const int pj = spec.factors[j];
        if (pj < 2) throw std::invalid_argument("strip needs a sphere factor of dimension >= 2");
        const auto& b = center.point.f[j];  // factor-j pole

        std::vector<std::vector<double>> frame = tangent_basis(b);
        auto equator_point = [&](const std::vector<double>& alpha) {
            std::vector<double> y(b.size(), 0.0);
            for (int l = 0; l < pj; ++l)
                for (std::size_t c = 0; c < y.size(); ++c) y[c] += alpha[l] * frame[l][c];
            return y;  // exp_b(pi/2 * w) = w
        };
        auto assemble = [&](std::vector<double> fj) {
            ManifoldPoint pt;
            for (int k = 0; k < spec.num_factors(); ++k) {
                if (k == j)
                    pt.f.push_back(fj);
                else
                    pt.f.push_back(uniform_factor(spec.factors[k]));
            }
            return pt;
        };
        auto with_factor = [&](const ManifoldPoint& src, std::vector<double> fj) {
            ManifoldPoint pt = src;
            pt.f[j] = std::move(fj);
            return pt;
        };

        for (int i = 0; i < n0; ++i) {
            ManifoldPoint base = assemble(equator_point(unit_vec(pj)));
            push(base, 0, {base, zero_normal(base), 0.0, -1});
        }

        const bool equis = (mode == GridMode::Equispaced);
        if (equis && !(pj == 2 && spec.num_factors() == 1))
            throw std::invalid_argument("equispaced grids need 1-d contours");
        if ((mode == GridMode::Fibered || equis) && nS % 2 != 0)
            throw std::invalid_argument("strip grids with shared or equispaced bases need even n_S");

        std::vector<ManifoldPoint> fiber_base;
        if (mode == GridMode::Fibered) {
            int nb = nS / 2;
            double phase = 2.0 * kPi * unif();
            for (int i = 0; i < nb; ++i) {
                std::vector<double> alpha;
                if (pj == 2) {
                    double a = phase + 2.0 * kPi * i / nb;
                    alpha = {std::cos(a), std::sin(a)};
                } else {
                    alpha = unit_vec(pj);
                }
                fiber_base.push_back(assemble(equator_point(alpha)));
            }
        }

        for (int r = 1; r <= nR; ++r) {
            double s = 1.0 - 2.0 * latitude_profile(pj, (1.0 - tau(r)) / 2.0);
            double delta = 0.5 * kPi * s;  // latitude offset from the equator
            double phase = 2.0 * kPi * unif();
            for (int i = 0; i < nS; ++i) {
                ManifoldPoint base;
                double sigma;
                int fiber = -1;
                if (mode == GridMode::Fibered) {
                    base = fiber_base[i / 2];
                    sigma = (i % 2 == 0) ? 1.0 : -1.0;
                    fiber = i;
                } else if (equis) {
                    int half = i % (nS / 2);
                    sigma = (i < nS / 2) ? 1.0 : -1.0;
                    double a = phase + 2.0 * kPi * half / (nS / 2);
                    base = assemble(equator_point({std::cos(a), std::sin(a)}));
                } else {
                    base = assemble(equator_point(unit_vec(pj)));
                    sigma = unif() < 0.5 ? 1.0 : -1.0;
                }
                // exp_y(delta * sigma * b) = cos(delta) y + sigma sin(delta) b
                std::vector<double> fj(b.size());
                for (std::size_t c = 0; c < b.size(); ++c)
                    fj[c] = std::cos(delta) * base.f[j][c] + sigma * std::sin(delta) * b[c];
                normalize(fj);
                ManifoldPoint pt = with_factor(base, std::move(fj));
                TangentVector nv = zero_normal(base);
                for (std::size_t c = 0; c < b.size(); ++c) nv.f[j][c] = 0.5 * kPi * sigma * b[c];
                push(std::move(pt), r, {std::move(base), std::move(nv), s, fiber});
            }
        }
    }

    // --- toroidal equator strip on a circle component ---
    void torus_equator() {
        const int k0 = center.factor;
        if (k0 < 0 || k0 >= spec.num_factors())
            throw std::invalid_argument("equator component out of range");
        if (spec.factors[k0] != 1)
            throw std::invalid_argument("toroidal equator needs a circle component");
        const double t0 = center.angle;

        auto assemble = [&](double angle) {
            ManifoldPoint pt;
            for (int k = 0; k < spec.num_factors(); ++k) {
                if (k == k0)
                    pt.f.push_back({std::cos(angle), std::sin(angle)});
                else
                    pt.f.push_back(uniform_factor(spec.factors[k]));
            }
            return pt;
        };
        auto with_angle = [&](const ManifoldPoint& src, double angle) {
            ManifoldPoint pt = src;
            pt.f[k0] = {std::cos(angle), std::sin(angle)};
            return pt;
        };

        for (int i = 0; i < n0; ++i) {
            ManifoldPoint base = assemble(t0);
            push(base, 0, {base, zero_normal(base), 0.0, -1});
        }

        const bool equis = (mode == GridMode::Equispaced);
        if (equis && !(spec.num_factors() == 2 && spec.is_torus()))
            throw std::invalid_argument("equispaced grids need 1-d contours");
        if ((mode == GridMode::Fibered || equis) && nS % 2 != 0)
            throw std::invalid_argument("strip grids with shared or equispaced bases need even n_S");

        std::vector<ManifoldPoint> fiber_base;
        if (mode == GridMode::Fibered) {
            int nb = nS / 2;
            bool one_dim = (spec.num_factors() == 2 && spec.is_torus());
            double phase = 2.0 * kPi * unif();
            for (int i = 0; i < nb; ++i) {
                if (one_dim) {
                    ManifoldPoint base = assemble(t0);
                    double a = phase + 2.0 * kPi * i / nb;
                    int other = 1 - k0;
                    base.f[other] = {std::cos(a), std::sin(a)};
                    fiber_base.push_back(std::move(base));
                } else {
                    fiber_base.push_back(assemble(t0));
                }
            }
        }

        for (int r = 1; r <= nR; ++r) {
            double s = tau(r);
            double phase = 2.0 * kPi * unif();
            for (int i = 0; i < nS; ++i) {
                ManifoldPoint base;
                double sigma;
                int fiber = -1;
                if (mode == GridMode::Fibered) {
                    base = fiber_base[i / 2];
                    sigma = (i % 2 == 0) ? 1.0 : -1.0;
                    fiber = i;
                } else if (equis) {
                    int half = i % (nS / 2);
                    sigma = (i < nS / 2) ? 1.0 : -1.0;
                    base = assemble(t0);
                    int other = 1 - k0;
                    double a = phase + 2.0 * kPi * half / (nS / 2);
                    base.f[other] = {std::cos(a), std::sin(a)};
                } else {
                    base = assemble(t0);
                    sigma = unif() < 0.5 ? 1.0 : -1.0;
                }
                ManifoldPoint pt = with_angle(base, wrap_angle(t0 + sigma * kPi * s));
                TangentVector nv = zero_normal(base);
                nv.f[k0][0] = -std::sin(t0) * sigma * kPi;
                nv.f[k0][1] = std::cos(t0) * sigma * kPi;
                push(std::move(pt), r, {std::move(base), std::move(nv), s, fiber});
            }
        }
    }

    StructuredGrid build() {
        switch (center.kind) {
            case CenterSpec::Kind::Cap:
                validate_point(spec, center.point);
                if (spec.is_single_sphere())
                    sphere_cap();
                else if (spec.is_torus())
                    torus_cap();
                else
                    polysphere_cap();
                break;
            case CenterSpec::Kind::Strip:
                validate_point(spec, center.point);
                sphere_strip();
                break;
            case CenterSpec::Kind::TorusEquator:
                torus_equator();
                break;
        }
        return std::move(out);
    }
};

}  // namespace

StructuredGrid build_grid(const ManifoldSpec& spec, const CenterSpec& center, int n_R, int n_S,
                          int n_0, std::uint64_t seed, GridMode mode) {
    if (n_R < 1 || n_S < 1 || n_0 < 0) throw std::invalid_argument("bad grid factorization");
    GridBuilder gb(spec, center, n_R, n_S, n_0, seed, mode);
    return gb.build();
}

// ---- fitting ---------------------------------------------------------------

namespace {

void check_distinct(const std::vector<ManifoldPoint>& sample) {
    const int n = static_cast<int>(sample.size());
    std::vector<std::vector<double>> flat(n);
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) {
        flat[i] = sample[i].flat();
        idx[i] = i;
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return flat[a] < flat[b]; });
    for (int k = 1; k < n; ++k) {
        const auto& a = flat[idx[k - 1]];
        const auto& b = flat[idx[k]];
        double m = 0.0;
        for (std::size_t c = 0; c < a.size(); ++c) m = std::max(m, std::abs(a[c] - b[c]));
        if (m < 1e-12) throw std::invalid_argument("duplicate sample points");
    }
}

QuantileFit finish_fit(const ManifoldSpec& spec, const std::vector<ManifoldPoint>& sample,
                       StructuredGrid grid, ManifoldPoint theta_hat) {
    const int n = static_cast<int>(sample.size());
    if (n != grid.size()) throw std::invalid_argument("sample size must match grid size");
    CostMatrix cm = cost_matrix(spec, sample, grid.points);
    AssignmentPlan plan = solve_assignment(cm);

    QuantileFit fit;
    fit.spec = spec;
    fit.sample = sample;
    fit.assignment = plan.perm;
    fit.ranks.resize(n);
    fit.signs.resize(n);
    for (int i = 0; i < n; ++i) {
        int g = plan.perm[i];
        fit.ranks[i] = grid.ring_index[g];
        const GridPointRecord& rec = grid.record[g];
        TangentVector s;
        s.base = rec.base;
        s.f.resize(rec.base.num_factors());
        for (int k = 0; k < rec.base.num_factors(); ++k)
            s.f[k].assign(rec.base.f[k].size(), 0.0);
        if (fit.ranks[i] > 0) {
            double nn = rec.normal.norm();
            if (nn > 0.0) {
                for (int k = 0; k < rec.base.num_factors(); ++k)
                    for (std::size_t c = 0; c < rec.normal.f[k].size(); ++c)
                        s.f[k][c] = rec.normal.f[k][c] / nn;
            }
        }
        fit.signs[i] = std::move(s);
    }
    fit.theta_hat = std::move(theta_hat);
    fit.grid = std::move(grid);
    return fit;
}

}  // namespace

QuantileFit fit_quantiles(const ManifoldSpec& spec, const std::vector<ManifoldPoint>& sample,
                          const CenterRule& rule, int n_R, int n_S, int n_0, std::uint64_t seed,
                          GridMode mode) {
    const int n = static_cast<int>(sample.size());
    if (n != n_0 + n_R * n_S) throw std::invalid_argument("sample size must equal n_0 + n_R*n_S");
    for (const auto& y : sample) validate_point(spec, y);
    check_distinct(sample);

    CenterSpec center;
    ManifoldPoint theta_hat;
    if (rule.kind == CenterRule::Kind::FixedCenter) {
        center = rule.fixed;
        theta_hat = center.kind == CenterSpec::Kind::TorusEquator
                        ? ManifoldPoint{}
                        : center.point;
    } else {
        // match against an i.i.d. uniform reference grid, then anchor the
        // center at the image of the sample point nearest the Fréchet mean
        std::vector<ManifoldPoint> g0 = uniform_sample(spec, n, derive_seed(seed, 1));
        AssignmentPlan step1 = solve_assignment(cost_matrix(spec, sample, g0));
        ManifoldPoint theta = frechet_mean(spec, sample);
        int istar = 0;
        double dbest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double d = geodesic_distance(spec, sample[i], theta);
            if (d < dbest) {
                dbest = d;
                istar = i;
            }
        }
        ManifoldPoint gstar = g0[step1.perm[istar]];
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
        theta_hat = std::move(gstar);
    }

    StructuredGrid grid = build_grid(spec, center, n_R, n_S, n_0, derive_seed(seed, 2), mode);
    return finish_fit(spec, sample, std::move(grid), std::move(theta_hat));
}

QuantileFit fit_with_grid(const ManifoldSpec& spec, const std::vector<ManifoldPoint>& sample,
                          const StructuredGrid& grid) {
    for (const auto& y : sample) validate_point(spec, y);
    check_distinct(sample);
    ManifoldPoint theta = grid.center.kind == CenterSpec::Kind::TorusEquator
                              ? ManifoldPoint{}
                              : grid.center.point;
    return finish_fit(spec, sample, grid, std::move(theta));
}

std::vector<ManifoldPoint> extract_contour(const QuantileFit& fit, int r) {
    if (r < 0 || r > fit.grid.nR || (r == 0 && fit.grid.n0 == 0))
        throw std::invalid_argument("contour order out of range");
    std::vector<ManifoldPoint> out;
    for (std::size_t i = 0; i < fit.sample.size(); ++i)
        if (fit.ranks[i] == r) out.push_back(fit.sample[i]);
    return out;
}

std::vector<ManifoldPoint> extract_region(const QuantileFit& fit, int r) {
    if (r < 0 || r > fit.grid.nR || (r == 0 && fit.grid.n0 == 0))
        throw std::invalid_argument("region order out of range");
    std::vector<ManifoldPoint> out;
    for (std::size_t i = 0; i < fit.sample.size(); ++i)
        if (fit.ranks[i] <= r) out.push_back(fit.sample[i]);
    return out;
}

double hausdorff_distance(const ManifoldSpec& spec, const std::vector<ManifoldPoint>& set_a,
                          const std::vector<ManifoldPoint>& set_b) {
    if (set_a.empty() || set_b.empty())
        throw std::invalid_argument("hausdorff_distance: empty set");
    auto directed = [&](const std::vector<ManifoldPoint>& A, const std::vector<ManifoldPoint>& B) {
        double worst = 0.0;
        for (const auto& a : A) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& b : B) best = std::min(best, geodesic_distance(spec, a, b));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(set_a, set_b), directed(set_b, set_a));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace mfq
