#include <cmath>
#include <random>

#include <doctest.h>

#include "manifoldq/geometry.hpp"

using namespace mfq;

namespace {

const double kPi = 3.14159265358979323846;

ManifoldPoint s2_point(double x, double y, double z) {
    ManifoldPoint p;
    p.f.push_back({x, y, z});
    return p;
}

}  // namespace

TEST_CASE("manifold spec parsing") {
    CHECK(ManifoldSpec::parse("s2").factors == std::vector<int>{2});
    CHECK(ManifoldSpec::parse("t2").factors == std::vector<int>{1, 1});
    CHECK(ManifoldSpec::parse("t3").factors == std::vector<int>{1, 1, 1});
    CHECK(ManifoldSpec::parse("s1xs2").factors == std::vector<int>{1, 2});
    CHECK(ManifoldSpec::parse("t2").name() == "t2");
    CHECK(ManifoldSpec::parse("s1xs2").name() == "s1xs2");
    CHECK(ManifoldSpec::parse("s2").dim() == 2);
    CHECK(ManifoldSpec::parse("t3").ambient_dim() == 6);
    CHECK(ManifoldSpec::parse("t2").is_torus());
    CHECK(!ManifoldSpec::parse("s1xs2").is_torus());
    CHECK_THROWS_AS(ManifoldSpec::parse("q2"), DimensionError);
    CHECK_THROWS_AS(ManifoldSpec::parse(""), DimensionError);
    CHECK_THROWS_AS(ManifoldSpec::parse("s0"), DimensionError);
}

TEST_CASE("geodesic distance basic values") {
    auto s2 = ManifoldSpec::parse("s2");
    CHECK(geodesic_distance(s2, s2_point(1, 0, 0), s2_point(0, 1, 0)) ==
          doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(geodesic_distance(s2, s2_point(0, 0, 1), s2_point(0, 0, 1)) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(geodesic_distance(s2, s2_point(0, 0, 1), s2_point(0, 0, -1)) ==
          doctest::Approx(kPi).epsilon(1e-12));

    // product metric: l2 combination of per-factor arcs
    auto t2 = ManifoldSpec::parse("t2");
    auto y = point_from_angles(t2, {0.0, 0.0});
    auto z = point_from_angles(t2, {kPi / 2, kPi / 2});
    CHECK(geodesic_distance(t2, y, z) == doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("exp map closed-form cases") {
    auto s2 = ManifoldSpec::parse("s2");
    auto y = s2_point(0, 0, 1);
    TangentVector v;
    v.base = y;
    v.f.push_back({kPi, 0, 0});
    auto z = exp_map(s2, y, v);
    CHECK(std::abs(z.f[0][0]) < 1e-10);
    CHECK(std::abs(z.f[0][2] + 1.0) < 1e-10);

    v.f[0] = {0, 0, 0};
    auto same = exp_map(s2, y, v);
    CHECK(geodesic_distance(s2, same, y) < 1e-12);

    auto s1 = ManifoldSpec::parse("s1");
    ManifoldPoint c;
    c.f.push_back({1.0, 0.0});
    TangentVector w;
    w.base = c;
    w.f.push_back({0.0, kPi / 2});
    auto q = exp_map(s1, c, w);
    CHECK(std::atan2(q.f[0][1], q.f[0][0]) == doctest::Approx(kPi / 2).epsilon(1e-10));
}

TEST_CASE("log map values and errors") {
    auto s2 = ManifoldSpec::parse("s2");
    auto y = s2_point(0, 0, 1);

    auto zero = log_map(s2, y, y);
    CHECK(zero.norm() < 1e-12);

    auto v = log_map(s2, y, s2_point(1, 0, 0));
    CHECK(v.f[0][0] == doctest::Approx(kPi / 2).epsilon(1e-10));
    CHECK(std::abs(v.f[0][1]) < 1e-12);
    CHECK(std::abs(v.f[0][2]) < 1e-12);

    CHECK_THROWS_AS(log_map(s2, y, s2_point(0, 0, -1)), CutLocusError);
}

TEST_CASE("exp/log round trip away from the cut locus") {
    for (const char* name : {"s2", "t2", "s1xs2", "s3"}) {
        auto spec = ManifoldSpec::parse(name);
        auto ys = uniform_sample(spec, 100, 11);
        auto zs = uniform_sample(spec, 100, 12);
        double worst = 0.0;
        int tested = 0;
        for (int i = 0; i < 100; ++i) {
            if (cut_locus_distance(spec, ys[i], zs[i]) < 0.1) continue;
            auto v = log_map(spec, ys[i], zs[i]);
            CHECK(v.norm() ==
                  doctest::Approx(geodesic_distance(spec, ys[i], zs[i])).epsilon(1e-10));
            auto back = exp_map(spec, ys[i], v);
            // compare coordinates: arccos-based distance bottoms out near 2e-8
            // for nearly identical unit vectors
            auto bf = back.flat();
            auto zf = zs[i].flat();
            for (std::size_t c = 0; c < bf.size(); ++c)
                worst = std::max(worst, std::abs(bf[c] - zf[c]));
            ++tested;
        }
        CHECK(tested > 50);
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("tangency of log map output") {
    auto spec = ManifoldSpec::parse("s1xs2");
    auto ys = uniform_sample(spec, 50, 21);
    auto zs = uniform_sample(spec, 50, 22);
    for (int i = 0; i < 50; ++i) {
        if (cut_locus_distance(spec, ys[i], zs[i]) < 0.05) continue;
        auto v = log_map(spec, ys[i], zs[i]);
        for (int k = 0; k < spec.num_factors(); ++k) {
            double d = 0.0;
            for (std::size_t c = 0; c < v.f[k].size(); ++c) d += v.f[k][c] * ys[i].f[k][c];
            CHECK(std::abs(d) < 1e-10);
        }
    }
}

TEST_CASE("cut locus distance") {
    auto s2 = ManifoldSpec::parse("s2");
    CHECK(cut_locus_distance(s2, s2_point(0, 0, 1), s2_point(0, 0, -1)) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cut_locus_distance(s2, s2_point(0, 0, 1), s2_point(0, 0, 1)) ==
          doctest::Approx(kPi).epsilon(1e-12));

    auto t2 = ManifoldSpec::parse("t2");
    auto y = point_from_angles(t2, {0.0, 0.0});
    auto z = point_from_angles(t2, {kPi, 0.0});
    CHECK(cut_locus_distance(t2, y, z) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("metric axioms on random triples") {
    auto spec = ManifoldSpec::parse("s1xs2");
    auto a = uniform_sample(spec, 200, 31);
    auto b = uniform_sample(spec, 200, 32);
    auto c = uniform_sample(spec, 200, 33);
    for (int i = 0; i < 200; ++i) {
        double dab = geodesic_distance(spec, a[i], b[i]);
        double dba = geodesic_distance(spec, b[i], a[i]);
        double dac = geodesic_distance(spec, a[i], c[i]);
        double dcb = geodesic_distance(spec, c[i], b[i]);
        CHECK(dab >= 0.0);
        CHECK(std::abs(dab - dba) < 1e-10);
        CHECK(dab <= dac + dcb + 1e-10);
    }
}

TEST_CASE("rotation invariance of the sphere metric") {
    auto s2 = ManifoldSpec::parse("s2");
    // Householder-ish orthogonal map: reflection through a random plane
    std::mt19937_64 rng(44);
    std::normal_distribution<double> g;
    std::vector<double> u(3);
    double nn = 0.0;
    for (auto& x : u) x = g(rng);
    for (auto x : u) nn += x * x;
    nn = std::sqrt(nn);
    for (auto& x : u) x /= nn;
    auto reflect = [&](const ManifoldPoint& p) {
        double d = 0.0;
        for (int c = 0; c < 3; ++c) d += p.f[0][c] * u[c];
        ManifoldPoint q = p;
        for (int c = 0; c < 3; ++c) q.f[0][c] -= 2 * d * u[c];
        return q;
    };
    auto ys = uniform_sample(s2, 100, 45);
    auto zs = uniform_sample(s2, 100, 46);
    for (int i = 0; i < 100; ++i) {
        CHECK(std::abs(geodesic_distance(s2, ys[i], zs[i]) -
                       geodesic_distance(s2, reflect(ys[i]), reflect(zs[i]))) < 1e-10);
    }
}

TEST_CASE("uniform sampling statistics") {
    auto s2 = ManifoldSpec::parse("s2");
    auto pts = uniform_sample(s2, 100000, 7);
    double mean[3] = {0, 0, 0};
    int upper = 0;
    for (const auto& p : pts) {
        for (int c = 0; c < 3; ++c) mean[c] += p.f[0][c];
        if (p.f[0][2] > 0) ++upper;
    }
    for (int c = 0; c < 3; ++c) CHECK(std::abs(mean[c] / 100000) < 0.02);
    CHECK(std::abs(upper / 100000.0 - 0.5) < 0.01);

    // determinism
    auto again = uniform_sample(s2, 5, 7);
    for (int i = 0; i < 5; ++i) CHECK(again[i].flat() == pts[i].flat());
}

TEST_CASE("angle codec and wrapping") {
    CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2).epsilon(1e-12));
    CHECK(wrap_angle(-kPi) == doctest::Approx(-kPi).epsilon(1e-12));
    CHECK(wrap_angle(kPi) == doctest::Approx(-kPi).epsilon(1e-12));

    auto t2 = ManifoldSpec::parse("t2");
    auto p = point_from_angles(t2, {0.3, -1.2});
    auto a = angles_from_point(t2, p);
    CHECK(a[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(-1.2).epsilon(1e-12));

    CHECK_THROWS_AS(point_from_angles(ManifoldSpec::parse("s2"), {0.1}), DimensionError);
}

TEST_CASE("flat codec round trip and validation") {
    auto spec = ManifoldSpec::parse("s1xs2");
    auto pts = uniform_sample(spec, 10, 3);
    for (const auto& p : pts) {
        auto q = ManifoldPoint::from_flat(spec, p.flat());
        auto pf = p.flat();
        auto qf = q.flat();
        for (std::size_t c = 0; c < pf.size(); ++c) CHECK(std::abs(pf[c] - qf[c]) < 1e-12);
    }
    CHECK_THROWS_AS(ManifoldPoint::from_flat(spec, {1.0, 0.0}), DimensionError);

    ManifoldPoint bad;
    bad.f.push_back({2.0, 0.0, 0.0});  // not unit
    CHECK_THROWS_AS(validate_point(ManifoldSpec::parse("s2"), bad), DimensionError);
}
