#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "manifoldq/presets.hpp"

namespace py = pybind11;
using namespace mfq;

namespace {

std::vector<std::vector<double>> to_flat(const std::vector<ManifoldPoint>& pts) {
    std::vector<std::vector<double>> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(p.flat());
    return out;
}

std::vector<ManifoldPoint> from_flat(const ManifoldSpec& spec,
                                     const std::vector<std::vector<double>>& coords) {
    std::vector<ManifoldPoint> out;
    out.reserve(coords.size());
    for (const auto& c : coords) out.push_back(ManifoldPoint::from_flat(spec, c));
    return out;
}

GridMode parse_mode(const std::string& mode) {
    if (mode == "iid") return GridMode::IID;
    if (mode == "equispaced") return GridMode::Equispaced;
    if (mode == "fibered") return GridMode::Fibered;
    throw std::invalid_argument("unknown grid mode: " + mode);
}

CenterRule parse_rule(const std::string& center, int factor) {
    if (center == "cap") return CenterRule::frechet_cap();
    if (center == "strip") return CenterRule::frechet_strip(factor);
    throw std::invalid_argument("unknown center rule: " + center);
}

py::dict fit_to_dict(const QuantileFit& fit) {
    py::dict d;
    d["theta_hat"] = fit.theta_hat.flat();
    d["assignment"] = fit.assignment;
    d["ranks"] = fit.ranks;
    std::vector<std::vector<double>> signs;
    for (const auto& s : fit.signs) signs.push_back(s.flat());
    d["signs"] = signs;
    d["grid_points"] = to_flat(fit.grid.points);
    d["grid_ring"] = fit.grid.ring_index;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "center-outward quantiles on products of spheres";

    m.def("manifold_dim", [](const std::string& name) { return ManifoldSpec::parse(name).dim(); });
    m.def("ambient_dim",
          [](const std::string& name) { return ManifoldSpec::parse(name).ambient_dim(); });

    m.def(
        "geodesic_distance",
        [](const std::string& manifold, const std::vector<double>& a,
           const std::vector<double>& b) {
            auto spec = ManifoldSpec::parse(manifold);
            return geodesic_distance(spec, ManifoldPoint::from_flat(spec, a),
                                     ManifoldPoint::from_flat(spec, b));
        },
        py::arg("manifold"), py::arg("a"), py::arg("b"));

    m.def(
        "uniform_sample",
        [](const std::string& manifold, int n, std::uint64_t seed) {
            auto spec = ManifoldSpec::parse(manifold);
            return to_flat(uniform_sample(spec, n, seed));
        },
        py::arg("manifold"), py::arg("n"), py::arg("seed") = 0);

    m.def(
        "sample_preset",
        [](const std::string& name, int n, std::uint64_t seed, const std::string& manifold) {
            if (name == "uniform") {
                auto spec = ManifoldSpec::parse(manifold);
                return to_flat(sample_preset(name, n, seed, &spec));
            }
            return to_flat(sample_preset(name, n, seed));
        },
        py::arg("name"), py::arg("n"), py::arg("seed") = 0, py::arg("manifold") = "s2");
    m.def("preset_names", &preset_names);
    m.def("preset_manifold",
          [](const std::string& name) { return preset_manifold(name).name(); });

    m.def(
        "frechet_mean",
        [](const std::string& manifold, const std::vector<std::vector<double>>& points,
           const std::vector<double>& weights) {
            auto spec = ManifoldSpec::parse(manifold);
            return frechet_mean(spec, from_flat(spec, points), weights).flat();
        },
        py::arg("manifold"), py::arg("points"), py::arg("weights") = std::vector<double>{});

    m.def("latitude_profile", &latitude_profile, py::arg("p"), py::arg("tau"));

    m.def(
        "solve_assignment",
        [](const std::vector<std::vector<double>>& cost) {
            CostMatrix cm;
            cm.rows = static_cast<int>(cost.size());
            cm.cols = cm.rows ? static_cast<int>(cost[0].size()) : 0;
            for (const auto& row : cost)
                cm.c.insert(cm.c.end(), row.begin(), row.end());
            auto plan = solve_assignment(cm);
            return py::make_tuple(plan.perm, plan.objective);
        },
        py::arg("cost"));

    m.def(
        "fit_quantiles",
        [](const std::string& manifold, const std::vector<std::vector<double>>& points, int n_R,
           int n_S, int n_0, std::uint64_t seed, const std::string& center, int factor,
           const std::string& mode) {
            auto spec = ManifoldSpec::parse(manifold);
            auto fit = fit_quantiles(spec, from_flat(spec, points), parse_rule(center, factor),
                                     n_R, n_S, n_0, seed, parse_mode(mode));
            return fit_to_dict(fit);
        },
        py::arg("manifold"), py::arg("points"), py::arg("n_R"), py::arg("n_S"), py::arg("n_0"),
        py::arg("seed") = 0, py::arg("center") = "cap", py::arg("factor") = 0,
        py::arg("mode") = "iid");

    m.def(
        "extract_contour",
        [](const std::string& manifold, const std::vector<std::vector<double>>& points, int n_R,
           int n_S, int n_0, std::uint64_t seed, const std::string& center, int factor,
           const std::string& mode, int r) {
            auto spec = ManifoldSpec::parse(manifold);
            auto fit = fit_quantiles(spec, from_flat(spec, points), parse_rule(center, factor),
                                     n_R, n_S, n_0, seed, parse_mode(mode));
            return to_flat(extract_contour(fit, r));
        },
        py::arg("manifold"), py::arg("points"), py::arg("n_R"), py::arg("n_S"), py::arg("n_0"),
        py::arg("seed"), py::arg("center"), py::arg("factor"), py::arg("mode"), py::arg("r"));

    py::register_exception<CutLocusError>(m, "CutLocusError");
    py::register_exception<EmptyWindowError>(m, "EmptyWindowError");
}
