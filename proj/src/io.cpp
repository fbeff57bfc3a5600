#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "manifoldq/io.hpp"

namespace mfq::io {

namespace {

using nlohmann::json;

const double kPi = 3.14159265358979323846;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << std::setprecision(17);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open for reading: " + path);
    return in;
}

// minimal CSV field splitter with double-quote support
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

json point_to_json(const ManifoldPoint& p) { return json(p.flat()); }

ManifoldPoint point_from_json(const ManifoldSpec& spec, const json& j) {
    return ManifoldPoint::from_flat(spec, j.get<std::vector<double>>());
}

const char* mode_name(GridMode m) {
    switch (m) {
        case GridMode::IID: return "iid";
        case GridMode::Equispaced: return "equispaced";
        default: return "fibered";
    }
}

GridMode mode_from_name(const std::string& s) {
    if (s == "iid") return GridMode::IID;
    if (s == "equispaced") return GridMode::Equispaced;
    if (s == "fibered") return GridMode::Fibered;
    throw ParseError("unknown grid mode: " + s);
}

json center_to_json(const CenterSpec& c) {
    json j;
    j["factor"] = c.factor;
    switch (c.kind) {
        case CenterSpec::Kind::Cap:
            j["kind"] = "cap";
            j["point"] = point_to_json(c.point);
            break;
        case CenterSpec::Kind::Strip:
            j["kind"] = "strip";
            j["point"] = point_to_json(c.point);
            break;
        default:
            j["kind"] = "torus_equator";
            j["angle"] = c.angle;
            break;
    }
    return j;
}

CenterSpec center_from_json(const ManifoldSpec& spec, const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "cap") return CenterSpec::cap(point_from_json(spec, j.at("point")));
    if (kind == "strip")
        return CenterSpec::strip(j.at("factor").get<int>(), point_from_json(spec, j.at("point")));
    if (kind == "torus_equator")
        return CenterSpec::torus_equator(j.at("factor").get<int>(), j.at("angle").get<double>());
    throw ParseError("unknown center kind: " + kind);
}

json grid_to_json(const StructuredGrid& g) {
    json j;
    j["manifold"] = g.spec.name();
    j["center"] = center_to_json(g.center);
    j["n0"] = g.n0;
    j["nR"] = g.nR;
    j["nS"] = g.nS;
    j["mode"] = mode_name(g.mode);
    j["points"] = json::array();
    for (const auto& p : g.points) j["points"].push_back(point_to_json(p));
    j["ring"] = g.ring_index;
    j["record"] = json::array();
    for (const auto& r : g.record) {
        json rj;
        rj["base"] = point_to_json(r.base);
        rj["normal"] = json::array();
        for (const auto& fv : r.normal.f) rj["normal"].push_back(fv);
        rj["t"] = r.t;
        rj["fiber"] = r.fiber;
        j["record"].push_back(std::move(rj));
    }
    return j;
}

StructuredGrid grid_from_json(const json& j) {
    StructuredGrid g;
    g.spec = ManifoldSpec::parse(j.at("manifold").get<std::string>());
    g.center = center_from_json(g.spec, j.at("center"));
    g.n0 = j.at("n0").get<int>();
    g.nR = j.at("nR").get<int>();
    g.nS = j.at("nS").get<int>();
    g.mode = mode_from_name(j.at("mode").get<std::string>());
    for (const auto& pj : j.at("points")) g.points.push_back(point_from_json(g.spec, pj));
    g.ring_index = j.at("ring").get<std::vector<int>>();
    for (const auto& rj : j.at("record")) {
        GridPointRecord r;
        r.base = point_from_json(g.spec, rj.at("base"));
        r.normal.base = r.base;
        for (const auto& fv : rj.at("normal")) r.normal.f.push_back(fv.get<std::vector<double>>());
        r.t = rj.at("t").get<double>();
        r.fiber = rj.at("fiber").get<int>();
        g.record.push_back(std::move(r));
    }
    return g;
}

}  // namespace

void write_points_csv(const std::string& path, const ManifoldSpec& spec,
                      const std::vector<ManifoldPoint>& points) {
    auto out = open_out(path);
    const int d = spec.ambient_dim();
    for (int c = 0; c < d; ++c) out << (c ? "," : "") << "c" << c;
    out << "\n";
    for (const auto& p : points) {
        auto flat = p.flat();
        for (int c = 0; c < d; ++c) out << (c ? "," : "") << flat[c];
        out << "\n";
    }
}

std::vector<ManifoldPoint> read_points_csv(const std::string& path, const ManifoldSpec& spec) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file: " + path);
    std::vector<ManifoldPoint> points;
    const int d = spec.ambient_dim();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (static_cast<int>(fields.size()) < d) throw ParseError("short row in " + path);
        std::vector<double> flat(d);
        for (int c = 0; c < d; ++c) flat[c] = std::stod(fields[c]);
        points.push_back(ManifoldPoint::from_flat(spec, flat));
    }
    return points;
}

void write_contour_csv(const std::string& path, const ManifoldSpec& spec,
                       const std::vector<ManifoldPoint>& points, const std::vector<int>& ring) {
    if (points.size() != ring.size()) throw ParseError("contour point/ring length mismatch");
    auto out = open_out(path);
    const int d = spec.ambient_dim();
    for (int c = 0; c < d; ++c) out << "c" << c << ",";
    out << "ring\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto flat = points[i].flat();
        for (int c = 0; c < d; ++c) out << flat[c] << ",";
        out << ring[i] << "\n";
    }
}

ContourFile read_contour_csv(const std::string& path, const ManifoldSpec& spec) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file: " + path);
    ContourFile cf;
    const int d = spec.ambient_dim();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (static_cast<int>(fields.size()) < d + 1) throw ParseError("short row in " + path);
        std::vector<double> flat(d);
        for (int c = 0; c < d; ++c) flat[c] = std::stod(fields[c]);
        cf.points.push_back(ManifoldPoint::from_flat(spec, flat));
        cf.ring.push_back(std::stoi(fields[d]));
    }
    return cf;
}

void write_ranks_csv(const std::string& path, const QuantileFit& fit) {
    auto out = open_out(path);
    const int d = fit.spec.ambient_dim();
    out << "index,rank";
    for (int c = 0; c < d; ++c) out << ",s" << c;
    out << "\n";
    for (std::size_t i = 0; i < fit.ranks.size(); ++i) {
        out << i << "," << fit.ranks[i];
        auto s = fit.signs[i].flat();
        for (int c = 0; c < d; ++c) out << "," << s[c];
        out << "\n";
    }
}

RanksFile read_ranks_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file: " + path);
    RanksFile rf;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() < 2) throw ParseError("short row in " + path);
        rf.rank.push_back(std::stoi(fields[1]));
        std::vector<double> s;
        for (std::size_t c = 2; c < fields.size(); ++c) s.push_back(std::stod(fields[c]));
        rf.sign.push_back(std::move(s));
    }
    return rf;
}

void write_coupling_csv(const std::string& path, const Coupling& coupling) {
    auto out = open_out(path);
    out << "row,col,mass\n";
    for (const auto& e : coupling.entries) out << e.i << "," << e.j << "," << e.mass << "\n";
}

Coupling read_coupling_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file: " + path);
    Coupling cp;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() < 3) throw ParseError("short row in " + path);
        Coupling::Entry e;
        e.i = std::stoi(fields[0]);
        e.j = std::stoi(fields[1]);
        e.mass = std::stod(fields[2]);
        cp.rows = std::max(cp.rows, e.i + 1);
        cp.cols = std::max(cp.cols, e.j + 1);
        cp.entries.push_back(e);
    }
    return cp;
}

void write_fit_json(const std::string& path, const QuantileFit& fit) {
    json j;
    j["manifold"] = fit.spec.name();
    j["theta_hat"] = point_to_json(fit.theta_hat);
    j["sample"] = json::array();
    for (const auto& p : fit.sample) j["sample"].push_back(point_to_json(p));
    j["assignment"] = fit.assignment;
    j["ranks"] = fit.ranks;
    j["signs"] = json::array();
    for (const auto& s : fit.signs) {
        json sj = json::array();
        for (const auto& fv : s.f) sj.push_back(fv);
        j["signs"].push_back(std::move(sj));
    }
    j["grid"] = grid_to_json(fit.grid);
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

QuantileFit read_fit_json(const std::string& path) {
    auto in = open_in(path);
    json j;
    in >> j;
    QuantileFit fit;
    fit.spec = ManifoldSpec::parse(j.at("manifold").get<std::string>());
    fit.theta_hat = point_from_json(fit.spec, j.at("theta_hat"));
    for (const auto& pj : j.at("sample")) fit.sample.push_back(point_from_json(fit.spec, pj));
    fit.assignment = j.at("assignment").get<std::vector<int>>();
    fit.ranks = j.at("ranks").get<std::vector<int>>();
    fit.grid = grid_from_json(j.at("grid"));
    std::size_t idx = 0;
    for (const auto& sj : j.at("signs")) {
        TangentVector v;
        v.base = fit.grid.points[fit.assignment[idx]];
        for (const auto& fv : sj) v.f.push_back(fv.get<std::vector<double>>());
        fit.signs.push_back(std::move(v));
        ++idx;
    }
    return fit;
}

void write_points_json(const std::string& path, const ManifoldSpec& spec,
                       const std::vector<ManifoldPoint>& points) {
    json j;
    j["manifold"] = spec.name();
    j["points"] = json::array();
    for (const auto& p : points) j["points"].push_back(point_to_json(p));
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

std::vector<ManifoldPoint> read_points_json(const std::string& path) {
    auto in = open_in(path);
    json j;
    in >> j;
    ManifoldSpec spec = ManifoldSpec::parse(j.at("manifold").get<std::string>());
    std::vector<ManifoldPoint> points;
    for (const auto& pj : j.at("points")) points.push_back(point_from_json(spec, pj));
    return points;
}

CometData read_comets_csv(const std::string& path, const std::string& node_col,
                          const std::string& peri_col, const std::string& name_col) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file: " + path);
    auto header = split_csv(line);
    int ci_node = -1, ci_peri = -1, ci_name = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        // tolerate padded headers from hand-exported files
        std::string h = header[c];
        h.erase(0, h.find_first_not_of(" \t"));
        h.erase(h.find_last_not_of(" \t") + 1);
        if (h == node_col) ci_node = static_cast<int>(c);
        if (h == peri_col) ci_peri = static_cast<int>(c);
        if (h == name_col) ci_name = static_cast<int>(c);
    }
    if (ci_node < 0 || ci_peri < 0)
        throw ParseError("missing angle columns '" + node_col + "'/'" + peri_col + "' in " + path);

    CometData data;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv(line);
        int need = std::max(ci_node, ci_peri);
        if (static_cast<int>(fields.size()) <= need) {
            ++data.dropped;
            continue;
        }
        try {
            double node_deg = std::stod(fields[ci_node]);
            double peri_deg = std::stod(fields[ci_peri]);
            CometRecord rec;
            rec.Omega = wrap_angle(node_deg * kPi / 180.0);
            rec.omega = wrap_angle(peri_deg * kPi / 180.0);
            if (ci_name >= 0 && ci_name < static_cast<int>(fields.size()))
                rec.designation = fields[ci_name];
            data.records.push_back(std::move(rec));
        } catch (const std::exception&) {
            ++data.dropped;
        }
    }
    return data;
}

}  // namespace mfq::io
