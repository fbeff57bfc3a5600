#pragma once

#include <string>

#include "manifoldq/quantile.hpp"
#include "manifoldq/regression.hpp"

namespace mfq::io {

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Point clouds as CSV, one flat coordinate per column (c0, c1, ...).
void write_points_csv(const std::string& path, const ManifoldSpec& spec,
                      const std::vector<ManifoldPoint>& points);
std::vector<ManifoldPoint> read_points_csv(const std::string& path, const ManifoldSpec& spec);

// Contours / regions: flat coordinates plus a ring column.
struct ContourFile {
    std::vector<ManifoldPoint> points;
    std::vector<int> ring;
};
void write_contour_csv(const std::string& path, const ManifoldSpec& spec,
                       const std::vector<ManifoldPoint>& points, const std::vector<int>& ring);
ContourFile read_contour_csv(const std::string& path, const ManifoldSpec& spec);

// Per-observation transport summary: rank plus the flat sign vector.
void write_ranks_csv(const std::string& path, const QuantileFit& fit);
struct RanksFile {
    std::vector<int> rank;
    std::vector<std::vector<double>> sign;
};
RanksFile read_ranks_csv(const std::string& path);

// Sparse coupling triples (row, col, mass).
void write_coupling_csv(const std::string& path, const Coupling& coupling);
Coupling read_coupling_csv(const std::string& path);

// Full fit snapshot (sample, grid, assignment, ranks, signs, center) as JSON.
void write_fit_json(const std::string& path, const QuantileFit& fit);
QuantileFit read_fit_json(const std::string& path);

// Points as JSON (used when --format json is requested for samples).
void write_points_json(const std::string& path, const ManifoldSpec& spec,
                       const std::vector<ManifoldPoint>& points);
std::vector<ManifoldPoint> read_points_json(const std::string& path);

// Orbital-element CSV reader. Angle columns are in degrees; values are
// converted to radians and wrapped to [-pi, pi). Rows with missing or
// unparseable angles are dropped and counted.
struct CometRecord {
    std::string designation;
    double Omega = 0.0;  // longitude of ascending node (radians)
    double omega = 0.0;  // argument of perihelion (radians)
};
struct CometData {
    std::vector<CometRecord> records;
    int dropped = 0;
};
CometData read_comets_csv(const std::string& path, const std::string& node_col = "om",
                          const std::string& peri_col = "w",
                          const std::string& name_col = "full_name");

}  // namespace mfq::io
