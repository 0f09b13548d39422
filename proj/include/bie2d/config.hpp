#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "bie2d/solve.hpp"

namespace bie2d {

// Symbolic boundary-data specification.  Named forms are functions of the
// polar angle theta = 2 pi q of the curve parameter.
struct DataSpec {
  std::string type = "zero";  // zero | sine_mode | windowed_cosine |
                              // conformal_pullback | fourier
  int m = 3;                  // sine_mode, conformal_pullback
  double alpha = 0.4;         // conformal_pullback
  std::vector<double> cos_coef, sin_coef;  // fourier: modes 1, 2, ...
};

struct EvalSpec {
  std::vector<Vec2> points;
  struct Ray {
    bool present = false;
    double theta = 0.0;
    double xhat_min = 1e-6, xhat_max = 0.1;
    int count = 100;
    bool log_spaced = true;
    bool include_zero = true;
  } ray;
  struct Raster {
    bool present = false;
    Vec2 lo = Vec2::Zero(), hi = Vec2::Zero();
    int nx = 0, ny = 0;
  } raster;
  bool any() const { return !points.empty() || ray.present || raster.present; }
};

struct ReferenceSpec {
  bool present = false;
  std::string type = "concentric";  // concentric | nonconcentric
  int m = 3;
  double sigma = 2.0;
  double alpha = 0.4;
};

struct OutputSpec {
  std::string densities = "densities.csv";
  std::string field = "field.csv";
  std::string report = "report.json";
};

struct ProblemConfig {
  int version = 1;
  std::vector<Curve> curves;
  std::vector<double> sigma;
  std::vector<DataSpec> data;  // one per curve; missing entries mean zero
  SolveSettings solve;
  EvalSpec evaluation;
  ReferenceSpec reference;
  bool has_reference_point = false;
  Vec2 reference_point = Vec2::Zero();
  OutputSpec output;
};

// Parses and validates a config document; throws BadConfig with a located
// message on schema violations.
ProblemConfig parse_config(const nlohmann::json& j);
ProblemConfig load_config(const std::string& path);

// Canonical serialization of a parsed config; parse(canonical(c)) == c.
nlohmann::json canonical_json(const ProblemConfig& c);

RegionTree build_tree(const ProblemConfig& c);
BoundaryFn make_boundary_fn(const DataSpec& spec);
std::vector<BoundaryFn> build_boundary_data(const ProblemConfig& c);
std::vector<Vec2> build_eval_points(const EvalSpec& spec);

}  // namespace bie2d
