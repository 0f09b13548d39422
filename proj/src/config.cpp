#include "bie2d/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "bie2d/errors.hpp"
#include "bie2d/reference.hpp"

namespace bie2d {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw BadConfig("config " + where + ": " + what);
}

double need_number(const json& j, const std::string& where,
                   const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    fail(where, "missing numeric field '" + key + "'");
  return j[key].get<double>();
}

double opt_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(key, "must be a number");
  return j[key].get<double>();
}

int opt_int(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) fail(key, "must be an integer");
  return j[key].get<int>();
}

bool opt_bool(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) fail(key, "must be a boolean");
  return j[key].get<bool>();
}

Vec2 parse_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number())
    fail(where, "expected a [x, y] pair");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

Curve parse_curve(const json& j, int index) {
  const std::string where = "curves[" + std::to_string(index) + "]";
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    fail(where, "expected an object with a 'kind' string");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "circle") {
    return Curve::circle(parse_point(j.value("center", json::array({0, 0})),
                                     where + ".center"),
                         need_number(j, where, "radius"));
  }
  if (kind == "ellipse") {
    const json axes = j.value("semi_axes", json());
    if (!axes.is_array() || axes.size() != 2)
      fail(where, "'semi_axes' must be [a, b]");
    return Curve::ellipse(parse_point(j.value("center", json::array({0, 0})),
                                      where + ".center"),
                          axes[0].get<double>(), axes[1].get<double>(),
                          opt_number(j, "rotation", 0.0));
  }
  if (kind == "polar_cosine") {
    return Curve::polar_cosine(
        parse_point(j.value("center", json::array({0, 0})), where + ".center"),
        need_number(j, where, "A"), need_number(j, where, "B"),
        opt_int(j, "C", 0));
  }
  if (kind == "fourier") {
    if (!j.contains("x") || !j.contains("y") || !j["x"].is_array() ||
        !j["y"].is_array())
      fail(where, "'x' and 'y' coefficient arrays required");
    return Curve::fourier(j["x"].get<std::vector<double>>(),
                          j["y"].get<std::vector<double>>());
  }
  fail(where, "unknown curve kind '" + kind + "'");
}

DataSpec parse_data(const json& j, int index) {
  const std::string where = "boundary_data[" + std::to_string(index) + "]";
  DataSpec spec;
  if (j.is_null()) return spec;
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    fail(where, "expected an object with a 'type' string");
  spec.type = j["type"].get<std::string>();
  if (spec.type == "zero" || spec.type == "windowed_cosine") return spec;
  if (spec.type == "sine_mode") {
    spec.m = opt_int(j, "m", 3);
    if (spec.m < 1) fail(where, "'m' must be >= 1");
    return spec;
  }
  if (spec.type == "conformal_pullback") {
    spec.m = opt_int(j, "m", 3);
    spec.alpha = opt_number(j, "alpha", 0.4);
    if (spec.m < 1) fail(where, "'m' must be >= 1");
    if (!(spec.alpha >= 0.0 && spec.alpha < 1.0))
      fail(where, "'alpha' must lie in [0, 1)");
    return spec;
  }
  if (spec.type == "fourier") {
    if (j.contains("cos")) spec.cos_coef = j["cos"].get<std::vector<double>>();
    if (j.contains("sin")) spec.sin_coef = j["sin"].get<std::vector<double>>();
    if (spec.cos_coef.empty() && spec.sin_coef.empty())
      fail(where, "fourier data needs 'cos' and/or 'sin' coefficients");
    return spec;
  }
  fail(where, "unknown data type '" + spec.type + "'");
}

SolveSettings parse_solve(const json& j) {
  SolveSettings s;
  if (j.is_null()) return s;
  if (!j.is_object()) fail("solve", "must be an object");
  s.gmres_tol = opt_number(j, "gmres_tol", s.gmres_tol);
  s.gmres_max_iters = opt_int(j, "gmres_max_iters", s.gmres_max_iters);
  s.gmres_restart = opt_int(j, "gmres_restart", s.gmres_restart);
  s.adapt_tol = opt_number(j, "adapt_tol", s.adapt_tol);
  s.max_rounds = opt_int(j, "max_rounds", s.max_rounds);
  s.initial_uniform_nodes =
      opt_int(j, "initial_uniform_nodes", s.initial_uniform_nodes);
  s.grid_shift = opt_number(j, "grid_shift", s.grid_shift);
  s.panel_nodes = opt_int(j, "panel_nodes", s.panel_nodes);
  s.max_panel_nodes = opt_int(j, "max_panel_nodes", s.max_panel_nodes);
  s.max_initial_panels = opt_int(j, "max_initial_panels", s.max_initial_panels);
  s.max_uniform_nodes = opt_int(j, "max_uniform_nodes", s.max_uniform_nodes);
  s.close_threshold = opt_number(j, "close_threshold", s.close_threshold);
  s.rescaled = opt_bool(j, "rescaled", s.rescaled);
  s.compat_tol = opt_number(j, "compat_tol", s.compat_tol);
  if (!(s.gmres_tol > 0) || !(s.adapt_tol > 0) || s.max_rounds < 1 ||
      s.gmres_max_iters < 1)
    fail("solve", "tolerances must be positive and iteration limits >= 1");
  return s;
}

EvalSpec parse_eval(const json& j) {
  EvalSpec e;
  if (j.is_null()) return e;
  if (!j.is_object()) fail("evaluation", "must be an object");
  if (j.contains("points")) {
    if (!j["points"].is_array()) fail("evaluation.points", "must be an array");
    int k = 0;
    for (const json& p : j["points"])
      e.points.push_back(
          parse_point(p, "evaluation.points[" + std::to_string(k++) + "]"));
  }
  if (j.contains("polar_ray")) {
    const json& r = j["polar_ray"];
    e.ray.present = true;
    e.ray.theta = opt_number(r, "theta", e.ray.theta);
    e.ray.xhat_min = opt_number(r, "xhat_min", e.ray.xhat_min);
    e.ray.xhat_max = opt_number(r, "xhat_max", e.ray.xhat_max);
    e.ray.count = opt_int(r, "count", e.ray.count);
    e.ray.log_spaced = opt_bool(r, "log_spaced", e.ray.log_spaced);
    e.ray.include_zero = opt_bool(r, "include_zero", e.ray.include_zero);
    if (e.ray.count < 1 || !(e.ray.xhat_min > 0) ||
        !(e.ray.xhat_max >= e.ray.xhat_min))
      fail("evaluation.polar_ray", "need count >= 1, 0 < xhat_min <= xhat_max");
  }
  if (j.contains("raster")) {
    const json& r = j["raster"];
    e.raster.present = true;
    e.raster.lo = parse_point(r.value("lo", json()), "evaluation.raster.lo");
    e.raster.hi = parse_point(r.value("hi", json()), "evaluation.raster.hi");
    e.raster.nx = opt_int(r, "nx", 0);
    e.raster.ny = opt_int(r, "ny", 0);
    if (e.raster.nx < 2 || e.raster.ny < 2 ||
        !(e.raster.hi.x() > e.raster.lo.x()) ||
        !(e.raster.hi.y() > e.raster.lo.y()))
      fail("evaluation.raster", "need nx, ny >= 2 and hi > lo");
  }
  return e;
}

json point_json(const Vec2& p) { return json::array({p.x(), p.y()}); }

json curve_json(const Curve& c) {
  const std::vector<double>& p = c.params();
  json j;
  switch (c.kind()) {
    case CurveKind::Circle:
      j = {{"kind", "circle"},
           {"center", json::array({p[0], p[1]})},
           {"radius", p[2]}};
      break;
    case CurveKind::Ellipse:
      j = {{"kind", "ellipse"},
           {"center", json::array({p[0], p[1]})},
           {"semi_axes", json::array({p[2], p[3]})},
           {"rotation", p[4]}};
      break;
    case CurveKind::PolarCosine:
      j = {{"kind", "polar_cosine"},
           {"center", json::array({p[0], p[1]})},
           {"A", p[2]},
           {"B", p[3]},
           {"C", static_cast<int>(p[4])}};
      break;
    case CurveKind::Fourier: {
      const int nx = static_cast<int>(p[0]);
      std::vector<double> x(p.begin() + 1, p.begin() + 1 + nx);
      std::vector<double> y(p.begin() + 1 + nx, p.end());
      j = {{"kind", "fourier"}, {"x", x}, {"y", y}};
      break;
    }
  }
  return j;
}

json data_json(const DataSpec& d) {
  json j{{"type", d.type}};
  if (d.type == "sine_mode") j["m"] = d.m;
  if (d.type == "conformal_pullback") {
    j["m"] = d.m;
    j["alpha"] = d.alpha;
  }
  if (d.type == "fourier") {
    j["cos"] = d.cos_coef;
    j["sin"] = d.sin_coef;
  }
  return j;
}

}  // namespace

ProblemConfig parse_config(const json& j) {
  if (!j.is_object()) fail("", "document must be a JSON object");
  ProblemConfig c;
  c.version = opt_int(j, "version", 1);
  if (c.version != 1) fail("version", "unsupported config version");

  if (!j.contains("curves") || !j["curves"].is_array() || j["curves"].empty())
    fail("curves", "a non-empty curve array is required");
  int k = 0;
  for (const json& cj : j["curves"]) c.curves.push_back(parse_curve(cj, k++));

  if (!j.contains("sigma") || !j["sigma"].is_array())
    fail("sigma", "a conductivity array is required");
  c.sigma = j["sigma"].get<std::vector<double>>();
  if (c.sigma.size() != c.curves.size())
    fail("sigma", "need exactly one conductivity per curve");

  c.data.assign(c.curves.size(), DataSpec{});
  if (j.contains("boundary_data")) {
    if (!j["boundary_data"].is_array() ||
        j["boundary_data"].size() > c.curves.size())
      fail("boundary_data", "must be an array with <= one entry per curve");
    for (size_t i = 0; i < j["boundary_data"].size(); ++i)
      c.data[i] = parse_data(j["boundary_data"][i], static_cast<int>(i));
  }

  c.solve = parse_solve(j.value("solve", json()));
  c.evaluation = parse_eval(j.value("evaluation", json()));

  if (j.contains("backend")) {
    const json& b = j["backend"];
    const std::string type = b.value("type", "direct");
    if (type == "direct")
      c.solve.sum.backend = Backend::Direct;
    else if (type == "fmm")
      c.solve.sum.backend = Backend::Fmm;
    else
      fail("backend.type", "must be 'direct' or 'fmm'");
    c.solve.sum.fmm_eps = opt_number(b, "fmm_eps", c.solve.sum.fmm_eps);
    c.solve.sum.threads = opt_int(b, "threads", c.solve.sum.threads);
    if (!(c.solve.sum.fmm_eps > 0) || c.solve.sum.threads < 1)
      fail("backend", "fmm_eps must be > 0 and threads >= 1");
  }

  if (j.contains("reference")) {
    const json& r = j["reference"];
    c.reference.present = true;
    c.reference.type = r.value("type", "concentric");
    if (c.reference.type != "concentric" && c.reference.type != "nonconcentric")
      fail("reference.type", "must be 'concentric' or 'nonconcentric'");
    c.reference.m = opt_int(r, "m", 3);
    c.reference.sigma = opt_number(r, "sigma", 2.0);
    c.reference.alpha = opt_number(r, "alpha", 0.4);
  }
  if (j.contains("reference_point")) {
    c.has_reference_point = true;
    c.reference_point = parse_point(j["reference_point"], "reference_point");
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    c.output.densities = o.value("densities", c.output.densities);
    c.output.field = o.value("field", c.output.field);
    c.output.report = o.value("report", c.output.report);
  }
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadConfig("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw BadConfig("config: JSON parse failure in '" + path + "': " +
                    e.what());
  }
  return parse_config(j);
}

nlohmann::json canonical_json(const ProblemConfig& c) {
  json j;
  j["version"] = c.version;
  j["curves"] = json::array();
  for (const Curve& cv : c.curves) j["curves"].push_back(curve_json(cv));
  j["sigma"] = c.sigma;
  j["boundary_data"] = json::array();
  for (const DataSpec& d : c.data) j["boundary_data"].push_back(data_json(d));

  const SolveSettings& s = c.solve;
  j["solve"] = {{"gmres_tol", s.gmres_tol},
                {"gmres_max_iters", s.gmres_max_iters},
                {"gmres_restart", s.gmres_restart},
                {"adapt_tol", s.adapt_tol},
                {"max_rounds", s.max_rounds},
                {"initial_uniform_nodes", s.initial_uniform_nodes},
                {"grid_shift", s.grid_shift},
                {"panel_nodes", s.panel_nodes},
                {"max_panel_nodes", s.max_panel_nodes},
                {"max_initial_panels", s.max_initial_panels},
                {"max_uniform_nodes", s.max_uniform_nodes},
                {"close_threshold", s.close_threshold},
                {"rescaled", s.rescaled},
                {"compat_tol", s.compat_tol}};
  j["backend"] = {
      {"type", s.sum.backend == Backend::Fmm ? "fmm" : "direct"},
      {"fmm_eps", s.sum.fmm_eps},
      {"threads", s.sum.threads}};

  json e;
  if (!c.evaluation.points.empty()) {
    e["points"] = json::array();
    for (const Vec2& p : c.evaluation.points) e["points"].push_back(point_json(p));
  }
  if (c.evaluation.ray.present) {
    const auto& r = c.evaluation.ray;
    e["polar_ray"] = {{"theta", r.theta},       {"xhat_min", r.xhat_min},
                      {"xhat_max", r.xhat_max}, {"count", r.count},
                      {"log_spaced", r.log_spaced},
                      {"include_zero", r.include_zero}};
  }
  if (c.evaluation.raster.present) {
    const auto& r = c.evaluation.raster;
    e["raster"] = {{"lo", point_json(r.lo)},
                   {"hi", point_json(r.hi)},
                   {"nx", r.nx},
                   {"ny", r.ny}};
  }
  if (!e.is_null()) j["evaluation"] = e;

  if (c.reference.present)
    j["reference"] = {{"type", c.reference.type},
                      {"m", c.reference.m},
                      {"sigma", c.reference.sigma},
                      {"alpha", c.reference.alpha}};
  if (c.has_reference_point) j["reference_point"] = point_json(c.reference_point);

  j["output"] = {{"densities", c.output.densities},
                 {"field", c.output.field},
                 {"report", c.output.report}};
  return j;
}

RegionTree build_tree(const ProblemConfig& c) {
  return build_region_tree(c.curves, c.sigma);
}

BoundaryFn make_boundary_fn(const DataSpec& spec) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (spec.type == "zero") return {};
  if (spec.type == "sine_mode") {
    const int m = spec.m;
    return [m, kTwoPi](double q) { return std::sin(m * kTwoPi * q); };
  }
  if (spec.type == "windowed_cosine") {
    return [kTwoPi](double q) {
      const double theta = kTwoPi * (q - std::floor(q));
      const double c = std::cos(6.0 * theta - std::numbers::pi);
      const double w = std::numbers::pi / 12.0;
      double v = 0.0;
      if (std::abs(theta - std::numbers::pi / 2.0) < w) v += c;
      if (std::abs(theta - 3.0 * std::numbers::pi / 2.0) < w) v -= c;
      return v;
    };
  }
  if (spec.type == "conformal_pullback") {
    const int m = spec.m;
    const double alpha = spec.alpha;
    return [m, alpha, kTwoPi](double q) {
      return nonconcentric_b1(m, alpha, kTwoPi * q);
    };
  }
  if (spec.type == "fourier") {
    const std::vector<double> cc = spec.cos_coef, sc = spec.sin_coef;
    return [cc, sc, kTwoPi](double q) {
      const double theta = kTwoPi * q;
      double v = 0.0;
      for (size_t k = 0; k < cc.size(); ++k)
        v += cc[k] * std::cos((static_cast<double>(k) + 1.0) * theta);
      for (size_t k = 0; k < sc.size(); ++k)
        v += sc[k] * std::sin((static_cast<double>(k) + 1.0) * theta);
      return v;
    };
  }
  throw BadConfig("boundary data: unknown type '" + spec.type + "'");
}

std::vector<BoundaryFn> build_boundary_data(const ProblemConfig& c) {
  std::vector<BoundaryFn> fns;
  fns.reserve(c.data.size());
  for (const DataSpec& d : c.data) fns.push_back(make_boundary_fn(d));
  return fns;
}

std::vector<Vec2> build_eval_points(const EvalSpec& spec) {
  std::vector<Vec2> pts = spec.points;
  if (spec.ray.present) {
    const auto& r = spec.ray;
    if (r.include_zero)
      pts.emplace_back(std::cos(r.theta), std::sin(r.theta));
    for (int k = 0; k < r.count; ++k) {
      const double t = (r.count == 1) ? 0.0
                                      : static_cast<double>(k) / (r.count - 1);
      const double xhat =
          r.log_spaced
              ? std::exp(std::log(r.xhat_min) +
                         t * (std::log(r.xhat_max) - std::log(r.xhat_min)))
              : r.xhat_min + t * (r.xhat_max - r.xhat_min);
      pts.emplace_back((1.0 - xhat) * std::cos(r.theta),
                       (1.0 - xhat) * std::sin(r.theta));
    }
  }
  if (spec.raster.present) {
    const auto& r = spec.raster;
    for (int iy = 0; iy < r.ny; ++iy)
      for (int ix = 0; ix < r.nx; ++ix)
        pts.emplace_back(
            r.lo.x() + (r.hi.x() - r.lo.x()) * ix / (r.nx - 1),
            r.lo.y() + (r.hi.y() - r.lo.y()) * iy / (r.ny - 1));
  }
  return pts;
}

}  // namespace bie2d
