#include "bie2d/report.hpp"

#include <cstdio>

namespace bie2d {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* method_name(EvalMethod m) {
  switch (m) {
    case EvalMethod::Naive:
      return "naive";
    case EvalMethod::Close:
      return "close";
    case EvalMethod::Outside:
      return "outside";
  }
  return "unknown";
}

}  // namespace

nlohmann::json report_json(const DensitySolution& sol, const PhaseTimings& t,
                           const nlohmann::json* reference_errors) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const RefinementRound& r : sol.rounds) {
    nlohmann::json jr;
    jr["gmres_iterations"] = r.gmres_iterations;
    jr["gmres_residual"] = r.gmres_residual;
    jr["nodes"] = r.nodes;
    jr["tail"] = r.tail;
    std::vector<bool> refined(r.refined.begin(), r.refined.end());
    jr["refined"] = refined;
    rounds.push_back(jr);
  }

  nlohmann::json final_state;
  std::vector<int> nodes;
  nodes.reserve(sol.grids.size());
  for (const InterfaceGrid& g : sol.grids) nodes.push_back(g.size());
  final_state["nodes"] = nodes;
  final_state["total_nodes"] = sol.total_nodes();
  final_state["resolved"] = sol.resolved;
  final_state["converged"] = sol.converged;
  final_state["rescaled"] = sol.rescaled;
  final_state["charges"] = sol.charges;
  final_state["rhs_norm"] = sol.rhs_norm;

  nlohmann::json j;
  j["rounds"] = rounds;
  j["final"] = final_state;
  j["timings"] = {{"build_s", t.build_s},
                  {"solve_s", t.solve_s},
                  {"eval_s", t.eval_s}};
  if (reference_errors) j["reference_errors"] = *reference_errors;
  return j;
}

void write_densities_csv(std::ostream& os, const DensitySolution& sol) {
  os << "interface,node,q,x,y,phi,gamma\n";
  for (size_t i = 0; i < sol.grids.size(); ++i) {
    const InterfaceGrid& g = sol.grids[i];
    const int off = sol.map.offset[i];
    for (int m = 0; m < g.size(); ++m) {
      os << i << ',' << m << ',' << fmt(g.q[static_cast<size_t>(m)]) << ','
         << fmt(g.point[static_cast<size_t>(m)].x()) << ','
         << fmt(g.point[static_cast<size_t>(m)].y()) << ','
         << fmt(sol.phi(off + m)) << ',' << fmt(sol.gamma(off + m)) << '\n';
    }
  }
}

void write_field_csv(std::ostream& os, std::span<const FieldSample> samples) {
  os << "x,y,u,method,dist\n";
  for (const FieldSample& s : samples) {
    os << fmt(s.point.x()) << ',' << fmt(s.point.y()) << ',' << fmt(s.u) << ','
       << method_name(s.method) << ',' << fmt(s.dist) << '\n';
  }
}

}  // namespace bie2d
