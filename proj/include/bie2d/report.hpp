#pragma once

#include <json.hpp>
#include <ostream>
#include <span>

#include "bie2d/evaluate.hpp"
#include "bie2d/solve.hpp"

namespace bie2d {

struct PhaseTimings {
  double build_s = 0.0;
  double solve_s = 0.0;
  double eval_s = 0.0;
};

// Machine-readable run summary: refinement history, final grid sizes,
// charges, timings, and (optionally) reference-comparison errors.
nlohmann::json report_json(const DensitySolution& sol, const PhaseTimings& t,
                           const nlohmann::json* reference_errors = nullptr);

// CSV writers.  Full double precision, stable column order.
void write_densities_csv(std::ostream& os, const DensitySolution& sol);
void write_field_csv(std::ostream& os, std::span<const FieldSample> samples);

}  // namespace bie2d
