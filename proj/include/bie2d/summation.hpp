#pragma once

#include <span>
#include <vector>

#include "bie2d/geometry.hpp"

namespace bie2d {

enum class Backend { Direct, Fmm };

enum class SumKernel {
  LogPotential,     // sum_j c_j G(x_i, y_j)
  NormalDerivative  // sum_j c_j K(x_i, y_j), needs target normals
};

struct SumProblem {
  std::span<const Vec2> sources;
  std::span<const double> charges;
  std::span<const Vec2> targets;
  std::span<const Vec2> target_normals;  // only for NormalDerivative
};

struct SumOptions {
  Backend backend = Backend::Direct;
  double fmm_eps = 1e-9;
  int threads = 1;
};

// Evaluates the requested particle sum at every target.  A target that
// exactly coincides with a source skips that pair (the caller supplies the
// appropriate diagonal limit); this is how on-curve Nystrom rows are formed.
std::vector<double> layer_potential_sum(const SumProblem& problem,
                                        SumKernel kernel,
                                        const SumOptions& opts = {});

}  // namespace bie2d
