#pragma once

#include <complex>
#include <span>

#include "bie2d/geometry.hpp"

namespace bie2d {

// Fast multipole summation for the 2D Laplace kernel in complex form.
// Computes, for every target z_i,
//   potential[i] = sum_j c_j log|z_i - z_j|          (if potential != nullptr)
//   field[i]     = sum_j c_j / (z_i - z_j)           (if field != nullptr)
// skipping source/target pairs at identical positions.  eps is the requested
// absolute accuracy of the sums (the expansion order is chosen from it and
// from the total charge magnitude).
void fmm_laplace_sum(std::span<const Vec2> sources,
                     std::span<const double> charges,
                     std::span<const Vec2> targets, double eps, int threads,
                     double* potential, std::complex<double>* field);

}  // namespace bie2d
