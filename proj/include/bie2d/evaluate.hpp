#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bie2d/solve.hpp"

namespace bie2d {

enum class EvalMethod { Naive, Close, Outside };

struct FieldSample {
  Vec2 point = Vec2::Zero();
  double u = 0.0;
  EvalMethod method = EvalMethod::Naive;
  double dist = 0.0;  // distance to the nearest quadrature node
};

struct EvalOptions {
  double close_threshold = 5.0;  // "close" when nearer than threshold * spacing
  SumOptions sum;
};

// Potential at x of a linearly varying charge density on the straight
// segment X1 -> X2 (gamma1 at X1, gamma2 at X2).  s1 < s2 are the endpoint
// arclength stations; the value is finite for every x, including points on
// the segment and at its endpoints.
double segment_potential(const Vec2& X1, const Vec2& X2, double s1, double s2,
                         double gamma1, double gamma2, const Vec2& x);

// Spectral representation of gamma(q) * |x'(q)| on one interface, used to
// integrate exact sub-arc charges: Fourier series on uniform grids, a
// Legendre series per panel otherwise.
class ChargeSpectrum {
 public:
  ChargeSpectrum(const InterfaceGrid& grid, std::span<const double> gamma);

  // Integral of gamma dl over parameters [qa, qb].  The interval may be
  // expressed in unwrapped coordinates (qb - qa <= 1); on paneled grids it
  // must lie within a single panel.
  double sub_arc_charge(double qa, double qb) const;

 private:
  const InterfaceGrid* grid_;
  std::vector<std::complex<double>> fourier_;
  std::vector<std::vector<double>> legendre_;  // per panel
};

// A contiguous run of replaced cells on one interface.  On uniform grids
// first/count index nodes; on paneled grids they index panels.  count equal
// to the full node (panel) count selects the whole curve as a closed chain.
struct NodeRun {
  int first = 0;
  int count = 0;
};

struct SegmentChain {
  std::vector<Vec2> endpoints;
  std::vector<double> arclength;  // cumulative chord length per endpoint
  std::vector<double> density;    // charge-matched endpoint densities
  std::vector<double> charge;     // per-segment curved sub-arc charge
  std::vector<int> covered;       // node indices whose cells were replaced
  bool closed = false;
  double match_residual = 0.0;  // relative residual of the matching system

  int segment_count() const {
    return closed ? static_cast<int>(endpoints.size())
                  : static_cast<int>(endpoints.size()) - 1;
  }
  // Potential at x of the whole polyline.
  double potential(const Vec2& x) const;
};

// Replaces the run's curved cells by straight segments with endpoints at the
// quadrature nodes, closing the ends at cell boundaries (node midpoints on
// uniform grids, panel boundaries otherwise).  Endpoint densities solve the
// per-segment charge-matching equations; even closed chains take the
// minimum-norm solution.
SegmentChain build_segment_chain(const Curve& curve, const InterfaceGrid& grid,
                                 std::span<const double> gamma,
                                 const NodeRun& run,
                                 const ChargeSpectrum& spectrum);

// Plain quadrature sum of the layer potentials at each point.
std::vector<FieldSample> eval_naive(const DensitySolution& sol,
                                    std::span<const Vec2> points,
                                    const EvalOptions& opts = {});

// Naive far from every curve; within the close threshold the nearby cells
// are swapped for segment-chain potentials.  Far points match eval_naive
// bitwise.
std::vector<FieldSample> eval_close(const DensitySolution& sol,
                                    std::span<const Vec2> points,
                                    const EvalOptions& opts = {});

// A deterministic point well inside the domain, far from every interface;
// used to anchor the additive constant when comparing potentials.
Vec2 interior_anchor(const RegionTree& tree);

}  // namespace bie2d
