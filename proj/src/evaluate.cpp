#include "bie2d/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "bie2d/errors.hpp"
#include "bie2d/interpolation.hpp"
#include "bie2d/log.hpp"
#include "bie2d/parallel.hpp"

namespace bie2d {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInv2Pi = 1.0 / kTwoPi;
}  // namespace

double segment_potential(const Vec2& X1, const Vec2& X2, double s1, double s2,
                         double gamma1, double gamma2, const Vec2& x) {
  const Vec2 chord = X2 - X1;
  const double len = chord.norm();
  const double scale = std::max({1.0, X1.norm(), X2.norm()});
  if (len <= 1e-14 * scale)
    throw DegenerateSegment("segment endpoints coincide");
  if (!(s2 > s1))
    throw DegenerateSegment("segment stations must increase");

  const Vec2 t = chord / len;
  const Vec2 rel = x - X1;
  const double p = rel.dot(t);                          // station of the foot
  const double d = t.x() * rel.y() - t.y() * rel.x();   // signed offset of x
  const double a1 = -p;                                 // X1 relative to foot
  const double a2 = len - p;                            // X2 relative to foot
  const double r1 = std::hypot(d, a1);
  const double r2 = std::hypot(d, a2);

  // Density at the foot and its slope along the chord; the endpoint values
  // pin the linear density geometrically.
  const double slope = (gamma2 - gamma1) / len;
  const double g0 = gamma1 + slope * p;

  // Antiderivatives of log r and s log r; the r -> 0 limits vanish.
  double base = a1 - a2;
  if (r2 > 0.0) base += a2 * std::log(r2);
  if (r1 > 0.0) base -= a1 * std::log(r1);
  if (d != 0.0) base += d * (std::atan(a2 / d) - std::atan(a1 / d));

  double lin = 0.0;
  if (r2 > 0.0) lin += 0.5 * r2 * r2 * (std::log(r2) - 0.5);
  if (r1 > 0.0) lin -= 0.5 * r1 * r1 * (std::log(r1) - 0.5);

  return (g0 * base + slope * lin) * kInv2Pi;
}

ChargeSpectrum::ChargeSpectrum(const InterfaceGrid& grid,
                               std::span<const double> gamma)
    : grid_(&grid) {
  if (static_cast<int>(gamma.size()) != grid.size())
    throw IndexMismatch("charge spectrum: sample count mismatch");
  if (grid.uniform()) {
    std::vector<double> g(gamma.size());
    for (int m = 0; m < grid.size(); ++m)
      g[static_cast<size_t>(m)] =
          gamma[static_cast<size_t>(m)] * grid.speed[static_cast<size_t>(m)];
    fourier_ = fourier_coefficients(g, grid.shift);
  } else {
    legendre_.reserve(grid.panels.size());
    for (const Panel& p : grid.panels) {
      std::vector<double> g(static_cast<size_t>(p.order));
      for (int j = 0; j < p.order; ++j)
        g[static_cast<size_t>(j)] =
            gamma[static_cast<size_t>(p.offset + j)] *
            grid.speed[static_cast<size_t>(p.offset + j)];
      legendre_.push_back(legendre_coefficients(g));
    }
  }
}

double ChargeSpectrum::sub_arc_charge(double qa, double qb) const {
  if (!(qb >= qa) || qb - qa > 1.0 + 1e-12)
    throw OutOfRange("sub-arc charge: bad parameter interval");
  if (grid_->uniform()) return fourier_integral(fourier_, qa, qb);

  const double base = grid_->panels.front().a;
  const double ua = base + std::fmod(qa - base + 8.0, 1.0);
  const double ub = ua + (qb - qa);
  for (size_t k = 0; k < grid_->panels.size(); ++k) {
    const Panel& p = grid_->panels[k];
    if (ua < p.a - 1e-12 || ua > p.b + 1e-12) continue;
    if (ub > p.b + 1e-9) continue;
    const double half = 0.5 * (p.b - p.a);
    const double t1 = std::clamp((ua - p.a) / half - 1.0, -1.0, 1.0);
    const double t2 = std::clamp((ub - p.a) / half - 1.0, -1.0, 1.0);
    return half * legendre_partial_integral(legendre_[k], t1, t2);
  }
  throw OutOfRange("sub-arc charge: interval spans panel boundaries");
}

double SegmentChain::potential(const Vec2& x) const {
  const int e = static_cast<int>(endpoints.size());
  double u = 0.0;
  for (int k = 0; k < segment_count(); ++k) {
    const int k1 = (k + 1) % e;
    const Vec2& A = endpoints[static_cast<size_t>(k)];
    const Vec2& B = endpoints[static_cast<size_t>(k1)];
    const double sa = arclength[static_cast<size_t>(k)];
    const double sb = sa + (B - A).norm();
    u += segment_potential(A, B, sa, sb, density[static_cast<size_t>(k)],
                           density[static_cast<size_t>(k1)], x);
  }
  return u;
}

SegmentChain build_segment_chain(const Curve& curve, const InterfaceGrid& grid,
                                 std::span<const double> gamma,
                                 const NodeRun& run,
                                 const ChargeSpectrum& spectrum) {
  if (static_cast<int>(gamma.size()) != grid.size())
    throw IndexMismatch("segment chain: sample count mismatch");

  SegmentChain chain;
  std::vector<double> eq;  // endpoint parameters, strictly increasing; one
                           // extra sentinel entry closes a full loop

  if (grid.uniform()) {
    const int M = grid.size();
    if (run.count < 1 || run.count > M || run.first < 0 || run.first >= M)
      throw OutOfRange("segment chain: bad node run");
    chain.closed = (run.count == M);
    const double dq = 1.0 / M;
    const double q0 = (run.first + grid.shift) * dq;
    if (!chain.closed) eq.push_back(q0 - 0.5 * dq);
    for (int k = 0; k < run.count; ++k) {
      eq.push_back(q0 + k * dq);
      chain.covered.push_back((run.first + k) % M);
    }
    if (chain.closed)
      eq.push_back(q0 + 1.0);
    else
      eq.push_back(q0 + (run.count - 1) * dq + 0.5 * dq);
  } else {
    const int P = static_cast<int>(grid.panels.size());
    if (run.count < 1 || run.count > P || run.first < 0 || run.first >= P)
      throw OutOfRange("segment chain: bad panel run");
    chain.closed = (run.count == P);
    double offset = 0.0;
    double prev_b = 0.0;
    for (int k = 0; k < run.count; ++k) {
      const Panel& p = grid.panels[static_cast<size_t>((run.first + k) % P)];
      double a = p.a + offset;
      double b = p.b + offset;
      if (k > 0 && std::abs(a - prev_b) > 1e-12) {
        offset += 1.0;  // the run crossed the periodic seam
        a += 1.0;
        b += 1.0;
      }
      eq.push_back(a);
      const GaussRule& rule = gauss_legendre(p.order);
      for (int j = 0; j < p.order; ++j) {
        eq.push_back(a + 0.5 * (rule.x[static_cast<size_t>(j)] + 1.0) * (b - a));
        chain.covered.push_back(p.offset + j);
      }
      prev_b = b;
    }
    eq.push_back(prev_b);  // run-end boundary; equals eq[0] + 1 when closed
  }

  // Endpoint positions and cumulative chord arclength.  The sentinel entry
  // of a closed chain duplicates the first endpoint and is dropped.
  const int E = static_cast<int>(eq.size()) - (chain.closed ? 1 : 0);
  const int S = chain.closed ? E : E - 1;
  chain.endpoints.resize(static_cast<size_t>(E));
  chain.arclength.resize(static_cast<size_t>(E));
  for (int k = 0; k < E; ++k)
    chain.endpoints[static_cast<size_t>(k)] =
        curve.position(eq[static_cast<size_t>(k)]);

  Eigen::VectorXd L(S), Q(S);
  chain.arclength[0] = 0.0;
  for (int k = 0; k < S; ++k) {
    const Vec2& A = chain.endpoints[static_cast<size_t>(k)];
    const Vec2& B = chain.endpoints[static_cast<size_t>((k + 1) % E)];
    L(k) = (B - A).norm();
    if (L(k) <= 1e-14)
      throw DegenerateSegment("segment chain: coincident endpoints");
    if (k + 1 < E) chain.arclength[static_cast<size_t>(k + 1)] =
        chain.arclength[static_cast<size_t>(k)] + L(k);
    Q(k) = spectrum.sub_arc_charge(eq[static_cast<size_t>(k)],
                                   eq[static_cast<size_t>(k + 1)]);
  }
  chain.charge.assign(Q.data(), Q.data() + S);

  // Trapezoid charge matching: (g_k + g_{k+1})/2 * L_k = Q_k.  Closed chains
  // with an even endpoint count have an alternating null vector; the
  // minimum-norm least-squares solution resolves the tie.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(S, E);
  for (int k = 0; k < S; ++k) {
    A(k, k) += 0.5 * L(k);
    A(k, (k + 1) % E) += 0.5 * L(k);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  Eigen::VectorXd g = cod.solve(Q);
  const double qn = Q.norm();
  chain.match_residual = (A * g - Q).norm() / std::max(qn, 1e-300);
  if (qn > 0.0 && chain.match_residual > 1e-3)
    throw RankFailure("segment chain: charge matching inconsistent");
  chain.density.assign(g.data(), g.data() + E);
  return chain;
}

namespace {

// Solution data flattened into summation layout.
struct FlatSources {
  std::vector<Vec2> points;
  std::vector<double> charges;  // weight * gamma
};

FlatSources flatten(const DensitySolution& sol) {
  FlatSources f;
  const int total = sol.map.total();
  f.points.reserve(static_cast<size_t>(total));
  f.charges.reserve(static_cast<size_t>(total));
  for (size_t i = 0; i < sol.grids.size(); ++i) {
    const InterfaceGrid& g = sol.grids[i];
    const int off = sol.map.offset[i];
    for (int m = 0; m < g.size(); ++m) {
      f.points.push_back(g.point[static_cast<size_t>(m)]);
      f.charges.push_back(g.weight[static_cast<size_t>(m)] *
                          sol.gamma(off + m));
    }
  }
  return f;
}

// Groups sorted cell indices into maximal runs that are contiguous modulo n.
std::vector<NodeRun> contiguous_runs(const std::vector<int>& idx, int n) {
  std::vector<NodeRun> runs;
  if (idx.empty()) return runs;
  if (static_cast<int>(idx.size()) == n) {
    runs.push_back({0, n});
    return runs;
  }
  int start = idx[0], prev = idx[0];
  for (size_t k = 1; k < idx.size(); ++k) {
    if (idx[k] == prev + 1) {
      prev = idx[k];
      continue;
    }
    runs.push_back({start, prev - start + 1});
    start = prev = idx[k];
  }
  runs.push_back({start, prev - start + 1});
  // Merge a run ending at n-1 with one starting at 0 across the seam.
  if (runs.size() > 1 && runs.front().first == 0 &&
      runs.back().first + runs.back().count == n) {
    runs.back().count += runs.front().count;
    runs.erase(runs.begin());
  }
  return runs;
}

struct PointPlan {
  double dist = std::numeric_limits<double>::infinity();
  bool outside = false;
  std::vector<std::pair<int, NodeRun>> runs;  // (interface, run)
};

// Distance bookkeeping and run detection for one evaluation point.
PointPlan classify(const DensitySolution& sol, const Vec2& x,
                   double threshold) {
  PointPlan plan;
  for (size_t i = 0; i < sol.grids.size(); ++i) {
    const InterfaceGrid& g = sol.grids[i];
    std::vector<int> close_cells;
    for (int m = 0; m < g.size(); ++m) {
      const double r = (x - g.point[static_cast<size_t>(m)]).norm();
      plan.dist = std::min(plan.dist, r);
      if (r < threshold * g.spacing[static_cast<size_t>(m)]) {
        if (g.uniform())
          close_cells.push_back(m);
        else
          close_cells.push_back(g.panel_of(m));
      }
    }
    close_cells.erase(std::unique(close_cells.begin(), close_cells.end()),
                      close_cells.end());
    std::sort(close_cells.begin(), close_cells.end());
    close_cells.erase(std::unique(close_cells.begin(), close_cells.end()),
                      close_cells.end());
    const int n = g.uniform() ? g.size() : static_cast<int>(g.panels.size());
    for (const NodeRun& run : contiguous_runs(close_cells, n))
      plan.runs.emplace_back(static_cast<int>(i), run);
  }
  if (plan.runs.empty() && sol.tree &&
      sol.tree->curves[static_cast<size_t>(sol.tree->root)].winding_number(x) ==
          0)
    plan.outside = true;
  return plan;
}

}  // namespace

std::vector<FieldSample> eval_naive(const DensitySolution& sol,
                                    std::span<const Vec2> points,
                                    const EvalOptions& opts) {
  const FlatSources f = flatten(sol);
  SumProblem prob{f.points, f.charges, points, {}};
  const std::vector<double> u =
      layer_potential_sum(prob, SumKernel::LogPotential, opts.sum);

  std::vector<FieldSample> out(points.size());
  parallel_for(static_cast<int>(points.size()), opts.sum.threads,
               [&](int begin, int end) {
                 for (int k = begin; k < end; ++k) {
                   const PointPlan plan =
                       classify(sol, points[static_cast<size_t>(k)],
                                opts.close_threshold);
                   out[static_cast<size_t>(k)] = {
                       points[static_cast<size_t>(k)],
                       u[static_cast<size_t>(k)],
                       plan.outside ? EvalMethod::Outside : EvalMethod::Naive,
                       plan.dist};
                 }
               });
  return out;
}

std::vector<FieldSample> eval_close(const DensitySolution& sol,
                                    std::span<const Vec2> points,
                                    const EvalOptions& opts) {
  const FlatSources f = flatten(sol);
  SumProblem prob{f.points, f.charges, points, {}};
  const std::vector<double> u_naive =
      layer_potential_sum(prob, SumKernel::LogPotential, opts.sum);

  // Classify every point first so chains can be built once and shared.
  std::vector<PointPlan> plans(points.size());
  for (size_t k = 0; k < points.size(); ++k)
    plans[k] = classify(sol, points[k], opts.close_threshold);

  std::map<std::tuple<int, int, int>, SegmentChain> chains;
  std::vector<ChargeSpectrum> spectra;
  std::vector<char> have_spectrum(sol.grids.size(), 0);
  std::vector<int> spectrum_index(sol.grids.size(), -1);
  for (const PointPlan& plan : plans) {
    for (const auto& [iface, run] : plan.runs) {
      const auto key = std::make_tuple(iface, run.first, run.count);
      if (chains.count(key)) continue;
      const InterfaceGrid& g = sol.grids[static_cast<size_t>(iface)];
      const int off = sol.map.offset[static_cast<size_t>(iface)];
      std::span<const double> gamma(sol.gamma.data() + off,
                                    static_cast<size_t>(g.size()));
      if (!have_spectrum[static_cast<size_t>(iface)]) {
        spectrum_index[static_cast<size_t>(iface)] =
            static_cast<int>(spectra.size());
        spectra.emplace_back(g, gamma);
        have_spectrum[static_cast<size_t>(iface)] = 1;
      }
      chains.emplace(
          key, build_segment_chain(
                   sol.tree->curves[static_cast<size_t>(
                       g.curve_index >= 0 ? g.curve_index : iface)],
                   g, gamma, run,
                   spectra[static_cast<size_t>(
                       spectrum_index[static_cast<size_t>(iface)])]));
    }
  }

  std::vector<FieldSample> out(points.size());
  parallel_for(
      static_cast<int>(points.size()), opts.sum.threads,
      [&](int begin, int end) {
        for (int k = begin; k < end; ++k) {
          const Vec2 x = points[static_cast<size_t>(k)];
          const PointPlan& plan = plans[static_cast<size_t>(k)];
          double u = u_naive[static_cast<size_t>(k)];
          for (const auto& [iface, run] : plan.runs) {
            const SegmentChain& chain =
                chains.at(std::make_tuple(iface, run.first, run.count));
            const InterfaceGrid& g = sol.grids[static_cast<size_t>(iface)];
            const int off = sol.map.offset[static_cast<size_t>(iface)];
            for (int m : chain.covered) {
              const Vec2 d = x - g.point[static_cast<size_t>(m)];
              const double r2 = d.squaredNorm();
              if (r2 == 0.0) continue;  // pair was skipped in the naive sum
              u -= g.weight[static_cast<size_t>(m)] * sol.gamma(off + m) *
                   0.5 * std::log(r2) * kInv2Pi;
            }
            u += chain.potential(x);
          }
          out[static_cast<size_t>(k)] = {
              x, u,
              plan.outside
                  ? EvalMethod::Outside
                  : (plan.runs.empty() ? EvalMethod::Naive : EvalMethod::Close),
              plan.dist};
        }
      });
  return out;
}

Vec2 interior_anchor(const RegionTree& tree) {
  const Curve& root = tree.curves[static_cast<size_t>(tree.root)];
  const BBox box = root.bbox();
  const int grid = 33;
  Vec2 best = Vec2::Zero();
  double best_dist = -1.0;
  for (int iy = 1; iy < grid; ++iy) {
    for (int ix = 1; ix < grid; ++ix) {
      Vec2 p(box.lo.x() + (box.hi.x() - box.lo.x()) * ix / grid,
             box.lo.y() + (box.hi.y() - box.lo.y()) * iy / grid);
      if (root.winding_number(p) == 0) continue;
      double dist = std::numeric_limits<double>::infinity();
      for (const Curve& c : tree.curves) {
        const auto& samples = c.dense_samples();
        const size_t stride = std::max<size_t>(1, samples.size() / 512);
        for (size_t k = 0; k < samples.size(); k += stride)
          dist = std::min(dist, (p - samples[k]).norm());
      }
      if (dist > best_dist) {
        best_dist = dist;
        best = p;
      }
    }
  }
  if (best_dist <= 0.0) throw OutOfDomain("no interior anchor point found");
  return best;
}

}  // namespace bie2d
