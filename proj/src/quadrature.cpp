#include "bie2d/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace bie2d {

namespace {

GaussRule compute_gauss_legendre(int n) {
  // Newton iteration on Legendre polynomials from the Chebyshev initial
  // guess; standard and accurate to machine precision for moderate n.
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      // Recurrence for P_n(x) and derivative.
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    double w = 2.0 / ((1 - x * x) * pp * pp);
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.x[n / 2] = 0;  // exact middle node
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw OutOfRange("Gauss-Legendre order must be >= 1");
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

int InterfaceGrid::panel_of(int m) const {
  for (size_t k = 0; k < panels.size(); ++k) {
    if (m >= panels[k].offset && m < panels[k].offset + panels[k].order)
      return static_cast<int>(k);
  }
  throw OutOfRange("node index outside any panel");
}

namespace {

void fill_node(const Curve& curve, double q, InterfaceGrid& g, double w_param) {
  double qw = q - std::floor(q);
  CurveFrame f = curve.frame(qw);
  g.q.push_back(qw);
  g.weight.push_back(w_param * f.speed);
  g.speed.push_back(f.speed);
  g.curvature.push_back(f.curvature);
  g.point.push_back(f.point);
  g.normal.push_back(f.normal);
  g.arc.push_back(curve.arclength(qw));
}

// Local spacing: arclength gap to the neighboring node on either side, taking
// the larger of the two.  Used by the close-evaluation distance rule.
void fill_spacing(const Curve& curve, InterfaceGrid& g) {
  int n = g.size();
  g.spacing.resize(n);
  double L = curve.length();
  for (int m = 0; m < n; ++m) {
    double prev = g.arc[(m + n - 1) % n];
    double next = g.arc[(m + 1) % n];
    double cur = g.arc[m];
    double d_prev = cur - prev;
    if (d_prev <= 0) d_prev += L;
    double d_next = next - cur;
    if (d_next <= 0) d_next += L;
    g.spacing[m] = std::max(d_prev, d_next);
  }
}

}  // namespace

InterfaceGrid make_uniform_grid(const Curve& curve, int M, double shift) {
  if (M < 2) throw OutOfRange("uniform grid needs at least 2 nodes");
  InterfaceGrid g;
  g.scheme = InterfaceGrid::Scheme::Uniform;
  g.shift = shift;
  g.q.reserve(M);
  for (int m = 0; m < M; ++m) fill_node(curve, (m + shift) / M, g, 1.0 / M);
  fill_spacing(curve, g);
  return g;
}

InterfaceGrid make_paneled_grid(const Curve& curve,
                                const std::vector<double>& breaks,
                                const std::vector<int>& orders) {
  if (breaks.empty()) throw EmptyPanel("paneled grid needs at least one break");
  if (orders.size() != breaks.size())
    throw IndexMismatch("need one order per panel");
  int np = static_cast<int>(breaks.size());
  InterfaceGrid g;
  g.scheme = InterfaceGrid::Scheme::Paneled;
  g.panels.reserve(np);
  int offset = 0;
  for (int k = 0; k < np; ++k) {
    Panel p;
    p.a = breaks[k];
    p.b = (k + 1 < np) ? breaks[k + 1] : breaks[0] + 1.0;
    p.order = orders[k];
    p.offset = offset;
    if (!(p.b - p.a > 1e-15))
      throw EmptyPanel("panel " + std::to_string(k) +
                       " has zero parameter length");
    if (p.order < 2) throw OutOfRange("panel order must be >= 2");
    const GaussRule& rule = gauss_legendre(p.order);
    double half = 0.5 * (p.b - p.a);
    double mid = 0.5 * (p.a + p.b);
    for (int i = 0; i < p.order; ++i)
      fill_node(curve, mid + half * rule.x[i], g, half * rule.w[i]);
    offset += p.order;
    g.panels.push_back(p);
  }
  fill_spacing(curve, g);
  return g;
}

InterfaceGrid make_paneled_grid(const Curve& curve,
                                const std::vector<double>& breaks, int order) {
  return make_paneled_grid(curve, breaks,
                           std::vector<int>(breaks.size(), order));
}

}  // namespace bie2d
