#include "bie2d/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "bie2d/log.hpp"

namespace bie2d {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

// Exact-orientation segment intersection (touching counts as intersecting).
bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& p3,
                        const Vec2& p4) {
  double d1 = cross2(p4 - p3, p1 - p3);
  double d2 = cross2(p4 - p3, p2 - p3);
  double d3 = cross2(p2 - p1, p3 - p1);
  double d4 = cross2(p2 - p1, p4 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(p1, p3, p4)) return true;
  if (d2 == 0 && on_segment(p2, p3, p4)) return true;
  if (d3 == 0 && on_segment(p3, p1, p2)) return true;
  if (d4 == 0 && on_segment(p4, p1, p2)) return true;
  return false;
}

}  // namespace

double BBox::distance(const BBox& other) const {
  double dx = std::max({0.0, other.lo.x() - hi.x(), lo.x() - other.hi.x()});
  double dy = std::max({0.0, other.lo.y() - hi.y(), lo.y() - other.hi.y()});
  return std::hypot(dx, dy);
}

Curve::Curve(CurveKind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)) {}

Curve Curve::circle(const Vec2& center, double radius) {
  if (!(radius > 0) || !std::isfinite(radius))
    throw OutOfRange("circle radius must be positive");
  Curve c(CurveKind::Circle, {center.x(), center.y(), radius});
  c.finalize(kCurveValidationSamples);
  return c;
}

Curve Curve::ellipse(const Vec2& center, double semi_x, double semi_y,
                     double rotation) {
  if (!(semi_x > 0) || !(semi_y > 0))
    throw OutOfRange("ellipse semi-axes must be positive");
  Curve c(CurveKind::Ellipse,
          {center.x(), center.y(), semi_x, semi_y, rotation});
  c.finalize(kCurveValidationSamples);
  return c;
}

Curve Curve::polar_cosine(const Vec2& center, double A, double B, int C) {
  if (C < 0) throw OutOfRange("polar-cosine frequency must be >= 0");
  if (!(A - std::abs(B) > 0))
    throw OutOfRange("polar-cosine radius A + B cos(C t) must stay positive");
  Curve c(CurveKind::PolarCosine,
          {center.x(), center.y(), A, B, static_cast<double>(C)});
  c.finalize(kCurveValidationSamples);
  return c;
}

Curve Curve::fourier(std::vector<double> x_coeffs,
                     std::vector<double> y_coeffs) {
  if (x_coeffs.empty() || y_coeffs.empty())
    throw OutOfRange("fourier curve needs at least the constant coefficient");
  std::vector<double> params;
  params.push_back(static_cast<double>(x_coeffs.size()));
  params.insert(params.end(), x_coeffs.begin(), x_coeffs.end());
  params.insert(params.end(), y_coeffs.begin(), y_coeffs.end());
  Curve c(CurveKind::Fourier, std::move(params));

  // Normalize to counterclockwise orientation: the signed area of a clockwise
  // input is negative, and reversing q -> 1-q flips the sign of every sine
  // coefficient while fixing the cosines.
  {
    std::vector<Vec2> pts(512);
    double area = 0;
    for (int i = 0; i < 512; ++i) pts[i] = c.position(i / 512.0);
    for (int i = 0; i < 512; ++i) {
      const Vec2& a = pts[i];
      const Vec2& b = pts[(i + 1) % 512];
      area += cross2(a, b);
    }
    area *= 0.5;
    if (area < 0) {
      log_info("fourier curve given clockwise; reversing orientation");
      int nx = static_cast<int>(c.params_[0]);
      int ny = static_cast<int>(c.params_.size()) - 1 - nx;
      for (int k = 2; k < nx; k += 2) c.params_[1 + k] = -c.params_[1 + k];
      for (int k = 2; k < ny; k += 2)
        c.params_[1 + nx + k] = -c.params_[1 + nx + k];
    }
  }
  c.finalize(kCurveValidationSamples);
  return c;
}

Vec2 Curve::position(double q) const {
  double w = kTwoPi * q;
  switch (kind_) {
    case CurveKind::Circle: {
      double cx = params_[0], cy = params_[1], R = params_[2];
      return {cx + R * std::cos(w), cy + R * std::sin(w)};
    }
    case CurveKind::Ellipse: {
      double cx = params_[0], cy = params_[1], a = params_[2], b = params_[3],
             rot = params_[4];
      double u = a * std::cos(w), v = b * std::sin(w);
      double cr = std::cos(rot), sr = std::sin(rot);
      return {cx + cr * u - sr * v, cy + sr * u + cr * v};
    }
    case CurveKind::PolarCosine: {
      double cx = params_[0], cy = params_[1], A = params_[2], B = params_[3],
             C = params_[4];
      double r = A + B * std::cos(C * w);
      return {cx + r * std::cos(w), cy + r * std::sin(w)};
    }
    case CurveKind::Fourier: {
      int nx = static_cast<int>(params_[0]);
      const double* xc = params_.data() + 1;
      const double* yc = params_.data() + 1 + nx;
      int ny = static_cast<int>(params_.size()) - 1 - nx;
      auto eval = [w](const double* c, int n) {
        double s = c[0];
        for (int k = 1; 2 * k - 1 < n; ++k) {
          s += c[2 * k - 1] * std::cos(k * w);
          if (2 * k < n) s += c[2 * k] * std::sin(k * w);
        }
        return s;
      };
      return {eval(xc, nx), eval(yc, ny)};
    }
  }
  return {0, 0};
}

Vec2 Curve::derivative(double q) const {
  double w = kTwoPi * q;
  switch (kind_) {
    case CurveKind::Circle: {
      double R = params_[2];
      return {-kTwoPi * R * std::sin(w), kTwoPi * R * std::cos(w)};
    }
    case CurveKind::Ellipse: {
      double a = params_[2], b = params_[3], rot = params_[4];
      double u = -kTwoPi * a * std::sin(w), v = kTwoPi * b * std::cos(w);
      double cr = std::cos(rot), sr = std::sin(rot);
      return {cr * u - sr * v, sr * u + cr * v};
    }
    case CurveKind::PolarCosine: {
      double A = params_[2], B = params_[3], C = params_[4];
      double r = A + B * std::cos(C * w);
      double rp = -B * C * std::sin(C * w);
      double cw = std::cos(w), sw = std::sin(w);
      return {kTwoPi * (rp * cw - r * sw), kTwoPi * (rp * sw + r * cw)};
    }
    case CurveKind::Fourier: {
      int nx = static_cast<int>(params_[0]);
      const double* xc = params_.data() + 1;
      const double* yc = params_.data() + 1 + nx;
      int ny = static_cast<int>(params_.size()) - 1 - nx;
      auto eval = [w](const double* c, int n) {
        double s = 0;
        for (int k = 1; 2 * k - 1 < n; ++k) {
          s += -c[2 * k - 1] * k * kTwoPi * std::sin(k * w);
          if (2 * k < n) s += c[2 * k] * k * kTwoPi * std::cos(k * w);
        }
        return s;
      };
      return {eval(xc, nx), eval(yc, ny)};
    }
  }
  return {0, 0};
}

Vec2 Curve::second_derivative(double q) const {
  double w = kTwoPi * q;
  switch (kind_) {
    case CurveKind::Circle: {
      double R = params_[2];
      double f = kTwoPi * kTwoPi * R;
      return {-f * std::cos(w), -f * std::sin(w)};
    }
    case CurveKind::Ellipse: {
      double a = params_[2], b = params_[3], rot = params_[4];
      double f = kTwoPi * kTwoPi;
      double u = -f * a * std::cos(w), v = -f * b * std::sin(w);
      double cr = std::cos(rot), sr = std::sin(rot);
      return {cr * u - sr * v, sr * u + cr * v};
    }
    case CurveKind::PolarCosine: {
      double A = params_[2], B = params_[3], C = params_[4];
      double r = A + B * std::cos(C * w);
      double rp = -B * C * std::sin(C * w);
      double rpp = -B * C * C * std::cos(C * w);
      double cw = std::cos(w), sw = std::sin(w);
      double f = kTwoPi * kTwoPi;
      return {f * ((rpp - r) * cw - 2 * rp * sw),
              f * ((rpp - r) * sw + 2 * rp * cw)};
    }
    case CurveKind::Fourier: {
      int nx = static_cast<int>(params_[0]);
      const double* xc = params_.data() + 1;
      const double* yc = params_.data() + 1 + nx;
      int ny = static_cast<int>(params_.size()) - 1 - nx;
      auto eval = [w](const double* c, int n) {
        double s = 0;
        for (int k = 1; 2 * k - 1 < n; ++k) {
          double f = k * k * kTwoPi * kTwoPi;
          s += -c[2 * k - 1] * f * std::cos(k * w);
          if (2 * k < n) s += -c[2 * k] * f * std::sin(k * w);
        }
        return s;
      };
      return {eval(xc, nx), eval(yc, ny)};
    }
  }
  return {0, 0};
}

CurveFrame Curve::frame(double q) const {
  Vec2 d = derivative(q);
  double speed = d.norm();
  if (!(speed > 1e-14))
    throw DegenerateSpeed("curve speed vanished at q=" + std::to_string(q));
  Vec2 dd = second_derivative(q);
  CurveFrame f;
  f.point = position(q);
  f.tangent = d / speed;
  // Counterclockwise parameterization: the outward normal is the tangent
  // rotated clockwise by 90 degrees.
  f.normal = Vec2(f.tangent.y(), -f.tangent.x());
  f.speed = speed;
  f.curvature = cross2(d, dd) / (speed * speed * speed);
  return f;
}

void Curve::finalize(int samples) {
  samples_.resize(samples);
  prefix_arc_.resize(samples + 1);
  std::vector<double> speed(samples + 1);
  Vec2 lo(std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
  Vec2 hi = -lo;
  for (int i = 0; i <= samples; ++i) {
    double q = static_cast<double>(i) / samples;
    speed[i] = derivative(q).norm();
    if (!(speed[i] > 1e-12))
      throw DegenerateSpeed("curve speed vanished at q=" + std::to_string(q));
    if (i < samples) {
      samples_[i] = position(q);
      lo = lo.cwiseMin(samples_[i]);
      hi = hi.cwiseMax(samples_[i]);
    }
  }
  prefix_arc_[0] = 0;
  for (int i = 0; i < samples; ++i)
    prefix_arc_[i + 1] = prefix_arc_[i] + 0.5 * (speed[i] + speed[i + 1]) / samples;
  length_ = prefix_arc_[samples];
  bbox_ = {lo, hi};

  // Self-intersection scan of the sampled polyline.  Segments are hashed into
  // a uniform grid so only nearby pairs are tested.
  int n = samples;
  Vec2 span = hi - lo;
  double cell = std::max(span.x(), span.y()) / 127.0;
  if (cell <= 0) throw OutOfRange("curve is a single point");
  auto cell_of = [&](const Vec2& p, int& ix, int& iy) {
    ix = static_cast<int>((p.x() - lo.x()) / cell);
    iy = static_cast<int>((p.y() - lo.y()) / cell);
  };
  std::unordered_map<int64_t, std::vector<int>> grid;
  grid.reserve(2 * n);
  auto key = [](int ix, int iy) {
    return (static_cast<int64_t>(ix) << 32) ^ static_cast<uint32_t>(iy);
  };
  for (int i = 0; i < n; ++i) {
    const Vec2& a = samples_[i];
    const Vec2& b = samples_[(i + 1) % n];
    int ix0, iy0, ix1, iy1;
    cell_of(a.cwiseMin(b), ix0, iy0);
    cell_of(a.cwiseMax(b), ix1, iy1);
    for (int ix = ix0; ix <= ix1; ++ix)
      for (int iy = iy0; iy <= iy1; ++iy) grid[key(ix, iy)].push_back(i);
  }
  for (auto& [k, segs] : grid) {
    for (size_t u = 0; u < segs.size(); ++u) {
      for (size_t v = u + 1; v < segs.size(); ++v) {
        int i = segs[u], j = segs[v];
        if (i == j) continue;
        int lo_ij = std::min(i, j), hi_ij = std::max(i, j);
        if (hi_ij - lo_ij <= 1 || (lo_ij == 0 && hi_ij == n - 1)) continue;
        if (segments_intersect(samples_[i], samples_[(i + 1) % n], samples_[j],
                               samples_[(j + 1) % n]))
          throw IntersectingCurves("curve intersects itself");
      }
    }
  }
}

double Curve::arclength(double q) const {
  // Globally monotone: whole laps contribute the full perimeter, so
  // arclength(1.0) == length() and bisection over [0,1] stays well-posed.
  const double laps = std::floor(q);
  q -= laps;
  int n = sample_count();
  double t = q * n;
  int i = std::min(static_cast<int>(t), n - 1);
  double frac = t - i;
  return laps * length_ + prefix_arc_[i] +
         frac * (prefix_arc_[i + 1] - prefix_arc_[i]);
}

int Curve::winding_number(const Vec2& p) const {
  double total = 0;
  int n = sample_count();
  Vec2 d0 = samples_[0] - p;
  double prev = std::atan2(d0.y(), d0.x());
  for (int i = 1; i <= n; ++i) {
    Vec2 d = samples_[i % n] - p;
    double ang = std::atan2(d.y(), d.x());
    double delta = ang - prev;
    if (delta > std::numbers::pi) delta -= kTwoPi;
    if (delta < -std::numbers::pi) delta += kTwoPi;
    total += delta;
    prev = ang;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

std::string Curve::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case CurveKind::Circle:
      os << "circle(c=(" << params_[0] << "," << params_[1] << "), R=" << params_[2] << ")";
      break;
    case CurveKind::Ellipse:
      os << "ellipse(c=(" << params_[0] << "," << params_[1] << "), a=" << params_[2]
         << ", b=" << params_[3] << ", rot=" << params_[4] << ")";
      break;
    case CurveKind::PolarCosine:
      os << "polar(A=" << params_[2] << ", B=" << params_[3] << ", C=" << params_[4] << ")";
      break;
    case CurveKind::Fourier:
      os << "fourier(" << params_.size() - 1 << " coeffs)";
      break;
  }
  return os.str();
}

namespace {

// Local grid refinement around the best sampled parameter pair.
double refine_distance(const Curve& a, const Curve& b, double qa, double qb,
                       double ha, double hb, int rounds) {
  double best = (a.position(qa) - b.position(qb)).norm();
  for (int r = 0; r < rounds; ++r) {
    double bqa = qa, bqb = qb;
    for (int i = -8; i <= 8; ++i) {
      for (int j = -8; j <= 8; ++j) {
        double ca = qa + i * ha / 8.0;
        double cb = qb + j * hb / 8.0;
        double d = (a.position(ca) - b.position(cb)).norm();
        if (d < best) {
          best = d;
          bqa = ca;
          bqb = cb;
        }
      }
    }
    qa = bqa;
    qb = bqb;
    ha /= 8.0;
    hb /= 8.0;
  }
  return best;
}

}  // namespace

double curve_distance(const Curve& a, const Curve& b) {
  const int na = 256, nb = 256;
  int stride_a = std::max(1, a.sample_count() / na);
  int stride_b = std::max(1, b.sample_count() / nb);
  double best = std::numeric_limits<double>::max();
  int ia_best = 0, ib_best = 0;
  for (int ia = 0; ia < a.sample_count(); ia += stride_a) {
    const Vec2& pa = a.dense_samples()[ia];
    for (int ib = 0; ib < b.sample_count(); ib += stride_b) {
      double d2 = (pa - b.dense_samples()[ib]).squaredNorm();
      if (d2 < best) {
        best = d2;
        ia_best = ia;
        ib_best = ib;
      }
    }
  }
  double qa = static_cast<double>(ia_best) / a.sample_count();
  double qb = static_cast<double>(ib_best) / b.sample_count();
  double ha = static_cast<double>(stride_a) / a.sample_count();
  double hb = static_cast<double>(stride_b) / b.sample_count();
  double d = refine_distance(a, b, qa, qb, ha, hb, 4);
  // Conservative: subtract the residual sampling resolution so the estimate
  // does not exceed the true distance.
  double slack = (a.length() * ha + b.length() * hb) / std::pow(8.0, 4);
  return std::max(0.0, d - slack);
}

RegionTree build_region_tree(std::vector<Curve> curves,
                             std::vector<double> sigma,
                             const RegionTreeOptions& opts) {
  int n = static_cast<int>(curves.size());
  if (n == 0) throw OutOfRange("region tree needs at least one curve");
  if (static_cast<int>(sigma.size()) != n)
    throw IndexMismatch("got " + std::to_string(sigma.size()) +
                        " conductivities for " + std::to_string(n) + " curves");
  for (double s : sigma)
    if (!(s > 0) || !std::isfinite(s))
      throw BadSigma("conductivities must be positive and finite");

  // Disjointness: every pair must stay clear of each other.  Bounding-box
  // pruning keeps this quadratic pass cheap for large families.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (curves[i].bbox().distance(curves[j].bbox()) >= opts.clearance_floor)
        continue;  // boxes already separated; cannot cross or graze
      double d = curve_distance(curves[i], curves[j]);
      if (d < opts.clearance_floor)
        throw IntersectingCurves(curves[i].describe() + " and " +
                                 curves[j].describe() +
                                 " cross or come within the clearance floor");
    }
  }

  // Containment matrix from winding numbers of one sample point.
  std::vector<std::vector<bool>> inside(n, std::vector<bool>(n, false));
  std::vector<int> n_containers(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      inside[i][j] = curves[j].winding_number(curves[i].dense_samples()[0]) != 0;
      if (inside[i][j]) ++n_containers[i];
    }
  }

  RegionTree tree;
  tree.parent.assign(n, -1);
  tree.children.resize(n);
  tree.descendants.resize(n);
  int root = -1;
  for (int i = 0; i < n; ++i) {
    if (n_containers[i] == 0) {
      if (root != -1)
        throw NotNested("no single outer curve contains all others");
      root = i;
    }
  }
  if (root == -1) throw NotNested("containment is cyclic (curves malformed)");
  for (int i = 0; i < n; ++i) {
    if (i == root) continue;
    if (!inside[i][root])
      throw NotNested(curves[i].describe() + " lies outside the outer curve");
    // Parent: the innermost curve containing i, i.e. the container that is
    // itself contained the most times.
    int best = -1;
    for (int j = 0; j < n; ++j) {
      if (j == i || !inside[i][j]) continue;
      if (best == -1 || n_containers[j] > n_containers[best]) best = j;
    }
    tree.parent[i] = best;
    tree.children[best].push_back(i);
  }
  tree.root = root;
  tree.curves = std::move(curves);
  tree.sigma = std::move(sigma);

  // Strict descendants by walking parents.
  for (int i = 0; i < n; ++i) {
    for (int p = tree.parent[i]; p != -1; p = tree.parent[p])
      tree.descendants[p].push_back(i);
  }
  for (auto& d : tree.descendants) std::sort(d.begin(), d.end());

  for (int i = 0; i < n; ++i) {
    if (i == root) continue;
    if (tree.sigma[i] == tree.sigma[tree.parent[i]])
      throw BadSigma("interface " + std::to_string(i + 1) +
                     " separates equal conductivities");
  }
  return tree;
}

std::vector<double> min_clearance(const RegionTree& tree) {
  int n = tree.size();
  std::vector<double> out(n, std::numeric_limits<double>::infinity());
  if (n < 2) return out;
  for (int i = 0; i < n; ++i) {
    // Candidates ordered by bounding-box distance (a lower bound on the true
    // distance), so most pairs are skipped once a close neighbor is found.
    std::vector<std::pair<double, int>> cand;
    cand.reserve(n - 1);
    for (int j = 0; j < n; ++j)
      if (j != i)
        cand.emplace_back(tree.curves[i].bbox().distance(tree.curves[j].bbox()), j);
    std::sort(cand.begin(), cand.end());
    for (auto& [lb, j] : cand) {
      if (lb >= out[i]) break;
      out[i] = std::min(out[i], curve_distance(tree.curves[i], tree.curves[j]));
    }
  }
  return out;
}

}  // namespace bie2d
