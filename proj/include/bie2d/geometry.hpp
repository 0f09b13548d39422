#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bie2d/errors.hpp"

namespace bie2d {

using Vec2 = Eigen::Vector2d;

enum class CurveKind { Circle, Ellipse, PolarCosine, Fourier };

// Differential geometry of a curve at one parameter value.
struct CurveFrame {
  Vec2 point;
  Vec2 tangent;      // unit tangent along increasing q
  Vec2 normal;       // unit outward normal (curve is counterclockwise)
  double speed;      // |dx/dq|
  double curvature;  // signed; +1/R on a circle of radius R
};

struct BBox {
  Vec2 lo{0, 0}, hi{0, 0};
  double distance(const BBox& other) const;
};

// A smooth closed curve parameterized counterclockwise by q in [0,1).
//
// Supported shapes: circles, rotated ellipses, polar r(t) = A + B*cos(C*t)
// profiles, and general truncated Fourier parameterizations.  Construction
// validates the curve by dense sampling: the speed must stay positive and the
// sampled polyline must be free of self-intersections.
class Curve {
 public:
  static Curve circle(const Vec2& center, double radius);
  static Curve ellipse(const Vec2& center, double semi_x, double semi_y,
                       double rotation);
  static Curve polar_cosine(const Vec2& center, double A, double B, int C);
  // Packed coefficient lists [a0, a1, b1, a2, b2, ...] for
  //   x(q) = a0 + sum_k a_k cos(2 pi k q) + b_k sin(2 pi k q)
  // and likewise for y(q).  A clockwise input is reversed to counterclockwise.
  static Curve fourier(std::vector<double> x_coeffs,
                       std::vector<double> y_coeffs);

  CurveKind kind() const { return kind_; }

  Vec2 position(double q) const;
  Vec2 derivative(double q) const;
  Vec2 second_derivative(double q) const;
  CurveFrame frame(double q) const;

  // Total arclength, computed once from dense samples (spectrally accurate
  // trapezoid rule on the periodic speed).
  double length() const { return length_; }
  // Arclength coordinate of the point at parameter q (piecewise-linear lookup
  // in the cached sample table; adequate for grid-spacing decisions).
  double arclength(double q) const;
  const BBox& bbox() const { return bbox_; }

  // Cached dense samples used for winding numbers and clearance estimates.
  const std::vector<Vec2>& dense_samples() const { return samples_; }
  int sample_count() const { return static_cast<int>(samples_.size()); }

  // Winding number of this curve around a point (dense-polyline estimate,
  // rounded to the nearest integer; 1 = inside for counterclockwise curves).
  int winding_number(const Vec2& p) const;

  // Accessors for serialization.
  const std::vector<double>& params() const { return params_; }

  std::string describe() const;

 private:
  Curve(CurveKind kind, std::vector<double> params);
  void finalize(int samples);

  CurveKind kind_;
  // Circle:      [cx, cy, R]
  // Ellipse:     [cx, cy, a, b, rotation]
  // PolarCosine: [cx, cy, A, B, C]
  // Fourier:     [nx, (x coeffs...), (y coeffs...)]
  std::vector<double> params_;
  std::vector<Vec2> samples_;
  std::vector<double> prefix_arc_;  // arclength from q=0 to each sample
  double length_ = 0;
  BBox bbox_;
};

// Number of samples per curve used by construction-time validation and by
// winding/clearance estimates.
inline constexpr int kCurveValidationSamples = 4096;

// Nesting structure of a family of disjoint closed curves.  Curve indices are
// 0-based and follow the input order; curve i bounds region i (the area inside
// curve i but outside its children).  The root curve contains every other
// curve and its region conductivity is sigma[root].
struct RegionTree {
  std::vector<Curve> curves;
  std::vector<double> sigma;            // conductivity of region i
  std::vector<int> parent;              // parent curve index; -1 for the root
  std::vector<std::vector<int>> children;
  std::vector<std::vector<int>> descendants;  // strict descendants, sorted
  int root = -1;

  int size() const { return static_cast<int>(curves.size()); }
  // Conductivity on the outside of interface i (that of the parent region);
  // undefined for the root, which has no parent medium.
  double sigma_outside(int i) const { return sigma.at(parent.at(i)); }
};

struct RegionTreeOptions {
  double clearance_floor = 1e-6;  // minimum allowed distance between curves
};

// Builds the nesting tree.  Throws:
//   IntersectingCurves  if two curves cross or come within clearance_floor
//   NotNested           if no single curve contains all the others
//   BadSigma            if a conductivity is not positive and finite, or if
//                       an interface separates equal conductivities
RegionTree build_region_tree(std::vector<Curve> curves,
                             std::vector<double> sigma,
                             const RegionTreeOptions& opts = {});

// For each curve, a conservative estimate of the distance to the nearest
// other curve (dense sampling plus local refinement, reduced by the sampling
// resolution so it does not overestimate).  A lone curve reports +infinity.
std::vector<double> min_clearance(const RegionTree& tree);

// Distance between two curves by dense sampling + local grid refinement.
double curve_distance(const Curve& a, const Curve& b);

}  // namespace bie2d
