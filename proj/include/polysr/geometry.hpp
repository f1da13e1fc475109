#pragma once

// Planar geometry used to build the image-formation operators.
//
// Coordinate convention, used everywhere in the library: x is the column,
// y is the row, homogeneous vectors are (x, y, 1). Pixel (row i, col j) has
// its center at (x = j, y = i) and covers [j - 0.5, j + 0.5] x [i - 0.5, i + 0.5].

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "polysr/errors.hpp"

namespace polysr {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

/// Relative tolerance for singular determinants and vanishing w.
inline constexpr double kDegeneracyTolerance = 1e-12;

/// Clipped polygons smaller than this fraction of the clip rectangle are
/// reported as empty.
inline constexpr double kSliverFraction = 1e-12;

/// 3x3 projective transform acting on (x, y, 1). Always invertible.
template <typename Scalar>
class Homography {
 public:
  using Matrix = Eigen::Matrix<Scalar, 3, 3>;

  Homography() : m_(Matrix::Identity()) {}

  explicit Homography(const Matrix& m) : m_(m) {
    if (!m_.allFinite()) throw SingularMatrix("homography has non-finite entries");
    const Scalar scale = m_.cwiseAbs().maxCoeff();
    const Scalar det = m_.determinant();
    if (scale == Scalar(0) ||
        std::abs(det) <= Scalar(kDegeneracyTolerance) * scale * scale * scale)
      throw SingularMatrix("homography determinant below tolerance");
  }

  static Homography identity() { return Homography(); }

  static Homography translation(Scalar tx, Scalar ty) {
    Matrix m = Matrix::Identity();
    m(0, 2) = tx;
    m(1, 2) = ty;
    return Homography(m);
  }

  static Homography scaling(Scalar sx, Scalar sy) {
    Matrix m = Matrix::Identity();
    m(0, 0) = sx;
    m(1, 1) = sy;
    return Homography(m);
  }

  /// Counter-clockwise rotation by `radians` about the origin (in x-right,
  /// y-up terms; on an image with y pointing down it appears clockwise).
  static Homography rotation(Scalar radians) {
    Matrix m = Matrix::Identity();
    const Scalar c = std::cos(radians), s = std::sin(radians);
    m(0, 0) = c;
    m(0, 1) = -s;
    m(1, 0) = s;
    m(1, 1) = c;
    return Homography(m);
  }

  const Matrix& matrix() const { return m_; }
  Scalar operator()(int r, int c) const { return m_(r, c); }

  /// Same projective map scaled so that m(2,2) == 1, when that entry is usable.
  Homography normalized() const {
    const Scalar s = m_(2, 2);
    if (std::abs(s) <= Scalar(kDegeneracyTolerance) * m_.cwiseAbs().maxCoeff()) return *this;
    return Homography(Matrix(m_ / s));
  }

  friend Homography operator*(const Homography& a, const Homography& b) {
    return Homography(Matrix(a.m_ * b.m_));
  }

 private:
  Matrix m_;
};

using Homographyd = Homography<double>;

template <typename Scalar>
Point2<Scalar> transform_point(const Homography<Scalar>& h, const Point2<Scalar>& p) {
  const Eigen::Matrix<Scalar, 3, 1> q = h.matrix() * Eigen::Matrix<Scalar, 3, 1>(p.x(), p.y(), Scalar(1));
  const Scalar tol = Scalar(kDegeneracyTolerance) * h.matrix().cwiseAbs().maxCoeff();
  if (std::abs(q.z()) <= tol) throw DegenerateProjection("point maps to infinity");
  return {q.x() / q.z(), q.y() / q.z()};
}

template <typename Scalar>
Homography<Scalar> invert(const Homography<Scalar>& h) {
  // The constructor already rejected singular matrices; re-check the inverse
  // in case of overflow.
  return Homography<Scalar>(typename Homography<Scalar>::Matrix(h.matrix().inverse())).normalized();
}

/// Map from low-resolution frame coordinates into high-resolution
/// reference coordinates: diag(z, z, 1) * h_frame_to_ref.
template <typename Scalar>
Homography<Scalar> compose_lowres_to_highres(const Homography<Scalar>& h_frame_to_ref, Scalar zoom) {
  if (!(zoom >= Scalar(1))) throw InvalidArgument("zoom must be >= 1");
  return Homography<Scalar>::scaling(zoom, zoom) * h_frame_to_ref;
}

template <typename Scalar>
struct AxisRect {
  Scalar x_min{}, x_max{}, y_min{}, y_max{};

  bool valid() const { return x_min < x_max && y_min < y_max; }
  Scalar width() const { return x_max - x_min; }
  Scalar height() const { return y_max - y_min; }
  Scalar area() const { return width() * height(); }
  bool contains(const Point2<Scalar>& p, Scalar tol = Scalar(0)) const {
    return p.x() >= x_min - tol && p.x() <= x_max + tol && p.y() >= y_min - tol && p.y() <= y_max + tol;
  }
};

/// Ordered vertex list. Empty means "no intersection"; otherwise at least
/// three vertices, convex, counter-clockwise once normalized.
template <typename Scalar>
struct ConvexPolygon {
  std::vector<Point2<Scalar>> vertices;

  bool empty() const { return vertices.empty(); }
  std::size_t size() const { return vertices.size(); }

  /// Axis-aligned quad for the cell centered at (cx, cy) with the given
  /// half-extents, counter-clockwise.
  static ConvexPolygon box(Scalar cx, Scalar cy, Scalar half_w = Scalar(0.5), Scalar half_h = Scalar(0.5)) {
    return ConvexPolygon{{{cx - half_w, cy - half_h},
                          {cx + half_w, cy - half_h},
                          {cx + half_w, cy + half_h},
                          {cx - half_w, cy + half_h}}};
  }
};

template <typename Scalar>
Scalar signed_area(const ConvexPolygon<Scalar>& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return Scalar(0);
  Scalar sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % n];
    sum += a.x() * b.y() - b.x() * a.y();
  }
  return sum / Scalar(2);
}

/// Shoelace area; independent of winding.
template <typename Scalar>
Scalar polygon_area(const ConvexPolygon<Scalar>& poly) {
  return std::abs(signed_area(poly));
}

template <typename Scalar>
bool is_convex(const ConvexPolygon<Scalar>& poly, Scalar tol = Scalar(1e-12)) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return n == 0;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2<Scalar> e0 = v[(i + 1) % n] - v[i];
    const Point2<Scalar> e1 = v[(i + 2) % n] - v[(i + 1) % n];
    const Scalar cross = e0.x() * e1.y() - e0.y() * e1.x();
    if (std::abs(cross) <= tol) continue;
    const int s = cross > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return true;
}

/// Maps every vertex through `h` and re-orients the result counter-clockwise.
/// A quad collapsed onto a line is returned as-is; its area is zero.
template <typename Scalar>
ConvexPolygon<Scalar> transform_polygon(const Homography<Scalar>& h, const ConvexPolygon<Scalar>& poly) {
  ConvexPolygon<Scalar> out;
  out.vertices.reserve(poly.size());
  for (const auto& p : poly.vertices) out.vertices.push_back(transform_point(h, p));
  if (signed_area(out) < Scalar(0)) std::reverse(out.vertices.begin(), out.vertices.end());
  return out;
}

namespace detail {

// One pass of boundary clipping against the half-plane
// sign * (coord(p) - bound) >= 0, with coord = x (axis 0) or y (axis 1).
template <typename Scalar>
std::vector<Point2<Scalar>> clip_half_plane(const std::vector<Point2<Scalar>>& in, int axis, Scalar bound,
                                            Scalar sign) {
  std::vector<Point2<Scalar>> out;
  const std::size_t n = in.size();
  if (n == 0) return out;
  out.reserve(n + 2);
  const int other = 1 - axis;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2<Scalar>& a = in[i];
    const Point2<Scalar>& b = in[(i + 1) % n];
    const Scalar da = sign * (a[axis] - bound);
    const Scalar db = sign * (b[axis] - bound);
    const bool a_in = da >= Scalar(0);
    const bool b_in = db >= Scalar(0);
    if (a_in) out.push_back(a);
    if (a_in != b_in) {
      // Parametric crossing of the edge a->b with the boundary line.
      const Scalar t = da / (da - db);
      Point2<Scalar> c;
      c[axis] = bound;
      c[other] = a[other] + t * (b[other] - a[other]);
      out.push_back(c);
    }
  }
  return out;
}

template <typename Scalar>
void drop_repeated_vertices(std::vector<Point2<Scalar>>& v) {
  std::vector<Point2<Scalar>> out;
  out.reserve(v.size());
  for (const auto& p : v)
    if (out.empty() || p != out.back()) out.push_back(p);
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  v = std::move(out);
}

}  // namespace detail

/// Intersection of a convex polygon with an axis-aligned rectangle, by
/// successive clipping against the four boundary lines. Results with fewer
/// than three distinct vertices or a sliver area are returned empty.
template <typename Scalar>
ConvexPolygon<Scalar> clip_to_rect(const ConvexPolygon<Scalar>& poly, const AxisRect<Scalar>& rect) {
  if (!rect.valid()) throw InvalidArgument("clip rectangle has non-positive extent");
  if (poly.size() < 3) return {};

  std::vector<Point2<Scalar>> v = poly.vertices;
  v = detail::clip_half_plane(v, 0, rect.x_min, Scalar(1));
  v = detail::clip_half_plane(v, 0, rect.x_max, Scalar(-1));
  v = detail::clip_half_plane(v, 1, rect.y_min, Scalar(1));
  v = detail::clip_half_plane(v, 1, rect.y_max, Scalar(-1));
  detail::drop_repeated_vertices(v);

  ConvexPolygon<Scalar> out{std::move(v)};
  if (out.size() < 3 || polygon_area(out) < Scalar(kSliverFraction) * rect.area()) return {};
  if (signed_area(out) < Scalar(0)) std::reverse(out.vertices.begin(), out.vertices.end());
  return out;
}

/// Integer-snapped bounds: floor of the minima, ceil of the maxima.
/// The result may have zero extent for a polygon sitting on integer coordinates.
template <typename Scalar>
AxisRect<Scalar> bounding_box(const ConvexPolygon<Scalar>& poly) {
  if (poly.empty()) throw EmptyPolygon("bounding box of an empty polygon");
  Scalar x_lo = poly.vertices.front().x(), x_hi = x_lo;
  Scalar y_lo = poly.vertices.front().y(), y_hi = y_lo;
  for (const auto& p : poly.vertices) {
    x_lo = std::min(x_lo, p.x());
    x_hi = std::max(x_hi, p.x());
    y_lo = std::min(y_lo, p.y());
    y_hi = std::max(y_hi, p.y());
  }
  return {std::floor(x_lo), std::ceil(x_hi), std::floor(y_lo), std::ceil(y_hi)};
}

}  // namespace polysr
