#include "polysr/operator.hpp"

#include "polysr/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>

namespace polysr {

namespace {

constexpr double kEdgeSlack = 1e-9;
constexpr double kSnap = 1e-12;

// Removes round-off from coordinates that should be integral, so that
// exact grid hits produce a single coefficient.
double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) <= kSnap * std::max(1.0, std::abs(v)) ? r : v;
}

void check_zoom(double zoom) {
  if (!(zoom >= 1.0) || !std::isfinite(zoom)) throw InvalidArgument("zoom must be finite and >= 1");
}

}  // namespace

SparseOperator::SparseOperator(Eigen::Index n_rows, Eigen::Index n_cols) : m_(n_rows, n_cols) {
  m_.makeCompressed();
}

SparseOperator::SparseOperator(Storage m) : m_(std::move(m)) { m_.makeCompressed(); }

SparseOperator SparseOperator::from_rows(Eigen::Index n_cols, const std::vector<Row>& rows) {
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  Storage m(n_rows, n_cols);
  Eigen::VectorXi sizes(n_rows);
  for (Eigen::Index r = 0; r < n_rows; ++r) sizes[r] = static_cast<int>(rows[r].size());
  m.reserve(sizes);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    Eigen::Index prev = -1;
    for (const Entry& e : rows[r]) {
      if (e.col < 0 || e.col >= n_cols)
        throw DimensionMismatch("column " + std::to_string(e.col) + " out of range in row " + std::to_string(r));
      if (e.col <= prev) throw InvalidArgument("column indices must increase within row " + std::to_string(r));
      if (!std::isfinite(e.weight)) throw InvalidArgument("non-finite weight in row " + std::to_string(r));
      m.insert(r, e.col) = e.weight;
      prev = e.col;
    }
  }
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::identity(Eigen::Index n) {
  Storage m(n, n);
  m.setIdentity();
  return SparseOperator(std::move(m));
}

Eigen::Index SparseOperator::row_nnz(Eigen::Index r) const {
  return m_.outerIndexPtr()[r + 1] - m_.outerIndexPtr()[r];
}

Row SparseOperator::row(Eigen::Index r) const {
  Row out;
  out.reserve(static_cast<std::size_t>(row_nnz(r)));
  for (Storage::InnerIterator it(m_, r); it; ++it) out.push_back({it.col(), it.value()});
  return out;
}

std::array<GridWeight, 4> bilinear_weights(const Point2<double>& p) {
  const double fx = std::floor(p.x());
  const double fy = std::floor(p.y());
  const double u = p.x() - fx;
  const double t = p.y() - fy;
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  return {{{x0, y0, (1.0 - u) * (1.0 - t)},
           {x0, y0 + 1, t * (1.0 - u)},
           {x0 + 1, y0, u * (1.0 - t)},
           {x0 + 1, y0 + 1, u * t}}};
}

GridDims highres_dims(GridDims low, double zoom) {
  return {scaled_extent(low.rows, zoom), scaled_extent(low.cols, zoom)};
}

Row bilinear_row(const Homographyd& lowres_to_highres, int row, int col, GridDims high) {
  const Point2<double> mapped = transform_point(lowres_to_highres, Point2<double>(col, row));
  const Point2<double> p(snap(mapped.x()), snap(mapped.y()));
  Row out;
  out.reserve(4);
  for (const GridWeight& g : bilinear_weights(p)) {
    if (g.weight == 0.0) continue;
    if (g.x < 0 || g.x >= high.cols || g.y < 0 || g.y >= high.rows) return {};
    out.push_back({static_cast<Eigen::Index>(g.y) * high.cols + g.x, g.weight});
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
  return out;
}

Row polygon_overlaps(const Homographyd& lowres_to_highres, int row, int col, GridDims high) {
  const ConvexPolygon<double> footprint =
      transform_polygon(lowres_to_highres, ConvexPolygon<double>::box(col, row));

  const AxisRect<double> image{-0.5, high.cols - 0.5, -0.5, high.rows - 0.5};
  for (const auto& v : footprint.vertices)
    if (!image.contains(v, kEdgeSlack)) return {};

  const AxisRect<double> box = bounding_box(footprint);
  const int c_lo = std::max(0, static_cast<int>(box.x_min));
  const int c_hi = std::min(high.cols - 1, static_cast<int>(box.x_max));
  const int r_lo = std::max(0, static_cast<int>(box.y_min));
  const int r_hi = std::min(high.rows - 1, static_cast<int>(box.y_max));

  Row out;
  for (int r = r_lo; r <= r_hi; ++r) {
    for (int c = c_lo; c <= c_hi; ++c) {
      const AxisRect<double> cell{c - 0.5, c + 0.5, r - 0.5, r + 0.5};
      const double area = polygon_area(clip_to_rect(footprint, cell));
      if (area > 0.0) out.push_back({static_cast<Eigen::Index>(r) * high.cols + c, area});
    }
  }
  return out;
}

std::vector<Row> build_rows(OperatorKind kind, const Homographyd& lowres_to_highres, GridDims low, GridDims high,
                            Eigen::Index row_begin, Eigen::Index row_end) {
  if (row_begin < 0 || row_end > low.count() || row_begin > row_end)
    throw DimensionMismatch("row range outside the low-resolution grid");
  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(row_end - row_begin));
  for (Eigen::Index m = row_begin; m < row_end; ++m) {
    const int i = static_cast<int>(m / low.cols);
    const int j = static_cast<int>(m % low.cols);
    if (kind == OperatorKind::Bilinear) {
      rows.push_back(bilinear_row(lowres_to_highres, i, j, high));
      continue;
    }
    Row r = polygon_overlaps(lowres_to_highres, i, j, high);
    double total = 0.0;
    for (const Entry& e : r) total += e.weight;
    if (total > 0.0)
      for (Entry& e : r) e.weight /= total;
    else
      r.clear();
    rows.push_back(std::move(r));
  }
  return rows;
}

SparseOperator build_operator(OperatorKind kind, const Homographyd& h_frame_to_ref, double zoom, GridDims low) {
  check_zoom(zoom);
  if (low.rows <= 0 || low.cols <= 0) throw InvalidArgument("low-resolution grid must be non-empty");
  const GridDims high = highres_dims(low, zoom);
  const Homographyd map = compose_lowres_to_highres(h_frame_to_ref, zoom);
  return SparseOperator::from_rows(high.count(), build_rows(kind, map, low, high, 0, low.count()));
}

SparseOperator build_bilinear(const Homographyd& h_frame_to_ref, double zoom, GridDims low) {
  return build_operator(OperatorKind::Bilinear, h_frame_to_ref, zoom, low);
}

SparseOperator build_polygon(const Homographyd& h_frame_to_ref, double zoom, GridDims low) {
  return build_operator(OperatorKind::Polygon, h_frame_to_ref, zoom, low);
}

SparseOperator stack(const std::vector<SparseOperator>& ops) {
  if (ops.empty()) throw InvalidArgument("nothing to stack");
  const Eigen::Index cols = ops.front().n_cols();
  Eigen::Index rows = 0;
  for (const auto& op : ops) {
    if (op.n_cols() != cols) throw DimensionMismatch("stacked operators differ in column count");
    rows += op.n_rows();
  }
  SparseOperator::Storage m(rows, cols);
  Eigen::VectorXi sizes(rows);
  Eigen::Index offset = 0;
  for (const auto& op : ops)
    for (Eigen::Index r = 0; r < op.n_rows(); ++r) sizes[offset++] = static_cast<int>(op.row_nnz(r));
  m.reserve(sizes);
  offset = 0;
  for (const auto& op : ops) {
    for (Eigen::Index r = 0; r < op.n_rows(); ++r)
      for (SparseOperator::Storage::InnerIterator it(op.matrix(), r); it; ++it)
        m.insert(offset + r, it.col()) = it.value();
    offset += op.n_rows();
  }
  return SparseOperator(std::move(m));
}

Eigen::VectorXd apply(const SparseOperator& a, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != a.n_cols()) throw DimensionMismatch("apply: vector length != operator columns");
  return a.matrix() * x;
}

Eigen::VectorXd apply_transpose(const SparseOperator& a, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (y.size() != a.n_rows()) throw DimensionMismatch("apply_transpose: vector length != operator rows");
  return a.matrix().transpose() * y;
}

std::vector<bool> row_coverage(const SparseOperator& a) {
  std::vector<bool> flags(static_cast<std::size_t>(a.n_rows()));
  for (Eigen::Index r = 0; r < a.n_rows(); ++r) flags[static_cast<std::size_t>(r)] = a.row_nnz(r) > 0;
  return flags;
}

void write_sparsity(std::ostream& os, const SparseOperator& a) {
  char buf[64];
  for (Eigen::Index r = 0; r < a.n_rows(); ++r) {
    os << r << ':';
    for (SparseOperator::Storage::InnerIterator it(a.matrix(), r); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      os << " (" << it.col() << ", " << buf << ')';
    }
    os << '\n';
  }
}

}  // namespace polysr
