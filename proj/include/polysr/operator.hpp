#pragma once

// Sparse image-formation operators. Row m of a per-frame operator holds the
// weights that combine high-resolution pixels into low-resolution pixel m of
// that frame; stacking the per-frame operators gives the full system.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <array>
#include <iosfwd>
#include <vector>

#include "polysr/geometry.hpp"

namespace polysr {

enum class OperatorKind { Bilinear, Polygon };

struct GridDims {
  int rows = 0;
  int cols = 0;
  Eigen::Index count() const { return static_cast<Eigen::Index>(rows) * cols; }
  bool operator==(const GridDims&) const = default;
};

/// One stored coefficient of a row.
struct Entry {
  Eigen::Index col;
  double weight;
  bool operator==(const Entry&) const = default;
};

using Row = std::vector<Entry>;

/// Immutable row-compressed matrix of interpolation weights.
class SparseOperator {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SparseOperator() = default;
  /// All-zero operator of the given shape.
  SparseOperator(Eigen::Index n_rows, Eigen::Index n_cols);
  explicit SparseOperator(Storage m);

  /// Assembles from per-row entry lists. Column indices must be in range
  /// and strictly increasing within each row.
  static SparseOperator from_rows(Eigen::Index n_cols, const std::vector<Row>& rows);
  static SparseOperator identity(Eigen::Index n);

  Eigen::Index n_rows() const { return m_.rows(); }
  Eigen::Index n_cols() const { return m_.cols(); }
  Eigen::Index nnz() const { return m_.nonZeros(); }
  Eigen::Index row_nnz(Eigen::Index r) const;
  Row row(Eigen::Index r) const;

  const Storage& matrix() const { return m_; }

 private:
  Storage m_;
};

/// Four neighbours of a point, in f00, f01, f10, f11 order:
/// (floor x, floor y), (floor x, floor y + 1), (floor x + 1, floor y),
/// (floor x + 1, floor y + 1), with weights (1-u)(1-t), t(1-u), u(1-t), ut.
struct GridWeight {
  int x;
  int y;
  double weight;
};
std::array<GridWeight, 4> bilinear_weights(const Point2<double>& p);

/// High-resolution grid for a low-resolution grid at the given zoom.
GridDims highres_dims(GridDims low, double zoom);

/// Single bilinear row for low-res pixel (row, col), given the map from
/// low-res frame coordinates to high-res coordinates. Empty when any
/// stencil point carrying weight lies outside the high-res grid.
Row bilinear_row(const Homographyd& lowres_to_highres, int row, int col, GridDims high);

/// Raw (unnormalized) overlap areas between the transformed footprint of
/// low-res pixel (row, col) and each high-res cell it touches. Empty when
/// any transformed corner leaves the high-res image.
Row polygon_overlaps(const Homographyd& lowres_to_highres, int row, int col, GridDims high);

/// Builds rows [row_begin, row_end) of a per-frame operator (rows indexed
/// by flattened low-res pixel). Touches only its own output.
std::vector<Row> build_rows(OperatorKind kind, const Homographyd& lowres_to_highres, GridDims low, GridDims high,
                            Eigen::Index row_begin, Eigen::Index row_end);

/// h_frame_to_ref maps low-res frame i onto low-res frame 0. zoom == 1 is
/// accepted to allow unit-zoom checks; reconstruction requires zoom > 1.
SparseOperator build_bilinear(const Homographyd& h_frame_to_ref, double zoom, GridDims low);
SparseOperator build_polygon(const Homographyd& h_frame_to_ref, double zoom, GridDims low);
SparseOperator build_operator(OperatorKind kind, const Homographyd& h_frame_to_ref, double zoom, GridDims low);

/// Vertical concatenation. All operators must share n_cols.
SparseOperator stack(const std::vector<SparseOperator>& ops);

Eigen::VectorXd apply(const SparseOperator& a, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd apply_transpose(const SparseOperator& a, const Eigen::Ref<const Eigen::VectorXd>& y);

/// true for rows holding at least one coefficient.
std::vector<bool> row_coverage(const SparseOperator& a);

/// One line per row: "row: (col, weight) (col, weight) ...".
void write_sparsity(std::ostream& os, const SparseOperator& a);

}  // namespace polysr
