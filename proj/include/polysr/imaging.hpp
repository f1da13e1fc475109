#pragma once

#include <Eigen/Dense>

#include <vector>

#include "polysr/geometry.hpp"

namespace polysr {

/// Single-channel raster, row-major. Pixel (i, j) lives at data[i * cols + j].
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(int rows, int cols, double fill = 0.0);
  ImageGrid(int rows, int cols, Eigen::VectorXd data);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Eigen::Index size() const { return data_.size(); }

  double& operator()(int i, int j) { return data_[static_cast<Eigen::Index>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<Eigen::Index>(i) * cols_ + j]; }

  const Eigen::VectorXd& data() const { return data_; }
  Eigen::VectorXd& data() { return data_; }

  bool operator==(const ImageGrid&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  Eigen::VectorXd data_;
};

/// Registered low-resolution frames. homographies[i] maps frame i onto
/// frame 0, so homographies[0] is the identity.
struct FrameSet {
  std::vector<ImageGrid> frames;
  std::vector<Homographyd> homographies;

  std::size_t size() const { return frames.size(); }
  int rows() const { return frames.empty() ? 0 : frames.front().rows(); }
  int cols() const { return frames.empty() ? 0 : frames.front().cols(); }

  /// Throws EmptyFrameSet / InconsistentDimensions / MalformedHomography.
  void validate() const;
};

/// High-resolution extent for a low-resolution extent n: round-half-up of z*n.
int scaled_extent(int n, double zoom);

Eigen::VectorXd pack(const ImageGrid& img);
ImageGrid unpack(const Eigen::Ref<const Eigen::VectorXd>& v, int rows, int cols);

/// Bilinear sample at (x, y); coordinates outside the grid are clamped to
/// the nearest edge.
double sample_clamped(const ImageGrid& img, double x, double y);

/// Bilinear upscale to scaled_extent(rows) x scaled_extent(cols). Output
/// pixel (i, j) samples the source at (j / z, i / z).
ImageGrid upscale(const ImageGrid& img, double zoom);

/// Prior for the reconstruction: every frame resampled onto the
/// high-resolution reference grid and averaged per pixel over the frames
/// that cover it. Uncovered pixels take the upscaled reference value.
ImageGrid average_frames(const FrameSet& fs, double zoom);

}  // namespace polysr
