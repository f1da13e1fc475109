#include "polysr/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace polysr {

ImageGrid::ImageGrid(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(rows) * cols, fill)) {
  if (rows < 0 || cols < 0) throw InvalidArgument("negative image dimensions");
}

ImageGrid::ImageGrid(int rows, int cols, Eigen::VectorXd data) : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 0 || cols < 0) throw InvalidArgument("negative image dimensions");
  if (data_.size() != static_cast<Eigen::Index>(rows) * cols)
    throw DimensionMismatch("image data length " + std::to_string(data_.size()) + " != " + std::to_string(rows) +
                            "x" + std::to_string(cols));
}

void FrameSet::validate() const {
  if (frames.empty()) throw EmptyFrameSet("frame set is empty");
  if (homographies.size() != frames.size())
    throw InconsistentDimensions("frame count and homography count differ");
  for (const auto& f : frames)
    if (f.rows() != rows() || f.cols() != cols()) throw InconsistentDimensions("frames differ in size");
  const Eigen::Matrix3d ref = homographies.front().normalized().matrix();
  if ((ref - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw MalformedHomography("reference frame homography is not the identity");
}

int scaled_extent(int n, double zoom) { return static_cast<int>(std::floor(zoom * n + 0.5)); }

Eigen::VectorXd pack(const ImageGrid& img) { return img.data(); }

ImageGrid unpack(const Eigen::Ref<const Eigen::VectorXd>& v, int rows, int cols) {
  if (rows < 0 || cols < 0 || v.size() != static_cast<Eigen::Index>(rows) * cols)
    throw DimensionMismatch("cannot reshape vector of length " + std::to_string(v.size()) + " into " +
                            std::to_string(rows) + "x" + std::to_string(cols));
  return ImageGrid(rows, cols, Eigen::VectorXd(v));
}

double sample_clamped(const ImageGrid& img, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(img.cols() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.rows() - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.cols() - 1);
  const int y1 = std::min(y0 + 1, img.rows() - 1);
  const double u = x - x0;
  const double t = y - y0;
  // Lerp form so that constant neighbourhoods are reproduced exactly.
  const double left = img(y0, x0) + t * (img(y1, x0) - img(y0, x0));
  const double right = img(y0, x1) + t * (img(y1, x1) - img(y0, x1));
  return left + u * (right - left);
}

ImageGrid upscale(const ImageGrid& img, double zoom) {
  if (!(zoom >= 1.0)) throw InvalidArgument("upscale requires zoom >= 1");
  const int rows = scaled_extent(img.rows(), zoom);
  const int cols = scaled_extent(img.cols(), zoom);
  ImageGrid out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = sample_clamped(img, j / zoom, i / zoom);
  return out;
}

ImageGrid average_frames(const FrameSet& fs, double zoom) {
  fs.validate();
  if (!(zoom >= 1.0)) throw InvalidArgument("average_frames requires zoom >= 1");

  std::vector<Homographyd> ref_to_frame;
  ref_to_frame.reserve(fs.size());
  for (const auto& h : fs.homographies) ref_to_frame.push_back(invert(h));

  const int rows = scaled_extent(fs.rows(), zoom);
  const int cols = scaled_extent(fs.cols(), zoom);
  // a frame covers its pixel footprints
  const double x_limit = fs.cols() - 0.5;
  const double y_limit = fs.rows() - 0.5;
  constexpr double kEdgeSlack = 1e-9;

  ImageGrid out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const Point2<double> ref(j / zoom, i / zoom);
      double sum = 0.0;
      int covering = 0;
      for (std::size_t f = 0; f < fs.size(); ++f) {
        Point2<double> p;
        try {
          p = transform_point(ref_to_frame[f], ref);
        } catch (const DegenerateProjection&) {
          continue;
        }
        if (p.x() < -0.5 - kEdgeSlack || p.x() > x_limit + kEdgeSlack || p.y() < -0.5 - kEdgeSlack ||
            p.y() > y_limit + kEdgeSlack)
          continue;
        sum += sample_clamped(fs.frames[f], p.x(), p.y());
        ++covering;
      }
      out(i, j) = covering > 0 ? sum / covering : sample_clamped(fs.frames.front(), ref.x(), ref.y());
    }
  }
  return out;
}

}  // namespace polysr
