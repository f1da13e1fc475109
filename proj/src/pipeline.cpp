#include "polysr/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

#include "polysr/pgm.hpp"

namespace polysr {

namespace fs = std::filesystem;

void ReconstructionConfig::validate() const {
  if (!(zoom > 1.0) || !std::isfinite(zoom)) throw InvalidArgument("zoom must be > 1");
  solve_config().validate();
}

SolveConfig ReconstructionConfig::solve_config() const {
  SolveConfig sc;
  sc.lambda = lambda;
  sc.max_iterations = max_iterations;
  sc.tolerance = tolerance;
  sc.method = method;
  return sc;
}

SparseOperator build_system(const FrameSet& frames, OperatorKind kind, double zoom) {
  frames.validate();
  const GridDims low{frames.rows(), frames.cols()};
  std::vector<std::future<SparseOperator>> jobs;
  jobs.reserve(frames.size());
  for (const Homographyd& h : frames.homographies)
    jobs.push_back(std::async(std::launch::async, [=] { return build_operator(kind, h, zoom, low); }));
  std::vector<SparseOperator> blocks;
  blocks.reserve(jobs.size());
  for (auto& j : jobs) blocks.push_back(j.get());
  return stack(blocks);
}

ReconstructionResult run_reconstruction(const FrameSet& frames, const ReconstructionConfig& cfg) {
  cfg.validate();
  frames.validate();

  ReconstructionResult out;
  out.op = build_system(frames, cfg.op, cfg.zoom);

  const GridDims high = highres_dims({frames.rows(), frames.cols()}, cfg.zoom);
  out.prior = cfg.prior == PriorKind::AverageUpscaled ? average_frames(frames, cfg.zoom)
                                                      : ImageGrid(high.rows, high.cols, 0.0);

  const Eigen::Index per_frame = static_cast<Eigen::Index>(frames.rows()) * frames.cols();
  Eigen::VectorXd b(per_frame * static_cast<Eigen::Index>(frames.size()));
  for (std::size_t f = 0; f < frames.size(); ++f)
    b.segment(static_cast<Eigen::Index>(f) * per_frame, per_frame) = pack(frames.frames[f]);

  SolveResult res = reconstruct(out.op, b, pack(out.prior), cfg.solve_config());
  out.image = unpack(res.x, high.rows, high.cols);
  out.report = std::move(res.report);
  return out;
}

Homographyd read_homography(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open " + path.string());
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(v))
      throw MalformedHomography(path.string() + ": not a number: " + token);
    values.push_back(v);
  }
  if (values.size() != 9)
    throw MalformedHomography(path.string() + ": expected 9 values, found " + std::to_string(values.size()));
  Eigen::Matrix3d m;
  m << values[0], values[1], values[2], values[3], values[4], values[5], values[6], values[7], values[8];
  try {
    const Homographyd h(m);
    if (std::abs(m(2, 2)) <= kDegeneracyTolerance * m.cwiseAbs().maxCoeff())
      throw MalformedHomography(path.string() + ": last entry is zero, cannot normalize");
    return h.normalized();
  } catch (const SingularMatrix&) {
    throw MalformedHomography(path.string() + ": singular matrix");
  }
}

void write_homography(const fs::path& path, const Homographyd& h) {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot write " + path.string());
  char buf[64];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", h(r, c));
      out << (c ? " " : "") << buf;
    }
    out << '\n';
  }
}

FrameSet load_dataset(const fs::path& dir) {
  const fs::path manifest = dir / kManifestName;
  std::ifstream in(manifest);
  if (!in) throw MissingFile("missing manifest " + manifest.string());

  FrameSet out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string image, homography, extra;
    if (!(ls >> image) || image.front() == '#') continue;
    if (!(ls >> homography) || (ls >> extra))
      throw DataError(manifest.string() + ":" + std::to_string(line_no) + ": expected '<image> <homography>'");
    if (!fs::exists(dir / image)) throw MissingFile("missing frame " + (dir / image).string());
    out.frames.push_back(read_pgm(dir / image));
    out.homographies.push_back(read_homography(dir / homography));
  }
  if (out.frames.empty()) throw DataError(manifest.string() + ": no frames listed");
  out.validate();
  return out;
}

void write_dataset(const fs::path& dir, const FrameSet& frames) {
  frames.validate();
  fs::create_directories(dir);
  std::ofstream manifest(dir / kManifestName);
  if (!manifest) throw MissingFile("cannot write manifest in " + dir.string());
  char name[32];
  for (std::size_t f = 0; f < frames.size(); ++f) {
    std::snprintf(name, sizeof name, "frame_%03zu", f);
    const std::string image = std::string(name) + ".pgm";
    const std::string homography = std::string(name) + ".h";
    write_pgm(dir / image, frames.frames[f]);
    write_homography(dir / homography, frames.homographies[f]);
    manifest << image << ' ' << homography << '\n';
  }
}

GridDims lowres_dims_for(int truth_rows, int truth_cols, double zoom) {
  if (!(zoom > 1.0)) throw InvalidArgument("zoom must be > 1");
  const GridDims low{static_cast<int>(std::lround(truth_rows / zoom)), static_cast<int>(std::lround(truth_cols / zoom))};
  if (low.rows < 1 || low.cols < 1 || !(highres_dims(low, zoom) == GridDims{truth_rows, truth_cols}))
    throw InvalidArgument("truth size " + std::to_string(truth_rows) + "x" + std::to_string(truth_cols) +
                          " is not an exact zoom of any low-resolution grid at z=" + std::to_string(zoom));
  return low;
}

SyntheticData generate_synthetic(const ImageGrid& truth, const SyntheticOptions& opts) {
  if (opts.frames < 1) throw InvalidArgument("need at least one frame");
  if (!(opts.noise_sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  if (!(opts.max_shift >= 0.0) || !(opts.max_rotation_deg >= 0.0)) throw InvalidArgument("negative motion range");
  const GridDims low = lowres_dims_for(truth.rows(), truth.cols(), opts.zoom);
  if (low.rows < 8 || low.cols < 8) throw InvalidArgument("low-resolution frames would be smaller than 8x8");

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> shift(-opts.max_shift, opts.max_shift);
  std::uniform_real_distribution<double> angle(-opts.max_rotation_deg, opts.max_rotation_deg);
  std::normal_distribution<double> noise(0.0, 1.0);

  // Motions are drawn before any noise so that the geometry does not depend
  // on the noise level.
  SyntheticData out;
  out.homographies.push_back(Homographyd::identity());
  const double cx = 0.5 * (low.cols - 1), cy = 0.5 * (low.rows - 1);
  for (int f = 1; f < opts.frames; ++f) {
    const double tx = shift(rng), ty = shift(rng);
    const double theta = opts.max_rotation_deg > 0 ? angle(rng) * std::numbers::pi / 180.0 : 0.0;
    // Rotate about the frame center, then translate.
    const Homographyd h = Homographyd::translation(cx + tx, cy + ty) * Homographyd::rotation(theta) *
                          Homographyd::translation(-cx, -cy);
    out.homographies.push_back(h.normalized());
  }

  const Eigen::VectorXd x = pack(truth);
  for (const Homographyd& h : out.homographies) {
    const SparseOperator a = build_operator(opts.forward, h, opts.zoom, low);
    Eigen::VectorXd b = apply(a, x);
    // Pixels whose footprint leaves the truth image have no operator row;
    // give them the truth sampled at the mapped pixel center instead of 0.
    const Homographyd map = compose_lowres_to_highres(h, opts.zoom);
    for (Eigen::Index m = 0; m < b.size(); ++m) {
      if (a.row_nnz(m) > 0) continue;
      const Point2<double> c = transform_point(map, Point2<double>(m % low.cols, m / low.cols));
      b[m] = sample_clamped(truth, c.x(), c.y());
    }
    if (opts.noise_sigma > 0)
      for (Eigen::Index k = 0; k < b.size(); ++k) b[k] += opts.noise_sigma * noise(rng);
    out.frames.frames.push_back(unpack(b, low.rows, low.cols));
  }
  out.frames.homographies = out.homographies;
  return out;
}

double total_variation(const ImageGrid& img) {
  double tv = 0.0;
  for (int i = 0; i < img.rows(); ++i)
    for (int j = 0; j < img.cols(); ++j) {
      if (j + 1 < img.cols()) tv += std::abs(img(i, j + 1) - img(i, j));
      if (i + 1 < img.rows()) tv += std::abs(img(i + 1, j) - img(i, j));
    }
  return tv;
}

int interior_border(double zoom) { return static_cast<int>(std::ceil(zoom)) + 1; }

double interior_relative_error(const ImageGrid& estimate, const ImageGrid& truth, double zoom) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw DimensionMismatch("estimate and truth differ in size");
  const int border = interior_border(zoom);
  double err = 0.0, ref = 0.0;
  for (int i = border; i < truth.rows() - border; ++i)
    for (int j = border; j < truth.cols() - border; ++j) {
      const double d = estimate(i, j) - truth(i, j);
      err += d * d;
      ref += truth(i, j) * truth(i, j);
    }
  if (ref == 0.0) throw InvalidArgument("interior of the truth image is empty or zero");
  return std::sqrt(err / ref);
}

void write_residuals_csv(const fs::path& path, const SolveReport& report) {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot write " + path.string());
  out << "iteration,residual\n";
  char buf[64];
  for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", report.residual_history[k]);
    out << k << ',' << buf << '\n';
  }
}

}  // namespace polysr
