#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polysr/imaging.hpp"
#include "polysr/operator.hpp"
#include "polysr/solver.hpp"

namespace polysr {

enum class PriorKind { AverageUpscaled, Zero };

struct ReconstructionConfig {
  double zoom = 2.0;
  double lambda = 0.05;
  OperatorKind op = OperatorKind::Polygon;
  SolveMethod method = SolveMethod::NormalEquationsCG;
  std::optional<int> max_iterations;
  double tolerance = 1e-8;
  PriorKind prior = PriorKind::AverageUpscaled;

  void validate() const;
  SolveConfig solve_config() const;
};

struct ReconstructionResult {
  ImageGrid image;
  ImageGrid prior;
  SolveReport report;
  SparseOperator op;  // stacked, one block of rows per frame
};

/// Builds and stacks the per-frame operators, forms the prior, and solves
/// around it. Per-frame operators are assembled concurrently.
ReconstructionResult run_reconstruction(const FrameSet& fs, const ReconstructionConfig& cfg);

/// Stacked operator for all frames of `fs`, in frame order.
SparseOperator build_system(const FrameSet& fs, OperatorKind kind, double zoom);

// ---- datasets -------------------------------------------------------------
//
// A dataset directory holds a manifest "dataset.txt" with one line per
// frame, "<image-file> <homography-file>", paths relative to the directory.
// A homography file has nine whitespace-separated reals, row-major.

inline constexpr const char* kManifestName = "dataset.txt";

Homographyd read_homography(const std::filesystem::path& path);
void write_homography(const std::filesystem::path& path, const Homographyd& h);

FrameSet load_dataset(const std::filesystem::path& dir);
/// Writes frame_NNN.pgm / frame_NNN.h plus the manifest.
void write_dataset(const std::filesystem::path& dir, const FrameSet& fs);

// ---- synthetic data -------------------------------------------------------

struct SyntheticOptions {
  int frames = 6;
  double zoom = 2.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  /// Frames 1.. get uniform translations in [-max_shift, max_shift]
  /// low-resolution pixels and rotations in [-max_rotation_deg, max_rotation_deg].
  double max_shift = 1.0;
  double max_rotation_deg = 0.0;
  OperatorKind forward = OperatorKind::Polygon;
};

struct SyntheticData {
  FrameSet frames;
  std::vector<Homographyd> homographies;  // ground truth, frame -> reference
};

/// Low-resolution grid for a high-resolution truth image at `zoom`.
GridDims lowres_dims_for(int truth_rows, int truth_cols, double zoom);

/// Simulates frames b_i = A_i x + noise from a high-resolution truth image.
/// Frame 0 is the unshifted reference. Deterministic for a given seed.
SyntheticData generate_synthetic(const ImageGrid& truth, const SyntheticOptions& opts);

// ---- metrics --------------------------------------------------------------

/// Anisotropic total variation: sum of absolute horizontal and vertical
/// neighbour differences.
double total_variation(const ImageGrid& img);

/// Border width excluded from error metrics: ceil(z) + 1.
int interior_border(double zoom);

/// ||x - truth|| / ||truth|| over the interior region.
double interior_relative_error(const ImageGrid& estimate, const ImageGrid& truth, double zoom);

// ---- residual log ---------------------------------------------------------

/// "iteration,residual" CSV of the residual history.
void write_residuals_csv(const std::filesystem::path& path, const SolveReport& report);

}  // namespace polysr
