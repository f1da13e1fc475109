// Acceptance suite. Prints one PASS/FAIL line per criterion; exits nonzero
// if any selected criterion fails. Usage: acceptance [criterion...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "polysr/pgm.hpp"
#include "polysr/pipeline.hpp"

using namespace polysr;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
using Poly2 = ConvexPolygon<double>;

struct Outcome {
  bool pass;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Homographyd rotation_about(double degrees, double cx, double cy) {
  return Homographyd::translation(cx, cy) * Homographyd::rotation(degrees * kPi / 180) *
         Homographyd::translation(-cx, -cy);
}

double mean_nonempty_nnz(const SparseOperator& a) {
  long rows = 0, nnz = 0;
  for (Eigen::Index r = 0; r < a.n_rows(); ++r)
    if (a.row_nnz(r) > 0) {
      ++rows;
      nnz += a.row_nnz(r);
    }
  return rows ? static_cast<double>(nnz) / rows : 0.0;
}

ImageGrid smooth_truth(int rows, int cols) {
  ImageGrid t(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      t(i, j) = 0.5 + 0.2 * std::sin(2 * kPi * j / 37.0) * std::cos(2 * kPi * i / 29.0) +
                0.1 * std::sin(2 * kPi * (i + j) / 53.0);
  return t;
}

// Smooth background plus oblique gratings of period 9 and 13 pixels.
ImageGrid detailed_truth(int rows, int cols) {
  ImageGrid t(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      t(i, j) = 0.5 + 0.15 * std::sin(2 * kPi * j / 37.0) * std::cos(2 * kPi * i / 29.0) +
                0.09 * std::sin(2 * kPi * (i + 0.6 * j) / 9.0) + 0.06 * std::cos(2 * kPi * (j - 0.3 * i) / 13.0);
  return t;
}

// Dark glyph strokes, three pixels wide, on a light page.
ImageGrid text_truth(int size, std::uint64_t seed) {
  ImageGrid t(size, size, 0.9);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution on(0.55);
  constexpr int kCell = 15, kStroke = 3;
  auto fill = [&](int r0, int r1, int c0, int c1) {
    for (int i = std::max(r0, 0); i < std::min(r1, size); ++i)
      for (int j = std::max(c0, 0); j < std::min(c1, size); ++j) t(i, j) = 0.1;
  };
  for (int gy = 0; gy + kCell <= size; gy += kCell)
    for (int gx = 0; gx + kCell <= size; gx += kCell) {
      const int top = gy + 2, mid = gy + 6, bot = gy + 10, left = gx + 2, right = gx + 9;
      // seven-segment style glyph
      if (on(rng)) fill(top, top + kStroke, left, right + kStroke);
      if (on(rng)) fill(mid, mid + kStroke, left, right + kStroke);
      if (on(rng)) fill(bot, bot + kStroke, left, right + kStroke);
      if (on(rng)) fill(top, mid + kStroke, left, left + kStroke);
      if (on(rng)) fill(top, mid + kStroke, right, right + kStroke);
      if (on(rng)) fill(mid, bot + kStroke, left, left + kStroke);
      if (on(rng)) fill(mid, bot + kStroke, right, right + kStroke);
    }
  return t;
}

Outcome operator_structure() {
  const Stopwatch sw;
  const GridDims low{32, 32};
  const Homographyd h = Homographyd::rotation(5 * kPi / 180);
  const SparseOperator bil = build_bilinear(h, 2.0, low);
  const SparseOperator poly = build_polygon(h, 2.0, low);
  const double secs = sw.seconds();

  Eigen::Index max_bil = 0;
  for (Eigen::Index r = 0; r < bil.n_rows(); ++r) max_bil = std::max(max_bil, bil.row_nnz(r));
  const bool leading_empty = poly.row_nnz(0) == 0;
  const double mb = mean_nonempty_nnz(bil), mp = mean_nonempty_nnz(poly);
  return {max_bil <= 4 && leading_empty && mp > mb && secs < 1.0,
          fmt("max bilinear nnz/row %ld, polygon row 0 empty: %s, mean nnz bilinear %.3f polygon %.3f, %.3f s",
              static_cast<long>(max_bil), leading_empty ? "yes" : "no", mb, mp, secs)};
}

Outcome row_stochastic() {
  const Stopwatch sw;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> shift(-2, 2), angle(-10, 10);
  const double zooms[] = {1.8, 2.0, 4.0, 5.0};
  const GridDims low{24, 24};
  long rows = 0, bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double z = zooms[trial % 4];
    const Homographyd h = Homographyd::translation(shift(rng), shift(rng)) * rotation_about(angle(rng), 11.5, 11.5);
    for (const OperatorKind kind : {OperatorKind::Bilinear, OperatorKind::Polygon}) {
      const SparseOperator a = build_operator(kind, h, z, low);
      for (Eigen::Index r = 0; r < a.n_rows(); ++r) {
        if (a.row_nnz(r) == 0) continue;
        ++rows;
        double sum = 0.0;
        for (const Entry& e : a.row(r)) sum += e.weight;
        if (std::abs(sum - 1.0) > 1e-9) ++bad;
      }
    }
  }
  const double secs = sw.seconds();
  return {bad == 0 && rows > 0 && secs < 10.0,
          fmt("%ld of %ld non-empty rows sum to 1 within 1e-9, %.3f s", rows - bad, rows, secs)};
}

Outcome identity_and_permutation() {
  const GridDims low{12, 12};
  bool ok = true;
  for (const OperatorKind kind : {OperatorKind::Bilinear, OperatorKind::Polygon}) {
    const Eigen::MatrixXd id = oracle::dense(build_operator(kind, Homographyd::identity(), 1.0, low));
    ok = ok && id == Eigen::MatrixXd::Identity(144, 144);

    const int tx = 2, ty = -1;
    const Eigen::MatrixXd p = oracle::dense(build_operator(kind, Homographyd::translation(tx, ty), 1.0, low));
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(144, 144);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) {
        const int ii = i + ty, jj = j + tx;
        if (ii >= 0 && ii < 12 && jj >= 0 && jj < 12) expected(i * 12 + j, ii * 12 + jj) = 1.0;
      }
    ok = ok && p == expected;
  }
  return {ok, ok ? "identity and shift (2, -1) match exactly for both operators" : "mismatch"};
}

Outcome geometric_oracle() {
  const Poly2 square = Poly2::box(0.5, 0.5);
  const Poly2 triangle{{{0, 0}, {1, 0}, {0, 1}}};
  const double sq = polygon_area(square), tri = polygon_area(triangle);
  bool ok = std::abs(sq - 1.0) <= 1e-12 && std::abs(tri - 0.5) <= 1e-12;

  std::mt19937_64 geom(7), samples(8);
  std::uniform_real_distribution<double> u(-1, 1);
  const GridDims high{40, 40};
  int cells = 0, outliers = 0;
  double worst = 0.0;
  for (int quad = 0; quad < 20;) {
    Eigen::Matrix3d m;
    m << 2.0 + 0.6 * u(geom), 0.5 * u(geom), 18 + 2 * u(geom),  //
        0.5 * u(geom), 2.0 + 0.6 * u(geom), 18 + 2 * u(geom),   //
        0.01 * u(geom), 0.01 * u(geom), 1.0;
    const Homographyd h(m);
    const Poly2 q = transform_polygon(h, Poly2::box(0, 0));
    if (!is_convex(q)) continue;
    ++quad;
    const Row raw = polygon_overlaps(h, 0, 0, high);
    const std::vector<Eigen::Vector2d> pts(q.vertices.begin(), q.vertices.end());
    const auto box = bounding_box(q);
    for (int r = static_cast<int>(box.y_min); r <= static_cast<int>(box.y_max); ++r)
      for (int c = static_cast<int>(box.x_min); c <= static_cast<int>(box.x_max); ++c) {
        const Eigen::Index col = static_cast<Eigen::Index>(r) * high.cols + c;
        double exact = 0.0;
        for (const Entry& e : raw)
          if (e.col == col) exact = e.weight;
        const auto est = oracle::mc_overlap(pts, c - 0.5, c + 0.5, r - 0.5, r + 0.5, 1000, samples);
        const double z = std::abs(exact - est.area) / est.std_error;
        worst = std::max(worst, z);
        ++cells;
        if (z > 3.0) ++outliers;
      }
  }
  ok = ok && outliers == 0;
  return {ok, fmt("square %.17g, triangle %.17g; %d cells, %d beyond 3 SE, worst %.2f SE", sq, tri, cells, outliers,
                  worst)};
}

Outcome solver_oracle() {
  const Stopwatch sw;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> cols_dist(20, 200);
  const double lambdas[] = {1e-3, 1e-2, 0.05, 0.5, 2.0};
  double worst_dense = 0.0, worst_pair = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const SparseOperator a = [&] {
      if (trial % 5 != 4) {
        const int cols = cols_dist(rng);
        return oracle::random_operator(cols + cols / 2, cols, 0.05, rng);
      }
      // super-resolution system: 3 frames of 6x6 at z = 2, 144 unknowns
      std::vector<SparseOperator> blocks;
      for (int f = 0; f < 3; ++f)
        blocks.push_back(build_polygon(Homographyd::translation(0.5 * u(rng), 0.5 * u(rng)), 2.0, {6, 6}));
      return stack(blocks);
    }();
    const Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(a.n_rows(), [&] { return u(rng); });
    const double lambda = lambdas[trial % 5];
    const Eigen::VectorXd expected = oracle::dense_damped_solve(oracle::dense(a), b, lambda);

    SolveConfig cfg;
    cfg.lambda = lambda;
    cfg.tolerance = 1e-12;
    const Eigen::VectorXd cg = solve_damped(a, b, cfg).x;
    cfg.method = SolveMethod::DampedLSQR;
    const Eigen::VectorXd lsqr = solve_damped(a, b, cfg).x;
    const double scale = expected.norm();
    worst_dense = std::max({worst_dense, (cg - expected).norm() / scale, (lsqr - expected).norm() / scale});
    worst_pair = std::max(worst_pair, (cg - lsqr).norm() / cg.norm());
  }
  const double secs = sw.seconds();
  return {worst_dense <= 1e-8 && worst_pair <= 1e-6 && secs < 30.0,
          fmt("worst relative error vs dense %.2e, CG vs LSQR %.2e, %.2f s", worst_dense, worst_pair, secs)};
}

Outcome round_trip() {
  const Stopwatch sw;
  const ImageGrid truth = detailed_truth(128, 128);
  SyntheticOptions opts;
  opts.frames = 6;
  opts.zoom = 2.0;
  opts.seed = 11;

  ReconstructionConfig cfg;
  cfg.zoom = 2.0;
  cfg.lambda = 1e-6;
  const ReconstructionResult clean = run_reconstruction(generate_synthetic(truth, opts).frames, cfg);
  const double clean_err = interior_relative_error(clean.image, truth, 2.0);

  opts.noise_sigma = 0.01;
  cfg.lambda = 0.05;
  const ReconstructionResult noisy = run_reconstruction(generate_synthetic(truth, opts).frames, cfg);
  const double noisy_err = interior_relative_error(noisy.image, truth, 2.0);
  const double prior_err = interior_relative_error(noisy.prior, truth, 2.0);
  const double secs = sw.seconds();
  return {clean_err <= 1e-3 && noisy_err < prior_err && secs < 60.0,
          fmt("noiseless error %.3e, noisy error %.3e vs prior %.3e, %.2f s", clean_err, noisy_err, prior_err, secs)};
}

Outcome oscillation() {
  const ImageGrid truth = text_truth(120, 5);
  SyntheticOptions opts;
  opts.frames = 10;
  opts.zoom = 5.0;
  opts.seed = 21;
  opts.max_rotation_deg = 5.0;
  const FrameSet frames = generate_synthetic(truth, opts).frames;

  ReconstructionConfig cfg;
  cfg.zoom = 5.0;
  cfg.lambda = 0.005;
  cfg.op = OperatorKind::Bilinear;
  const double tv_bil = total_variation(run_reconstruction(frames, cfg).image);
  cfg.op = OperatorKind::Polygon;
  const double tv_poly = total_variation(run_reconstruction(frames, cfg).image);
  const double ratio = tv_bil / tv_poly;
  return {ratio >= 1.1, fmt("TV bilinear %.1f, polygon %.1f, truth %.1f, ratio %.3f (need >= 1.1)", tv_bil, tv_poly,
                            total_variation(truth), ratio)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void end_to_end(const fs::path& dir) {
  fs::remove_all(dir);
  SyntheticOptions opts;
  opts.frames = 5;
  opts.noise_sigma = 0.01;
  opts.seed = 77;
  opts.max_rotation_deg = 3.0;
  write_dataset(dir / "data", generate_synthetic(smooth_truth(64, 64), opts).frames);
  const ReconstructionResult r = run_reconstruction(load_dataset(dir / "data"), ReconstructionConfig{});
  write_pgm(dir / "out.pgm", r.image);
  write_residuals_csv(dir / "residuals.csv", r.report);
  std::ofstream sparsity(dir / "sparsity.txt");
  write_sparsity(sparsity, r.op);
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "polysr_acceptance";
  const fs::path a = base / "a", b = base / "b";
  end_to_end(a);
  end_to_end(b);
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(a))
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), a));
  int differing = 0;
  for (const auto& f : files)
    if (slurp(a / f) != slurp(b / f)) ++differing;
  fs::remove_all(base);
  return {differing == 0 && !files.empty(), fmt("%zu files compared, %d differ", files.size(), differing)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"operator structure", operator_structure},
      {"row stochasticity", row_stochastic},
      {"identity and permutation recovery", identity_and_permutation},
      {"geometric oracle", geometric_oracle},
      {"solver oracle", solver_oracle},
      {"synthetic round trip", round_trip},
      {"bilinear oscillation", oscillation},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
