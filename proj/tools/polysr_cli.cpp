// Command-line front end: `polysr reconstruct ...` and `polysr synth ...`.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "polysr/pgm.hpp"
#include "polysr/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct ReconstructArgs {
  std::string input;
  std::string output;
  double zoom = 2.0;
  double lambda = 0.05;
  polysr::OperatorKind op = polysr::OperatorKind::Polygon;
  polysr::SolveMethod method = polysr::SolveMethod::NormalEquationsCG;
  polysr::PriorKind prior = polysr::PriorKind::AverageUpscaled;
  std::optional<int> max_iter;
  double tol = 1e-8;
  std::string sparsity;
  std::string residuals;
};

struct SynthArgs {
  std::string truth;
  std::string output;
  int frames = 6;
  double zoom = 2.0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  double max_shift = 1.0;
  double max_rotation = 0.0;
};

int run_reconstruct(const ReconstructArgs& args) {
  polysr::ReconstructionConfig cfg;
  cfg.zoom = args.zoom;
  cfg.lambda = args.lambda;
  cfg.op = args.op;
  cfg.method = args.method;
  cfg.prior = args.prior;
  cfg.max_iterations = args.max_iter;
  cfg.tolerance = args.tol;

  const polysr::FrameSet frames = polysr::load_dataset(args.input);
  const polysr::ReconstructionResult res = polysr::run_reconstruction(frames, cfg);
  polysr::write_pgm(args.output, res.image);

  if (!args.sparsity.empty()) {
    std::ofstream out(args.sparsity);
    if (!out) throw polysr::MissingFile("cannot write " + args.sparsity);
    polysr::write_sparsity(out, res.op);
  }
  if (!args.residuals.empty()) polysr::write_residuals_csv(args.residuals, res.report);

  std::cout << "frames: " << frames.size() << "  low-res: " << frames.rows() << "x" << frames.cols()
            << "  high-res: " << res.image.rows() << "x" << res.image.cols() << '\n'
            << "operator: " << res.op.n_rows() << "x" << res.op.n_cols() << ", " << res.op.nnz() << " nonzeros\n"
            << "iterations: " << res.report.iterations_used
            << (res.report.converged ? " (converged)" : " (iteration budget exhausted)") << '\n';
  return kOk;
}

int run_synth(const SynthArgs& args) {
  polysr::SyntheticOptions opts;
  opts.frames = args.frames;
  opts.zoom = args.zoom;
  opts.noise_sigma = args.noise;
  opts.seed = args.seed;
  opts.max_shift = args.max_shift;
  opts.max_rotation_deg = args.max_rotation;

  const polysr::ImageGrid truth = polysr::read_pgm(args.truth);
  const polysr::SyntheticData data = polysr::generate_synthetic(truth, opts);
  polysr::write_dataset(args.output, data.frames);
  std::cout << "wrote " << data.frames.size() << " frames of " << data.frames.rows() << "x" << data.frames.cols()
            << " to " << args.output << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-frame super-resolution by damped least squares"};
  app.require_subcommand(1);

  const std::map<std::string, polysr::OperatorKind> operators{{"bilinear", polysr::OperatorKind::Bilinear},
                                                              {"polygon", polysr::OperatorKind::Polygon}};
  const std::map<std::string, polysr::SolveMethod> solvers{{"cg", polysr::SolveMethod::NormalEquationsCG},
                                                           {"lsqr", polysr::SolveMethod::DampedLSQR}};
  const std::map<std::string, polysr::PriorKind> priors{{"average", polysr::PriorKind::AverageUpscaled},
                                                        {"zero", polysr::PriorKind::Zero}};

  ReconstructArgs rec;
  auto* rc = app.add_subcommand("reconstruct", "Reconstruct a high-resolution image from a dataset");
  rc->add_option("--input", rec.input, "Dataset directory containing dataset.txt")->required();
  rc->add_option("--zoom", rec.zoom, "Zoom factor z > 1")->capture_default_str();
  rc->add_option("--lambda", rec.lambda, "Damping weight")->capture_default_str();
  rc->add_option("--operator", rec.op, "bilinear | polygon")
      ->transform(CLI::CheckedTransformer(operators, CLI::ignore_case));
  rc->add_option("--solver", rec.method, "cg | lsqr")->transform(CLI::CheckedTransformer(solvers, CLI::ignore_case));
  rc->add_option("--prior", rec.prior, "average | zero")->transform(CLI::CheckedTransformer(priors, CLI::ignore_case));
  rc->add_option("--max-iter", rec.max_iter, "Iteration budget (default 10 * unknowns)");
  rc->add_option("--tol", rec.tol, "Relative normal-equation residual tolerance")->capture_default_str();
  rc->add_option("--output", rec.output, "Output PGM (16-bit)")->required();
  rc->add_option("--dump-sparsity", rec.sparsity, "Write the stacked operator, one line per row");
  rc->add_option("--residuals", rec.residuals, "Write iteration,residual CSV");

  SynthArgs syn;
  auto* sc = app.add_subcommand("synth", "Simulate registered low-resolution frames from a truth image");
  sc->add_option("--truth", syn.truth, "High-resolution truth image (PGM, or PPM read as luma)")->required();
  sc->add_option("--frames", syn.frames, "Number of frames")->capture_default_str();
  sc->add_option("--zoom", syn.zoom, "Zoom factor z > 1")->capture_default_str();
  sc->add_option("--noise", syn.noise, "Gaussian noise standard deviation")->capture_default_str();
  sc->add_option("--seed", syn.seed, "Random seed")->capture_default_str();
  sc->add_option("--max-shift", syn.max_shift, "Translation range in low-res pixels")->capture_default_str();
  sc->add_option("--max-rotation", syn.max_rotation, "Rotation range in degrees")->capture_default_str();
  sc->add_option("--output", syn.output, "Output dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (rc->parsed()) return run_reconstruct(rec);
    return run_synth(syn);
  } catch (const polysr::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const polysr::InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const polysr::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
}
