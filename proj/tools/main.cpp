#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "proxframe/errors.hpp"
#include "proxframe/exact_prox.hpp"
#include "proxframe/fbs.hpp"
#include "proxframe/frame.hpp"
#include "proxframe/gallery.hpp"
#include "proxframe/io.hpp"
#include "proxframe/shrinkage.hpp"
#include "proxframe/tv.hpp"
#include "proxframe/verify.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;
using namespace proxframe;

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNoConvergence = 4;

FrameXd load_frame_or_gallery(const std::string& source) {
  if (std::filesystem::exists(source)) return build_frame(read_matrix(source));
  if (source.find(':') != std::string::npos) return make_gallery(source);
  throw IoError("'" + source + "' is neither an existing file nor a gallery spec");
}

MatrixXd load_matrix_or_gallery(const std::string& source) {
  if (std::filesystem::exists(source)) return read_matrix(source);
  if (source.find(':') != std::string::npos) return make_gallery(source).matrix();
  throw IoError("'" + source + "' is neither an existing file nor a gallery spec");
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

struct ShrinkArgs {
  std::string frame_path, gallery_spec, in_path, out_path;
  double gamma = 0.0;
};

int run_shrink(const ShrinkArgs& args) {
  if (args.frame_path.empty() == args.gallery_spec.empty())
    throw ConfigError("exactly one of --frame and --gallery must be given");
  const FrameXd frame = args.frame_path.empty() ? make_gallery(args.gallery_spec)
                                                : build_frame(read_matrix(args.frame_path));
  const VectorXd input = read_vector(args.in_path);
  write_vector(args.out_path, frame_soft_shrink(frame, ShrinkConfig{args.gamma}, input));
  return kExitOk;
}

struct ProxArgs {
  std::string matrix_path, in_path, out_path, report_path;
  double gamma = 0.0;
  double tol = 1e-10;
  double tau = 0.0;
  long max_iters = 200000;
};

int run_prox(const ProxArgs& args) {
  const MatrixXd t = read_matrix(args.matrix_path);
  const VectorXd y = read_vector(args.in_path);
  ProxSolverConfig cfg;
  cfg.tol = args.tol;
  cfg.tau = args.tau;
  cfg.max_iters = args.max_iters;
  json report;
  int code = kExitOk;
  try {
    const ProxResult result = exact_prox(t, args.gamma, y, cfg);
    write_vector(args.out_path, result.minimizer);
    report = {{"converged", true},
              {"iterations", result.iterations},
              {"kkt_residual", result.kkt_residual},
              {"primal_obj", result.primal_obj},
              {"dual_linf", result.dual.lpNorm<Eigen::Infinity>()}};
  } catch (const NoConvergenceError& e) {
    write_vector(args.out_path, e.best());
    report = {{"converged", false},
              {"iterations", e.iterations()},
              {"dual_change", e.residual()},
              {"kkt_residual",
               kkt_certificate(t, args.gamma, y, e.best(),
                               1e-6 * (1.0 + VectorXd(t * e.best()).lpNorm<Eigen::Infinity>()))},
              {"primal_obj", analysis_l1_objective(t, args.gamma, y, e.best())}};
    std::cerr << e.what() << '\n';
    code = kExitNoConvergence;
  }
  if (!args.report_path.empty()) write_json(args.report_path, report);
  return code;
}

struct VerifyArgs {
  std::string suite = "all";
  std::string out_path;
  std::uint64_t seed = 0;
  long samples = 0;
};

int run_verify(const VerifyArgs& args) {
  VerifyOptions opts;
  opts.seed = args.seed;
  opts.samples = args.samples;
  const std::vector<PropertyReport> reports = run_suite(args.suite, opts);
  bool all_passed = true;
  for (const auto& r : reports) {
    all_passed = all_passed && r.passed;
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name
              << " measured=" << format_real(r.measured) << " bound=" << format_real(r.bound)
              << " samples=" << r.samples << '\n';
  }
  if (!args.out_path.empty()) write_json(args.out_path, reports_to_json(reports));
  return all_passed ? kExitOk : kExitPropertyFailure;
}

struct TvArgs {
  long n1 = 0, n2 = 0;
  std::string out_path;
};

int run_tv(const TvArgs& args) {
  write_matrix(args.out_path, tv_matrix(args.n1, args.n2));
  return kExitOk;
}

struct GalleryArgs {
  std::string kind, out_path;
};

int run_gallery(const GalleryArgs& args) {
  write_matrix(args.out_path, make_gallery(args.kind).matrix());
  return kExitOk;
}

struct SolveArgs {
  std::string config_path, out_path, trace_path;
};

json trace_to_json(const FbsTrace& trace) {
  return {{"converged", trace.converged},
          {"iterations", trace.iterations},
          {"iterate_norm_change", trace.iterate_norm_change},
          {"objective", trace.objective}};
}

int run_solve(const SolveArgs& args) {
  std::ifstream in(args.config_path);
  if (!in) throw IoError("cannot open '" + args.config_path + "' for reading");
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  for (const auto& [key, value] : config.items()) {
    (void)value;
    if (key != "K" && key != "f" && key != "backward" && key != "lambda" && key != "tol" &&
        key != "max_iters")
      throw ConfigError("unknown config key '" + key + "'");
  }
  if (!config.contains("K") || !config.contains("f") || !config.contains("backward") ||
      !config.contains("lambda"))
    throw ConfigError("config needs keys K, f, backward, lambda");

  // Data vector: either a PGM image (vectorized column-major) or a text vector.
  const std::string f_path = config.at("f").get<std::string>();
  std::optional<PgmImage> image;
  VectorXd f;
  if (looks_like_pgm(f_path)) {
    image = read_pgm(f_path);
    f = image->data;
  } else {
    f = read_vector(f_path);
  }

  const std::string k_spec = config.at("K").get<std::string>();
  MatrixXd k = k_spec == "identity" ? MatrixXd(MatrixXd::Identity(f.size(), f.size()))
                                    : read_matrix(k_spec);
  const ForwardModel model = make_forward_model(std::move(k), f);
  const Eigen::Index n = model.k.cols();

  const json& backward_cfg = config.at("backward");
  for (const auto& [key, value] : backward_cfg.items()) {
    (void)value;
    if (key != "kind" && key != "gamma" && key != "frame" && key != "inner_tol" &&
        key != "inner_max_iters")
      throw ConfigError("unknown backward key '" + key + "'");
  }
  if (!backward_cfg.contains("kind") || !backward_cfg.contains("gamma") ||
      !backward_cfg.contains("frame"))
    throw ConfigError("backward needs keys kind, gamma, frame");
  const std::string kind = backward_cfg.at("kind").get<std::string>();
  const double gamma = backward_cfg.at("gamma").get<double>();
  const std::string operator_spec = backward_cfg.at("frame").get<std::string>();

  const BackwardStep backward = [&]() {
    if (kind == "frame_shrink") return BackwardStep::frame_shrink(load_frame_or_gallery(operator_spec), gamma);
    if (kind == "exact_prox") {
      ProxSolverConfig inner;
      if (backward_cfg.contains("inner_tol")) inner.tol = backward_cfg.at("inner_tol").get<double>();
      if (backward_cfg.contains("inner_max_iters"))
        inner.max_iters = backward_cfg.at("inner_max_iters").get<long>();
      return BackwardStep::exact_prox(load_matrix_or_gallery(operator_spec), gamma, inner);
    }
    throw ConfigError("backward kind must be frame_shrink or exact_prox, got '" + kind + "'");
  }();

  const double lambda = config.at("lambda").get<double>();
  const double tol = config.value("tol", 1e-8);
  const long max_iters = config.value("max_iters", 10000L);

  auto write_solution = [&](const VectorXd& x) {
    if (image) {
      PgmImage out = *image;
      out.data = x;
      write_pgm(args.out_path, out);
    } else {
      write_vector(args.out_path, x);
    }
  };

  try {
    auto [xhat, trace] = fbs_solve(model, lambda, backward, tol, max_iters, VectorXd::Zero(n));
    write_solution(xhat);
    write_json(args.trace_path, trace_to_json(trace));
  } catch (const FbsNoConvergenceError& e) {
    write_solution(e.best());
    write_json(args.trace_path, trace_to_json(e.trace()));
    std::cerr << e.what() << '\n';
    return kExitNoConvergence;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frame soft shrinkage, exact analysis-l1 proximity, splitting solvers, "
               "and a property verification harness"};
  app.require_subcommand(1);

  ShrinkArgs shrink_args;
  auto* shrink = app.add_subcommand("shrink", "Apply the frame soft shrinkage operator");
  shrink->add_option("--frame", shrink_args.frame_path, "Frame matrix file");
  shrink->add_option("--gallery", shrink_args.gallery_spec, "Gallery spec, e.g. toy1d:c=2");
  shrink->add_option("--gamma", shrink_args.gamma, "Shrinkage threshold")->required();
  shrink->add_option("--in", shrink_args.in_path, "Input vector file")->required();
  shrink->add_option("--out", shrink_args.out_path, "Output vector file")->required();

  ProxArgs prox_args;
  auto* prox = app.add_subcommand("prox", "Exact proximity operator of gamma*||T.||_1");
  prox->add_option("--matrix", prox_args.matrix_path, "Analysis operator file")->required();
  prox->add_option("--gamma", prox_args.gamma, "Regularization weight")->required();
  prox->add_option("--in", prox_args.in_path, "Input vector file")->required();
  prox->add_option("--out", prox_args.out_path, "Output vector file")->required();
  prox->add_option("--report", prox_args.report_path, "Write a JSON solve report here");
  prox->add_option("--tol", prox_args.tol, "Dual iterate-change tolerance");
  prox->add_option("--tau", prox_args.tau, "Dual step size (default 1/||T||^2)");
  prox->add_option("--max-iters", prox_args.max_iters, "Iteration cap");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Run the empirical property suites");
  verify->add_option("--suite", verify_args.suite,
                     "firm_nonexpansive|cyclic|h_zero|single_valued|oneD|prox_baseline|fbs|all");
  verify->add_option("--seed", verify_args.seed, "Sampling seed");
  verify->add_option("--samples", verify_args.samples, "Override the per-suite sample count");
  verify->add_option("--out", verify_args.out_path, "Write the JSON report array here");

  TvArgs tv_args;
  auto* tv = app.add_subcommand("tv", "Write an anisotropic TV difference matrix");
  tv->add_option("--n1", tv_args.n1, "Image rows")->required();
  tv->add_option("--n2", tv_args.n2, "Image columns")->required();
  tv->add_option("--out", tv_args.out_path, "Output matrix file")->required();

  GalleryArgs gallery_args;
  auto* gallery = app.add_subcommand("gallery", "Write a frame from the built-in gallery");
  gallery->add_option("--kind", gallery_args.kind, "Gallery spec, e.g. parseval:l=6,n=3")
      ->required();
  gallery->add_option("--out", gallery_args.out_path, "Output matrix file")->required();

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Forward-backward splitting from a JSON config");
  solve->add_option("--config", solve_args.config_path, "JSON configuration file")->required();
  solve->add_option("--out", solve_args.out_path, "Solution vector or PGM file")->required();
  solve->add_option("--trace", solve_args.trace_path, "JSON iteration trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (shrink->parsed()) return run_shrink(shrink_args);
    if (prox->parsed()) return run_prox(prox_args);
    if (verify->parsed()) return run_verify(verify_args);
    if (tv->parsed()) return run_tv(tv_args);
    if (gallery->parsed()) return run_gallery(gallery_args);
    if (solve->parsed()) return run_solve(solve_args);
  } catch (const IoError& e) {
    std::cerr << e.what() << '\n';
    return kExitIo;
  } catch (const NoConvergenceError& e) {
    std::cerr << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
