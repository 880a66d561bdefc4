#include "proxframe/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include <Eigen/Dense>

#include "proxframe/errors.hpp"
#include "proxframe/exact_prox.hpp"
#include "proxframe/fbs.hpp"
#include "proxframe/frame.hpp"
#include "proxframe/gallery.hpp"
#include "proxframe/oned.hpp"
#include "proxframe/shrinkage.hpp"
#include "proxframe/subgradient.hpp"
#include "proxframe/tv.hpp"

namespace proxframe {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(tag ^ splitmix64(index))));
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PROXFRAME_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(0..n-1), fanning out across workers. Sample results must be stored
// per index so the outcome does not depend on the thread count.
void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
  const int workers = static_cast<int>(std::min<long>(std::max(threads, 1), n));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next(0);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&]() {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

VectorXd gaussian_vector(std::mt19937_64& rng, long n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd v(n);
  for (long i = 0; i < n; ++i) v(i) = scale * normal(rng);
  return v;
}

MatrixXd gaussian_matrix(std::mt19937_64& rng, long rows, long cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (long j = 0; j < rows; ++j)
    for (long k = 0; k < cols; ++k) m(j, k) = normal(rng);
  return m;
}

// Random full-rank frame with bounded condition number so the fixed-point
// solves stay fast.
FrameXd random_frame(std::mt19937_64& rng, long nmax = 16, long lmax = 64,
                     double min_cond = 0.05, long nmin = 1) {
  std::uniform_int_distribution<long> npick(nmin, nmax);
  for (;;) {
    const long n = npick(rng);
    std::uniform_int_distribution<long> lpick(n, std::max(n, lmax));
    const long l = lpick(rng);
    try {
      FrameXd frame = build_frame(gaussian_matrix(rng, l, n));
      if (frame.sigma_min() >= min_cond * frame.spectral_norm()) return frame;
    } catch (const RankError&) {
    }
  }
}

double gamma_of(std::uint64_t i) {
  constexpr double gammas[3] = {0.1, 1.0, 10.0};
  return gammas[i % 3];
}

// Worst ratio aggregator; reports pass iff every sample satisfied its own
// scaled bound.
struct RatioMax {
  double value = -std::numeric_limits<double>::infinity();
  void add(double measured, double bound) { value = std::max(value, measured / bound); }
};

struct BoundTracker {
  double ball_slack = -std::numeric_limits<double>::infinity();
  double euclid_ratio = 0.0;

  void add(const FrameXd& frame, double gamma, const VectorXd& y) {
    const double ball = gamma * std::sqrt(static_cast<double>(frame.rows()));
    ball_slack = std::max(ball_slack, t_norm(frame, y) - ball);
    euclid_ratio = std::max(euclid_ratio, y.norm() / (ball * frame.spectral_norm()));
  }
  void merge(const BoundTracker& other) {
    ball_slack = std::max(ball_slack, other.ball_slack);
    euclid_ratio = std::max(euclid_ratio, other.euclid_ratio);
  }
};

constexpr std::uint64_t kTagFirm = 1, kTagCyclic = 2, kTagHZero = 3, kTagSingle = 4,
                        kTagProx = 6, kTagFbs = 7;

std::vector<PropertyReport> suite_firm_nonexpansive(const VerifyOptions& opts) {
  const long n = opts.samples > 0 ? opts.samples : 1000;
  std::vector<double> ratios(n);
  parallel_for(n, resolve_threads(opts.threads), [&](long i) {
    auto rng = sample_rng(opts.seed, kTagFirm, static_cast<std::uint64_t>(i));
    const FrameXd frame = random_frame(rng);
    const double gamma = gamma_of(static_cast<std::uint64_t>(i));
    const double scale =
        gamma * std::pow(10.0, static_cast<double>((i / 3) % 5) - 2.0) / frame.spectral_norm();
    const VectorXd x = gaussian_vector(rng, frame.cols(), scale);
    const VectorXd y = gaussian_vector(rng, frame.cols(), scale);
    const PropertyReport r = firm_nonexpansive_check(frame, ShrinkConfig{gamma}, x, y);
    ratios[i] = r.measured / r.bound;
  });
  const double worst = *std::max_element(ratios.begin(), ratios.end());
  return {make_report("firm_nonexpansive", worst, 1.0, n,
                      {{"scaling", 1e-9}})};
}

std::vector<PropertyReport> suite_cyclic(const VerifyOptions& opts) {
  const long n = opts.samples > 0 ? opts.samples : 500;
  const long frames = 20;
  std::vector<double> ratios(n);
  std::vector<BoundTracker> bounds(n);
  parallel_for(n, resolve_threads(opts.threads), [&](long i) {
    auto frame_rng = sample_rng(opts.seed, kTagCyclic + 100, static_cast<std::uint64_t>(i % frames));
    const FrameXd frame = random_frame(frame_rng);
    auto rng = sample_rng(opts.seed, kTagCyclic, static_cast<std::uint64_t>(i));
    const double gamma = gamma_of(static_cast<std::uint64_t>(i));
    const long m = 2 + i % 5;
    constexpr double spreads[3] = {0.3, 1.0, 3.0};
    const double scale = spreads[(i / 5) % 3] * gamma / frame.spectral_norm();
    std::vector<VectorXd> points(m);
    for (long j = 0; j < m; ++j) points[j] = gaussian_vector(rng, frame.cols(), scale);
    // A rare active pattern contracts slowly; give the solves a deep budget.
    FixedPointConfig fp;
    fp.max_iters = 3000000;
    const PropertyReport r = cyclic_monotonicity_check(frame, ShrinkConfig{gamma}, points, fp);
    ratios[i] = r.measured / r.bound;
    BoundTracker tracker;
    tracker.ball_slack = r.details.at("max_ball_slack");
    tracker.euclid_ratio = r.details.at("max_euclid_ratio");
    bounds[i] = tracker;
  });
  BoundTracker total;
  for (const auto& b : bounds) total.merge(b);
  const double worst = *std::max_element(ratios.begin(), ratios.end());
  return {make_report("cyclic_monotonicity", worst, 1.0, n, {{"scaling", 1e-8}}),
          make_report("cyclic_boundedness", total.ball_slack, 1e-9, n,
                      {{"max_euclid_ratio", total.euclid_ratio}})};
}

std::vector<PropertyReport> suite_h_zero(const VerifyOptions& opts) {
  const long n = opts.samples > 0 ? opts.samples : 1000;
  std::vector<int> disagreements(n, 0);
  std::atomic<long> inside_count(0);
  parallel_for(n, resolve_threads(opts.threads), [&](long i) {
    auto rng = sample_rng(opts.seed, kTagHZero, static_cast<std::uint64_t>(i));
    const FrameXd frame = random_frame(rng);
    const double gamma = gamma_of(static_cast<std::uint64_t>(i));
    VectorXd direction = gaussian_vector(rng, frame.cols());
    const double reach = apply(frame, direction).lpNorm<Eigen::Infinity>();
    const bool inside = i % 2 == 0;
    if (inside) inside_count.fetch_add(1);
    std::uniform_real_distribution<double> theta(inside ? 0.05 : 1.0 + 1e-6,
                                                 inside ? 1.0 - 1e-6 : 3.0);
    const VectorXd y = (gamma * theta(rng) / reach) * direction;
    const bool analytic = apply(frame, y).lpNorm<Eigen::Infinity>() <= gamma;
    bool operational = false;
    bool threw = false;
    try {
      operational = zero_subgradient_contains(frame, ShrinkConfig{gamma}, y);
    } catch (const ConsistencyError&) {
      threw = true;
    }
    disagreements[i] = (threw || operational != analytic) ? 1 : 0;
  });
  long total = 0;
  for (int d : disagreements) total += d;
  return {make_report("h_zero_agreement", static_cast<double>(total), 0.0, n,
                      {{"inside_samples", static_cast<double>(inside_count.load())},
                       {"outside_samples", static_cast<double>(n - inside_count.load())}})};
}

std::vector<PropertyReport> suite_single_valued(const VerifyOptions& opts) {
  const long n = opts.samples > 0 ? opts.samples : 200;
  const long frames = 10;
  const long parseval_frames = 3;  // first few frames are Parseval for the comparison remark
  std::vector<double> formula_err(n), solver_err(n), parseval_err(n, 0.0);
  std::vector<BoundTracker> bounds(n);
  // Gaussian directions give balanced |Tx| only when no row of T is starved;
  // keep redrawing the frame until a tenth of test directions land well
  // inside the region cone, so the per-sample draw below terminates.
  const auto admits_region_points = [](const FrameXd& frame, std::mt19937_64& rng) {
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const VectorXd b = gaussian_vector(rng, frame.cols());
      const VectorXd tb = apply(frame, b);
      if (tb.cwiseAbs().minCoeff() >= 0.05 * tb.lpNorm<Eigen::Infinity>()) ++hits;
    }
    return hits >= 10;
  };
  parallel_for(n, resolve_threads(opts.threads), [&](long i) {
    const long which = i % frames;
    auto frame_rng = sample_rng(opts.seed, kTagSingle + 100, static_cast<std::uint64_t>(which));
    const bool parseval = which < parseval_frames;
    const FrameXd frame = [&]() {
      for (;;) {
        FrameXd candidate = [&]() {
          if (!parseval) return random_frame(frame_rng, 16, 64, 0.05, 2);
          std::uniform_int_distribution<long> npick(2, 12);
          const long cols = npick(frame_rng);
          std::uniform_int_distribution<long> lpick(cols, 2 * cols + 4);
          return parseval_frame(lpick(frame_rng), cols, frame_rng());
        }();
        if (admits_region_points(candidate, frame_rng)) return candidate;
      }
    }();
    auto rng = sample_rng(opts.seed, kTagSingle, static_cast<std::uint64_t>(i));
    const double gamma = gamma_of(static_cast<std::uint64_t>(i));
    const ShrinkConfig cfg{gamma};

    VectorXd base, tx;
    double best_ratio = -1.0;
    VectorXd best_base, best_tx;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      base = gaussian_vector(rng, frame.cols());
      tx = apply(frame, base);
      const double ratio = tx.cwiseAbs().minCoeff() / tx.lpNorm<Eigen::Infinity>();
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best_base = base;
        best_tx = tx;
      }
      if (ratio >= 0.05) break;
    }
    base = best_base;
    tx = best_tx;
    std::uniform_real_distribution<double> margin(1.2, 5.0);
    const double threshold = gamma * (frame.rowsum_norm() + 1.0);
    const VectorXd x = (margin(rng) * threshold / tx.cwiseAbs().minCoeff()) * base;

    const VectorXd y = single_valued_subgradient(frame, cfg, x);
    formula_err[i] = (frame_soft_shrink(frame, cfg, x + y) - x).norm();
    const SubgradientElement el = subgradient_element(frame, cfg, x);
    solver_err[i] = t_norm(frame, VectorXd(el.y - y));
    bounds[i].add(frame, gamma, y);
    bounds[i].add(frame, gamma, el.y);
    if (parseval) {
      VectorXd sgn = apply(frame, x);
      for (Eigen::Index j = 0; j < sgn.size(); ++j) sgn(j) = sgn(j) > 0.0 ? 1.0 : -1.0;
      const VectorXd adjoint_form = gamma * adjoint_apply(frame, sgn);
      parseval_err[i] = (y - adjoint_form).norm() / (1e-10 * (1.0 + gamma));
    }
  });
  BoundTracker total;
  for (const auto& b : bounds) total.merge(b);
  return {make_report("single_valued_formula",
                      *std::max_element(formula_err.begin(), formula_err.end()), 1e-9, n),
          make_report("single_valued_solver",
                      *std::max_element(solver_err.begin(), solver_err.end()), 1e-7, n),
          make_report("single_valued_parseval",
                      *std::max_element(parseval_err.begin(), parseval_err.end()), 1.0, n,
                      {{"scaling", 1e-10}}),
          make_report("single_valued_boundedness", total.ball_slack, 1e-9, n,
                      {{"max_euclid_ratio", total.euclid_ratio}})};
}

std::vector<PropertyReport> suite_oneD(const VerifyOptions& opts) {
  constexpr double cs[4] = {1.0, 1.5, 2.0, 10.0};
  constexpr double gammas[3] = {0.1, 5.0 / 3.0, 3.0};
  const long grid = 1001;
  const long half = grid / 2;
  const long combos = 12;

  std::vector<double> match(combos), convexity(combos), bracket(combos), prox_grid(combos);
  std::vector<BoundTracker> bounds(combos);
  parallel_for(combos, resolve_threads(opts.threads), [&](long combo) {
    const double c = cs[combo % 4];
    const double gamma = gammas[combo / 4];
    const FrameXd frame = toy1d_frame(c);
    const ShrinkConfig cfg{gamma};
    const double breakpoint = gamma * (c - 1.0) * c / (c * c + 1.0);
    const double reach = 1.0 + 2.0 * (breakpoint + gamma);
    const double h = reach / static_cast<double>(half);

    double worst_match = 0.0;
    std::vector<double> phi(grid);
    for (long i = 0; i < grid; ++i) {
      const double x = static_cast<double>(i - half) * h;  // hits 0 exactly
      phi[i] = potential_1d(c, gamma, x);
      const Interval expect = subgradient_1d(c, gamma, x);
      VectorXd point(1);
      point << x;
      const SubgradientElement el = subgradient_element(frame, cfg, point);
      const double y = el.y(0);
      const double miss = std::max({expect.lo - y, y - expect.hi, 0.0});
      worst_match = std::max(worst_match, miss);
      bounds[combo].add(frame, gamma, el.y);
    }
    match[combo] = worst_match;

    // Midpoint convexity and subgradient bracketing on the same grid.
    double worst_convex = -std::numeric_limits<double>::infinity();
    double worst_bracket = -std::numeric_limits<double>::infinity();
    for (long i = 1; i + 1 < grid; ++i) {
      const double mid_violation = phi[i] - 0.5 * (phi[i - 1] + phi[i + 1]);
      worst_convex = std::max(worst_convex, mid_violation / (1e-12 * (1.0 + std::abs(phi[i]))));
      const double x = static_cast<double>(i - half) * h;
      const Interval sub = subgradient_1d(c, gamma, x);
      const double left_quotient = (phi[i] - phi[i - 1]) / h;
      const double right_quotient = (phi[i + 1] - phi[i]) / h;
      const double slack = 1e-9 * (1.0 + gamma);
      worst_bracket = std::max(worst_bracket,
                               std::max(left_quotient - sub.lo, sub.hi - right_quotient) / slack);
    }
    convexity[combo] = worst_convex;
    bracket[combo] = worst_bracket;

    // The shrink output must beat every grid point of the Euclidean prox
    // objective 1/2 (z - x)^2 + phi(x).
    double worst_prox = -std::numeric_limits<double>::infinity();
    for (long zi = 0; zi < 21; ++zi) {
      const double z = -2.0 * reach + static_cast<double>(zi) * (4.0 * reach / 20.0);
      VectorXd zv(1);
      zv << z;
      const double xhat = frame_soft_shrink(frame, cfg, zv)(0);
      const double ours = 0.5 * (z - xhat) * (z - xhat) + potential_1d(c, gamma, xhat);
      double best = std::numeric_limits<double>::infinity();
      for (long i = 0; i < grid; ++i) {
        const double x = static_cast<double>(i - half) * h;
        best = std::min(best, 0.5 * (z - x) * (z - x) + phi[i]);
      }
      worst_prox = std::max(worst_prox, (ours - best) / (1e-12 * (1.0 + std::abs(best))));
    }
    prox_grid[combo] = worst_prox;
  });

  BoundTracker total;
  for (const auto& b : bounds) total.merge(b);
  const long samples = combos * grid;
  return {make_report("oneD_solver_match", *std::max_element(match.begin(), match.end()),
                      1e-7, samples),
          make_report("oneD_convexity", *std::max_element(convexity.begin(), convexity.end()),
                      1.0, samples, {{"scaling", 1e-12}}),
          make_report("oneD_bracket", *std::max_element(bracket.begin(), bracket.end()), 1.0,
                      samples, {{"scaling", 1e-9}}),
          make_report("oneD_prox_grid", *std::max_element(prox_grid.begin(), prox_grid.end()),
                      1.0, 12 * 21, {{"scaling", 1e-12}}),
          make_report("oneD_boundedness", total.ball_slack, 1e-9, samples,
                      {{"max_euclid_ratio", total.euclid_ratio}})};
}

std::vector<PropertyReport> suite_prox_baseline(const VerifyOptions& opts) {
  const long n = opts.samples > 0 ? opts.samples : 100;
  const int threads = resolve_threads(opts.threads);

  // Orthogonal square matrices: the closed form T* S_gamma(T y) is exact.
  std::vector<double> ortho_err(n), feas_slack(n);
  parallel_for(n, threads, [&](long i) {
    auto rng = sample_rng(opts.seed, kTagProx, static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<long> npick(1, 16);
    const long dim = npick(rng);
    const FrameXd frame = parseval_frame(dim, dim, rng());
    const MatrixXd q = frame.matrix();
    const double gamma = gamma_of(static_cast<std::uint64_t>(i));
    constexpr double spreads[3] = {0.5, 2.0, 8.0};
    const VectorXd y = gaussian_vector(rng, dim, spreads[(i / 3) % 3] * gamma);
    const ProxResult r = exact_prox(q, gamma, y);
    const VectorXd closed = q.transpose() * soft_shrink(VectorXd(q * y), ShrinkConfig{gamma});
    ortho_err[i] = (r.minimizer - closed).norm();
    feas_slack[i] = r.dual.lpNorm<Eigen::Infinity>() - gamma;
  });

  // General analysis operators (every fifth one rank deficient): KKT
  // certificate, strong convexity, per-step descent of the dual objective
  // (equivalently ||x_k||, since the dual objective is 1/2 ||x(p)||^2 up to
  // a constant), and optimality of the endpoint along the trajectory.
  std::vector<double> kkt(n), strong(n), monotone(n), final_opt(n);
  parallel_for(n, threads, [&](long i) {
    auto rng = sample_rng(opts.seed, kTagProx + 50, static_cast<std::uint64_t>(i));
    const bool rank_deficient = i % 5 == 4;
    MatrixXd t;
    if (rank_deficient) {
      std::uniform_int_distribution<long> gpick(2, 4);
      t = tv_matrix(gpick(rng), gpick(rng));
    } else {
      t = random_frame(rng).matrix();
    }
    const double gamma = gamma_of(static_cast<std::uint64_t>(i));
    const VectorXd y = gaussian_vector(rng, t.cols(), 2.0 * gamma);

    ProxSolverConfig cfg;
    std::vector<double> norms, objectives;
    cfg.observer = [&](const VectorXd& x) {
      norms.push_back(x.squaredNorm());
      objectives.push_back(analysis_l1_objective(t, gamma, y, x));
    };
    const ProxResult r = exact_prox(t, gamma, y, cfg);
    kkt[i] = r.kkt_residual;

    double worst_step = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < norms.size(); ++k)
      worst_step = std::max(worst_step,
                            (norms[k] - norms[k - 1]) / (1e-12 * (1.0 + norms[k - 1])));
    monotone[i] = worst_step;
    double worst_final = -std::numeric_limits<double>::infinity();
    for (const double obj : objectives)
      worst_final =
          std::max(worst_final, (r.primal_obj - obj) / (1e-9 * (1.0 + std::abs(obj))));
    final_opt[i] = worst_final;

    double worst_strong = -std::numeric_limits<double>::infinity();
    for (int p = 0; p < 20; ++p) {
      const VectorXd probe = r.minimizer + gaussian_vector(rng, t.cols(), 0.05 + 0.025 * p);
      const double lhs = (r.minimizer - probe).squaredNorm();
      const double rhs = 2.0 * (analysis_l1_objective(t, gamma, y, probe) - r.primal_obj);
      worst_strong = std::max(worst_strong, (lhs - rhs) / (1e-9 * (1.0 + rhs)));
    }
    strong[i] = worst_strong;
  });

  // Approximation of the exact prox by the frame shrinkage on Parseval
  // frames; the exact prox never has the larger objective, and the two
  // operators coincide on the dead zone and for square orthogonal T.
  std::vector<double> gap(n), coincide(n, 0.0);
  parallel_for(n, threads, [&](long i) {
    auto rng = sample_rng(opts.seed, kTagProx + 99, static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<long> npick(1, 16);
    const long dim = npick(rng);
    const bool square = i % 10 < 3;
    std::uniform_int_distribution<long> lpick(dim + 1, 2 * dim + 4);
    const long rows = square ? dim : lpick(rng);
    const FrameXd frame = parseval_frame(rows, dim, rng());
    const double gamma = gamma_of(static_cast<std::uint64_t>(i));

    VectorXd y = gaussian_vector(rng, dim);
    const bool dead_zone = i % 3 == 0;
    const double reach = apply(frame, y).lpNorm<Eigen::Infinity>();
    std::uniform_real_distribution<double> theta(dead_zone ? 0.05 : 0.5,
                                                 dead_zone ? 0.9 : 4.0);
    y *= gamma * theta(rng) / reach;

    const ShrinkProxComparison cmp = compare_shrink_vs_prox(frame, gamma, y);
    gap[i] = (cmp.obj_prox - cmp.obj_shrink) / (1e-12 * (1.0 + std::abs(cmp.obj_prox)));
    const bool in_dead_zone = apply(frame, y).lpNorm<Eigen::Infinity>() <= gamma;
    if (square || in_dead_zone) coincide[i] = cmp.dist_l2;
  });

  return {make_report("prox_orthogonal_match",
                      *std::max_element(ortho_err.begin(), ortho_err.end()), 1e-8, n),
          make_report("prox_dual_feasible",
                      *std::max_element(feas_slack.begin(), feas_slack.end()), 0.0, n),
          make_report("prox_kkt", *std::max_element(kkt.begin(), kkt.end()), 1e-7, n),
          make_report("prox_strong_convexity",
                      *std::max_element(strong.begin(), strong.end()), 1.0, n,
                      {{"scaling", 1e-9}, {"probes_per_instance", 20.0}}),
          make_report("prox_dual_monotone",
                      *std::max_element(monotone.begin(), monotone.end()), 1.0, n,
                      {{"scaling", 1e-12}}),
          make_report("prox_final_optimal",
                      *std::max_element(final_opt.begin(), final_opt.end()), 1.0, n,
                      {{"scaling", 1e-9}}),
          make_report("approx_objective_gap", *std::max_element(gap.begin(), gap.end()), 1.0,
                      n, {{"scaling", 1e-12}}),
          make_report("approx_coincidence_dist",
                      *std::max_element(coincide.begin(), coincide.end()), 1e-8, n)};
}

std::vector<PropertyReport> suite_fbs(const VerifyOptions& opts) {
  const long n = opts.samples > 0 ? opts.samples : 50;
  const int threads = resolve_threads(opts.threads);

  // Frame-shrink backward on well-posed square models, half of them pure
  // denoising models K = I. For K = I the forward step is a convex
  // combination toward the data, hence a T-norm contraction for every lambda
  // in the window, and convergence is guaranteed; there the suite asserts it.
  // For general K the backward step is averaged in the T-norm while the
  // forward step is averaged in the Euclidean one, and the composition can
  // cycle (observed: iterate change pinned near 0.1 for 2e7 iterations at
  // lambda = 1.8/||K||^2), so general-K convergence is only monitored.
  // Converged runs of either kind must satisfy the fixed-point identity
  // x* = shrink((I - lambda K*K) x* + lambda K* f).
  std::vector<int> identity_failed(n, 0), general_failed(n, 0);
  std::vector<double> fixed_point(n);
  parallel_for(n, threads, [&](long i) {
    auto rng = sample_rng(opts.seed, kTagFbs, static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<long> npick(2, 8);
    const long dim = npick(rng);
    const bool identity_model = i % 2 == 0;
    const ForwardModel model = [&]() {
      if (identity_model)
        return make_forward_model(MatrixXd::Identity(dim, dim), gaussian_vector(rng, dim));
      const MatrixXd q1 = parseval_frame(dim, dim, rng()).matrix();
      const MatrixXd q2 = parseval_frame(dim, dim, rng()).matrix();
      VectorXd sing(dim);
      std::uniform_real_distribution<double> spick(0.5, 2.0);
      for (long j = 0; j < dim; ++j) sing(j) = spick(rng);
      return make_forward_model(q1 * sing.asDiagonal() * q2.transpose(),
                                gaussian_vector(rng, dim));
    }();

    std::uniform_int_distribution<long> lpick(dim, 2 * dim + 2);
    const FrameXd frame = [&]() {
      for (;;) {
        try {
          FrameXd f = build_frame(gaussian_matrix(rng, lpick(rng), dim));
          if (f.sigma_min() >= 0.05 * f.spectral_norm()) return f;
        } catch (const RankError&) {
        }
      }
    }();
    const double gamma = 0.2 * gamma_of(static_cast<std::uint64_t>(i));
    constexpr double window_frac[3] = {0.3, 0.6, 0.9};
    const double lambda = 2.0 * window_frac[(i / 2) % 3] /
                          (model.spectral_norm_k * model.spectral_norm_k);
    const BackwardStep backward = BackwardStep::frame_shrink(frame, gamma);
    try {
      auto [xhat, trace] =
          fbs_solve(model, lambda, backward, 1e-10, 40000, VectorXd::Zero(dim));
      const VectorXd forward =
          xhat - lambda * (model.k.transpose() * (model.k * xhat - model.f));
      const double residual =
          (frame_soft_shrink(frame, ShrinkConfig{gamma}, forward) - xhat).norm();
      fixed_point[i] = residual / (1e-9 * (1.0 + xhat.norm()));
    } catch (const FbsNoConvergenceError&) {
      (identity_model ? identity_failed : general_failed)[i] = 1;
      fixed_point[i] = 0.0;
    }
  });

  // One-step identity: K = I, lambda = 1 turns the forward step into the
  // data itself, so the solve equals one application of the denoiser.
  const long one_step_count = 10;
  std::vector<double> one_step(one_step_count);
  parallel_for(one_step_count, threads, [&](long i) {
    auto rng = sample_rng(opts.seed, kTagFbs + 31, static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<long> npick(2, 16);
    const long dim = npick(rng);
    std::uniform_int_distribution<long> lpick(dim, 2 * dim + 2);
    const FrameXd frame = random_full_rank_frame(lpick(rng), dim, rng());
    const double gamma = gamma_of(static_cast<std::uint64_t>(i));
    const ForwardModel model =
        make_forward_model(MatrixXd::Identity(dim, dim), gaussian_vector(rng, dim, gamma));
    auto [xhat, trace] = fbs_solve(model, 1.0, BackwardStep::frame_shrink(frame, gamma),
                                   1e-12, 100, gaussian_vector(rng, dim));
    const VectorXd direct = frame_soft_shrink(frame, ShrinkConfig{gamma}, model.f);
    one_step[i] = (xhat - direct).lpNorm<Eigen::Infinity>();
  });

  // Exact-prox backward: the majorizing step keeps the objective
  // nonincreasing, and the iterate change drops below 1e-8 well within the
  // iteration budget.
  const long mono_count = 5;
  std::vector<double> mono(mono_count), mono_converged(mono_count);
  parallel_for(mono_count, threads, [&](long i) {
    auto rng = sample_rng(opts.seed, kTagFbs + 77, static_cast<std::uint64_t>(i));
    const long dim = 8;
    const MatrixXd q1 = parseval_frame(dim, dim, rng()).matrix();
    const MatrixXd q2 = parseval_frame(dim, dim, rng()).matrix();
    VectorXd sing(dim);
    std::uniform_real_distribution<double> spick(0.5, 2.0);
    for (long j = 0; j < dim; ++j) sing(j) = spick(rng);
    const ForwardModel model =
        make_forward_model(q1 * sing.asDiagonal() * q2.transpose(), gaussian_vector(rng, dim));
    const MatrixXd analysis = gaussian_matrix(rng, 12, dim);
    const double lambda = 1.0 / (model.spectral_norm_k * model.spectral_norm_k);
    ProxSolverConfig inner;
    inner.tol = 1e-13;
    inner.max_iters = 500000;
    const BackwardStep backward = BackwardStep::exact_prox(analysis, 0.1 * lambda, inner);
    auto [xhat, trace] = fbs_solve(model, lambda, backward, 1e-9, 10000, VectorXd::Zero(dim));
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < trace.objective.size(); ++k)
      worst = std::max(worst, trace.objective[k] - trace.objective[k - 1]);
    mono[i] = worst;
    mono_converged[i] =
        trace.converged && trace.iterate_norm_change.back() <= 1e-8 ? 0.0 : 1.0;
  });

  // TV operator facts: row counts, one-dimensional kernel, and the rank
  // validation split between the two backward kinds.
  double tv_violations = 0.0;
  double kernel_small = 0.0, kernel_gap = std::numeric_limits<double>::infinity();
  for (long n1 = 2; n1 <= 8; ++n1)
    for (long n2 = 2; n2 <= 8; ++n2) {
      const MatrixXd t = tv_matrix(n1, n2);
      if (t.rows() != 2 * n1 * n2 - n1 - n2 || t.cols() != n1 * n2) tv_violations += 1.0;
      const VectorXd sv = Eigen::BDCSVD<MatrixXd>(t).singularValues();
      kernel_small = std::max(kernel_small, sv(sv.size() - 1));
      kernel_gap = std::min(kernel_gap, sv(sv.size() - 2));
      const VectorXd constant = VectorXd::Constant(n1 * n2, 1.0);
      if ((t * constant).lpNorm<Eigen::Infinity>() != 0.0) tv_violations += 1.0;
    }
  if (kernel_small > 1e-10 || kernel_gap <= 1e-6) tv_violations += 1.0;
  bool rejected = false;
  try {
    build_frame(tv_matrix(4, 4));
  } catch (const RankError&) {
    rejected = true;
  }
  if (!rejected) tv_violations += 1.0;
  {
    auto rng = sample_rng(opts.seed, kTagFbs + 93, 0);
    const BackwardStep accepts = BackwardStep::exact_prox(tv_matrix(4, 4), 0.5);
    const VectorXd probe = accepts.apply(gaussian_vector(rng, 16));
    if (!probe.allFinite()) tv_violations += 1.0;
  }

  long identity_failures = 0, general_failures = 0, general_total = 0;
  for (long i = 0; i < n; ++i) {
    identity_failures += identity_failed[i];
    general_failures += general_failed[i];
    if (i % 2 != 0) ++general_total;
  }
  return {make_report("fbs_identity_converged", static_cast<double>(identity_failures), 0.0,
                      n - general_total),
          // Monitored, never gated: the window guarantees nothing for
          // general K with this backward.
          make_report("fbs_general_convergence_monitor",
                      static_cast<double>(general_failures),
                      static_cast<double>(general_total), general_total),
          make_report("fbs_fixed_point",
                      *std::max_element(fixed_point.begin(), fixed_point.end()), 1.0, n,
                      {{"scaling", 1e-9}}),
          make_report("fbs_one_step", *std::max_element(one_step.begin(), one_step.end()),
                      0.0, one_step_count),
          make_report("fbs_exactprox_monotone", *std::max_element(mono.begin(), mono.end()),
                      1e-10, mono_count),
          make_report("fbs_exactprox_converged",
                      *std::max_element(mono_converged.begin(), mono_converged.end()), 0.0,
                      mono_count),
          make_report("fbs_tv_facts", tv_violations, 0.0, 49,
                      {{"kernel_sigma_min", kernel_small}, {"kernel_sigma_next", kernel_gap}})};
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "firm_nonexpansive", "cyclic", "h_zero", "single_valued",
      "oneD",              "prox_baseline", "fbs"};
  return names;
}

std::vector<PropertyReport> run_suite(const std::string& name, const VerifyOptions& opts) {
  if (name == "all") {
    std::vector<PropertyReport> all;
    for (const auto& suite : suite_names()) {
      auto part = run_suite(suite, opts);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  if (name == "firm_nonexpansive") return suite_firm_nonexpansive(opts);
  if (name == "cyclic") return suite_cyclic(opts);
  if (name == "h_zero") return suite_h_zero(opts);
  if (name == "single_valued") return suite_single_valued(opts);
  if (name == "oneD") return suite_oneD(opts);
  if (name == "prox_baseline") return suite_prox_baseline(opts);
  if (name == "fbs") return suite_fbs(opts);
  throw ConfigError("unknown verify suite '" + name + "'");
}

nlohmann::json report_to_json(const PropertyReport& report) {
  nlohmann::json details = nlohmann::json::object();
  for (const auto& [key, value] : report.details) details[key] = value;
  return nlohmann::json{{"name", report.name},     {"measured", report.measured},
                        {"bound", report.bound},   {"passed", report.passed},
                        {"samples", report.samples}, {"details", details}};
}

nlohmann::json reports_to_json(const std::vector<PropertyReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr;
}

nlohmann::json comparison_to_json(const ShrinkProxComparison& cmp) {
  return nlohmann::json{{"dist_l2", cmp.dist_l2},     {"dist_tnorm", cmp.dist_tnorm},
                        {"obj_shrink", cmp.obj_shrink}, {"obj_prox", cmp.obj_prox},
                        {"nnz_T_shrink", cmp.nnz_t_shrink},
                        {"nnz_T_prox", cmp.nnz_t_prox},
                        {"iterations", cmp.iterations}};
}

}  // namespace proxframe
