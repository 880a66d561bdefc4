// Scratch probe: diagnose large KKT residuals in the prox_baseline suite.
#include <cstdio>
#include <random>

#include <Eigen/Dense>

#include "proxframe/exact_prox.hpp"
#include "proxframe/frame.hpp"
#include "proxframe/tv.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace proxframe;

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(tag ^ splitmix64(index))));
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
FrameXd random_frame(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> npick(1, 16);
  for (;;) {
    const long n = npick(rng);
    std::uniform_int_distribution<long> lpick(n, 64);
    const long l = lpick(rng);
    try {
      FrameXd frame = build_frame(gaussian_matrix(rng, l, n));
      if (frame.sigma_min() >= 0.05 * frame.spectral_norm()) return frame;
    } catch (const RankError&) {
    }
  }
}
double gamma_of(std::uint64_t i) {
  constexpr double gammas[3] = {0.1, 1.0, 10.0};
  return gammas[i % 3];
}
}  // namespace

int main() {
  for (std::uint64_t seed : {2ull, 5ull, 11ull, 99ull, 12345ull}) {
    for (long i = 0; i < 100; ++i) {
      auto rng = sample_rng(seed, 56, static_cast<std::uint64_t>(i));
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
      double kkt_default = -1.0;
      long iters_default = -1;
      try {
        const ProxResult r = exact_prox(t, gamma, y, cfg);
        kkt_default = r.kkt_residual;
        iters_default = r.iterations;
      } catch (const NoConvergenceError& e) {
        std::printf("seed %5llu i=%2ld NOCONV change=%.2e L=%ld N=%ld gamma=%.1f tv=%d\n",
                    (unsigned long long)seed, i, e.residual(), t.rows(), t.cols(), gamma,
                    rank_deficient);
      }
      if (kkt_default <= 1e-7 && kkt_default >= 0.0) continue;

      // Rerun much tighter to separate premature stop from certificate error.
      ProxSolverConfig tight;
      tight.tol = 1e-14;
      tight.max_iters = 5000000;
      try {
        const ProxResult r2 = exact_prox(t, gamma, y, tight);
        const VectorXd tx = t * r2.minimizer;
        const double scale = 1.0 + tx.lpNorm<Eigen::Infinity>();
        std::printf(
            "seed %5llu i=%2ld kkt=%.3e (iters %ld) -> tight kkt=%.3e (iters %ld) "
            "ztol-sweep:", (unsigned long long)seed, i, kkt_default, iters_default,
            r2.kkt_residual, r2.iterations);
        for (double zt : {1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3}) {
          std::printf(" %.1e", kkt_certificate(t, gamma, y, r2.minimizer, zt * scale));
        }
        std::printf("  L=%ld N=%ld gamma=%.1f tv=%d\n", t.rows(), t.cols(), gamma,
                    rank_deficient);
      } catch (const NoConvergenceError& e) {
        std::printf("seed %5llu i=%2ld kkt=%.3e tight NOCONV change=%.2e\n",
                    (unsigned long long)seed, i, kkt_default, e.residual());
      }
    }
  }
  return 0;
}
