#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "proxframe/exact_prox.hpp"
#include "proxframe/gallery.hpp"
#include "proxframe/tv.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace proxframe;

namespace {

VectorXd scalar_vec(double v) {
  VectorXd x(1);
  x << v;
  return x;
}

VectorXd random_vec(std::mt19937_64& rng, long n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd v(n);
  for (long i = 0; i < n; ++i) v(i) = scale * normal(rng);
  return v;
}

}  // namespace

TEST_CASE("exact_prox with the identity is soft shrinkage") {
  std::mt19937_64 rng(1);
  const MatrixXd id = MatrixXd::Identity(6, 6);
  for (int i = 0; i < 20; ++i) {
    const double gamma = std::pow(10.0, (i % 3) - 1);
    const VectorXd y = random_vec(rng, 6, 3.0 * gamma);
    const ProxResult r = exact_prox(id, gamma, y);
    CHECK((r.minimizer - soft_shrink(y, ShrinkConfig{gamma})).norm() <= 1e-10);
    CHECK(r.dual.lpNorm<Eigen::Infinity>() <= gamma);
    CHECK((r.minimizer - (y - id.transpose() * r.dual)).norm() <= 1e-10);
  }
}

TEST_CASE("exact_prox with orthogonal T matches the closed form") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 30; ++i) {
    const MatrixXd q = parseval_frame(5, 5, rng()).matrix();
    const double gamma = std::pow(10.0, (i % 3) - 1);
    const VectorXd y = random_vec(rng, 5, 3.0 * gamma);
    const ProxResult r = exact_prox(q, gamma, y);
    const VectorXd closed =
        q.transpose() * soft_shrink(VectorXd(q * y), ShrinkConfig{gamma});
    CHECK((r.minimizer - closed).norm() <= 1e-8);
    CHECK(r.kkt_residual <= 1e-7);
  }
}

TEST_CASE("exact_prox on the toy frame zeroes small inputs") {
  // 1/2 (1 - x)^2 + (5/3)(|x| + |2x|) is minimized at 0 since |1| <= 5.
  const FrameXd toy = toy1d_frame(2.0);
  const ProxResult r = exact_prox(toy.matrix(), 5.0 / 3.0, scalar_vec(1.0));
  CHECK(std::abs(r.minimizer(0)) <= 1e-12);
}

TEST_CASE("exact_prox against a 1D grid oracle") {
  const FrameXd toy = toy1d_frame(2.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const double gamma = 0.4 * (i + 1);
    const VectorXd y = scalar_vec(random_vec(rng, 1, 8.0)(0));
    const ProxResult r = exact_prox(toy.matrix(), gamma, y);
    const double ours = analysis_l1_objective(toy.matrix(), gamma, y, r.minimizer);
    for (double x = -10.0; x <= 10.0; x += 1e-3) {
      const double grid = 0.5 * (y(0) - x) * (y(0) - x) + 3.0 * gamma * std::abs(x);
      CHECK(ours <= grid + 1e-10 * (1.0 + std::abs(grid)));
    }
  }
}

TEST_CASE("kkt_certificate examples") {
  const MatrixXd id = MatrixXd::Identity(1, 1);
  CHECK(kkt_certificate(id, 5.0 / 3.0, scalar_vec(2.0), scalar_vec(1.0 / 3.0), 1e-6) <=
        1e-14);

  // A point 0.1 away from the minimizer has residual above 0.01 by strong
  // convexity of the primal.
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const FrameXd frame = random_full_rank_frame(8, 3, rng());
    const VectorXd y = random_vec(rng, 3, 2.0);
    const ProxResult r = exact_prox(frame.matrix(), 1.0, y);
    CHECK(r.kkt_residual <= 1e-7);
    VectorXd d = random_vec(rng, 3);
    d *= 0.1 / d.norm();
    const VectorXd perturbed = r.minimizer + d;
    const double residual =
        kkt_certificate(frame.matrix(), 1.0, y, perturbed,
                        1e-6 * (1.0 + (frame.matrix() * perturbed).lpNorm<Eigen::Infinity>()));
    CHECK(residual > 0.01);
  }

  CHECK_THROWS_AS(kkt_certificate(id, 1.0, scalar_vec(0.0), scalar_vec(0.0), 0.0),
                  DomainError);
}

TEST_CASE("dead zone inputs give zero for both operators") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const FrameXd frame = random_full_rank_frame(9, 4, rng());
    VectorXd y = random_vec(rng, 4);
    y *= 0.8 / apply(frame, y).lpNorm<Eigen::Infinity>();
    const ShrinkProxComparison cmp = compare_shrink_vs_prox(frame, 1.0, y);
    CHECK(cmp.shrink_point.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(cmp.prox_point.norm() <= 1e-8);
    CHECK(cmp.dist_l2 <= 1e-8);
    CHECK(cmp.nnz_t_shrink == 0);
    CHECK(cmp.nnz_t_prox == 0);
  }
}

TEST_CASE("compare_shrink_vs_prox on the toy example") {
  const FrameXd toy = toy1d_frame(2.0);
  const ShrinkProxComparison cmp = compare_shrink_vs_prox(toy, 5.0 / 3.0, scalar_vec(1.0));
  CHECK(cmp.shrink_point(0) == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
  CHECK(std::abs(cmp.prox_point(0)) <= 1e-12);
  CHECK(cmp.dist_l2 == doctest::Approx(2.0 / 15.0).epsilon(1e-9));
  CHECK(cmp.obj_shrink >= cmp.obj_prox - 1e-12 * (1.0 + std::abs(cmp.obj_prox)));
}

// The dual objective is 1/2 ||x(p)||^2 up to a constant, so projected
// gradient descent makes ||x_k|| nonincreasing; the primal objective itself
// is not monotone along the dual iteration, but the returned minimizer beats
// every point of the trajectory.
TEST_CASE("dual descent: ||x_k|| is nonincreasing and the endpoint is optimal") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 40; ++i) {
    MatrixXd t;
    if (i % 5 == 4) {
      t = tv_matrix(3, 3);
    } else {
      t = random_full_rank_frame(8, 4, rng()).matrix();
    }
    const double gamma = std::pow(10.0, (i % 3) - 1);
    const VectorXd y = random_vec(rng, t.cols(), 2.0 * gamma);
    std::vector<double> norms, objectives;
    ProxSolverConfig cfg;
    cfg.observer = [&](const VectorXd& x) {
      norms.push_back(x.squaredNorm());
      objectives.push_back(analysis_l1_objective(t, gamma, y, x));
    };
    const ProxResult r = exact_prox(t, gamma, y, cfg);
    for (std::size_t k = 1; k < norms.size(); ++k)
      CHECK(norms[k] <= norms[k - 1] + 1e-12 * (1.0 + norms[k - 1]));
    for (const double obj : objectives)
      CHECK(r.primal_obj <= obj + 1e-9 * (1.0 + std::abs(obj)));
  }
}

TEST_CASE("strong convexity bound around the minimizer") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const FrameXd frame = random_full_rank_frame(10, 4, rng());
    const VectorXd y = random_vec(rng, 4, 2.0);
    const ProxResult r = exact_prox(frame.matrix(), 1.0, y);
    for (int p = 0; p < 20; ++p) {
      const VectorXd probe = r.minimizer + random_vec(rng, 4, 0.2);
      const double rhs =
          2.0 * (analysis_l1_objective(frame.matrix(), 1.0, y, probe) - r.primal_obj);
      CHECK((r.minimizer - probe).squaredNorm() <= rhs + 1e-9 * (1.0 + rhs));
    }
  }
}

TEST_CASE("rank-deficient operators are accepted, sparse matches dense") {
  std::mt19937_64 rng(8);
  const MatrixXd dense = tv_matrix(4, 5);
  const Eigen::SparseMatrix<double> sparse = tv_matrix_sparse(4, 5);
  const VectorXd y = random_vec(rng, 20, 2.0);
  const ProxResult a = exact_prox(dense, 0.7, y);
  const ProxResult b = exact_prox(sparse, 0.7, y);
  CHECK((a.minimizer - b.minimizer).norm() <= 1e-9);
  CHECK(a.kkt_residual <= 1e-7);
  CHECK(b.kkt_residual <= 1e-7);
}

TEST_CASE("exact_prox validation and non-convergence") {
  const FrameXd toy = toy1d_frame(2.0);
  CHECK_THROWS_AS(exact_prox(toy.matrix(), -1.0, scalar_vec(1.0)), DomainError);
  CHECK_THROWS_AS(exact_prox(toy.matrix(), 1.0, VectorXd::Zero(2)), LengthError);

  ProxSolverConfig bad_step;
  bad_step.tau = 3.0 / 5.0;  // ||T||^2 = 5, window is (0, 2/5)
  CHECK_THROWS_AS(exact_prox(toy.matrix(), 1.0, scalar_vec(1.0), bad_step), StepSizeError);

  ProxSolverConfig strict;
  strict.max_iters = 1;
  strict.tol = 1e-16;
  CHECK_THROWS_AS(exact_prox(toy.matrix(), 0.1, scalar_vec(100.0), strict),
                  NoConvergenceError);
}

TEST_CASE("largest_singular_value agrees between dense and sparse") {
  const MatrixXd dense = tv_matrix(6, 7);
  const Eigen::SparseMatrix<double> sparse = tv_matrix_sparse(6, 7);
  CHECK(largest_singular_value(sparse) ==
        doctest::Approx(largest_singular_value(dense)).epsilon(1e-8));
}
