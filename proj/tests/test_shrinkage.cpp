#include <cmath>
#include <random>

#include <doctest.h>

#include "proxframe/gallery.hpp"
#include "proxframe/shrinkage.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace proxframe;

namespace {

const ShrinkConfig kToyGamma{5.0 / 3.0};

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

TEST_CASE("soft_shrink three-case definition") {
  CHECK(soft_shrink(scalar_vec(2.0), kToyGamma)(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(soft_shrink(scalar_vec(1.0), kToyGamma)(0) == 0.0);

  VectorXd z(2);
  z << -2.0, 0.5;
  const VectorXd s = soft_shrink(z, kToyGamma);
  CHECK(s(0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(s(1) == 0.0);

  // Tie points map to exactly zero.
  CHECK(soft_shrink(scalar_vec(5.0 / 3.0), kToyGamma)(0) == 0.0);
  CHECK(soft_shrink(scalar_vec(-5.0 / 3.0), kToyGamma)(0) == 0.0);

  CHECK_THROWS_AS(soft_shrink(scalar_vec(1.0), ShrinkConfig{0.0}), DomainError);
  CHECK_THROWS_AS(soft_shrink(scalar_vec(std::nan("")), kToyGamma), NonFiniteError);
}

TEST_CASE("frame_soft_shrink toy values") {
  const FrameXd toy = toy1d_frame(2.0);
  CHECK(frame_soft_shrink(toy, kToyGamma, scalar_vec(1.0))(0) ==
        doctest::Approx(2.0 / 15.0).epsilon(1e-14));
  CHECK(frame_soft_shrink(toy, kToyGamma, scalar_vec(3.0))(0) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(frame_soft_shrink(toy, kToyGamma, scalar_vec(0.5))(0) == 0.0);
  CHECK_THROWS_AS(frame_soft_shrink(toy, kToyGamma, VectorXd::Zero(2)), LengthError);
}

TEST_CASE("residual_shrink") {
  const FrameXd toy = toy1d_frame(2.0);
  CHECK(residual_shrink(toy, kToyGamma, scalar_vec(3.0))(0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  // Dead zone: the shrink output vanishes, the residual is z itself.
  CHECK(residual_shrink(toy, kToyGamma, scalar_vec(0.5))(0) == 0.5);
  // gamma -> 0+ limit: the residual goes to 0.
  const VectorXd tiny = residual_shrink(toy, ShrinkConfig{1e-12}, scalar_vec(3.0));
  CHECK(std::abs(tiny(0)) <= 1e-10);
}

TEST_CASE("odd symmetry is exact") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const FrameXd frame = random_full_rank_frame(8, 3, rng());
    const VectorXd z = random_vec(rng, 3, 2.0);
    const VectorXd plus = frame_soft_shrink(frame, ShrinkConfig{1.0}, z);
    const VectorXd minus = frame_soft_shrink(frame, ShrinkConfig{1.0}, VectorXd(-z));
    for (long j = 0; j < 3; ++j) CHECK(plus(j) == -minus(j));
  }
}

TEST_CASE("dead zone gives an exact zero vector") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const FrameXd frame = random_full_rank_frame(10, 4, rng());
    VectorXd z = random_vec(rng, 4);
    z *= 0.5 / apply(frame, z).lpNorm<Eigen::Infinity>();
    const VectorXd out = frame_soft_shrink(frame, ShrinkConfig{1.0}, z);
    CHECK(out.lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("orthogonal square frames reduce to the adjoint form") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    const FrameXd q = parseval_frame(6, 6, rng());
    const VectorXd z = random_vec(rng, 6, 3.0);
    const VectorXd ours = frame_soft_shrink(q, ShrinkConfig{1.0}, z);
    const VectorXd closed =
        adjoint_apply(q, soft_shrink(apply(q, z), ShrinkConfig{1.0}));
    CHECK((ours - closed).norm() <= 1e-12 * (1.0 + closed.norm()));
  }
}

TEST_CASE("firm nonexpansiveness and T-norm nonexpansiveness sampled") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    std::uniform_int_distribution<long> npick(1, 5);
    const long n = npick(rng);
    std::uniform_int_distribution<long> lpick(n, n + 8);
    const FrameXd frame = random_full_rank_frame(lpick(rng), n, rng());
    const ShrinkConfig cfg{std::pow(10.0, (i % 3) - 1)};
    const VectorXd x = random_vec(rng, n, cfg.gamma);
    const VectorXd y = random_vec(rng, n, cfg.gamma);
    const VectorXd px = frame_soft_shrink(frame, cfg, x);
    const VectorXd py = frame_soft_shrink(frame, cfg, y);
    const double a = t_norm(frame, VectorXd(px - py));
    const double b = t_norm(frame, VectorXd((x - px) - (y - py)));
    const double d = t_norm(frame, VectorXd(x - y));
    CHECK(a * a + b * b <= d * d + 1e-9 * (1.0 + d * d));
    CHECK(a <= d + 1e-10 * (1.0 + d));
    CHECK(b <= d + 1e-10 * (1.0 + d));
  }
}

TEST_CASE("residual stays inside the gamma sqrt(L) tube") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 300; ++i) {
    std::uniform_int_distribution<long> npick(1, 6);
    const long n = npick(rng);
    std::uniform_int_distribution<long> lpick(n, n + 12);
    const FrameXd frame = random_full_rank_frame(lpick(rng), n, rng());
    const ShrinkConfig cfg{std::pow(10.0, (i % 3) - 1)};
    const VectorXd z = random_vec(rng, n, 10.0 * cfg.gamma);
    const VectorXd residual = residual_shrink(frame, cfg, z);
    const double tube = cfg.gamma * std::sqrt(static_cast<double>(frame.rows()));
    CHECK(t_norm(frame, residual) <= tube + 1e-9 * (1.0 + tube));
  }
}
