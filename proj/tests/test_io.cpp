#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <doctest.h>

#include "proxframe/errors.hpp"
#include "proxframe/io.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace proxframe;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("proxframe_io_" + name)).string();
}

struct FileGuard {
  std::string path;
  ~FileGuard() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("format_real round-trips doubles") {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 2.0 / 15.0, 1e-300, -1.7e300, 5.0 / 3.0}) {
    CHECK(std::stod(format_real(v)) == v);
  }
}

TEST_CASE("vector files reload bit-identically") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd v(40);
  for (long i = 0; i < 40; ++i) v(i) = normal(rng) * std::pow(10.0, (i % 13) - 6);
  const FileGuard guard{temp_path("vec.txt")};
  write_vector(guard.path, v);
  const VectorXd back = read_vector(guard.path);
  REQUIRE(back.size() == v.size());
  for (long i = 0; i < v.size(); ++i) CHECK(back(i) == v(i));
}

TEST_CASE("matrix files reload bit-identically") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd m(7, 5);
  for (long j = 0; j < 7; ++j)
    for (long k = 0; k < 5; ++k) m(j, k) = normal(rng) * std::pow(10.0, (k * 7 + j) % 9 - 4);
  const FileGuard guard{temp_path("mat.txt")};
  write_matrix(guard.path, m);
  const MatrixXd back = read_matrix(guard.path);
  REQUIRE(back.rows() == 7);
  REQUIRE(back.cols() == 5);
  for (long j = 0; j < 7; ++j)
    for (long k = 0; k < 5; ++k) CHECK(back(j, k) == m(j, k));
}

TEST_CASE("scientific notation and wrapped rows are accepted") {
  const FileGuard guard{temp_path("sci.txt")};
  {
    std::ofstream out(guard.path);
    out << "2 2\n1e-3 2.5E+2\n-3.25\n4\n";
  }
  const MatrixXd m = read_matrix(guard.path);
  CHECK(m(0, 0) == 1e-3);
  CHECK(m(0, 1) == 2.5e2);
  CHECK(m(1, 0) == -3.25);
  CHECK(m(1, 1) == 4.0);
}

TEST_CASE("malformed files raise IoError") {
  CHECK_THROWS_AS(read_vector(temp_path("missing.txt")), IoError);
  const FileGuard guard{temp_path("bad.txt")};
  {
    std::ofstream out(guard.path);
    out << "2 2\n1 2\n3 oops\n";
  }
  CHECK_THROWS_AS(read_matrix(guard.path), IoError);
  {
    std::ofstream out(guard.path);
    out << "3 3\n1 2 3\n";
  }
  CHECK_THROWS_AS(read_matrix(guard.path), IoError);
}

TEST_CASE("pgm round trip in both encodings") {
  PgmImage img;
  img.rows = 3;
  img.cols = 4;
  img.data.resize(12);
  for (long i = 0; i < 12; ++i) img.data(i) = static_cast<double>(i * 20) / 255.0;

  for (bool binary : {true, false}) {
    img.binary = binary;
    const FileGuard guard{temp_path(binary ? "img.p5.pgm" : "img.p2.pgm")};
    write_pgm(guard.path, img);
    CHECK(looks_like_pgm(guard.path));
    const PgmImage back = read_pgm(guard.path);
    CHECK(back.rows == 3);
    CHECK(back.cols == 4);
    CHECK(back.binary == binary);
    for (long i = 0; i < 12; ++i) CHECK(back.data(i) == doctest::Approx(img.data(i)).epsilon(1e-12));
  }
}

TEST_CASE("pgm writing clips out-of-range values") {
  PgmImage img;
  img.rows = 1;
  img.cols = 3;
  img.binary = false;
  img.data.resize(3);
  img.data << -0.5, 0.5, 1.7;
  const FileGuard guard{temp_path("clip.pgm")};
  write_pgm(guard.path, img);
  const PgmImage back = read_pgm(guard.path);
  CHECK(back.data(0) == 0.0);
  CHECK(back.data(1) == doctest::Approx(128.0 / 255.0));
  CHECK(back.data(2) == 1.0);
}

TEST_CASE("pgm header comments are skipped, wrong maxval rejected") {
  const FileGuard guard{temp_path("comment.pgm")};
  {
    std::ofstream out(guard.path);
    out << "P2\n# a comment\n2 2\n255\n0 255\n128 64\n";
  }
  const PgmImage img = read_pgm(guard.path);
  CHECK(img.rows == 2);
  CHECK(img.cols == 2);
  CHECK(img.data(0) == 0.0);
  CHECK(img.data(2) == 1.0);  // column-major: (row 0, col 1)

  const FileGuard bad{temp_path("maxval.pgm")};
  {
    std::ofstream out(bad.path);
    out << "P2\n2 2\n65535\n0 1 2 3\n";
  }
  CHECK_THROWS_AS(read_pgm(bad.path), IoError);
}
