#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "proxframe/io.hpp"

using namespace proxframe;
namespace fs = std::filesystem;

namespace {

const std::string kCli = PROXFRAME_CLI_PATH;

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() / ("proxframe_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
  const int status = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("cli shrink matches the toy value") {
  TempDir tmp;
  spit(tmp.path("in.txt"), "1\n");
  CHECK(run("shrink --gallery toy1d:c=2 --gamma 1.6666666667 --in " + tmp.path("in.txt") +
            " --out " + tmp.path("out.txt")) == 0);
  const Eigen::VectorXd out = read_vector(tmp.path("out.txt"));
  REQUIRE(out.size() == 1);
  CHECK(out(0) == doctest::Approx(2.0 / 15.0).epsilon(1e-8));
}

TEST_CASE("cli shrink with the identity gallery reduces to soft shrinkage") {
  TempDir tmp;
  spit(tmp.path("in.txt"), "2\n-0.5\n");
  CHECK(run("shrink --gallery identity:n=2 --gamma 1 --in " + tmp.path("in.txt") + " --out " +
            tmp.path("out.txt")) == 0);
  const Eigen::VectorXd out = read_vector(tmp.path("out.txt"));
  CHECK(out(0) == 1.0);
  CHECK(out(1) == 0.0);
}

TEST_CASE("cli shrink zero input stays zero") {
  TempDir tmp;
  spit(tmp.path("in.txt"), "0\n0\n0\n");
  CHECK(run("shrink --gallery parseval:l=5,n=3 --gamma 0.3 --in " + tmp.path("in.txt") +
            " --out " + tmp.path("out.txt")) == 0);
  CHECK(read_vector(tmp.path("out.txt")).norm() == 0.0);
}

TEST_CASE("cli exit codes") {
  TempDir tmp;
  spit(tmp.path("in.txt"), "1\n");
  // Validation error: bad gamma.
  CHECK(run("shrink --gallery identity:n=1 --gamma -1 --in " + tmp.path("in.txt") +
            " --out " + tmp.path("out.txt")) == 2);
  // Both or neither frame source.
  CHECK(run("shrink --gamma 1 --in " + tmp.path("in.txt") + " --out " + tmp.path("out.txt")) ==
        2);
  // I/O error: missing input.
  CHECK(run("shrink --gallery identity:n=1 --gamma 1 --in " + tmp.path("nope.txt") +
            " --out " + tmp.path("out.txt")) == 3);
  // Unknown flag.
  CHECK(run("shrink --wat 1") == 2);
  // Rank-deficient frame file.
  CHECK(run("tv --n1 3 --n2 3 --out " + tmp.path("tv.txt")) == 0);
  CHECK(run("shrink --frame " + tmp.path("tv.txt") + " --gamma 1 --in " + tmp.path("in.txt") +
            " --out " + tmp.path("out.txt")) == 2);
}

TEST_CASE("cli tv and gallery write valid matrices") {
  TempDir tmp;
  CHECK(run("tv --n1 2 --n2 2 --out " + tmp.path("tv.txt")) == 0);
  const Eigen::MatrixXd tv = read_matrix(tmp.path("tv.txt"));
  CHECK(tv.rows() == 4);
  CHECK(tv.cols() == 4);

  CHECK(run("gallery --kind parseval:l=6,n=3 --out " + tmp.path("q.txt")) == 0);
  const Eigen::MatrixXd q = read_matrix(tmp.path("q.txt"));
  CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(3, 3)).lpNorm<Eigen::Infinity>() <=
        1e-12);

  CHECK(run("gallery --kind identity:n=4 --out " + tmp.path("id.txt")) == 0);
  CHECK((read_matrix(tmp.path("id.txt")) - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);

  CHECK(run("tv --n1 1 --n2 2 --out " + tmp.path("bad.txt")) == 2);
  CHECK(run("gallery --kind nope:n=1 --out " + tmp.path("bad.txt")) == 2);
}

TEST_CASE("cli prox with identity matrix soft-shrinks, orthogonal matches shrink") {
  TempDir tmp;
  CHECK(run("gallery --kind identity:n=2 --out " + tmp.path("id.txt")) == 0);
  spit(tmp.path("in.txt"), "2\n-0.25\n");
  CHECK(run("prox --matrix " + tmp.path("id.txt") + " --gamma 0.5 --in " + tmp.path("in.txt") +
            " --out " + tmp.path("out.txt") + " --report " + tmp.path("report.json")) == 0);
  const Eigen::VectorXd out = read_vector(tmp.path("out.txt"));
  CHECK(out(0) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(out(1) == doctest::Approx(0.0).epsilon(1e-10));
  const auto report = nlohmann::json::parse(slurp(tmp.path("report.json")));
  CHECK(report.at("converged").get<bool>());
  CHECK(report.at("kkt_residual").get<double>() <= 1e-7);

  CHECK(run("gallery --kind parseval:l=3,n=3,seed=5 --out " + tmp.path("q.txt")) == 0);
  spit(tmp.path("y.txt"), "1.5\n-2\n0.25\n");
  CHECK(run("prox --matrix " + tmp.path("q.txt") + " --gamma 0.7 --in " + tmp.path("y.txt") +
            " --out " + tmp.path("prox.txt")) == 0);
  CHECK(run("shrink --frame " + tmp.path("q.txt") + " --gamma 0.7 --in " + tmp.path("y.txt") +
            " --out " + tmp.path("shrink.txt")) == 0);
  CHECK((read_vector(tmp.path("prox.txt")) - read_vector(tmp.path("shrink.txt"))).norm() <=
        1e-8);
}

TEST_CASE("cli prox accepts the rank-deficient TV operator") {
  TempDir tmp;
  CHECK(run("tv --n1 3 --n2 3 --out " + tmp.path("tv.txt")) == 0);
  std::ostringstream y;
  for (int i = 0; i < 9; ++i) y << (i % 2 ? "1.0" : "0.0") << '\n';
  spit(tmp.path("y.txt"), y.str());
  CHECK(run("prox --matrix " + tmp.path("tv.txt") + " --gamma 0.2 --in " + tmp.path("y.txt") +
            " --out " + tmp.path("out.txt") + " --report " + tmp.path("report.json")) == 0);
  const auto report = nlohmann::json::parse(slurp(tmp.path("report.json")));
  CHECK(report.at("converged").get<bool>());
}

TEST_CASE("cli verify runs a suite deterministically") {
  TempDir tmp;
  CHECK(run("verify --suite oneD --seed 7 --out " + tmp.path("a.json")) == 0);
  CHECK(run("verify --suite oneD --seed 7 --out " + tmp.path("b.json")) == 0);
  CHECK(slurp(tmp.path("a.json")) == slurp(tmp.path("b.json")));
  const auto doc = nlohmann::json::parse(slurp(tmp.path("a.json")));
  CHECK(doc.is_array());
  for (const auto& entry : doc) CHECK(entry.at("passed").get<bool>());

  CHECK(run("verify --suite nope") == 2);
}

TEST_CASE("cli solve denoises a PGM in one step with the identity model") {
  TempDir tmp;
  // 8x8 blocks image with a bright quadrant.
  PgmImage img;
  img.rows = 8;
  img.cols = 8;
  img.binary = true;
  img.data.resize(64);
  for (long k = 0; k < 8; ++k)
    for (long j = 0; j < 8; ++j) img.data(j + 8 * k) = (j < 4 && k < 4) ? 0.9 : 0.2;
  write_pgm(tmp.path("in.pgm"), img);

  const nlohmann::json config = {
      {"K", "identity"},
      {"f", tmp.path("in.pgm")},
      {"backward",
       {{"kind", "frame_shrink"}, {"gamma", 0.05}, {"frame", "parseval:l=96,n=64,seed=3"}}},
      {"lambda", 1.0}};
  spit(tmp.path("config.json"), config.dump());
  CHECK(run("solve --config " + tmp.path("config.json") + " --out " + tmp.path("out.pgm") +
            " --trace " + tmp.path("trace.json")) == 0);
  const auto trace = nlohmann::json::parse(slurp(tmp.path("trace.json")));
  CHECK(trace.at("converged").get<bool>());
  CHECK(trace.at("iterations").get<long>() <= 2);
  const PgmImage out = read_pgm(tmp.path("out.pgm"));
  CHECK(out.rows == 8);
  CHECK(out.cols == 8);
  CHECK(out.binary);
}

TEST_CASE("cli solve rejects a step size outside the window") {
  TempDir tmp;
  spit(tmp.path("f.txt"), "1\n2\n");
  const nlohmann::json config = {
      {"K", "identity"},
      {"f", tmp.path("f.txt")},
      {"backward", {{"kind", "frame_shrink"}, {"gamma", 0.5}, {"frame", "identity:n=2"}}},
      {"lambda", 3.0}};
  spit(tmp.path("config.json"), config.dump());
  CHECK(run("solve --config " + tmp.path("config.json") + " --out " + tmp.path("out.txt") +
            " --trace " + tmp.path("trace.json")) == 2);

  // Unknown keys are config errors too.
  nlohmann::json bad = config;
  bad["lambda"] = 1.0;
  bad["typo"] = 1;
  spit(tmp.path("bad.json"), bad.dump());
  CHECK(run("solve --config " + tmp.path("bad.json") + " --out " + tmp.path("out.txt") +
            " --trace " + tmp.path("trace.json")) == 2);
}

TEST_CASE("cli solve with exact-prox TV backward reduces the objective") {
  TempDir tmp;
  CHECK(run("tv --n1 4 --n2 4 --out " + tmp.path("tv.txt")) == 0);
  std::ostringstream f;
  for (int i = 0; i < 16; ++i) f << 0.1 * (i % 5) << '\n';
  spit(tmp.path("f.txt"), f.str());
  const nlohmann::json config = {
      {"K", "identity"},
      {"f", tmp.path("f.txt")},
      {"backward", {{"kind", "exact_prox"}, {"gamma", 0.05}, {"frame", tmp.path("tv.txt")}}},
      {"lambda", 1.0},
      {"tol", 1e-9},
      {"max_iters", 3000}};
  spit(tmp.path("config.json"), config.dump());
  CHECK(run("solve --config " + tmp.path("config.json") + " --out " + tmp.path("out.txt") +
            " --trace " + tmp.path("trace.json")) == 0);
  const auto trace = nlohmann::json::parse(slurp(tmp.path("trace.json")));
  const auto objective = trace.at("objective").get<std::vector<double>>();
  REQUIRE(!objective.empty());
  CHECK(objective.back() <= objective.front() + 1e-12);
}

TEST_CASE("cli matrix and vector output reloads bit-identically") {
  TempDir tmp;
  CHECK(run("gallery --kind random:l=7,n=4,seed=11 --out " + tmp.path("m.txt")) == 0);
  const Eigen::MatrixXd m = read_matrix(tmp.path("m.txt"));
  write_matrix(tmp.path("m2.txt"), m);
  CHECK(slurp(tmp.path("m.txt")) == slurp(tmp.path("m2.txt")));
}
