#include "proxframe/gallery.hpp"

#include <charconv>
#include <random>

#include <Eigen/QR>

#include "proxframe/errors.hpp"

namespace proxframe {

namespace {

Eigen::MatrixXd gaussian_matrix(long l, long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(l, n);
  for (long j = 0; j < l; ++j)
    for (long k = 0; k < n; ++k) m(j, k) = normal(rng);
  return m;
}

struct ParsedSpec {
  std::string kind;
  std::map<std::string, double> params;
};

ParsedSpec parse_spec(const std::string& spec) {
  ParsedSpec out;
  const auto colon = spec.find(':');
  out.kind = spec.substr(0, colon);
  if (out.kind.empty()) throw ConfigError("gallery spec is missing a kind: '" + spec + "'");
  if (colon == std::string::npos) return out;
  std::string rest = spec.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    const auto comma = rest.find(',', pos);
    const std::string item =
        rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("gallery spec item '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), value);
    if (ec != std::errc() || ptr != val.data() + val.size())
      throw ConfigError("gallery spec value '" + val + "' is not a number");
    out.params[key] = value;
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

double take(ParsedSpec& spec, const std::string& key, bool required, double fallback = 0.0) {
  const auto it = spec.params.find(key);
  if (it == spec.params.end()) {
    if (required)
      throw ConfigError("gallery spec '" + spec.kind + "' is missing key '" + key + "'");
    return fallback;
  }
  const double v = it->second;
  spec.params.erase(it);
  return v;
}

long take_count(ParsedSpec& spec, const std::string& key) {
  const double v = take(spec, key, true);
  const long n = static_cast<long>(v);
  if (n < 1 || static_cast<double>(n) != v)
    throw ConfigError("gallery spec key '" + key + "' must be a positive integer");
  return n;
}

}  // namespace

FrameXd toy1d_frame(double c) {
  if (!(c >= 1.0)) throw DomainError("toy1d frame needs c >= 1");
  Eigen::MatrixXd t(2, 1);
  t << 1.0, c;
  return build_frame(t);
}

FrameXd parseval_frame(long l, long n, std::uint64_t seed) {
  if (l < n || n < 1) throw ShapeError("parseval frame needs L >= N >= 1");
  const Eigen::MatrixXd g = gaussian_matrix(l, n, seed ^ 0x70617273ull);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(l, n);
  return build_frame(q);
}

FrameXd random_full_rank_frame(long l, long n, std::uint64_t seed) {
  if (l < n || n < 1) throw ShapeError("random frame needs L >= N >= 1");
  for (int attempt = 0;; ++attempt) {
    try {
      return build_frame(gaussian_matrix(l, n, seed + static_cast<std::uint64_t>(attempt)));
    } catch (const RankError&) {
      if (attempt >= 10) throw;
    }
  }
}

FrameXd identity_frame(long n) {
  if (n < 1) throw ShapeError("identity frame needs N >= 1");
  return build_frame(Eigen::MatrixXd::Identity(n, n));
}

FrameXd make_gallery(const std::string& spec) {
  ParsedSpec parsed = parse_spec(spec);
  FrameXd frame = [&]() -> FrameXd {
    if (parsed.kind == "toy1d" || parsed.kind == "toy_1d") {
      const double c = take(parsed, "c", true);
      return toy1d_frame(c);
    }
    if (parsed.kind == "identity") {
      return identity_frame(take_count(parsed, "n"));
    }
    if (parsed.kind == "parseval") {
      const long l = take_count(parsed, "l");
      const long n = take_count(parsed, "n");
      const auto seed = static_cast<std::uint64_t>(take(parsed, "seed", false, 0.0));
      return parseval_frame(l, n, seed);
    }
    if (parsed.kind == "random" || parsed.kind == "random_full_rank") {
      const long l = take_count(parsed, "l");
      const long n = take_count(parsed, "n");
      const auto seed = static_cast<std::uint64_t>(take(parsed, "seed", false, 0.0));
      return random_full_rank_frame(l, n, seed);
    }
    throw ConfigError("unknown gallery kind '" + parsed.kind + "'");
  }();
  if (!parsed.params.empty())
    throw ConfigError("gallery spec has unused key '" + parsed.params.begin()->first + "'");
  return frame;
}

}  // namespace proxframe
