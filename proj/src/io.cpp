#include "proxframe/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "proxframe/errors.hpp"

namespace proxframe {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ifstream open_input(const std::string& path, std::ios_base::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path, std::ios_base::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

double parse_real(const std::string& token, const std::string& path) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw IoError("'" + path + "': cannot parse '" + token + "' as a real number");
  return v;
}

long parse_count(const std::string& token, const std::string& path) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || v < 0)
    throw IoError("'" + path + "': cannot parse '" + token + "' as a dimension");
  return v;
}

}  // namespace

Eigen::VectorXd read_vector(const std::string& path) {
  std::ifstream in = open_input(path, std::ios_base::in);
  std::vector<double> values;
  std::string token;
  while (in >> token) values.push_back(parse_real(token, path));
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

void write_vector(const std::string& path, const Eigen::VectorXd& v) {
  std::ofstream out = open_output(path, std::ios_base::out);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_real(v(i)) << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  std::ifstream in = open_input(path, std::ios_base::in);
  std::string ltok, ntok;
  if (!(in >> ltok >> ntok)) throw IoError("'" + path + "': missing 'L N' header line");
  const long rows = parse_count(ltok, path);
  const long cols = parse_count(ntok, path);
  Eigen::MatrixXd m(rows, cols);
  std::string token;
  for (long j = 0; j < rows; ++j)
    for (long k = 0; k < cols; ++k) {
      if (!(in >> token))
        throw IoError("'" + path + "': expected " + std::to_string(rows * cols) +
                      " entries, file ended early");
      m(j, k) = parse_real(token, path);
    }
  return m;
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out = open_output(path, std::ios_base::out);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (k) out << ' ';
      out << format_real(m(j, k));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

namespace {

// Reads the next header token, skipping whitespace and '#' comment lines.
std::string pgm_token(std::istream& in, const std::string& path) {
  std::string token;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  while (ch != EOF && !std::isspace(ch)) {
    token.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  if (token.empty()) throw IoError("'" + path + "': truncated PGM header");
  return token;
}

}  // namespace

bool looks_like_pgm(const std::string& path) {
  std::ifstream in(path, std::ios_base::binary);
  if (!in) return false;
  char magic[2] = {0, 0};
  in.read(magic, 2);
  return in && magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5');
}

PgmImage read_pgm(const std::string& path) {
  std::ifstream in = open_input(path, std::ios_base::binary);
  const std::string magic = pgm_token(in, path);
  if (magic != "P2" && magic != "P5")
    throw IoError("'" + path + "': not a P2/P5 PGM image");
  PgmImage img;
  img.binary = magic == "P5";
  img.cols = parse_count(pgm_token(in, path), path);
  img.rows = parse_count(pgm_token(in, path), path);
  const long maxval = parse_count(pgm_token(in, path), path);
  if (maxval != 255)
    throw IoError("'" + path + "': only maxval 255 PGM images are supported");
  if (img.rows < 1 || img.cols < 1) throw IoError("'" + path + "': empty PGM image");

  img.data.resize(img.rows * img.cols);
  if (img.binary) {
    // The single whitespace after maxval has already been consumed by get().
    std::vector<unsigned char> raw(static_cast<std::size_t>(img.rows) * img.cols);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw IoError("'" + path + "': truncated PGM pixel data");
    for (long j = 0; j < img.rows; ++j)
      for (long k = 0; k < img.cols; ++k)
        img.data(j + k * img.rows) =
            raw[static_cast<std::size_t>(j) * img.cols + k] / 255.0;
  } else {
    for (long j = 0; j < img.rows; ++j)
      for (long k = 0; k < img.cols; ++k) {
        const long p = parse_count(pgm_token(in, path), path);
        if (p > 255) throw IoError("'" + path + "': pixel value above maxval");
        img.data(j + k * img.rows) = p / 255.0;
      }
  }
  return img;
}

void write_pgm(const std::string& path, const PgmImage& img) {
  if (img.data.size() != img.rows * img.cols)
    throw LengthError("write_pgm: data length does not match rows * cols");
  std::ofstream out = open_output(path, std::ios_base::binary);
  out << (img.binary ? "P5" : "P2") << '\n'
      << img.cols << ' ' << img.rows << '\n'
      << 255 << '\n';
  auto quantize = [](double v) {
    const double clipped = std::min(1.0, std::max(0.0, v));
    return static_cast<int>(std::lround(clipped * 255.0));
  };
  if (img.binary) {
    std::vector<unsigned char> raw(static_cast<std::size_t>(img.rows) * img.cols);
    for (long j = 0; j < img.rows; ++j)
      for (long k = 0; k < img.cols; ++k)
        raw[static_cast<std::size_t>(j) * img.cols + k] =
            static_cast<unsigned char>(quantize(img.data(j + k * img.rows)));
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
  } else {
    for (long j = 0; j < img.rows; ++j) {
      for (long k = 0; k < img.cols; ++k) {
        if (k) out << ' ';
        out << quantize(img.data(j + k * img.rows));
      }
      out << '\n';
    }
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace proxframe
