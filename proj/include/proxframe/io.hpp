#pragma once

#include <string>

#include <Eigen/Core>

namespace proxframe {

/// Formats a double with 17 significant digits, enough to round-trip.
std::string format_real(double v);

/// Vector text format: one real per line, '.' decimal separator, scientific
/// notation accepted.
Eigen::VectorXd read_vector(const std::string& path);
void write_vector(const std::string& path, const Eigen::VectorXd& v);

/// Matrix text format: a first line "L N" followed by L rows of N
/// whitespace-separated reals.
Eigen::MatrixXd read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);

/// A grayscale PGM image (P2 or P5, maxval 255) with pixels scaled to [0, 1]
/// and vectorized column by column: data(j + k * rows) is the pixel in image
/// row j, column k.
struct PgmImage {
  long rows = 0;
  long cols = 0;
  bool binary = true;  // P5 when true, P2 when false
  Eigen::VectorXd data;
};

/// True when the file starts with a P2/P5 magic number.
bool looks_like_pgm(const std::string& path);
PgmImage read_pgm(const std::string& path);
/// Writes the image, clipping data to [0, 1] and rescaling to 0..255.
void write_pgm(const std::string& path, const PgmImage& img);

}  // namespace proxframe
