#include "proxframe/tv.hpp"

#include <vector>

#include "proxframe/errors.hpp"

namespace proxframe {

namespace {

void check_grid(long n1, long n2) {
  if (n1 < 2 || n2 < 2)
    throw SizeError("tv_matrix needs n1 >= 2 and n2 >= 2, got " + std::to_string(n1) +
                    " x " + std::to_string(n2));
}

inline long pixel(long j, long k, long n1) { return j + k * n1; }

}  // namespace

Eigen::SparseMatrix<double> tv_matrix_sparse(long n1, long n2) {
  check_grid(n1, n2);
  const long rows = 2 * n1 * n2 - n1 - n2;
  Eigen::SparseMatrix<double> t(rows, n1 * n2);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * rows);
  long r = 0;
  for (long k = 0; k < n2; ++k)
    for (long j = 0; j + 1 < n1; ++j, ++r) {
      trip.emplace_back(r, pixel(j + 1, k, n1), 1.0);
      trip.emplace_back(r, pixel(j, k, n1), -1.0);
    }
  for (long k = 0; k + 1 < n2; ++k)
    for (long j = 0; j < n1; ++j, ++r) {
      trip.emplace_back(r, pixel(j, k + 1, n1), 1.0);
      trip.emplace_back(r, pixel(j, k, n1), -1.0);
    }
  t.setFromTriplets(trip.begin(), trip.end());
  return t;
}

Eigen::MatrixXd tv_matrix(long n1, long n2) {
  return Eigen::MatrixXd(tv_matrix_sparse(n1, n2));
}

}  // namespace proxframe
