/**
 * @file linalg.hpp
 * @brief Complex dense linear-algebra kernels: QR, null-space projectors,
 * log-determinants, and seeded complex Gaussian sampling.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace mimobc {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;

struct NotPositiveDefiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QrResult {
  Matrix q;  // orthonormal columns, rows x min(rows, cols)
  Matrix r;  // upper triangular, min(rows, cols) x cols
};

/// Thin Householder QR. Throws std::invalid_argument on non-finite entries.
QrResult qr_decompose(const Matrix& a);

/// Orthogonal projector onto the common null space of the given row vectors.
/// An empty list yields the identity. Rank cutoff is
/// eps * ambient_dim * sigma_max on the singular values of the stacked rows.
Matrix nullspace_projector(const std::vector<RowVector>& rows, int ambient_dim);

/// Orthonormal basis (as columns) of the null space of the stacked rows.
Matrix nullspace_basis(const std::vector<RowVector>& rows, int ambient_dim);

/// Numerical rank of a matrix with the same cutoff convention.
int matrix_rank(const Matrix& a);

/// log2 |A| for Hermitian positive definite A, via Cholesky pivots.
/// Throws NotPositiveDefiniteError when a pivot is not positive.
double logdet2(const Matrix& a);

/// Counter-based seeding: trial i's stream depends only on (master_seed, i),
/// independent of how trials are scheduled across workers.
std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t index);

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}
  static RngStream child(std::uint64_t master_seed, std::uint64_t index) {
    return RngStream(child_seed(master_seed, index));
  }
  std::mt19937_64& gen() { return gen_; }
  /// Standard real Gaussian draw, N(0, 1).
  double normal();
  /// Circularly symmetric complex Gaussian, E|h|^2 = 1.
  cxd complex_normal();
  /// Poisson draw with the given mean.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 gen_;
};

/// rows x cols matrix of iid unit-variance complex Gaussians.
Matrix sample_complex_gaussian(RngStream& rng, int rows, int cols);

}  // namespace mimobc
