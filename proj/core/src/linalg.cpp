#include "mimobc/linalg.hpp"

#include <cmath>

namespace mimobc {

namespace {

bool all_finite(const Matrix& a) {
  return a.allFinite();
}

Eigen::JacobiSVD<Matrix> stacked_svd(const std::vector<RowVector>& rows,
                                     int ambient_dim) {
  Matrix b(static_cast<int>(rows.size()), ambient_dim);
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    if (rows[i].cols() != ambient_dim) {
      throw std::invalid_argument("nullspace: row length mismatch");
    }
    b.row(i) = rows[i];
  }
  return Eigen::JacobiSVD<Matrix>(b, Eigen::ComputeFullV);
}

int svd_rank(const Eigen::JacobiSVD<Matrix>& svd, int ambient_dim) {
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double cutoff =
      std::numeric_limits<double>::epsilon() * ambient_dim * s(0);
  int r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  return r;
}

}  // namespace

QrResult qr_decompose(const Matrix& a) {
  if (a.rows() < 1 || a.cols() < 1 || !all_finite(a)) {
    throw std::invalid_argument("qr_decompose: invalid input");
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  const int k = static_cast<int>(std::min(a.rows(), a.cols()));
  QrResult out;
  out.q = qr.householderQ() * Matrix::Identity(a.rows(), k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

Matrix nullspace_projector(const std::vector<RowVector>& rows,
                           int ambient_dim) {
  if (rows.empty()) return Matrix::Identity(ambient_dim, ambient_dim);
  auto svd = stacked_svd(rows, ambient_dim);
  const int r = svd_rank(svd, ambient_dim);
  const Matrix vr = svd.matrixV().leftCols(r);
  return Matrix::Identity(ambient_dim, ambient_dim) - vr * vr.adjoint();
}

Matrix nullspace_basis(const std::vector<RowVector>& rows, int ambient_dim) {
  if (rows.empty()) return Matrix::Identity(ambient_dim, ambient_dim);
  auto svd = stacked_svd(rows, ambient_dim);
  const int r = svd_rank(svd, ambient_dim);
  return svd.matrixV().rightCols(ambient_dim - r);
}

int matrix_rank(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double cutoff = std::numeric_limits<double>::epsilon() *
                        std::max(a.rows(), a.cols()) * s(0);
  int r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  return r;
}

double logdet2(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("logdet2: matrix must be square");
  }
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("logdet2: matrix is not positive definite");
  }
  // |A| = prod L_ii^2; stay in log domain, the determinant itself overflows
  // for moderately sized matrices at high SNR.
  double acc = 0.0;
  const auto& l = llt.matrixLLT();
  for (int i = 0; i < a.rows(); ++i) {
    const double pivot = std::real(l(i, i));
    if (!(pivot > 0.0)) {
      throw NotPositiveDefiniteError("logdet2: nonpositive pivot");
    }
    acc += std::log2(pivot);
  }
  return 2.0 * acc;
}

std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t index) {
  // splitmix64 over the (seed, index) pair.
  std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double RngStream::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(gen_);
}

cxd RngStream::complex_normal() {
  std::normal_distribution<double> dist(0.0, std::sqrt(0.5));
  const double re = dist(gen_);
  const double im = dist(gen_);
  return {re, im};
}

std::uint64_t RngStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(gen_);
}

Matrix sample_complex_gaussian(RngStream& rng, int rows, int cols) {
  Matrix h(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      h(i, j) = rng.complex_normal();
    }
  }
  return h;
}

}  // namespace mimobc
