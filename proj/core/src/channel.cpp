#include "mimobc/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mimobc {

void SystemDims::validate() const {
  if (tx_antennas < 1 || users < 1 || rx_antennas < 1) {
    throw std::invalid_argument("SystemDims: M, K, N must all be >= 1");
  }
}

void SnrProfile::validate(int users) const {
  if (static_cast<int>(gamma.size()) != users) {
    throw std::invalid_argument("SnrProfile: profile length must equal K");
  }
  for (double g : gamma) {
    if (!(g > 0.0)) {
      throw std::invalid_argument("SnrProfile: gamma_k must be positive");
    }
  }
}

ChannelSet sample_channel(const SystemDims& dims, const SnrProfile& profile,
                          RngStream& rng) {
  dims.validate();
  profile.validate(dims.users);
  ChannelSet cs;
  cs.dims = dims;
  cs.profile = profile;
  cs.per_user.reserve(dims.users);
  for (int k = 0; k < dims.users; ++k) {
    Matrix h = sample_complex_gaussian(rng, dims.rx_antennas, dims.tx_antennas);
    cs.per_user.push_back(std::sqrt(profile.gamma[k]) * h);
  }
  const Matrix h = concatenate(cs);
  const int expected = static_cast<int>(std::min(h.rows(), h.cols()));
  if (matrix_rank(h) != expected) {
    throw std::runtime_error("sample_channel: rank-deficient realization");
  }
  return cs;
}

Matrix concatenate(const ChannelSet& cs) {
  const int kn = cs.dims.aggregate_rx();
  Matrix h(kn, cs.dims.tx_antennas);
  for (int k = 0; k < cs.dims.users; ++k) {
    h.middleRows(k * cs.dims.rx_antennas, cs.dims.rx_antennas) =
        cs.per_user[k];
  }
  return h;
}

void dump_channel_csv(const ChannelSet& cs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  const Matrix h = concatenate(cs);
  for (int i = 0; i < h.rows(); ++i) {
    for (int j = 0; j < h.cols(); ++j) {
      if (j) out << ',';
      out << h(i, j).real() << ',' << h(i, j).imag();
    }
    out << '\n';
  }
}

ChannelSet load_channel_csv(const SystemDims& dims, const SnrProfile& profile,
                            const std::string& path) {
  dims.validate();
  profile.validate(dims.users);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  Matrix h(dims.aggregate_rx(), dims.tx_antennas);
  std::string line;
  for (int i = 0; i < h.rows(); ++i) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("channel csv: too few rows in " + path);
    }
    std::istringstream ss(line);
    std::string cell;
    for (int j = 0; j < h.cols(); ++j) {
      double re, im;
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error("channel csv: too few columns");
      }
      re = std::stod(cell);
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error("channel csv: missing imaginary part");
      }
      im = std::stod(cell);
      h(i, j) = {re, im};
    }
  }
  ChannelSet cs;
  cs.dims = dims;
  cs.profile = profile;
  for (int k = 0; k < dims.users; ++k) {
    cs.per_user.push_back(
        h.middleRows(k * dims.rx_antennas, dims.rx_antennas));
  }
  return cs;
}

}  // namespace mimobc
