/**
 * @file channel.hpp
 * @brief MIMO broadcast channel realizations, including the per-user
 * average-SNR (near-far) model H_k = sqrt(gamma_k) * Htilde_k.
 */
#pragma once

#include <string>
#include <vector>

#include "mimobc/linalg.hpp"

namespace mimobc {

struct SystemDims {
  int tx_antennas = 1;   // M
  int users = 1;         // K
  int rx_antennas = 1;   // N per user

  int aggregate_rx() const { return users * rx_antennas; }
  /// Offset closed forms require M >= KN; overloaded heuristics do not.
  bool fully_loaded_or_under() const { return tx_antennas >= aggregate_rx(); }
  void validate() const;
};

struct SnrProfile {
  std::vector<double> gamma;  // linear scale, gamma_k > 0

  static SnrProfile symmetric(int users) {
    return SnrProfile{std::vector<double>(users, 1.0)};
  }
  void validate(int users) const;
};

struct ChannelSet {
  SystemDims dims;
  SnrProfile profile;
  std::vector<Matrix> per_user;  // K matrices, N x M, already scaled by sqrt(gamma_k)

  /// Row n of user k's channel, a 1 x M vector.
  RowVector row(int user, int antenna) const {
    return per_user[user].row(antenna);
  }
};

/// Draws Htilde_k iid unit complex Gaussian and scales by sqrt(gamma_k).
/// Deterministic given the generator state; asserts the concatenation has
/// full rank min(KN, M).
ChannelSet sample_channel(const SystemDims& dims, const SnrProfile& profile,
                          RngStream& rng);

/// KN x M concatenation, user-major row order.
Matrix concatenate(const ChannelSet& cs);

/// CSV round trip for regression fixtures: one line per matrix row,
/// interleaved re/im columns.
void dump_channel_csv(const ChannelSet& cs, const std::string& path);
ChannelSet load_channel_csv(const SystemDims& dims, const SnrProfile& profile,
                            const std::string& path);

}  // namespace mimobc
