/**
 * @file precoding.hpp
 * @brief ZF, BD, and ZF-DPC effective channels by orthogonal projection.
 *
 * ZF turns the system into KN scalar channels with gains |g_{k,n}|^2,
 * BD into K parallel MIMO channels with Gram matrices G_k G_k^H, and
 * ZF-DPC (successive projection under an encoding order) into channels
 * F_k whose norms drive the weighted-rate formulas.
 */
#pragma once

#include <vector>

#include "mimobc/channel.hpp"

namespace mimobc {

enum class Scheme { ZF, BD, ZFDPC };

struct InfeasiblePrecoderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZfResult {
  std::vector<double> gains;       // KN entries |g_{k,n}|^2, user-major order
  std::vector<RowVector> directions;  // unit vectors v_{k,n}
};

struct BdResult {
  std::vector<Matrix> effective;  // K matrices G_k, N x (M-(K-1)N)
  std::vector<Matrix> gram;       // K matrices G_k G_k^H, basis-invariant
};

struct ZfDpcResult {
  std::vector<int> order;           // user encoding order applied
  std::vector<Matrix> effective;    // F_k = H_k P_perp(earlier users), in order
  std::vector<double> norms;        // ||f_k||^2 per stream (N=1: one per user)
};

ZfResult zf_effective_gains(const ChannelSet& cs);
BdResult bd_effective_channels(const ChannelSet& cs);

/// Successive projection under the given user order (empty = index order).
ZfDpcResult zfdpc_successive_projection(const ChannelSet& cs,
                                        std::vector<int> order = {});

}  // namespace mimobc
