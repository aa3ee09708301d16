#include "mimobc/precoding.hpp"

#include <numeric>

namespace mimobc {

namespace {

void require_feasible(const ChannelSet& cs) {
  if (!cs.dims.fully_loaded_or_under()) {
    throw InfeasiblePrecoderError(
        "precoder requires M >= KN (got M=" +
        std::to_string(cs.dims.tx_antennas) +
        ", KN=" + std::to_string(cs.dims.aggregate_rx()) + ")");
  }
  const Matrix h = concatenate(cs);
  if (matrix_rank(h) != h.rows()) {
    throw std::runtime_error("precoder: concatenated channel is rank deficient");
  }
}

}  // namespace

ZfResult zf_effective_gains(const ChannelSet& cs) {
  require_feasible(cs);
  const Matrix h = concatenate(cs);
  const int kn = static_cast<int>(h.rows());
  const int m = static_cast<int>(h.cols());
  ZfResult out;
  out.gains.reserve(kn);
  out.directions.reserve(kn);
  for (int r = 0; r < kn; ++r) {
    std::vector<RowVector> others;
    others.reserve(kn - 1);
    for (int i = 0; i < kn; ++i) {
      if (i != r) others.push_back(h.row(i));
    }
    const Matrix proj = nullspace_projector(others, m);
    const RowVector g = h.row(r) * proj;
    const double gain = g.squaredNorm();
    out.gains.push_back(gain);
    out.directions.push_back(gain > 0.0 ? RowVector(g / g.norm())
                                        : RowVector(RowVector::Zero(m)));
  }
  return out;
}

BdResult bd_effective_channels(const ChannelSet& cs) {
  require_feasible(cs);
  const int m = cs.dims.tx_antennas;
  BdResult out;
  for (int k = 0; k < cs.dims.users; ++k) {
    std::vector<RowVector> others;
    for (int j = 0; j < cs.dims.users; ++j) {
      if (j == k) continue;
      for (int n = 0; n < cs.dims.rx_antennas; ++n) {
        others.push_back(cs.row(j, n));
      }
    }
    const Matrix vk = nullspace_basis(others, m);
    const Matrix gk = cs.per_user[k] * vk;
    out.effective.push_back(gk);
    out.gram.push_back(gk * gk.adjoint());
  }
  return out;
}

ZfDpcResult zfdpc_successive_projection(const ChannelSet& cs,
                                        std::vector<int> order) {
  require_feasible(cs);
  const int k_users = cs.dims.users;
  if (order.empty()) {
    order.resize(k_users);
    std::iota(order.begin(), order.end(), 0);
  }
  if (static_cast<int>(order.size()) != k_users) {
    throw std::invalid_argument("zfdpc: order must be a permutation of users");
  }
  const int m = cs.dims.tx_antennas;
  ZfDpcResult out;
  out.order = order;
  std::vector<RowVector> earlier;
  for (int idx = 0; idx < k_users; ++idx) {
    const int user = order[idx];
    const Matrix proj = nullspace_projector(earlier, m);
    const Matrix fk = cs.per_user[user] * proj;
    out.effective.push_back(fk);
    for (int n = 0; n < cs.dims.rx_antennas; ++n) {
      out.norms.push_back(fk.row(n).squaredNorm());
      earlier.push_back(cs.row(user, n));
    }
  }
  return out;
}

}  // namespace mimobc
