/**
 * @file queuesim.hpp
 * @brief Slot-based max-weight scheduling over the MIMO broadcast channel:
 * exact weighted-sum-rate maximization vs the proportional-power shortcut
 * P_k = q_k / sum(q) * P. Rates in bps/Hz are interpreted as bits per slot.
 */
#pragma once

#include <vector>

#include "mimobc/rates.hpp"

namespace mimobc {

struct QueueState {
  std::vector<double> q;  // bits, one per user
  std::int64_t slot = 0;

  double total() const;
};

enum class QueuePolicy { exact, proportional };
enum class ArrivalLaw { poisson, deterministic };
enum class ChannelLaw { iid_per_slot, fixed };

struct QueueSimConfig {
  SystemDims dims;
  double p_db = 10.0;
  std::vector<double> arrival_rates;  // bits/slot per user
  ArrivalLaw arrival_law = ArrivalLaw::poisson;
  std::int64_t slots = 1000;
  QueuePolicy policy = QueuePolicy::proportional;
  std::uint64_t seed = 0;
  ChannelLaw channel_law = ChannelLaw::iid_per_slot;
  double burn_in_fraction = 0.1;

  void validate() const;
};

struct SlotRecord {
  std::int64_t slot = 0;
  std::vector<double> queues;  // after the update
  std::vector<double> rates;   // offered service this slot
};

struct SlotResult {
  std::vector<double> rates;
  QueueState next;
};

/// One scheduling decision + Lindley update. Weights are q_k / sum(q);
/// an all-empty queue idles the slot. Arrivals are supplied by the caller.
SlotResult schedule_slot(const QueueState& state, const ChannelSet& cs,
                         const QueueSimConfig& cfg,
                         const std::vector<double>& arrivals);

struct QueueSimResult {
  std::vector<double> time_avg_queue;  // per user, after burn-in
  double time_avg_total = 0.0;
  bool drift_detected = false;  // queue kept growing through the run
  std::vector<SlotRecord> trace;
};

QueueSimResult run_queue_sim(const QueueSimConfig& cfg,
                             bool keep_trace = false);

}  // namespace mimobc
