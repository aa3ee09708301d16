#include "mimobc/queuesim.hpp"

#include <cmath>
#include <numeric>

namespace mimobc {

double QueueState::total() const {
  return std::accumulate(q.begin(), q.end(), 0.0);
}

void QueueSimConfig::validate() const {
  dims.validate();
  if (slots < 1) throw std::invalid_argument("slots must be >= 1");
  if (static_cast<int>(arrival_rates.size()) != dims.users) {
    throw std::invalid_argument("arrival_rates length must equal K");
  }
  for (double l : arrival_rates) {
    if (l < 0.0) throw std::invalid_argument("arrival rates must be >= 0");
  }
  if (burn_in_fraction < 0.0 || burn_in_fraction >= 1.0) {
    throw std::invalid_argument("burn_in_fraction must be in [0, 1)");
  }
}

SlotResult schedule_slot(const QueueState& state, const ChannelSet& cs,
                         const QueueSimConfig& cfg,
                         const std::vector<double>& arrivals) {
  const int k_users = cfg.dims.users;
  SlotResult out;
  out.rates.assign(k_users, 0.0);
  const double qtotal = state.total();
  if (qtotal > 0.0) {
    const double p = std::pow(10.0, cfg.p_db / 10.0);
    WeightVector mu;
    mu.mu.resize(k_users);
    for (int k = 0; k < k_users; ++k) mu.mu[k] = state.q[k] / qtotal;
    if (cfg.policy == QueuePolicy::exact) {
      const WeightedSolveResult sol = weighted_sum_rate_dpc_exact(cs, mu, p);
      out.rates = sol.user_rates;
    } else {
      // Proportional powers; larger queue decoded last in the dual MAC.
      std::vector<int> order(k_users);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return state.q[a] > state.q[b];
      });
      std::vector<double> powers(k_users);
      for (int k = 0; k < k_users; ++k) powers[k] = mu.mu[k] * p;
      out.rates = dual_mac_user_rates(cs, order, powers);
    }
  }
  out.next.slot = state.slot + 1;
  out.next.q.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    out.next.q[k] = std::max(state.q[k] - out.rates[k], 0.0) + arrivals[k];
  }
  return out;
}

QueueSimResult run_queue_sim(const QueueSimConfig& cfg, bool keep_trace) {
  cfg.validate();
  const int k_users = cfg.dims.users;
  const SnrProfile profile = SnrProfile::symmetric(k_users);

  RngStream channel_rng = RngStream::child(cfg.seed, 0);
  RngStream arrival_rng = RngStream::child(cfg.seed, 1);
  ChannelSet fixed_cs;
  if (cfg.channel_law == ChannelLaw::fixed) {
    fixed_cs = sample_channel(cfg.dims, profile, channel_rng);
  }

  QueueState state;
  state.q.assign(k_users, 0.0);

  QueueSimResult result;
  result.time_avg_queue.assign(k_users, 0.0);
  const std::int64_t burn_in =
      static_cast<std::int64_t>(cfg.burn_in_fraction * cfg.slots);
  std::int64_t counted = 0;
  double early_total = 0.0, late_total = 0.0;
  std::int64_t early_n = 0, late_n = 0;

  for (std::int64_t t = 0; t < cfg.slots; ++t) {
    const ChannelSet& cs = cfg.channel_law == ChannelLaw::fixed
                               ? fixed_cs
                               : (fixed_cs = sample_channel(cfg.dims, profile,
                                                            channel_rng));
    std::vector<double> arrivals(k_users);
    for (int k = 0; k < k_users; ++k) {
      arrivals[k] = cfg.arrival_law == ArrivalLaw::poisson
                        ? static_cast<double>(
                              arrival_rng.poisson(cfg.arrival_rates[k]))
                        : cfg.arrival_rates[k];
    }
    SlotResult slot = schedule_slot(state, cs, cfg, arrivals);
    state = std::move(slot.next);

    if (t >= burn_in) {
      for (int k = 0; k < k_users; ++k) result.time_avg_queue[k] += state.q[k];
      ++counted;
    }
    // Drift probe: compare mean total queue over the two halves of the
    // post-burn-in window.
    if (t >= burn_in) {
      if (t < burn_in + (cfg.slots - burn_in) / 2) {
        early_total += state.total();
        ++early_n;
      } else {
        late_total += state.total();
        ++late_n;
      }
    }
    if (keep_trace) {
      SlotRecord rec;
      rec.slot = t;
      rec.queues = state.q;
      rec.rates = slot.rates;
      result.trace.push_back(std::move(rec));
    }
  }

  for (double& v : result.time_avg_queue) v /= std::max<std::int64_t>(counted, 1);
  result.time_avg_total = std::accumulate(result.time_avg_queue.begin(),
                                          result.time_avg_queue.end(), 0.0);
  if (early_n > 0 && late_n > 0) {
    const double early_mean = early_total / early_n;
    const double late_mean = late_total / late_n;
    result.drift_detected =
        late_mean > 2.0 * early_mean + 10.0 * *std::max_element(
            cfg.arrival_rates.begin(), cfg.arrival_rates.end());
  }
  return result;
}

}  // namespace mimobc
