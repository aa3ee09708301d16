#include "mimobc/montecarlo.hpp"

#include <array>
#include <cmath>
#include <thread>

namespace mimobc {

namespace {

/// Deterministic map over trial indices: every trial writes its own slot,
/// reduction happens afterwards in index order.
template <typename Fn>
void parallel_trials(int trials, int threads, Fn&& fn) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, trials);
  if (threads <= 1) {
    for (int t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (int t = w; t < trials; t += threads) fn(t);
    });
  }
  for (auto& th : pool) th.join();
}

SummaryStats summarize(const std::vector<double>& values) {
  SummaryStats s;
  s.trials = static_cast<int>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.trials;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  const double var = s.trials > 1 ? sq / (s.trials - 1) : 0.0;
  s.stderr_ = std::sqrt(var / s.trials);
  return s;
}

double evaluate_scheme(CurveScheme scheme, const ChannelSet& cs, double p) {
  switch (scheme) {
    case CurveScheme::DPC_exact:
      return dpc_sum_rate_exact(cs, p).value;
    case CurveScheme::DPC_uniform:
      return dpc_sum_rate_uniform(cs, p);
    case CurveScheme::ZF_uniform:
      return zf_sum_rate(cs, p, PowerPolicy::uniform);
    case CurveScheme::ZF_waterfill:
      return zf_sum_rate(cs, p, PowerPolicy::waterfill);
    case CurveScheme::BD_uniform:
      return bd_sum_rate(cs, p, PowerPolicy::uniform);
    case CurveScheme::BD_waterfill:
      return bd_sum_rate(cs, p, PowerPolicy::waterfill);
  }
  throw std::logic_error("unknown scheme");
}

}  // namespace

std::string to_string(CurveScheme s) {
  switch (s) {
    case CurveScheme::DPC_exact: return "DPC_exact";
    case CurveScheme::DPC_uniform: return "DPC_uniform";
    case CurveScheme::ZF_uniform: return "ZF_uniform";
    case CurveScheme::ZF_waterfill: return "ZF_waterfill";
    case CurveScheme::BD_uniform: return "BD_uniform";
    case CurveScheme::BD_waterfill: return "BD_waterfill";
  }
  return "?";
}

void ExperimentSpec::validate() const {
  dims.validate();
  profile.validate(dims.users);
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  for (std::size_t i = 1; i < snr_grid_db.size(); ++i) {
    if (snr_grid_db[i] <= snr_grid_db[i - 1]) {
      throw std::invalid_argument("snr grid must be strictly increasing");
    }
  }
}

std::vector<CurveCell> run_rate_curve(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t n_schemes = spec.schemes.size();
  // values[trial][snr * n_schemes + scheme]
  std::vector<std::vector<double>> values(
      spec.trials,
      std::vector<double>(spec.snr_grid_db.size() * n_schemes, 0.0));
  std::vector<bool> feasible(n_schemes, true);
  std::vector<std::string> errors(n_schemes);

  // Infeasibility is dimension-driven, so probe once up front.
  for (std::size_t s = 0; s < n_schemes; ++s) {
    if (spec.schemes[s] != CurveScheme::DPC_exact &&
        spec.schemes[s] != CurveScheme::DPC_uniform &&
        !spec.dims.fully_loaded_or_under()) {
      feasible[s] = false;
      errors[s] = "infeasible: M < KN";
    }
  }

  parallel_trials(spec.trials, spec.threads, [&](int t) {
    RngStream rng = RngStream::child(spec.seed, t);
    const ChannelSet cs = sample_channel(spec.dims, spec.profile, rng);
    for (std::size_t i = 0; i < spec.snr_grid_db.size(); ++i) {
      const double p = std::pow(10.0, spec.snr_grid_db[i] / 10.0);
      for (std::size_t s = 0; s < n_schemes; ++s) {
        if (!feasible[s]) continue;
        values[t][i * n_schemes + s] = evaluate_scheme(spec.schemes[s], cs, p);
      }
    }
  });

  std::vector<CurveCell> table;
  std::vector<double> column(spec.trials);
  for (std::size_t i = 0; i < spec.snr_grid_db.size(); ++i) {
    for (std::size_t s = 0; s < n_schemes; ++s) {
      CurveCell cell;
      cell.snr_db = spec.snr_grid_db[i];
      cell.scheme = spec.schemes[s];
      if (!feasible[s]) {
        cell.ok = false;
        cell.error = errors[s];
      } else {
        for (int t = 0; t < spec.trials; ++t) {
          column[t] = values[t][i * n_schemes + s];
        }
        cell.stats = summarize(column);
      }
      table.push_back(std::move(cell));
    }
  }
  return table;
}

OffsetReport run_offset_estimate(const SystemDims& dims,
                                 const SnrProfile& profile, double p_db,
                                 int trials, std::uint64_t seed,
                                 OffsetPair pair, int threads) {
  dims.validate();
  profile.validate(dims.users);
  if (!dims.fully_loaded_or_under()) {
    throw std::domain_error("offset estimation requires M >= KN");
  }
  const double p = std::pow(10.0, p_db / 10.0);
  std::vector<double> diffs(trials, 0.0);
  parallel_trials(trials, threads, [&](int t) {
    RngStream rng = RngStream::child(seed, t);
    const ChannelSet cs = sample_channel(dims, profile, rng);
    // Paired per-realization differencing of uniform-policy rates.
    double a = 0.0, b = 0.0;
    switch (pair) {
      case OffsetPair::DPC_ZF:
        a = dpc_sum_rate_uniform(cs, p);
        b = zf_sum_rate(cs, p, PowerPolicy::uniform);
        break;
      case OffsetPair::DPC_BD:
        a = dpc_sum_rate_uniform(cs, p);
        b = bd_sum_rate(cs, p, PowerPolicy::uniform);
        break;
      case OffsetPair::BD_ZF:
        a = bd_sum_rate(cs, p, PowerPolicy::uniform);
        b = zf_sum_rate(cs, p, PowerPolicy::uniform);
        break;
    }
    diffs[t] = a - b;
  });
  const SummaryStats stats = summarize(diffs);
  OffsetReport rep;
  rep.beta_bps_hz = stats.mean;
  rep.delta_db = 3.0 * stats.mean / dims.aggregate_rx();
  rep.stderr_bps_hz = stats.stderr_;
  rep.source = OffsetSource::monte_carlo;
  rep.dims = dims;
  return rep;
}

std::vector<PowerConvergenceCell> run_power_convergence(
    const SystemDims& dims, const SnrProfile& profile,
    const std::vector<double>& snr_grid_db, int trials, std::uint64_t seed,
    int threads) {
  dims.validate();
  profile.validate(dims.users);
  if (!dims.fully_loaded_or_under()) {
    throw std::domain_error("power convergence requires M >= KN");
  }
  // gaps[trial][snr][0=DPC,1=ZF]
  std::vector<std::vector<std::array<double, 2>>> gaps(
      trials, std::vector<std::array<double, 2>>(snr_grid_db.size()));
  parallel_trials(trials, threads, [&](int t) {
    RngStream rng = RngStream::child(seed, t);
    const ChannelSet cs = sample_channel(dims, profile, rng);
    for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
      const double p = std::pow(10.0, snr_grid_db[i] / 10.0);
      const double dpc_gap =
          dpc_sum_rate_exact(cs, p).value - dpc_sum_rate_uniform(cs, p);
      const double zf_gap = zf_sum_rate(cs, p, PowerPolicy::waterfill) -
                            zf_sum_rate(cs, p, PowerPolicy::uniform);
      gaps[t][i] = {dpc_gap, zf_gap};
    }
  });
  std::vector<PowerConvergenceCell> table;
  std::vector<double> column(trials);
  for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
    for (int which = 0; which < 2; ++which) {
      for (int t = 0; t < trials; ++t) column[t] = gaps[t][i][which];
      PowerConvergenceCell cell;
      cell.snr_db = snr_grid_db[i];
      cell.scheme = which == 0 ? "DPC" : "ZF";
      cell.gap = summarize(column);
      table.push_back(std::move(cell));
    }
  }
  return table;
}

}  // namespace mimobc
