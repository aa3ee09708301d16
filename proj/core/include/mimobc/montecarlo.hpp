/**
 * @file montecarlo.hpp
 * @brief Seeded, trial-parallel harness for ergodic rate curves and offset
 * estimates. Trial i always uses the child stream (seed, i), so results are
 * identical for any worker count.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mimobc/offsets.hpp"
#include "mimobc/rates.hpp"

namespace mimobc {

enum class CurveScheme {
  DPC_exact,
  DPC_uniform,
  ZF_uniform,
  ZF_waterfill,
  BD_uniform,
  BD_waterfill,
};

std::string to_string(CurveScheme s);

struct ExperimentSpec {
  SystemDims dims;
  SnrProfile profile;
  std::vector<double> snr_grid_db;
  std::vector<CurveScheme> schemes;
  int trials = 1;
  std::uint64_t seed = 0;
  std::optional<WeightVector> weights;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct SummaryStats {
  double mean = 0.0;
  double stderr_ = 0.0;
  int trials = 0;
};

struct CurveCell {
  double snr_db = 0.0;
  CurveScheme scheme;
  SummaryStats stats;
  bool ok = true;           // false: scheme infeasible for these dims
  std::string error;
};

std::vector<CurveCell> run_rate_curve(const ExperimentSpec& spec);

enum class OffsetPair { DPC_ZF, DPC_BD, BD_ZF };

OffsetReport run_offset_estimate(const SystemDims& dims,
                                 const SnrProfile& profile, double p_db,
                                 int trials, std::uint64_t seed,
                                 OffsetPair pair, int threads = 0);

struct PowerConvergenceCell {
  double snr_db = 0.0;
  std::string scheme;  // "DPC" or "ZF"
  SummaryStats gap;    // mean(exact - uniform)
};

std::vector<PowerConvergenceCell> run_power_convergence(
    const SystemDims& dims, const SnrProfile& profile,
    const std::vector<double>& snr_grid_db, int trials, std::uint64_t seed,
    int threads = 0);

}  // namespace mimobc
