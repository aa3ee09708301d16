/**
 * @file rates.hpp
 * @brief Exact and high-SNR-asymptotic (weighted) sum rates for DPC, ZF,
 * and BD under uniform, waterfilled, proportional, and optimized power
 * policies. All rates are bps/Hz, base-2 logs.
 */
#pragma once

#include <optional>
#include <vector>

#include "mimobc/precoding.hpp"

namespace mimobc {

struct PowerAllocation {
  std::vector<double> per_stream;  // linear scale, >= 0
  double budget = 0.0;

  double total() const;
  void validate() const;
};

struct WeightVector {
  std::vector<double> mu;  // nonnegative, sums to 1

  void validate() const;
  static WeightVector equal(int users) {
    return WeightVector{std::vector<double>(users, 1.0 / users)};
  }
};

struct AffineApprox {
  double s_inf = 0.0;  // multiplexing gain, bps/Hz per 3 dB
  double l_inf = 0.0;  // power offset, 3 dB units
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 5000;
};

struct SolveResult {
  double value = 0.0;  // bps/Hz
  bool converged = true;
  int iterations = 0;
};

struct WeightedSolveResult {
  double value = 0.0;              // weighted sum rate, bps/Hz
  std::vector<double> powers;      // dual-MAC powers, original user indexing
  std::vector<double> user_rates;  // unweighted per-user rates, original indexing
  std::vector<int> order;          // users sorted by descending weight
  bool converged = true;
};

enum class PowerPolicy { uniform, waterfill };
enum class OverloadedStrategy { all_users, top_m };

/// log2|I + (P/KN) H^H H| -- sum capacity with uniform dual-MAC covariances.
double dpc_sum_rate_uniform(const ChannelSet& cs, double p);

/// Sum capacity via projected gradient over dual-MAC covariances Q_k.
SolveResult dpc_sum_rate_exact(const ChannelSet& cs, double p,
                               const SolverOptions& opts = {});

/// KKT waterfilling over parallel scalar channels.
PowerAllocation waterfill(const std::vector<double>& gains, double p);

double zf_sum_rate(const ChannelSet& cs, double p, PowerPolicy policy);
double bd_sum_rate(const ChannelSet& cs, double p, PowerPolicy policy);

/// Exact weighted sum rate over the dual MAC (N=1). Unsorted or
/// unnormalized weights are normalized and sorted internally; the applied
/// permutation is reported in `order`.
WeightedSolveResult weighted_sum_rate_dpc_exact(const ChannelSet& cs,
                                                const WeightVector& mu,
                                                double p,
                                                const SolverOptions& opts = {});

/// Weighted rate under the proportional policy P_k = mu_k P
/// (Q_k = mu_k P / N * I when N > 1), per scheme.
double weighted_sum_rate_approx(const ChannelSet& cs, const WeightVector& mu,
                                double p, Scheme scheme);

/// Closed-form KKT powers for max sum mu_k log(1 + P_k n_k); falls back to
/// an active-set reduction when the budget is too small for all users.
PowerAllocation weighted_parallel_kkt(const std::vector<double>& norms,
                                      const WeightVector& mu, double p);

/// Per-user rates of the exact dual-MAC objective at fixed powers, users
/// decoded in descending-weight order (N=1).
std::vector<double> dual_mac_user_rates(const ChannelSet& cs,
                                        const std::vector<int>& order,
                                        const std::vector<double>& powers);

/// Weighted dual-MAC objective sum_k mu_k R_k at fixed powers (original
/// user indexing), and its analytic gradient. These back the exact solver
/// and are exposed for finite-difference verification.
double weighted_dual_mac_objective(const ChannelSet& cs,
                                   const WeightVector& mu,
                                   const std::vector<double>& powers);
std::vector<double> weighted_dual_mac_gradient(const ChannelSet& cs,
                                               const WeightVector& mu,
                                               const std::vector<double>& powers);

enum class RateScheme { DPC, ZF, BD };

struct AffineApproxNumericOptions {
  double p1_db = 30.0;
  double p2_db = 50.0;
  int trials = 2000;
  std::uint64_t seed = 1;
};

AffineApprox affine_approx_closed_form(RateScheme scheme,
                                       const SystemDims& dims);
AffineApprox affine_approx_numeric(RateScheme scheme, const SystemDims& dims,
                                   const AffineApproxNumericOptions& opts);

/// Overloaded (K > M possible, N=1) proportional-power heuristics evaluated
/// on the exact dual-MAC objective.
double weighted_overloaded_heuristic(const ChannelSet& cs,
                                     const WeightVector& mu, double p,
                                     OverloadedStrategy strategy);

/// Heuristic powers only (original user indexing), for inspection.
std::vector<double> overloaded_heuristic_powers(const WeightVector& mu,
                                                double p, int m,
                                                OverloadedStrategy strategy);

}  // namespace mimobc
