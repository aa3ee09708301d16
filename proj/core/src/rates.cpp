#include "mimobc/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mimobc/offsets.hpp"

namespace mimobc {

namespace {

constexpr double kLog2E = 1.4426950408889634;

double log2_1p(double x) { return std::log1p(x) * kLog2E; }

/// Project x onto { y >= 0, sum(y) <= budget }.
std::vector<double> project_capped_simplex(std::vector<double> x,
                                           double budget) {
  double pos_sum = 0.0;
  for (double& v : x) {
    if (v < 0.0) v = 0.0;
    pos_sum += v;
  }
  if (pos_sum <= budget) return x;
  // Find tau with sum max(x - tau, 0) = budget.
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cum = 0.0;
  double tau = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cum += sorted[i];
    const double t = (cum - budget) / static_cast<double>(i + 1);
    if (i + 1 == sorted.size() || t >= sorted[i + 1]) {
      tau = t;
      break;
    }
  }
  for (double& v : x) v = std::max(v - tau, 0.0);
  return x;
}

std::vector<int> descending_weight_order(const std::vector<double>& mu) {
  std::vector<int> order(mu.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return mu[a] > mu[b]; });
  return order;
}

struct SortedWeighted {
  std::vector<RowVector> h;      // rows in descending-weight order
  std::vector<double> ws;        // sorted weights
  std::vector<double> coeff;     // mu_k - mu_{k+1} over the sorted order
  std::vector<int> order;        // order[i] = original user index
  int m = 0;
};

std::vector<double> normalized_weights(const WeightVector& mu) {
  std::vector<double> w = mu.mu;
  double sum = 0.0;
  for (double v : w) {
    if (v < 0.0) throw std::invalid_argument("weights must be nonnegative");
    sum += v;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("weights must not all be zero");
  for (double& v : w) v /= sum;
  return w;
}

SortedWeighted build_sorted_weighted(const ChannelSet& cs,
                                     const WeightVector& mu) {
  if (cs.dims.rx_antennas != 1) {
    throw std::invalid_argument(
        "scalar dual-MAC path requires single-antenna receivers");
  }
  const std::vector<double> w = normalized_weights(mu);
  SortedWeighted sw;
  sw.order = descending_weight_order(w);
  sw.m = cs.dims.tx_antennas;
  const int k_users = cs.dims.users;
  sw.h.resize(k_users);
  sw.ws.resize(k_users);
  sw.coeff.resize(k_users);
  for (int i = 0; i < k_users; ++i) {
    sw.h[i] = cs.row(sw.order[i], 0);
    sw.ws[i] = w[sw.order[i]];
  }
  // Concave reformulation: sum_k (mu_k - mu_{k+1}) log2|A^(k)|.
  for (int i = 0; i < k_users; ++i) {
    sw.coeff[i] = sw.ws[i] - (i + 1 < k_users ? sw.ws[i + 1] : 0.0);
  }
  return sw;
}

double sorted_objective(const SortedWeighted& sw,
                        const std::vector<double>& pw) {
  Matrix a = Matrix::Identity(sw.m, sw.m);
  double val = 0.0;
  for (std::size_t i = 0; i < sw.h.size(); ++i) {
    a += pw[i] * (sw.h[i].adjoint() * sw.h[i]);
    if (sw.coeff[i] != 0.0) val += sw.coeff[i] * logdet2(a);
  }
  return val;
}

std::vector<double> sorted_gradient(const SortedWeighted& sw,
                                    const std::vector<double>& pw) {
  const int k_users = static_cast<int>(sw.h.size());
  std::vector<double> g(k_users, 0.0);
  Matrix a = Matrix::Identity(sw.m, sw.m);
  for (int i = 0; i < k_users; ++i) {
    a += pw[i] * (sw.h[i].adjoint() * sw.h[i]);
    if (sw.coeff[i] == 0.0) continue;
    const Matrix ainv = a.inverse();
    for (int j = 0; j <= i; ++j) {
      g[j] += sw.coeff[i] * kLog2E *
              std::real((sw.h[j] * ainv * sw.h[j].adjoint())(0, 0));
    }
  }
  return g;
}

std::vector<double> reorder_to_sorted(const SortedWeighted& sw,
                                      const std::vector<double>& powers) {
  if (powers.size() != sw.order.size()) {
    throw std::invalid_argument("one power per user expected");
  }
  std::vector<double> pw(powers.size());
  for (std::size_t i = 0; i < powers.size(); ++i) pw[i] = powers[sw.order[i]];
  return pw;
}

}  // namespace

double PowerAllocation::total() const {
  return std::accumulate(per_stream.begin(), per_stream.end(), 0.0);
}

void PowerAllocation::validate() const {
  for (double p : per_stream) {
    if (p < 0.0) throw std::invalid_argument("negative stream power");
  }
  if (total() > budget * (1.0 + 1e-9) + 1e-12) {
    throw std::invalid_argument("power allocation exceeds budget");
  }
}

void WeightVector::validate() const {
  double sum = 0.0;
  for (double v : mu) {
    if (v < 0.0) throw std::invalid_argument("weights must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("weights must sum to 1");
  }
}

double dpc_sum_rate_uniform(const ChannelSet& cs, double p) {
  if (!(p > 0.0)) throw std::domain_error("power must be positive");
  const Matrix h = concatenate(cs);
  const int kn = static_cast<int>(h.rows());
  const Matrix gram = Matrix::Identity(kn, kn) +
                      (p / kn) * (h * h.adjoint());
  return logdet2(gram);
}

SolveResult dpc_sum_rate_exact(const ChannelSet& cs, double p,
                               const SolverOptions& opts) {
  if (!(p > 0.0)) throw std::domain_error("power must be positive");
  const int m = cs.dims.tx_antennas;
  const int k_users = cs.dims.users;
  const int n = cs.dims.rx_antennas;
  const int kn = cs.dims.aggregate_rx();

  std::vector<Matrix> q(k_users, (p / kn) * Matrix::Identity(n, n));

  auto objective = [&](const std::vector<Matrix>& qs) {
    Matrix z = Matrix::Identity(m, m);
    for (int k = 0; k < k_users; ++k) {
      z += cs.per_user[k].adjoint() * qs[k] * cs.per_user[k];
    }
    return logdet2(z);
  };

  auto project = [&](std::vector<Matrix> qs) {
    // Euclidean projection onto { Q_k psd, sum tr(Q_k) <= P }: clip the
    // eigenvalues of each block jointly against the capped simplex.
    std::vector<Eigen::SelfAdjointEigenSolver<Matrix>> eig;
    std::vector<double> lambda;
    for (int k = 0; k < k_users; ++k) {
      qs[k] = 0.5 * (qs[k] + qs[k].adjoint().eval());
      eig.emplace_back(qs[k]);
      for (int i = 0; i < n; ++i) lambda.push_back(eig[k].eigenvalues()(i));
    }
    lambda = project_capped_simplex(std::move(lambda), p);
    for (int k = 0; k < k_users; ++k) {
      const Matrix& u = eig[k].eigenvectors();
      Matrix scaled = u;
      for (int i = 0; i < n; ++i) scaled.col(i) *= lambda[k * n + i];
      qs[k] = scaled * u.adjoint();
    }
    return qs;
  };

  SolveResult res;
  double value = objective(q);
  double step = p;
  for (int it = 0; it < opts.max_iter; ++it) {
    Matrix z = Matrix::Identity(m, m);
    for (int k = 0; k < k_users; ++k) {
      z += cs.per_user[k].adjoint() * q[k] * cs.per_user[k];
    }
    const Matrix zinv = z.inverse();
    std::vector<Matrix> grad(k_users);
    double grad_norm2 = 0.0;
    for (int k = 0; k < k_users; ++k) {
      grad[k] = kLog2E * (cs.per_user[k] * zinv * cs.per_user[k].adjoint());
      grad_norm2 += grad[k].squaredNorm();
    }

    bool advanced = false;
    for (int bt = 0; bt < 40; ++bt) {
      std::vector<Matrix> cand(k_users);
      for (int k = 0; k < k_users; ++k) cand[k] = q[k] + step * grad[k];
      cand = project(std::move(cand));
      const double cand_value = objective(cand);
      double inner = 0.0;
      for (int k = 0; k < k_users; ++k) {
        inner += ((cand[k] - q[k]).adjoint() * grad[k]).trace().real();
      }
      if (cand_value >= value + 1e-4 * inner || inner <= 0.0) {
        const double delta = cand_value - value;
        q = std::move(cand);
        value = cand_value;
        res.iterations = it + 1;
        advanced = true;
        if (std::abs(delta) < opts.tol * std::max(1.0, std::abs(value))) {
          res.value = value;
          return res;
        }
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!advanced || grad_norm2 == 0.0) break;
  }
  res.value = value;
  res.converged = false;
  return res;
}

PowerAllocation waterfill(const std::vector<double>& gains, double p) {
  if (gains.empty()) throw std::domain_error("waterfill: no channels");
  if (!(p > 0.0)) throw std::domain_error("waterfill: power must be positive");
  for (double g : gains) {
    if (!(g > 0.0)) throw std::domain_error("waterfill: gains must be positive");
  }
  const int n = static_cast<int>(gains.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return gains[a] > gains[b]; });

  double inv_sum = 0.0;
  double level = 0.0;
  int active = 0;
  for (int a = 1; a <= n; ++a) {
    inv_sum += 1.0 / gains[idx[a - 1]];
    const double candidate = (p + inv_sum) / a;
    // Stop once the water level no longer covers the next channel's floor.
    if (a == n || candidate <= 1.0 / gains[idx[a]]) {
      level = candidate;
      active = a;
      break;
    }
  }
  PowerAllocation alloc;
  alloc.budget = p;
  alloc.per_stream.assign(n, 0.0);
  for (int i = 0; i < active; ++i) {
    alloc.per_stream[idx[i]] = level - 1.0 / gains[idx[i]];
  }
  return alloc;
}

double zf_sum_rate(const ChannelSet& cs, double p, PowerPolicy policy) {
  const ZfResult zf = zf_effective_gains(cs);
  const int kn = cs.dims.aggregate_rx();
  double rate = 0.0;
  if (policy == PowerPolicy::uniform) {
    for (double g : zf.gains) rate += log2_1p((p / kn) * g);
  } else {
    const PowerAllocation alloc = waterfill(zf.gains, p);
    for (int i = 0; i < kn; ++i) {
      rate += log2_1p(alloc.per_stream[i] * zf.gains[i]);
    }
  }
  return rate;
}

double bd_sum_rate(const ChannelSet& cs, double p, PowerPolicy policy) {
  const BdResult bd = bd_effective_channels(cs);
  const int kn = cs.dims.aggregate_rx();
  const int n = cs.dims.rx_antennas;
  double rate = 0.0;
  if (policy == PowerPolicy::uniform) {
    for (const Matrix& gram : bd.gram) {
      rate += logdet2(Matrix::Identity(n, n) + (p / kn) * gram);
    }
  } else {
    // Waterfill across the pooled eigenmodes of all users' Gram matrices.
    std::vector<double> eigs;
    for (const Matrix& gram : bd.gram) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
      for (int i = 0; i < n; ++i) {
        eigs.push_back(std::max(es.eigenvalues()(i), 0.0));
      }
    }
    const PowerAllocation alloc = waterfill(eigs, p);
    for (std::size_t i = 0; i < eigs.size(); ++i) {
      rate += log2_1p(alloc.per_stream[i] * eigs[i]);
    }
  }
  return rate;
}

std::vector<double> dual_mac_user_rates(const ChannelSet& cs,
                                        const std::vector<int>& order,
                                        const std::vector<double>& powers) {
  if (cs.dims.rx_antennas != 1) {
    throw std::invalid_argument("dual_mac_user_rates: N must be 1");
  }
  const int m = cs.dims.tx_antennas;
  std::vector<double> rates(cs.dims.users, 0.0);
  Matrix a = Matrix::Identity(m, m);
  for (int user : order) {
    const RowVector h = cs.row(user, 0);
    const double quad =
        std::real((h * a.inverse() * h.adjoint())(0, 0));
    rates[user] = log2_1p(powers[user] * quad);
    a += powers[user] * (h.adjoint() * h);
  }
  return rates;
}

double weighted_dual_mac_objective(const ChannelSet& cs,
                                   const WeightVector& mu,
                                   const std::vector<double>& powers) {
  const SortedWeighted sw = build_sorted_weighted(cs, mu);
  return sorted_objective(sw, reorder_to_sorted(sw, powers));
}

std::vector<double> weighted_dual_mac_gradient(
    const ChannelSet& cs, const WeightVector& mu,
    const std::vector<double>& powers) {
  const SortedWeighted sw = build_sorted_weighted(cs, mu);
  const std::vector<double> g = sorted_gradient(sw, reorder_to_sorted(sw, powers));
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[sw.order[i]] = g[i];
  return out;
}

WeightedSolveResult weighted_sum_rate_dpc_exact(const ChannelSet& cs,
                                                const WeightVector& mu,
                                                double p,
                                                const SolverOptions& opts) {
  if (!(p > 0.0)) throw std::domain_error("power must be positive");
  const SortedWeighted sw = build_sorted_weighted(cs, mu);
  const int k_users = cs.dims.users;

  std::vector<double> pw(k_users);
  for (int i = 0; i < k_users; ++i) pw[i] = sw.ws[i] * p;
  double value = sorted_objective(sw, pw);

  WeightedSolveResult res;
  res.order = sw.order;
  double step = p;
  bool converged = false;
  for (int it = 0; it < opts.max_iter && !converged; ++it) {
    const std::vector<double> g = sorted_gradient(sw, pw);
    bool advanced = false;
    for (int bt = 0; bt < 40; ++bt) {
      std::vector<double> cand(k_users);
      for (int i = 0; i < k_users; ++i) cand[i] = pw[i] + step * g[i];
      cand = project_capped_simplex(std::move(cand), p);
      const double cand_value = sorted_objective(sw, cand);
      double inner = 0.0;
      for (int i = 0; i < k_users; ++i) inner += (cand[i] - pw[i]) * g[i];
      if (cand_value >= value + 1e-4 * inner || inner <= 0.0) {
        const double delta = cand_value - value;
        pw = std::move(cand);
        value = cand_value;
        if (std::abs(delta) < opts.tol * std::max(1.0, std::abs(value))) {
          converged = true;
        }
        step *= 2.0;
        advanced = true;
        break;
      }
      step *= 0.5;
    }
    if (!advanced) break;
  }

  res.converged = converged;
  res.value = value;
  res.powers.assign(k_users, 0.0);
  for (int i = 0; i < k_users; ++i) res.powers[sw.order[i]] = pw[i];
  res.user_rates = dual_mac_user_rates(cs, sw.order, res.powers);
  return res;
}

double weighted_sum_rate_approx(const ChannelSet& cs, const WeightVector& mu,
                                double p, Scheme scheme) {
  const std::vector<double> w = normalized_weights(mu);
  const std::vector<int> order = descending_weight_order(w);
  const int n = cs.dims.rx_antennas;
  double rate = 0.0;
  switch (scheme) {
    case Scheme::ZFDPC: {
      const ZfDpcResult dpc = zfdpc_successive_projection(cs, order);
      for (int i = 0; i < cs.dims.users; ++i) {
        const double wk = w[order[i]];
        if (wk == 0.0) continue;
        if (n == 1) {
          rate += wk * log2_1p(wk * p * dpc.norms[i]);
        } else {
          const Matrix& fk = dpc.effective[i];
          rate += wk * logdet2(Matrix::Identity(n, n) +
                               (wk * p / n) * (fk * fk.adjoint()));
        }
      }
      break;
    }
    case Scheme::ZF: {
      const ZfResult zf = zf_effective_gains(cs);
      for (int k = 0; k < cs.dims.users; ++k) {
        const double wk = w[k];
        if (wk == 0.0) continue;
        double user_rate = 0.0;
        for (int s = 0; s < n; ++s) {
          user_rate += log2_1p((wk * p / n) * zf.gains[k * n + s]);
        }
        rate += wk * user_rate;
      }
      break;
    }
    case Scheme::BD: {
      const BdResult bd = bd_effective_channels(cs);
      for (int k = 0; k < cs.dims.users; ++k) {
        const double wk = w[k];
        if (wk == 0.0) continue;
        rate += wk * logdet2(Matrix::Identity(n, n) +
                             (wk * p / n) * bd.gram[k]);
      }
      break;
    }
  }
  return rate;
}

PowerAllocation weighted_parallel_kkt(const std::vector<double>& norms,
                                      const WeightVector& mu, double p) {
  const std::vector<double> w = normalized_weights(mu);
  if (norms.size() != w.size()) {
    throw std::invalid_argument("weighted_parallel_kkt: size mismatch");
  }
  const int k = static_cast<int>(norms.size());
  std::vector<bool> active(k, true);
  PowerAllocation alloc;
  alloc.budget = p;
  alloc.per_stream.assign(k, 0.0);
  // Active-set reduction: drop users whose KKT power goes negative.
  for (int pass = 0; pass < k; ++pass) {
    double mu_sum = 0.0, inv_sum = 0.0;
    for (int i = 0; i < k; ++i) {
      if (!active[i]) continue;
      mu_sum += w[i];
      inv_sum += 1.0 / norms[i];
    }
    if (mu_sum == 0.0) break;
    const double nu = mu_sum / (p + inv_sum);
    bool ok = true;
    for (int i = 0; i < k; ++i) {
      if (!active[i]) continue;
      const double pi = w[i] / nu - 1.0 / norms[i];
      if (pi < 0.0) {
        active[i] = false;
        ok = false;
      }
      alloc.per_stream[i] = std::max(pi, 0.0);
    }
    if (ok) break;
    std::fill(alloc.per_stream.begin(), alloc.per_stream.end(), 0.0);
  }
  return alloc;
}

AffineApprox affine_approx_closed_form(RateScheme scheme,
                                       const SystemDims& dims) {
  if (!dims.fully_loaded_or_under()) {
    throw std::domain_error("affine approximation requires M >= KN");
  }
  const int kn = dims.aggregate_rx();
  const int m = dims.tx_antennas;
  AffineApprox out;
  out.s_inf = kn;
  double l = std::log2(static_cast<double>(kn)) -
             (kLog2E / kn) * wishart_logdet_mean(kn, m);
  if (scheme == RateScheme::ZF) {
    l += beta_dpc_zf(m, dims.users, dims.rx_antennas).beta_bps_hz / kn;
  } else if (scheme == RateScheme::BD) {
    l += beta_dpc_bd(m, dims.users, dims.rx_antennas).beta_bps_hz / kn;
  }
  out.l_inf = l;
  return out;
}

AffineApprox affine_approx_numeric(RateScheme scheme, const SystemDims& dims,
                                   const AffineApproxNumericOptions& opts) {
  if (!(opts.p2_db > opts.p1_db)) {
    throw std::domain_error("affine_approx_numeric: need P2 > P1");
  }
  const SnrProfile profile = SnrProfile::symmetric(dims.users);
  const double p1 = std::pow(10.0, opts.p1_db / 10.0);
  const double p2 = std::pow(10.0, opts.p2_db / 10.0);
  double c1 = 0.0, c2 = 0.0;
  for (int t = 0; t < opts.trials; ++t) {
    RngStream rng = RngStream::child(opts.seed, t);
    const ChannelSet cs = sample_channel(dims, profile, rng);
    switch (scheme) {
      case RateScheme::DPC:
        c1 += dpc_sum_rate_uniform(cs, p1);
        c2 += dpc_sum_rate_uniform(cs, p2);
        break;
      case RateScheme::ZF:
        c1 += zf_sum_rate(cs, p1, PowerPolicy::uniform);
        c2 += zf_sum_rate(cs, p2, PowerPolicy::uniform);
        break;
      case RateScheme::BD:
        c1 += bd_sum_rate(cs, p1, PowerPolicy::uniform);
        c2 += bd_sum_rate(cs, p2, PowerPolicy::uniform);
        break;
    }
  }
  c1 /= opts.trials;
  c2 /= opts.trials;
  AffineApprox out;
  out.s_inf = (c2 - c1) / (std::log2(p2) - std::log2(p1));
  out.l_inf = std::log2(p2) - c2 / out.s_inf;
  return out;
}

std::vector<double> overloaded_heuristic_powers(const WeightVector& mu,
                                                double p, int m,
                                                OverloadedStrategy strategy) {
  const std::vector<double> w = normalized_weights(mu);
  const int k = static_cast<int>(w.size());
  std::vector<double> powers(k, 0.0);
  if (strategy == OverloadedStrategy::all_users || k <= m) {
    for (int i = 0; i < k; ++i) powers[i] = w[i] * p;
    return powers;
  }
  const std::vector<int> order = descending_weight_order(w);
  double top_sum = 0.0;
  for (int i = 0; i < m; ++i) top_sum += w[order[i]];
  for (int i = 0; i < m; ++i) powers[order[i]] = w[order[i]] / top_sum * p;
  return powers;
}

double weighted_overloaded_heuristic(const ChannelSet& cs,
                                     const WeightVector& mu, double p,
                                     OverloadedStrategy strategy) {
  if (cs.dims.rx_antennas != 1) {
    throw std::invalid_argument("overloaded heuristics require N = 1");
  }
  const std::vector<double> w = normalized_weights(mu);
  const std::vector<double> powers =
      overloaded_heuristic_powers(mu, p, cs.dims.tx_antennas, strategy);
  const std::vector<int> order = descending_weight_order(w);
  const std::vector<double> rates = dual_mac_user_rates(cs, order, powers);
  double value = 0.0;
  for (int k = 0; k < cs.dims.users; ++k) value += w[k] * rates[k];
  return value;
}

}  // namespace mimobc
