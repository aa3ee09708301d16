/**
 * @file offsets.hpp
 * @brief Closed-form expected rate offsets (bps/Hz) and power offsets (dB)
 * between DPC and linear precoding in iid Rayleigh fading.
 *
 * Everything here reduces to digamma sums at positive integers, so every
 * offset is also exposed as an exact rational harmonic combination for
 * tolerance-free identity checks.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mimobc/channel.hpp"

namespace mimobc {

enum class OffsetSource { closed_form, monte_carlo };

struct OffsetReport {
  double beta_bps_hz = 0.0;
  double delta_db = 0.0;  // 3 * beta / (KN)
  OffsetSource source = OffsetSource::closed_form;
  SystemDims dims;
  double stderr_bps_hz = 0.0;  // monte_carlo only
};

/// Exact fraction on 128-bit terms; harmonic denominators for KN <= 24
/// (antenna counts up to 72) reach ~1e21, well past 64 bits.
struct Rational {
  __int128 num = 0;
  __int128 den = 1;

  Rational() = default;
  Rational(__int128 n, __int128 d);
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  bool operator==(const Rational& o) const {
    return num == o.num && den == o.den;
  }
  double value() const { return static_cast<double>(num) / den; }
};

/// Digamma at a positive integer: psi(1) + sum_{l<m} 1/l, in nats.
double digamma_int(int m);
/// The harmonic part sum_{l=1}^{m-1} 1/l as an exact fraction.
Rational harmonic(int m);

/// E[log_e |W|] for an m x m complex Wishart matrix with n >= m d.o.f.
double wishart_logdet_mean(int m, int n);

/// DPC-ZF expected rate loss: log2(e) * sum_{j=1}^{KN-1} j/(M-j).
OffsetReport beta_dpc_zf(int m, int k, int n);
Rational beta_dpc_zf_rational(int m, int k, int n);  // nats / log(e) factor

/// Large-M approximation M*log2(M) for the M = KN case.
double beta_dpc_zf_big_m(int m);
/// Exact harmonic sum S_M in nats for the M = KN case.
double s_m_nats(int m);

/// Asymptotic ZF power penalty for M = alpha*KN, KN -> infinity.
double delta_dpc_zf_asymptotic(double alpha);

/// DPC-BD expected rate loss (Rayleigh fading).
OffsetReport beta_dpc_bd(int m, int k, int n);
Rational beta_dpc_bd_rational(int m, int k, int n);

/// BD gain over ZF for M = alpha*KN; equals beta_dpc_zf - beta_dpc_bd.
OffsetReport beta_bd_zf(int m, int k, int n);
Rational beta_bd_zf_rational(int m, int k, int n);

/// Weighted DPC-ZF offset (N=1), weights descending: log2(e) sum mu_k zeta_k.
OffsetReport weighted_beta_dpc_zf(const std::vector<double>& mu, int m, int k);

struct UnequalSnrInvarianceReport {
  OffsetReport closed_form_zf;
  OffsetReport closed_form_bd;
  OffsetReport monte_carlo_zf;
  OffsetReport monte_carlo_bd;
  bool zf_within_3se = false;
  bool bd_within_3se = false;
};

/// Monte Carlo check that DPC-ZF / DPC-BD offsets ignore the SNR profile.
UnequalSnrInvarianceReport offsets_unequal_snr_invariance(
    const SystemDims& dims, const SnrProfile& profile, int trials,
    double p_linear, std::uint64_t seed);

}  // namespace mimobc
