#include "mimobc/offsets.hpp"

#include <cmath>
#include <numeric>

#include "mimobc/rates.hpp"

namespace mimobc {

namespace {

constexpr double kLog2E = 1.4426950408889634;
constexpr double kPsi1 = -0.57721566490153286;  // -Euler-Mascheroni

__int128 checked_mul(__int128 a, __int128 b) {
  __int128 r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::overflow_error("Rational: 128-bit overflow");
  }
  return r;
}

__int128 checked_add(__int128 a, __int128 b) {
  __int128 r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw std::overflow_error("Rational: 128-bit overflow");
  }
  return r;
}

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

void require_offset_dims(int m, int k, int n) {
  if (m < 1 || k < 1 || n < 1 || m < k * n) {
    throw std::domain_error("offsets require M >= KN >= 1");
  }
}

OffsetReport make_closed_form(double beta, int m, int k, int n) {
  OffsetReport rep;
  rep.beta_bps_hz = beta;
  rep.delta_db = 3.0 * beta / (k * n);
  rep.source = OffsetSource::closed_form;
  rep.dims = SystemDims{m, k, n};
  return rep;
}

}  // namespace

Rational::Rational(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const __int128 g = gcd128(n, d);
  num = g ? n / g : n;
  den = g ? d / g : d;
}

Rational Rational::operator+(const Rational& o) const {
  // Cancel the shared denominator factor first so the intermediates stay
  // near the magnitude of the reduced result.
  const __int128 g = gcd128(den, o.den);
  return Rational(checked_add(checked_mul(num, o.den / g),
                              checked_mul(o.num, den / g)),
                  checked_mul(den, o.den / g));
}

Rational Rational::operator-(const Rational& o) const {
  return *this + Rational(-o.num, o.den);
}

Rational Rational::operator*(const Rational& o) const {
  const Rational x(num, o.den);
  const Rational y(o.num, den);
  return Rational(checked_mul(x.num, y.num), checked_mul(x.den, y.den));
}

double digamma_int(int m) {
  if (m < 1) throw std::domain_error("digamma_int: m must be >= 1");
  // Compensated harmonic accumulation; exact recurrence, no series needed.
  double sum = 0.0, c = 0.0;
  for (int l = 1; l < m; ++l) {
    const double y = 1.0 / l - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return kPsi1 + sum;
}

Rational harmonic(int m) {
  if (m < 1) throw std::domain_error("harmonic: m must be >= 1");
  Rational h(0, 1);
  for (int l = 1; l < m; ++l) h = h + Rational(1, l);
  return h;
}

double wishart_logdet_mean(int m, int n) {
  if (m < 1 || n < m) {
    throw std::domain_error("wishart_logdet_mean requires n >= m >= 1");
  }
  double sum = 0.0;
  for (int l = 0; l < m; ++l) sum += digamma_int(n - l);
  return sum;
}

Rational beta_dpc_zf_rational(int m, int k, int n) {
  require_offset_dims(m, k, n);
  const int kn = k * n;
  Rational s(0, 1);
  for (int j = 1; j <= kn - 1; ++j) s = s + Rational(j, m - j);
  return s;
}

OffsetReport beta_dpc_zf(int m, int k, int n) {
  require_offset_dims(m, k, n);
  const int kn = k * n;
  double s = 0.0;
  for (int j = 1; j <= kn - 1; ++j) s += static_cast<double>(j) / (m - j);
  return make_closed_form(kLog2E * s, m, k, n);
}

double s_m_nats(int m) {
  if (m < 1) throw std::domain_error("s_m_nats: m must be >= 1");
  double sum = 0.0;
  for (int j = 1; j <= m - 1; ++j) {
    sum += static_cast<double>(j) / (m - j);
  }
  return sum;
}

double beta_dpc_zf_big_m(int m) {
  if (m < 2) throw std::domain_error("beta_dpc_zf_big_m: m must be >= 2");
  return m * std::log2(static_cast<double>(m));
}

double delta_dpc_zf_asymptotic(double alpha) {
  if (!(alpha > 1.0)) {
    throw std::domain_error("delta_dpc_zf_asymptotic requires alpha > 1");
  }
  return -3.0 * (kLog2E + alpha * std::log2(1.0 - 1.0 / alpha));
}

Rational beta_dpc_bd_rational(int m, int k, int n) {
  require_offset_dims(m, k, n);
  Rational s(0, 1);
  for (int kk = 0; kk <= k - 1; ++kk) {
    for (int nn = 0; nn <= n - 1; ++nn) {
      for (int i = kk * n + 1; i <= (k - 1) * n; ++i) {
        s = s + Rational(1, m - nn - i);
      }
    }
  }
  return s;
}

OffsetReport beta_dpc_bd(int m, int k, int n) {
  require_offset_dims(m, k, n);
  double s = 0.0;
  for (int kk = 0; kk <= k - 1; ++kk) {
    for (int nn = 0; nn <= n - 1; ++nn) {
      for (int i = kk * n + 1; i <= (k - 1) * n; ++i) {
        s += 1.0 / (m - nn - i);
      }
    }
  }
  return make_closed_form(kLog2E * s, m, k, n);
}

Rational beta_bd_zf_rational(int m, int k, int n) {
  require_offset_dims(m, k, n);
  if (m % (k * n) != 0) {
    throw std::domain_error("beta_bd_zf requires M = alpha * K * N");
  }
  const int alpha = m / (k * n);
  Rational s(0, 1);
  for (int j = 1; j <= n - 1; ++j) {
    s = s + Rational(static_cast<std::int64_t>(k) * (n - j),
                     static_cast<std::int64_t>(alpha - 1) * k * n + j);
  }
  return s;
}

OffsetReport beta_bd_zf(int m, int k, int n) {
  require_offset_dims(m, k, n);
  if (m % (k * n) != 0) {
    throw std::domain_error("beta_bd_zf requires M = alpha * K * N");
  }
  const int alpha = m / (k * n);
  double s = 0.0;
  for (int j = 1; j <= n - 1; ++j) {
    s += static_cast<double>(k) * (n - j) /
         (static_cast<double>(alpha - 1) * k * n + j);
  }
  return make_closed_form(kLog2E * s, m, k, n);
}

OffsetReport weighted_beta_dpc_zf(const std::vector<double>& mu, int m,
                                  int k) {
  require_offset_dims(m, k, 1);
  if (static_cast<int>(mu.size()) != k) {
    throw std::domain_error("weighted_beta_dpc_zf: weight count must be K");
  }
  for (int i = 1; i < k; ++i) {
    if (mu[i] > mu[i - 1] + 1e-12) {
      throw std::domain_error(
          "weighted_beta_dpc_zf: weights must be descending");
    }
  }
  double beta = 0.0;
  for (int user = 1; user <= k; ++user) {
    double zeta = 0.0;
    for (int j = m - k + 1; j <= m - user; ++j) zeta += 1.0 / j;
    beta += mu[user - 1] * zeta;
  }
  return make_closed_form(kLog2E * beta, m, k, 1);
}

UnequalSnrInvarianceReport offsets_unequal_snr_invariance(
    const SystemDims& dims, const SnrProfile& profile, int trials,
    double p_linear, std::uint64_t seed) {
  dims.validate();
  profile.validate(dims.users);
  if (!dims.fully_loaded_or_under()) {
    throw std::domain_error("offset estimation requires M >= KN");
  }
  double zf_sum = 0.0, zf_sq = 0.0, bd_sum = 0.0, bd_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    RngStream rng = RngStream::child(seed, t);
    const ChannelSet cs = sample_channel(dims, profile, rng);
    const double dpc = dpc_sum_rate_uniform(cs, p_linear);
    const double dzf = dpc - zf_sum_rate(cs, p_linear, PowerPolicy::uniform);
    const double dbd = dpc - bd_sum_rate(cs, p_linear, PowerPolicy::uniform);
    zf_sum += dzf;
    zf_sq += dzf * dzf;
    bd_sum += dbd;
    bd_sq += dbd * dbd;
  }
  auto finish = [&](double sum, double sq) {
    OffsetReport rep;
    rep.source = OffsetSource::monte_carlo;
    rep.dims = dims;
    rep.beta_bps_hz = sum / trials;
    const double var =
        std::max(0.0, (sq - sum * sum / trials) / std::max(1, trials - 1));
    rep.stderr_bps_hz = std::sqrt(var / trials);
    rep.delta_db = 3.0 * rep.beta_bps_hz / dims.aggregate_rx();
    return rep;
  };
  UnequalSnrInvarianceReport rep;
  rep.closed_form_zf = beta_dpc_zf(dims.tx_antennas, dims.users, dims.rx_antennas);
  rep.closed_form_bd = beta_dpc_bd(dims.tx_antennas, dims.users, dims.rx_antennas);
  rep.monte_carlo_zf = finish(zf_sum, zf_sq);
  rep.monte_carlo_bd = finish(bd_sum, bd_sq);
  rep.zf_within_3se =
      std::abs(rep.monte_carlo_zf.beta_bps_hz - rep.closed_form_zf.beta_bps_hz) <=
      3.0 * rep.monte_carlo_zf.stderr_bps_hz;
  rep.bd_within_3se =
      std::abs(rep.monte_carlo_bd.beta_bps_hz - rep.closed_form_bd.beta_bps_hz) <=
      3.0 * rep.monte_carlo_bd.stderr_bps_hz;
  return rep;
}

}  // namespace mimobc
