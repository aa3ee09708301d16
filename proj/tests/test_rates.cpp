#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mimobc/channel.hpp"
#include "mimobc/offsets.hpp"
#include "mimobc/rates.hpp"

using namespace mimobc;

namespace {

constexpr double kLog2E = 1.4426950408889634;

ChannelSet draw(const SystemDims& dims, std::uint64_t seed,
                SnrProfile profile = {}) {
  if (profile.gamma.empty()) profile = SnrProfile::symmetric(dims.users);
  RngStream rng(seed);
  return sample_channel(dims, profile, rng);
}

// Single-antenna users with explicitly chosen rows.
ChannelSet scalar_users(int m, const std::vector<RowVector>& rows) {
  ChannelSet cs;
  cs.dims = SystemDims{m, static_cast<int>(rows.size()), 1};
  cs.profile = SnrProfile::symmetric(cs.dims.users);
  for (const RowVector& r : rows) cs.per_user.push_back(r);
  return cs;
}

}  // namespace

TEST_CASE("uniform dpc rate on the identity channel") {
  ChannelSet cs = scalar_users(2, {RowVector{{1.0, 0.0}}, RowVector{{0.0, 1.0}}});
  // |I + (P/2) I| with P=2: two factors of 2.
  CHECK(dpc_sum_rate_uniform(cs, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(dpc_sum_rate_uniform(cs, 0.0), std::domain_error);
}

TEST_CASE("single-user exact dpc equals eigenmode waterfilling") {
  const SystemDims dims{3, 1, 2};
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const ChannelSet cs = draw(dims, seed);
    const Matrix gram = cs.per_user[0] * cs.per_user[0].adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    std::vector<double> gains(eig.eigenvalues().data(),
                              eig.eigenvalues().data() + 2);
    const double p = 4.0;
    const PowerAllocation alloc = waterfill(gains, p);
    double ref = 0.0;
    for (int i = 0; i < 2; ++i) {
      ref += std::log2(1.0 + alloc.per_stream[i] * gains[i]);
    }
    const SolveResult res = dpc_sum_rate_exact(cs, p);
    CHECK(res.converged);
    CHECK(res.value == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("exact dpc dominates the uniform policy") {
  const SystemDims dims{4, 2, 2};
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const ChannelSet cs = draw(dims, seed);
    for (double p : {0.5, 5.0, 50.0}) {
      CHECK(dpc_sum_rate_exact(cs, p).value >=
            dpc_sum_rate_uniform(cs, p) - 1e-6);
    }
  }
}

TEST_CASE("exact-vs-uniform dpc gap vanishes at high power") {
  const SystemDims dims{2, 2, 1};
  double gap = 0.0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const ChannelSet cs = draw(dims, 500 + s);
    gap += dpc_sum_rate_exact(cs, 1e3).value - dpc_sum_rate_uniform(cs, 1e3);
  }
  gap /= seeds;
  CHECK(gap >= 0.0);
  CHECK(gap < 0.05);
}

TEST_CASE("waterfill hand solutions") {
  const PowerAllocation even = waterfill({1.0, 1.0}, 2.0);
  CHECK(even.per_stream[0] == doctest::Approx(1.0));
  CHECK(even.per_stream[1] == doctest::Approx(1.0));

  // gains (4,1), P=1.75: water level 1.5 -> (1.25, 0.5).
  const PowerAllocation both = waterfill({4.0, 1.0}, 1.75);
  CHECK(both.per_stream[0] == doctest::Approx(1.25));
  CHECK(both.per_stream[1] == doctest::Approx(0.5));

  // Smaller budget drops the weak channel entirely.
  const PowerAllocation one = waterfill({4.0, 1.0}, 0.5);
  CHECK(one.per_stream[0] == doctest::Approx(0.5));
  CHECK(one.per_stream[1] == doctest::Approx(0.0));

  CHECK_THROWS_AS(waterfill({}, 1.0), std::domain_error);
  CHECK_THROWS_AS(waterfill({1.0}, -1.0), std::domain_error);
}

TEST_CASE("waterfill satisfies the KKT conditions") {
  const std::vector<double> gains{3.7, 0.9, 0.2, 1.4};
  for (double p : {0.1, 1.0, 10.0}) {
    const PowerAllocation alloc = waterfill(gains, p);
    CHECK(alloc.total() == doctest::Approx(p).epsilon(1e-12));
    // Active channels share one water level; inactive ones sit above it.
    double level = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
      if (alloc.per_stream[i] > 0.0) {
        level = std::max(level, alloc.per_stream[i] + 1.0 / gains[i]);
      }
    }
    for (std::size_t i = 0; i < gains.size(); ++i) {
      if (alloc.per_stream[i] > 0.0) {
        CHECK(alloc.per_stream[i] + 1.0 / gains[i] ==
              doctest::Approx(level).epsilon(1e-9));
      } else {
        CHECK(1.0 / gains[i] >= level - 1e-9);
      }
    }
  }
}

TEST_CASE("zero-forcing on the identity channel removes nothing") {
  ChannelSet cs = scalar_users(2, {RowVector{{1.0, 0.0}}, RowVector{{0.0, 1.0}}});
  CHECK(zf_sum_rate(cs, 3.0, PowerPolicy::uniform) ==
        doctest::Approx(dpc_sum_rate_uniform(cs, 3.0)).epsilon(1e-12));
}

TEST_CASE("zf waterfilling dominates uniform and converges to it") {
  const SystemDims dims{2, 2, 1};
  double gap = 0.0;
  for (int s = 0; s < 100; ++s) {
    const ChannelSet cs = draw(dims, 900 + s);
    const double wf = zf_sum_rate(cs, 1e4, PowerPolicy::waterfill);
    const double un = zf_sum_rate(cs, 1e4, PowerPolicy::uniform);
    CHECK(wf >= un - 1e-12);
    gap += wf - un;
  }
  CHECK(gap / 100 < 0.01);
}

TEST_CASE("bd reduces to zf for single-antenna users") {
  const SystemDims dims{4, 3, 1};
  const ChannelSet cs = draw(dims, 77);
  for (PowerPolicy policy : {PowerPolicy::uniform, PowerPolicy::waterfill}) {
    CHECK(bd_sum_rate(cs, 6.0, policy) ==
          doctest::Approx(zf_sum_rate(cs, 6.0, policy)).epsilon(1e-10));
  }
}

TEST_CASE("bd with one user is point-to-point capacity") {
  const SystemDims dims{4, 1, 2};
  const ChannelSet cs = draw(dims, 78);
  CHECK(bd_sum_rate(cs, 5.0, PowerPolicy::uniform) ==
        doctest::Approx(dpc_sum_rate_uniform(cs, 5.0)).epsilon(1e-10));
  const Matrix gram = cs.per_user[0] * cs.per_user[0].adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  std::vector<double> gains(eig.eigenvalues().data(),
                            eig.eigenvalues().data() + 2);
  const PowerAllocation alloc = waterfill(gains, 5.0);
  double ref = 0.0;
  for (int i = 0; i < 2; ++i) {
    ref += std::log2(1.0 + alloc.per_stream[i] * gains[i]);
  }
  CHECK(bd_sum_rate(cs, 5.0, PowerPolicy::waterfill) ==
        doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("scheme nesting zf <= bd <= dpc per realization") {
  const SystemDims dims{4, 2, 2};
  for (int s = 0; s < 100; ++s) {
    const ChannelSet cs = draw(dims, 2000 + s);
    const double zf = zf_sum_rate(cs, 10.0, PowerPolicy::waterfill);
    const double bd = bd_sum_rate(cs, 10.0, PowerPolicy::waterfill);
    const double dpc = dpc_sum_rate_exact(cs, 10.0).value;
    CHECK(zf <= bd + 1e-9);
    CHECK(bd <= dpc + 1e-9);
  }
}

TEST_CASE("equal weights reduce the weighted solver to sum rate") {
  const SystemDims dims{3, 3, 1};
  for (std::uint64_t seed : {5u, 6u}) {
    const ChannelSet cs = draw(dims, seed);
    const WeightedSolveResult w =
        weighted_sum_rate_dpc_exact(cs, WeightVector::equal(3), 10.0);
    const SolveResult sum = dpc_sum_rate_exact(cs, 10.0);
    CHECK(3.0 * w.value == doctest::Approx(sum.value).epsilon(1e-5));
  }
}

TEST_CASE("weighted solver on orthogonal channels matches the hand solution") {
  ChannelSet cs = scalar_users(2, {RowVector{{1.0, 0.0}}, RowVector{{0.0, 1.0}}});
  const WeightVector mu{{0.6, 0.4}};
  const WeightedSolveResult res = weighted_sum_rate_dpc_exact(cs, mu, 10.0);
  CHECK(res.converged);
  // Decoupled objective: 0.6 log2(1+P1) + 0.4 log2(1+P2) -> (6.2, 3.8).
  CHECK(res.powers[0] == doctest::Approx(6.2).epsilon(1e-3));
  CHECK(res.powers[1] == doctest::Approx(3.8).epsilon(1e-3));
  const double ref = 0.6 * std::log2(7.2) + 0.4 * std::log2(4.8);
  CHECK(res.value == doctest::Approx(ref).epsilon(1e-6));
  CHECK(res.value == doctest::Approx(2.614).epsilon(1e-3));
}

TEST_CASE("weighted solver reports the applied permutation") {
  const SystemDims dims{3, 3, 1};
  const ChannelSet cs = draw(dims, 9);
  const WeightVector mu{{0.2, 0.5, 0.3}};
  const WeightedSolveResult res = weighted_sum_rate_dpc_exact(cs, mu, 5.0);
  CHECK(res.order == std::vector<int>{1, 2, 0});
  // Unnormalized weights give the same optimum.
  const WeightVector scaled{{0.4, 1.0, 0.6}};
  CHECK(weighted_sum_rate_dpc_exact(cs, scaled, 5.0).value ==
        doctest::Approx(res.value).epsilon(1e-8));
}

TEST_CASE("weighted exact dominates the proportional-power policy") {
  const SystemDims dims{4, 2, 1};
  const WeightVector mu{{0.6, 0.4}};
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const ChannelSet cs = draw(dims, seed);
    for (double p : {1.0, 10.0, 100.0}) {
      const double exact = weighted_sum_rate_dpc_exact(cs, mu, p).value;
      CHECK(exact + 1e-8 >=
            weighted_sum_rate_approx(cs, mu, p, Scheme::ZFDPC));
    }
  }
}

TEST_CASE("weighted gap under the proportional policy shrinks with power") {
  const SystemDims dims{4, 2, 1};
  const WeightVector mu{{0.6, 0.4}};
  const int seeds = 100;
  double prev = 1e9;
  for (double p : {1.0, 10.0, 100.0, 1000.0}) {
    double gap = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const ChannelSet cs = draw(dims, 3000 + s);
      gap += weighted_sum_rate_dpc_exact(cs, mu, p).value -
             weighted_sum_rate_approx(cs, mu, p, Scheme::ZFDPC);
    }
    gap /= seeds;
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("degenerate weights collapse to a single-user rate") {
  const SystemDims dims{3, 2, 1};
  const ChannelSet cs = draw(dims, 31);
  const WeightVector mu{{1.0, 0.0}};
  const double p = 8.0;
  const double ref = std::log2(1.0 + p * cs.row(0, 0).squaredNorm());
  CHECK(weighted_sum_rate_approx(cs, mu, p, Scheme::ZFDPC) ==
        doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("equal-weight zf approximation recovers the uniform sum rate") {
  const SystemDims dims{4, 2, 2};
  const ChannelSet cs = draw(dims, 32);
  const double approx =
      weighted_sum_rate_approx(cs, WeightVector::equal(2), 6.0, Scheme::ZF);
  CHECK(2.0 * approx ==
        doctest::Approx(zf_sum_rate(cs, 6.0, PowerPolicy::uniform))
            .epsilon(1e-10));
}

TEST_CASE("weighted kkt allocation") {
  const PowerAllocation sym =
      weighted_parallel_kkt({1.0, 1.0}, WeightVector{{0.5, 0.5}}, 4.0);
  CHECK(sym.per_stream[0] == doctest::Approx(2.0));
  CHECK(sym.per_stream[1] == doctest::Approx(2.0));

  const PowerAllocation skew =
      weighted_parallel_kkt({1.0, 0.5}, WeightVector{{0.6, 0.4}}, 10.0);
  CHECK(skew.per_stream[0] == doctest::Approx(6.8).epsilon(1e-10));
  CHECK(skew.per_stream[1] == doctest::Approx(3.2).epsilon(1e-10));
  CHECK(skew.total() == doctest::Approx(10.0).epsilon(1e-12));

  // Dominant term: P_k / P -> mu_k.
  const PowerAllocation big =
      weighted_parallel_kkt({1.0, 0.5}, WeightVector{{0.6, 0.4}}, 1e6);
  CHECK(big.per_stream[0] / 1e6 == doctest::Approx(0.6).epsilon(1e-5));

  // Tiny budget: active-set fallback keeps powers feasible.
  const PowerAllocation tiny =
      weighted_parallel_kkt({5.0, 0.1}, WeightVector{{0.5, 0.5}}, 0.05);
  CHECK(tiny.per_stream[0] >= 0.0);
  CHECK(tiny.per_stream[1] >= 0.0);
  CHECK(tiny.total() == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("affine approximation closed forms") {
  const AffineApprox siso =
      affine_approx_closed_form(RateScheme::DPC, SystemDims{1, 1, 1});
  CHECK(siso.s_inf == doctest::Approx(1.0));
  CHECK(siso.l_inf == doctest::Approx(0.8327).epsilon(1e-4));

  const SystemDims dims{6, 2, 2};
  const AffineApprox dpc = affine_approx_closed_form(RateScheme::DPC, dims);
  const AffineApprox zf = affine_approx_closed_form(RateScheme::ZF, dims);
  const AffineApprox bd = affine_approx_closed_form(RateScheme::BD, dims);
  CHECK(dpc.s_inf == doctest::Approx(4.0));
  CHECK(zf.s_inf == doctest::Approx(4.0));
  CHECK(bd.s_inf == doctest::Approx(4.0));
  CHECK(zf.l_inf - dpc.l_inf ==
        doctest::Approx(beta_dpc_zf(6, 2, 2).beta_bps_hz / 4.0).epsilon(1e-12));
  CHECK(bd.l_inf - dpc.l_inf ==
        doctest::Approx(beta_dpc_bd(6, 2, 2).beta_bps_hz / 4.0).epsilon(1e-12));
}

TEST_CASE("numeric affine extraction agrees with the closed form") {
  const SystemDims dims{2, 2, 1};
  AffineApproxNumericOptions opts;
  opts.trials = 20000;
  opts.seed = 4;
  for (RateScheme scheme : {RateScheme::DPC, RateScheme::ZF}) {
    const AffineApprox ref = affine_approx_closed_form(scheme, dims);
    const AffineApprox est = affine_approx_numeric(scheme, dims, opts);
    CHECK(est.s_inf == doctest::Approx(ref.s_inf).epsilon(0.02));
    CHECK(est.l_inf == doctest::Approx(ref.l_inf).epsilon(0.05));
  }
  AffineApproxNumericOptions bad = opts;
  bad.p2_db = bad.p1_db;
  CHECK_THROWS_AS(affine_approx_numeric(RateScheme::DPC, dims, bad),
                  std::domain_error);
}

TEST_CASE("overloaded heuristics") {
  // K <= M: keeping the top-M weights changes nothing.
  const std::vector<double> all =
      overloaded_heuristic_powers(WeightVector{{0.7, 0.3}}, 10.0, 4,
                                  OverloadedStrategy::top_m);
  CHECK(all[0] == doctest::Approx(7.0));
  CHECK(all[1] == doctest::Approx(3.0));

  const std::vector<double> top =
      overloaded_heuristic_powers(WeightVector{{0.5, 0.3, 0.2}}, 10.0, 2,
                                  OverloadedStrategy::top_m);
  CHECK(top[0] == doctest::Approx(6.25).epsilon(1e-12));
  CHECK(top[1] == doctest::Approx(3.75).epsilon(1e-12));
  CHECK(top[2] == doctest::Approx(0.0));

  const SystemDims dims{2, 3, 1};
  const WeightVector mu{{0.5, 0.3, 0.2}};
  for (std::uint64_t seed : {41u, 42u}) {
    const ChannelSet cs = draw(dims, seed);
    const double exact = weighted_sum_rate_dpc_exact(cs, mu, 100.0).value;
    for (OverloadedStrategy s :
         {OverloadedStrategy::all_users, OverloadedStrategy::top_m}) {
      CHECK(weighted_overloaded_heuristic(cs, mu, 100.0, s) <= exact + 1e-8);
    }
  }
}

TEST_CASE("uniform-policy offset is power-free at high snr") {
  const SystemDims dims{3, 3, 1};
  for (std::uint64_t seed : {51u, 52u, 53u}) {
    const ChannelSet cs = draw(dims, seed);
    const double p = 1e4;
    const double diff =
        dpc_sum_rate_uniform(cs, p) - zf_sum_rate(cs, p, PowerPolicy::uniform);
    const Matrix h = concatenate(cs);
    double target = logdet2(h * h.adjoint());
    for (double g : zf_effective_gains(cs).gains) target -= std::log2(g);
    CHECK(diff == doctest::Approx(target).epsilon(1e-5));
  }
}

TEST_CASE("unequal snr profiles shift rates by the expected constant") {
  const SystemDims dims{4, 2, 2};
  const std::vector<double> gamma{0.5, 3.0};
  RngStream rng(61);
  ChannelSet base = sample_channel(dims, SnrProfile::symmetric(2), rng);
  ChannelSet scaled = base;
  scaled.profile = SnrProfile{gamma};
  for (int k = 0; k < 2; ++k) scaled.per_user[k] *= std::sqrt(gamma[k]);

  double shift = 0.0;
  for (double g : gamma) shift += dims.rx_antennas * std::log2(g);

  const double p = 1e6;
  CHECK(dpc_sum_rate_uniform(scaled, p) - dpc_sum_rate_uniform(base, p) ==
        doctest::Approx(shift).epsilon(1e-3));
  CHECK(zf_sum_rate(scaled, p, PowerPolicy::uniform) -
            zf_sum_rate(base, p, PowerPolicy::uniform) ==
        doctest::Approx(shift).epsilon(1e-3));
  CHECK(bd_sum_rate(scaled, p, PowerPolicy::uniform) -
            bd_sum_rate(base, p, PowerPolicy::uniform) ==
        doctest::Approx(shift).epsilon(1e-3));
}

TEST_CASE("weighted dual-mac objective is concave along feasible directions") {
  const SystemDims dims{3, 3, 1};
  const ChannelSet cs = draw(dims, 71);
  const WeightVector mu{{0.5, 0.3, 0.2}};
  const std::vector<double> p0{2.0, 1.5, 1.0};
  RngStream rng(72);
  const double eps = 1e-3;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> d(3);
    for (double& v : d) v = rng.normal();
    std::vector<double> plus = p0, minus = p0;
    for (int i = 0; i < 3; ++i) {
      plus[i] += eps * d[i];
      minus[i] -= eps * d[i];
    }
    const double second = weighted_dual_mac_objective(cs, mu, plus) +
                          weighted_dual_mac_objective(cs, mu, minus) -
                          2.0 * weighted_dual_mac_objective(cs, mu, p0);
    CHECK(second <= 1e-6);
  }
}

TEST_CASE("analytic gradient matches central differences") {
  const SystemDims dims{4, 3, 1};
  for (std::uint64_t seed : {81u, 82u}) {
    const ChannelSet cs = draw(dims, seed);
    const WeightVector mu{{0.5, 0.3, 0.2}};
    const std::vector<double> p0{1.0, 2.0, 0.5};
    const std::vector<double> g = weighted_dual_mac_gradient(cs, mu, p0);
    const double eps = 1e-6;
    for (int i = 0; i < 3; ++i) {
      std::vector<double> plus = p0, minus = p0;
      plus[i] += eps;
      minus[i] -= eps;
      const double fd = (weighted_dual_mac_objective(cs, mu, plus) -
                         weighted_dual_mac_objective(cs, mu, minus)) /
                        (2.0 * eps);
      CHECK(std::abs(g[i] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("weight vector validation") {
  CHECK_THROWS_AS((WeightVector{{0.5, 0.6}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((WeightVector{{-0.1, 1.1}}.validate()), std::invalid_argument);
  CHECK_NOTHROW(WeightVector::equal(4).validate());
  (void)kLog2E;
}
