// mimobc: throughput calculators, Monte Carlo curve runners, and the
// queue-scheduling simulator behind the library, exposed as subcommands.
//
// Exit codes: 0 success, 1 usage error, 2 verification failure, 3 runtime
// error.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <string>
#include <vector>

#include "mimobc/io.hpp"
#include "mimobc/montecarlo.hpp"
#include "mimobc/offsets.hpp"
#include "mimobc/queuesim.hpp"
#include "mimobc/rates.hpp"

using namespace mimobc;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MIMOBC_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 1;
}

std::string utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void finish_output(const CsvTable& table, const std::string& path,
                   const std::string& command,
                   std::vector<std::pair<std::string, std::string>> params,
                   std::uint64_t seed) {
  emit_csv(table, path);
  RunManifest manifest;
  manifest.command = command;
  manifest.parameters = std::move(params);
  manifest.seed = seed;
  manifest.library_version = library_version();
  manifest.timestamp_utc = utc_now();
  write_manifest(manifest, path);
  std::printf("wrote %s (+ manifest)\n", path.c_str());
}

void require_loaded(const SystemDims& dims) {
  if (!dims.fully_loaded_or_under()) {
    throw CLI::ValidationError(
        "dims", "M >= K*N is required here (transmit antennas must cover "
                "the aggregate receive antennas)");
  }
}

int run_offsets(const SystemDims& dims, double alpha,
                const std::vector<double>& weights, const std::string& out,
                std::uint64_t seed) {
  require_loaded(dims);
  const OffsetReport zf = beta_dpc_zf(dims.tx_antennas, dims.users,
                                      dims.rx_antennas);
  const OffsetReport bd = beta_dpc_bd(dims.tx_antennas, dims.users,
                                      dims.rx_antennas);
  std::printf("DPC-ZF: beta = %.4f bps/Hz, delta = %.4f dB\n", zf.beta_bps_hz,
              zf.delta_db);
  std::printf("DPC-BD: beta = %.4f bps/Hz, delta = %.4f dB\n", bd.beta_bps_hz,
              bd.delta_db);

  CsvTable table;
  table.header = {"pair", "beta_bps_hz", "delta_db"};
  table.rows = {{"DPC-ZF", format_value(zf.beta_bps_hz),
                 format_value(zf.delta_db)},
                {"DPC-BD", format_value(bd.beta_bps_hz),
                 format_value(bd.delta_db)}};

  const int kn = dims.aggregate_rx();
  if (dims.tx_antennas % kn == 0) {
    const OffsetReport bz = beta_bd_zf(dims.tx_antennas, dims.users,
                                       dims.rx_antennas);
    std::printf("BD-ZF:  beta = %.4f bps/Hz, delta = %.4f dB\n",
                bz.beta_bps_hz, bz.delta_db);
    table.rows.push_back({"BD-ZF", format_value(bz.beta_bps_hz),
                          format_value(bz.delta_db)});
  }
  if (dims.tx_antennas == kn) {
    std::printf("large-system approximation M*log2(M): %.4f bps/Hz\n",
                beta_dpc_zf_big_m(dims.tx_antennas));
  }
  if (alpha > 1.0) {
    std::printf("asymptotic ZF penalty at M/KN = %g: %.4f dB\n", alpha,
                delta_dpc_zf_asymptotic(alpha));
  }
  if (!weights.empty()) {
    const OffsetReport w =
        weighted_beta_dpc_zf(weights, dims.tx_antennas, dims.users);
    std::printf("weighted DPC-ZF: beta = %.4f bps/Hz\n", w.beta_bps_hz);
    table.rows.push_back(
        {"weighted-DPC-ZF", format_value(w.beta_bps_hz), ""});
  }
  if (!out.empty()) {
    finish_output(table, out, "offsets",
                  {{"M", std::to_string(dims.tx_antennas)},
                   {"K", std::to_string(dims.users)},
                   {"N", std::to_string(dims.rx_antennas)}},
                  seed);
  }
  return 0;
}

int run_curve(ExperimentSpec spec, const std::string& mode,
              const std::string& out) {
  spec.validate();
  CsvTable table;
  if (mode == "rates") {
    table.header = {"snr_db", "scheme", "mean_bps_hz", "stderr", "trials",
                    "seed"};
    std::vector<CurveCell> cells = run_rate_curve(spec);
    std::sort(cells.begin(), cells.end(),
              [](const CurveCell& a, const CurveCell& b) {
                if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
                return to_string(a.scheme) < to_string(b.scheme);
              });
    for (const CurveCell& cell : cells) {
      if (!cell.ok) {
        std::fprintf(stderr, "skipping %s at %g dB: %s\n",
                     to_string(cell.scheme).c_str(), cell.snr_db,
                     cell.error.c_str());
        continue;
      }
      table.rows.push_back({format_value(cell.snr_db), to_string(cell.scheme),
                            format_value(cell.stats.mean),
                            format_value(cell.stats.stderr_),
                            std::to_string(cell.stats.trials),
                            std::to_string(spec.seed)});
    }
  } else {  // power-gap
    require_loaded(spec.dims);
    table.header = {"snr_db", "scheme", "mean_gap_bps_hz", "stderr", "trials",
                    "seed"};
    for (const PowerConvergenceCell& cell :
         run_power_convergence(spec.dims, spec.profile, spec.snr_grid_db,
                               spec.trials, spec.seed, spec.threads)) {
      table.rows.push_back({format_value(cell.snr_db), cell.scheme,
                            format_value(cell.gap.mean),
                            format_value(cell.gap.stderr_),
                            std::to_string(cell.gap.trials),
                            std::to_string(spec.seed)});
    }
  }
  finish_output(table, out, "curve",
                {{"M", std::to_string(spec.dims.tx_antennas)},
                 {"K", std::to_string(spec.dims.users)},
                 {"N", std::to_string(spec.dims.rx_antennas)},
                 {"mode", mode},
                 {"trials", std::to_string(spec.trials)}},
                spec.seed);
  return 0;
}

int run_weighted(const SystemDims& dims, const std::vector<double>& weights,
                 const std::vector<double>& snr_db, int seeds,
                 std::uint64_t seed, bool overloaded, const std::string& out) {
  const WeightVector mu{weights};
  CsvTable table;
  table.header = {"snr_db", "policy", "mean_bps_hz", "trials", "seed"};
  for (double db : snr_db) {
    const double p = std::pow(10.0, db / 10.0);
    double exact = 0.0, approx = 0.0, top = 0.0;
    for (int s = 0; s < seeds; ++s) {
      RngStream rng(child_seed(seed, s));
      const ChannelSet cs =
          sample_channel(dims, SnrProfile::symmetric(dims.users), rng);
      exact += weighted_sum_rate_dpc_exact(cs, mu, p).value;
      if (overloaded) {
        approx += weighted_overloaded_heuristic(cs, mu, p,
                                                OverloadedStrategy::all_users);
        top += weighted_overloaded_heuristic(cs, mu, p,
                                             OverloadedStrategy::top_m);
      } else {
        approx += weighted_sum_rate_approx(cs, mu, p, Scheme::ZFDPC);
      }
    }
    table.rows.push_back({format_value(db), "exact",
                          format_value(exact / seeds), std::to_string(seeds),
                          std::to_string(seed)});
    table.rows.push_back({format_value(db),
                          overloaded ? "all_users" : "proportional",
                          format_value(approx / seeds), std::to_string(seeds),
                          std::to_string(seed)});
    if (overloaded) {
      table.rows.push_back({format_value(db), "top_M",
                            format_value(top / seeds), std::to_string(seeds),
                            std::to_string(seed)});
    }
    std::printf("%6.1f dB: exact %.4f, %s %.4f bps/Hz\n", db, exact / seeds,
                overloaded ? "all-users heuristic" : "proportional",
                approx / seeds);
  }
  finish_output(table, out, "weighted",
                {{"M", std::to_string(dims.tx_antennas)},
                 {"K", std::to_string(dims.users)},
                 {"overloaded", overloaded ? "1" : "0"}},
                seed);
  return 0;
}

int run_queue(const SystemDims& dims, double p_db,
              const std::vector<double>& loads, int slots, std::uint64_t seed,
              int cap_trials, const std::string& out) {
  // Normalize arrival rates by the ergodic equal-weight sum capacity so a
  // load of 1.0 sits at the stability boundary.
  const double p = std::pow(10.0, p_db / 10.0);
  double cap = 0.0;
  for (int t = 0; t < cap_trials; ++t) {
    RngStream rng(child_seed(seed ^ 0xcafef00d, t));
    cap += dpc_sum_rate_exact(
               sample_channel(dims, SnrProfile::symmetric(dims.users), rng), p)
               .value;
  }
  cap /= cap_trials;
  std::printf("ergodic sum capacity estimate: %.4f bits/slot\n", cap);

  CsvTable table;
  table.header = {"load", "policy", "avg_queue_total", "drift", "slots",
                  "seed"};
  for (double load : loads) {
    QueueSimConfig cfg;
    cfg.dims = dims;
    cfg.p_db = p_db;
    cfg.arrival_rates.assign(dims.users, load * cap / dims.users);
    cfg.slots = slots;
    cfg.seed = seed;
    for (QueuePolicy policy :
         {QueuePolicy::exact, QueuePolicy::proportional}) {
      cfg.policy = policy;
      const QueueSimResult res = run_queue_sim(cfg);
      const char* name =
          policy == QueuePolicy::exact ? "exact" : "proportional";
      table.rows.push_back({format_value(load), name,
                            format_value(res.time_avg_total),
                            res.drift_detected ? "1" : "0",
                            std::to_string(slots), std::to_string(seed)});
      std::printf("load %.2f, %-12s: avg queue %.3f%s\n", load, name,
                  res.time_avg_total,
                  res.drift_detected ? " (unstable)" : "");
    }
  }
  finish_output(table, out, "queue",
                {{"M", std::to_string(dims.tx_antennas)},
                 {"K", std::to_string(dims.users)},
                 {"P_db", format_value(p_db)},
                 {"slots", std::to_string(slots)}},
                seed);
  return 0;
}

int run_verify(bool quick) {
  int failures = 0;
  auto check = [&](const char* label, bool ok) {
    std::printf("%s  %s\n", ok ? "ok  " : "FAIL", label);
    if (!ok) ++failures;
  };

  const OffsetReport g1 = beta_dpc_zf(5, 5, 1);
  check("golden offsets (M=5,K=5)",
        std::abs(g1.beta_bps_hz - 9.2573) < 5e-4 &&
            std::abs(g1.delta_db - 5.554) < 5e-4);
  check("golden offsets (M=10,K=5)",
        std::abs(beta_dpc_zf(10, 5, 1).delta_db - 1.2607) < 5e-4);
  const OffsetReport g2 = beta_bd_zf(12, 4, 3);
  check("golden BD-ZF gain (M=12,K=4,N=3)",
        std::abs(g2.beta_bps_hz - 14.4270) < 5e-4 &&
            std::abs(g2.delta_db - 3.6067) < 5e-4);
  check("asymptotic ZF penalty at ratio 2",
        std::abs(delta_dpc_zf_asymptotic(2.0) - 1.6719) < 5e-4);

  bool identities = true;
  for (int alpha = 1; alpha <= 3 && identities; ++alpha) {
    for (int n = 1; n <= 24; ++n) {
      for (int k = 1; k * n <= 24; ++k) {
        const int m = alpha * k * n;
        const Rational lhs = beta_dpc_zf_rational(m, k * n, 1) -
                             beta_dpc_bd_rational(m, k, n);
        if (!(lhs == beta_bd_zf_rational(m, k, n))) identities = false;
      }
    }
  }
  check("exact rational offset decomposition", identities);

  bool bound = true;
  for (int m = 1; m <= 1000; ++m) {
    if (s_m_nats(m) > m * std::log(static_cast<double>(m)) + 1e-12) {
      bound = false;
    }
  }
  check("large-system upper bound", bound);

  if (!quick) {
    const OffsetReport mc = run_offset_estimate(
        SystemDims{5, 5, 1}, SnrProfile::symmetric(5), 40.0, 500, 19,
        OffsetPair::DPC_ZF);
    check("Monte Carlo offset vs closed form",
          std::abs(mc.beta_bps_hz - 9.2573) <
              std::max(3.0 * mc.stderr_bps_hz, 0.15));

    bool nesting = true;
    for (int s = 0; s < 50; ++s) {
      RngStream rng(child_seed(23, s));
      const ChannelSet cs =
          sample_channel(SystemDims{4, 2, 2}, SnrProfile::symmetric(2), rng);
      const double zf = zf_sum_rate(cs, 10.0, PowerPolicy::waterfill);
      const double bd = bd_sum_rate(cs, 10.0, PowerPolicy::waterfill);
      const double dpc = dpc_sum_rate_exact(cs, 10.0).value;
      if (zf > bd + 1e-9 || bd > dpc + 1e-9) nesting = false;
    }
    check("scheme nesting ZF <= BD <= DPC", nesting);
  }

  if (failures) {
    std::printf("%d verification check(s) failed\n", failures);
    return 2;
  }
  std::printf("all verification checks passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian MIMO broadcast channel throughput toolkit"};
  app.require_subcommand(1);

  int m = 4, k = 2, n = 1;
  auto add_dims = [&](CLI::App* cmd) {
    cmd->add_option("--M", m, "transmit antennas")->required();
    cmd->add_option("--K", k, "number of users")->required();
    cmd->add_option("--N", n, "receive antennas per user")->capture_default_str();
  };

  // offsets
  double alpha = 0.0;
  std::vector<double> weights;
  std::string offsets_out;
  std::uint64_t seed = default_seed();
  CLI::App* offsets = app.add_subcommand(
      "offsets", "Closed-form rate/power offsets between DPC, ZF, and BD");
  add_dims(offsets);
  offsets->add_option("--alpha", alpha,
                      "also print the asymptotic ZF penalty for M/KN = alpha");
  offsets->add_option("--weights", weights,
                      "descending per-user weights for the weighted offset");
  offsets->add_option("--out", offsets_out, "optional CSV output path");

  // curve
  std::vector<double> snr_grid{0, 5, 10, 15, 20, 25, 30};
  std::vector<std::string> scheme_names{"DPC_uniform", "ZF_uniform"};
  std::vector<double> gamma;
  std::string curve_mode = "rates", curve_out = "curve.csv";
  int trials = 1000, threads = 0;
  CLI::App* curve = app.add_subcommand(
      "curve",
      "Ergodic rate curves over an SNR grid (fig2, fig3); "
      "--mode power-gap reproduces the optimal-vs-uniform power study (fig4)");
  add_dims(curve);
  curve->add_option("--snr-db", snr_grid, "SNR grid in dB, strictly increasing")
      ->capture_default_str();
  curve->add_option("--schemes", scheme_names,
                    "subset of DPC_exact DPC_uniform ZF_uniform ZF_waterfill "
                    "BD_uniform BD_waterfill");
  curve->add_option("--gamma", gamma, "per-user average SNR scale factors");
  curve->add_option("--trials", trials, "Monte Carlo trials")
      ->capture_default_str();
  curve->add_option("--threads", threads, "worker threads (0 = all cores)");
  curve->add_option("--mode", curve_mode, "rates or power-gap")
      ->check(CLI::IsMember({"rates", "power-gap"}))
      ->capture_default_str();
  curve->add_option("--seed", seed, "master seed (env MIMOBC_SEED)");
  curve->add_option("--out", curve_out, "CSV output path")
      ->capture_default_str();

  // weighted
  std::vector<double> wsnr{0, 10, 20, 30};
  int wseeds = 200;
  bool overloaded = false;
  std::string weighted_out = "weighted.csv";
  CLI::App* weighted = app.add_subcommand(
      "weighted",
      "Exact weighted sum rate vs the proportional-power policy (fig6); "
      "--overloaded compares the K > M heuristics instead (fig8)");
  add_dims(weighted);
  weighted->add_option("--weights", weights, "per-user weights")->required();
  weighted->add_option("--snr-db", wsnr, "SNR points in dB")
      ->capture_default_str();
  weighted->add_option("--seeds", wseeds, "channel draws per SNR point")
      ->capture_default_str();
  weighted->add_flag("--overloaded", overloaded,
                     "use the overloaded-system heuristics (K may exceed M)");
  weighted->add_option("--seed", seed, "master seed (env MIMOBC_SEED)");
  weighted->add_option("--out", weighted_out, "CSV output path")
      ->capture_default_str();

  // queue
  double p_db = 10.0;
  std::vector<double> loads{0.3, 0.5, 0.7, 0.9};
  int slots = 2000, cap_trials = 100;
  std::string queue_out = "queue.csv";
  CLI::App* queue = app.add_subcommand(
      "queue",
      "Max-weight queue scheduling: exact vs proportional power (fig7); "
      "loads are normalized by the ergodic sum capacity");
  add_dims(queue);
  queue->add_option("--snr-db", p_db, "transmit SNR in dB")
      ->capture_default_str();
  queue->add_option("--loads", loads, "arrival loads as capacity fractions")
      ->capture_default_str();
  queue->add_option("--slots", slots, "slots per simulation")
      ->capture_default_str();
  queue->add_option("--cap-trials", cap_trials,
                    "draws for the capacity normalization");
  queue->add_option("--seed", seed, "master seed (env MIMOBC_SEED)");
  queue->add_option("--out", queue_out, "CSV output path")
      ->capture_default_str();

  // verify
  bool quick = false;
  CLI::App* verify = app.add_subcommand(
      "verify", "Run the self-check suite; nonzero exit on failure");
  verify->add_flag("--quick", quick, "deterministic checks only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const SystemDims dims{m, k, n};
    if (app.got_subcommand(offsets)) {
      return run_offsets(dims, alpha, weights, offsets_out, seed);
    }
    if (app.got_subcommand(curve)) {
      dims.validate();
      ExperimentSpec spec;
      spec.dims = dims;
      spec.profile = gamma.empty() ? SnrProfile::symmetric(k)
                                   : SnrProfile{gamma};
      spec.snr_grid_db = snr_grid;
      for (const std::string& name : scheme_names) {
        bool found = false;
        for (CurveScheme s :
             {CurveScheme::DPC_exact, CurveScheme::DPC_uniform,
              CurveScheme::ZF_uniform, CurveScheme::ZF_waterfill,
              CurveScheme::BD_uniform, CurveScheme::BD_waterfill}) {
          if (to_string(s) == name) {
            spec.schemes.push_back(s);
            found = true;
          }
        }
        if (!found) {
          std::fprintf(stderr, "unknown scheme: %s\n", name.c_str());
          return 1;
        }
      }
      spec.trials = trials;
      spec.seed = seed;
      spec.threads = threads;
      return run_curve(spec, curve_mode, curve_out);
    }
    if (app.got_subcommand(weighted)) {
      dims.validate();
      return run_weighted(dims, weights, wsnr, wseeds, seed, overloaded,
                          weighted_out);
    }
    if (app.got_subcommand(queue)) {
      dims.validate();
      return run_queue(dims, p_db, loads, slots, seed, cap_trials, queue_out);
    }
    if (app.got_subcommand(verify)) {
      return run_verify(quick);
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 3;
  }
  return 1;
}
