// Command-line front end for the watermarking laboratory. Every subcommand
// reads a scenario file, does one stage of the pipeline, and writes its
// artifacts as json/csv next to each other so stages can be chained.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hmwm/adversary.hpp"
#include "hmwm/scenario.hpp"
#include "hmwm/serialization.hpp"

namespace fs = std::filesystem;
using namespace hmwm;

namespace {

struct CommonArgs {
  std::string config = "configs/tank_scenario.json";
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
};

ScenarioConfig load_config(const CommonArgs& args) {
  ScenarioConfig cfg = scenario_from_json(read_text_file(args.config));
  if (args.seed) cfg.noise_seed = *args.seed;
  if (args.steps) cfg.steps = *args.steps;
  return cfg;
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

void print_vector(const char* name, const Vector& v) {
  std::printf("%s [", name);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    std::printf("%s%.4g", i ? ", " : "", v(i));
  std::printf("]\n");
}

int cmd_design(const CommonArgs& args) {
  const ScenarioConfig cfg = load_config(args);
  RandomSource rng(cfg.design_seed);
  const DesignResult res = design_bank(cfg.design, rng);
  ensure_dir(args.out_dir);
  write_text_file(args.out_dir + "/bank.json", bank_to_json(res.bank));
  write_text_file(args.out_dir + "/certificate.json",
                  certificate_to_json(res.certificate));
  std::printf("designed %d modes, order %d (%d hidden), seed %" PRIu64 "\n",
              res.bank.size(), res.bank.n_w, res.bank.n_u, res.seed);
  for (const auto& md : res.mode_designs)
    std::printf("  gain margin %.4f after %d draws\n", md.lmi_margin,
                md.gain_attempts);
  std::printf("wrote %s/bank.json and certificate.json\n", args.out_dir.c_str());
  return 0;
}

int cmd_certify(const CommonArgs& args, const std::string& bank_path) {
  StabilityCertificate cert;
  if (!bank_path.empty()) {
    cert = certify_guas(bank_from_json(read_text_file(bank_path)));
  } else {
    const ScenarioConfig cfg = load_config(args);
    RandomSource rng(cfg.design_seed);
    cert = design_bank(cfg.design, rng).certificate;
  }
  std::printf("certificate: %s\n", cert.detail.c_str());
  if (cert.ok) {
    print_vector("  generator margins", cert.margins_w);
    print_vector("  remover margins  ", cert.margins_q);
    print_vector("  tail weights     ", cert.tail_weights);
  }
  return cert.ok ? 0 : 1;
}

int cmd_partition(const CommonArgs& args) {
  const ScenarioConfig cfg = load_config(args);
  const PlantModel plant =
      make_plant(cfg.A, cfg.B, cfg.C, cfg.process_cov, cfg.measurement_cov);
  const ControllerConfig ctrl =
      make_controller(plant, cfg.K, cfg.x_ref, cfg.u_ref, cfg.detector_alpha, cfg.L);
  RandomSource rng(cfg.design_seed);
  DesignResult res = design_bank(cfg.design, rng);
  const SteadyStats stats = steady_stats(plant, ctrl, res.bank.A_u, res.bank.B_u);
  bool from_stats = false;
  try {
    res.bank.partition = build_partition(stats, res.bank.size());
    from_stats = true;
  } catch (const std::invalid_argument&) {
  }
  ensure_dir(args.out_dir);
  write_text_file(args.out_dir + "/stats.json", stats_to_json(stats));
  write_text_file(args.out_dir + "/bank.json", bank_to_json(res.bank));
  print_vector("stationary tail mean", stats.mean_xu);
  std::printf("%d cells over %d tail coordinates (%s)\n", res.bank.partition.size(),
              res.bank.partition.dim,
              from_stats ? "anchored on loop statistics" : "default standard normal");
  std::printf("wrote %s/stats.json and bank.json\n", args.out_dir.c_str());
  return 0;
}

void print_metrics(const RunMetrics& m) {
  print_vector("mode frequency", m.mode_frequency);
  std::printf("switch events %d, dwell median %.1f max %d\n", m.switch_events,
              m.median_dwell, m.max_dwell);
  std::printf("recovery error %.3e, state divergence %.3e, mode mismatches %d\n",
              m.max_recovery_error, m.max_state_divergence, m.mode_mismatches);
  std::printf("alarm rate %.4f, tail covariance gap %.4f\n", m.alarm_rate,
              m.tail_cov_gap);
}

int cmd_simulate(const CommonArgs& args, int sweep) {
  ScenarioConfig cfg = load_config(args);
  ensure_dir(args.out_dir);
  if (sweep > 1) {
    // Independent noise seeds, run and merged in seed order so the summary
    // file is deterministic regardless of any future fan-out.
    std::string merged = "[";
    for (int i = 0; i < sweep; ++i) {
      ScenarioConfig c = cfg;
      c.noise_seed = cfg.noise_seed + static_cast<std::uint64_t>(i);
      const RunResult r = run_scenario(c);
      std::printf("seed %" PRIu64 ": alarm %.4f, %d switches, recovery %.2e\n",
                  c.noise_seed, r.metrics.alarm_rate, r.metrics.switch_events,
                  r.metrics.max_recovery_error);
      merged += (i ? ",\n" : "\n") + std::string("{\"noise_seed\": ") +
                std::to_string(c.noise_seed) +
                ", \"metrics\": " + metrics_to_json(r.metrics) + "}";
    }
    merged += "\n]\n";
    write_text_file(args.out_dir + "/sweep.json", merged);
    std::printf("wrote %s/sweep.json (%d seeds)\n", args.out_dir.c_str(), sweep);
    return 0;
  }
  const RunResult res = run_scenario(cfg);
  write_trace_csv(res.trace, args.out_dir + "/trace.csv");
  write_text_file(args.out_dir + "/metrics.json", metrics_to_json(res.metrics));
  write_text_file(args.out_dir + "/bank.json", bank_to_json(res.design.bank));
  write_text_file(args.out_dir + "/certificate.json",
                  certificate_to_json(res.design.certificate));
  write_text_file(args.out_dir + "/stats.json", stats_to_json(res.stats));
  std::printf("simulated %d steps (noise seed %" PRIu64 ", design seed %" PRIu64
              ", watermark %s)\n",
              cfg.steps, cfg.noise_seed, cfg.design_seed,
              cfg.watermark_enabled ? "on" : "off");
  print_metrics(res.metrics);
  std::printf("wrote trace.csv, metrics.json, bank.json, certificate.json, "
              "stats.json under %s\n",
              args.out_dir.c_str());
  return 0;
}

struct AttackArgs {
  std::string trace_path;
  int lag = 1;
  int clusters = 6;
  int restarts = 10;
  std::uint64_t seed = 1;
  std::string method = "both";
};

int run_attack(const AttackArgs& atk, const std::string& out_dir) {
  const SimTrace trace = read_trace_csv(atk.trace_path);
  if (trace.steps() < 2 || trace.mode_w.maxCoeff() < 1)
    throw std::runtime_error("attack: trace carries no watermark modes");

  AttackDataset data;
  data.y_w = trace.y_w;
  data.u = trace.u;
  data.labels.assign(trace.mode_w.data(), trace.mode_w.data() + trace.steps());
  const RegressorSet reg = build_regressors(data, atk.lag);

  const auto c = io_complexity(atk.clusters, atk.lag, static_cast<int>(trace.y_w.cols()),
                               static_cast<int>(trace.u.cols()));
  std::printf("lag %d: %s candidate models, %d unknowns each, sample bound %s\n",
              atk.lag, c.models.str().c_str(), c.regressor_dim,
              c.samples.str().c_str());

  std::string report = "{\n";
  char line[256];
  bool first = true;
  for (const std::string method : {std::string("kmeans"), std::string("klinreg")}) {
    if (atk.method != "both" && atk.method != method) continue;
    RandomSource rng(atk.seed);
    const ClusteringResult res =
        method == "kmeans" ? kmeans_attack(reg, atk.clusters, atk.restarts, rng)
                           : klinreg_attack(reg, atk.clusters, atk.restarts, rng);
    const PairScores s = score_clustering(reg.labels, res.assignments);
    std::printf("%-8s rand %.4f  jaccard %.4f  fowlkes-mallows %.4f  (objective "
                "%.4e, %d iters%s)\n",
                method.c_str(), s.rand, s.jaccard, s.fowlkes_mallows, res.objective,
                res.iterations, res.degenerate ? ", degenerate" : "");
    std::snprintf(line, sizeof line,
                  "%s  \"%s\": {\"rand\": %.17g, \"jaccard\": %.17g, "
                  "\"fowlkes_mallows\": %.17g}",
                  first ? "" : ",\n", method.c_str(), s.rand, s.jaccard,
                  s.fowlkes_mallows);
    report += line;
    first = false;
  }
  report += "\n}\n";
  ensure_dir(out_dir);
  write_text_file(out_dir + "/attack_lag" + std::to_string(atk.lag) + ".json", report);
  return 0;
}

int cmd_complexity(int modes, int outputs, int inputs, const std::string& lags) {
  std::printf("%6s %16s %16s %s\n", "lag", "models", "unknowns", "sample bound");
  std::string token;
  for (const char* s = lags.c_str();; ++s) {
    if (*s == ',' || *s == '\0') {
      if (!token.empty()) {
        const int lag = std::stoi(token);
        const auto c = io_complexity(modes, lag, outputs, inputs);
        const double approx = c.samples.convert_to<double>();
        std::printf("%6d %16s %16d %s (%.4e)\n", lag, c.models.str().c_str(),
                    c.regressor_dim, c.samples.str().c_str(), approx);
        token.clear();
      }
      if (*s == '\0') break;
    } else {
      token += *s;
    }
  }
  return 0;
}

int cmd_verify(const CommonArgs& args) {
  const ScenarioConfig cfg = load_config(args);
  RandomSource rng(cfg.design_seed);
  const DesignResult res = design_bank(cfg.design, rng);
  const int steps = args.steps.value_or(20000);
  const VerifyReport rep = verify_bank(res.bank, steps, cfg.noise_seed);

  int failures = 0;
  const auto report = [&](const char* name, bool pass, double value) {
    std::printf("[%s] %-34s %.*e\n", pass ? "ok" : "FAIL", name, 3, value);
    if (!pass) ++failures;
  };
  for (const auto& c : rep.pair.checks) report(c.name.c_str(), c.pass, c.value);
  report("stability certificate", rep.certificate.ok,
         rep.certificate.ok ? rep.certificate.margins_q.minCoeff() : 0.0);
  report("matched-run recovery error", rep.max_recovery_error < 1e-8,
         rep.max_recovery_error);
  report("matched-run mode agreement", rep.mode_mismatches == 0,
         static_cast<double>(rep.mode_mismatches));
  std::printf("%s\n", failures == 0 ? "verified" : "verification failed");
  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid multiplicative watermarking laboratory"};
  app.require_subcommand(1);

  CommonArgs common;
  AttackArgs attack;
  int cx_modes = 6, cx_outputs = 2, cx_inputs = 2;
  int sweep = 1;
  std::string cx_lags = "1,5,10,15";
  std::string bank_path;

  const auto add_common = [&](CLI::App* sub, bool with_steps = true) {
    sub->add_option("--config", common.config, "scenario json file");
    sub->add_option("--out", common.out_dir, "artifact directory");
    sub->add_option("--seed", common.seed, "override the noise seed");
    if (with_steps) sub->add_option("--steps", common.steps, "override the horizon");
  };

  auto* design = app.add_subcommand("design", "draw a filter bank and certify it");
  add_common(design, false);
  auto* certify = app.add_subcommand("certify", "recheck a stability certificate");
  add_common(certify, false);
  certify->add_option("--bank", bank_path, "bank json (default: redesign from config)");
  auto* partition =
      app.add_subcommand("partition", "anchor selector cells on loop statistics");
  add_common(partition, false);
  auto* simulate = app.add_subcommand("simulate", "run the closed loop");
  add_common(simulate);
  simulate->add_option("--sweep", sweep, "run this many consecutive noise seeds");
  auto* verify = app.add_subcommand("verify", "audit a design end to end");
  add_common(verify);

  auto* atk = app.add_subcommand("attack", "cluster intercepted traffic");
  atk->add_option("--trace", attack.trace_path, "trace csv from simulate")->required();
  atk->add_option("--lag", attack.lag, "regressor depth");
  atk->add_option("--clusters", attack.clusters, "cluster count");
  atk->add_option("--restarts", attack.restarts, "search restarts");
  atk->add_option("--seed", attack.seed, "attack rng seed");
  atk->add_option("--method", attack.method, "kmeans | klinreg | both")
      ->check(CLI::IsMember({"kmeans", "klinreg", "both"}));
  atk->add_option("--out", common.out_dir, "artifact directory");

  auto* complexity =
      app.add_subcommand("complexity", "identification burden per lag");
  complexity->add_option("--modes", cx_modes, "bank size");
  complexity->add_option("--outputs", cx_outputs, "plant outputs");
  complexity->add_option("--inputs", cx_inputs, "plant inputs");
  complexity->add_option("--lags", cx_lags, "comma-separated lags");

  auto* run_all = app.add_subcommand("run-all", "full pipeline in one call");
  add_common(run_all);

  CLI11_PARSE(app, argc, argv);

  try {
    if (design->parsed()) return cmd_design(common);
    if (certify->parsed()) return cmd_certify(common, bank_path);
    if (partition->parsed()) return cmd_partition(common);
    if (simulate->parsed()) return cmd_simulate(common, sweep);
    if (verify->parsed()) return cmd_verify(common);
    if (atk->parsed()) return run_attack(attack, common.out_dir);
    if (complexity->parsed())
      return cmd_complexity(cx_modes, cx_outputs, cx_inputs, cx_lags);
    if (run_all->parsed()) {
      int rc = cmd_design(common);
      if (rc == 0) rc = cmd_certify(common, "");
      if (rc == 0) rc = cmd_partition(common);
      if (rc == 0) rc = cmd_simulate(common, 1);
      if (rc == 0) {
        attack.trace_path = common.out_dir + "/trace.csv";
        for (int lag : {1, 2}) {
          attack.lag = lag;
          attack.method = lag == 1 ? "both" : "klinreg";
          rc = run_attack(attack, common.out_dir);
          if (rc != 0) break;
        }
      }
      if (rc == 0) rc = cmd_complexity(cx_modes, cx_outputs, cx_inputs, cx_lags);
      if (rc == 0) rc = cmd_verify(common);
      return rc;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
