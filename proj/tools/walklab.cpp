// walklab: simulation and exact-computation laboratory for the inner boundary
// of the simple random walk range.
//
// Subcommands:
//   simulate  run an experiment campaign from a JSON config
//   beta      estimate P(T_0 < T_b) by Monte Carlo and certified bracket solve
//   oracle    exact enumeration of small-n statistics and hitting events
//   report    regenerate the convergence report from stored raw output
//   audit     tracker-vs-scratch and nesting property sweeps

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "walklab/audit.hpp"
#include "walklab/bracket.hpp"
#include "walklab/exact_oracle.hpp"
#include "walklab/experiment.hpp"
#include "walklab/hitting.hpp"
#include "walklab/range_stats.hpp"

using nlohmann::ordered_json;
using namespace walklab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

ordered_json estimate_record(const HittingEstimate& est) {
  ordered_json j;
  j["target"] = hit_target_name(est.target);
  j["d"] = est.d;
  j["b"] = est.b_dir;
  j["cutoff"] = est.cutoff.describe();
  j["trials"] = est.trials;
  j["p_hat"] = est.probability;
  j["half_width"] = est.half_width;
  j["p_pessimistic"] = est.p_pessimistic;
  j["p_optimistic"] = est.p_optimistic;
  return j;
}

ordered_json bracket_record(const ExactBracket& br, int d) {
  ordered_json j;
  j["method"] = "bracket";
  j["d"] = d;
  j["L"] = br.box_radius;
  j["lower"] = br.lower;
  j["upper"] = br.upper;
  j["residual"] = br.residual;
  return j;
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed, bool seed_set,
                 int threads, const std::string& out_dir, bool json_out) {
  ExperimentConfig config;
  try {
    config = load_config_file(config_path);
    if (seed_set) config.master_seed = seed;
    if (threads > 0) config.threads = threads;
    if (!out_dir.empty()) config.output_dir = out_dir;
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const ExperimentResult result = run_experiment(config);
    if (json_out)
      std::cout << render_summary_json(result);
    else
      std::cout << convergence_report(result);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_beta(int d, std::uint64_t trials, std::uint64_t cutoff_radius, std::uint64_t cutoff_steps,
             int b_dir, int bracket_L, std::uint64_t seed, int threads, std::uint64_t trunc_k,
             bool json_out) {
  try {
    check_dimension(d);
    if (bracket_L <= 0) bracket_L = default_bracket_radius(d);

    CutoffPolicy cutoff = CutoffPolicy::none();
    if (cutoff_steps > 0)
      cutoff = CutoffPolicy::step_cap(cutoff_steps);
    else
      cutoff = CutoffPolicy::radius_cap(cutoff_radius > 0 ? cutoff_radius
                                                          : (d == 2 ? 10000 : 1000));

    const int nthreads = resolve_threads(threads);
    JumpTables jumps;
    if (cutoff.kind == CutoffPolicy::Kind::RadiusCap)
      jumps = JumpTables::build(d, JumpTables::default_radii(d, cutoff.value), 1e-13, nthreads);

    const HittingEstimate est = estimate_return_before_neighbor(
        d, b_dir, cutoff, trials, seed, jumps.empty() ? nullptr : &jumps, nthreads);
    const ExactBracket br = d == 2 ? exact_bracket_2d(b_dir, bracket_L, 1e-12, nthreads)
                                   : exact_bracket_highd(d, b_dir, bracket_L, 1e-12, nthreads);

    const double p_mc = d == 2 ? est.probability : est.p_pessimistic;
    const BetaConstant beta_mc = BetaConstant::from_p(p_mc, BetaConstant::Source::MonteCarlo);
    const BetaConstant beta_br =
        BetaConstant::from_p(br.midpoint(), BetaConstant::Source::ExactBracket);

    HittingEstimate trunc;
    if (trunc_k > 0) trunc = estimate_truncated(d, b_dir, trunc_k, trials, seed, nthreads);

    if (json_out) {
      ordered_json records = ordered_json::array();
      records.push_back(estimate_record(est));
      records.push_back(bracket_record(br, d));
      if (trunc_k > 0) {
        records.push_back(estimate_record(trunc));
        if (trunc.probability > 0.0 && trunc.probability < 1.0) {
          ordered_json hk;
          hk["target"] = "h_k";
          hk["k"] = trunc_k;
          hk["beta"] = beta_br.value;
          hk["h_k"] = h_k(beta_br.value, trunc.probability);
          records.push_back(hk);
        }
      }
      std::cout << records.dump(2) << "\n";
    } else {
      std::printf("P(T_0 < T_b), d=%d, b=%d\n", d, b_dir);
      std::printf("  monte carlo   p_hat = %.6f +- %.6f  (trials=%llu, cutoff=%s,\n"
                  "                pessimistic %.6f / optimistic %.6f)\n",
                  est.probability, est.half_width, static_cast<unsigned long long>(est.trials),
                  est.cutoff.describe().c_str(), est.p_pessimistic, est.p_optimistic);
      std::printf("  bracket L=%-4d [%.6f, %.6f]  width %.6f  residual %.3g\n", br.box_radius,
                  br.lower, br.upper, br.width(), br.residual);
      std::printf("  beta_%d = %.6f  (from monte carlo p_hat %.6f)\n", d, beta_mc.value, p_mc);
      std::printf("  beta_%d = %.6f  (from bracket midpoint %.6f)\n", d, beta_br.value,
                  br.midpoint());
      if (trunc_k > 0) {
        std::printf("  truncated k=%llu: p_hat = %.6f +- %.6f",
                    static_cast<unsigned long long>(trunc_k), trunc.probability, trunc.half_width);
        if (trunc.probability > 0.0 && trunc.probability < 1.0)
          std::printf("   h_k = %.6f", h_k(beta_br.value, trunc.probability));
        std::printf("\n");
      }
    }
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "beta: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "beta: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_oracle(int d, int n, const std::string& stat, int p, double threshold, int b_dir,
               std::uint64_t event_value, int threads, bool json_out) {
  try {
    ExactResult result;
    if (stat == "M" || stat == "M0" || stat == "L" || stat == "range_size" || stat == "J" ||
        stat == "theta") {
      OracleStatistic s = OracleStatistic::M;
      if (stat == "M0") s = OracleStatistic::M0;
      else if (stat == "L") s = OracleStatistic::L;
      else if (stat == "range_size") s = OracleStatistic::RangeSize;
      else if (stat == "J") s = OracleStatistic::JMultiplicity;
      else if (stat == "theta") s = OracleStatistic::ThetaCount;
      OracleParams params;
      params.p = p;
      params.threshold = threshold;
      result = enumerate(d, n, s, params, resolve_threads(threads));
    } else if (stat == "trunc" || stat == "tail0" || stat == "tailb" || stat == "tailjoint") {
      HitEvent event;
      event.b_dir = b_dir;
      event.value = event_value;
      if (stat == "trunc") event.kind = HitEventKind::TruncatedReturn;
      else if (stat == "tail0") event.kind = HitEventKind::ReturnTailGT;
      else if (stat == "tailb") event.kind = HitEventKind::NeighborTailGT;
      else event.kind = HitEventKind::JointTailGT;
      result = enumerate_hitting(d, event, n, resolve_threads(threads));
    } else {
      std::cerr << "oracle: unknown statistic '" << stat
                << "' (expected M, M0, L, range_size, J, theta, trunc, tail0, tailb, tailjoint)\n";
      return kExitUsage;
    }

    if (json_out) {
      ordered_json j;
      j["d"] = result.d;
      j["n"] = result.n;
      j["statistic"] = result.statistic;
      j["expectation_num"] = result.expectation_num;
      j["expectation_den"] = result.expectation_den;
      ordered_json dist = ordered_json::object();
      for (const auto& [v, c] : result.distribution) dist[std::to_string(v)] = c;
      j["distribution"] = dist;
      std::cout << j.dump(2) << "\n";
    } else {
      std::printf("E[%s] (d=%d, n=%d) = %lld/%llu = %.10f\n", result.statistic.c_str(), result.d,
                  result.n, result.expectation_num,
                  static_cast<unsigned long long>(result.expectation_den), result.as_double());
      std::printf("distribution:");
      for (const auto& [v, c] : result.distribution)
        std::printf(" %lld:%llu", v, static_cast<unsigned long long>(c));
      std::printf("\n");
    }
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "oracle: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "oracle: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_report(const std::string& in_dir) {
  try {
    namespace fs = std::filesystem;
    const fs::path dir(in_dir);
    std::ifstream sj(dir / "summary.json");
    if (!sj) {
      std::cerr << "report: cannot open " << (dir / "summary.json") << "\n";
      return kExitUsage;
    }
    ordered_json summary = ordered_json::parse(sj);
    ExperimentConfig config;
    const auto& echo = summary.at("config_echo");
    config.d = echo.at("d").get<int>();
    config.horizon = echo.at("horizon").get<std::uint64_t>();
    config.checkpoints = echo.at("checkpoints").get<std::vector<std::uint64_t>>();
    config.trials = echo.at("trials").get<std::uint64_t>();
    config.master_seed = echo.at("master_seed").get<std::uint64_t>();
    config.deltas = echo.at("deltas").get<std::vector<double>>();
    config.ps = echo.at("ps").get<std::vector<int>>();
    BetaConstant beta;
    beta.value = summary.at("beta_constant").at("value").get<double>();
    beta.p_estimate = summary.at("beta_constant").at("p_estimate").get<double>();
    const std::string src = summary.at("beta_constant").at("source").get<std::string>();
    beta.source = src == "exact-bracket" ? BetaConstant::Source::ExactBracket
                  : src == "monte-carlo" ? BetaConstant::Source::MonteCarlo
                                         : BetaConstant::Source::UserSupplied;

    std::ifstream raw(dir / "raw.csv");
    if (!raw) {
      std::cerr << "report: cannot open " << (dir / "raw.csv") << "\n";
      return kExitUsage;
    }
    std::stringstream ss;
    ss << raw.rdbuf();
    const ExperimentResult result = result_from_raw_csv(ss.str(), config, beta);
    const std::string text = convergence_report(result);
    std::ofstream out(dir / "report.txt", std::ios::binary);
    out << text;
    std::cout << text;
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "report: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_audit(int d, std::uint64_t paths, std::uint64_t len, std::uint64_t seed, int enumerate_n,
              int threads) {
  try {
    const AuditReport report = audit_tracker(d, paths, len, seed, enumerate_n,
                                             resolve_threads(threads));
    std::printf("audit d=%d: %llu random paths of length %llu\n", d,
                static_cast<unsigned long long>(report.random_paths),
                static_cast<unsigned long long>(len));
    std::printf("  incremental vs scratch mismatches: %llu\n",
                static_cast<unsigned long long>(report.random_mismatches));
    std::printf("  boundary recount mismatches:       %llu\n",
                static_cast<unsigned long long>(report.boundary_recount_mismatches));
    std::printf("  nesting checks: %llu (failures %llu), directional: %llu (failures %llu)\n",
                static_cast<unsigned long long>(report.nesting_checks),
                static_cast<unsigned long long>(report.nesting_failures),
                static_cast<unsigned long long>(report.directional_nesting_checks),
                static_cast<unsigned long long>(report.directional_nesting_failures));
    if (report.enumerated_paths > 0)
      std::printf("  enumerated paths: %llu (mismatches %llu)\n",
                  static_cast<unsigned long long>(report.enumerated_paths),
                  static_cast<unsigned long long>(report.enumerated_mismatches));
    std::printf("audit %s\n", report.passed() ? "PASSED" : "FAILED");
    return report.passed() ? kExitOk : kExitRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "audit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "audit: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"walklab: random walk range inner-boundary laboratory"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run an experiment campaign from a JSON config");
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool json_out = false;
  int threads = 0;
  sim->add_option("--config", config_path, "experiment config (JSON)")->required();
  auto* sim_seed = sim->add_option("--seed", seed, "master seed override");
  sim->add_option("--threads", threads, "worker threads (speed only, never results)");
  sim->add_option("--out", out_dir, "output directory override");
  sim->add_flag("--json", json_out, "print summary.json to stdout");

  // beta
  auto* beta = app.add_subcommand("beta", "estimate P(T_0 < T_b) and derive beta_d");
  int d = 2, b_dir = 0, bracket_L = 0;
  std::uint64_t trials = 1000000, cutoff_radius = 0, cutoff_steps = 0, trunc_k = 0;
  beta->add_option("--d", d, "dimension (2..5)");
  beta->add_option("--trials", trials, "monte carlo trials");
  beta->add_option("--cutoff-radius", cutoff_radius, "radius cap for the race");
  beta->add_option("--cutoff-steps", cutoff_steps, "step cap for the race (disables jumps)");
  beta->add_option("--b", b_dir, "direction index of the neighbor b (0..2d-1)");
  beta->add_option("--bracket-L", bracket_L, "box radius for the certified bracket");
  beta->add_option("--k", trunc_k, "also estimate the k-truncated race and h_k");
  beta->add_option("--seed", seed, "master seed");
  beta->add_option("--threads", threads, "worker threads");
  beta->add_flag("--json", json_out, "emit JSON records");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact enumeration over all (2d)^n paths");
  int n = 2, p = 1;
  double threshold = 1.0;
  std::uint64_t event_value = 1;
  std::string stat = "M";
  oracle->add_option("--d", d, "dimension (2..5)");
  oracle->add_option("--n", n, "path length (budget: (2d)^n <= 1e8); horizon for events");
  oracle->add_option("--stat", stat, "M|M0|L|range_size|J|theta|trunc|tail0|tailb|tailjoint");
  oracle->add_option("--p", p, "multiplicity for J");
  oracle->add_option("--threshold", threshold, "visit threshold for theta");
  oracle->add_option("--b", b_dir, "direction index of b for hitting events");
  oracle->add_option("--value", event_value, "k (trunc) or m (tails)");
  oracle->add_option("--threads", threads, "worker threads");
  oracle->add_flag("--json", json_out, "emit the JSON record");

  // report
  auto* report = app.add_subcommand("report", "regenerate report.txt from stored outputs");
  std::string in_dir = ".";
  report->add_option("--in", in_dir, "directory holding raw.csv and summary.json")->required();

  // audit
  auto* audit = app.add_subcommand("audit", "tracker-vs-scratch property sweep");
  std::uint64_t paths = 1000, len = 1000;
  int enumerate_n = 0;
  audit->add_option("--d", d, "dimension (2..5)");
  audit->add_option("--paths", paths, "number of random paths");
  audit->add_option("--len", len, "length of each random path");
  audit->add_option("--enumerate-n", enumerate_n, "also audit all paths of this length");
  audit->add_option("--seed", seed, "master seed");
  audit->add_option("--threads", threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  if (sim->parsed())
    return cmd_simulate(config_path, seed, sim_seed->count() > 0, threads, out_dir, json_out);
  if (beta->parsed())
    return cmd_beta(d, trials, cutoff_radius, cutoff_steps, b_dir, bracket_L, seed, threads,
                    trunc_k, json_out);
  if (oracle->parsed())
    return cmd_oracle(d, n, stat, p, threshold, b_dir, event_value, threads, json_out);
  if (report->parsed()) return cmd_report(in_dir);
  if (audit->parsed()) return cmd_audit(d, paths, len, seed, enumerate_n, threads);
  return kExitUsage;
}
