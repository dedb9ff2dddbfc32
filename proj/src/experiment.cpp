#include "walklab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "walklab/bracket.hpp"
#include "walklab/range_tracker.hpp"
#include "walklab/walk.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace walklab {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_short(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::uint64_t horizon_cap(int d) {
  return d == 2 ? (std::uint64_t{1} << 24) : (std::uint64_t{1} << 22);
}

}  // namespace

void ExperimentConfig::validate() const {
  check_dimension(d);
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (horizon < 2) throw std::invalid_argument("config: horizon must be >= 2");
  if (horizon > horizon_cap(d))
    throw std::invalid_argument("config: horizon exceeds the memory-guard cap for d=" +
                                std::to_string(d));
  if (deltas.empty()) throw std::invalid_argument("config: delta list must not be empty");
  for (double del : deltas)
    if (!(del > 0.0) || !(del < 1.0))
      throw std::invalid_argument("config: deltas must lie strictly in (0,1)");
  if (ps.empty()) throw std::invalid_argument("config: multiplicity list must not be empty");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i] < 1) throw std::invalid_argument("config: multiplicities must be >= 1");
    if (i > 0 && ps[i] <= ps[i - 1])
      throw std::invalid_argument("config: multiplicities must increase");
  }
  const auto cks = effective_checkpoints();
  if (cks.empty()) throw std::invalid_argument("config: no checkpoints");
  for (std::size_t i = 0; i < cks.size(); ++i) {
    if (cks[i] < 2) throw std::invalid_argument("config: checkpoints must be >= 2");
    if (cks[i] > horizon) throw std::invalid_argument("config: checkpoint beyond horizon");
    if (i > 0 && cks[i] <= cks[i - 1])
      throw std::invalid_argument("config: checkpoints must increase strictly");
  }
  for (double b : theta_tilde_betas)
    if (!(b > 0.0)) throw std::invalid_argument("config: theta-tilde betas must be positive");
}

std::vector<std::uint64_t> ExperimentConfig::effective_checkpoints() const {
  if (!checkpoints.empty()) return checkpoints;
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 16; n <= horizon; n <<= 1) out.push_back(n);
  if (out.empty() || out.back() != horizon) out.push_back(horizon);
  return out;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");

  static const char* known[] = {"d",      "horizon", "checkpoints", "trials",
                                "master_seed", "deltas",  "ps",          "theta_tilde_betas",
                                "beta_source", "output_dir", "threads"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw std::invalid_argument("config: unknown key '" + item.key() + "'");
  }

  ExperimentConfig cfg;
  if (j.contains("d")) cfg.d = j["d"].get<int>();
  if (j.contains("horizon")) cfg.horizon = j["horizon"].get<std::uint64_t>();
  if (j.contains("checkpoints")) cfg.checkpoints = j["checkpoints"].get<std::vector<std::uint64_t>>();
  if (j.contains("trials")) cfg.trials = j["trials"].get<std::uint64_t>();
  if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("deltas")) cfg.deltas = j["deltas"].get<std::vector<double>>();
  if (j.contains("ps")) cfg.ps = j["ps"].get<std::vector<int>>();
  if (j.contains("theta_tilde_betas"))
    cfg.theta_tilde_betas = j["theta_tilde_betas"].get<std::vector<double>>();
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();

  if (j.contains("beta_source")) {
    const auto& bs = j["beta_source"];
    if (!bs.is_object()) throw std::invalid_argument("config: beta_source must be an object");
    static const char* bs_known[] = {"kind", "box_radius", "trials", "cutoff_radius", "p"};
    for (const auto& item : bs.items()) {
      bool ok = false;
      for (const char* k : bs_known) ok = ok || item.key() == k;
      if (!ok) throw std::invalid_argument("config: unknown beta_source key '" + item.key() + "'");
    }
    const std::string kind = bs.value("kind", std::string("bracket-midpoint"));
    if (kind == "bracket-midpoint")
      cfg.beta_source.kind = BetaSourceSpec::Kind::BracketMidpoint;
    else if (kind == "bracket-lower")
      cfg.beta_source.kind = BetaSourceSpec::Kind::BracketLower;
    else if (kind == "monte-carlo")
      cfg.beta_source.kind = BetaSourceSpec::Kind::MonteCarlo;
    else if (kind == "user")
      cfg.beta_source.kind = BetaSourceSpec::Kind::UserValue;
    else
      throw std::invalid_argument("config: unknown beta_source kind '" + kind + "'");
    if (bs.contains("box_radius")) cfg.beta_source.box_radius = bs["box_radius"].get<int>();
    if (bs.contains("trials")) cfg.beta_source.trials = bs["trials"].get<std::uint64_t>();
    if (bs.contains("cutoff_radius"))
      cfg.beta_source.cutoff_radius = bs["cutoff_radius"].get<std::uint64_t>();
    if (bs.contains("p")) cfg.beta_source.p_value = bs["p"].get<double>();
  } else {
    cfg.beta_source.kind = cfg.d == 2 ? BetaSourceSpec::Kind::BracketMidpoint
                                      : BetaSourceSpec::Kind::MonteCarlo;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WALKLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

BetaConstant resolve_beta(const ExperimentConfig& config, int threads) {
  const BetaSourceSpec& spec = config.beta_source;
  switch (spec.kind) {
    case BetaSourceSpec::Kind::UserValue:
      return BetaConstant::from_p(spec.p_value, BetaConstant::Source::UserSupplied);
    case BetaSourceSpec::Kind::BracketMidpoint:
    case BetaSourceSpec::Kind::BracketLower: {
      const int L = spec.box_radius > 0 ? spec.box_radius : default_bracket_radius(config.d);
      const ExactBracket br = config.d == 2
                                  ? exact_bracket_2d(0, L, 1e-12, threads)
                                  : exact_bracket_highd(config.d, 0, L, 1e-12, threads);
      const double p = spec.kind == BetaSourceSpec::Kind::BracketMidpoint ? br.midpoint()
                                                                          : br.lower;
      return BetaConstant::from_p(p, BetaConstant::Source::ExactBracket);
    }
    case BetaSourceSpec::Kind::MonteCarlo: {
      const std::uint64_t radius =
          spec.cutoff_radius > 0 ? spec.cutoff_radius : (config.d == 2 ? 10000 : 1000);
      const JumpTables jumps = JumpTables::build(
          config.d, JumpTables::default_radii(config.d, radius), 1e-13, threads);
      const HittingEstimate est = estimate_return_before_neighbor(
          config.d, 0, CutoffPolicy::radius_cap(radius), spec.trials,
          hash64(config.master_seed, 0xbe7a50u), &jumps, threads);
      // In d=2 the undecided mass resolves symmetrically, so the midpoint
      // score is the right point estimate.  In transient dimensions most of
      // the undecided mass never returns, so the pessimistic score is the
      // consistent estimate of P(T_0 < T_b).
      const double p = config.d == 2 ? est.probability : est.p_pessimistic;
      return BetaConstant::from_p(p, BetaConstant::Source::MonteCarlo);
    }
  }
  throw std::logic_error("unreachable beta source");
}

// --- trial farm ---------------------------------------------------------------

namespace {

std::vector<TrialCheckpointRow> run_trial(const ExperimentConfig& config,
                                          const BetaConstant& beta,
                                          const std::vector<std::uint64_t>& cks,
                                          std::uint64_t trial) {
  const bool want_tilde = !config.theta_tilde_betas.empty();
  VisitTimesPolicy times_policy;
  if (want_tilde) {
    double beta_max = 0.0;
    for (double b : config.theta_tilde_betas) beta_max = std::max(beta_max, b);
    times_policy.retain = true;
    times_policy.max_per_site = static_cast<std::uint32_t>(
        std::ceil(beta_max * std::log(static_cast<double>(config.horizon)))) + 1;
  }

  RngStream rng(config.master_seed, trial);
  DirectionSampler dirs(config.d, rng);
  RangeState state(config.d, times_policy);
  DirectionLog log;
  log.d = config.d;
  if (want_tilde) log.dirs.reserve(config.horizon);

  std::vector<TrialCheckpointRow> rows;
  rows.reserve(cks.size());
  std::size_t ci = 0;
  for (std::uint64_t step_i = 1; step_i <= config.horizon && ci < cks.size(); ++step_i) {
    const int dir = dirs.next();
    state.advance_dir(dir);
    if (want_tilde) log.dirs.push_back(static_cast<std::uint8_t>(dir));
    if (step_i != cks[ci]) continue;

    const StatSnapshot snap = snapshot(state, beta, config.deltas, config.ps);
    TrialCheckpointRow row;
    row.n = snap.n;
    row.trial = trial;
    row.M = snap.M;
    row.M0 = snap.M0;
    row.L = snap.L;
    row.range_size = snap.range_size;
    for (double del : config.deltas) row.theta.push_back(snap.Theta.at(del));
    for (int p : config.ps) row.j.push_back(snap.J.at(p));
    if (want_tilde) {
      DirectionLog prefix;
      prefix.d = config.d;
      prefix.dirs.assign(log.dirs.begin(), log.dirs.begin() + static_cast<long>(step_i));
      const WalkPath path = prefix.materialize();
      for (double b : config.theta_tilde_betas)
        row.theta_tilde.push_back(theta_tilde(path, b, step_i));
    }
    rows.push_back(std::move(row));
    ++ci;
  }
  return rows;
}

MeanSe summarize_ratio(const std::vector<double>& values) { return summarize(values); }

std::vector<AggregateRow> aggregate_rows(const ExperimentConfig& config,
                                         const std::vector<TrialCheckpointRow>& rows,
                                         const std::vector<std::uint64_t>& cks) {
  std::vector<AggregateRow> out;
  const std::size_t T = config.trials;
  for (std::size_t ci = 0; ci < cks.size(); ++ci) {
    AggregateRow agg;
    agg.n = cks[ci];
    const double logn = std::log(static_cast<double>(agg.n));

    std::vector<double> vM, vM0, vL, vR, v_m_ratio, v_m0_scaled;
    vM.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
      const TrialCheckpointRow& row = rows[ci * T + t];
      vM.push_back(static_cast<double>(row.M));
      vM0.push_back(static_cast<double>(row.M0));
      vL.push_back(static_cast<double>(row.L));
      vR.push_back(static_cast<double>(row.range_size));
      v_m_ratio.push_back(static_cast<double>(row.M) / logn);
      v_m0_scaled.push_back(config.d == 2 ? static_cast<double>(row.M0) / (logn * logn)
                                          : static_cast<double>(row.M0) / logn);
    }
    agg.M = summarize(vM);
    agg.M0 = summarize(vM0);
    agg.L = summarize(vL);
    agg.range_size = summarize(vR);
    agg.m_over_logn = summarize_ratio(v_m_ratio);
    agg.m0_scaled = summarize_ratio(v_m0_scaled);

    for (std::size_t di = 0; di < config.deltas.size(); ++di) {
      std::vector<double> vt, vlt;
      vt.reserve(T);
      for (std::size_t t = 0; t < T; ++t) {
        const double theta = static_cast<double>(rows[ci * T + t].theta[di]);
        vt.push_back(theta);
        vlt.push_back(std::log(std::max(theta, 1.0)) / logn);
      }
      agg.theta.push_back(summarize(vt));
      agg.log_theta_over_logn.push_back(summarize_ratio(vlt));
    }
    for (std::size_t pi = 0; pi < config.ps.size(); ++pi) {
      std::vector<double> vj;
      vj.reserve(T);
      for (std::size_t t = 0; t < T; ++t)
        vj.push_back(static_cast<double>(rows[ci * T + t].j[pi]));
      agg.j.push_back(summarize(vj));
    }

    agg.l_scaled = agg.L.mean * logn * logn / static_cast<double>(agg.n);
    for (std::size_t pi = 0; pi + 1 < config.ps.size(); ++pi) {
      if (config.ps[pi + 1] != config.ps[pi] + 1) {
        agg.j_ratio.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      agg.j_ratio.push_back(agg.j[pi].mean > 0.0 ? agg.j[pi + 1].mean / agg.j[pi].mean
                                                 : std::numeric_limits<double>::quiet_NaN());
    }
    out.push_back(std::move(agg));
  }
  return out;
}

PassFlags compute_flags(const ExperimentConfig& config, const BetaConstant& beta,
                        const std::vector<TrialCheckpointRow>& rows,
                        const std::vector<AggregateRow>& aggs) {
  PassFlags flags;
  const std::size_t T = config.trials;
  const std::size_t C = aggs.size();

  flags.m_le_m0_everywhere = true;
  for (const TrialCheckpointRow& row : rows)
    if (row.M > row.M0) flags.m_le_m0_everywhere = false;

  // trend over the last up-to-5 checkpoints: each decrease of the mean
  // M/log n must stay within one standard error of the difference of the
  // two checkpoint means
  flags.m_ratio_trend = true;
  const std::size_t first = C > 5 ? C - 5 : 0;
  for (std::size_t ci = first; ci + 1 < C; ++ci) {
    const MeanSe& a = aggs[ci].m_over_logn;
    const MeanSe& b = aggs[ci + 1].m_over_logn;
    const double se_diff = std::sqrt(a.se * a.se + b.se * b.se);
    if (b.mean < a.mean - se_diff) flags.m_ratio_trend = false;
  }

  const AggregateRow& last = aggs.back();
  if (config.d == 2)
    flags.m_ratio_final_band = last.m_over_logn.mean >= 0.7 && last.m_over_logn.mean <= 1.6;
  else
    flags.m_ratio_final_band = std::abs(last.m_over_logn.mean - beta.value) <= 0.35;

  flags.theta_monotone_in_delta = true;
  for (const AggregateRow& agg : aggs)
    for (std::size_t di = 0; di + 1 < agg.log_theta_over_logn.size(); ++di)
      if (agg.log_theta_over_logn[di + 1].mean > agg.log_theta_over_logn[di].mean + 1e-12)
        flags.theta_monotone_in_delta = false;

  flags.theta_half_band = true;
  for (std::size_t di = 0; di < config.deltas.size(); ++di) {
    if (std::abs(config.deltas[di] - 0.5) < 1e-9) {
      const double v = last.log_theta_over_logn[di].mean;
      flags.theta_half_band = v >= 0.3 && v <= 0.7;
    }
  }

  if (config.d == 2) {
    flags.l_band = true;
    const std::size_t lfirst = C > 3 ? C - 3 : 0;
    for (std::size_t ci = lfirst; ci < C; ++ci)
      if (aggs[ci].l_scaled < 3.0 || aggs[ci].l_scaled > 25.0) flags.l_band = false;
  } else {
    flags.l_band = true;  // the (log n)^2/n scaling is a d=2 statement
  }

  // pooled multiplicity-decay ratio over p in {1..4}
  double num = 0.0, den = 0.0;
  for (std::size_t pi = 0; pi + 1 < config.ps.size(); ++pi) {
    if (config.ps[pi] > 4 || config.ps[pi + 1] != config.ps[pi] + 1) continue;
    num += last.j[pi + 1].mean;
    den += last.j[pi].mean;
  }
  const double pooled = den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
  flags.j_ratio_band = std::isfinite(pooled) && std::abs(pooled - beta.p_estimate) <= 0.1;

  std::uint64_t strict = 0;
  for (std::size_t t = 0; t < T; ++t)
    if (rows[(C - 1) * T + t].M0 > rows[(C - 1) * T + t].M) ++strict;
  flags.strict_m0_fraction = static_cast<double>(strict) / static_cast<double>(T);
  flags.strict_m0_majority = flags.strict_m0_fraction >= 0.5;
  return flags;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files) {
  config.validate();
  const int threads = resolve_threads(config.threads);
  const std::vector<std::uint64_t> cks = config.effective_checkpoints();

  ExperimentResult result;
  result.config = config;
  result.beta = resolve_beta(config, threads);

  // rows indexed by (checkpoint, trial); each worker owns whole trials
  result.rows.assign(cks.size() * config.trials, TrialCheckpointRow{});
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (long long t = 0; t < static_cast<long long>(config.trials); ++t) {
    const std::vector<TrialCheckpointRow> rows =
        run_trial(config, result.beta, cks, static_cast<std::uint64_t>(t));
    for (std::size_t ci = 0; ci < cks.size(); ++ci)
      result.rows[ci * config.trials + static_cast<std::size_t>(t)] = rows[ci];
  }

  result.aggregates = aggregate_rows(config, result.rows, cks);
  result.flags = compute_flags(config, result.beta, result.rows, result.aggregates);

  if (write_files) {
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);
    const auto write = [&](const char* name, const std::string& text) {
      const fs::path p = fs::path(config.output_dir) / name;
      std::ofstream out(p, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open output file " + p.string());
      out << text;
      if (!out) throw std::runtime_error("write failed for " + p.string());
    };
    write("raw.csv", render_raw_csv(result));
    write("aggregate.csv", render_aggregate_csv(result));
    write("summary.json", render_summary_json(result));
    write("report.txt", convergence_report(result));
  }
  return result;
}

// --- rendering -----------------------------------------------------------------

std::string render_raw_csv(const ExperimentResult& result) {
  const ExperimentConfig& config = result.config;
  std::string out = "n,trial,M,M0,L,range_size";
  for (double del : config.deltas) out += ",theta_" + fmt_short(del);
  for (int p : config.ps) out += ",J_" + std::to_string(p);
  for (double b : config.theta_tilde_betas) out += ",theta_tilde_" + fmt_short(b);
  out += "\n";
  for (const TrialCheckpointRow& row : result.rows) {
    out += std::to_string(row.n) + "," + std::to_string(row.trial) + "," + std::to_string(row.M) +
           "," + std::to_string(row.M0) + "," + std::to_string(row.L) + "," +
           std::to_string(row.range_size);
    for (std::uint64_t v : row.theta) out += "," + std::to_string(v);
    for (std::uint64_t v : row.j) out += "," + std::to_string(v);
    for (std::uint64_t v : row.theta_tilde) out += "," + std::to_string(v);
    out += "\n";
  }
  return out;
}

std::string render_aggregate_csv(const ExperimentResult& result) {
  const ExperimentConfig& config = result.config;
  std::string out;
  out += "# aggregate statistics over trials, one row per checkpoint\n";
  out += "# conventions: *_mean/_se/_min/_max are per-trial summaries;\n";
  out += "#   m_over_logn and log_theta_* are means of per-trial ratios (a.s. limit laws);\n";
  out += "#   l_scaled = mean(L)*(log n)^2/n and j_ratio_p = mean(J_{p+1})/mean(J_p)\n";
  out += "#   are ratios of means (expectation laws); theta ratios use log(max(Theta,1)).\n";
  out += "# beta_d = " + fmt17(result.beta.value) + " (p_estimate = " +
         fmt17(result.beta.p_estimate) + ")\n";
  out += "n";
  const auto add_stat_cols = [&](const std::string& s) {
    out += "," + s + "_mean," + s + "_se," + s + "_min," + s + "_max";
  };
  add_stat_cols("M");
  add_stat_cols("M0");
  add_stat_cols("L");
  add_stat_cols("range_size");
  for (double del : config.deltas) add_stat_cols("theta_" + fmt_short(del));
  for (int p : config.ps) add_stat_cols("J_" + std::to_string(p));
  out += ",m_over_logn_mean,m_over_logn_se";
  out += config.d == 2 ? ",m0_over_log2n_mean,m0_over_log2n_se" : ",m0_over_logn_mean,m0_over_logn_se";
  for (double del : config.deltas)
    out += ",log_theta_" + fmt_short(del) + "_over_logn_mean,log_theta_" + fmt_short(del) +
           "_over_logn_se";
  out += ",l_scaled";
  for (std::size_t pi = 0; pi + 1 < config.ps.size(); ++pi)
    out += ",j_ratio_" + std::to_string(config.ps[pi]);
  out += "\n";

  const auto emit_stat = [&](const MeanSe& s) {
    out += "," + fmt17(s.mean) + "," + fmt17(s.se) + "," + fmt17(s.min) + "," + fmt17(s.max);
  };
  for (const AggregateRow& agg : result.aggregates) {
    out += std::to_string(agg.n);
    emit_stat(agg.M);
    emit_stat(agg.M0);
    emit_stat(agg.L);
    emit_stat(agg.range_size);
    for (const MeanSe& s : agg.theta) emit_stat(s);
    for (const MeanSe& s : agg.j) emit_stat(s);
    out += "," + fmt17(agg.m_over_logn.mean) + "," + fmt17(agg.m_over_logn.se);
    out += "," + fmt17(agg.m0_scaled.mean) + "," + fmt17(agg.m0_scaled.se);
    for (const MeanSe& s : agg.log_theta_over_logn)
      out += "," + fmt17(s.mean) + "," + fmt17(s.se);
    out += "," + fmt17(agg.l_scaled);
    for (double r : agg.j_ratio) out += "," + fmt17(r);
    out += "\n";
  }
  return out;
}

std::string render_summary_json(const ExperimentResult& result) {
  const ExperimentConfig& config = result.config;
  ordered_json j;
  ordered_json echo;
  echo["d"] = config.d;
  echo["horizon"] = config.horizon;
  echo["checkpoints"] = config.effective_checkpoints();
  echo["trials"] = config.trials;
  echo["master_seed"] = config.master_seed;
  echo["deltas"] = config.deltas;
  echo["ps"] = config.ps;
  echo["theta_tilde_betas"] = config.theta_tilde_betas;
  // thread count deliberately not echoed: outputs are thread-count independent
  j["config_echo"] = echo;

  ordered_json beta;
  beta["value"] = result.beta.value;
  beta["p_estimate"] = result.beta.p_estimate;
  beta["source"] = result.beta.source == BetaConstant::Source::ExactBracket ? "exact-bracket"
                   : result.beta.source == BetaConstant::Source::MonteCarlo ? "monte-carlo"
                                                                            : "user-supplied";
  j["beta_constant"] = beta;

  ordered_json rows = ordered_json::array();
  for (const AggregateRow& agg : result.aggregates) {
    ordered_json r;
    r["n"] = agg.n;
    r["M_mean"] = agg.M.mean;
    r["M0_mean"] = agg.M0.mean;
    r["L_mean"] = agg.L.mean;
    r["range_size_mean"] = agg.range_size.mean;
    r["m_over_logn"] = agg.m_over_logn.mean;
    r["m_over_logn_se"] = agg.m_over_logn.se;
    r["m0_scaled"] = agg.m0_scaled.mean;
    ordered_json lt = ordered_json::array();
    for (const MeanSe& s : agg.log_theta_over_logn) lt.push_back(s.mean);
    r["log_theta_over_logn"] = lt;
    r["l_scaled"] = agg.l_scaled;
    r["j_ratio"] = agg.j_ratio;
    rows.push_back(r);
  }
  j["per_checkpoint"] = rows;

  ordered_json flags;
  flags["m_le_m0_everywhere"] = result.flags.m_le_m0_everywhere;
  flags["m_ratio_trend"] = result.flags.m_ratio_trend;
  flags["m_ratio_final_band"] = result.flags.m_ratio_final_band;
  flags["theta_monotone_in_delta"] = result.flags.theta_monotone_in_delta;
  flags["theta_half_band"] = result.flags.theta_half_band;
  flags["l_band"] = result.flags.l_band;
  flags["j_ratio_band"] = result.flags.j_ratio_band;
  flags["strict_m0_fraction"] = result.flags.strict_m0_fraction;
  flags["strict_m0_majority"] = result.flags.strict_m0_majority;
  j["pass_flags"] = flags;
  return j.dump(2) + "\n";
}

std::string convergence_report(const ExperimentResult& result) {
  const ExperimentConfig& config = result.config;
  if (result.aggregates.size() < 3)
    throw std::invalid_argument("convergence_report: needs aggregates from >= 3 checkpoints");
  char buf[256];
  std::string out;
  out += "convergence report\n==================\n";
  std::snprintf(buf, sizeof buf, "d=%d horizon=%llu trials=%llu seed=%llu\n", config.d,
                static_cast<unsigned long long>(config.horizon),
                static_cast<unsigned long long>(config.trials),
                static_cast<unsigned long long>(config.master_seed));
  out += buf;
  std::snprintf(buf, sizeof buf, "beta_d = %.6f  (p_estimate = %.6f, source = %s)\n",
                result.beta.value, result.beta.p_estimate,
                result.beta.source == BetaConstant::Source::ExactBracket ? "exact-bracket"
                : result.beta.source == BetaConstant::Source::MonteCarlo ? "monte-carlo"
                                                                         : "user-supplied");
  out += buf;
  out += "targets:\n";
  std::snprintf(buf, sizeof buf, "  M(n)/log n            -> beta_d = %.4f\n", result.beta.value);
  out += buf;
  for (double del : config.deltas) {
    std::snprintf(buf, sizeof buf, "  log Theta(%.4g)/log n -> 1-delta = %.4f\n", del, 1.0 - del);
    out += buf;
  }
  if (config.d == 2) {
    out += "  E L_n (log n)^2 / n   -> [pi^2/2, 2 pi^2] = [4.9348, 19.7392]\n";
  }
  std::snprintf(buf, sizeof buf, "  J(p+1)/J(p)           -> c~ = %.4f\n", result.beta.p_estimate);
  out += buf;

  out += "\n        n   M/logn (se)      M0-scaled";
  for (double del : config.deltas) {
    std::snprintf(buf, sizeof buf, "  logTheta(%.3g)", del);
    out += buf;
  }
  out += "   L-scaled  J-ratio(pooled)\n";
  for (const AggregateRow& agg : result.aggregates) {
    double pooled_num = 0.0, pooled_den = 0.0;
    for (std::size_t pi = 0; pi + 1 < config.ps.size(); ++pi) {
      if (config.ps[pi] > 4 || config.ps[pi + 1] != config.ps[pi] + 1) continue;
      pooled_num += agg.j[pi + 1].mean;
      pooled_den += agg.j[pi].mean;
    }
    const double pooled = pooled_den > 0 ? pooled_num / pooled_den : 0.0;
    std::snprintf(buf, sizeof buf, "%9llu   %.4f (%.4f)   %8.4f",
                  static_cast<unsigned long long>(agg.n), agg.m_over_logn.mean,
                  agg.m_over_logn.se, agg.m0_scaled.mean);
    out += buf;
    for (const MeanSe& s : agg.log_theta_over_logn) {
      std::snprintf(buf, sizeof buf, "       %7.4f", s.mean);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "   %8.4f   %7.4f\n", agg.l_scaled, pooled);
    out += buf;
  }

  const auto flag_line = [&](bool pass, const char* text) {
    out += pass ? "  [PASS] " : "  [FAIL] ";
    out += text;
    out += "\n";
  };
  out += "\nflags:\n";
  flag_line(result.flags.m_le_m0_everywhere, "M <= M0 on every row (hard invariant)");
  flag_line(result.flags.m_ratio_trend,
            "M/log n nondecreasing over the last 5 checkpoints (within 1 paired SE)");
  flag_line(result.flags.m_ratio_final_band,
            config.d == 2 ? "final M/log n inside [0.7, 1.6]"
                          : "final M/log n within +-0.35 of beta_d");
  flag_line(result.flags.theta_monotone_in_delta,
            "log Theta(delta)/log n nonincreasing in delta at every checkpoint");
  flag_line(result.flags.theta_half_band,
            "final log Theta(0.5)/log n inside [0.3, 0.7] (target 0.5)");
  if (config.d == 2) flag_line(result.flags.l_band, "E L_n (log n)^2/n inside [3, 25] at the last 3 checkpoints");
  flag_line(result.flags.j_ratio_band, "pooled J(p+1)/J(p) within 0.1 of c~");
  std::snprintf(buf, sizeof buf, "  strict M0 > M fraction at the last checkpoint: %.4f (majority: %s)\n",
                result.flags.strict_m0_fraction,
                result.flags.strict_m0_majority ? "yes" : "no");
  out += buf;
  return out;
}

ExperimentResult result_from_raw_csv(const std::string& csv_text, const ExperimentConfig& config,
                                     const BetaConstant& beta) {
  ExperimentResult result;
  result.config = config;
  result.beta = beta;

  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("raw csv: empty file");
  const std::size_t n_theta = config.deltas.size();
  const std::size_t n_ps = config.ps.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::uint64_t> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(std::stoull(cell));
    if (cells.size() < 6 + n_theta + n_ps)
      throw std::invalid_argument("raw csv: short row");
    TrialCheckpointRow row;
    row.n = cells[0];
    row.trial = cells[1];
    row.M = cells[2];
    row.M0 = cells[3];
    row.L = cells[4];
    row.range_size = cells[5];
    for (std::size_t i = 0; i < n_theta; ++i) row.theta.push_back(cells[6 + i]);
    for (std::size_t i = 0; i < n_ps; ++i) row.j.push_back(cells[6 + n_theta + i]);
    result.rows.push_back(std::move(row));
  }
  const std::vector<std::uint64_t> cks = config.effective_checkpoints();
  if (result.rows.size() != cks.size() * config.trials)
    throw std::invalid_argument("raw csv: row count does not match the config");
  std::sort(result.rows.begin(), result.rows.end(),
            [](const TrialCheckpointRow& a, const TrialCheckpointRow& b) {
              return a.n != b.n ? a.n < b.n : a.trial < b.trial;
            });
  result.aggregates = aggregate_rows(config, result.rows, cks);
  result.flags = compute_flags(config, result.beta, result.rows, result.aggregates);
  return result;
}

}  // namespace walklab
