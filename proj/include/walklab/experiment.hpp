#pragma once

// Reproducible experiment campaigns: a farm of independent walk trials,
// dyadic checkpoint snapshots, deterministic aggregation, and convergence
// reports against the limit-law targets.
//
// Outputs are a pure function of the configuration minus the thread count:
// trial t draws from stream id t regardless of scheduling, per-trial rows are
// stored by index, and aggregation always folds in trial order.

#include <cstdint>
#include <string>
#include <vector>

#include "walklab/hitting.hpp"
#include "walklab/range_stats.hpp"
#include "walklab/stats_util.hpp"

namespace walklab {

struct BetaSourceSpec {
  enum class Kind { BracketMidpoint, BracketLower, MonteCarlo, UserValue };
  Kind kind = Kind::BracketMidpoint;
  int box_radius = 0;             // bracket sources; 0 picks the per-dimension default
  std::uint64_t trials = 200000;  // monte-carlo source
  std::uint64_t cutoff_radius = 0;  // monte-carlo source; 0 picks the default
  double p_value = 0.5;           // user-supplied P(T_0 < T_b)
};

struct ExperimentConfig {
  int d = 2;
  std::uint64_t horizon = std::uint64_t{1} << 20;
  std::vector<std::uint64_t> checkpoints;  // default: powers of two from 2^4 to horizon
  std::uint64_t trials = 100;
  std::uint64_t master_seed = 0;
  std::vector<double> deltas = {0.25, 0.5, 0.75};
  std::vector<int> ps = {1, 2, 3, 4, 5, 6};
  std::vector<double> theta_tilde_betas;  // empty switches the diagnostic off
  BetaSourceSpec beta_source;
  std::string output_dir = ".";
  int threads = 0;  // affects speed only, never results

  void validate() const;
  std::vector<std::uint64_t> effective_checkpoints() const;
};

// Parses a config from JSON text; unknown keys are rejected.
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

struct TrialCheckpointRow {
  std::uint64_t n = 0;
  std::uint64_t trial = 0;
  std::uint64_t M = 0, M0 = 0, L = 0, range_size = 0;
  std::vector<std::uint64_t> theta;        // per delta
  std::vector<std::uint64_t> j;            // per p
  std::vector<std::uint64_t> theta_tilde;  // per configured beta
};

struct AggregateRow {
  std::uint64_t n = 0;
  MeanSe M, M0, L, range_size;
  std::vector<MeanSe> theta, j;
  // derived ratios; convention per column is documented in the output header
  MeanSe m_over_logn;                       // mean of per-trial M/log n
  MeanSe m0_scaled;                         // M0/(log n)^2 in d=2, M0/log n in d>=3
  std::vector<MeanSe> log_theta_over_logn;  // per delta: log(max(Theta,1))/log n
  double l_scaled = 0.0;                    // mean(L) * (log n)^2 / n
  std::vector<double> j_ratio;              // mean J(p+1) / mean J(p)
};

struct PassFlags {
  bool m_le_m0_everywhere = false;       // hard invariant over every row
  bool m_ratio_trend = false;            // M/log n: last-5 nondecreasing within 1 SE of each diff
  bool m_ratio_final_band = false;       // final M/log n inside the calibrated band
  bool theta_monotone_in_delta = false;  // at every checkpoint
  bool theta_half_band = false;          // final log Theta(0.5)/log n inside [0.3, 0.7]
  bool l_band = false;                   // E L_n (log n)^2 / n inside [3, 25]  (d=2)
  bool j_ratio_band = false;             // pooled J(p+1)/J(p) near c~
  double strict_m0_fraction = 0.0;       // trials with M0 > M at the last checkpoint
  bool strict_m0_majority = false;
};

struct ExperimentResult {
  ExperimentConfig config;
  BetaConstant beta;
  std::vector<TrialCheckpointRow> rows;  // sorted by (n, trial)
  std::vector<AggregateRow> aggregates;  // per checkpoint
  PassFlags flags;
};

BetaConstant resolve_beta(const ExperimentConfig& config, int threads);

// Runs the farm; when write_files is set, emits raw.csv, aggregate.csv,
// summary.json and report.txt under config.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files = true);

std::string render_raw_csv(const ExperimentResult& result);
std::string render_aggregate_csv(const ExperimentResult& result);
std::string render_summary_json(const ExperimentResult& result);
std::string convergence_report(const ExperimentResult& result);

// Recomputes aggregates, flags and the report from a raw.csv produced by a
// previous run (the `report` subcommand).
ExperimentResult result_from_raw_csv(const std::string& csv_text, const ExperimentConfig& config,
                                     const BetaConstant& beta);

int resolve_threads(int requested);  // --threads / WALKLAB_THREADS / library default

}  // namespace walklab
