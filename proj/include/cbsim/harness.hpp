#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "cbsim/env.hpp"
#include "cbsim/policies.hpp"

namespace cbsim {

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

// n log-spaced round indices in [1, horizon], deduplicated and always
// including the horizon itself.
std::vector<std::int64_t> log_checkpoints(std::int64_t horizon, int n = 32);

struct RunConfig {
  std::string run_id;
  std::string policy_name;
  std::string env_name;
  const Environment* env = nullptr;
  PolicyFactory make_policy;
  std::int64_t horizon = 0;
  int replicates = 1;
  std::uint64_t base_seed = 0;
  std::vector<std::int64_t> checkpoints;  // defaulted to log_checkpoints
  int threads = 0;                        // 0 = hardware concurrency
};

struct RegretCurve {
  std::vector<std::int64_t> checkpoints;
  std::vector<std::vector<double>> per_replicate;  // [replicate][checkpoint]
  std::vector<std::vector<int>> learner;  // selected slot at checkpoint, -1
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::vector<double> realized_mean;      // mean realized cumulative reward
};

RegretCurve run_simulation(const RunConfig& cfg);

std::vector<double> pseudo_regret(const Environment& env,
                                  const std::vector<ActionId>& actions);

struct ParetoRow {
  double z2;
  double benign_regret;
  double hard_regret;
};

struct SweepConfig {
  const Environment* benign_env = nullptr;
  const Environment* hard_env = nullptr;
  std::vector<double> z2_grid;
  std::int64_t horizon = 0;
  int replicates = 1;
  std::uint64_t base_seed = 0;
  double delta = 0.0;  // 0 = 1/T
  int threads = 0;
};

// Runs dynamic balancing over (C-UCB, UCB) on both environments for each Z2
// in the grid, with R2 = Z2 * sqrt(|A| T) and R1 = max(sqrt(|Z| T), |A|T/R2).
// Grid values yielding an invalid rate pair are skipped with a warning on
// stderr.
std::vector<ParetoRow> sweep_pareto(const SweepConfig& cfg);

// Rank correlation between the benign and hard regret columns.
double spearman_correlation(const std::vector<ParetoRow>& rows);

void write_regret_csv(std::ostream& out, const RunConfig& cfg,
                      const RegretCurve& curve);
void write_pareto_csv(std::ostream& out, const std::vector<ParetoRow>& rows);

// Stable 64-bit content hash (FNV-1a) used for the config fingerprint.
std::uint64_t fnv1a_hash(const std::string& text);

void write_metadata_json(std::ostream& out, const std::string& config_text,
                         std::uint64_t seed);

extern const char* const kCodeVersion;

}  // namespace cbsim
