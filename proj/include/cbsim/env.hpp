#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cbsim/rng.hpp"

namespace cbsim {

using ActionId = int;
using ContextId = int;

// Reward conditional at one (action, context) cell. Only Bernoulli and
// point-mass conditionals appear in the instance families we support, which
// keeps exact mean computation closed-form.
struct RewardModel {
  enum class Kind { Bernoulli, Deterministic };
  Kind kind = Kind::Bernoulli;
  double param = 0.0;  // success probability, or the deterministic value

  static RewardModel bernoulli(double p);
  static RewardModel deterministic(double v);

  double mean() const { return param; }
  double sample(Rng& rng) const;
  bool same_kind(const RewardModel& other) const { return kind == other.kind; }
};

struct StepOutcome {
  ContextId context;
  double reward;
};

// Finite stochastic environment: per-action context marginals plus a reward
// conditional for every (action, context) cell. Immutable after construction
// and safe to share across threads.
class Environment {
 public:
  Environment(std::vector<std::vector<double>> marginals,
              std::vector<std::vector<RewardModel>> rewards);

  int n_actions() const { return static_cast<int>(marginals_.size()); }
  int n_contexts() const { return n_contexts_; }

  const std::vector<double>& marginal_row(ActionId a) const;
  const std::vector<std::vector<double>>& marginals() const {
    return marginals_;
  }
  const RewardModel& reward_model(ActionId a, ContextId z) const;

  double mean_reward(ActionId a) const;
  // Lowest-index maximizer of the mean reward and the minimal gap to it.
  std::pair<ActionId, double> optimal_stats() const;
  double gap(ActionId a) const;
  double max_gap() const;

  StepOutcome sample_step(ActionId a, Rng& rng) const;

  bool is_conditionally_benign(double tol = 1e-9) const;

  // Mean reward conditioned on each context, defined for benign environments
  // (the mean of the shared conditional; contexts no action reaches get 0).
  // Throws if the environment is not conditionally benign.
  std::vector<double> context_means(double tol = 1e-9) const;

 private:
  std::vector<std::vector<double>> marginals_;
  std::vector<std::vector<RewardModel>> rewards_;
  int n_contexts_ = 0;
};

// Benign environment described by marginals and a per-context mean vector.
struct BenignSpec {
  std::vector<std::vector<double>> marginals;
  std::vector<double> mu_z;
  RewardModel::Kind reward_kind = RewardModel::Kind::Bernoulli;
};

Environment benign_from_parts(const BenignSpec& spec);

// Numeric rank of the marginal matrix: singular values above tol times the
// largest one.
int dim_span(const std::vector<std::vector<double>>& marginals,
             double tol = 1e-9);

// JSON environment file format:
//   {"n_actions": A, "n_contexts": Z,
//    "marginals": [[...], ...],
//    "rewards": [[{"kind":"bernoulli","p":0.5} | {"kind":"det","v":0.7},...]]}
Environment load_environment_json(std::istream& in);
Environment load_environment_file(const std::string& path);
std::string environment_to_json(const Environment& env);

}  // namespace cbsim
