#include "cbsim/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "json.hpp"

namespace cbsim {

namespace {
constexpr double kRowSumTol = 1e-12;
}

RewardModel RewardModel::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("bernoulli parameter out of [0,1]: " +
                                std::to_string(p));
  }
  return RewardModel{Kind::Bernoulli, p};
}

RewardModel RewardModel::deterministic(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument("deterministic reward out of [0,1]: " +
                                std::to_string(v));
  }
  return RewardModel{Kind::Deterministic, v};
}

double RewardModel::sample(Rng& rng) const {
  if (kind == Kind::Deterministic) return param;
  return rng.next_double() < param ? 1.0 : 0.0;
}

Environment::Environment(std::vector<std::vector<double>> marginals,
                         std::vector<std::vector<RewardModel>> rewards)
    : marginals_(std::move(marginals)), rewards_(std::move(rewards)) {
  if (marginals_.empty()) throw std::invalid_argument("empty action set");
  n_contexts_ = static_cast<int>(marginals_[0].size());
  if (n_contexts_ <= 0) throw std::invalid_argument("empty context set");
  if (rewards_.size() != marginals_.size()) {
    throw std::invalid_argument("marginals/rewards row count mismatch");
  }
  for (std::size_t a = 0; a < marginals_.size(); ++a) {
    const auto& row = marginals_[a];
    if (static_cast<int>(row.size()) != n_contexts_ ||
        static_cast<int>(rewards_[a].size()) != n_contexts_) {
      throw std::invalid_argument("ragged row at action " + std::to_string(a));
    }
    double sum = 0.0;
    for (std::size_t z = 0; z < row.size(); ++z) {
      if (row[z] < 0.0) {
        throw std::invalid_argument("negative marginal at row " +
                                    std::to_string(a) + ", column " +
                                    std::to_string(z));
      }
      sum += row[z];
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      throw std::invalid_argument("marginal row " + std::to_string(a) +
                                  " does not sum to 1 (sum=" +
                                  std::to_string(sum) + ")");
    }
  }
}

const std::vector<double>& Environment::marginal_row(ActionId a) const {
  return marginals_.at(static_cast<std::size_t>(a));
}

const RewardModel& Environment::reward_model(ActionId a, ContextId z) const {
  return rewards_.at(static_cast<std::size_t>(a))
      .at(static_cast<std::size_t>(z));
}

double Environment::mean_reward(ActionId a) const {
  const auto& row = marginal_row(a);
  double mu = 0.0;
  for (int z = 0; z < n_contexts_; ++z) {
    mu += row[static_cast<std::size_t>(z)] * reward_model(a, z).mean();
  }
  return mu;
}

std::pair<ActionId, double> Environment::optimal_stats() const {
  if (n_actions() < 2) throw std::invalid_argument("degenerate action set");
  ActionId best = 0;
  double best_mu = mean_reward(0);
  for (ActionId a = 1; a < n_actions(); ++a) {
    double mu = mean_reward(a);
    if (mu > best_mu) {
      best = a;
      best_mu = mu;
    }
  }
  double gap_min = std::numeric_limits<double>::infinity();
  for (ActionId a = 0; a < n_actions(); ++a) {
    if (a == best) continue;
    gap_min = std::min(gap_min, best_mu - mean_reward(a));
  }
  return {best, gap_min};
}

double Environment::gap(ActionId a) const {
  auto [a_star, g] = optimal_stats();
  (void)g;
  return mean_reward(a_star) - mean_reward(a);
}

double Environment::max_gap() const {
  auto [a_star, g] = optimal_stats();
  (void)g;
  double mu_star = mean_reward(a_star);
  double worst = 0.0;
  for (ActionId a = 0; a < n_actions(); ++a) {
    worst = std::max(worst, mu_star - mean_reward(a));
  }
  return worst;
}

StepOutcome Environment::sample_step(ActionId a, Rng& rng) const {
  const auto& row = marginal_row(a);
  double u = rng.next_double();
  double acc = 0.0;
  ContextId z = n_contexts_ - 1;
  for (int k = 0; k < n_contexts_; ++k) {
    acc += row[static_cast<std::size_t>(k)];
    if (u < acc) {
      z = k;
      break;
    }
  }
  return StepOutcome{z, reward_model(a, z).sample(rng)};
}

bool Environment::is_conditionally_benign(double tol) const {
  for (ContextId z = 0; z < n_contexts_; ++z) {
    const RewardModel* ref = nullptr;
    for (ActionId a = 0; a < n_actions(); ++a) {
      if (marginal_row(a)[static_cast<std::size_t>(z)] <= 0.0) continue;
      const RewardModel& m = reward_model(a, z);
      if (ref == nullptr) {
        ref = &m;
      } else if (!ref->same_kind(m) || std::abs(ref->mean() - m.mean()) > tol) {
        return false;
      }
    }
  }
  return true;
}

std::vector<double> Environment::context_means(double tol) const {
  if (!is_conditionally_benign(tol)) {
    throw std::invalid_argument(
        "context_means requires a conditionally benign environment");
  }
  std::vector<double> mu(static_cast<std::size_t>(n_contexts_), 0.0);
  for (ContextId z = 0; z < n_contexts_; ++z) {
    for (ActionId a = 0; a < n_actions(); ++a) {
      if (marginal_row(a)[static_cast<std::size_t>(z)] > 0.0) {
        mu[static_cast<std::size_t>(z)] = reward_model(a, z).mean();
        break;
      }
    }
  }
  return mu;
}

Environment benign_from_parts(const BenignSpec& spec) {
  if (spec.marginals.empty()) throw std::invalid_argument("empty marginals");
  const std::size_t n_contexts = spec.marginals[0].size();
  if (spec.mu_z.size() != n_contexts) {
    throw std::invalid_argument("mu_z length does not match context count");
  }
  for (double m : spec.mu_z) {
    if (!(m >= 0.0 && m <= 1.0)) {
      throw std::invalid_argument("mu_z entry out of [0,1]");
    }
  }
  std::vector<std::vector<RewardModel>> rewards;
  rewards.reserve(spec.marginals.size());
  for (std::size_t a = 0; a < spec.marginals.size(); ++a) {
    std::vector<RewardModel> row;
    row.reserve(n_contexts);
    for (std::size_t z = 0; z < n_contexts; ++z) {
      row.push_back(spec.reward_kind == RewardModel::Kind::Bernoulli
                        ? RewardModel::bernoulli(spec.mu_z[z])
                        : RewardModel::deterministic(spec.mu_z[z]));
    }
    rewards.push_back(std::move(row));
  }
  return Environment(spec.marginals, std::move(rewards));
}

int dim_span(const std::vector<std::vector<double>>& marginals, double tol) {
  if (marginals.empty()) throw std::invalid_argument("empty marginal matrix");
  const auto rows = static_cast<Eigen::Index>(marginals.size());
  const auto cols = static_cast<Eigen::Index>(marginals[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index a = 0; a < rows; ++a) {
    for (Eigen::Index z = 0; z < cols; ++z) {
      m(a, z) = marginals[static_cast<std::size_t>(a)]
                         [static_cast<std::size_t>(z)];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol * sv(0)) ++rank;
  }
  return rank;
}

namespace {

RewardModel reward_from_json(const nlohmann::json& j, std::size_t a,
                             std::size_t z) {
  const std::string where =
      " at row " + std::to_string(a) + ", column " + std::to_string(z);
  if (!j.is_object() || !j.contains("kind")) {
    throw std::invalid_argument("malformed reward model" + where);
  }
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "bernoulli") return RewardModel::bernoulli(j.at("p"));
    if (kind == "det") return RewardModel::deterministic(j.at("v"));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(e.what()) + where);
  }
  throw std::invalid_argument("unknown reward kind '" + kind + "'" + where);
}

}  // namespace

Environment load_environment_json(std::istream& in) {
  nlohmann::json j = nlohmann::json::parse(in);
  const int n_actions = j.at("n_actions").get<int>();
  const int n_contexts = j.at("n_contexts").get<int>();
  auto marginals = j.at("marginals").get<std::vector<std::vector<double>>>();
  if (static_cast<int>(marginals.size()) != n_actions) {
    throw std::invalid_argument("marginals row count does not match n_actions");
  }
  std::vector<std::vector<RewardModel>> rewards;
  const auto& jr = j.at("rewards");
  for (std::size_t a = 0; a < jr.size(); ++a) {
    std::vector<RewardModel> row;
    for (std::size_t z = 0; z < jr[a].size(); ++z) {
      row.push_back(reward_from_json(jr[a][z], a, z));
    }
    rewards.push_back(std::move(row));
  }
  Environment env(std::move(marginals), std::move(rewards));
  if (env.n_contexts() != n_contexts) {
    throw std::invalid_argument("marginal width does not match n_contexts");
  }
  return env;
}

Environment load_environment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open environment file: " + path);
  return load_environment_json(in);
}

std::string environment_to_json(const Environment& env) {
  nlohmann::json j;
  j["n_actions"] = env.n_actions();
  j["n_contexts"] = env.n_contexts();
  j["marginals"] = env.marginals();
  nlohmann::json rewards = nlohmann::json::array();
  for (ActionId a = 0; a < env.n_actions(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (ContextId z = 0; z < env.n_contexts(); ++z) {
      const RewardModel& m = env.reward_model(a, z);
      if (m.kind == RewardModel::Kind::Bernoulli) {
        row.push_back({{"kind", "bernoulli"}, {"p", m.param}});
      } else {
        row.push_back({{"kind", "det"}, {"v", m.param}});
      }
    }
    rewards.push_back(std::move(row));
  }
  j["rewards"] = std::move(rewards);
  return j.dump(2);
}

}  // namespace cbsim
