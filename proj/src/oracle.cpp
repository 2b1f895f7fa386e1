#include "cbsim/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbsim {

double kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("kl_bernoulli arguments out of [0,1]");
  }
  if ((q == 0.0 || q == 1.0) && p != q) {
    throw std::domain_error("infinite divergence: q is degenerate and p != q");
  }
  if (p == q) return 0.0;
  auto term = [](double a, double b) {
    return a == 0.0 ? 0.0 : a * std::log(a / b);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

namespace {

double grid_gap(const std::vector<Eigen::VectorXd>& vectors,
                const std::vector<Eigen::MatrixXd>& outers,
                const std::vector<int>& counts, int resolution) {
  const Eigen::Index d = vectors[0].size();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t a = 0; a < outers.size(); ++a) {
    if (counts[a] > 0) {
      v.noalias() +=
          (static_cast<double>(counts[a]) / resolution) * outers[a];
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
  if (!lu.isInvertible()) return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd inv = lu.inverse();
  double g = 0.0;
  for (const auto& vec : vectors) {
    g = std::max(g, static_cast<double>(vec.dot(inv * vec)));
  }
  return g;
}

void enumerate_compositions(int remaining, std::size_t pos,
                            std::vector<int>& counts,
                            const std::function<void()>& visit) {
  if (pos + 1 == counts.size()) {
    counts[pos] = remaining;
    visit();
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    counts[pos] = k;
    enumerate_compositions(remaining - k, pos + 1, counts, visit);
  }
}

}  // namespace

Design exact_design_grid(const std::vector<Eigen::VectorXd>& vectors,
                         int resolution) {
  if (vectors.empty()) throw std::invalid_argument("empty vector set");
  if (vectors.size() > 5) {
    throw std::invalid_argument(
        "exact_design_grid limited to 5 actions (combinatorial grid)");
  }
  if (resolution < 10) throw std::invalid_argument("resolution must be >= 10");

  std::vector<Eigen::MatrixXd> outers;
  outers.reserve(vectors.size());
  for (const auto& v : vectors) outers.push_back(v * v.transpose());

  std::vector<int> counts(vectors.size(), 0);
  std::vector<int> best_counts;
  double best_g = std::numeric_limits<double>::infinity();
  enumerate_compositions(resolution, 0, counts, [&] {
    const double g = grid_gap(vectors, outers, counts, resolution);
    if (g < best_g) {  // strict: earlier (lexicographically smaller) wins ties
      best_g = g;
      best_counts = counts;
    }
  });
  if (!std::isfinite(best_g)) {
    throw std::runtime_error("no invertible design on the grid");
  }
  Design design;
  design.weights.resize(vectors.size());
  for (std::size_t a = 0; a < vectors.size(); ++a) {
    design.weights[a] = static_cast<double>(best_counts[a]) / resolution;
    if (best_counts[a] > 0) design.support.push_back(static_cast<int>(a));
  }
  return design;
}

std::vector<double> exact_regret_deterministic(const Environment& env,
                                               Policy& policy,
                                               std::int64_t horizon) {
  auto [a_star, gap_min] = env.optimal_stats();
  (void)gap_min;
  const double mu_star = env.mean_reward(a_star);
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(horizon));
  double cum = 0.0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const ActionId a = policy.select(t);
    const auto& row = env.marginal_row(a);
    ContextId z = -1;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] == 1.0) {
        z = static_cast<ContextId>(k);
        break;
      }
    }
    if (z < 0) {
      throw std::runtime_error(
          "stochastic context on the executed path at round " +
          std::to_string(t));
    }
    const RewardModel& model = env.reward_model(a, z);
    if (model.kind != RewardModel::Kind::Deterministic) {
      throw std::runtime_error(
          "stochastic reward on the executed path at round " +
          std::to_string(t));
    }
    policy.observe(a, z, model.param);
    cum += mu_star - env.mean_reward(a);
    curve.push_back(cum);
  }
  return curve;
}

ConcentrationEvent parse_event_name(const std::string& name) {
  if (name == "EA") return ConcentrationEvent::ActionMeans;
  if (name == "EZ") return ConcentrationEvent::ContextMeans;
  if (name == "EMG") return ConcentrationEvent::Martingale;
  throw std::invalid_argument("unknown event name: " + name);
}

std::string event_name(ConcentrationEvent e) {
  switch (e) {
    case ConcentrationEvent::ActionMeans:
      return "EA";
    case ConcentrationEvent::ContextMeans:
      return "EZ";
    case ConcentrationEvent::Martingale:
      return "EMG";
  }
  return "?";
}

EventReport event_monitor(const Trace& trace, const Environment& env,
                          double delta, ConcentrationEvent which) {
  const std::int64_t rounds = trace.rounds();
  if (trace.contexts.size() != trace.actions.size() ||
      trace.rewards.size() != trace.actions.size()) {
    throw std::invalid_argument("incomplete trace");
  }
  EventReport report{which, true, std::nullopt};
  const double horizon = static_cast<double>(rounds);

  if (which == ConcentrationEvent::ActionMeans) {
    const int n = env.n_actions();
    const double log_term = std::log(2.0 * n * horizon / delta);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
    std::vector<double> sums(static_cast<std::size_t>(n), 0.0);
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      mu[static_cast<std::size_t>(a)] = env.mean_reward(a);
    }
    for (std::int64_t t = 1; t <= rounds; ++t) {
      const auto i = static_cast<std::size_t>(t - 1);
      counts[static_cast<std::size_t>(trace.actions[i])] += 1;
      sums[static_cast<std::size_t>(trace.actions[i])] += trace.rewards[i];
      for (std::size_t a = 0; a < counts.size(); ++a) {
        const auto c = std::max<std::int64_t>(counts[a], 1);
        const double mean = sums[a] / static_cast<double>(c);
        if (std::abs(mean - mu[a]) >
            std::sqrt(log_term / (2.0 * static_cast<double>(c)))) {
          return {which, false, t};
        }
      }
    }
    return report;
  }

  if (which == ConcentrationEvent::ContextMeans) {
    const std::vector<double> mu_z = env.context_means();  // throws non-benign
    const int nz = env.n_contexts();
    const double log_term = std::log(2.0 * nz * horizon / delta);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(nz), 0);
    std::vector<double> sums(static_cast<std::size_t>(nz), 0.0);
    for (std::int64_t t = 1; t <= rounds; ++t) {
      const auto i = static_cast<std::size_t>(t - 1);
      counts[static_cast<std::size_t>(trace.contexts[i])] += 1;
      sums[static_cast<std::size_t>(trace.contexts[i])] += trace.rewards[i];
      for (std::size_t z = 0; z < counts.size(); ++z) {
        const auto c = std::max<std::int64_t>(counts[z], 1);
        const double mean = sums[z] / static_cast<double>(c);
        if (std::abs(mean - mu_z[z]) >
            std::sqrt(log_term / (2.0 * static_cast<double>(c)))) {
          return {which, false, t};
        }
      }
    }
    return report;
  }

  // Martingale event: running sum of marginal-vs-realized context increments
  // weighted by the inverse square root of prior context counts.
  const int nz = env.n_contexts();
  std::vector<std::int64_t> counts(static_cast<std::size_t>(nz), 0);
  double martingale = 0.0;
  for (std::int64_t t = 1; t <= rounds; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const auto& row = env.marginal_row(trace.actions[i]);
    for (int z = 0; z < nz; ++z) {
      const auto c =
          std::max<std::int64_t>(counts[static_cast<std::size_t>(z)], 1);
      const double indicator = trace.contexts[i] == z ? 1.0 : 0.0;
      martingale += (row[static_cast<std::size_t>(z)] - indicator) /
                    std::sqrt(static_cast<double>(c));
    }
    counts[static_cast<std::size_t>(trace.contexts[i])] += 1;
    if (martingale >
        std::sqrt(2.0 * static_cast<double>(t) * std::log(horizon / delta))) {
      return {which, false, t};
    }
  }
  return report;
}

}  // namespace cbsim
