#include "cbsim/instances.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cbsim {

namespace {

constexpr ActionId kFavoredArm = 1;  // the "arm 1" of the hard families

void check_split(int n_actions, int n_contexts, const SplitSpec& split,
                 double max_delta) {
  if (n_actions < 2) throw std::invalid_argument("need at least two actions");
  if (n_contexts < 2) throw std::invalid_argument("need at least two contexts");
  if (split.z0_size < 1 || split.z0_size > n_contexts - 1) {
    throw std::invalid_argument("z0_size must be a proper nonempty subset");
  }
  if (!(split.delta > 0.0 && split.delta < max_delta)) {
    throw std::invalid_argument("delta out of range (0, " +
                                std::to_string(max_delta) + ")");
  }
}

// Mass q0 spread evenly over the first z0_size contexts, the rest over the
// complement.
std::vector<double> split_row(int n_contexts, int z0_size, double q0) {
  std::vector<double> row(static_cast<std::size_t>(n_contexts));
  const int z1_size = n_contexts - z0_size;
  for (int z = 0; z < n_contexts; ++z) {
    row[static_cast<std::size_t>(z)] =
        z < z0_size ? q0 / z0_size : (1.0 - q0) / z1_size;
  }
  return row;
}

std::vector<std::vector<double>> split_marginals(int n_actions, int n_contexts,
                                                 const SplitSpec& split) {
  std::vector<std::vector<double>> marginals;
  marginals.reserve(static_cast<std::size_t>(n_actions));
  for (ActionId a = 0; a < n_actions; ++a) {
    const double q0 = a == kFavoredArm ? 0.5 + 2.0 * split.delta : 0.5;
    marginals.push_back(split_row(n_contexts, split.z0_size, q0));
  }
  return marginals;
}

std::vector<std::vector<RewardModel>> shared_block_conditionals(
    int n_actions, int n_contexts, int z0_size) {
  std::vector<std::vector<RewardModel>> rewards(
      static_cast<std::size_t>(n_actions));
  for (auto& row : rewards) {
    for (int z = 0; z < n_contexts; ++z) {
      row.push_back(RewardModel::bernoulli(z < z0_size ? 0.75 : 0.25));
    }
  }
  return rewards;
}

}  // namespace

Environment hard_benign(int n_actions, int n_contexts, const SplitSpec& split) {
  check_split(n_actions, n_contexts, split, 0.25);  // 1/2 + 2*delta < 1
  return Environment(
      split_marginals(n_actions, n_contexts, split),
      shared_block_conditionals(n_actions, n_contexts, split.z0_size));
}

Environment hard_nonbenign_variant(int n_actions, int n_contexts,
                                   const SplitSpec& split, ActionId a0) {
  check_split(n_actions, n_contexts, split, 0.25);
  if (a0 == kFavoredArm) {
    throw std::invalid_argument("a0 must differ from arm 1");
  }
  if (a0 < 0 || a0 >= n_actions) throw std::invalid_argument("a0 out of range");
  auto rewards =
      shared_block_conditionals(n_actions, n_contexts, split.z0_size);
  const double boosted = std::min(0.75 + 4.0 * split.delta, 1.0);
  for (int z = 0; z < split.z0_size; ++z) {
    rewards[static_cast<std::size_t>(a0)][static_cast<std::size_t>(z)] =
        RewardModel::bernoulli(boosted);
  }
  return Environment(split_marginals(n_actions, n_contexts, split),
                     std::move(rewards));
}

Environment agnostic_variant(int n_actions, int n_contexts,
                             const SplitSpec& split,
                             std::optional<ActionId> a0) {
  check_split(n_actions, n_contexts, split, 0.125);  // 1/2 + 4*delta < 1
  if (a0 && *a0 == kFavoredArm) {
    throw std::invalid_argument("a0 must differ from arm 1");
  }
  if (a0 && (*a0 < 0 || *a0 >= n_actions)) {
    throw std::invalid_argument("a0 out of range");
  }
  auto marginals = split_marginals(n_actions, n_contexts, split);
  if (a0) {
    marginals[static_cast<std::size_t>(*a0)] =
        split_row(n_contexts, split.z0_size, 0.5 + 4.0 * split.delta);
  }
  return Environment(
      std::move(marginals),
      shared_block_conditionals(n_actions, n_contexts, split.z0_size));
}

double agnostic_default_delta(int n_actions, long long horizon) {
  return 0.025 * std::sqrt(static_cast<double>(n_actions - 1) /
                           static_cast<double>(horizon));
}

Environment pe_adversarial(int n_actions, int n_contexts, double delta) {
  if (n_contexts < 3) throw std::invalid_argument("need at least 3 contexts");
  if (n_actions < n_contexts + 1) {
    throw std::invalid_argument("need at least |Z|+1 actions");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta out of (0,1)");
  }
  std::vector<std::vector<double>> marginals;
  std::vector<std::vector<RewardModel>> rewards;
  const std::size_t nz = static_cast<std::size_t>(n_contexts);
  for (ActionId a = 0; a < n_actions; ++a) {
    std::vector<double> row(nz, 0.0);
    std::vector<RewardModel> models(nz, RewardModel::deterministic(0.0));
    if (a == 0) {
      row[0] = 0.5;
      row[1] = 0.5;
      models[0] = models[1] = RewardModel::deterministic(1.0);
    } else {
      // Actions beyond the |Z| named ones replicate the first point-mass arm.
      const int i = a <= n_contexts ? a : 1;
      row[static_cast<std::size_t>(i - 1)] = 1.0;
      if (i == n_contexts) {
        models[static_cast<std::size_t>(i - 1)] =
            RewardModel::deterministic(1.0 - delta);
      }
    }
    marginals.push_back(std::move(row));
    rewards.push_back(std::move(models));
  }
  return Environment(std::move(marginals), std::move(rewards));
}

std::vector<std::vector<double>> perturb_marginals(
    const std::vector<std::vector<double>>& marginals, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 2.0)) {
    throw std::invalid_argument("epsilon out of [0,2]");
  }
  auto out = marginals;
  if (epsilon == 0.0) return out;
  for (std::size_t a = 0; a < out.size(); ++a) {
    auto& row = out[a];
    if (row.size() < 2) {
      throw std::invalid_argument("perturbation infeasible for row " +
                                  std::to_string(a) +
                                  ": fewer than two contexts");
    }
    std::size_t src = 0, dst = 0;
    for (std::size_t z = 1; z < row.size(); ++z) {
      if (row[z] > row[src]) src = z;
    }
    dst = src == 0 ? 1 : 0;
    for (std::size_t z = 0; z < row.size(); ++z) {
      if (z != src && row[z] < row[dst]) dst = z;
    }
    const double moved = std::min(epsilon / 2.0, row[src]);
    row[src] -= moved;
    row[dst] += moved;
  }
  return out;
}

}  // namespace cbsim
