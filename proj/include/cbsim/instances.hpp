#pragma once

#include <optional>

#include "cbsim/env.hpp"

namespace cbsim {

// Two-block context split used by the hard instance families. Contexts
// [0, z0_size) form the rewarding block, the rest its complement.
struct SplitSpec {
  int z0_size;
  double delta;
};

// Conditionally benign family: arm 1 shifts 2*delta of marginal mass onto the
// rewarding block; all arms share Bernoulli(3/4) / Bernoulli(1/4) conditionals.
Environment hard_benign(int n_actions, int n_contexts, const SplitSpec& split);

// Same marginals as hard_benign, but arm a0's conditional on the rewarding
// block is boosted to 3/4 + 4*delta (capped at 1). Not conditionally benign.
Environment hard_nonbenign_variant(int n_actions, int n_contexts,
                                   const SplitSpec& split, ActionId a0);

// All-benign family whose members differ only in the marginal row of a0
// (mass on the rewarding block raised from 1/2 to 1/2 + 4*delta). Without a0
// this returns the base environment.
Environment agnostic_variant(int n_actions, int n_contexts,
                             const SplitSpec& split,
                             std::optional<ActionId> a0 = std::nullopt);

// The delta the lower-bound argument pairs with a given horizon.
double agnostic_default_delta(int n_actions, long long horizon);

// Non-benign instance on which exact-design phased elimination never plays
// the optimal arm. Action 0 is optimal: marginal (e1+e2)/2 with deterministic
// reward 1. Action i (1 <= i <= |Z|) has marginal e_i and deterministic reward
// 0, except the last which pays 1 - delta. Extra actions replicate action 1.
Environment pe_adversarial(int n_actions, int n_contexts, double delta);

// Deterministic epsilon-perturbation: per row, moves epsilon/2 mass from the
// highest-mass context to the lowest-mass one (capped at emptying the source),
// so the output is epsilon-close to the input in per-row L1 distance.
std::vector<std::vector<double>> perturb_marginals(
    const std::vector<std::vector<double>>& marginals, double epsilon);

}  // namespace cbsim
