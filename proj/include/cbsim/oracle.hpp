#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cbsim/design.hpp"
#include "cbsim/env.hpp"
#include "cbsim/policies.hpp"

namespace cbsim {

double kl_bernoulli(double p, double q);

// Brute-force G-optimal design over the simplex grid with step 1/resolution.
// Ties broken toward the lexicographically smallest weight vector.
Design exact_design_grid(const std::vector<Eigen::VectorXd>& vectors,
                         int resolution);

// Cumulative pseudo-regret of a policy on fully deterministic dynamics,
// unrolled without any random stream. Every round's action must lead to a
// point-mass context and a deterministic reward, otherwise the unroll is
// not applicable and this throws.
std::vector<double> exact_regret_deterministic(const Environment& env,
                                               Policy& policy,
                                               std::int64_t horizon);

struct Trace {
  std::vector<ActionId> actions;
  std::vector<ContextId> contexts;
  std::vector<double> rewards;
  std::int64_t rounds() const {
    return static_cast<std::int64_t>(actions.size());
  }
};

enum class ConcentrationEvent { ActionMeans, ContextMeans, Martingale };

ConcentrationEvent parse_event_name(const std::string& name);
std::string event_name(ConcentrationEvent e);

struct EventReport {
  ConcentrationEvent event;
  bool held;
  std::optional<std::int64_t> first_violation;
};

// Replays a complete trace and checks the named concentration inequality at
// every round. The context-mean event requires a conditionally benign
// environment (the shared conditional means must exist).
EventReport event_monitor(const Trace& trace, const Environment& env,
                          double delta, ConcentrationEvent which);

}  // namespace cbsim
