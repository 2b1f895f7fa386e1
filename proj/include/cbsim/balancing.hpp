#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cbsim/policies.hpp"

namespace cbsim {

// Target regret rates at the horizon for the two base learners. Learner 1 is
// the one tuned for the benign class, learner 2 the fallback.
struct RatePair {
  double r1;
  double r2;
};

// Throws std::invalid_argument naming the first violated inequality among
// r1 >= sqrt(|Z| T), r2 >= sqrt(|A| T), r1 * r2 >= |A| T.
void validate_rates(const RatePair& rates, int n_actions, int n_contexts,
                    std::int64_t horizon);

struct DbHyperparams {
  double z1;
  double z2;
  double v1;
  double v2;
};

DbHyperparams db_hyperparams(const RatePair& rates, double d1, double d2,
                             int n_actions, int n_contexts,
                             std::int64_t horizon, double delta);

// Bias b(t) = max(2 Z / sqrt(t), 3 sqrt(2 log(2 log t / delta)) / sqrt(t)),
// with log t clamped at 1 inside the iterated logarithm and t clamped at 1.
double bias_b(double z, std::int64_t t, double delta);

// gamma(n) = 3 sqrt(log(2 max(log n, 1) / delta) / max(n, 1)).
double gamma_bonus(std::int64_t n, double delta);

// Candidate-regret factors d_i(delta) so that d_i sqrt(t) dominates each base
// learner's regret envelope in its favorable class.
double d_ucb_default(int n_actions, std::int64_t horizon, double delta);
double d_cucb_default(int n_contexts, std::int64_t horizon, double delta);
double d_pe_default(int d_span, int n_actions, std::int64_t horizon,
                    double delta, double envelope_c = 8.0);

struct SlotState {
  double d = 0.0;
  double v = 0.0;
  double z = 0.0;
  double u = 0.0;        // cumulative reward collected while selected
  std::int64_t n = 0;    // selection count
  bool active = true;
};

struct LearnerStats {
  double eta;
  double gamma;
};

LearnerStats learner_stats(const SlotState& slot, double delta);

// Lowest-index minimizer of v_i d_i sqrt(n_i) over active slots; if no slot
// is active, all slots compete.
int select_learner(const std::vector<SlotState>& slots);

// Recomputes the active flags from scratch: slot i stays active iff
// eta_i + gamma_i + d_i / sqrt(max(n_i,1)) >= max_j (eta_j + gamma_j).
// Deactivation is reversible; an all-inactive outcome reactivates everyone.
void update_active_set(std::vector<SlotState>& slots, double delta);

// Dynamic balancing over two base learners. Each round the balancer picks a
// slot, delegates action choice to that slot's policy, and feeds the outcome
// back only to it.
class DbPolicy : public Policy {
 public:
  DbPolicy(std::unique_ptr<Policy> base1, std::unique_ptr<Policy> base2,
           double d1, double d2, const DbHyperparams& params, double delta);

  ActionId select(std::int64_t t) override;
  void observe(ActionId a, ContextId z, double reward) override;
  const char* name() const override { return "db"; }

  int last_learner() const { return last_learner_; }
  const SlotState& slot(int i) const {
    return slots_[static_cast<std::size_t>(i)];
  }
  const Policy& base(int i) const {
    return *bases_[static_cast<std::size_t>(i)];
  }

 private:
  std::vector<std::unique_ptr<Policy>> bases_;
  std::vector<SlotState> slots_;
  double delta_;
  int last_learner_ = -1;
};

}  // namespace cbsim
