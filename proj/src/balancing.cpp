#include "cbsim/balancing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cbsim {

void validate_rates(const RatePair& rates, int n_actions, int n_contexts,
                    std::int64_t horizon) {
  const double t = static_cast<double>(horizon);
  const double at = n_actions * t;
  if (rates.r1 < std::sqrt(n_contexts * t) * (1.0 - 1e-12)) {
    throw std::invalid_argument(
        "invalid rate pair: r1 < sqrt(|Z| T) (r1 = " +
        std::to_string(rates.r1) + ")");
  }
  if (rates.r2 < std::sqrt(at) * (1.0 - 1e-12)) {
    throw std::invalid_argument(
        "invalid rate pair: r2 < sqrt(|A| T) (r2 = " +
        std::to_string(rates.r2) + ")");
  }
  if (rates.r1 * rates.r2 < at * (1.0 - 1e-12)) {
    throw std::invalid_argument(
        "invalid rate pair: r1 * r2 < |A| T (product = " +
        std::to_string(rates.r1 * rates.r2) + ")");
  }
}

DbHyperparams db_hyperparams(const RatePair& rates, double d1, double d2,
                             int n_actions, int n_contexts,
                             std::int64_t horizon, double delta) {
  if (!(d1 > 0.0 && d2 > 0.0)) {
    throw std::invalid_argument("candidate-regret factors must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta out of (0,1)");
  }
  validate_rates(rates, n_actions, n_contexts, horizon);
  DbHyperparams p;
  p.z1 = 1.0;
  p.z2 = rates.r2 / std::sqrt(n_actions * static_cast<double>(horizon));
  p.v1 = std::sqrt(p.z1 / (d1 * d1 * d1));
  p.v2 = std::sqrt(p.z2 / (d2 * d2 * d2));
  return p;
}

double bias_b(double z, std::int64_t t, double delta) {
  const double tc = static_cast<double>(std::max<std::int64_t>(t, 1));
  const double log_t = std::max(std::log(tc), 1.0);
  const double iterated = 3.0 * std::sqrt(2.0 * std::log(2.0 * log_t / delta));
  return std::max(2.0 * z, iterated) / std::sqrt(tc);
}

double gamma_bonus(std::int64_t n, double delta) {
  const double nc = static_cast<double>(std::max<std::int64_t>(n, 1));
  const double log_n = std::max(std::log(nc), 1.0);
  return 3.0 * std::sqrt(std::log(2.0 * log_n / delta) / nc);
}

double d_ucb_default(int n_actions, std::int64_t horizon, double delta) {
  return std::sqrt(8.0 * n_actions *
                   std::log(2.0 * n_actions * static_cast<double>(horizon) /
                            delta));
}

double d_cucb_default(int n_contexts, std::int64_t horizon, double delta) {
  const double t = static_cast<double>(horizon);
  return std::sqrt(std::log(2.0 * n_contexts * t / delta)) *
         (std::sqrt(8.0 * n_contexts) + std::sqrt(4.0 * std::log(t / delta)));
}

double d_pe_default(int d_span, int n_actions, std::int64_t horizon,
                    double delta, double envelope_c) {
  return envelope_c *
         std::sqrt(d_span * std::log(2.0 * n_actions *
                                     std::log2(static_cast<double>(horizon)) /
                                     delta));
}

LearnerStats learner_stats(const SlotState& slot, double delta) {
  const double n = static_cast<double>(std::max<std::int64_t>(slot.n, 1));
  LearnerStats s;
  s.gamma = gamma_bonus(slot.n, delta);
  s.eta = slot.u / n - bias_b(slot.z, std::max<std::int64_t>(slot.n, 1), delta);
  return s;
}

int select_learner(const std::vector<SlotState>& slots) {
  if (slots.empty()) throw std::invalid_argument("no learner slots");
  const bool any_active = std::any_of(slots.begin(), slots.end(),
                                      [](const SlotState& s) {
                                        return s.active;
                                      });
  int best = -1;
  double best_score = 0.0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (any_active && !slots[i].active) continue;
    const double score = slots[i].v * slots[i].d *
                         std::sqrt(static_cast<double>(slots[i].n));
    if (best < 0 || score < best_score) {
      best = static_cast<int>(i);
      best_score = score;
    }
  }
  return best;
}

void update_active_set(std::vector<SlotState>& slots, double delta) {
  double best = -1e300;
  std::vector<LearnerStats> stats;
  stats.reserve(slots.size());
  for (const auto& slot : slots) {
    stats.push_back(learner_stats(slot, delta));
    best = std::max(best, stats.back().eta + stats.back().gamma);
  }
  bool any = false;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double n =
        static_cast<double>(std::max<std::int64_t>(slots[i].n, 1));
    slots[i].active =
        stats[i].eta + stats[i].gamma + slots[i].d / std::sqrt(n) >= best;
    any = any || slots[i].active;
  }
  if (!any) {
    for (auto& slot : slots) slot.active = true;
  }
}

DbPolicy::DbPolicy(std::unique_ptr<Policy> base1, std::unique_ptr<Policy> base2,
                   double d1, double d2, const DbHyperparams& params,
                   double delta)
    : delta_(delta) {
  if (!base1 || !base2) throw std::invalid_argument("null base learner");
  bases_.push_back(std::move(base1));
  bases_.push_back(std::move(base2));
  slots_.resize(2);
  slots_[0].d = d1;
  slots_[0].v = params.v1;
  slots_[0].z = params.z1;
  slots_[1].d = d2;
  slots_[1].v = params.v2;
  slots_[1].z = params.z2;
}

ActionId DbPolicy::select(std::int64_t t) {
  last_learner_ = select_learner(slots_);
  return bases_[static_cast<std::size_t>(last_learner_)]->select(t);
}

void DbPolicy::observe(ActionId a, ContextId z, double reward) {
  if (last_learner_ < 0) {
    throw std::logic_error("observe before the first select");
  }
  auto& slot = slots_[static_cast<std::size_t>(last_learner_)];
  bases_[static_cast<std::size_t>(last_learner_)]->observe(a, z, reward);
  slot.u += reward;
  slot.n += 1;
  update_active_set(slots_, delta_);
}

}  // namespace cbsim
