#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cbsim/env.hpp"

namespace cbsim {

// Behavioral contract shared by all learners: select(t) with t strictly
// increasing from 1, each select followed by observe() of the outcome.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual ActionId select(std::int64_t t) = 0;
  virtual void observe(ActionId a, ContextId z, double reward) = 0;
  virtual const char* name() const = 0;
};

// Anytime UCB with the "1 or count" clamp built into both the mean and the
// bonus denominators, so indices stay finite before the first pull.
class UcbPolicy : public Policy {
 public:
  UcbPolicy(int n_actions, std::int64_t horizon, double delta);

  double index(ActionId a) const;
  std::int64_t count(ActionId a) const {
    return counts_[static_cast<std::size_t>(a)];
  }
  double empirical_mean(ActionId a) const;

  ActionId select(std::int64_t t) override;
  void observe(ActionId a, ContextId z, double reward) override;
  const char* name() const override { return "ucb"; }

 private:
  std::vector<std::int64_t> counts_;
  std::vector<double> sums_;
  double log_term_;
};

// C-UCB: maintains per-context statistics only and scores an action by the
// marginal-weighted combination of context upper confidence bounds. The
// marginals handed in here are the algorithm's prior knowledge and may differ
// from the environment's true ones.
class CucbPolicy : public Policy {
 public:
  CucbPolicy(std::vector<std::vector<double>> marginals, std::int64_t horizon,
             double delta);

  double context_ucb(ContextId z) const;
  double index(ActionId a) const;
  std::int64_t context_count(ContextId z) const {
    return counts_[static_cast<std::size_t>(z)];
  }

  ActionId select(std::int64_t t) override;
  void observe(ActionId a, ContextId z, double reward) override;
  const char* name() const override { return "cucb"; }

 private:
  std::vector<std::vector<double>> marginals_;
  std::vector<std::int64_t> counts_;
  std::vector<double> sums_;
  double log_term_;
};

// Plays one fixed action forever; used as a zero-regret reference policy.
class FixedActionPolicy : public Policy {
 public:
  explicit FixedActionPolicy(ActionId a) : action_(a) {}
  ActionId select(std::int64_t) override { return action_; }
  void observe(ActionId, ContextId, double) override {}
  const char* name() const override { return "fixed"; }

 private:
  ActionId action_;
};

}  // namespace cbsim
