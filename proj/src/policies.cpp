#include "cbsim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace cbsim {

namespace {

ActionId argmax_index(int n, const std::function<double(ActionId)>& f) {
  ActionId best = 0;
  double best_val = f(0);
  for (ActionId a = 1; a < n; ++a) {
    double val = f(a);
    if (val > best_val) {
      best = a;
      best_val = val;
    }
  }
  return best;
}

}  // namespace

UcbPolicy::UcbPolicy(int n_actions, std::int64_t horizon, double delta)
    : counts_(static_cast<std::size_t>(n_actions), 0),
      sums_(static_cast<std::size_t>(n_actions), 0.0) {
  if (n_actions < 1) throw std::invalid_argument("need at least one action");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta out of (0,1)");
  }
  log_term_ = std::log(2.0 * n_actions * static_cast<double>(horizon) / delta);
}

double UcbPolicy::empirical_mean(ActionId a) const {
  const auto n = std::max<std::int64_t>(counts_[static_cast<std::size_t>(a)],
                                        1);
  return sums_[static_cast<std::size_t>(a)] / static_cast<double>(n);
}

double UcbPolicy::index(ActionId a) const {
  const auto n = std::max<std::int64_t>(counts_[static_cast<std::size_t>(a)],
                                        1);
  return empirical_mean(a) +
         std::sqrt(log_term_ / (2.0 * static_cast<double>(n)));
}

ActionId UcbPolicy::select(std::int64_t) {
  return argmax_index(static_cast<int>(counts_.size()),
                      [this](ActionId a) { return index(a); });
}

void UcbPolicy::observe(ActionId a, ContextId, double reward) {
  counts_[static_cast<std::size_t>(a)] += 1;
  sums_[static_cast<std::size_t>(a)] += reward;
}

CucbPolicy::CucbPolicy(std::vector<std::vector<double>> marginals,
                       std::int64_t horizon, double delta)
    : marginals_(std::move(marginals)) {
  if (marginals_.empty()) throw std::invalid_argument("empty marginals");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta out of (0,1)");
  }
  const auto n_contexts = marginals_[0].size();
  counts_.assign(n_contexts, 0);
  sums_.assign(n_contexts, 0.0);
  log_term_ = std::log(2.0 * static_cast<double>(n_contexts) *
                       static_cast<double>(horizon) / delta);
}

double CucbPolicy::context_ucb(ContextId z) const {
  const auto n = std::max<std::int64_t>(counts_[static_cast<std::size_t>(z)],
                                        1);
  return sums_[static_cast<std::size_t>(z)] / static_cast<double>(n) +
         std::sqrt(log_term_ / (2.0 * static_cast<double>(n)));
}

double CucbPolicy::index(ActionId a) const {
  const auto& row = marginals_[static_cast<std::size_t>(a)];
  double val = 0.0;
  for (std::size_t z = 0; z < row.size(); ++z) {
    if (row[z] > 0.0) val += row[z] * context_ucb(static_cast<ContextId>(z));
  }
  return val;
}

ActionId CucbPolicy::select(std::int64_t) {
  return argmax_index(static_cast<int>(marginals_.size()),
                      [this](ActionId a) { return index(a); });
}

void CucbPolicy::observe(ActionId, ContextId z, double reward) {
  counts_[static_cast<std::size_t>(z)] += 1;
  sums_[static_cast<std::size_t>(z)] += reward;
}

}  // namespace cbsim
