#include "cbsim/phased_elim.hpp"

#include <cmath>
#include <stdexcept>

#include "cbsim/oracle.hpp"

namespace cbsim {

PhaseSchedule phase_schedule(int d_span, int ell, const Design& design) {
  if (ell < 1) throw std::invalid_argument("phase index starts at 1");
  const double base = support_bound(d_span);  // 4 d max(log log d, 0) + 16
  PhaseSchedule sched;
  sched.m = std::ldexp(base, ell - 1);
  sched.plays.resize(design.weights.size(), 0);
  for (int a : design.support) {
    sched.plays[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(
        std::ceil(sched.m * design.weights[static_cast<std::size_t>(a)]));
  }
  return sched;
}

double elimination_threshold(int d_span, double m_ell, int n_actions,
                             std::int64_t horizon, double delta) {
  return 2.0 * std::sqrt(
                   (4.0 * d_span / m_ell) *
                   std::log(2.0 * n_actions *
                            std::log2(static_cast<double>(horizon)) / delta));
}

Eigen::VectorXd least_squares_estimate(const Eigen::MatrixXd& moment,
                                       const Eigen::VectorXd& response) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(moment);
  if (!lu.isInvertible()) {
    throw std::runtime_error("singular phase moment matrix");
  }
  return lu.solve(response);
}

PhasedElimPolicy::PhasedElimPolicy(std::vector<std::vector<double>> marginals,
                                   std::int64_t horizon, double delta,
                                   DesignMode mode)
    : marginals_(std::move(marginals)),
      n_actions_(static_cast<int>(marginals_.size())),
      horizon_(horizon),
      delta_(delta),
      mode_(mode) {
  if (n_actions_ < 1) throw std::invalid_argument("empty action set");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta out of (0,1)");
  }
  if (horizon_ < 2) throw std::invalid_argument("horizon must be >= 2");
  d_span_ = dim_span(marginals_);
  active_.resize(static_cast<std::size_t>(n_actions_));
  for (int a = 0; a < n_actions_; ++a) active_[static_cast<std::size_t>(a)] = a;
}

void PhasedElimPolicy::start_phase() {
  ++phase_;
  // The design depends only on the active set; recompute it only when an
  // elimination actually changed the set.
  if (active_ != design_active_) {
    std::vector<Eigen::VectorXd> rows;
    rows.reserve(active_.size());
    for (ActionId a : active_) {
      const auto& row = marginals_[static_cast<std::size_t>(a)];
      rows.push_back(Eigen::Map<const Eigen::VectorXd>(
          row.data(), static_cast<Eigen::Index>(row.size())));
    }
    SpanReduction red = reduce_to_span(rows);
    reduced_ = red.reduced_vectors;
    design_rank_ = red.rank;

    if (active_.size() == 1) {
      design_.weights = {1.0};
      design_.support = {0};
    } else if (mode_ == DesignMode::ExactGrid) {
      design_ = exact_design_grid(reduced_, 120);
    } else {
      design_ = frank_wolfe_design(reduced_, red.rank);
    }
    design_active_ = active_;
  }

  PhaseSchedule sched = phase_schedule(d_span_, phase_, design_);
  m_ell_ = sched.m;
  remaining_ = sched.plays;
  remaining_total_ = 0;
  for (auto p : remaining_) remaining_total_ += p;
  sweep_pos_ = 0;

  moment_ = Eigen::MatrixXd::Zero(design_rank_, design_rank_);
  for (std::size_t i = 0; i < reduced_.size(); ++i) {
    if (remaining_[i] > 0) {
      moment_.noalias() += static_cast<double>(remaining_[i]) * reduced_[i] *
                           reduced_[i].transpose();
    }
  }
  response_ = Eigen::VectorXd::Zero(design_rank_);
}

void PhasedElimPolicy::finish_phase() {
  const Eigen::VectorXd theta = least_squares_estimate(moment_, response_);
  std::vector<double> predicted(reduced_.size());
  double best = -1e300;
  for (std::size_t i = 0; i < reduced_.size(); ++i) {
    predicted[i] = theta.dot(reduced_[i]);
    best = std::max(best, predicted[i]);
  }
  const double threshold =
      elimination_threshold(d_span_, m_ell_, n_actions_, horizon_, delta_);
  std::vector<ActionId> survivors;
  for (std::size_t i = 0; i < active_.size(); ++i) {
    if (best - predicted[i] <= threshold) survivors.push_back(active_[i]);
  }
  active_ = std::move(survivors);
}

ActionId PhasedElimPolicy::select(std::int64_t) {
  if (remaining_total_ == 0) {
    if (phase_ > 0) finish_phase();
    start_phase();
  }
  // Round-major order: sweep the support in ascending action order, skipping
  // exhausted entries, then wrap.
  while (remaining_[sweep_pos_] == 0) {
    sweep_pos_ = (sweep_pos_ + 1) % remaining_.size();
  }
  pending_local_ = sweep_pos_;
  sweep_pos_ = (sweep_pos_ + 1) % remaining_.size();
  return active_[pending_local_];
}

void PhasedElimPolicy::observe(ActionId a, ContextId, double reward) {
  // Realized contexts are discarded; only the feature-weighted reward enters.
  if (a != active_[pending_local_]) {
    throw std::logic_error("observe does not match the selected action");
  }
  response_.noalias() += reward * reduced_[pending_local_];
  remaining_[pending_local_] -= 1;
  remaining_total_ -= 1;
}

}  // namespace cbsim
