#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cbsim/design.hpp"
#include "cbsim/policies.hpp"

namespace cbsim {

struct PhaseSchedule {
  double m;                          // target play budget for the phase
  std::vector<std::int64_t> plays;   // ceil(m * pi(a)) per local action index
};

// m_ell = 2^(ell-1) * (4 d log log d + 16), with log log clamped at 0 so the
// budget stays positive for d <= 2.
PhaseSchedule phase_schedule(int d_span, int ell, const Design& design);

double elimination_threshold(int d_span, double m_ell, int n_actions,
                             std::int64_t horizon, double delta);

Eigen::VectorXd least_squares_estimate(const Eigen::MatrixXd& moment,
                                       const Eigen::VectorXd& response);

// Phased elimination over the linear view of the problem: input marginal rows
// serve as feature vectors and realized contexts are discarded. The marginals
// given here are the policy's prior knowledge and may be misspecified.
class PhasedElimPolicy : public Policy {
 public:
  enum class DesignMode { FrankWolfe, ExactGrid };

  PhasedElimPolicy(std::vector<std::vector<double>> marginals,
                   std::int64_t horizon, double delta,
                   DesignMode mode = DesignMode::FrankWolfe);

  ActionId select(std::int64_t t) override;
  void observe(ActionId a, ContextId z, double reward) override;
  const char* name() const override { return "pe"; }

  int phase() const { return phase_; }
  int d_span_input() const { return d_span_; }
  const std::vector<ActionId>& active_set() const { return active_; }

 private:
  void start_phase();
  void finish_phase();

  std::vector<std::vector<double>> marginals_;
  int n_actions_;
  std::int64_t horizon_;
  double delta_;
  DesignMode mode_;
  int d_span_;

  int phase_ = 0;
  std::vector<ActionId> active_;
  std::vector<ActionId> design_active_;   // active set the cached design is for
  Design design_;
  int design_rank_ = 0;
  std::vector<Eigen::VectorXd> reduced_;  // per active index, span coords
  double m_ell_ = 0.0;
  std::vector<std::int64_t> remaining_;   // per active index
  std::int64_t remaining_total_ = 0;
  std::size_t sweep_pos_ = 0;
  Eigen::MatrixXd moment_;
  Eigen::VectorXd response_;
  std::size_t pending_local_ = 0;         // local index of the action in play
};

}  // namespace cbsim
