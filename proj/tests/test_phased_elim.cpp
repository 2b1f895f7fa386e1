#include "doctest.h"

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "cbsim/env.hpp"
#include "cbsim/instances.hpp"
#include "cbsim/phased_elim.hpp"

using namespace cbsim;

TEST_CASE("phase schedule") {
  Design design;
  design.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  design.support = {0, 1, 2};
  SUBCASE("iterated logarithm clamp at d = 2") {
    const PhaseSchedule sched = phase_schedule(2, 1, design);
    CHECK(sched.m == doctest::Approx(16.0));
  }
  SUBCASE("budget and ceiling rounding at d = 3") {
    const PhaseSchedule sched = phase_schedule(3, 1, design);
    CHECK(sched.m == doctest::Approx(17.12857393140039).epsilon(1e-14));
    CHECK(sched.plays[0] == 6);
    CHECK(sched.plays[1] == 6);
    CHECK(sched.plays[2] == 6);
  }
  SUBCASE("budget doubles per phase") {
    const PhaseSchedule s1 = phase_schedule(3, 1, design);
    const PhaseSchedule s2 = phase_schedule(3, 2, design);
    CHECK(s2.m == doctest::Approx(2.0 * s1.m));
  }
  SUBCASE("zero-weight actions get zero plays") {
    Design sparse;
    sparse.weights = {0.5, 0.5, 0.0};
    sparse.support = {0, 1};
    const PhaseSchedule sched = phase_schedule(2, 1, sparse);
    CHECK(sched.plays[2] == 0);
  }
}

TEST_CASE("elimination threshold") {
  CHECK(elimination_threshold(2, 16.0, 4, 1024, 0.1) ==
        doctest::Approx(3.6563948713638483).epsilon(1e-14));
  SUBCASE("halves in squared value when the budget doubles") {
    const double t1 = elimination_threshold(3, 20.0, 5, 4096, 0.05);
    const double t2 = elimination_threshold(3, 40.0, 5, 4096, 0.05);
    CHECK(t2 == doctest::Approx(t1 / std::sqrt(2.0)));
  }
}

TEST_CASE("least squares recovers noiseless linear rewards") {
  Eigen::MatrixXd moment(2, 2);
  Eigen::VectorXd theta(2);
  theta << 0.7, 0.2;
  std::vector<Eigen::VectorXd> vs(2, Eigen::VectorXd::Zero(2));
  vs[0] << 1, 0.5;
  vs[1] << 0.2, 1;
  moment.setZero();
  Eigen::VectorXd response = Eigen::VectorXd::Zero(2);
  for (int reps = 0; reps < 3; ++reps) {
    for (const auto& v : vs) {
      moment += v * v.transpose();
      response += v * theta.dot(v);
    }
  }
  const Eigen::VectorXd est = least_squares_estimate(moment, response);
  CHECK(est[0] == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(est[1] == doctest::Approx(0.2).epsilon(1e-10));
  SUBCASE("singular moment matrix is rejected") {
    Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(least_squares_estimate(singular, response),
                    std::runtime_error);
  }
}

TEST_CASE("exact-design elimination never plays the optimal adversarial arm") {
  const Environment env = pe_adversarial(4, 3, 0.3);
  PhasedElimPolicy policy(env.marginals(), 10000, 0.1,
                          PhasedElimPolicy::DesignMode::ExactGrid);
  CHECK(policy.d_span_input() == 3);
  bool played_optimal = false;
  for (std::int64_t t = 1; t <= 10000; ++t) {
    const ActionId a = policy.select(t);
    if (a == 0) played_optimal = true;
    // Deterministic environment: rewards depend only on the arm.
    const double reward = a == 3 ? 0.7 : 0.0;
    const ContextId z = a == 0 ? 0 : a - 1;
    policy.observe(a, z, reward);
  }
  CHECK_FALSE(played_optimal);
  SUBCASE("the near-optimal arm survives while zero arms are eliminated") {
    const auto& active = policy.active_set();
    CHECK(std::find(active.begin(), active.end(), 3) != active.end());
    CHECK(std::find(active.begin(), active.end(), 1) == active.end());
    CHECK(std::find(active.begin(), active.end(), 2) == active.end());
  }
}

TEST_CASE("noiseless elimination keeps the best arm and drops the bad one") {
  // Point-mass contexts with deterministic rewards: a 2-armed linear instance.
  std::vector<std::vector<double>> marginals = {{1.0, 0.0}, {0.0, 1.0}};
  std::vector<std::vector<RewardModel>> rewards = {
      {RewardModel::deterministic(0.9), RewardModel::deterministic(0.0)},
      {RewardModel::deterministic(0.0), RewardModel::deterministic(0.2)}};
  const Environment env(marginals, rewards);
  PhasedElimPolicy policy(env.marginals(), 100000, 0.1);
  Rng rng(1);
  for (std::int64_t t = 1; t <= 100000; ++t) {
    const ActionId a = policy.select(t);
    const StepOutcome out = env.sample_step(a, rng);
    policy.observe(a, out.context, out.reward);
  }
  REQUIRE(policy.active_set().size() == 1);
  CHECK(policy.active_set()[0] == 0);
  // Once alone, the surviving arm is played exclusively.
  CHECK(policy.select(100001) == 0);
}
