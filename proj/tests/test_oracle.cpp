#include "doctest.h"

#include <stdexcept>

#include <cmath>

#include "cbsim/instances.hpp"
#include "cbsim/oracle.hpp"
#include "cbsim/phased_elim.hpp"

using namespace cbsim;

TEST_CASE("bernoulli kl divergence") {
  CHECK(kl_bernoulli(0.5, 0.5) == 0.0);
  CHECK(kl_bernoulli(0.0, 0.0) == 0.0);
  CHECK(kl_bernoulli(1.0, 1.0) == 0.0);
  CHECK(kl_bernoulli(0.5, 0.6) ==
        doctest::Approx(0.020410997260127586).epsilon(1e-14));
  SUBCASE("quadratic upper bound from the lower-bound argument") {
    const double delta = 0.02;
    const double kl = kl_bernoulli(0.75, 0.75 + 4.0 * delta);
    CHECK(kl == doctest::Approx(0.020401249507780522).epsilon(1e-14));
    CHECK(kl <= 64.0 * delta * delta);
  }
  SUBCASE("degenerate q") {
    CHECK_THROWS_AS(kl_bernoulli(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(kl_bernoulli(0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(kl_bernoulli(1.5, 0.5), std::invalid_argument);
  }
  SUBCASE("zero only at p = q, convex in q") {
    CHECK(kl_bernoulli(0.3, 0.31) > 0.0);
    const double mid = kl_bernoulli(0.3, 0.5);
    const double avg =
        0.5 * (kl_bernoulli(0.3, 0.4) + kl_bernoulli(0.3, 0.6));
    CHECK(mid <= avg);
  }
}

TEST_CASE("exact design grid") {
  SUBCASE("basis pair") {
    std::vector<Eigen::VectorXd> vs(2, Eigen::VectorXd::Zero(2));
    vs[0] << 1, 0;
    vs[1] << 0, 1;
    const Design design = exact_design_grid(vs, 100);
    CHECK(design.weights[0] == doctest::Approx(0.5));
    CHECK(design.weights[1] == doctest::Approx(0.5));
    CHECK(kw_gap(vs, design) == doctest::Approx(2.0));
  }
  SUBCASE("grid refinement never worsens the gap") {
    std::vector<Eigen::VectorXd> vs(3, Eigen::VectorXd::Zero(2));
    vs[0] << 1, 0.1;
    vs[1] << 0.2, 1;
    vs[2] << 0.9, 0.9;
    const double g20 = kw_gap(vs, exact_design_grid(vs, 20));
    const double g40 = kw_gap(vs, exact_design_grid(vs, 40));
    const double g80 = kw_gap(vs, exact_design_grid(vs, 80));
    CHECK(g40 <= g20 + 1e-12);
    CHECK(g80 <= g40 + 1e-12);
  }
  SUBCASE("too many actions") {
    std::vector<Eigen::VectorXd> vs(6, Eigen::VectorXd::Ones(2));
    CHECK_THROWS_AS(exact_design_grid(vs, 20), std::invalid_argument);
  }
}

TEST_CASE("exact deterministic regret") {
  const Environment env = pe_adversarial(4, 3, 0.3);
  SUBCASE("always playing the optimal arm gives zero regret") {
    FixedActionPolicy fixed(0);
    // Arm 0 has a stochastic context, so the unroll refuses it.
    CHECK_THROWS_AS(exact_regret_deterministic(env, fixed, 10),
                    std::runtime_error);
    FixedActionPolicy near(3);
    const auto curve = exact_regret_deterministic(env, near, 10);
    CHECK(curve.size() == 10);
    CHECK(curve.back() == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("adversarial unroll matches the frozen final value") {
    PhasedElimPolicy policy(env.marginals(), 10000, 0.1,
                            PhasedElimPolicy::DesignMode::ExactGrid);
    const auto curve = exact_regret_deterministic(env, policy, 10000);
    CHECK(curve.back() == doctest::Approx(4019.2).epsilon(1e-12));
    // Regret grows by at least the minimal gap every round: a* is never hit.
    for (std::size_t i = 1; i < curve.size(); ++i) {
      CHECK(curve[i] - curve[i - 1] >= 0.3 - 1e-12);
    }
  }
  SUBCASE("stochastic rewards on the path are rejected") {
    const Environment bern = hard_benign(3, 2, {1, 0.1});
    FixedActionPolicy fixed(0);
    CHECK_THROWS_AS(exact_regret_deterministic(bern, fixed, 5),
                    std::runtime_error);
  }
}

TEST_CASE("event names") {
  CHECK(parse_event_name("EA") == ConcentrationEvent::ActionMeans);
  CHECK(parse_event_name("EZ") == ConcentrationEvent::ContextMeans);
  CHECK(parse_event_name("EMG") == ConcentrationEvent::Martingale);
  CHECK(event_name(ConcentrationEvent::Martingale) == "EMG");
  CHECK_THROWS_AS(parse_event_name("EB"), std::invalid_argument);
}

TEST_CASE("event monitor") {
  SUBCASE("deterministic rewards equal to the mean always hold") {
    std::vector<std::vector<double>> marginals = {{1.0, 0.0}, {0.0, 1.0}};
    std::vector<std::vector<RewardModel>> rewards = {
        {RewardModel::deterministic(0.6), RewardModel::deterministic(0.6)},
        {RewardModel::deterministic(0.6), RewardModel::deterministic(0.6)}};
    const Environment env(marginals, rewards);
    Trace trace;
    for (int t = 0; t < 50; ++t) {
      trace.actions.push_back(t % 2);
      trace.contexts.push_back(t % 2);
      trace.rewards.push_back(0.6);
    }
    CHECK(event_monitor(trace, env, 0.1, ConcentrationEvent::ActionMeans).held);
    CHECK(event_monitor(trace, env, 0.1, ConcentrationEvent::ContextMeans)
              .held);
    CHECK(event_monitor(trace, env, 0.1, ConcentrationEvent::Martingale).held);
  }
  SUBCASE("a displaced mean is flagged at the right round") {
    // One action, Bernoulli(0.5); feed constant reward 1 so the empirical
    // mean sits at 1 while the band shrinks.
    std::vector<std::vector<double>> marginals = {{1.0}, {1.0}};
    std::vector<std::vector<RewardModel>> rewards = {
        {RewardModel::bernoulli(0.5)}, {RewardModel::bernoulli(0.5)}};
    const Environment env(marginals, rewards);
    Trace trace;
    const int rounds = 200;
    for (int t = 0; t < rounds; ++t) {
      trace.actions.push_back(0);
      trace.contexts.push_back(0);
      trace.rewards.push_back(1.0);
    }
    const EventReport report =
        event_monitor(trace, env, 0.1, ConcentrationEvent::ActionMeans);
    CHECK_FALSE(report.held);
    REQUIRE(report.first_violation.has_value());
    // |1 - 0.5| > sqrt(log(2*2*200/0.1) / (2n)) first fails at n = 27.
    const double log_term = std::log(2.0 * 2 * rounds / 0.1);
    const auto n = *report.first_violation;
    CHECK(0.5 > std::sqrt(log_term / (2.0 * static_cast<double>(n))));
    CHECK(0.5 <= std::sqrt(log_term / (2.0 * static_cast<double>(n - 1))));
  }
  SUBCASE("context event requires a benign environment") {
    const Environment env = hard_nonbenign_variant(4, 4, {2, 0.05}, 2);
    Trace trace;
    trace.actions = {0};
    trace.contexts = {0};
    trace.rewards = {1.0};
    CHECK_THROWS_AS(
        event_monitor(trace, env, 0.1, ConcentrationEvent::ContextMeans),
        std::invalid_argument);
  }
}
