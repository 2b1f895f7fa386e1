#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include <sstream>

#include "cbsim/env.hpp"
#include "cbsim/instances.hpp"
#include "cbsim/rng.hpp"

using namespace cbsim;

namespace {

Environment two_arm_benign() {
  BenignSpec spec;
  spec.marginals = {{0.5, 0.5}, {0.5, 0.5}};
  spec.mu_z = {0.75, 0.25};
  return benign_from_parts(spec);
}

}  // namespace

TEST_CASE("mean reward on the hard benign family") {
  const Environment env = hard_benign(4, 4, {2, 0.1});
  CHECK(env.mean_reward(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(env.mean_reward(1) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(env.mean_reward(2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mean reward with constant deterministic rewards") {
  std::vector<std::vector<double>> marginals = {{0.3, 0.7}, {1.0, 0.0}};
  std::vector<std::vector<RewardModel>> rewards(
      2, {RewardModel::deterministic(1.0), RewardModel::deterministic(1.0)});
  const Environment env(marginals, rewards);
  CHECK(env.mean_reward(0) == 1.0);
  CHECK(env.mean_reward(1) == 1.0);
}

TEST_CASE("optimal stats") {
  SUBCASE("adversarial instance has gap delta") {
    const Environment env = pe_adversarial(4, 3, 0.3);
    const auto [a_star, gap] = env.optimal_stats();
    CHECK(a_star == 0);
    CHECK(gap == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("ties break to the lowest index") {
    const Environment env = two_arm_benign();
    const auto [a_star, gap] = env.optimal_stats();
    CHECK(a_star == 0);
    CHECK(gap == 0.0);
  }
  SUBCASE("nonbenign variant moves the optimum to a0") {
    const Environment env = hard_nonbenign_variant(4, 4, {2, 0.05}, 2);
    const auto [a_star, gap] = env.optimal_stats();
    CHECK(a_star == 2);
    CHECK(gap == doctest::Approx(0.05).epsilon(1e-9));
  }
  SUBCASE("single action errors") {
    std::vector<std::vector<double>> marginals = {{1.0}};
    std::vector<std::vector<RewardModel>> rewards = {
        {RewardModel::bernoulli(0.5)}};
    const Environment env(marginals, rewards);
    CHECK_THROWS_WITH_AS(env.optimal_stats(), "degenerate action set",
                         std::invalid_argument);
  }
}

TEST_CASE("sample step") {
  SUBCASE("degenerate distributions are deterministic") {
    std::vector<std::vector<double>> marginals = {{0.0, 0.0, 1.0}};
    std::vector<std::vector<RewardModel>> rewards = {
        {RewardModel::deterministic(0.1), RewardModel::deterministic(0.2),
         RewardModel::deterministic(0.7)}};
    const Environment env(marginals, rewards);
    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
      const StepOutcome out = env.sample_step(0, rng);
      CHECK(out.context == 2);
      CHECK(out.reward == 0.7);
    }
  }
  SUBCASE("last adversarial arm always pays 1 - delta") {
    const Environment env = pe_adversarial(4, 3, 0.3);
    Rng rng(9);
    const StepOutcome out = env.sample_step(3, rng);
    CHECK(out.context == 2);
    CHECK(out.reward == doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("identical seeds give identical traces") {
    const Environment env = hard_benign(3, 4, {2, 0.05});
    Rng rng_a(42), rng_b(42);
    for (int i = 0; i < 200; ++i) {
      const StepOutcome a = env.sample_step(i % 3, rng_a);
      const StepOutcome b = env.sample_step(i % 3, rng_b);
      CHECK(a.context == b.context);
      CHECK(a.reward == b.reward);
    }
  }
}

TEST_CASE("conditionally benign check") {
  CHECK(hard_benign(4, 4, {2, 0.1}).is_conditionally_benign());
  CHECK_FALSE(
      hard_nonbenign_variant(4, 4, {2, 0.05}, 2).is_conditionally_benign());
  SUBCASE("single action is trivially benign") {
    std::vector<std::vector<double>> marginals = {{0.4, 0.6}};
    std::vector<std::vector<RewardModel>> rewards = {
        {RewardModel::bernoulli(0.2), RewardModel::bernoulli(0.9)}};
    CHECK(Environment(marginals, rewards).is_conditionally_benign());
  }
  SUBCASE("unreached contexts are ignored") {
    std::vector<std::vector<double>> marginals = {{1.0, 0.0}, {1.0, 0.0}};
    std::vector<std::vector<RewardModel>> rewards = {
        {RewardModel::bernoulli(0.5), RewardModel::bernoulli(0.1)},
        {RewardModel::bernoulli(0.5), RewardModel::bernoulli(0.9)}};
    CHECK(Environment(marginals, rewards).is_conditionally_benign());
  }
}

TEST_CASE("dim span") {
  CHECK(dim_span({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5, 0.5, 0}}) == 3);
  CHECK(dim_span({{1, 0, 0}, {0, 1, 0}, {0.5, 0.5, 0}}) == 2);
  CHECK(dim_span({{1, 0}, {0, 1}}) == 2);
  SUBCASE("invariant under permutation and duplication") {
    const std::vector<std::vector<double>> base = {
        {0.2, 0.8, 0.0}, {0.5, 0.25, 0.25}, {0.35, 0.525, 0.125}};
    const int r = dim_span(base);
    CHECK(dim_span({base[2], base[0], base[1]}) == r);
    CHECK(dim_span({base[0], base[1], base[2], base[1], base[0]}) == r);
  }
}

TEST_CASE("benign from parts") {
  SUBCASE("inner-product means") {
    const Environment env = two_arm_benign();
    CHECK(env.mean_reward(0) == 0.5);
    CHECK(env.mean_reward(1) == 0.5);
    CHECK(env.is_conditionally_benign());
  }
  SUBCASE("all-zero context means") {
    BenignSpec spec;
    spec.marginals = {{0.3, 0.7}, {0.9, 0.1}};
    spec.mu_z = {0.0, 0.0};
    const Environment env = benign_from_parts(spec);
    CHECK(env.mean_reward(0) == 0.0);
    CHECK(env.mean_reward(1) == 0.0);
  }
  SUBCASE("malformed spec rejected") {
    BenignSpec spec;
    spec.marginals = {{0.5, 0.5}};
    spec.mu_z = {0.5, 1.5};
    CHECK_THROWS_AS(benign_from_parts(spec), std::invalid_argument);
  }
  SUBCASE("Monte Carlo mean matches the inner product") {
    BenignSpec spec;
    spec.marginals = {{0.35, 0.65}, {0.8, 0.2}};
    spec.mu_z = {0.9, 0.15};
    const Environment env = benign_from_parts(spec);
    Rng rng(123);
    const int n = 100000;
    for (ActionId a = 0; a < 2; ++a) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += env.sample_step(a, rng).reward;
      const double mean = sum / n;
      const double expected = env.mean_reward(a);
      const double se = std::sqrt(expected * (1.0 - expected) / n);
      CHECK(std::abs(mean - expected) <= 3.0 * se + 1e-12);
    }
  }
}

TEST_CASE("context means") {
  const Environment env = hard_benign(3, 4, {2, 0.1});
  const auto mu_z = env.context_means();
  CHECK(mu_z.size() == 4);
  CHECK(mu_z[0] == doctest::Approx(0.75));
  CHECK(mu_z[3] == doctest::Approx(0.25));
  CHECK_THROWS_AS(
      hard_nonbenign_variant(4, 4, {2, 0.05}, 2).context_means(),
      std::invalid_argument);
}

TEST_CASE("environment JSON round trip") {
  const Environment env = hard_nonbenign_variant(3, 3, {1, 0.08}, 2);
  const std::string text = environment_to_json(env);
  std::istringstream in(text);
  const Environment back = load_environment_json(in);
  CHECK(back.n_actions() == env.n_actions());
  CHECK(back.n_contexts() == env.n_contexts());
  for (ActionId a = 0; a < env.n_actions(); ++a) {
    CHECK(back.mean_reward(a) == doctest::Approx(env.mean_reward(a)));
    for (ContextId z = 0; z < env.n_contexts(); ++z) {
      CHECK(back.marginal_row(a)[static_cast<std::size_t>(z)] ==
            env.marginal_row(a)[static_cast<std::size_t>(z)]);
      CHECK(back.reward_model(a, z).param == env.reward_model(a, z).param);
    }
  }
}

TEST_CASE("loader reports the first invalid row") {
  std::istringstream in(R"({
    "n_actions": 2, "n_contexts": 2,
    "marginals": [[0.5, 0.5], [0.6, 0.6]],
    "rewards": [[{"kind":"bernoulli","p":0.5},{"kind":"bernoulli","p":0.5}],
                [{"kind":"bernoulli","p":0.5},{"kind":"bernoulli","p":0.5}]]
  })");
  try {
    load_environment_json(in);
    FAIL("expected a validation error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}
