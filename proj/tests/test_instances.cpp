#include "doctest.h"

#include <stdexcept>

#include <cmath>

#include "cbsim/instances.hpp"

using namespace cbsim;

namespace {

double block_mass(const std::vector<double>& row, int z0_size) {
  double sum = 0.0;
  for (int z = 0; z < z0_size; ++z) sum += row[static_cast<std::size_t>(z)];
  return sum;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

}  // namespace

TEST_CASE("hard benign family") {
  const Environment env = hard_benign(5, 6, {3, 0.1});
  CHECK(block_mass(env.marginal_row(1), 3) == doctest::Approx(0.7));
  CHECK(block_mass(env.marginal_row(0), 3) == doctest::Approx(0.5));
  CHECK(env.mean_reward(1) == doctest::Approx(0.6));
  CHECK(env.mean_reward(3) == doctest::Approx(0.5));
  CHECK(env.is_conditionally_benign());
  const auto [a_star, gap] = env.optimal_stats();
  CHECK(a_star == 1);
  CHECK(gap == doctest::Approx(0.1));
  CHECK_THROWS_AS(hard_benign(5, 6, {3, 0.3}), std::invalid_argument);
  CHECK_THROWS_AS(hard_benign(5, 6, {6, 0.1}), std::invalid_argument);
}

TEST_CASE("hard nonbenign variant") {
  const Environment env = hard_nonbenign_variant(4, 4, {2, 0.05}, 2);
  CHECK(env.reward_model(2, 0).param == doctest::Approx(0.95));
  CHECK(env.reward_model(2, 1).param == doctest::Approx(0.95));
  CHECK(env.reward_model(2, 2).param == doctest::Approx(0.25));
  CHECK(env.reward_model(0, 0).param == doctest::Approx(0.75));
  CHECK_FALSE(env.is_conditionally_benign());
  CHECK(env.mean_reward(2) == doctest::Approx(0.6));
  CHECK(env.mean_reward(1) == doctest::Approx(0.55));
  CHECK_THROWS_AS(hard_nonbenign_variant(4, 4, {2, 0.05}, 1),
                  std::invalid_argument);

  SUBCASE("marginals identical to the benign base") {
    const Environment base = hard_benign(4, 4, {2, 0.05});
    for (ActionId a = 0; a < 4; ++a) {
      CHECK(l1_distance(env.marginal_row(a), base.marginal_row(a)) == 0.0);
    }
  }
  SUBCASE("boosted probability is capped at 1") {
    const Environment capped = hard_nonbenign_variant(4, 4, {2, 0.1}, 2);
    CHECK(capped.reward_model(2, 0).param == doctest::Approx(1.0));
  }
}

TEST_CASE("agnostic family") {
  CHECK(agnostic_default_delta(10, 10000) == doctest::Approx(0.00075));
  const double delta = 0.01;
  const Environment base = agnostic_variant(6, 4, {2, delta});
  const Environment variant = agnostic_variant(6, 4, {2, delta}, 3);
  CHECK(base.is_conditionally_benign());
  CHECK(variant.is_conditionally_benign());
  CHECK(variant.mean_reward(3) == doctest::Approx(0.5 + 2.0 * delta));
  CHECK(variant.mean_reward(1) == doctest::Approx(0.5 + delta));

  SUBCASE("only the a0 marginal row differs, with L1 distance 8 delta") {
    // 4 delta of mass moves between the blocks, so the row L1 gap is 8 delta
    // (total variation 4 delta).
    for (ActionId a = 0; a < 6; ++a) {
      const double dist =
          l1_distance(base.marginal_row(a), variant.marginal_row(a));
      if (a == 3) {
        CHECK(dist == doctest::Approx(8.0 * delta));
      } else {
        CHECK(dist == 0.0);
      }
    }
  }
  SUBCASE("reward conditionals are shared") {
    for (ActionId a = 0; a < 6; ++a) {
      for (ContextId z = 0; z < 4; ++z) {
        CHECK(base.reward_model(a, z).param ==
              variant.reward_model(a, z).param);
      }
    }
  }
  CHECK_THROWS_AS(agnostic_variant(6, 4, {2, delta}, 1), std::invalid_argument);
  CHECK_THROWS_AS(agnostic_variant(6, 4, {2, 0.2}), std::invalid_argument);
}

TEST_CASE("adversarial elimination instance") {
  const Environment env = pe_adversarial(4, 3, 0.3);
  CHECK(env.mean_reward(0) == doctest::Approx(1.0));
  CHECK(env.mean_reward(1) == 0.0);
  CHECK(env.mean_reward(2) == 0.0);
  CHECK(env.mean_reward(3) == doctest::Approx(0.7));
  CHECK(dim_span(env.marginals()) == 3);
  CHECK_FALSE(env.is_conditionally_benign());
  CHECK_THROWS_AS(pe_adversarial(3, 2, 0.3), std::invalid_argument);

  SUBCASE("extra actions replicate the first point-mass arm") {
    const Environment wide = pe_adversarial(6, 3, 0.3);
    CHECK(l1_distance(wide.marginal_row(4), wide.marginal_row(1)) == 0.0);
    CHECK(l1_distance(wide.marginal_row(5), wide.marginal_row(1)) == 0.0);
    CHECK(wide.mean_reward(4) == 0.0);
  }
}

TEST_CASE("marginal perturbation") {
  SUBCASE("zero epsilon is the identity") {
    const std::vector<std::vector<double>> rows = {{0.2, 0.3, 0.5}};
    CHECK(perturb_marginals(rows, 0.0) == rows);
  }
  SUBCASE("direct mass move") {
    const auto out = perturb_marginals({{0.5, 0.5}}, 0.2);
    CHECK(out[0][0] == doctest::Approx(0.4));
    CHECK(out[0][1] == doctest::Approx(0.6));
  }
  SUBCASE("rows stay distributions and epsilon-close") {
    const std::vector<std::vector<double>> rows = {
        {0.1, 0.6, 0.3}, {0.25, 0.25, 0.5}, {1.0, 0.0, 0.0}};
    const double eps = 0.3;
    const auto out = perturb_marginals(rows, eps);
    for (std::size_t a = 0; a < rows.size(); ++a) {
      double sum = 0.0;
      for (double x : out[a]) {
        CHECK(x >= 0.0);
        sum += x;
      }
      CHECK(sum == doctest::Approx(1.0));
      CHECK(l1_distance(rows[a], out[a]) <= eps + 1e-12);
    }
  }
  SUBCASE("single-context rows are rejected by name") {
    try {
      perturb_marginals({{1.0}}, 0.1);
      FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("row 0") != std::string::npos);
    }
  }
}
