#include <doctest.h>

#include <cmath>
#include <random>

#include "recsim/dynamics.hpp"
#include "recsim/error.hpp"
#include "support.hpp"

using namespace recsim;

TEST_SUITE("dynamics") {

TEST_CASE("polarization update") {
  CHECK(update_polarization(0.3, 1.0, -0.9) == 0.3);
  CHECK(update_polarization(0.3, 0.0, -0.7) == -0.7);
  CHECK(std::abs(update_polarization(0.2, 0.5, 0.6) - 0.4) <= 1e-12);
}

TEST_CASE("engagement update") {
  CHECK(update_engagement(0.0, 0.5, 1.0, 1.0) == 0.5);
  CHECK(std::abs(update_engagement(0.4, 0.9, 0.0, 0.8) - 0.36) <= 1e-12);
  CHECK(update_engagement(-0.25, 1.0, 0.7, 0.9) == -0.25);
}

TEST_CASE("inputs outside their ranges are rejected") {
  CHECK_THROWS_AS(update_polarization(1.2, 0.5, 0.0), RangeError);
  CHECK_THROWS_AS(update_polarization(0.0, -0.1, 0.0), RangeError);
  CHECK_THROWS_AS(update_polarization(0.0, 0.5, 1.01), RangeError);
  CHECK_THROWS_AS(update_engagement(0.0, 0.5, 1.5, 0.0), RangeError);
  CHECK_THROWS_AS(update_engagement(0.0, 0.5, 0.5, std::nan("")), RangeError);
  CHECK_THROWS_AS(validate(DynamicsParams{1.2, 0.9, 0.1}), RangeError);
  CHECK_NOTHROW(validate(DynamicsParams{}));
}

TEST_CASE("constant impact converges geometrically") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> weight(0.0, 0.99);
  for (int triple = 0; triple < 20; ++triple) {
    const double alpha = weight(gen);
    const double f = unit(gen);
    const double p0 = unit(gen);
    double p = p0;
    for (int t = 1; t <= 100; ++t) {
      p = update_polarization(p, alpha, f);
      const double closed = std::pow(alpha, t) * p0 + (1.0 - std::pow(alpha, t)) * f;
      REQUIRE(std::abs(p - closed) <= 1e-12);
      CHECK(std::abs(p - f) <= std::pow(alpha, t) * std::abs(p0 - f) + 1e-12);
    }
  }
}

TEST_CASE("scores stay bounded under random impacts") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  double p = 1.0, e = -1.0;
  for (int t = 0; t < 10000; ++t) {
    p = update_polarization(p, prob(gen), unit(gen));
    e = update_engagement(e, prob(gen), prob(gen), unit(gen));
    REQUIRE(p >= -1.0);
    REQUIRE(p <= 1.0);
    REQUIRE(e >= -1.0);
    REQUIRE(e <= 1.0);
  }
}

TEST_CASE("trait drift") {
  auto a = testing::agent("a", 4.0, {"art"});
  a.statics.open_mindedness = 7;
  const std::vector<double> sixes{6.0, 6.0};

  SUBCASE("zero rate leaves traits alone") {
    const auto d = drift_dynamic_traits(a, sixes, ReactionSummary{2, 0, 1}, DynamicsParams{0.9, 0.9, 0.0});
    CHECK(d == a.dynamics);
  }
  SUBCASE("attitude moves toward the consumed stance") {
    const auto d = drift_dynamic_traits(a, sixes, ReactionSummary{}, DynamicsParams{0.9, 0.9, 0.5});
    CHECK(d.political_attitude == 5.0);
  }
  SUBCASE("agreement is a fixed point") {
    a.dynamics.political_attitude = 7.0;
    const std::vector<double> sevens{7.0, 7.0, 7.0};
    const auto d = drift_dynamic_traits(a, sevens, ReactionSummary{}, DynamicsParams{0.9, 0.9, 0.5});
    CHECK(d.political_attitude == 7.0);
  }
  SUBCASE("negative sessions raise emotive reaction and requests raise connectivity") {
    a.statics.neuroticism = 7;
    const auto d = drift_dynamic_traits(a, sixes, ReactionSummary{0, 2, 3}, DynamicsParams{0.9, 0.9, 0.5});
    CHECK(d.emotive_reaction == 4.5);
    CHECK(d.social_connectivity == 5.5);
  }
  SUBCASE("nothing consumed") {
    CHECK_THROWS_AS(drift_dynamic_traits(a, std::vector<double>{}, ReactionSummary{}, DynamicsParams{}),
                    EmptyConsumption);
  }
}

TEST_CASE("drifted traits stay on the scale") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> stance(1.0, 7.0);
  std::uniform_real_distribution<double> rate(0.0, 1.0);
  auto a = testing::agent("a", 1.0, {"art"});
  a.statics.open_mindedness = 7;
  a.statics.neuroticism = 7;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 1 + gen() % 10;
    std::vector<double> consumed;
    for (std::size_t i = 0; i < n; ++i) consumed.push_back(stance(gen));
    const std::size_t neg = gen() % (n + 1);
    ReactionSummary r{n - neg, neg, static_cast<std::size_t>(gen() % 4)};
    a.dynamics = drift_dynamic_traits(a, consumed, r, DynamicsParams{0.9, 0.9, rate(gen)});
    REQUIRE(a.dynamics.political_attitude >= 1.0);
    REQUIRE(a.dynamics.political_attitude <= 7.0);
    REQUIRE(a.dynamics.emotive_reaction >= 1.0);
    REQUIRE(a.dynamics.emotive_reaction <= 7.0);
    REQUIRE(a.dynamics.social_connectivity >= 1.0);
    REQUIRE(a.dynamics.social_connectivity <= 7.0);
  }
}

}
