#include <doctest.h>

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "oracles.hpp"
#include "ptgame/best_response.hpp"
#include "ptgame/pt_criterion.hpp"
#include "support.hpp"

using namespace ptgame;
namespace t = ptgame::testing;

namespace {

StageRewardTable random_rewards(std::mt19937_64& rng, const ValidatedGame& g, std::size_t i, int m) {
  const auto& p = g.player(i);
  StageRewardTable r{i, StageTable(m, p.state_count, p.action_count)};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int tt = 1; tt <= m; ++tt)
    for (int s = 0; s < p.state_count; ++s)
      for (int a = 0; a < p.action_count; ++a) r.reward(tt, s, a) = u(rng);
  return r;
}

ValidatedGame single_player(std::mt19937_64& rng, int states, int actions) {
  for (;;) {
    auto g = t::random_game(rng, {.players = 1, .max_states = states, .max_actions = actions});
    if (g.player(0).state_count == states && g.player(0).action_count == actions) return g;
  }
}

}  // namespace

TEST_CASE("one-step best response is the row maximum") {
  std::mt19937_64 rng(1);
  const auto g = single_player(rng, 3, 4);
  const auto r = random_rewards(rng, g, 0, 1);
  for (int x = 0; x < 3; ++x) {
    const auto br = backward_induction(g, 0, r, x, 1);
    double best = -INFINITY;
    for (int a = 0; a < 4; ++a) best = std::max(best, r(1, x, a));
    CHECK(br.value == best);
    CHECK(r(1, x, br.policy(1, x)) == best);
  }
}

TEST_CASE("zero rewards pick action 0 everywhere") {
  std::mt19937_64 rng(2);
  const auto g = single_player(rng, 3, 3);
  StageRewardTable r{0, StageTable(4, 3, 3)};
  const auto br = backward_induction(g, 0, r, 1, 4);
  CHECK(br.value == 0.0);
  for (int c : br.policy.choice) CHECK(c == 0);
}

TEST_CASE("backward induction equals exhaustive policy search") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const auto g = t::random_game(rng, {.players = std::uniform_int_distribution<int>(1, 3)(rng)});
    const int m = std::uniform_int_distribution<int>(1, 3)(rng);
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, g.player_count() - 1)(rng);
    const auto profile = t::random_profile(rng, g, m);
    const auto x = t::random_initial_state(rng, g);
    const auto rho = profile_marginals(g, profile, x, m);
    const auto r = induced_stage_rewards(g, i, rho, m);
    const auto br = backward_induction(g, i, r, x[i], m);
    const auto en = enumerate_dm_policies(g, i, r, x[i], m);
    CHECK(std::abs(br.value - en.value) <= 1e-9);
    CHECK(std::abs(br.value - oracle::best_deterministic_value(g, r, x[i], m)) <= 1e-9);
    CHECK(br.value == br.value_by_stage_state[0][static_cast<std::size_t>(x[i])]);
    CHECK(std::abs(evaluate_dm_policy(g, br.policy, r, x[i]) - br.value) <= 1e-12);
  }
}

TEST_CASE("policy counts") {
  std::mt19937_64 rng(4);
  const auto one = single_player(rng, 3, 1);
  const auto r1 = random_rewards(rng, one, 0, 3);
  CHECK(enumerate_dm_policies(one, 0, r1, 0, 3).policies_enumerated == 1);

  const auto g = single_player(rng, 2, 2);
  const auto r = random_rewards(rng, g, 0, 2);
  CHECK(dm_policy_count(g, 0, 2) == 16);
  CHECK(enumerate_dm_policies(g, 0, r, 0, 2).policies_enumerated == 16);
  CHECK(enumerate_dm_policies_serial(g, 0, r, 0, 2).policies_enumerated == 16);

  // index 1 changes only the last (t, s) slot
  const auto p1 = dm_policy_at(g, 0, 2, 1);
  CHECK(p1.choice == std::vector<int>{0, 0, 0, 1});
  CHECK(dm_policy_at(g, 0, 2, 8).choice == std::vector<int>{1, 0, 0, 0});

  const auto big = single_player(rng, 3, 4);
  const auto rb = random_rewards(rng, big, 0, 4);
  CHECK(dm_policy_count(big, 0, 4) == 16777216);
  CHECK_THROWS_AS(enumerate_dm_policies(big, 0, rb, 0, 4), std::length_error);
  CHECK_THROWS_AS(enumerate_dm_policies_serial(big, 0, rb, 0, 4), std::length_error);
}

TEST_CASE("best response dominates randomized strategies") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const auto g = single_player(rng, 3, 2);
    const int m = 3;
    const auto r = random_rewards(rng, g, 0, m);
    const auto best = enumerate_dm_policies(g, 0, r, 0, m).value;
    for (int k = 0; k < 100; ++k) {
      const auto pi = t::random_strategy(rng, g, 0, m);
      CHECK(best >= oracle::policy_evaluation(g, pi, r, 0, m) - 1e-12);
      CHECK(best >= expected_reward(forward_marginals(g, pi, 0, m), r) - 1e-12);
    }
  }
}

TEST_CASE("induced rewards reproduce the PT payoff") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = t::random_game(rng, {.players = std::uniform_int_distribution<int>(1, 3)(rng)});
    const int m = std::uniform_int_distribution<int>(1, 4)(rng);
    const auto profile = t::random_profile(rng, g, m);
    const auto x = t::random_initial_state(rng, g);
    const auto rho = profile_marginals(g, profile, x, m);
    const auto report = pt_payoff(g, rho, m);
    for (std::size_t i = 0; i < g.player_count(); ++i) {
      const auto r = induced_stage_rewards(g, i, rho, m);
      CHECK(std::abs(expected_reward(rho[i], r) - report.players[i].value) <= 1e-10);
      CHECK(report.players[i].value <= backward_induction(g, i, r, x[i], m).value + 1e-12);
    }
  }
}

TEST_CASE("induced rewards against a single-cell opponent") {
  GameSpec spec;
  spec.discount_beta = 0.4;
  PlayerSpec p;
  p.state_count = 2;
  p.action_count = 2;
  p.kernel = TransitionKernel::stationary(2, 2, {0.5, 0.5, 1, 0, 0, 1, 0.2, 0.8});
  p.weighting = WeightingFunction::prelec(0.5);
  p.valuation = ValuationFunction::piecewise_power(0.5, 2.0, 0.5);
  spec.players = {p, t::trivial_player()};
  spec.payoff = PayoffTable{{4.0, -1.0, 0.25, 9.0}, {0, 0, 0, 0}};
  const auto g = validate_game(spec);
  const int m = 3;
  const auto rho = profile_marginals(g, {MarkovStrategy::uniform(0, m, 2, 2), MarkovStrategy::uniform(1, m, 1, 1)},
                                     std::vector<int>{0, 0}, m);
  const auto r = induced_stage_rewards(g, 0, rho, m);
  for (int tt = 1; tt <= m; ++tt)
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        const double expect = std::pow(0.4, tt - 1) * p.valuation(g.payoff(0, static_cast<std::uint64_t>(s * 2 + a)));
        CHECK(r(tt, s, a) == doctest::Approx(expect).epsilon(1e-15));
      }
}

TEST_CASE("identity PT rewards are discounted expectations over opponents") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const auto g = t::random_game(rng, {.players = 3, .identity_pt = true});
    const int m = 3;
    const auto profile = t::random_profile(rng, g, m);
    const auto x = t::random_initial_state(rng, g);
    const auto rho = profile_marginals(g, profile, x, m);
    const auto r = induced_stage_rewards(g, 0, rho, m);
    const auto& idx = g.indexer();
    for (int tt = 1; tt <= m; ++tt) {
      StageTable expect(m, g.player(0).state_count, g.player(0).action_count);
      for (std::uint64_t j = 0; j < idx.size(); ++j) {
        std::vector<int> s(3), a(3);
        idx.decode(j, s, a);
        const double q = rho[1](tt, s[1], a[1]) * rho[2](tt, s[2], a[2]);
        expect(tt, s[0], a[0]) += std::pow(g.beta(), tt - 1) * q * g.payoff(0, j);
      }
      for (int s = 0; s < g.player(0).state_count; ++s)
        for (int a = 0; a < g.player(0).action_count; ++a) CHECK(std::abs(r(tt, s, a) - expect(tt, s, a)) <= 1e-12);
    }
  }
}

TEST_CASE("induced rewards match a term-by-term expansion over opponent tuples") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const auto g = t::random_game(rng, {.players = 3});
    const int m = 2;
    const auto profile = t::random_profile(rng, g, m);
    const auto x = t::random_initial_state(rng, g);
    const auto rho = profile_marginals(g, profile, x, m);
    const std::size_t i = 1;
    const auto r = induced_stage_rewards(g, i, rho, m);
    const auto& pl = g.player(i);
    for (int tt = 1; tt <= m; ++tt) {
      for (int s = 0; s < pl.state_count; ++s) {
        for (int a = 0; a < pl.action_count; ++a) {
          double sum = 0.0;
          for (int s0 = 0; s0 < g.player(0).state_count; ++s0)
            for (int a0 = 0; a0 < g.player(0).action_count; ++a0)
              for (int s2 = 0; s2 < g.player(2).state_count; ++s2)
                for (int a2 = 0; a2 < g.player(2).action_count; ++a2) {
                  const double q = rho[0](tt, s0, a0) * rho[2](tt, s2, a2);
                  if (q == 0.0) continue;
                  const std::vector<int> js{s0, s, s2}, ja{a0, a, a2};
                  sum += pl.weighting(q) * pl.valuation(oracle::payoff_at(g, i, js, ja));
                }
          CHECK(std::abs(r(tt, s, a) - std::pow(g.beta(), tt - 1) * sum) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("parallel and serial enumeration agree exactly") {
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
#endif
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const auto g = single_player(rng, 3, 3);
    const int m = 3;
    auto r = random_rewards(rng, g, 0, m);
    if (rep % 4 == 0) {
      // heavy ties
      for (int tt = 1; tt <= m; ++tt)
        for (int s = 0; s < 3; ++s)
          for (int a = 0; a < 3; ++a) r.reward(tt, s, a) = std::round(r(tt, s, a));
    }
    const auto par = enumerate_dm_policies(g, 0, r, 0, m);
    const auto ser = enumerate_dm_policies_serial(g, 0, r, 0, m);
    CHECK(par.value == ser.value);
    CHECK(par.policy == ser.policy);
    CHECK(par.policies_enumerated == ser.policies_enumerated);
  }
#ifdef _OPENMP
  omp_set_num_threads(saved);
#endif
}

TEST_CASE("backward induction is deterministic") {
  std::mt19937_64 rng(10);
  const auto g = single_player(rng, 3, 2);
  auto r = random_rewards(rng, g, 0, 3);
  r.reward(2, 1, 0) = r.reward(2, 1, 1);
  const auto a = backward_induction(g, 0, r, 0, 3);
  const auto b = backward_induction(g, 0, r, 0, 3);
  CHECK(a.policy == b.policy);
  CHECK(a.value == b.value);
  CHECK_THROWS(backward_induction(g, 0, r, 0, 4));
  CHECK_THROWS(backward_induction(g, 0, r, 5, 3));
}
