#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ptgame/marginals.hpp"
#include "support.hpp"

using namespace ptgame;
namespace t = ptgame::testing;

namespace {

ValidatedGame two_state_game(TransitionKernel kernel, int actions) {
  GameSpec spec;
  spec.discount_beta = 0.5;
  PlayerSpec p;
  p.state_count = 2;
  p.action_count = actions;
  p.kernel = std::move(kernel);
  spec.players.push_back(p);
  spec.payoff = PayoffTable{std::vector<double>(static_cast<std::size_t>(2 * actions), 0.0)};
  return validate_game(spec);
}

double stage_mass(const MarginalTable& m, int tt) {
  double s = 0.0;
  for (double v : m.rho.stage(tt)) s += v;
  return s;
}

}  // namespace

TEST_CASE("first-stage marginals are the Dirac mass times the strategy") {
  const auto g = two_state_game(TransitionKernel::stationary(2, 2, {1, 0, 0, 1, 0.5, 0.5, 0.5, 0.5}), 2);
  auto pi = MarkovStrategy::uniform(0, 1, 2, 2);
  pi.dist(1, 0, 0) = 0.4;
  pi.dist(1, 0, 1) = 0.6;
  const auto rho = forward_marginals(g, pi, 0, 1);
  CHECK(rho(1, 0, 0) == 0.4);
  CHECK(rho(1, 0, 1) == 0.6);
  CHECK(rho(1, 1, 0) == 0.0);
  CHECK(rho(1, 1, 1) == 0.0);
}

TEST_CASE("mass moves onto an absorbing target state") {
  const auto g = two_state_game(t::deterministic_kernel(2, 2, [](int, int) { return 1; }), 2);
  const auto rho = forward_marginals(g, MarkovStrategy::uniform(0, 2, 2, 2), 0, 2);
  CHECK(rho(2, 0, 0) == 0.0);
  CHECK(rho(2, 0, 1) == 0.0);
  CHECK(rho(2, 1, 0) == 0.5);
  CHECK(rho(2, 1, 1) == 0.5);
}

TEST_CASE("forward marginals agree with Monte Carlo frequencies") {
  std::mt19937_64 rng(99);
  GameSpec spec;
  spec.discount_beta = 0.5;
  PlayerSpec p;
  p.state_count = 3;
  p.action_count = 2;
  std::vector<double> probs;
  for (int k = 0; k < 6; ++k) {
    const auto row = t::random_distribution(rng, 3);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  p.kernel = TransitionKernel::stationary(3, 2, probs);
  spec.players.push_back(p);
  spec.payoff = PayoffTable{std::vector<double>(6, 0.0)};
  const auto g = validate_game(spec);
  const int m = 4;
  const auto pi = t::random_strategy(rng, g, 0, m, 0.0);
  const auto rho = forward_marginals(g, pi, 1, m);
  const std::size_t n = 1'000'000;
  const auto freq = oracle::monte_carlo_marginals(g, pi, 1, m, n, 5);
  for (int tt = 1; tt <= m; ++tt) {
    for (int s = 0; s < 3; ++s) {
      for (int a = 0; a < 2; ++a) {
        const double p0 = rho(tt, s, a);
        const double se = std::sqrt(std::max(p0 * (1 - p0), 1e-12) / static_cast<double>(n));
        CHECK(std::abs(freq(tt, s, a) - p0) <= 3 * se + 1e-12);
      }
    }
  }
}

TEST_CASE("forward marginals conserve probability and satisfy the flow constraints") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const auto g = t::random_game(rng, {.players = 1, .max_states = 4, .max_actions = 3});
    const int m = std::uniform_int_distribution<int>(1, 5)(rng);
    const auto pi = t::random_strategy(rng, g, 0, m);
    const int x = t::random_initial_state(rng, g)[0];
    const auto rho = forward_marginals(g, pi, x, m);
    for (int tt = 1; tt <= m; ++tt) CHECK(std::abs(stage_mass(rho, tt) - 1.0) <= 1e-10);
    CHECK(check_flow_constraints(g, rho, x).empty());
  }
}

TEST_CASE("broken Dirac constraint is reported per state") {
  const auto g = two_state_game(TransitionKernel::stationary(2, 2, {1, 0, 0, 1, 0.5, 0.5, 0.5, 0.5}), 2);
  MarginalTable rho{0, StageTable(1, 2, 2)};
  rho.rho(1, 0, 0) = 0.5;
  rho.rho(1, 0, 1) = 0.5;
  const auto v = check_flow_constraints(g, rho, 1);
  REQUIRE(v.size() == 2);
  CHECK(v[0].t == 1);
  CHECK(v[0].s == 0);
  CHECK(v[0].residual == 1.0);
  CHECK(v[1].s == 1);
  CHECK(v[1].residual == -1.0);
}

TEST_CASE("a perturbed entry flags exactly the constraints it touches") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 30; ++rep) {
    const auto g = t::random_game(rng, {.players = 1, .max_states = 3, .max_actions = 2, .sparsity = 0.0});
    const auto& pl = g.player(0);
    const int m = 3;
    const int x = 0;
    auto rho = forward_marginals(g, t::random_strategy(rng, g, 0, m), x, m);
    const int tt = std::uniform_int_distribution<int>(1, m)(rng);
    const int s = std::uniform_int_distribution<int>(0, pl.state_count - 1)(rng);
    const int a = std::uniform_int_distribution<int>(0, pl.action_count - 1)(rng);
    rho.rho(tt, s, a) += 1e-3;

    // Residuals recomputed from the definition.
    std::vector<std::pair<int, int>> expected;
    for (int u = 1; u <= m; ++u) {
      for (int y = 0; y < pl.state_count; ++y) {
        double lhs = 0.0, rhs = 0.0;
        for (int b = 0; b < pl.action_count; ++b) lhs += rho(u, y, b);
        if (u == 1) {
          rhs = y == x ? 1.0 : 0.0;
        } else {
          for (int s2 = 0; s2 < pl.state_count; ++s2)
            for (int b = 0; b < pl.action_count; ++b) rhs += rho(u - 1, s2, b) * pl.kernel(u - 1, s2, b, y);
        }
        if (std::abs(lhs - rhs) > 1e-9) expected.emplace_back(u, y);
      }
    }
    const auto v = check_flow_constraints(g, rho, x);
    REQUIRE(v.size() == expected.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      CHECK(v[k].kind == FlowViolation::Kind::flow);
      CHECK(v[k].t == expected[k].first);
      CHECK(v[k].s == expected[k].second);
    }
    CHECK(v.front().t == tt);
  }
}

TEST_CASE("negative entries are flagged") {
  const auto g = two_state_game(TransitionKernel::stationary(2, 1, {1, 0, 0, 1}), 1);
  MarginalTable rho{0, StageTable(1, 2, 1)};
  rho.rho(1, 0, 0) = 1.5;
  rho.rho(1, 1, 0) = -0.5;
  const auto v = check_flow_constraints(g, rho, 0);
  bool negative = false;
  for (const auto& f : v) negative |= f.kind == FlowViolation::Kind::negative && f.s == 1 && f.residual == -0.5;
  CHECK(negative);
  CHECK_THROWS(strategy_from_marginals(rho));
}

TEST_CASE("strategy reconstruction from marginals") {
  MarginalTable rho{0, StageTable(1, 2, 2)};
  rho.rho(1, 0, 0) = 0.2;
  rho.rho(1, 0, 1) = 0.2;
  const auto pi = strategy_from_marginals(rho);
  CHECK(pi(1, 0, 0) == 0.5);
  CHECK(pi(1, 0, 1) == 0.5);
  CHECK(pi(1, 1, 0) == 0.5);
  CHECK(pi(1, 1, 1) == 0.5);

  MarginalTable three{0, StageTable(1, 1, 3)};
  const auto u = strategy_from_marginals(three);
  for (int a = 0; a < 3; ++a) CHECK(u(1, 0, a) == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
}

TEST_CASE("forward, invert, forward round trip") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = t::random_game(rng, {.players = 1, .max_states = 4, .max_actions = 3});
    const int m = std::uniform_int_distribution<int>(1, 5)(rng);
    const int x = t::random_initial_state(rng, g)[0];
    const auto rho = forward_marginals(g, t::random_strategy(rng, g, 0, m), x, m);
    const auto again = forward_marginals(g, strategy_from_marginals(rho), x, m);
    for (std::size_t k = 0; k < rho.rho.data().size(); ++k) {
      CHECK(std::abs(rho.rho.data()[k] - again.rho.data()[k]) <= 1e-12);
    }
  }
}

TEST_CASE("convex combinations of valid tables stay valid") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const auto g = t::random_game(rng, {.players = 1, .max_states = 3, .max_actions = 3});
    const int m = 4;
    const auto r1 = forward_marginals(g, t::random_strategy(rng, g, 0, m), 0, m);
    const auto r2 = forward_marginals(g, t::random_strategy(rng, g, 0, m), 0, m);
    for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      MarginalTable mix{0, r1.rho};
      for (int tt = 1; tt <= m; ++tt)
        for (int s = 0; s < r1.rho.state_count(); ++s)
          for (int a = 0; a < r1.rho.action_count(); ++a)
            mix.rho(tt, s, a) = lambda * r1(tt, s, a) + (1 - lambda) * r2(tt, s, a);
      CHECK(check_flow_constraints(g, mix, 0).empty());
    }
  }
}

TEST_CASE("deterministic policies") {
  DeterministicMarkovPolicy pol{0, 2, 2, {1, 0, 0, 1}};
  const auto pi = dm_policy_to_strategy(pol, 2);
  CHECK(pi(1, 0, 0) == 0.0);
  CHECK(pi(1, 0, 1) == 1.0);

  // argmax recovers the policy
  DeterministicMarkovPolicy back{0, 2, 2, std::vector<int>(4)};
  for (int tt = 1; tt <= 2; ++tt)
    for (int s = 0; s < 2; ++s) back.at(tt, s) = pi(tt, s, 1) > pi(tt, s, 0) ? 1 : 0;
  CHECK(back == pol);

  // marginals of a deterministic policy against chain path enumeration
  const auto g = two_state_game(TransitionKernel::stationary(2, 2, {0.3, 0.7, 1, 0, 0.6, 0.4, 0.2, 0.8}), 2);
  const int m = 2;
  const auto rho = forward_marginals(g, pi, 0, m);
  StageTable paths(m, 2, 2);
  // stage 1: state 0, action pol(1,0)=1; stage 2: next state y with q(y|0,1)
  paths(1, 0, pol(1, 0)) += 1.0;
  for (int y = 0; y < 2; ++y) paths(2, y, pol(2, y)) += g.player(0).kernel(1, 0, pol(1, 0), y);
  CHECK(rho.rho == paths);

  // at most one nonzero action column per state and stage
  for (int tt = 1; tt <= m; ++tt)
    for (int s = 0; s < 2; ++s) CHECK((rho(tt, s, 0) == 0.0 || rho(tt, s, 1) == 0.0));

  CHECK_THROWS(dm_policy_to_strategy({0, 1, 1, {2}}, 2));
}

TEST_CASE("marginal computation rejects bad inputs") {
  const auto g = two_state_game(TransitionKernel::stationary(2, 1, {1, 0, 0, 1}), 1);
  const auto pi = MarkovStrategy::uniform(0, 2, 2, 1);
  CHECK_THROWS(forward_marginals(g, pi, 2, 2));
  CHECK_THROWS(forward_marginals(g, pi, 0, 3));
  auto bad = pi;
  bad.dist(1, 0, 0) = 0.9;
  CHECK_THROWS(check_strategy(g, bad));
}
