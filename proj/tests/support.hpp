#pragma once

#include <random>
#include <vector>

#include "ptgame/game.hpp"
#include "ptgame/marginals.hpp"

namespace ptgame::testing {

struct RandomGameOptions {
  int players = 2;
  int max_states = 3;
  int max_actions = 2;
  int max_kernel_stages = 3;  // 1 => stationary
  bool identity_pt = false;
  double beta_lo = 0.2;
  double beta_hi = 0.9;
  // Chance that a kernel entry is forced to zero (sparse rows).
  double sparsity = 0.3;
};

inline std::vector<double> random_distribution(std::mt19937_64& rng, int size, double sparsity = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(size));
  double total = 0.0;
  for (auto& v : p) {
    v = u(rng) < sparsity ? 0.0 : u(rng) + 1e-3;
    total += v;
  }
  if (total == 0.0) {
    p[std::uniform_int_distribution<int>(0, size - 1)(rng)] = 1.0;
    return p;
  }
  for (auto& v : p) v /= total;
  // Put any rounding residue on the largest entry so rows sum to 1 tightly.
  double sum = 0.0;
  for (double v : p) sum += v;
  auto big = std::max_element(p.begin(), p.end());
  *big += 1.0 - sum;
  return p;
}

inline WeightingFunction random_weighting(std::mt19937_64& rng) {
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0:
      return WeightingFunction::identity();
    case 1:
      return WeightingFunction::prelec(std::uniform_real_distribution<double>(0.4, 1.0)(rng));
    case 2:
      return WeightingFunction::power_complement(std::uniform_real_distribution<double>(1.2, 3.0)(rng));
    default:
      return WeightingFunction::table({{0.0, 0.0}, {0.3, 0.4}, {0.7, 0.6}, {1.0, 1.0}});
  }
}

inline ValuationFunction random_valuation(std::mt19937_64& rng) {
  if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) return ValuationFunction::identity();
  std::uniform_real_distribution<double> c(0.3, 1.5);
  return ValuationFunction::piecewise_power(c(rng), c(rng), c(rng));
}

inline GameSpec random_spec(std::mt19937_64& rng, const RandomGameOptions& opt) {
  GameSpec spec;
  spec.discount_beta = std::uniform_real_distribution<double>(opt.beta_lo, opt.beta_hi)(rng);
  std::uint64_t joint = 1;
  for (int i = 0; i < opt.players; ++i) {
    PlayerSpec p;
    p.state_count = std::uniform_int_distribution<int>(1, opt.max_states)(rng);
    p.action_count = std::uniform_int_distribution<int>(1, opt.max_actions)(rng);
    const int stages = std::uniform_int_distribution<int>(1, opt.max_kernel_stages)(rng);
    std::vector<std::vector<double>> probs(static_cast<std::size_t>(stages));
    for (auto& stage : probs) {
      for (int k = 0; k < p.state_count * p.action_count; ++k) {
        const auto row = random_distribution(rng, p.state_count, opt.sparsity);
        stage.insert(stage.end(), row.begin(), row.end());
      }
    }
    p.kernel = stages == 1 ? TransitionKernel::stationary(p.state_count, p.action_count, probs[0])
                           : TransitionKernel::nonstationary(p.state_count, p.action_count, probs);
    if (!opt.identity_pt) {
      p.weighting = random_weighting(rng);
      p.valuation = random_valuation(rng);
    }
    joint *= static_cast<std::uint64_t>(p.state_count * p.action_count);
    spec.players.push_back(std::move(p));
  }
  std::uniform_real_distribution<double> r(-2.0, 2.0);
  PayoffTable table(spec.players.size(), std::vector<double>(joint));
  for (auto& t : table) {
    for (auto& v : t) v = r(rng);
  }
  spec.payoff = std::move(table);
  return spec;
}

inline ValidatedGame random_game(std::mt19937_64& rng, const RandomGameOptions& opt) {
  return validate_game(random_spec(rng, opt));
}

inline MarkovStrategy random_strategy(std::mt19937_64& rng, const ValidatedGame& game, std::size_t player,
                                      int horizon, double sparsity = 0.3) {
  const auto& p = game.player(player);
  MarkovStrategy s{player, StageTable(horizon, p.state_count, p.action_count)};
  for (int t = 1; t <= horizon; ++t) {
    for (int st = 0; st < p.state_count; ++st) {
      const auto d = random_distribution(rng, p.action_count, sparsity);
      std::copy(d.begin(), d.end(), s.dist.row(t, st).begin());
    }
  }
  return s;
}

inline MarkovStrategyProfile random_profile(std::mt19937_64& rng, const ValidatedGame& game, int horizon) {
  MarkovStrategyProfile profile;
  for (std::size_t i = 0; i < game.player_count(); ++i) profile.push_back(random_strategy(rng, game, i, horizon));
  return profile;
}

inline std::vector<int> random_initial_state(std::mt19937_64& rng, const ValidatedGame& game) {
  std::vector<int> x;
  for (const auto& p : game.players()) x.push_back(std::uniform_int_distribution<int>(0, p.state_count - 1)(rng));
  return x;
}

// Single-stage kernel with probability one on next state `target(s, a)`.
template <class F>
TransitionKernel deterministic_kernel(int states, int actions, F target) {
  std::vector<double> probs(static_cast<std::size_t>(states) * actions * states, 0.0);
  for (int s = 0; s < states; ++s) {
    for (int a = 0; a < actions; ++a) {
      probs[(static_cast<std::size_t>(s) * actions + a) * states + target(s, a)] = 1.0;
    }
  }
  return TransitionKernel::stationary(states, actions, std::move(probs));
}

inline PlayerSpec trivial_player(int actions = 1) {
  PlayerSpec p;
  p.state_count = 1;
  p.action_count = actions;
  p.kernel = TransitionKernel::stationary(1, actions, std::vector<double>(static_cast<std::size_t>(actions), 1.0));
  return p;
}

}  // namespace ptgame::testing
