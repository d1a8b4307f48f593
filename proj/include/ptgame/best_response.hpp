#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ptgame/game.hpp"
#include "ptgame/marginals.hpp"

namespace ptgame {

// Nonstationary reward of player i's induced finite-horizon MDP once the
// opponents' marginals are fixed:
//   r~_t(s,a) = beta^{t-1} sum_{opponent tuples} w_i(prod_{j != i} rho^j_t) v_i(r_i).
struct StageRewardTable {
  std::size_t player = 0;
  StageTable reward;

  int horizon() const { return reward.horizon(); }
  double operator()(int t, int s, int a) const { return reward(t, s, a); }
};

// marginals has one entry per player; the entry of `player` itself is ignored.
StageRewardTable induced_stage_rewards(const ValidatedGame& game, std::size_t player,
                                       std::span<const MarginalTable> marginals, int horizon);

// sum_t sum_{s,a} rho_t(s,a) r~_t(s,a): the PT payoff of a strategy with
// marginals rho against the opponents that produced `rewards`.
double expected_reward(const MarginalTable& rho, const StageRewardTable& rewards);

struct BestResponseResult {
  DeterministicMarkovPolicy policy;
  double value = 0.0;
  // value_by_stage_state[t-1][s] = optimal continuation value from (t, s)
  std::vector<std::vector<double>> value_by_stage_state;
};

// Exact solution of the induced MDP by backward induction; argmax ties go to
// the lowest action index.
BestResponseResult backward_induction(const ValidatedGame& game, std::size_t player,
                                      const StageRewardTable& rewards, int initial_state, int horizon);

inline constexpr std::uint64_t kDefaultPolicyCap = 1'000'000;

struct PolicyEnumerationResult {
  DeterministicMarkovPolicy policy;
  double value = 0.0;
  std::uint64_t policies_enumerated = 0;
};

// Number of deterministic Markov policies |A_i|^{m |S_i|}; saturates at UINT64_MAX.
std::uint64_t dm_policy_count(const ValidatedGame& game, std::size_t player, int horizon);

// Decodes policy number `index` (slots (t, s) lexicographic, first slot most
// significant, base |A_i|).
DeterministicMarkovPolicy dm_policy_at(const ValidatedGame& game, std::size_t player, int horizon,
                                       std::uint64_t index);

// Value of one deterministic policy by forward propagation of its state law.
double evaluate_dm_policy(const ValidatedGame& game, const DeterministicMarkovPolicy& policy,
                          const StageRewardTable& rewards, int initial_state);

// Exhaustive maximum over all deterministic Markov policies, OpenMP-parallel.
// Ties go to the lowest policy index. Throws std::length_error above `cap`.
PolicyEnumerationResult enumerate_dm_policies(const ValidatedGame& game, std::size_t player,
                                              const StageRewardTable& rewards, int initial_state, int horizon,
                                              std::uint64_t cap = kDefaultPolicyCap);

// Single-threaded reference for enumerate_dm_policies.
PolicyEnumerationResult enumerate_dm_policies_serial(const ValidatedGame& game, std::size_t player,
                                                     const StageRewardTable& rewards, int initial_state,
                                                     int horizon, std::uint64_t cap = kDefaultPolicyCap);

}  // namespace ptgame
