#include "ptgame/best_response.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "ptgame/pt_criterion.hpp"

namespace ptgame {

namespace {

void require_rewards(const ValidatedGame& game, std::size_t player, const StageRewardTable& rewards, int initial_state,
                     int horizon) {
  if (player >= game.player_count()) throw std::invalid_argument("player index out of range");
  const auto& p = game.player(player);
  if (rewards.player != player || rewards.reward.state_count() != p.state_count ||
      rewards.reward.action_count() != p.action_count) {
    throw std::invalid_argument("reward table does not match player " + std::to_string(player));
  }
  if (horizon < 1 || rewards.horizon() < horizon) {
    throw std::invalid_argument("reward table covers " + std::to_string(rewards.horizon()) +
                                " stages, need " + std::to_string(horizon));
  }
  if (initial_state < 0 || initial_state >= p.state_count) throw std::invalid_argument("initial state out of range");
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::uint64_t index = std::numeric_limits<std::uint64_t>::max();

  void offer(double v, std::uint64_t k) {
    if (v > value || (v == value && k < index)) {
      value = v;
      index = k;
    }
  }
};

}  // namespace

StageRewardTable induced_stage_rewards(const ValidatedGame& game, std::size_t player,
                                       std::span<const MarginalTable> marginals, int horizon) {
  if (player >= game.player_count()) throw std::invalid_argument("player index out of range");
  detail::require_marginals(game, marginals, horizon, player);
  const auto& p = game.player(player);
  StageRewardTable out{player, StageTable(horizon, p.state_count, p.action_count)};
  std::vector<double> values(static_cast<std::size_t>(p.state_count) * p.action_count);
  double discount = 1.0;
  for (int t = 1; t <= horizon; ++t) {
    detail::distorted_stage_values(game, player, marginals, t, values);
    for (int s = 0; s < p.state_count; ++s) {
      for (int a = 0; a < p.action_count; ++a) {
        out.reward(t, s, a) = discount * values[static_cast<std::size_t>(s) * p.action_count + a];
      }
    }
    discount *= game.beta();
  }
  return out;
}

double expected_reward(const MarginalTable& rho, const StageRewardTable& rewards) {
  if (rho.rho.state_count() != rewards.reward.state_count() ||
      rho.rho.action_count() != rewards.reward.action_count() || rho.horizon() < rewards.horizon()) {
    throw std::invalid_argument("marginal table does not match reward table");
  }
  double total = 0.0;
  for (int t = 1; t <= rewards.horizon(); ++t) {
    const auto r = rewards.reward.stage(t);
    const auto m = rho.rho.stage(t);
    double stage_sum = 0.0;
    for (std::size_t c = 0; c < r.size(); ++c) stage_sum += m[c] * r[c];
    total += stage_sum;
  }
  return total;
}

BestResponseResult backward_induction(const ValidatedGame& game, std::size_t player,
                                      const StageRewardTable& rewards, int initial_state, int horizon) {
  require_rewards(game, player, rewards, initial_state, horizon);
  const auto& p = game.player(player);
  const int S = p.state_count;
  const int A = p.action_count;

  BestResponseResult out;
  out.policy = {player, horizon, S, std::vector<int>(static_cast<std::size_t>(horizon) * S, 0)};
  out.value_by_stage_state.assign(static_cast<std::size_t>(horizon), std::vector<double>(static_cast<std::size_t>(S)));
  std::vector<double> next(static_cast<std::size_t>(S), 0.0);

  for (int t = horizon; t >= 1; --t) {
    auto& u = out.value_by_stage_state[static_cast<std::size_t>(t - 1)];
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < A; ++a) {
        double q_value = rewards(t, s, a);
        if (t < horizon) {
          const auto q = p.kernel.row(t, s, a);
          for (int y = 0; y < S; ++y) q_value += q[static_cast<std::size_t>(y)] * next[static_cast<std::size_t>(y)];
        }
        if (q_value > best) {
          best = q_value;
          best_a = a;
        }
      }
      u[static_cast<std::size_t>(s)] = best;
      out.policy.at(t, s) = best_a;
    }
    next = u;
  }
  out.value = out.value_by_stage_state[0][static_cast<std::size_t>(initial_state)];
  return out;
}

std::uint64_t dm_policy_count(const ValidatedGame& game, std::size_t player, int horizon) {
  const auto& p = game.player(player);
  const auto base = static_cast<std::uint64_t>(p.action_count);
  const auto slots = static_cast<std::uint64_t>(horizon) * static_cast<std::uint64_t>(p.state_count);
  std::uint64_t count = 1;
  for (std::uint64_t k = 0; k < slots; ++k) {
    if (count > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    count *= base;
  }
  return count;
}

DeterministicMarkovPolicy dm_policy_at(const ValidatedGame& game, std::size_t player, int horizon,
                                       std::uint64_t index) {
  const auto& p = game.player(player);
  DeterministicMarkovPolicy policy{player, horizon, p.state_count,
                                   std::vector<int>(static_cast<std::size_t>(horizon) * p.state_count, 0)};
  const auto base = static_cast<std::uint64_t>(p.action_count);
  for (std::size_t k = policy.choice.size(); k-- > 0;) {
    policy.choice[k] = static_cast<int>(index % base);
    index /= base;
  }
  return policy;
}

double evaluate_dm_policy(const ValidatedGame& game, const DeterministicMarkovPolicy& policy,
                          const StageRewardTable& rewards, int initial_state) {
  const auto& p = game.player(policy.player);
  const int S = p.state_count;
  std::vector<double> mass(static_cast<std::size_t>(S), 0.0), next(static_cast<std::size_t>(S));
  mass[static_cast<std::size_t>(initial_state)] = 1.0;
  double value = 0.0;
  for (int t = 1; t <= policy.horizon; ++t) {
    for (int s = 0; s < S; ++s) value += mass[static_cast<std::size_t>(s)] * rewards(t, s, policy(t, s));
    if (t == policy.horizon) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      const double m = mass[static_cast<std::size_t>(s)];
      if (m == 0.0) continue;
      const auto q = p.kernel.row(t, s, policy(t, s));
      for (int y = 0; y < S; ++y) next[static_cast<std::size_t>(y)] += m * q[static_cast<std::size_t>(y)];
    }
    mass.swap(next);
  }
  return value;
}

namespace {

std::uint64_t checked_count(const ValidatedGame& game, std::size_t player, int horizon, std::uint64_t cap) {
  const auto count = dm_policy_count(game, player, horizon);
  if (count > cap) {
    throw std::length_error("player " + std::to_string(player) + " has more than " + std::to_string(cap) +
                            " deterministic Markov policies at horizon " + std::to_string(horizon));
  }
  return count;
}

PolicyEnumerationResult finish(const ValidatedGame& game, std::size_t player, int horizon, const Best& best,
                               std::uint64_t count) {
  return {dm_policy_at(game, player, horizon, best.index), best.value, count};
}

}  // namespace

PolicyEnumerationResult enumerate_dm_policies_serial(const ValidatedGame& game, std::size_t player,
                                                     const StageRewardTable& rewards, int initial_state,
                                                     int horizon, std::uint64_t cap) {
  require_rewards(game, player, rewards, initial_state, horizon);
  const auto count = checked_count(game, player, horizon, cap);
  Best best;
  for (std::uint64_t k = 0; k < count; ++k) {
    best.offer(evaluate_dm_policy(game, dm_policy_at(game, player, horizon, k), rewards, initial_state), k);
  }
  return finish(game, player, horizon, best, count);
}

PolicyEnumerationResult enumerate_dm_policies(const ValidatedGame& game, std::size_t player,
                                              const StageRewardTable& rewards, int initial_state, int horizon,
                                              std::uint64_t cap) {
  require_rewards(game, player, rewards, initial_state, horizon);
  const auto count = checked_count(game, player, horizon, cap);
  const auto n = static_cast<std::int64_t>(count);
  Best best;
#pragma omp parallel
  {
    Best local;
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
      const auto idx = static_cast<std::uint64_t>(k);
      local.offer(evaluate_dm_policy(game, dm_policy_at(game, player, horizon, idx), rewards, initial_state), idx);
    }
#pragma omp critical(ptgame_enumerate_best)
    best.offer(local.value, local.index);
  }
  return finish(game, player, horizon, best, count);
}

}  // namespace ptgame
