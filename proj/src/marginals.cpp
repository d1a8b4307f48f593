#include "ptgame/marginals.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ptgame {

namespace {

void require_player(const ValidatedGame& game, std::size_t player) {
  if (player >= game.player_count()) {
    throw std::invalid_argument("player index " + std::to_string(player) + " out of range");
  }
}

void require_dims(const ValidatedGame& game, std::size_t player, const StageTable& table, const char* what) {
  require_player(game, player);
  const auto& p = game.player(player);
  if (table.state_count() != p.state_count || table.action_count() != p.action_count) {
    throw std::invalid_argument(std::string(what) + " for player " + std::to_string(player) + " is " +
                                std::to_string(table.state_count()) + "x" + std::to_string(table.action_count()) +
                                ", expected " + std::to_string(p.state_count) + "x" +
                                std::to_string(p.action_count));
  }
}

}  // namespace

MarkovStrategy MarkovStrategy::uniform(std::size_t player, int horizon, int states, int actions) {
  return {player, StageTable(horizon, states, actions, 1.0 / actions)};
}

void check_strategy(const ValidatedGame& game, const MarkovStrategy& strategy) {
  require_dims(game, strategy.player, strategy.dist, "strategy");
  const auto& d = strategy.dist;
  for (int t = 1; t <= d.horizon(); ++t) {
    for (int s = 0; s < d.state_count(); ++s) {
      double sum = 0.0;
      for (double p : d.row(t, s)) {
        if (!(p >= 0.0)) {
          throw std::invalid_argument("strategy of player " + std::to_string(strategy.player) +
                                      " has a negative probability at t=" + std::to_string(t) +
                                      ", s=" + std::to_string(s));
        }
        sum += p;
      }
      if (!(std::abs(sum - 1.0) <= 1e-12)) {
        throw std::invalid_argument("strategy of player " + std::to_string(strategy.player) +
                                    " does not sum to 1 at t=" + std::to_string(t) + ", s=" + std::to_string(s));
      }
    }
  }
}

MarginalTable forward_marginals(const ValidatedGame& game, const MarkovStrategy& strategy, int initial_state,
                                int horizon) {
  require_dims(game, strategy.player, strategy.dist, "strategy");
  const auto& p = game.player(strategy.player);
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (strategy.horizon() < horizon) {
    throw std::invalid_argument("strategy covers " + std::to_string(strategy.horizon()) +
                                " stages but horizon " + std::to_string(horizon) + " was requested");
  }
  if (initial_state < 0 || initial_state >= p.state_count) {
    throw std::invalid_argument("initial state " + std::to_string(initial_state) + " invalid for player " +
                                std::to_string(strategy.player));
  }

  const int S = p.state_count;
  const int A = p.action_count;
  MarginalTable out{strategy.player, StageTable(horizon, S, A)};
  std::vector<double> mass(static_cast<std::size_t>(S), 0.0);
  mass[static_cast<std::size_t>(initial_state)] = 1.0;
  std::vector<double> next(static_cast<std::size_t>(S));

  for (int t = 1; t <= horizon; ++t) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) out.rho(t, s, a) = strategy(t, s, a) * mass[static_cast<std::size_t>(s)];
    }
    if (t == horizon) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double r = out.rho(t, s, a);
        if (r == 0.0) continue;
        const auto q = p.kernel.row(t, s, a);
        for (int y = 0; y < S; ++y) next[static_cast<std::size_t>(y)] += r * q[static_cast<std::size_t>(y)];
      }
    }
    mass.swap(next);
  }
  return out;
}

std::vector<MarginalTable> profile_marginals(const ValidatedGame& game, const MarkovStrategyProfile& profile,
                                             std::span<const int> initial_state, int horizon) {
  if (profile.size() != game.player_count() || initial_state.size() != game.player_count()) {
    throw std::invalid_argument("profile and initial state must cover every player");
  }
  std::vector<MarginalTable> out;
  out.reserve(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].player != i) throw std::invalid_argument("profile entry " + std::to_string(i) + " is for another player");
    out.push_back(forward_marginals(game, profile[i], initial_state[i], horizon));
  }
  return out;
}

std::vector<FlowViolation> check_flow_constraints(const ValidatedGame& game, const MarginalTable& rho,
                                                  int initial_state, double tolerance) {
  require_dims(game, rho.player, rho.rho, "marginal table");
  const auto& p = game.player(rho.player);
  if (initial_state < 0 || initial_state >= p.state_count) {
    throw std::invalid_argument("initial state " + std::to_string(initial_state) + " invalid");
  }
  const int S = p.state_count;
  const int A = p.action_count;
  std::vector<FlowViolation> out;

  std::vector<double> required(static_cast<std::size_t>(S), 0.0);
  required[static_cast<std::size_t>(initial_state)] = 1.0;
  for (int t = 1; t <= rho.horizon(); ++t) {
    for (int s = 0; s < S; ++s) {
      double row_mass = 0.0;
      for (int a = 0; a < A; ++a) {
        const double v = rho(t, s, a);
        if (v < 0.0) out.push_back({FlowViolation::Kind::negative, t, s, a, v});
        row_mass += v;
      }
      const double residual = row_mass - required[static_cast<std::size_t>(s)];
      if (!(std::abs(residual) <= tolerance)) out.push_back({FlowViolation::Kind::flow, t, s, -1, residual});
    }
    std::fill(required.begin(), required.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const auto q = p.kernel.row(t, s, a);
        for (int y = 0; y < S; ++y) required[static_cast<std::size_t>(y)] += rho(t, s, a) * q[static_cast<std::size_t>(y)];
      }
    }
  }
  return out;
}

MarkovStrategy strategy_from_marginals(const MarginalTable& rho) {
  const auto& r = rho.rho;
  MarkovStrategy out{rho.player, StageTable(r.horizon(), r.state_count(), r.action_count())};
  const double uniform = 1.0 / r.action_count();
  for (int t = 1; t <= r.horizon(); ++t) {
    for (int s = 0; s < r.state_count(); ++s) {
      double mass = 0.0;
      for (int a = 0; a < r.action_count(); ++a) {
        const double v = r(t, s, a);
        if (v < 0.0) {
          throw std::invalid_argument("negative marginal entry at t=" + std::to_string(t) + ", s=" +
                                      std::to_string(s) + ", a=" + std::to_string(a));
        }
        mass += v;
      }
      for (int a = 0; a < r.action_count(); ++a) {
        out.dist(t, s, a) = mass > 0.0 ? r(t, s, a) / mass : uniform;
      }
    }
  }
  return out;
}

MarkovStrategy dm_policy_to_strategy(const DeterministicMarkovPolicy& policy, int action_count) {
  MarkovStrategy out{policy.player, StageTable(policy.horizon, policy.state_count, action_count)};
  for (int t = 1; t <= policy.horizon; ++t) {
    for (int s = 0; s < policy.state_count; ++s) {
      const int a = policy(t, s);
      if (a < 0 || a >= action_count) {
        throw std::invalid_argument("policy action " + std::to_string(a) + " out of range at t=" +
                                    std::to_string(t) + ", s=" + std::to_string(s));
      }
      out.dist(t, s, a) = 1.0;
    }
  }
  return out;
}

}  // namespace ptgame
