#include "ptgame/pt_criterion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ptgame {

namespace detail {

void require_marginals(const ValidatedGame& game, std::span<const MarginalTable> marginals, int horizon,
                       std::size_t skip_player) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (marginals.size() != game.player_count()) {
    throw std::invalid_argument("expected " + std::to_string(game.player_count()) + " marginal tables, got " +
                                std::to_string(marginals.size()));
  }
  for (std::size_t k = 0; k < marginals.size(); ++k) {
    if (k == skip_player) continue;
    const auto& m = marginals[k];
    const auto& p = game.player(k);
    if (m.player != k) throw std::invalid_argument("marginal table " + std::to_string(k) + " is for another player");
    if (m.rho.state_count() != p.state_count || m.rho.action_count() != p.action_count) {
      throw std::invalid_argument("marginal table of player " + std::to_string(k) + " has wrong dimensions");
    }
    if (m.horizon() < horizon) {
      throw std::invalid_argument("marginal table of player " + std::to_string(k) + " covers " +
                                  std::to_string(m.horizon()) + " stages, need " + std::to_string(horizon));
    }
  }
}

void distorted_stage_values(const ValidatedGame& game, std::size_t player, std::span<const MarginalTable> marginals,
                            int t, std::span<double> out) {
  const auto& idx = game.indexer();
  const std::size_t n = game.player_count();
  const auto& w = game.player(player).weighting;
  const auto& valued = game.valued_table(player);
  std::fill(out.begin(), out.end(), 0.0);

  std::vector<std::span<const double>> stage(n);
  std::vector<int> cells(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k != player) stage[k] = marginals[k].rho.stage(t);
    cells[k] = idx.cell_count(k);
  }

  // odometer over joint cells, last player fastest
  std::vector<int> digit(n, 0);
  const std::uint64_t total = idx.size();
  for (std::uint64_t j = 0; j < total; ++j) {
    double prod = 1.0;
    for (std::size_t k = 0; k < n && prod != 0.0; ++k) {
      if (k != player) prod *= stage[k][static_cast<std::size_t>(digit[k])];
    }
    if (prod != 0.0) out[static_cast<std::size_t>(digit[player])] += w.eval_clamped(prod) * valued[j];
    for (std::size_t k = n; k-- > 0;) {
      if (++digit[k] < cells[k]) break;
      digit[k] = 0;
    }
  }
}

}  // namespace detail

PTPayoffReport pt_payoff(const ValidatedGame& game, std::span<const MarginalTable> marginals, int horizon) {
  detail::require_marginals(game, marginals, horizon, game.player_count());
  PTPayoffReport report;
  report.horizon = horizon;
  report.players.resize(game.player_count());
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    const auto cells = static_cast<std::size_t>(game.indexer().cell_count(i));
    std::vector<double> values(cells);
    auto& out = report.players[i];
    out.stage_contributions.resize(static_cast<std::size_t>(horizon));
    double discount = 1.0;
    for (int t = 1; t <= horizon; ++t) {
      detail::distorted_stage_values(game, i, marginals, t, values);
      const auto own = marginals[i].rho.stage(t);
      double stage_sum = 0.0;
      for (std::size_t c = 0; c < cells; ++c) stage_sum += own[c] * values[c];
      out.stage_contributions[static_cast<std::size_t>(t - 1)] = discount * stage_sum;
      discount *= game.beta();
    }
    out.value = 0.0;
    for (double c : out.stage_contributions) out.value += c;
  }
  return report;
}

TruncationParams truncation_horizon(double epsilon, const ValidatedGame& game) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  TruncationParams params;
  params.epsilon = epsilon;
  const double beta = game.beta();
  const double SA = game.joint_state_count() * game.joint_action_count();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    const double K = game.payoff_bound(i);
    params.K.push_back(K);
    if (K <= 0.0) continue;
    worst = std::max(worst, std::log((1.0 - beta) * epsilon / (3.0 * K * SA)) / std::log(beta));
  }
  params.m_tilde = 1;
  if (std::isfinite(worst)) params.m_tilde = std::max(1, static_cast<int>(std::ceil(worst)));
  return params;
}

std::vector<double> truncation_error_bound(const ValidatedGame& game, int m) {
  if (m < 1) throw std::invalid_argument("truncation horizon must be at least 1");
  const double beta = game.beta();
  const double SA = game.joint_state_count() * game.joint_action_count();
  std::vector<double> out;
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    out.push_back(game.payoff_bound(i) * SA * std::pow(beta, m) / (1.0 - beta));
  }
  return out;
}

LipschitzDelta lipschitz_delta(double epsilon, const ValidatedGame& game, double lipschitz_c) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(lipschitz_c >= 1.0)) throw std::invalid_argument("Lipschitz constant must be at least 1");
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    const auto c = game.player(i).weighting.lipschitz_constant();
    if (!c) {
      throw std::invalid_argument("weighting of player " + std::to_string(i) +
                                  " is not Lipschitz on [0,1]; use sampled search instead");
    }
    if (*c > lipschitz_c * (1.0 + 1e-12)) {
      throw std::invalid_argument("weighting of player " + std::to_string(i) + " has Lipschitz constant " +
                                  std::to_string(*c) + " > C");
    }
  }
  const double beta = game.beta();
  const double SA = game.joint_state_count() * game.joint_action_count();
  double worst = -std::numeric_limits<double>::infinity();
  double K = 0.0;
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    const double Ki = game.payoff_bound(i);
    K = std::max(K, Ki);
    if (Ki <= 0.0) continue;
    worst = std::max(worst, std::log((1.0 - beta) * epsilon / (6.0 * Ki * SA)) / std::log(beta));
  }
  LipschitzDelta out;
  if (K <= 0.0) return out;  // all valued payoffs vanish: every profile has value 0
  out.m_hat = std::isfinite(worst) ? std::max(1, static_cast<int>(std::ceil(worst))) : 1;
  double growth = 0.0;
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    const auto& p = game.player(i);
    growth += std::pow(static_cast<double>(p.state_count) * p.action_count, out.m_hat);
  }
  out.delta = (1.0 - beta) * epsilon / (6.0 * lipschitz_c * K * SA * out.m_hat * growth);
  return out;
}

}  // namespace ptgame
