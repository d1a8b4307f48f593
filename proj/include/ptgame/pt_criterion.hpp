#pragma once

#include <span>
#include <vector>

#include "ptgame/game.hpp"
#include "ptgame/marginals.hpp"

namespace ptgame {

struct PlayerPayoff {
  double value = 0.0;
  // beta^{t-1} * (stage-t PT expectation), t = 1..horizon
  std::vector<double> stage_contributions;
};

struct PTPayoffReport {
  int horizon = 0;
  std::vector<PlayerPayoff> players;
};

// Truncated PT-distorted discounted payoff V_i^m of every player, evaluated
// through the marginal tables:
//   sum_t beta^{t-1} sum_{s_i,a_i} rho^i_t(s_i,a_i)
//         sum_{opponent tuples} w_i(prod_{j != i} rho^j_t(s_j,a_j)) v_i(r_i(s,a)).
// marginals[k] must belong to player k and cover stages 1..horizon.
PTPayoffReport pt_payoff(const ValidatedGame& game, std::span<const MarginalTable> marginals, int horizon);

struct TruncationParams {
  double epsilon = 0.0;
  int m_tilde = 1;
  std::vector<double> K;
};

// Smallest horizon (floored at 1) with K_i |S||A| beta^m / (1-beta) <= eps/3 for all i.
TruncationParams truncation_horizon(double epsilon, const ValidatedGame& game);

// K_i |S||A| beta^m / (1-beta) per player.
std::vector<double> truncation_error_bound(const ValidatedGame& game, int m);

struct LipschitzDelta {
  double delta = 1.0;
  int m_hat = 1;
};

// Grid step that keeps truncated PT values within eps/2 for profiles closer
// than delta in sup norm, when every weighting is C-Lipschitz:
//   m_hat = ceil(max_i ln((1-beta) eps / (6 K_i |S||A|)) / ln beta), floored at 1,
//   delta = (1-beta) eps / (6 C K |S||A| m_hat sum_i (|S_i||A_i|)^m_hat), K = max_i K_i.
// Throws std::invalid_argument when some weighting is not Lipschitz with constant <= C.
LipschitzDelta lipschitz_delta(double epsilon, const ValidatedGame& game, double lipschitz_c);

namespace detail {

// For player i at stage t: per own cell c = s*|A_i| + a, the undiscounted
// sum over opponent tuples of w_i(prod rho^j) * v_i(r_i). Opponent tuples are
// visited in increasing joint index, so results are bit-reproducible.
void distorted_stage_values(const ValidatedGame& game, std::size_t player, std::span<const MarginalTable> marginals,
                            int t, std::span<double> out);

void require_marginals(const ValidatedGame& game, std::span<const MarginalTable> marginals, int horizon,
                       std::size_t skip_player);

}  // namespace detail

}  // namespace ptgame
