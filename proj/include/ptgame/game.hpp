#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ptgame/pt_functions.hpp"

namespace ptgame {

// Per-player transition law q_t(y | s, a). Stages are 1-based; a kernel with
// H declared stages repeats stage H for every t > H. A stationary kernel has
// exactly one stage.
class TransitionKernel {
 public:
  enum class Mode { stationary, nonstationary };

  TransitionKernel() = default;
  // Each stage is a flat row-major [s][a][y] array of size states*actions*states.
  TransitionKernel(Mode mode, int states, int actions, std::vector<std::vector<double>> stages);

  static TransitionKernel stationary(int states, int actions, std::vector<double> probs);
  static TransitionKernel nonstationary(int states, int actions,
                                        std::vector<std::vector<double>> stages);

  Mode mode() const { return mode_; }
  int state_count() const { return states_; }
  int action_count() const { return actions_; }
  int declared_stages() const { return static_cast<int>(stages_.size()); }

  std::span<const double> row(int t, int s, int a) const;
  double operator()(int t, int s, int a, int y) const { return row(t, s, a)[static_cast<std::size_t>(y)]; }

  const std::vector<double>& stage(int t) const;

 private:
  Mode mode_ = Mode::stationary;
  int states_ = 0;
  int actions_ = 0;
  std::vector<std::vector<double>> stages_;
};

struct PlayerSpec {
  int state_count = 1;
  int action_count = 1;
  TransitionKernel kernel;
  WeightingFunction weighting;
  ValuationFunction valuation;
};

// r_i(s, a) for the full joint state and action vectors.
using PayoffRule =
    std::function<double(std::size_t player, std::span<const int> states, std::span<const int> actions)>;

// One flat table per player, indexed by the joint cell index (see JointIndexer).
using PayoffTable = std::vector<std::vector<double>>;

struct GameSpec {
  std::vector<PlayerSpec> players;
  double discount_beta = 0.5;
  std::variant<PayoffTable, PayoffRule> payoff;
};

// Mixed-radix layout of the joint product space. Player i's "cell" is
// c_i = s_i * |A_i| + a_i; the joint index is the mixed-radix number
// (c_0, c_1, ..., c_{n-1}) with player 0 most significant, so increasing
// joint index walks (player, state, action) lexicographically.
class JointIndexer {
 public:
  JointIndexer() = default;
  JointIndexer(std::vector<int> state_counts, std::vector<int> action_counts);

  std::size_t player_count() const { return states_.size(); }
  int state_count(std::size_t i) const { return states_[i]; }
  int action_count(std::size_t i) const { return actions_[i]; }
  int cell_count(std::size_t i) const { return states_[i] * actions_[i]; }
  std::uint64_t stride(std::size_t i) const { return strides_[i]; }
  std::uint64_t size() const { return size_; }

  std::uint64_t index(std::span<const int> states, std::span<const int> actions) const;
  int cell_of(std::uint64_t joint, std::size_t i) const {
    return static_cast<int>((joint / strides_[i]) % static_cast<std::uint64_t>(cell_count(i)));
  }
  void decode(std::uint64_t joint, std::span<int> states, std::span<int> actions) const;

 private:
  std::vector<int> states_;
  std::vector<int> actions_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t size_ = 0;
};

struct ValidationIssue {
  std::string path;  // e.g. "beta", "players[0].kernel", "payoff[1]"
  std::string message;
};

class GameValidationError : public std::runtime_error {
 public:
  explicit GameValidationError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

// Largest joint space that will be materialized densely.
inline constexpr std::uint64_t kMaxJointCells = std::uint64_t{1} << 24;

// Immutable, validated game. Payoffs are materialized as dense tables and the
// PT-valued payoffs v_i(r_i(s,a)) together with K_i = max |v_i(r_i)| are cached.
class ValidatedGame {
 public:
  std::size_t player_count() const { return players_.size(); }
  const PlayerSpec& player(std::size_t i) const { return players_[i]; }
  const std::vector<PlayerSpec>& players() const { return players_; }
  double beta() const { return beta_; }
  const JointIndexer& indexer() const { return indexer_; }

  double payoff(std::size_t i, std::uint64_t joint) const { return payoff_[i][joint]; }
  double valued_payoff(std::size_t i, std::uint64_t joint) const { return valued_[i][joint]; }
  const std::vector<double>& payoff_table(std::size_t i) const { return payoff_[i]; }
  const std::vector<double>& valued_table(std::size_t i) const { return valued_[i]; }

  // K_i = max over the product space of |v_i(r_i(s,a))|.
  double payoff_bound(std::size_t i) const { return bounds_[i]; }
  // |S| = prod |S_i| and |A| = prod |A_i|, as reals.
  double joint_state_count() const { return joint_states_; }
  double joint_action_count() const { return joint_actions_; }

 private:
  friend ValidatedGame validate_game(const GameSpec& spec);
  ValidatedGame() = default;

  std::vector<PlayerSpec> players_;
  double beta_ = 0.5;
  JointIndexer indexer_;
  std::vector<std::vector<double>> payoff_;
  std::vector<std::vector<double>> valued_;
  std::vector<double> bounds_;
  double joint_states_ = 1.0;
  double joint_actions_ = 1.0;
};

// Every violated invariant of the game description; empty when the game is well formed.
std::vector<ValidationIssue> check_game(const GameSpec& spec);

// Throws GameValidationError listing every violated invariant.
ValidatedGame validate_game(const GameSpec& spec);

inline constexpr double kKernelRowTolerance = 1e-12;

}  // namespace ptgame
