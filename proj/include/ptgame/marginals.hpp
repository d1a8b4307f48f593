#pragma once

#include <span>
#include <vector>

#include "ptgame/game.hpp"

namespace ptgame {

// Dense [stage][state][action] array with 1-based stages.
class StageTable {
 public:
  StageTable() = default;
  StageTable(int horizon, int states, int actions, double fill = 0.0)
      : horizon_(horizon), states_(states), actions_(actions),
        data_(static_cast<std::size_t>(horizon) * states * actions, fill) {}

  int horizon() const { return horizon_; }
  int state_count() const { return states_; }
  int action_count() const { return actions_; }

  double& operator()(int t, int s, int a) { return data_[offset(t, s, a)]; }
  double operator()(int t, int s, int a) const { return data_[offset(t, s, a)]; }

  std::span<double> row(int t, int s) { return {data_.data() + offset(t, s, 0), static_cast<std::size_t>(actions_)}; }
  std::span<const double> row(int t, int s) const {
    return {data_.data() + offset(t, s, 0), static_cast<std::size_t>(actions_)};
  }
  std::span<const double> stage(int t) const {
    return {data_.data() + offset(t, 0, 0), static_cast<std::size_t>(states_) * actions_};
  }

  const std::vector<double>& data() const { return data_; }
  bool operator==(const StageTable&) const = default;

 private:
  std::size_t offset(int t, int s, int a) const {
    return (static_cast<std::size_t>(t - 1) * states_ + s) * actions_ + a;
  }

  int horizon_ = 0;
  int states_ = 0;
  int actions_ = 0;
  std::vector<double> data_;
};

// Stage-indexed, own-state-dependent randomized action rule pi_t(a | s).
struct MarkovStrategy {
  std::size_t player = 0;
  StageTable dist;

  int horizon() const { return dist.horizon(); }
  double operator()(int t, int s, int a) const { return dist(t, s, a); }

  static MarkovStrategy uniform(std::size_t player, int horizon, int states, int actions);
};

using MarkovStrategyProfile = std::vector<MarkovStrategy>;

struct DeterministicMarkovPolicy {
  std::size_t player = 0;
  int horizon = 0;
  int state_count = 0;
  std::vector<int> choice;  // [t-1][s]

  int operator()(int t, int s) const { return choice[static_cast<std::size_t>(t - 1) * state_count + s]; }
  int& at(int t, int s) { return choice[static_cast<std::size_t>(t - 1) * state_count + s]; }
  bool operator==(const DeterministicMarkovPolicy&) const = default;
};

// rho_t(s, a) = P(X_t = s, A_t = a) for one player's own chain.
struct MarginalTable {
  std::size_t player = 0;
  StageTable rho;

  int horizon() const { return rho.horizon(); }
  double operator()(int t, int s, int a) const { return rho(t, s, a); }
};

// Checks that each distribution is nonnegative and sums to 1 within 1e-12.
void check_strategy(const ValidatedGame& game, const MarkovStrategy& strategy);

MarginalTable forward_marginals(const ValidatedGame& game, const MarkovStrategy& strategy, int initial_state,
                                int horizon);

std::vector<MarginalTable> profile_marginals(const ValidatedGame& game, const MarkovStrategyProfile& profile,
                                             std::span<const int> initial_state, int horizon);

inline constexpr double kFlowTolerance = 1e-9;

struct FlowViolation {
  enum class Kind { flow, negative };
  Kind kind = Kind::flow;
  int t = 1;
  int s = 0;
  int a = -1;  // only for negative entries
  double residual = 0.0;  // sum_a rho_t(s,a) - required mass, or the negative entry
};

// Membership test for the set of marginal tables reachable from initial_state:
// sum_a rho_1(s,a) = 1{s = x} and
// sum_a rho_{t+1}(s,a) = sum_{s',a'} rho_t(s',a') q_t(s | s',a').
std::vector<FlowViolation> check_flow_constraints(const ValidatedGame& game, const MarginalTable& rho,
                                                  int initial_state, double tolerance = kFlowTolerance);

// pi_t(a|s) = rho_t(s,a) / sum_a rho_t(s,a), uniform where the row mass is 0.
MarkovStrategy strategy_from_marginals(const MarginalTable& rho);

MarkovStrategy dm_policy_to_strategy(const DeterministicMarkovPolicy& policy, int action_count);

}  // namespace ptgame
