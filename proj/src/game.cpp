#include "ptgame/game.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace ptgame {

namespace {

std::string fmt_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string player_path(std::size_t i) { return "players[" + std::to_string(i) + "]"; }

}  // namespace

TransitionKernel::TransitionKernel(Mode mode, int states, int actions,
                                   std::vector<std::vector<double>> stages)
    : mode_(mode), states_(states), actions_(actions), stages_(std::move(stages)) {
  if (states <= 0 || actions <= 0) throw std::invalid_argument("kernel needs positive state and action counts");
  if (stages_.empty()) throw std::invalid_argument("kernel needs at least one stage");
  if (mode == Mode::stationary && stages_.size() != 1) {
    throw std::invalid_argument("stationary kernel must declare exactly one stage");
  }
  const auto expected = static_cast<std::size_t>(states) * actions * states;
  for (std::size_t t = 0; t < stages_.size(); ++t) {
    if (stages_[t].size() != expected) {
      throw std::invalid_argument("kernel stage " + std::to_string(t + 1) + " has " +
                                  std::to_string(stages_[t].size()) + " entries, expected " +
                                  std::to_string(expected));
    }
  }
}

TransitionKernel TransitionKernel::stationary(int states, int actions, std::vector<double> probs) {
  std::vector<std::vector<double>> stages;
  stages.push_back(std::move(probs));
  return TransitionKernel(Mode::stationary, states, actions, std::move(stages));
}

TransitionKernel TransitionKernel::nonstationary(int states, int actions,
                                                 std::vector<std::vector<double>> stages) {
  return TransitionKernel(Mode::nonstationary, states, actions, std::move(stages));
}

const std::vector<double>& TransitionKernel::stage(int t) const {
  if (t < 1) throw std::out_of_range("kernel stages are 1-based");
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(t), stages_.size()) - 1;
  return stages_[k];
}

std::span<const double> TransitionKernel::row(int t, int s, int a) const {
  const auto& st = stage(t);
  const auto offset = (static_cast<std::size_t>(s) * actions_ + a) * states_;
  return {st.data() + offset, static_cast<std::size_t>(states_)};
}

JointIndexer::JointIndexer(std::vector<int> state_counts, std::vector<int> action_counts)
    : states_(std::move(state_counts)), actions_(std::move(action_counts)) {
  if (states_.size() != actions_.size()) throw std::invalid_argument("state/action count lists differ in length");
  strides_.assign(states_.size(), 1);
  size_ = 1;
  for (std::size_t k = states_.size(); k-- > 0;) {
    strides_[k] = size_;
    const auto cells = static_cast<std::uint64_t>(states_[k]) * static_cast<std::uint64_t>(actions_[k]);
    if (cells == 0) throw std::invalid_argument("empty state or action space");
    if (size_ > kMaxJointCells / cells) {
      throw std::invalid_argument("joint state-action space exceeds " + std::to_string(kMaxJointCells) +
                                  " cells");
    }
    size_ *= cells;
  }
}

std::uint64_t JointIndexer::index(std::span<const int> states, std::span<const int> actions) const {
  std::uint64_t joint = 0;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    joint += strides_[i] * static_cast<std::uint64_t>(states[i] * actions_[i] + actions[i]);
  }
  return joint;
}

void JointIndexer::decode(std::uint64_t joint, std::span<int> states, std::span<int> actions) const {
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const int cell = cell_of(joint, i);
    states[i] = cell / actions_[i];
    actions[i] = cell % actions_[i];
  }
}

GameValidationError::GameValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error([&] {
        std::string msg = "invalid game:";
        for (const auto& issue : issues) msg += "\n  " + issue.path + ": " + issue.message;
        return msg;
      }()),
      issues_(std::move(issues)) {}

std::vector<ValidationIssue> check_game(const GameSpec& spec) {
  std::vector<ValidationIssue> issues;
  if (!(spec.discount_beta > 0.0 && spec.discount_beta < 1.0)) {
    issues.push_back({"beta", "discount factor must lie in (0,1)"});
  }
  if (spec.players.empty()) {
    issues.push_back({"players", "game needs at least one player"});
    return issues;
  }

  bool shapes_ok = true;
  for (std::size_t i = 0; i < spec.players.size(); ++i) {
    const auto& p = spec.players[i];
    const auto path = player_path(i);
    if (p.state_count < 1) {
      issues.push_back({path + ".state_count", "state space must be nonempty"});
      shapes_ok = false;
    }
    if (p.action_count < 1) {
      issues.push_back({path + ".action_count", "action space must be nonempty"});
      shapes_ok = false;
    }
    if (!shapes_ok) continue;
    if (p.kernel.state_count() != p.state_count || p.kernel.action_count() != p.action_count) {
      issues.push_back({path + ".kernel", "kernel dimensions " + std::to_string(p.kernel.state_count()) + "x" +
                                              std::to_string(p.kernel.action_count()) +
                                              " do not match the player's " + std::to_string(p.state_count) +
                                              "x" + std::to_string(p.action_count)});
      shapes_ok = false;
      continue;
    }
    for (int t = 1; t <= p.kernel.declared_stages(); ++t) {
      for (int s = 0; s < p.state_count; ++s) {
        for (int a = 0; a < p.action_count; ++a) {
          const auto row = p.kernel.row(t, s, a);
          const auto where = "(player " + std::to_string(i) + ", t=" + std::to_string(t) + ", s=" +
                             std::to_string(s) + ", a=" + std::to_string(a);
          double sum = 0.0;
          for (std::size_t y = 0; y < row.size(); ++y) {
            if (!(row[y] >= 0.0) || !std::isfinite(row[y])) {
              issues.push_back({path + ".kernel", "negative probability " + fmt_real(row[y]) + " at " + where +
                                                      ", y=" + std::to_string(y) + ")"});
            }
            sum += row[y];
          }
          if (!(std::abs(sum - 1.0) <= kKernelRowTolerance)) {
            issues.push_back({path + ".kernel", "row sum " + fmt_real(sum) + " ≠ 1 at " + where + ")"});
          }
        }
      }
    }
  }
  if (!shapes_ok) return issues;

  std::vector<int> sc, ac;
  for (const auto& p : spec.players) {
    sc.push_back(p.state_count);
    ac.push_back(p.action_count);
  }
  JointIndexer indexer;
  try {
    indexer = JointIndexer(sc, ac);
  } catch (const std::invalid_argument& e) {
    issues.push_back({"players", e.what()});
    return issues;
  }

  if (const auto* table = std::get_if<PayoffTable>(&spec.payoff)) {
    if (table->size() != spec.players.size()) {
      issues.push_back({"payoff", "expected " + std::to_string(spec.players.size()) + " payoff tables, got " +
                                      std::to_string(table->size())});
    }
    for (std::size_t i = 0; i < std::min(table->size(), spec.players.size()); ++i) {
      const auto& t = (*table)[i];
      const auto path = "payoff[" + std::to_string(i) + "]";
      if (t.size() != indexer.size()) {
        issues.push_back({path, "missing payoff entries: table has " + std::to_string(t.size()) +
                                    " entries, expected " + std::to_string(indexer.size())});
        continue;
      }
      for (std::uint64_t j = 0; j < t.size(); ++j) {
        if (!std::isfinite(t[j])) {
          issues.push_back({path, "payoff not finite at joint index " + std::to_string(j)});
        }
      }
    }
  } else if (!std::get<PayoffRule>(spec.payoff)) {
    issues.push_back({"payoff", "missing payoff rule"});
  }
  return issues;
}

ValidatedGame validate_game(const GameSpec& spec) {
  auto issues = check_game(spec);
  if (!issues.empty()) throw GameValidationError(std::move(issues));

  ValidatedGame game;
  game.players_ = spec.players;
  game.beta_ = spec.discount_beta;
  std::vector<int> sc, ac;
  for (const auto& p : spec.players) {
    sc.push_back(p.state_count);
    ac.push_back(p.action_count);
    game.joint_states_ *= p.state_count;
    game.joint_actions_ *= p.action_count;
  }
  game.indexer_ = JointIndexer(sc, ac);
  const auto n = spec.players.size();
  const auto cells = game.indexer_.size();

  if (const auto* table = std::get_if<PayoffTable>(&spec.payoff)) {
    game.payoff_ = *table;
  } else {
    const auto& rule = std::get<PayoffRule>(spec.payoff);
    game.payoff_.assign(n, std::vector<double>(cells));
    std::vector<int> s(n), a(n);
    std::vector<ValidationIssue> rule_issues;
    for (std::uint64_t j = 0; j < cells; ++j) {
      game.indexer_.decode(j, s, a);
      for (std::size_t i = 0; i < n; ++i) {
        const double r = rule(i, s, a);
        if (!std::isfinite(r)) {
          rule_issues.push_back({"payoff[" + std::to_string(i) + "]",
                                 "payoff not finite at joint index " + std::to_string(j)});
        }
        game.payoff_[i][j] = r;
      }
    }
    if (!rule_issues.empty()) throw GameValidationError(std::move(rule_issues));
  }

  game.valued_.assign(n, std::vector<double>(cells));
  game.bounds_.assign(n, 0.0);
  std::vector<ValidationIssue> value_issues;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = spec.players[i].valuation;
    for (std::uint64_t j = 0; j < cells; ++j) {
      const double val = v(game.payoff_[i][j]);
      if (!std::isfinite(val)) {
        value_issues.push_back({"payoff[" + std::to_string(i) + "]",
                                "valuation not finite at joint index " + std::to_string(j)});
      }
      game.valued_[i][j] = val;
      game.bounds_[i] = std::max(game.bounds_[i], std::abs(val));
    }
  }
  if (!value_issues.empty()) throw GameValidationError(std::move(value_issues));
  return game;
}

}  // namespace ptgame
