#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ptgame/best_response.hpp"
#include "ptgame/game.hpp"
#include "ptgame/marginals.hpp"

namespace ptgame {

struct PlayerCertificate {
  double value = 0.0;                // V_i^m of the profile
  double best_response_value = 0.0;  // max over deviations, by backward induction
  double gap = 0.0;                  // best_response_value - value
  DeterministicMarkovPolicy best_response;
};

struct EquilibriumCertificate {
  MarkovStrategyProfile profile;
  std::vector<PlayerCertificate> players;
  std::vector<int> initial_state;
  double epsilon = 0.0;
  int m_tilde = 1;
  bool passed = false;
  std::uint64_t candidates_examined = 0;
  double final_delta = 0.0;

  double threshold() const { return epsilon / 3.0; }
  double max_gap() const;
};

// Acceptance slack on gap <= eps/3.
inline constexpr double kGapSlack = 1e-12;

// Evaluates every player's truncated PT value and best-response value against
// the rest of the profile; passes iff every gap <= eps/3.
EquilibriumCertificate certify(const ValidatedGame& game, const MarkovStrategyProfile& profile,
                               std::span<const int> initial_state, int m_tilde, double epsilon);

// Points of the simplex grid {k/divisions} summing to 1 in `parts` coordinates,
// in lexicographic order of the integer compositions.
std::vector<std::vector<double>> simplex_grid(int parts, int divisions);

// Number of compositions C(divisions + parts - 1, parts - 1), saturating.
std::uint64_t simplex_grid_size(int parts, int divisions);

// Grid of Markov profiles: one simplex-grid distribution per
// (player, stage <= m_tilde, own state) slot. Slots are ordered
// lexicographically by (player, stage, state); a profile is a digit vector of
// per-slot grid indices and profile number k is that vector read as a
// mixed-radix number with the first slot most significant.
class ProfileGrid {
 public:
  ProfileGrid(const ValidatedGame& game, double delta, int m_tilde);

  double requested_delta() const { return requested_delta_; }
  double delta() const { return 1.0 / divisions_; }
  int divisions() const { return divisions_; }
  bool adjusted() const { return adjusted_; }
  int m_tilde() const { return m_tilde_; }

  std::size_t slot_count() const { return slot_player_.size(); }
  std::uint32_t choices(std::size_t slot) const {
    return static_cast<std::uint32_t>(points_[slot_player_[slot]].size());
  }
  // Total number of profiles, or nullopt if it exceeds 2^64 - 1.
  std::optional<std::uint64_t> size() const { return size_; }

  std::vector<std::uint32_t> digits_at(std::uint64_t index) const;
  MarkovStrategyProfile profile(std::span<const std::uint32_t> digits) const;
  MarkovStrategyProfile profile_at(std::uint64_t index) const { return profile(digits_at(index)); }

  // Grid with half the step (twice the divisions).
  ProfileGrid refined() const;

 private:
  ProfileGrid(const ValidatedGame& game, double requested, int divisions, int m_tilde);

  const ValidatedGame* game_;
  double requested_delta_;
  int divisions_;
  bool adjusted_;
  int m_tilde_;
  std::vector<std::vector<std::vector<double>>> points_;  // per player
  std::vector<std::size_t> slot_player_;
  std::optional<std::uint64_t> size_;
};

// Step 1/k with k the smallest integer >= 1/delta; delta in (0, 1].
int grid_divisions(double delta);

class GridTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Builds the delta-grid and rejects it when it holds more than `cap` profiles.
ProfileGrid grid_profiles(double delta, const ValidatedGame& game, int m_tilde, std::uint64_t cap);

struct SearchConfig {
  enum class Mode { grid, sampled };

  double epsilon = 0.01;
  double initial_delta = 0.5;  // (0, 1]; adjusted down to 1/k
  Mode mode = Mode::grid;
  std::uint64_t max_candidates = 100'000;  // per delta level, sampled mode
  int max_refinements = 6;                 // delta halvings before giving up
  std::uint64_t grid_cap = 50'000'000;     // grid mode: profiles per level
  std::uint64_t rng_seed = 0;
  int m_tilde = 0;          // 0: take truncation_horizon(epsilon)
  bool parallel = true;     // OpenMP batch certification
  std::size_t batch_size = 0;  // 0: 32 candidates per thread
};

class SearchFailure : public std::runtime_error {
 public:
  SearchFailure(const std::string& what, std::optional<EquilibriumCertificate> best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const std::optional<EquilibriumCertificate>& best() const { return best_; }

 private:
  std::optional<EquilibriumCertificate> best_;
};

// Search over the delta-grid in enumeration order; returns the first
// certified profile, halving delta after each exhausted level.
EquilibriumCertificate search_grid(const ValidatedGame& game, std::span<const int> initial_state,
                                   const SearchConfig& config);

// Uniform draws from the current delta-grid without replacement; halves delta
// when the level is exhausted or max_candidates draws were made.
EquilibriumCertificate search_sampled(const ValidatedGame& game, std::span<const int> initial_state,
                                      const SearchConfig& config);

// Dispatches on config.mode.
EquilibriumCertificate search(const ValidatedGame& game, std::span<const int> initial_state,
                              const SearchConfig& config);

// Visited-set audit hook for tests: every digit vector certified by
// search_sampled, per delta level, in draw order.
struct SampledTrace {
  std::vector<std::vector<std::vector<std::uint32_t>>> levels;
};

EquilibriumCertificate search_sampled(const ValidatedGame& game, std::span<const int> initial_state,
                                      const SearchConfig& config, SampledTrace* trace);

}  // namespace ptgame
