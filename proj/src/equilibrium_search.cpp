#include "ptgame/equilibrium_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ptgame/pt_criterion.hpp"

namespace ptgame {

double EquilibriumCertificate::max_gap() const {
  double g = -std::numeric_limits<double>::infinity();
  for (const auto& p : players) g = std::max(g, p.gap);
  return g;
}

EquilibriumCertificate certify(const ValidatedGame& game, const MarkovStrategyProfile& profile,
                               std::span<const int> initial_state, int m_tilde, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const auto marginals = profile_marginals(game, profile, initial_state, m_tilde);
  const auto report = pt_payoff(game, marginals, m_tilde);

  EquilibriumCertificate cert;
  cert.profile = profile;
  cert.initial_state.assign(initial_state.begin(), initial_state.end());
  cert.epsilon = epsilon;
  cert.m_tilde = m_tilde;
  cert.players.resize(game.player_count());
  cert.passed = true;
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    const auto rewards = induced_stage_rewards(game, i, marginals, m_tilde);
    auto br = backward_induction(game, i, rewards, initial_state[i], m_tilde);
    auto& pc = cert.players[i];
    pc.value = report.players[i].value;
    pc.best_response_value = br.value;
    pc.gap = br.value - pc.value;
    pc.best_response = std::move(br.policy);
    if (!(pc.gap <= epsilon / 3.0 + kGapSlack)) cert.passed = false;
  }
  return cert;
}

std::uint64_t simplex_grid_size(int parts, int divisions) {
  // C(divisions + parts - 1, parts - 1) computed incrementally; each partial
  // product is itself a binomial coefficient so the division is exact.
  const std::uint64_t n = static_cast<std::uint64_t>(divisions) + static_cast<std::uint64_t>(parts) - 1;
  const std::uint64_t k = static_cast<std::uint64_t>(parts) - 1;
  std::uint64_t c = 1;
  for (std::uint64_t j = 1; j <= k; ++j) {
    const std::uint64_t num = n - k + j;
    if (c > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
    c = c * num / j;
  }
  return c;
}

std::vector<std::vector<double>> simplex_grid(int parts, int divisions) {
  if (parts < 1 || divisions < 1) throw std::invalid_argument("simplex grid needs parts >= 1 and divisions >= 1");
  std::vector<std::vector<double>> out;
  std::vector<int> counts(static_cast<std::size_t>(parts), 0);
  // Recursive walk: earlier coordinates vary slowest, ascending.
  auto emit = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == parts - 1) {
      counts[static_cast<std::size_t>(pos)] = remaining;
      std::vector<double> point(static_cast<std::size_t>(parts));
      for (int k = 0; k < parts; ++k) {
        point[static_cast<std::size_t>(k)] = static_cast<double>(counts[static_cast<std::size_t>(k)]) / divisions;
      }
      out.push_back(std::move(point));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[static_cast<std::size_t>(pos)] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  emit(emit, 0, divisions);
  return out;
}

int grid_divisions(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("grid step must lie in (0,1]");
  const double inv = 1.0 / delta;
  const double nearest = std::round(inv);
  if (std::abs(inv - nearest) <= 1e-9 * nearest) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(inv));
}

ProfileGrid::ProfileGrid(const ValidatedGame& game, double delta, int m_tilde)
    : ProfileGrid(game, delta, grid_divisions(delta), m_tilde) {}

ProfileGrid::ProfileGrid(const ValidatedGame& game, double requested, int divisions, int m_tilde)
    : game_(&game),
      requested_delta_(requested),
      divisions_(divisions),
      adjusted_(std::abs(1.0 / divisions - requested) > 1e-12 * requested),
      m_tilde_(m_tilde) {
  if (m_tilde < 1) throw std::invalid_argument("m_tilde must be at least 1");
  points_.reserve(game.player_count());
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    points_.push_back(simplex_grid(game.player(i).action_count, divisions));
    for (int t = 1; t <= m_tilde; ++t) {
      for (int s = 0; s < game.player(i).state_count; ++s) slot_player_.push_back(i);
    }
  }
  std::uint64_t total = 1;
  bool overflow = false;
  for (std::size_t slot = 0; slot < slot_player_.size() && !overflow; ++slot) {
    const std::uint64_t c = choices(slot);
    if (total > std::numeric_limits<std::uint64_t>::max() / c) overflow = true;
    else total *= c;
  }
  if (!overflow) size_ = total;
}

std::vector<std::uint32_t> ProfileGrid::digits_at(std::uint64_t index) const {
  if (size_ && index >= *size_) throw std::out_of_range("profile index beyond grid size");
  std::vector<std::uint32_t> digits(slot_count());
  for (std::size_t slot = digits.size(); slot-- > 0;) {
    const std::uint64_t c = choices(slot);
    digits[slot] = static_cast<std::uint32_t>(index % c);
    index /= c;
  }
  return digits;
}

MarkovStrategyProfile ProfileGrid::profile(std::span<const std::uint32_t> digits) const {
  if (digits.size() != slot_count()) throw std::invalid_argument("digit vector has the wrong length");
  MarkovStrategyProfile profile;
  std::size_t slot = 0;
  for (std::size_t i = 0; i < game_->player_count(); ++i) {
    const auto& p = game_->player(i);
    MarkovStrategy strat{i, StageTable(m_tilde_, p.state_count, p.action_count)};
    for (int t = 1; t <= m_tilde_; ++t) {
      for (int s = 0; s < p.state_count; ++s, ++slot) {
        const auto& point = points_[i].at(digits[slot]);
        std::copy(point.begin(), point.end(), strat.dist.row(t, s).begin());
      }
    }
    profile.push_back(std::move(strat));
  }
  return profile;
}

ProfileGrid ProfileGrid::refined() const { return ProfileGrid(*game_, delta() / 2.0, divisions_ * 2, m_tilde_); }

ProfileGrid grid_profiles(double delta, const ValidatedGame& game, int m_tilde, std::uint64_t cap) {
  ProfileGrid grid(game, delta, m_tilde);
  if (!grid.size() || *grid.size() > cap) {
    throw GridTooLarge("grid at step " + std::to_string(grid.delta()) + " holds more than " + std::to_string(cap) +
                       " profiles; use sampled mode");
  }
  return grid;
}

namespace {

struct SearchContext {
  const ValidatedGame& game;
  std::span<const int> x;
  int m_tilde;
  double epsilon;
  bool parallel;
  std::size_t batch;

  std::optional<EquilibriumCertificate> best;

  void track(const EquilibriumCertificate& cert) {
    if (!best || cert.max_gap() < best->max_gap()) best = cert;
  }
};

SearchContext make_context(const ValidatedGame& game, std::span<const int> x, const SearchConfig& config) {
  if (!(config.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (x.size() != game.player_count()) throw std::invalid_argument("initial state must cover every player");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= game.player(i).state_count) {
      throw std::invalid_argument("initial state of player " + std::to_string(i) + " out of range");
    }
  }
  if (config.max_refinements < 0) throw std::invalid_argument("max_refinements must be nonnegative");
  const int m = config.m_tilde > 0 ? config.m_tilde : truncation_horizon(config.epsilon, game).m_tilde;
  std::size_t batch = config.batch_size;
  if (batch == 0) {
    int threads = 1;
#ifdef _OPENMP
    if (config.parallel) threads = omp_get_max_threads();
#endif
    batch = 32 * static_cast<std::size_t>(threads);
  }
  if (!config.parallel) batch = 1;
  return {game, x, m, config.epsilon, config.parallel, batch, std::nullopt};
}

std::vector<EquilibriumCertificate> certify_batch(SearchContext& ctx, const ProfileGrid& grid,
                                                  const std::vector<std::vector<std::uint32_t>>& batch) {
  std::vector<EquilibriumCertificate> out(batch.size());
  const auto n = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for schedule(dynamic) if (ctx.parallel && n > 1)
  for (std::int64_t k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    out[idx] = certify(ctx.game, grid.profile(batch[idx]), ctx.x, ctx.m_tilde, ctx.epsilon);
  }
  return out;
}

// Scans a batch in order; returns the position of the first passing certificate.
std::optional<std::size_t> first_passing(SearchContext& ctx, const std::vector<EquilibriumCertificate>& certs) {
  for (std::size_t k = 0; k < certs.size(); ++k) {
    ctx.track(certs[k]);
    if (certs[k].passed) return k;
  }
  return std::nullopt;
}

std::string gap_note(const SearchContext& ctx) {
  if (!ctx.best) return "";
  return "; best max gap " + std::to_string(ctx.best->max_gap()) + " vs threshold " + std::to_string(ctx.epsilon / 3.0);
}

struct DigitsHash {
  std::size_t operator()(const std::vector<std::uint32_t>& d) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto v : d) {
      h ^= v;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

EquilibriumCertificate search_grid(const ValidatedGame& game, std::span<const int> initial_state,
                                   const SearchConfig& config) {
  auto ctx = make_context(game, initial_state, config);
  ProfileGrid grid(game, config.initial_delta, ctx.m_tilde);
  std::uint64_t examined = 0;
  for (int level = 0; level <= config.max_refinements; ++level, grid = grid.refined()) {
    if (!grid.size() || *grid.size() > config.grid_cap) {
      throw SearchFailure("grid at step " + std::to_string(grid.delta()) + " holds more than " +
                              std::to_string(config.grid_cap) + " profiles; use sampled mode" + gap_note(ctx),
                          ctx.best);
    }
    const std::uint64_t total = *grid.size();
    for (std::uint64_t start = 0; start < total; start += ctx.batch) {
      const std::uint64_t end = std::min<std::uint64_t>(total, start + ctx.batch);
      std::vector<std::vector<std::uint32_t>> batch;
      for (std::uint64_t k = start; k < end; ++k) batch.push_back(grid.digits_at(k));
      const auto certs = certify_batch(ctx, grid, batch);
      if (const auto hit = first_passing(ctx, certs)) {
        auto cert = certs[*hit];
        cert.candidates_examined = examined + start + *hit + 1;
        cert.final_delta = grid.delta();
        return cert;
      }
    }
    examined += total;
  }
  throw SearchFailure("no certified profile after " + std::to_string(config.max_refinements) + " refinements" +
                          gap_note(ctx),
                      ctx.best);
}

EquilibriumCertificate search_sampled(const ValidatedGame& game, std::span<const int> initial_state,
                                      const SearchConfig& config) {
  return search_sampled(game, initial_state, config, nullptr);
}

EquilibriumCertificate search_sampled(const ValidatedGame& game, std::span<const int> initial_state,
                                      const SearchConfig& config, SampledTrace* trace) {
  auto ctx = make_context(game, initial_state, config);
  if (config.max_candidates == 0) throw std::invalid_argument("max_candidates must be positive");
  std::mt19937_64 rng(config.rng_seed);
  ProfileGrid grid(game, config.initial_delta, ctx.m_tilde);
  std::uint64_t examined = 0;

  for (int level = 0; level <= config.max_refinements; ++level, grid = grid.refined()) {
    if (trace) trace->levels.emplace_back();
    std::unordered_set<std::vector<std::uint32_t>, DigitsHash> visited;
    std::vector<std::uniform_int_distribution<std::uint32_t>> pick;
    for (std::size_t slot = 0; slot < grid.slot_count(); ++slot) pick.emplace_back(0, grid.choices(slot) - 1);
    const std::uint64_t level_cap =
        grid.size() ? std::min<std::uint64_t>(config.max_candidates, *grid.size()) : config.max_candidates;

    std::uint64_t drawn = 0;
    while (drawn < level_cap) {
      std::vector<std::vector<std::uint32_t>> batch;
      while (batch.size() < ctx.batch && drawn < level_cap) {
        std::vector<std::uint32_t> digits(grid.slot_count());
        do {
          for (std::size_t slot = 0; slot < digits.size(); ++slot) digits[slot] = pick[slot](rng);
        } while (visited.contains(digits));
        visited.insert(digits);
        ++drawn;
        if (trace) trace->levels.back().push_back(digits);
        batch.push_back(std::move(digits));
      }
      const auto certs = certify_batch(ctx, grid, batch);
      if (const auto hit = first_passing(ctx, certs)) {
        auto cert = certs[*hit];
        cert.candidates_examined = examined + (drawn - batch.size()) + *hit + 1;
        cert.final_delta = grid.delta();
        if (trace) trace->levels.back().resize(trace->levels.back().size() - (batch.size() - *hit - 1));
        return cert;
      }
    }
    examined += drawn;
  }
  throw SearchFailure("candidate limit reached after " + std::to_string(config.max_refinements) +
                          " refinements (" + std::to_string(examined) + " candidates)" + gap_note(ctx),
                      ctx.best);
}

EquilibriumCertificate search(const ValidatedGame& game, std::span<const int> initial_state,
                              const SearchConfig& config) {
  return config.mode == SearchConfig::Mode::grid ? search_grid(game, initial_state, config)
                                                 : search_sampled(game, initial_state, config);
}

}  // namespace ptgame
