#include "ptgame/smartgrid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ptgame::smartgrid {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void check_pmf(const std::vector<double>& pmf, const std::string& what) {
  if (pmf.empty()) throw std::invalid_argument(what + ": empty support");
  double sum = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw std::invalid_argument(what + ": negative probability");
    sum += p;
  }
  if (!(std::abs(sum - 1.0) <= 1e-12)) throw std::invalid_argument(what + ": pmf does not sum to 1");
}

}  // namespace

GenerationDistribution GenerationDistribution::point_mass(int value) { return from_table(value, {1.0}); }

GenerationDistribution GenerationDistribution::from_table(int g_min, std::vector<double> pmf) {
  check_pmf(pmf, "generation table");
  GenerationDistribution g;
  g.g_min = g_min;
  g.pmf = std::move(pmf);
  g.provenance = Provenance::table;
  return g;
}

GenerationDistribution discretize_gaussian(double mu, double variance, int g_min, int g_max) {
  if (g_min > g_max) throw std::invalid_argument("discretize_gaussian: empty support");
  if (!(variance > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("discretize_gaussian: need variance > 0");
  const double sigma = std::sqrt(variance);
  GenerationDistribution g;
  g.g_min = g_min;
  g.provenance = GenerationDistribution::Provenance::discretized_gaussian;
  g.mean = mu;
  g.variance = variance;
  g.pmf.resize(static_cast<std::size_t>(g_max - g_min + 1));
  for (int k = g_min; k <= g_max; ++k) {
    const double upper = k == g_max ? 1.0 : normal_cdf((k + 0.5 - mu) / sigma);
    const double lower = k == g_min ? 0.0 : normal_cdf((k - 0.5 - mu) / sigma);
    g.pmf[static_cast<std::size_t>(k - g_min)] = std::max(0.0, upper - lower);
  }
  const double total = std::accumulate(g.pmf.begin(), g.pmf.end(), 0.0);
  for (double& p : g.pmf) p /= total;
  return g;
}

GenerationDistribution discretize_gaussian(double mu, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("discretize_gaussian: need variance > 0");
  const double sigma = std::sqrt(variance);
  return discretize_gaussian(mu, variance, static_cast<int>(std::floor(mu - 4.0 * sigma)),
                             static_cast<int>(std::ceil(mu + 4.0 * sigma)));
}

double LevelFunction::operator()(int x) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::log1p:
      return std::log1p(static_cast<double>(x));
    case Kind::linear:
      return coefficient * x;
    case Kind::table:
      if (x < 0 || static_cast<std::size_t>(x) >= values.size()) {
        throw std::out_of_range("level function table has no entry for " + std::to_string(x));
      }
      return values[static_cast<std::size_t>(x)];
  }
  return 0.0;
}

const GenerationDistribution& ProsumerSpec::generation_at(int t) const {
  if (generation.empty()) throw std::invalid_argument("prosumer has no generation law");
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max(t, 1)), generation.size()) - 1;
  return generation[k];
}

int demand_of(int tau, int consumption, int storage, int demand_cap) {
  return std::min(std::max(0, tau + consumption - storage), demand_cap);
}

std::vector<double> fairness_price(const std::vector<int>& demand) {
  long long total = 0;
  for (int d : demand) {
    if (d < 0) throw std::invalid_argument("fairness_price: negative demand");
    total += d;
  }
  std::vector<double> p(demand.size(), 0.0);
  if (total == 0) return p;
  for (std::size_t i = 0; i < demand.size(); ++i) p[i] = static_cast<double>(demand[i]) / static_cast<double>(total);
  return p;
}

std::vector<double> price(const SmartGridSpec& grid, const std::vector<int>& demand) {
  if (grid.pricing.kind == PricingRule::Kind::fairness) return fairness_price(demand);
  std::size_t index = 0;
  for (std::size_t j = 0; j < demand.size(); ++j) {
    index = index * static_cast<std::size_t>(grid.prosumers[j].demand_cap + 1) + static_cast<std::size_t>(demand[j]);
  }
  return grid.pricing.table.at(index);
}

namespace {

double payoff_with_price(const ProsumerSpec& spec, int storage, int consumption, int own_demand, double own_price) {
  return spec.satisfaction(consumption) - own_demand * own_price - spec.storage_cost(storage);
}

}  // namespace

double prosumer_payoff(const ProsumerSpec& spec, std::size_t i, int storage, int consumption,
                       const std::vector<int>& demand) {
  const auto p = fairness_price(demand);
  return payoff_with_price(spec, storage, consumption, demand.at(i), p[i]);
}

std::vector<double> storage_transition_row(const ProsumerSpec& spec, int t, int storage, int consumption,
                                           int demand) {
  const auto& g = spec.generation_at(t);
  std::vector<double> row(static_cast<std::size_t>(spec.storage_cap + 1), 0.0);
  for (int k = g.g_min; k <= g.g_max(); ++k) {
    const int next = std::min(std::max(0, storage + k + demand - consumption), spec.storage_cap);
    row[static_cast<std::size_t>(next)] += g(k);
  }
  return row;
}

int action_count(const ProsumerSpec& spec, ActionEncoding encoding) {
  return encoding == ActionEncoding::consumption_only ? spec.consumption_cap + 1
                                                      : (spec.consumption_cap + 1) * (spec.demand_cap + 1);
}

namespace {

// (consumption, demand) carried by action a in state x.
std::pair<int, int> decode_action(const ProsumerSpec& spec, ActionEncoding encoding, int x, int a) {
  if (encoding == ActionEncoding::consumption_only) return {a, demand_of(spec.tau, a, x, spec.demand_cap)};
  return {a / (spec.demand_cap + 1), a % (spec.demand_cap + 1)};
}

}  // namespace

TransitionKernel storage_kernel(const ProsumerSpec& spec, ActionEncoding encoding) {
  const int S = spec.storage_cap + 1;
  const int A = action_count(spec, encoding);
  std::vector<std::vector<double>> stages;
  for (int t = 1; t <= static_cast<int>(spec.generation.size()); ++t) {
    std::vector<double> probs;
    probs.reserve(static_cast<std::size_t>(S) * A * S);
    for (int x = 0; x < S; ++x) {
      for (int a = 0; a < A; ++a) {
        const auto [l, d] = decode_action(spec, encoding, x, a);
        const auto row = storage_transition_row(spec, t, x, l, d);
        probs.insert(probs.end(), row.begin(), row.end());
      }
    }
    stages.push_back(std::move(probs));
  }
  const auto mode = stages.size() == 1 ? TransitionKernel::Mode::stationary : TransitionKernel::Mode::nonstationary;
  return TransitionKernel(mode, S, A, std::move(stages));
}

void validate_spec(const SmartGridSpec& grid) {
  if (grid.prosumers.empty()) throw std::invalid_argument("smart grid needs at least one prosumer");
  std::size_t demand_vectors = 1;
  for (std::size_t i = 0; i < grid.prosumers.size(); ++i) {
    const auto& p = grid.prosumers[i];
    const auto who = "prosumer " + std::to_string(i);
    if (p.storage_cap < 0 || p.consumption_cap < 0 || p.demand_cap < 0) {
      throw std::invalid_argument(who + ": capacities must be nonnegative");
    }
    if (p.tau < 0 || p.tau > p.storage_cap) throw std::invalid_argument(who + ": tau must lie in [0, storage_cap]");
    if (p.generation.empty()) throw std::invalid_argument(who + ": no generation law");
    for (const auto& g : p.generation) check_pmf(g.pmf, who + " generation");
    if (p.satisfaction.kind == LevelFunction::Kind::table &&
        p.satisfaction.values.size() < static_cast<std::size_t>(p.consumption_cap + 1)) {
      throw std::invalid_argument(who + ": satisfaction table too short");
    }
    if (p.storage_cost.kind == LevelFunction::Kind::table &&
        p.storage_cost.values.size() < static_cast<std::size_t>(p.storage_cap + 1)) {
      throw std::invalid_argument(who + ": storage cost table too short");
    }
    demand_vectors *= static_cast<std::size_t>(p.demand_cap + 1);
  }
  if (grid.pricing.kind == PricingRule::Kind::table) {
    if (grid.pricing.table.size() != demand_vectors) {
      throw std::invalid_argument("pricing table needs one row per joint demand vector (" +
                                  std::to_string(demand_vectors) + ")");
    }
    for (const auto& row : grid.pricing.table) {
      if (row.size() != grid.prosumers.size()) throw std::invalid_argument("pricing table row has wrong length");
      for (double v : row) {
        if (!(v >= 0.0)) throw std::invalid_argument("prices must be nonnegative");
      }
    }
  }
}

GameSpec build_prosumer_game(const SmartGridSpec& grid) {
  validate_spec(grid);
  GameSpec spec;
  spec.discount_beta = grid.beta;
  for (const auto& p : grid.prosumers) {
    PlayerSpec player;
    player.state_count = p.storage_cap + 1;
    player.action_count = action_count(p, grid.encoding);
    player.kernel = storage_kernel(p, grid.encoding);
    player.weighting = p.weighting;
    player.valuation = p.valuation;
    spec.players.push_back(std::move(player));
  }
  spec.payoff = PayoffRule([grid](std::size_t i, std::span<const int> s, std::span<const int> a) {
    std::vector<int> demand(s.size());
    std::vector<int> consumption(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
      const auto [l, d] = decode_action(grid.prosumers[j], grid.encoding, s[j], a[j]);
      consumption[j] = l;
      demand[j] = d;
    }
    const auto p = price(grid, demand);
    return payoff_with_price(grid.prosumers[i], s[i], consumption[i], demand[i], p[i]);
  });
  return spec;
}

SmartGridSpec simulation_setup() {
  SmartGridSpec grid;
  grid.beta = 0.001;
  grid.encoding = ActionEncoding::consumption_only;
  const int taus[] = {1, 0, 1};
  const double means[] = {0.5, 0.5, 1.0};
  const double variances[] = {2.0, 1.0, 1.0};
  for (int i = 0; i < 3; ++i) {
    ProsumerSpec p;
    p.storage_cap = 2;
    p.consumption_cap = 1;
    p.demand_cap = 2;
    p.tau = taus[i];
    p.generation = {discretize_gaussian(means[i], variances[i])};
    p.satisfaction = LevelFunction::log1p();
    p.storage_cost = LevelFunction::zero();
    p.weighting = WeightingFunction::prelec(0.8);
    p.valuation = ValuationFunction::piecewise_power(0.5, 1.0, 0.3);
    grid.prosumers.push_back(std::move(p));
  }
  return grid;
}

GameSpec build_simulation_game() { return build_prosumer_game(simulation_setup()); }

}  // namespace ptgame::smartgrid
