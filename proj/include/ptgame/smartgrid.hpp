#pragma once

#include <string>
#include <vector>

#include "ptgame/game.hpp"
#include "ptgame/pt_functions.hpp"

namespace ptgame::smartgrid {

// Integer-valued renewable generation G with pmf over [g_min, g_max].
struct GenerationDistribution {
  enum class Provenance { discretized_gaussian, table };

  int g_min = 0;
  std::vector<double> pmf;
  Provenance provenance = Provenance::table;
  double mean = 0.0;      // discretized_gaussian only
  double variance = 0.0;  // discretized_gaussian only

  int g_max() const { return g_min + static_cast<int>(pmf.size()) - 1; }
  double operator()(int k) const {
    return (k < g_min || k > g_max()) ? 0.0 : pmf[static_cast<std::size_t>(k - g_min)];
  }

  static GenerationDistribution point_mass(int value);
  static GenerationDistribution from_table(int g_min, std::vector<double> pmf);
};

// Integerized normal law: pmf(k) = Phi((k+0.5-mu)/sigma) - Phi((k-0.5-mu)/sigma)
// on interior bins; g_min absorbs (-inf, g_min+0.5) and g_max absorbs
// [g_max-0.5, inf). Normalized to sum to 1.
GenerationDistribution discretize_gaussian(double mu, double variance, int g_min, int g_max);

// Support [floor(mu - 4 sigma), ceil(mu + 4 sigma)].
GenerationDistribution discretize_gaussian(double mu, double variance);

// f(l) satisfaction and g(s) storage cost, evaluated on integer levels.
struct LevelFunction {
  enum class Kind { zero, log1p, linear, table };

  Kind kind = Kind::zero;
  double coefficient = 1.0;     // linear: coefficient * x
  std::vector<double> values;   // table: values[x]

  double operator()(int x) const;

  static LevelFunction zero() { return {}; }
  static LevelFunction log1p() { return {Kind::log1p, 1.0, {}}; }
  static LevelFunction linear(double c) { return {Kind::linear, c, {}}; }
  static LevelFunction table(std::vector<double> v) { return {Kind::table, 1.0, std::move(v)}; }
};

struct ProsumerSpec {
  int storage_cap = 2;      // S_bar: storage levels 0..S_bar
  int consumption_cap = 1;  // L_bar
  int demand_cap = 2;       // D_bar
  int tau = 0;              // saving threshold, 0 <= tau <= S_bar
  // One law per stage; the last repeats. A single entry means stationary.
  std::vector<GenerationDistribution> generation;
  LevelFunction satisfaction = LevelFunction::log1p();
  LevelFunction storage_cost = LevelFunction::zero();
  WeightingFunction weighting;
  ValuationFunction valuation;

  const GenerationDistribution& generation_at(int t) const;
};

// p_i(d) = d_i / sum_j d_j, all zero when the total is 0.
struct PricingRule {
  enum class Kind { fairness, table };

  Kind kind = Kind::fairness;
  // table: one price vector per joint demand vector, mixed-radix over
  // players (player 0 most significant, base D_bar_j + 1).
  std::vector<std::vector<double>> table;
};

enum class ActionEncoding {
  consumption_only,    // a = l; demand induced by demand_of
  consumption_demand,  // a = l * (D_bar + 1) + d
};

struct SmartGridSpec {
  std::vector<ProsumerSpec> prosumers;
  double beta = 0.001;
  PricingRule pricing;
  ActionEncoding encoding = ActionEncoding::consumption_only;
};

// D = min(max(0, tau + l - x), D_bar).
int demand_of(int tau, int consumption, int storage, int demand_cap);

std::vector<double> fairness_price(const std::vector<int>& demand);

std::vector<double> price(const SmartGridSpec& grid, const std::vector<int>& demand);

// r_i = f_i(l_i) - d_i p_i(d) - g_i(s_i) under fairness pricing.
double prosumer_payoff(const ProsumerSpec& spec, std::size_t i, int storage, int consumption,
                       const std::vector<int>& demand);

// Distribution of X' = min(max(0, x + G + d - l), S_bar) at stage t.
std::vector<double> storage_transition_row(const ProsumerSpec& spec, int t, int storage, int consumption,
                                           int demand);

// Per-prosumer kernel in the chosen action encoding (stationary when the
// generation law has a single stage).
TransitionKernel storage_kernel(const ProsumerSpec& spec, ActionEncoding encoding);

int action_count(const ProsumerSpec& spec, ActionEncoding encoding);

void validate_spec(const SmartGridSpec& grid);

GameSpec build_prosumer_game(const SmartGridSpec& grid);

// Three prosumers, S_i = {0,1,2}, L_i = {0,1}, tau = (1,0,1),
// G ~ N(0.5,2), N(0.5,1), N(1,1) (mean, variance), prelec(0.8) weighting,
// piecewise power (0.5, 1, 0.3) valuation, beta = 0.001, fairness pricing,
// f(l) = ln(1+l), g = 0.
SmartGridSpec simulation_setup();
GameSpec build_simulation_game();

}  // namespace ptgame::smartgrid
