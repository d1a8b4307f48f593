#include "ptgame/cli_io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ptgame::io {

using nlohmann::json;

namespace {

// A JSON value together with its key path, for error messages.
class Node {
 public:
  Node(const json& value, std::string path) : value_(&value), path_(std::move(path)) {}

  const json& value() const { return *value_; }
  const std::string& path() const { return path_; }

  bool has(const std::string& key) const { return value_->is_object() && value_->contains(key); }

  Node at(const std::string& key) const {
    if (!value_->is_object()) fail("expected an object");
    const auto it = value_->find(key);
    if (it == value_->end()) throw ConfigError(child_path(key), "missing required key");
    return {*it, child_path(key)};
  }

  Node at(std::size_t k) const {
    if (!value_->is_array() || k >= value_->size()) fail("index " + std::to_string(k) + " out of range");
    return {(*value_)[k], path_ + "[" + std::to_string(k) + "]"};
  }

  std::size_t size() const {
    if (!value_->is_array()) fail("expected an array");
    return value_->size();
  }

  double real() const {
    if (!value_->is_number()) fail("expected a number");
    return value_->get<double>();
  }

  long long integer() const {
    if (value_->is_number_integer() || value_->is_number_unsigned()) return value_->get<long long>();
    if (value_->is_number_float()) {
      const double d = value_->get<double>();
      if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
    }
    fail("expected an integer");
  }

  int small_int() const {
    const auto v = integer();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail("integer out of range");
    return static_cast<int>(v);
  }

  std::string text() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
  }

  std::vector<double> reals() const {
    std::vector<double> out;
    for (std::size_t k = 0; k < size(); ++k) out.push_back(at(k).real());
    return out;
  }

  double real_or(const std::string& key, double fallback) const { return has(key) ? at(key).real() : fallback; }
  int int_or(const std::string& key, int fallback) const { return has(key) ? at(key).small_int() : fallback; }

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(path_, message); }

 private:
  std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* value_;
  std::string path_;
};

template <class F>
auto rethrow_at(const Node& node, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(node.path(), e.what());
  }
}

std::vector<std::pair<double, double>> parse_knots(const Node& node) {
  std::vector<std::pair<double, double>> knots;
  for (std::size_t k = 0; k < node.size(); ++k) {
    const auto pt = node.at(k);
    if (pt.size() != 2) pt.fail("knot must be a [x, y] pair");
    knots.emplace_back(pt.at(0).real(), pt.at(1).real());
  }
  return knots;
}

WeightingFunction parse_weighting(const Node& node) {
  const auto kind = node.at("kind").text();
  return rethrow_at(node, [&] {
    if (kind == "identity") return WeightingFunction::identity();
    if (kind == "prelec") return WeightingFunction::prelec(node.at("alpha").real());
    if (kind == "power_complement") return WeightingFunction::power_complement(node.at("alpha").real());
    if (kind == "table") return WeightingFunction::table(parse_knots(node.at("knots")));
    throw ConfigError(node.path() + ".kind", "unknown weighting kind '" + kind + "'");
  });
}

ValuationFunction parse_valuation(const Node& node) {
  const auto kind = node.at("kind").text();
  return rethrow_at(node, [&] {
    if (kind == "identity") return ValuationFunction::identity();
    if (kind == "piecewise_power") {
      return ValuationFunction::piecewise_power(node.at("c1").real(), node.at("c2").real(), node.at("c3").real());
    }
    if (kind == "table") return ValuationFunction::table(parse_knots(node.at("knots")));
    throw ConfigError(node.path() + ".kind", "unknown valuation kind '" + kind + "'");
  });
}

json weighting_json(const WeightingFunction& w) {
  switch (w.kind()) {
    case WeightingFunction::Kind::identity:
      return {{"kind", "identity"}};
    case WeightingFunction::Kind::prelec:
      return {{"kind", "prelec"}, {"alpha", w.alpha()}};
    case WeightingFunction::Kind::power_complement:
      return {{"kind", "power_complement"}, {"alpha", w.alpha()}};
    case WeightingFunction::Kind::table:
      return {{"kind", "table"}, {"knots", w.knots()}};
  }
  return {};
}

json valuation_json(const ValuationFunction& v) {
  switch (v.kind()) {
    case ValuationFunction::Kind::identity:
      return {{"kind", "identity"}};
    case ValuationFunction::Kind::piecewise_power:
      return {{"kind", "piecewise_power"}, {"c1", v.c1()}, {"c2", v.c2()}, {"c3", v.c3()}};
    case ValuationFunction::Kind::table:
      return {{"kind", "table"}, {"knots", v.knots()}};
  }
  return {};
}

TransitionKernel parse_kernel(const Node& node, int states, int actions) {
  const auto mode_text = node.has("mode") ? node.at("mode").text() : std::string("stationary");
  TransitionKernel::Mode mode;
  if (mode_text == "stationary") mode = TransitionKernel::Mode::stationary;
  else if (mode_text == "nonstationary") mode = TransitionKernel::Mode::nonstationary;
  else throw ConfigError(node.path() + ".mode", "expected 'stationary' or 'nonstationary'");

  const auto stages_node = node.at("stages");
  std::vector<std::vector<double>> stages;
  for (std::size_t t = 0; t < stages_node.size(); ++t) {
    const auto stage = stages_node.at(t);
    if (stage.size() != static_cast<std::size_t>(states)) stage.fail("expected one entry per state");
    std::vector<double> flat;
    for (int s = 0; s < states; ++s) {
      const auto by_action = stage.at(static_cast<std::size_t>(s));
      if (by_action.size() != static_cast<std::size_t>(actions)) by_action.fail("expected one row per action");
      for (int a = 0; a < actions; ++a) {
        const auto row = by_action.at(static_cast<std::size_t>(a));
        if (row.size() != static_cast<std::size_t>(states)) row.fail("expected one probability per next state");
        const auto probs = row.reals();
        flat.insert(flat.end(), probs.begin(), probs.end());
      }
    }
    stages.push_back(std::move(flat));
  }
  return rethrow_at(node, [&] { return TransitionKernel(mode, states, actions, std::move(stages)); });
}

// Maps validate_game issues onto config key paths under `prefix`.
[[noreturn]] void raise_validation(const GameValidationError& e, const std::string& prefix) {
  const auto& first = e.issues().front();
  std::string message = first.message;
  for (std::size_t k = 1; k < e.issues().size(); ++k) {
    message += "; " + prefix + "." + e.issues()[k].path + ": " + e.issues()[k].message;
  }
  throw ConfigError(prefix + "." + first.path, message);
}

GameSpec parse_game(const Node& node) {
  GameSpec spec;
  spec.discount_beta = node.at("beta").real();
  const auto players = node.at("players");
  if (players.size() == 0) players.fail("game needs at least one player");
  for (std::size_t i = 0; i < players.size(); ++i) {
    const auto p = players.at(i);
    PlayerSpec ps;
    ps.state_count = p.at("state_count").small_int();
    ps.action_count = p.at("action_count").small_int();
    if (ps.state_count < 1) p.at("state_count").fail("state space must be nonempty");
    if (ps.action_count < 1) p.at("action_count").fail("action space must be nonempty");
    ps.kernel = parse_kernel(p.at("kernel"), ps.state_count, ps.action_count);
    if (p.has("weighting")) ps.weighting = parse_weighting(p.at("weighting"));
    if (p.has("valuation")) ps.valuation = parse_valuation(p.at("valuation"));
    spec.players.push_back(std::move(ps));
  }
  const auto payoff = node.at("payoff");
  PayoffTable table;
  for (std::size_t i = 0; i < payoff.size(); ++i) table.push_back(payoff.at(i).reals());
  spec.payoff = std::move(table);
  return spec;
}

smartgrid::LevelFunction parse_level_function(const Node& node) {
  const auto kind = node.at("kind").text();
  if (kind == "zero") return smartgrid::LevelFunction::zero();
  if (kind == "log1p") return smartgrid::LevelFunction::log1p();
  if (kind == "linear") return smartgrid::LevelFunction::linear(node.at("coefficient").real());
  if (kind == "table") return smartgrid::LevelFunction::table(node.at("values").reals());
  throw ConfigError(node.path() + ".kind", "unknown level function kind '" + kind + "'");
}

smartgrid::GenerationDistribution parse_generation_law(const Node& node) {
  const auto kind = node.at("kind").text();
  return rethrow_at(node, [&] {
    if (kind == "gaussian") {
      const double mean = node.at("mean").real();
      double variance = 0.0;
      if (node.has("variance") == node.has("stddev")) node.fail("give exactly one of 'variance' or 'stddev'");
      if (node.has("variance")) {
        variance = node.at("variance").real();
      } else {
        const double sd = node.at("stddev").real();
        variance = sd * sd;
      }
      if (node.has("support")) {
        const auto sup = node.at("support");
        if (sup.size() != 2) sup.fail("support must be [g_min, g_max]");
        return smartgrid::discretize_gaussian(mean, variance, sup.at(0).small_int(), sup.at(1).small_int());
      }
      return smartgrid::discretize_gaussian(mean, variance);
    }
    if (kind == "table") {
      return smartgrid::GenerationDistribution::from_table(node.at("g_min").small_int(), node.at("pmf").reals());
    }
    throw ConfigError(node.path() + ".kind", "unknown generation kind '" + kind + "'");
  });
}

smartgrid::SmartGridSpec parse_smartgrid(const Node& node) {
  smartgrid::SmartGridSpec grid;
  grid.beta = node.at("beta").real();
  if (node.has("encoding")) {
    const auto enc = node.at("encoding").text();
    if (enc == "consumption_only") grid.encoding = smartgrid::ActionEncoding::consumption_only;
    else if (enc == "consumption_demand") grid.encoding = smartgrid::ActionEncoding::consumption_demand;
    else node.at("encoding").fail("expected 'consumption_only' or 'consumption_demand'");
  }
  if (node.has("pricing")) {
    const auto pricing = node.at("pricing");
    const auto kind = pricing.at("kind").text();
    if (kind == "fairness") {
      grid.pricing.kind = smartgrid::PricingRule::Kind::fairness;
    } else if (kind == "table") {
      grid.pricing.kind = smartgrid::PricingRule::Kind::table;
      const auto rows = pricing.at("table");
      for (std::size_t k = 0; k < rows.size(); ++k) grid.pricing.table.push_back(rows.at(k).reals());
    } else {
      pricing.at("kind").fail("expected 'fairness' or 'table'");
    }
  }
  const auto prosumers = node.at("prosumers");
  for (std::size_t i = 0; i < prosumers.size(); ++i) {
    const auto p = prosumers.at(i);
    smartgrid::ProsumerSpec ps;
    ps.storage_cap = p.at("storage_cap").small_int();
    ps.consumption_cap = p.at("consumption_cap").small_int();
    ps.demand_cap = p.at("demand_cap").small_int();
    ps.tau = p.at("tau").small_int();
    if (ps.tau < 0 || ps.tau > ps.storage_cap) p.at("tau").fail("tau must lie in [0, storage_cap]");
    const auto gen = p.at("generation");
    if (gen.value().is_array()) {
      for (std::size_t t = 0; t < gen.size(); ++t) ps.generation.push_back(parse_generation_law(gen.at(t)));
    } else {
      ps.generation.push_back(parse_generation_law(gen));
    }
    if (p.has("satisfaction")) ps.satisfaction = parse_level_function(p.at("satisfaction"));
    if (p.has("storage_cost")) ps.storage_cost = parse_level_function(p.at("storage_cost"));
    if (p.has("weighting")) ps.weighting = parse_weighting(p.at("weighting"));
    if (p.has("valuation")) ps.valuation = parse_valuation(p.at("valuation"));
    grid.prosumers.push_back(std::move(ps));
  }
  rethrow_at(node, [&] {
    smartgrid::validate_spec(grid);
    return 0;
  });
  return grid;
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t k = 0; k + 1 < upto; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(column),
                      std::string("parse error: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void parse_run(const Node& run, RunConfig& cfg) {
  if (run.has("x")) {
    const auto x = run.at("x");
    for (std::size_t i = 0; i < x.size(); ++i) cfg.x.push_back(x.at(i).small_int());
  }
  auto& s = cfg.search;
  s.epsilon = run.real_or("epsilon", s.epsilon);
  if (!(s.epsilon > 0.0)) run.at("epsilon").fail("epsilon must be positive");
  if (run.has("mode")) {
    const auto mode = run.at("mode").text();
    if (mode == "grid") s.mode = SearchConfig::Mode::grid;
    else if (mode == "sampled") s.mode = SearchConfig::Mode::sampled;
    else run.at("mode").fail("expected 'grid' or 'sampled'");
  }
  if (run.has("seed")) s.rng_seed = static_cast<std::uint64_t>(run.at("seed").integer());
  s.initial_delta = run.real_or("initial_delta", s.initial_delta);
  if (!(s.initial_delta > 0.0 && s.initial_delta <= 1.0)) run.at("initial_delta").fail("must lie in (0,1]");
  if (run.has("max_candidates")) {
    const auto v = run.at("max_candidates").integer();
    if (v < 1) run.at("max_candidates").fail("must be positive");
    s.max_candidates = static_cast<std::uint64_t>(v);
  }
  s.max_refinements = run.int_or("max_refinements", s.max_refinements);
  if (s.max_refinements < 0) run.at("max_refinements").fail("must be nonnegative");
  if (run.has("grid_cap")) {
    const auto v = run.at("grid_cap").integer();
    if (v < 1) run.at("grid_cap").fail("must be positive");
    s.grid_cap = static_cast<std::uint64_t>(v);
  }
  s.m_tilde = run.int_or("m_tilde", 0);
  if (s.m_tilde < 0) run.at("m_tilde").fail("must be nonnegative (0 = derive from epsilon)");
  if (run.has("out")) cfg.out_dir = run.at("out").text();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& text) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

RunConfig parse_config(const std::string& text, const std::string& origin, const std::filesystem::path& base_dir) {
  const json root_json = parse_json_text(text, origin);
  const Node root(root_json, "");
  if (!root_json.is_object()) root.fail("config must be a JSON object");

  RunConfig cfg;
  const bool has_game = root.has("game");
  const bool has_grid = root.has("smartgrid");
  if (has_game == has_grid) throw ConfigError("game", "config needs exactly one of 'game' or 'smartgrid'");

  std::string prefix;
  std::optional<json> file_game;
  if (has_grid) {
    cfg.source = RunConfig::Source::smartgrid;
    cfg.smartgrid = parse_smartgrid(root.at("smartgrid"));
    cfg.spec = smartgrid::build_prosumer_game(*cfg.smartgrid);
    prefix = "smartgrid";
  } else if (root.at("game").value().is_string()) {
    cfg.source = RunConfig::Source::file;
    cfg.game_path = base_dir / root.at("game").text();
    file_game = parse_json_text(read_file(cfg.game_path), cfg.game_path.string());
    const json& g = file_game->contains("game") ? (*file_game)["game"] : *file_game;
    cfg.spec = parse_game(Node(g, "game"));
    prefix = "game";
  } else {
    cfg.source = RunConfig::Source::inline_game;
    cfg.spec = parse_game(root.at("game"));
    prefix = "game";
  }

  try {
    cfg.game = std::make_shared<const ValidatedGame>(validate_game(cfg.spec));
  } catch (const GameValidationError& e) {
    raise_validation(e, prefix);
  }

  if (root.has("run")) parse_run(root.at("run"), cfg);
  if (cfg.x.empty()) cfg.x.assign(cfg.game->player_count(), 0);
  if (cfg.x.size() != cfg.game->player_count()) {
    throw ConfigError("run.x", "initial state needs one entry per player (" +
                                   std::to_string(cfg.game->player_count()) + ")");
  }
  for (std::size_t i = 0; i < cfg.x.size(); ++i) {
    if (cfg.x[i] < 0 || cfg.x[i] >= cfg.game->player(i).state_count) {
      throw ConfigError("run.x[" + std::to_string(i) + "]", "state out of range");
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.string(), path.parent_path());
}

std::string game_to_json(const ValidatedGame& game) {
  json g;
  g["beta"] = game.beta();
  g["players"] = json::array();
  for (const auto& p : game.players()) {
    json stages = json::array();
    for (int t = 1; t <= p.kernel.declared_stages(); ++t) {
      json by_state = json::array();
      for (int s = 0; s < p.state_count; ++s) {
        json by_action = json::array();
        for (int a = 0; a < p.action_count; ++a) {
          const auto row = p.kernel.row(t, s, a);
          by_action.push_back(std::vector<double>(row.begin(), row.end()));
        }
        by_state.push_back(std::move(by_action));
      }
      stages.push_back(std::move(by_state));
    }
    const char* mode = p.kernel.mode() == TransitionKernel::Mode::stationary ? "stationary" : "nonstationary";
    g["players"].push_back({{"state_count", p.state_count},
                            {"action_count", p.action_count},
                            {"kernel", {{"mode", mode}, {"stages", std::move(stages)}}},
                            {"weighting", weighting_json(p.weighting)},
                            {"valuation", valuation_json(p.valuation)}});
  }
  g["payoff"] = json::array();
  for (std::size_t i = 0; i < game.player_count(); ++i) g["payoff"].push_back(game.payoff_table(i));
  return json{{"game", std::move(g)}}.dump(1) + "\n";
}

namespace {

void write_table_rows(std::ostream& os, std::size_t player, const StageTable& table) {
  for (int t = 1; t <= table.horizon(); ++t) {
    for (int s = 0; s < table.state_count(); ++s) {
      for (int a = 0; a < table.action_count(); ++a) {
        os << player << ',' << t << ',' << s << ',' << a << ',' << format_real(table(t, s, a)) << '\n';
      }
    }
  }
}

constexpr const char* kCsvHeader = "player,stage,state,action,probability\n";

std::vector<StageTable> read_tables(std::istream& is, const ValidatedGame& game, const char* what) {
  struct Row {
    std::size_t player;
    int t, s, a;
    double p;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  int horizon = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw std::invalid_argument(std::string(what) + " CSV line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("player", 0) == 0) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string col; std::getline(ss, col, ',');) cols.push_back(col);
    if (cols.size() != 5) fail("expected 5 columns");
    Row r{};
    try {
      r.player = static_cast<std::size_t>(std::stoul(cols[0]));
      r.t = std::stoi(cols[1]);
      r.s = std::stoi(cols[2]);
      r.a = std::stoi(cols[3]);
      r.p = parse_real(cols[4]);
    } catch (const std::exception& e) {
      fail(e.what());
    }
    if (r.player >= game.player_count()) fail("player out of range");
    const auto& p = game.player(r.player);
    if (r.t < 1 || r.s < 0 || r.s >= p.state_count || r.a < 0 || r.a >= p.action_count) fail("index out of range");
    horizon = std::max(horizon, r.t);
    rows.push_back(r);
  }
  if (horizon == 0) throw std::invalid_argument(std::string(what) + " CSV has no rows");
  std::vector<StageTable> tables;
  std::vector<std::vector<char>> seen;
  for (const auto& p : game.players()) {
    tables.emplace_back(horizon, p.state_count, p.action_count);
    seen.emplace_back(static_cast<std::size_t>(horizon) * p.state_count * p.action_count, 0);
  }
  for (const auto& r : rows) {
    const auto& p = game.player(r.player);
    const auto k = (static_cast<std::size_t>(r.t - 1) * p.state_count + r.s) * p.action_count + r.a;
    if (seen[r.player][k]) {
      throw std::invalid_argument(std::string(what) + " CSV repeats player " + std::to_string(r.player) +
                                  " stage " + std::to_string(r.t) + " state " + std::to_string(r.s) + " action " +
                                  std::to_string(r.a));
    }
    seen[r.player][k] = 1;
    tables[r.player](r.t, r.s, r.a) = r.p;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    for (char c : seen[i]) {
      if (!c) throw std::invalid_argument(std::string(what) + " CSV is missing entries for player " + std::to_string(i));
    }
  }
  return tables;
}

}  // namespace

void write_profile_csv(std::ostream& os, const MarkovStrategyProfile& profile) {
  os << kCsvHeader;
  for (const auto& s : profile) write_table_rows(os, s.player, s.dist);
}

void write_strategy_csv(std::ostream& os, const MarkovStrategy& strategy) {
  os << kCsvHeader;
  write_table_rows(os, strategy.player, strategy.dist);
}

void write_marginals_csv(std::ostream& os, const std::vector<MarginalTable>& marginals) {
  os << kCsvHeader;
  for (const auto& m : marginals) write_table_rows(os, m.player, m.rho);
}

MarkovStrategyProfile read_profile_csv(std::istream& is, const ValidatedGame& game) {
  auto tables = read_tables(is, game, "profile");
  MarkovStrategyProfile profile;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    profile.push_back({i, std::move(tables[i])});
    check_strategy(game, profile.back());
  }
  return profile;
}

std::vector<MarginalTable> read_marginals_csv(std::istream& is, const ValidatedGame& game) {
  auto tables = read_tables(is, game, "marginals");
  std::vector<MarginalTable> out;
  for (std::size_t i = 0; i < tables.size(); ++i) out.push_back({i, std::move(tables[i])});
  return out;
}

void write_certificate(std::ostream& os, const EquilibriumCertificate& cert) {
  os << "# Markov epsilon-equilibrium certificate\n";
  os << "passed: " << (cert.passed ? "true" : "false") << '\n';
  os << "epsilon: " << format_real(cert.epsilon) << '\n';
  os << "threshold: " << format_real(cert.threshold()) << '\n';
  os << "m_tilde: " << cert.m_tilde << '\n';
  os << "initial_state:";
  for (int v : cert.initial_state) os << ' ' << v;
  os << '\n';
  os << "players: " << cert.players.size() << '\n';
  os << "candidates_examined: " << cert.candidates_examined << '\n';
  os << "final_delta: " << format_real(cert.final_delta) << '\n';
  os << "max_gap: " << format_real(cert.max_gap()) << '\n';
  for (std::size_t i = 0; i < cert.players.size(); ++i) {
    const auto& p = cert.players[i];
    const auto key = "player." + std::to_string(i);
    os << key << ".value: " << format_real(p.value) << '\n';
    os << key << ".best_response_value: " << format_real(p.best_response_value) << '\n';
    os << key << ".gap: " << format_real(p.gap) << '\n';
    os << key << ".passed: " << (p.gap <= cert.threshold() + kGapSlack ? "true" : "false") << '\n';
    os << key << ".best_response:";
    for (int a : p.best_response.choice) os << ' ' << a;
    os << '\n';
  }
  // profile.<player>.<stage>.<state>: action probabilities
  for (const auto& s : cert.profile) {
    for (int t = 1; t <= s.horizon(); ++t) {
      for (int st = 0; st < s.dist.state_count(); ++st) {
        os << "profile." << s.player << '.' << t << '.' << st << ':';
        for (double v : s.dist.row(t, st)) os << ' ' << format_real(v);
        os << '\n';
      }
    }
  }
}

std::map<std::string, std::string> read_key_values(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    auto value = line.substr(colon + 1);
    if (!value.empty() && value[0] == ' ') value.erase(0, 1);
    out[line.substr(0, colon)] = value;
  }
  return out;
}

SolveOutcome run_solve(const RunConfig& config) {
  const auto& game = *config.game;
  std::filesystem::create_directories(config.out_dir);
  const auto start = std::chrono::steady_clock::now();
  SolveOutcome outcome;
  try {
    outcome.certificate = search(game, config.x, config.search);
    outcome.exit_code = 0;
    outcome.message = "certified";
  } catch (const SearchFailure& e) {
    outcome.exit_code = 1;
    outcome.message = e.what();
    outcome.certificate = e.best();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (outcome.certificate) {
    const auto& cert = *outcome.certificate;
    std::ostringstream c;
    write_certificate(c, cert);
    write_text_file(config.out_dir / "certificate.txt", c.str());
    for (const auto& s : cert.profile) {
      std::ostringstream ss;
      write_strategy_csv(ss, s);
      write_text_file(config.out_dir / ("strategy_player" + std::to_string(s.player) + ".csv"), ss.str());
    }
    std::ostringstream plot;
    write_profile_csv(plot, cert.profile);
    write_text_file(config.out_dir / "plot_data.csv", plot.str());
  }

  std::ostringstream log;
  log << "status: " << (outcome.exit_code == 0 ? "certified" : "failed") << '\n';
  log << "message: " << outcome.message << '\n';
  log << "mode: " << (config.search.mode == SearchConfig::Mode::grid ? "grid" : "sampled") << '\n';
  log << "seed: " << config.search.rng_seed << '\n';
  log << "epsilon: " << format_real(config.search.epsilon) << '\n';
  if (outcome.certificate) {
    log << "m_tilde: " << outcome.certificate->m_tilde << '\n';
    log << "candidates_examined: " << outcome.certificate->candidates_examined << '\n';
    log << "final_delta: " << format_real(outcome.certificate->final_delta) << '\n';
    log << "max_gap: " << format_real(outcome.certificate->max_gap()) << '\n';
  }
  int threads = 1;
#ifdef _OPENMP
  threads = config.search.parallel ? omp_get_max_threads() : 1;
#endif
  log << "threads: " << threads << '\n';
  log << "wall_time_seconds: " << wall << '\n';
  write_text_file(config.out_dir / "run.log", log.str());
  return outcome;
}

EquilibriumCertificate run_certify(const RunConfig& config, const MarkovStrategyProfile& profile) {
  const auto& game = *config.game;
  const int m = config.search.m_tilde > 0 ? config.search.m_tilde
                                          : truncation_horizon(config.search.epsilon, game).m_tilde;
  for (const auto& s : profile) {
    if (s.horizon() < m) {
      throw std::invalid_argument("profile covers " + std::to_string(s.horizon()) + " stages, certification needs " +
                                  std::to_string(m));
    }
  }
  auto cert = certify(game, profile, config.x, m, config.search.epsilon);
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    std::ostringstream c;
    write_certificate(c, cert);
    write_text_file(config.out_dir / "certificate.txt", c.str());
  }
  return cert;
}

std::string bound_report(const ValidatedGame& game, double epsilon, double lipschitz_c) {
  std::ostringstream os;
  const auto params = truncation_horizon(epsilon, game);
  os << "epsilon: " << format_real(epsilon) << '\n';
  os << "beta: " << format_real(game.beta()) << '\n';
  os << "joint_states: " << format_real(game.joint_state_count()) << '\n';
  os << "joint_actions: " << format_real(game.joint_action_count()) << '\n';
  for (std::size_t i = 0; i < params.K.size(); ++i) os << "K." << i << ": " << format_real(params.K[i]) << '\n';
  os << "m_tilde: " << params.m_tilde << '\n';
  const auto bounds = truncation_error_bound(game, params.m_tilde);
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    os << "truncation_bound." << i << ": " << format_real(bounds[i]) << '\n';
  }
  try {
    const auto d = lipschitz_delta(epsilon, game, lipschitz_c);
    os << "lipschitz_c: " << format_real(lipschitz_c) << '\n';
    os << "m_hat: " << d.m_hat << '\n';
    os << "delta: " << format_real(d.delta) << '\n';
  } catch (const std::invalid_argument& e) {
    os << "delta: unavailable (" << e.what() << ")\n";
  }
  return os.str();
}

}  // namespace ptgame::io
