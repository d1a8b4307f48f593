#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptgame/equilibrium_search.hpp"
#include "ptgame/game.hpp"
#include "ptgame/marginals.hpp"
#include "ptgame/pt_criterion.hpp"
#include "ptgame/smartgrid.hpp"

namespace ptgame::io {

// Error tied to a config location: a key path such as "game.beta", or
// "file:line:column" for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& message)
      : std::runtime_error(where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct RunConfig {
  enum class Source { inline_game, smartgrid, file };

  Source source = Source::inline_game;
  std::filesystem::path game_path;  // Source::file
  std::optional<smartgrid::SmartGridSpec> smartgrid;
  GameSpec spec;
  std::shared_ptr<const ValidatedGame> game;
  std::vector<int> x;
  SearchConfig search;
  std::filesystem::path out_dir = "out";
};

// Parses and validates a JSON config. `origin` names the source in errors.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>",
                       const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

// Generic game format (the "game" object of a config), fully materialized.
std::string game_to_json(const ValidatedGame& game);

// Locale-independent rendering with 17 significant digits; parse_real inverts it exactly.
std::string format_real(double x);
double parse_real(const std::string& text);

// CSV rows "player,stage,state,action,probability" with a header line.
void write_profile_csv(std::ostream& os, const MarkovStrategyProfile& profile);
void write_strategy_csv(std::ostream& os, const MarkovStrategy& strategy);
void write_marginals_csv(std::ostream& os, const std::vector<MarginalTable>& marginals);

// Reads the same CSV layout back. Every (player, stage, state, action) of the
// game up to the largest stage present must appear exactly once.
MarkovStrategyProfile read_profile_csv(std::istream& is, const ValidatedGame& game);
std::vector<MarginalTable> read_marginals_csv(std::istream& is, const ValidatedGame& game);

void write_certificate(std::ostream& os, const EquilibriumCertificate& cert);
// key -> value map of a certificate file (comments and blank lines skipped).
std::map<std::string, std::string> read_key_values(std::istream& is);

struct SolveOutcome {
  int exit_code = 0;
  std::optional<EquilibriumCertificate> certificate;
  std::string message;
};

// Runs the configured search and writes certificate.txt, strategy_player<i>.csv,
// plot_data.csv and run.log into config.out_dir.
SolveOutcome run_solve(const RunConfig& config);

// Re-certifies a supplied profile; writes certificate.txt when out_dir is set.
EquilibriumCertificate run_certify(const RunConfig& config, const MarkovStrategyProfile& profile);

// m_tilde, K_i, truncation bounds and (when Lipschitz) delta, as key: value text.
std::string bound_report(const ValidatedGame& game, double epsilon, double lipschitz_c);

}  // namespace ptgame::io
