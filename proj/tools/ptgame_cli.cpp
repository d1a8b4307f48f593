#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ptgame/cli_io.hpp"

namespace io = ptgame::io;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

void apply_thread_env() {
  const char* env = std::getenv("PTGAME_THREADS");
  if (!env || !*env) return;
  const int n = std::atoi(env);
  if (n < 1) throw io::ConfigError("PTGAME_THREADS", "expected a positive integer");
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
}

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<std::string> mode;
};

io::RunConfig load_with_overrides(const Overrides& o) {
  auto cfg = io::load_config(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed) cfg.search.rng_seed = *o.seed;
  if (o.epsilon) {
    if (!(*o.epsilon > 0.0)) throw io::ConfigError("--epsilon", "must be positive");
    cfg.search.epsilon = *o.epsilon;
  }
  if (o.mode) {
    cfg.search.mode = *o.mode == "grid" ? ptgame::SearchConfig::Mode::grid : ptgame::SearchConfig::Mode::sampled;
  }
  return cfg;
}

void add_common(CLI::App* app, Overrides& o, bool search_flags) {
  app->add_option("--config", o.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  app->add_option("--out", o.out, "Output directory (overrides run.out)");
  if (!search_flags) return;
  app->add_option("--seed", o.seed, "RNG seed for sampled search");
  app->add_option("--epsilon", o.epsilon, "Target epsilon");
  app->add_option("--mode", o.mode, "Search mode")->check(CLI::IsMember({"grid", "sampled"}));
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

void print_summary(const ptgame::EquilibriumCertificate& cert) {
  std::cout << "passed: " << (cert.passed ? "true" : "false") << '\n';
  std::cout << "max_gap: " << io::format_real(cert.max_gap()) << '\n';
  std::cout << "threshold: " << io::format_real(cert.threshold()) << '\n';
  for (std::size_t i = 0; i < cert.players.size(); ++i) {
    std::cout << "player." << i << ".gap: " << io::format_real(cert.players[i].gap) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prospect-theory stochastic game solver"};
  app.require_subcommand(1);

  Overrides solve_o, certify_o, marg_o, bound_o;
  auto* solve = app.add_subcommand("solve", "Search for a certified Markov epsilon-equilibrium");
  add_common(solve, solve_o, true);

  std::string profile_path;
  auto* certify = app.add_subcommand("certify", "Certify a supplied Markov profile");
  add_common(certify, certify_o, true);
  certify->add_option("--profile", profile_path, "Profile CSV (player,stage,state,action,probability)")
      ->required()
      ->check(CLI::ExistingFile);

  std::string strategy_path;
  auto* marginals = app.add_subcommand("marginals", "Write the marginal tables induced by a profile");
  add_common(marginals, marg_o, false);
  marginals->add_option("--strategy", strategy_path, "Profile CSV")->required()->check(CLI::ExistingFile);

  std::string grid_config;
  std::string grid_out = "game.json";
  auto* build = app.add_subcommand("build-smartgrid", "Export a prosumer game in the generic game format");
  build->add_option("--config", grid_config, "Config with a 'smartgrid' section (default: simulation setup)")
      ->check(CLI::ExistingFile);
  build->add_option("--out", grid_out, "Output game file");

  double lipschitz_c = 1.0;
  auto* bound = app.add_subcommand("bound", "Print truncation horizon, delta and truncation bounds");
  add_common(bound, bound_o, true);
  bound->add_option("--lipschitz", lipschitz_c, "Lipschitz constant C >= 1 of the weighting functions");

  CLI11_PARSE(app, argc, argv);

  try {
    apply_thread_env();

    if (*solve) {
      const auto cfg = load_with_overrides(solve_o);
      const auto outcome = io::run_solve(cfg);
      if (outcome.certificate) print_summary(*outcome.certificate);
      if (outcome.exit_code != 0) std::cerr << "search failed: " << outcome.message << '\n';
      std::cout << "artifacts: " << cfg.out_dir.string() << '\n';
      return outcome.exit_code == 0 ? kExitOk : kExitFailed;
    }

    if (*certify) {
      const auto cfg = load_with_overrides(certify_o);
      auto in = open_input(profile_path);
      const auto profile = io::read_profile_csv(in, *cfg.game);
      const auto cert = io::run_certify(cfg, profile);
      print_summary(cert);
      return cert.passed ? kExitOk : kExitFailed;
    }

    if (*marginals) {
      const auto cfg = load_with_overrides(marg_o);
      auto in = open_input(strategy_path);
      const auto profile = io::read_profile_csv(in, *cfg.game);
      const auto rho = ptgame::profile_marginals(*cfg.game, profile, cfg.x, profile.front().horizon());
      if (marg_o.out.empty()) {
        io::write_marginals_csv(std::cout, rho);
      } else {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream out(cfg.out_dir / "marginals.csv", std::ios::binary);
        io::write_marginals_csv(out, rho);
        std::cout << "wrote " << (cfg.out_dir / "marginals.csv").string() << '\n';
      }
      return kExitOk;
    }

    if (*build) {
      ptgame::GameSpec spec;
      if (grid_config.empty()) {
        spec = ptgame::smartgrid::build_simulation_game();
      } else {
        const auto cfg = io::load_config(grid_config);
        if (cfg.source != io::RunConfig::Source::smartgrid) {
          throw io::ConfigError("smartgrid", "config has no 'smartgrid' section");
        }
        spec = cfg.spec;
      }
      const auto game = ptgame::validate_game(spec);
      std::ofstream out(grid_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + grid_out);
      out << io::game_to_json(game);
      std::cout << "wrote " << grid_out << '\n';
      return kExitOk;
    }

    if (*bound) {
      const auto cfg = load_with_overrides(bound_o);
      std::cout << io::bound_report(*cfg.game, cfg.search.epsilon, lipschitz_c);
      return kExitOk;
    }
  } catch (const io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ptgame::GameValidationError& e) {
    std::cerr << "invalid game: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
