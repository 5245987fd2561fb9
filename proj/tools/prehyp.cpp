#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "prehyp/cli/config.hpp"
#include "prehyp/cli/runner.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitTolerance = 2;
constexpr int kExitInternal = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prehyp: complementary pairs of first-order operators on 1+1 spacetimes"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::string target;

  for (const std::string& name : prehyp::cli::subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--seed", seed, "seed for randomized probes (overrides checks.seed)");
    if (name == "convergence") {
      sub->add_option("target", target, "subcommand to refine")
          ->required()
          ->check(CLI::IsMember(prehyp::cli::convergence_targets()));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    const prehyp::cli::ScenarioConfig cfg = prehyp::cli::load_config(config_path);
    std::optional<std::string> tgt;
    if (subcommand == "convergence") tgt = target;
    const prehyp::cli::RunResult r = prehyp::cli::run(subcommand, tgt, cfg, seed);
    prehyp::cli::write_outputs(r, out_dir.value_or(cfg.output_directory));
    std::cout << subcommand << (tgt ? " " + *tgt : std::string()) << ": " << (r.pass ? "pass" : "FAIL") << '\n';
    return r.pass ? 0 : kExitTolerance;
  } catch (const prehyp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const prehyp::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
