#include <filesystem>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "choqlab/errors.hpp"
#include "commands.hpp"

using namespace choq;

int main(int argc, char** argv) {
  CLI::App app{"choqlab: variational experiments for a quasilinear Choquard problem"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;

  using Fn = int (*)(const cli::Context&);
  const std::map<std::string, std::pair<Fn, const char*>> commands = {
      {"verify", {cli::cmd_verify, "check the structural hypotheses; writes axioms.json"}},
      {"constants", {cli::cmd_constants, "sharp constants, extremality and bubble asymptotics; writes constants.json"}},
      {"threshold", {cli::cmd_threshold, "cutoff-bubble energy against c*_inf; writes threshold.json"}},
      {"ground-state",
       {cli::cmd_ground_state, "Nehari descent; writes ground_state.csv, iterations.csv, decay.json, lemma45.json"}},
      {"translate", {cli::cmd_translate, "translated ground-state competitors; writes lemma52.json"}},
      {"energy-curve", {cli::cmd_energy_curve, "energy along a ray t -> J(t u); writes curve.csv"}},
  };
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (created if missing)");
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--threads", threads, "worker threads for kernel tables")->check(CLI::Range(1, 256));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    cli::Context ctx{RunConfig::load(config_path), out_dir, threads};
    if (seed) ctx.config.seed = *seed;
    std::filesystem::create_directories(out_dir);
    const std::string name = app.get_subcommands().front()->get_name();
    return commands.at(name).first(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DegenerateDirection& e) {
    std::cerr << "degenerate direction: " << e.what() << '\n';
    return 2;
  } catch (const UnverifiedHypothesis& e) {
    std::cerr << "unverified hypothesis: " << e.what() << '\n';
    return 1;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
