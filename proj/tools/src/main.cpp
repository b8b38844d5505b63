#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace fracpoint::app;

  CLI::App app{"Spectral-Galerkin optimal control of fractional semilinear elliptic equations"};
  app.require_subcommand(1);

  std::string config_path;
  CommandOptions options;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string control_path;

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"solve-state", "Solve the state equation at the initial control"},
      {"solve-adjoint", "Solve the adjoint equation at the initial control"},
      {"optimize", "Run projected gradient descent and write the optimality report"},
      {"verify", "Run the oracle verification tier"},
      {"report", "Optimality report for a given control"},
  };
  for (const auto& spec : specs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("--config", config_path, "TOML run description")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides [output] dir)");
    sub->add_option("--seed", seed, "Random seed (overrides [optimizer] seed)");
    sub->add_flag("--quiet", options.quiet, "Only print warnings and errors");
    if (std::string_view(spec.name) == "report") {
      sub->add_option("--control", control_path, "Control grid CSV (default: the projected initial control)")
          ->check(CLI::ExistingFile);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--out") > 0) options.out = out_dir;
  if (chosen->count("--seed") > 0) options.seed = seed;
  if (chosen->get_name() == "report" && chosen->count("--control") > 0) options.control = control_path;
  return run(chosen->get_name(), config_path, options, {std::cout, std::cerr});
}
