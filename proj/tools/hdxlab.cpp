#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hdx/errors.hpp"
#include "hdx/experiments.hpp"

namespace {

int fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << hdx::json{{"error", kind}, {"message", message}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hdxlab: expander, unique games and direct product experiments"};
  app.require_subcommand(1);
  std::string config_path;
  uint64_t seed = 0;
  std::string out;
  int jobs = 0;
  bool print_config = false;
  app.add_option("--config", config_path, "JSON config file (merged over defaults)");
  app.add_option("--seed", seed, "override config seed");
  app.add_option("--out", out, "override output directory");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--print-config", print_config, "print the merged config to stdout before running");

  struct Cmd {
    const char* name;
    const char* help;
    hdx::Outputs (*run)(const hdx::json&);
  };
  const Cmd cmds[] = {
      {"build", "construct distributions/graphs and report sizes", hdx::cmd_build},
      {"spectra", "spectral analyses", hdx::cmd_spectra},
      {"ug", "plant and solve unique games over a delta grid", hdx::cmd_ug},
      {"dpt", "direct product tester sweeps", hdx::cmd_dpt},
      {"lift", "tripartite / partite lift solver runs", hdx::cmd_lift},
  };
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    // Options may also follow the subcommand.
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(1, "usage", e.what());
  }

  try {
    hdx::json config = config_path.empty() ? hdx::default_config() : hdx::load_config(config_path);
    if (app.count("--seed")) config["seed"] = seed;
    if (app.count("--out")) config["out"] = out;
    if (app.count("--jobs")) config["jobs"] = jobs;
    if (print_config) std::cout << config.dump(2) << "\n";
    for (const auto& c : cmds) {
      if (!app.got_subcommand(c.name)) continue;
      hdx::Outputs outputs = c.run(config);
      const std::string dir = config.at("out");
      hdx::write_outputs(dir, outputs);
      for (const auto& [name, content] : outputs) std::cout << dir << "/" << name << "\n";
    }
  } catch (const hdx::BudgetExceeded& e) {
    return fail(2, "budget", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(1, "invalid", e.what());
  } catch (const std::exception& e) {
    return fail(1, "error", e.what());
  }
  return 0;
}
