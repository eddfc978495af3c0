// dressed-thermo: command-line front end for the DS-ODMR thermometry toolkit.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dthermo/config.hpp"
#include "dthermo/scenarios.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "scenario configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "output directory (default from config or ./out_<cmd>)");
  cmd->add_option("--seed", opts.seed, "override the config seed")
      ->each([&opts](const std::string&) { opts.seed_given = true; });
  cmd->add_option("--threads", opts.threads,
                  "worker threads (default: DRESSED_THERMO_THREADS or hardware)");
}

int run(const std::string& command, const CommonOpts& opts) {
  namespace cfgns = dthermo::config;
  try {
    dthermo::scenarios::Context ctx;
    ctx.cfg = cfgns::Config::parse_file(opts.config_path);
    ctx.threads = opts.threads;
    ctx.seed = opts.seed_given
                   ? opts.seed
                   : static_cast<std::uint64_t>(ctx.cfg.get_int("", "seed", 0));
    std::string out = !opts.out_dir.empty()
                          ? opts.out_dir
                          : ctx.cfg.get_string("", "out_dir", "out_" + command);
    ctx.out_dir = out;
    dthermo::scenarios::run_command(command, ctx);
    return 0;
  } catch (const cfgns::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dressed-spin-state NV thermometry simulation toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string chosen;
  for (const char* name : {"spectrum", "robustness", "thermal", "time-resolved"}) {
    CLI::App* cmd = app.add_subcommand(name);
    add_common(cmd, opts);
    cmd->callback([&chosen, name] { chosen = name; });
  }
  app.get_subcommand("spectrum")->description("DS-ODMR spectrum and Lorentzian fit");
  app.get_subcommand("robustness")->description("field-robustness line scan or (B, theta) map");
  app.get_subcommand("thermal")->description("2D heat-diffusion run with probe traces");
  app.get_subcommand("time-resolved")->description("pump-probe photon pipeline to dT(t)");

  CLI11_PARSE(app, argc, argv);
  return run(chosen, opts);
}
