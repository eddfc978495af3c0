#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dthermo/config.hpp"
#include "dthermo/lindblad.hpp"
#include "dthermo/odmr_analysis.hpp"
#include "dthermo/photon_pipeline.hpp"
#include "dthermo/spin_model.hpp"
#include "dthermo/thermal_sim.hpp"

// Scenario drivers behind the CLI subcommands. Each one reads a validated
// Config, runs the corresponding experiment at desk scale and writes CSV/JSON
// results into out_dir. Data files are byte-reproducible for a fixed
// (config, seed); wall-clock information goes only into metadata.json.
namespace dthermo::scenarios {

struct Context {
  config::Config cfg;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;     // resolved: CLI override or config or 0
  unsigned threads = 0;       // 0 = resolve from env/hardware
};

// config section -> domain object builders (defaults documented in README)
spin::NVParams nv_from(const config::Config& cfg);
spin::FieldVector field_from(const config::Config& cfg);
lindblad::CollapseSet collapse_from(const config::Config& cfg);
lindblad::ReadoutModel readout_from(const config::Config& cfg);
photon::TimingConfig timing_from(const config::Config& cfg);

void run_spectrum(const Context& ctx);
void run_robustness(const Context& ctx);
void run_thermal(const Context& ctx);
void run_time_resolved(const Context& ctx);

// validates the config for `command` and dispatches; creates out_dir
void run_command(const std::string& command, const Context& ctx);

}  // namespace dthermo::scenarios
