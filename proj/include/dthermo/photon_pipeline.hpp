#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "dthermo/odmr_analysis.hpp"

// Synthetic pump-probe photon streams and their reduction to temperature
// traces: the six-slot frequency-modulation cycle, dead-time discard,
// delay stacking, box averaging and six-point conversion.
namespace dthermo::photon {

struct TimingConfig {
  double cycle_us = 60.0;        // full FM cycle
  double slot_us = 10.0;         // dwell per center frequency
  double bin_ns = 16.0;          // accumulation bin
  double dead_us = 4.0;          // discarded at each slot start (rise time 3.5 us)
  double heat_offset_us = 7.0;   // heating pulse trigger within each slot
  double heat_duration_us = 3.0;
  double heat_period_us = 10.0;  // one pulse per slot reconciles the 100 kHz repetition
  int box = 3;                   // box-average width in bins

  void validate() const;
  int bins_per_slot() const { return static_cast<int>(slot_us * 1000.0 / bin_ns + 0.5); }
  int dead_bins() const { return static_cast<int>(dead_us * 1000.0 / bin_ns + 0.5); }
};

// binned photon counts over the six-slot cycle, accumulated n times
struct TagStream {
  TimingConfig timing;
  std::uint64_t n = 1;       // accumulation count folded into the bin means
  std::uint64_t seed = 0;    // 0 when not synthetic
  // counts[cycle][slot][bin]
  std::vector<std::array<std::vector<std::uint64_t>, 6>> cycles;

  int bins() const { return cycles.empty() ? 0 : static_cast<int>(cycles[0][0].size()); }
};

// expected PL rate (counts/s) of channel `slot` at temperature shift dT
using ResponseFn = std::function<double(int slot, double dt_k)>;

// Lorentzian curve whose center tracks dD/dT * dT; the analytic oracle model
ResponseFn lorentzian_response(const odmr::LorentzianFit& fit, const odmr::SixPointSet& six,
                               double dd_dt);

// full Lindblad steady-state response including a static field detuning; this
// is what the delta|B| systematic-error studies require, since a shifted
// Lorentzian cannot represent the dark-state coupling
ResponseFn lindblad_response(const spin::NVParams& nv, const spin::FieldVector& b,
                             double db_static_g, const odmr::SweepConfig& cfg,
                             const odmr::SixPointSet& six);

// Draw one accumulated stream: for each slot and bin the expected counts are
// rate * bin * n and the sample is Poisson (or the exact mean when
// poisson = false, the n -> infinity limit). Deterministic in (seed, slot, bin),
// independent of evaluation order and of the delta|B| applied to the response.
TagStream synthesize_stream(const std::function<double(double)>& dt_of_us,
                            const ResponseFn& rate_cps, const TimingConfig& timing,
                            std::uint64_t n, std::uint64_t seed, int ncycles = 1,
                            bool poisson = true);

// drop the dead-time bins at each slot start
TagStream remove_dead_time(const TagStream& raw, const TimingConfig& timing);

// per-frequency counts grouped by delay within the heat period, summed over
// cycles; delay origin at the heat pulse trigger (negative = before the pulse)
struct StackedCounts {
  TimingConfig timing;
  std::uint64_t n = 1;
  std::uint64_t cycles_summed = 1;
  std::vector<double> delay_us;                 // live bins, contiguous in time
  std::array<std::vector<double>, 6> counts;
};

StackedCounts stack_by_delay(const TagStream& clean, const TimingConfig& timing);

struct TemperatureTrace {
  std::vector<double> delay_ns;
  std::vector<double> dt_k;          // NaN where flagged
  std::vector<std::uint8_t> flag;    // 1 = unstable six-point denominator
  double resolution_ns = 48.0;
};

// box-average `box` bins per channel and apply the six-point conversion at
// box stride; denominators below flag_sigma standard deviations of their own
// shot noise are flagged and carried as missing
TemperatureTrace to_temperature(const StackedCounts& st, const odmr::SixPointSet& six,
                                double dd_dt, const TimingConfig& timing,
                                double flag_sigma = 5.0);

struct PipelineStats {
  double rms_k = 0.0;             // over the pre-heating window
  double snr = 0.0;               // amplitude / rms
  double sensitivity = 0.0;       // rms * sqrt(per-point integration), K/sqrt(Hz)
  double amplitude_k = 0.0;       // plateau mean - pre-heating mean
  double flag_rate = 0.0;         // flagged fraction of the whole trace
  int window_points = 0;
};

// window/plateau bounds in ns relative to the heat trigger; integration_s is
// the per-point photon integration time (6 slots x n x box x bin)
PipelineStats pipeline_stats(const TemperatureTrace& trace, double window_lo_ns,
                             double window_hi_ns, double plateau_lo_ns, double plateau_hi_ns,
                             double integration_s);

double point_integration_s(const TimingConfig& timing, std::uint64_t n);

// stream file format (documented in the README, byte-exact):
//   line 1: "dressed-thermo-tagstream v1"
//   line 2: "cycle_us slot_us bin_ns dead_us heat_offset_us heat_duration_us heat_period_us box"
//   line 3: "n seed ncycles bins"
//   then ncycles * 6 lines of whitespace-separated bin counts, slot-major
void write_tag_stream(const std::filesystem::path& path, const TagStream& s);
TagStream read_tag_stream(const std::filesystem::path& path);

}  // namespace dthermo::photon
