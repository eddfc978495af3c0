#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dthermo/lindblad.hpp"
#include "dthermo/spin_model.hpp"

// Synthesis and analysis of dressed-state cw-ODMR spectra: center-frequency
// sweeps of the two-tone drive, Lorentzian fits, and the three-point and
// six-point shift/temperature extraction formulas.
namespace dthermo::odmr {

struct SweepConfig {
  std::vector<double> f_grid;        // common center frequencies, MHz, strictly increasing
  spin::DriveParams drive;           // fixes the tone splitting omega2 - omega1
  lindblad::CollapseSet collapse;
  lindblad::ReadoutModel readout;

  void validate() const;
};

// grid of `points` frequencies spanning f_avg +- span/2; span defaults to
// 3x the power-broadened linewidth estimate when not given
SweepConfig make_sweep(const spin::DriveParams& drive, const lindblad::CollapseSet& collapse,
                       const lindblad::ReadoutModel& readout, int points = 121,
                       double span_mhz = 0.0);

struct LorentzianFit {
  double f_avg = 0.0;         // MHz
  double gamma = 0.0;         // full linewidth, MHz
  double c0 = 0.0;            // contrast
  double baseline = 0.0;      // counts/s
  double residual_rms = 0.0;  // counts/s
  bool converged = false;
  int iterations = 0;
};

// dip model: baseline * (1 - c0 / (1 + ((f - f_avg)/(gamma/2))^2))
double lorentzian_dip(double f, const LorentzianFit& p);

struct Spectrum {
  std::vector<double> f_mhz;
  std::vector<double> pl_cps;
  std::optional<LorentzianFit> fit;
};

// steady-state PL for each center frequency; the sweep offset enters the
// dressed Hamiltonian through delta_D, environmental shifts through `env`
Spectrum simulate_spectrum(const spin::NVParams& nv, const spin::FieldVector& b,
                           const spin::RawDetuning& env, const SweepConfig& cfg);

// PL at a single center frequency (same model as simulate_spectrum)
double spectrum_point(const spin::NVParams& nv, const spin::FieldVector& b,
                      const spin::RawDetuning& env, const SweepConfig& cfg, double f_mhz);

// single-microwave reference: only the upper tone drives, the lower level
// stays as a detuned spectator; used for linewidth/contrast comparisons
Spectrum simulate_single_tone(const spin::NVParams& nv, const spin::FieldVector& b,
                              const SweepConfig& cfg);

// Levenberg-damped least squares fit of the dip model
LorentzianFit fit_lorentzian(const Spectrum& s);

// Resonance shift from PL sampled at f_B, f_E (inflection points) and the
// off-resonant background p0. Signs are fixed so that a dip moving up in
// frequency gives a positive shift; for a PL dip this is
//   (pB - pE) / (2 p0 - pB - pE) * Gamma/sqrt(3).
double three_point_shift(double p_b, double p_e, double p_0, double gamma);

struct SixPointSet {
  std::array<double, 6> freqs{};  // f_A .. f_F, MHz
  double d_omega = 0.0;           // MHz
  double gamma_ref = 0.0;         // linewidth used for placement, MHz
};

SixPointSet six_point_frequencies(double f_avg, double gamma, double d_omega);

// Temperature change from the six PL samples p_A..p_F. The slope is
// re-measured from the side points each shot:
//   dT = (pB - pE) / ((pA - pC) - (pD - pF)) * 2 d_omega / (dD/dT).
// A positive D(T) shift on a PL dip yields a positive dT with this grouping.
double six_point_temperature(const std::array<double, 6>& p, double d_omega, double dd_dt);

// shot-noise-limited sensitivity 0.77 * Gamma / (|dD/dT| C0 sqrt(R)), K/sqrt(Hz)
double shot_noise_sensitivity(double gamma, double c0, double r_cps, double dd_dt);

struct RobustnessCell {
  double b_mag = 0.0;              // G
  double theta = 0.0;              // rad
  double slope_khz_per_g = 0.0;    // d f_avg / d|B| at delta|B| = 0
  bool valid = true;
  std::string reason;              // set when the cell was skipped
};

struct RobustnessMap {
  std::vector<double> b_grid;      // G
  std::vector<double> theta_grid;  // rad
  std::vector<RobustnessCell> cells;  // row-major, theta outer, b inner
  double h_g = 0.2;                // central-difference step used
};

// three-point field sensitivity of the dressed resonance at one operating point
double dressed_slope(const spin::NVParams& nv, const spin::FieldVector& b, double omega,
                     const lindblad::CollapseSet& collapse, const lindblad::ReadoutModel& readout,
                     double h_g = 0.2, int fit_points = 121);

// central-difference slope of the upper bare transition, MHz/G
double bare_slope(const spin::NVParams& nv, const spin::FieldVector& b, double h_g = 0.2);

RobustnessMap field_robustness_map(const spin::NVParams& nv, double omega,
                                   const lindblad::CollapseSet& collapse,
                                   const lindblad::ReadoutModel& readout,
                                   const std::vector<double>& b_grid,
                                   const std::vector<double>& theta_grid, double h_g = 0.2,
                                   unsigned threads = 0);

}  // namespace dthermo::odmr
