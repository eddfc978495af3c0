#include "dthermo/odmr_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dthermo/parallel.hpp"

namespace dthermo::odmr {

namespace {
constexpr double kSqrt3 = 1.7320508075688772;
}

void SweepConfig::validate() const {
  if (f_grid.size() < 2) throw std::invalid_argument("SweepConfig: need at least 2 grid points");
  for (std::size_t i = 1; i < f_grid.size(); ++i)
    if (f_grid[i] <= f_grid[i - 1])
      throw std::invalid_argument("SweepConfig: grid must be strictly increasing");
  if (!drive.valid)
    throw std::invalid_argument("SweepConfig: " + (drive.diagnostic.empty()
                                                       ? std::string("drive invalid")
                                                       : drive.diagnostic));
  collapse.validate();
  readout.validate();
}

SweepConfig make_sweep(const spin::DriveParams& drive, const lindblad::CollapseSet& collapse,
                       const lindblad::ReadoutModel& readout, int points, double span_mhz) {
  if (points < 7) throw std::invalid_argument("make_sweep: need at least 7 points");
  if (span_mhz <= 0.0) {
    // the fitted width of the double-resonance dip is
    // 2 sqrt(gamma_gl^2/4 + 4 Omega^2); span three of those
    double width = 2.0 * std::sqrt(0.25 * collapse.gamma_gl * collapse.gamma_gl +
                                   4.0 * drive.omega * drive.omega);
    span_mhz = 6.0 * width;
  }
  SweepConfig cfg;
  cfg.drive = drive;
  cfg.collapse = collapse;
  cfg.readout = readout;
  double f0 = drive.f_avg() - 0.5 * span_mhz;
  double df = span_mhz / (points - 1);
  cfg.f_grid.resize(points);
  for (int i = 0; i < points; ++i) cfg.f_grid[i] = f0 + i * df;
  return cfg;
}

double lorentzian_dip(double f, const LorentzianFit& p) {
  double u = (f - p.f_avg) / (0.5 * p.gamma);
  return p.baseline * (1.0 - p.c0 / (1.0 + u * u));
}

double spectrum_point(const spin::NVParams& nv, const spin::FieldVector& b,
                      const spin::RawDetuning& env, const SweepConfig& cfg, double f_mhz) {
  spin::DressedDetuning det = spin::dressed_detuning(nv, b, env);
  det.delta_d += cfg.drive.f_avg() - f_mhz;  // sweep offset
  spin::Matrix3 h = spin::dressed_hamiltonian(det, cfg.drive);
  lindblad::CollapseSet c = cfg.collapse;
  c.basis = spin::Basis::Dressed;
  auto rho = lindblad::steady_state(lindblad::build_liouvillian(h, c));
  return lindblad::pl_rate(rho, cfg.readout);
}

Spectrum simulate_spectrum(const spin::NVParams& nv, const spin::FieldVector& b,
                           const spin::RawDetuning& env, const SweepConfig& cfg) {
  cfg.validate();
  Spectrum s;
  s.f_mhz = cfg.f_grid;
  s.pl_cps.resize(cfg.f_grid.size());
  for (std::size_t i = 0; i < cfg.f_grid.size(); ++i)
    s.pl_cps[i] = spectrum_point(nv, b, env, cfg, cfg.f_grid[i]);
  return s;
}

Spectrum simulate_single_tone(const spin::NVParams& nv, const spin::FieldVector& b,
                              const SweepConfig& cfg) {
  cfg.validate();
  // rotating frame of one tone at frequency f: the driven |0>-|+1> pair plus
  // the idle |-1> level detuned by omega1 - f
  lindblad::CollapseSet c = cfg.collapse;
  c.basis = spin::Basis::Bare;
  Spectrum s;
  s.f_mhz = cfg.f_grid;
  s.pl_cps.resize(cfg.f_grid.size());
  for (std::size_t i = 0; i < cfg.f_grid.size(); ++i) {
    double f = cfg.f_grid[i];
    spin::Matrix3 h;
    h.basis = spin::Basis::Bare;
    h.m << cfg.drive.omega2 - f, cfg.drive.omega, 0.0,
           cfg.drive.omega, 0.0, 0.0,
           0.0, 0.0, cfg.drive.omega1 - f;
    auto rho = lindblad::steady_state(lindblad::build_liouvillian(h, c));
    s.pl_cps[i] = lindblad::pl_rate(rho, cfg.readout);
  }
  return s;
}

namespace {

struct FitWork {
  double base, c0, f0, gamma;
};

double chi2(const Spectrum& s, const FitWork& w) {
  LorentzianFit p{w.f0, w.gamma, w.c0, w.base, 0.0, false, 0};
  double acc = 0.0;
  for (std::size_t i = 0; i < s.f_mhz.size(); ++i) {
    double r = lorentzian_dip(s.f_mhz[i], p) - s.pl_cps[i];
    acc += r * r;
  }
  return acc;
}

}  // namespace

LorentzianFit fit_lorentzian(const Spectrum& s) {
  const std::size_t n = s.f_mhz.size();
  if (n < 7) throw std::invalid_argument("fit_lorentzian: need >= 7 points spanning the dip");

  // seeds: edge mean for the baseline, minimum for f_avg, half-depth crossing for gamma
  std::size_t edge = std::max<std::size_t>(1, n / 10);
  double base = 0.0;
  for (std::size_t i = 0; i < edge; ++i) base += s.pl_cps[i] + s.pl_cps[n - 1 - i];
  base /= 2.0 * edge;
  std::size_t imin = std::min_element(s.pl_cps.begin(), s.pl_cps.end()) - s.pl_cps.begin();
  double depth = base - s.pl_cps[imin];
  double half = base - 0.5 * depth;
  double lo = s.f_mhz.front(), hi = s.f_mhz.back();
  for (std::size_t i = imin; i-- > 0;)
    if (s.pl_cps[i] > half) { lo = s.f_mhz[i]; break; }
  for (std::size_t i = imin + 1; i < n; ++i)
    if (s.pl_cps[i] > half) { hi = s.f_mhz[i]; break; }

  FitWork w;
  w.base = base;
  w.f0 = s.f_mhz[imin];
  w.c0 = base > 0.0 ? std::max(depth / base, 1e-6) : 1e-6;
  w.gamma = std::max(hi - lo, 2.0 * (s.f_mhz[1] - s.f_mhz[0]));

  // Levenberg damping on the 4-parameter normal equations
  double lambda = 1e-3;
  double cost = chi2(s, w);
  int iter = 0;
  bool converged = false;
  for (; iter < 200; ++iter) {
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      double u = (s.f_mhz[i] - w.f0) / (0.5 * w.gamma);
      double den = 1.0 + u * u;
      double model = w.base * (1.0 - w.c0 / den);
      double r = model - s.pl_cps[i];
      Eigen::Vector4d j;
      j[0] = 1.0 - w.c0 / den;                                    // d/d base
      j[1] = -w.base / den;                                       // d/d c0
      j[2] = -w.base * w.c0 * 2.0 * u / (den * den) * 2.0 / w.gamma;   // d/d f0
      j[3] = -w.base * w.c0 * 2.0 * u * u / (den * den) / w.gamma;     // d/d gamma
      jtj += j * j.transpose();
      jtr += j * r;
    }
    Eigen::Matrix4d damped = jtj;
    for (int d = 0; d < 4; ++d) damped(d, d) += lambda * std::max(jtj(d, d), 1e-30);
    Eigen::Vector4d step = damped.ldlt().solve(-jtr);

    FitWork trial = w;
    trial.base += step[0];
    trial.c0 += step[1];
    trial.f0 += step[2];
    trial.gamma += step[3];
    if (trial.gamma <= 0.0) trial.gamma = 0.5 * w.gamma;

    double trial_cost = chi2(s, trial);
    if (trial_cost <= cost) {
      double rel = (cost - trial_cost) / std::max(cost, 1e-300);
      w = trial;
      cost = trial_cost;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (rel < 1e-12 || step.norm() < 1e-13) { converged = true; break; }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }

  LorentzianFit out;
  out.baseline = w.base;
  out.c0 = w.c0;
  out.f_avg = w.f0;
  out.gamma = std::abs(w.gamma);
  out.residual_rms = std::sqrt(cost / n);
  out.iterations = iter;
  // a vanishing contrast means there is no dip to locate
  out.converged = converged && out.c0 > 1e-6 && out.c0 < 1.0;
  return out;
}

double three_point_shift(double p_b, double p_e, double p_0, double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("three_point_shift: gamma must be > 0");
  double den = 2.0 * p_0 - p_b - p_e;
  if (std::abs(den) < 1e-12 * std::abs(p_0))
    throw std::invalid_argument("three_point_shift: samples at background level, denominator ~ 0");
  return (p_b - p_e) / den * gamma / kSqrt3;
}

SixPointSet six_point_frequencies(double f_avg, double gamma, double d_omega) {
  if (gamma <= 0.0) throw std::invalid_argument("six_point_frequencies: gamma must be > 0");
  if (d_omega <= 0.0 || d_omega >= 0.5 * gamma)
    throw std::invalid_argument("six_point_frequencies: need 0 < d_omega < gamma/2");
  const double off = gamma / (2.0 * kSqrt3);
  SixPointSet s;
  s.d_omega = d_omega;
  s.gamma_ref = gamma;
  s.freqs = {f_avg - off - d_omega, f_avg - off, f_avg - off + d_omega,
             f_avg + off - d_omega, f_avg + off, f_avg + off + d_omega};
  return s;
}

double six_point_temperature(const std::array<double, 6>& p, double d_omega, double dd_dt) {
  if (dd_dt == 0.0) throw std::invalid_argument("six_point_temperature: dd_dt must be nonzero");
  double num = p[1] - p[4];                          // pB - pE
  double den = (p[0] - p[2]) - (p[3] - p[5]);        // (pA - pC) - (pD - pF)
  double scale = 0.0;
  for (double v : p) scale += std::abs(v);
  if (std::abs(den) < 1e-12 * std::max(scale, 1e-300))
    throw std::invalid_argument("six_point_temperature: slope denominator below noise floor");
  return num / den * 2.0 * d_omega / dd_dt;
}

double shot_noise_sensitivity(double gamma, double c0, double r_cps, double dd_dt) {
  if (gamma <= 0.0 || c0 <= 0.0 || r_cps <= 0.0 || dd_dt == 0.0)
    throw std::invalid_argument("shot_noise_sensitivity: all arguments must be positive");
  return std::abs(0.77 / dd_dt * gamma / c0 / std::sqrt(r_cps));
}

double bare_slope(const spin::NVParams& nv, const spin::FieldVector& b, double h_g) {
  auto at = [&](double db) {
    spin::FieldVector f{b.b_mag + db, b.theta};
    return spin::transition_frequencies(spin::bare_hamiltonian(nv, f)).second;
  };
  return (at(h_g) - at(-h_g)) / (2.0 * h_g);
}

namespace {

// three-point f_avg shift at field detuning db along the existing direction
double shift_at_db(const spin::NVParams& nv, const spin::FieldVector& b, double db,
                   const SweepConfig& cfg, const LorentzianFit& ref) {
  spin::RawDetuning env;
  env.dbz = db * std::cos(b.theta);
  env.dbx = db * std::sin(b.theta);
  const double off = ref.gamma / (2.0 * kSqrt3);
  double p_b = spectrum_point(nv, b, env, cfg, ref.f_avg - off);
  double p_e = spectrum_point(nv, b, env, cfg, ref.f_avg + off);
  double p_0 = spectrum_point(nv, b, env, cfg, ref.f_avg - 5.0 * ref.gamma);
  return three_point_shift(p_b, p_e, p_0, ref.gamma);
}

}  // namespace

double dressed_slope(const spin::NVParams& nv, const spin::FieldVector& b, double omega,
                     const lindblad::CollapseSet& collapse, const lindblad::ReadoutModel& readout,
                     double h_g, int fit_points) {
  spin::DriveParams drive = spin::resonant_drive(nv, b, omega);
  if (!drive.valid) throw std::invalid_argument("dressed_slope: " + drive.diagnostic);
  SweepConfig cfg = make_sweep(drive, collapse, readout, fit_points);
  Spectrum ref = simulate_spectrum(nv, b, {}, cfg);
  LorentzianFit fit = fit_lorentzian(ref);
  if (!fit.converged) throw std::runtime_error("dressed_slope: reference fit did not converge");
  double plus = shift_at_db(nv, b, +h_g, cfg, fit);
  double minus = shift_at_db(nv, b, -h_g, cfg, fit);
  return (plus - minus) / (2.0 * h_g);
}

RobustnessMap field_robustness_map(const spin::NVParams& nv, double omega,
                                   const lindblad::CollapseSet& collapse,
                                   const lindblad::ReadoutModel& readout,
                                   const std::vector<double>& b_grid,
                                   const std::vector<double>& theta_grid, double h_g,
                                   unsigned threads) {
  RobustnessMap map;
  map.b_grid = b_grid;
  map.theta_grid = theta_grid;
  map.h_g = h_g;
  map.cells.resize(b_grid.size() * theta_grid.size());

  parallel_for(map.cells.size(), resolve_threads(threads), [&](std::size_t idx) {
    std::size_t it = idx / b_grid.size();
    std::size_t ib = idx % b_grid.size();
    RobustnessCell& cell = map.cells[idx];
    cell.b_mag = b_grid[ib];
    cell.theta = theta_grid[it];
    spin::FieldVector field{cell.b_mag, cell.theta};
    if (nv.gamma_e * field.bz() <= omega) {
      cell.valid = false;
      cell.reason = "gamma_e*Bz <= Omega: tones not independently addressable";
      return;
    }
    try {
      cell.slope_khz_per_g = 1e3 * dressed_slope(nv, field, omega, collapse, readout, h_g);
    } catch (const std::exception& e) {
      cell.valid = false;
      cell.reason = e.what();
    }
  });
  return map;
}

}  // namespace dthermo::odmr
