#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dthermo/odmr_analysis.hpp"
#include "dthermo/rng.hpp"

using namespace dthermo;
using odmr::LorentzianFit;
using odmr::Spectrum;

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

spin::NVParams nv_default() { return {}; }

struct Setup {
  spin::NVParams nv;
  spin::FieldVector field;
  spin::DriveParams drive;
  lindblad::CollapseSet collapse{10.0, spin::Basis::Dressed};
  lindblad::ReadoutModel readout{1e6, 0.2};
  odmr::SweepConfig cfg;
};

Setup make_setup(double omega, double b_mag = 47.0, double theta = 0.17453292519943295,
                 int points = 121) {
  Setup s;
  s.nv = nv_default();
  s.field = {b_mag, theta};
  s.drive = spin::resonant_drive(s.nv, s.field, omega);
  s.cfg = odmr::make_sweep(s.drive, s.collapse, s.readout, points);
  return s;
}

// analytic dip used as the independent oracle for the point methods
double dip(double f, double f_avg, double gamma, double c0 = 0.1, double base = 1.0) {
  double u = (f - f_avg) / (0.5 * gamma);
  return base * (1.0 - c0 / (1.0 + u * u));
}

int count_local_minima(const std::vector<double>& y) {
  int n = 0;
  for (std::size_t i = 1; i + 1 < y.size(); ++i)
    if (y[i] < y[i - 1] - 1e-9 && y[i] < y[i + 1] - 1e-9) ++n;
  return n;
}

}  // namespace

TEST_CASE("spectrum: single dip at zero field detuning, double dip when split") {
  Setup s = make_setup(0.95);
  Spectrum on_res = odmr::simulate_spectrum(s.nv, s.field, {}, s.cfg);
  CHECK(count_local_minima(on_res.pl_cps) == 1);
  std::size_t imin =
      std::min_element(on_res.pl_cps.begin(), on_res.pl_cps.end()) - on_res.pl_cps.begin();
  CHECK(std::abs(on_res.f_mhz[imin] - s.drive.f_avg()) < 1.0);

  // delta_B = 2.8 * 8 * cos(theta) ~ 22 MHz >> sqrt(2) Omega: well split
  spin::RawDetuning env;
  env.dbz = 8.0 * std::cos(s.field.theta);
  env.dbx = 8.0 * std::sin(s.field.theta);
  Spectrum split = odmr::simulate_spectrum(s.nv, s.field, env, s.cfg);
  CHECK(count_local_minima(split.pl_cps) == 2);
}

TEST_CASE("spectrum: vanishing drive gives a flat curve") {
  Setup s = make_setup(1e-3);
  Spectrum flat = odmr::simulate_spectrum(s.nv, s.field, {}, s.cfg);
  double lo = *std::min_element(flat.pl_cps.begin(), flat.pl_cps.end());
  double hi = *std::max_element(flat.pl_cps.begin(), flat.pl_cps.end());
  CHECK((hi - lo) / hi < 1e-6);
  LorentzianFit fit = odmr::fit_lorentzian(flat);
  CHECK((!fit.converged || fit.c0 < 1e-4));
}

TEST_CASE("spectrum: PL is invariant under a dBz sign flip") {
  Setup s = make_setup(0.95);
  spin::RawDetuning plus{0.0, 1.5, 0.0}, minus{0.0, -1.5, 0.0};
  Spectrum a = odmr::simulate_spectrum(s.nv, s.field, plus, s.cfg);
  Spectrum b = odmr::simulate_spectrum(s.nv, s.field, minus, s.cfg);
  for (std::size_t i = 0; i < a.pl_cps.size(); ++i)
    CHECK(std::abs(a.pl_cps[i] - b.pl_cps[i]) < 1e-8 * a.pl_cps[i]);
}

TEST_CASE("spectrum: double-drive dip is wider and deeper than the single-tone one") {
  Setup s = make_setup(0.95);
  LorentzianFit both = odmr::fit_lorentzian(odmr::simulate_spectrum(s.nv, s.field, {}, s.cfg));
  // the single-tone resonance sits at omega2, so recenter the sweep there
  odmr::SweepConfig single_cfg = s.cfg;
  for (auto& f : single_cfg.f_grid) f += s.drive.omega2 - s.drive.f_avg();
  LorentzianFit single = odmr::fit_lorentzian(odmr::simulate_single_tone(s.nv, s.field, single_cfg));
  REQUIRE(both.converged);
  REQUIRE(single.converged);
  CHECK(both.gamma > single.gamma);
  CHECK(both.c0 > single.c0);
}

TEST_CASE("fit recovers an exact synthetic Lorentzian to 1e-6 relative") {
  LorentzianFit truth{2870.0, 10.7, 0.1, 2.3e5, 0.0, true, 0};
  Spectrum s;
  for (int i = 0; i < 121; ++i) {
    double f = 2870.0 - 3.0 * 10.7 + i * (6.0 * 10.7 / 120.0);
    s.f_mhz.push_back(f);
    s.pl_cps.push_back(odmr::lorentzian_dip(f, truth));
  }
  LorentzianFit fit = odmr::fit_lorentzian(s);
  REQUIRE(fit.converged);
  CHECK(fit.f_avg == doctest::Approx(truth.f_avg).epsilon(1e-8));
  CHECK(fit.gamma == doctest::Approx(truth.gamma).epsilon(1e-6));
  CHECK(fit.c0 == doctest::Approx(truth.c0).epsilon(1e-6));
  CHECK(fit.baseline == doctest::Approx(truth.baseline).epsilon(1e-6));
  CHECK(fit.residual_rms < 1e-6 * truth.baseline);
}

TEST_CASE("fit under noise: f_avg stays within Gamma/100 rms over 100 seeds") {
  LorentzianFit truth{2870.0, 10.7, 0.1, 1.0, 0.0, true, 0};
  const double depth = truth.baseline * truth.c0;
  double sq_err = 0.0;
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    rng::SplitMix64 g(rng::substream(99, seed, 0));
    Spectrum s;
    for (int i = 0; i < 121; ++i) {
      double f = 2870.0 - 32.1 + i * (64.2 / 120.0);
      s.f_mhz.push_back(f);
      // 1% additive noise relative to the dip depth being located
      s.pl_cps.push_back(odmr::lorentzian_dip(f, truth) + 0.01 * depth * rng::normal(g));
    }
    LorentzianFit fit = odmr::fit_lorentzian(s);
    if (!fit.converged) { ++failures; continue; }
    sq_err += (fit.f_avg - truth.f_avg) * (fit.f_avg - truth.f_avg);
  }
  CHECK(failures == 0);
  CHECK(std::sqrt(sq_err / 100.0) < truth.gamma / 100.0);
}

TEST_CASE("fit flags a flat spectrum") {
  Spectrum s;
  for (int i = 0; i < 40; ++i) {
    s.f_mhz.push_back(2850.0 + i);
    s.pl_cps.push_back(5e5);
  }
  LorentzianFit fit = odmr::fit_lorentzian(s);
  CHECK((!fit.converged || fit.c0 < 1e-4));
}

TEST_CASE("three-point: symmetric samples give zero shift") {
  CHECK(odmr::three_point_shift(0.93, 0.93, 1.0, 10.7) == 0.0);
}

TEST_CASE("three-point: recovers a +0.5 MHz shift on the analytic dip") {
  const double gamma = 10.7, shift = 0.5;
  double f_b = -gamma / (2.0 * kSqrt3), f_e = gamma / (2.0 * kSqrt3), f_0 = -5.0 * gamma;
  double rec = odmr::three_point_shift(dip(f_b, shift, gamma), dip(f_e, shift, gamma),
                                       dip(f_0, shift, gamma), gamma);
  CHECK(std::abs(rec - shift) < 0.05);
}

TEST_CASE("three-point: slope linearity within Gamma/10 and the quadratic error bound") {
  const double gamma = 10.7;
  double f_b = -gamma / (2.0 * kSqrt3), f_e = gamma / (2.0 * kSqrt3), f_0 = -5.0 * gamma;
  auto recover = [&](double d) {
    return odmr::three_point_shift(dip(f_b, d, gamma), dip(f_e, d, gamma), dip(f_0, d, gamma),
                                   gamma);
  };
  for (double d = -gamma / 10.0; d <= gamma / 10.0; d += gamma / 50.0) {
    if (std::abs(d) < 1e-12) continue;
    CHECK(std::abs(recover(d) - d) / std::abs(d) < 0.05);
  }
  // quadratic bound, away from the tiny-shift regime where the residual
  // linear miscalibration from the finite f_0 background dominates
  for (double d = gamma / 50.0; d <= gamma / 5.0; d += gamma / 50.0) {
    CHECK(std::abs(recover(d) - d) <= 2.0 * (d / gamma) * (d / gamma) * gamma);
    CHECK(std::abs(recover(-d) + d) <= 2.0 * (d / gamma) * (d / gamma) * gamma);
  }
}

TEST_CASE("three-point rejects samples at the background level") {
  CHECK_THROWS_AS((void)odmr::three_point_shift(1.0, 1.0, 1.0, 10.7), std::invalid_argument);
}

TEST_CASE("six-point frequencies reproduce the published placement") {
  auto s = odmr::six_point_frequencies(2870.0, 11.5, 1.0);
  CHECK(s.freqs[1] == doctest::Approx(2870.0 - 11.5 / (2.0 * kSqrt3)).epsilon(1e-14));
  CHECK(s.freqs[1] == doctest::Approx(2866.680).epsilon(1e-6));
  CHECK(s.freqs[4] == doctest::Approx(2873.320).epsilon(1e-6));
  CHECK(s.freqs[0] == doctest::Approx(s.freqs[1] - 1.0));
  CHECK(s.freqs[2] == doctest::Approx(s.freqs[1] + 1.0));
  CHECK(s.freqs[3] == doctest::Approx(s.freqs[4] - 1.0));
  CHECK(s.freqs[5] == doctest::Approx(s.freqs[4] + 1.0));

  auto t = odmr::six_point_frequencies(0.0, 10.7, 1.0);
  CHECK(t.freqs[4] - t.freqs[1] == doctest::Approx(10.7 / kSqrt3).epsilon(1e-12));
  CHECK(t.freqs[4] - t.freqs[1] == doctest::Approx(6.178).epsilon(1e-4));

  CHECK_THROWS_AS((void)odmr::six_point_frequencies(2870.0, 11.5, 0.0), std::invalid_argument);
}

TEST_CASE("six-point temperature: oracle recovery on the analytic dip") {
  const double gamma = 11.5, d_omega = 1.0, dd_dt = 0.074;
  auto six = odmr::six_point_frequencies(0.0, gamma, d_omega);
  auto sample = [&](double dt_k) {
    std::array<double, 6> p{};
    for (int i = 0; i < 6; ++i) p[i] = dip(six.freqs[i], dd_dt * dt_k, gamma);
    return p;
  };

  // pB = pE at zero shift: exactly 0 K
  CHECK(odmr::six_point_temperature(sample(0.0), d_omega, dd_dt) == 0.0);

  // 74 kHz injected shift = 1 K within 0.05 K
  double one_k = odmr::six_point_temperature(sample(1.0), d_omega, dd_dt);
  CHECK(std::abs(one_k - 1.0) < 0.05);

  // 5 K survives the Lorentzian curvature within 5%
  double five_k = odmr::six_point_temperature(sample(5.0), d_omega, dd_dt);
  CHECK(std::abs(five_k - 5.0) / 5.0 < 0.05);

  // sign convention: negative dD/dT with a positive temperature step still
  // returns a positive temperature
  auto sample_neg = [&](double dt_k) {
    std::array<double, 6> p{};
    for (int i = 0; i < 6; ++i) p[i] = dip(six.freqs[i], -dd_dt * dt_k, gamma);
    return p;
  };
  CHECK(odmr::six_point_temperature(sample_neg(2.0), d_omega, -dd_dt) ==
        doctest::Approx(odmr::six_point_temperature(sample(2.0), d_omega, dd_dt)));
}

TEST_CASE("six-point temperature is invariant under uniform count scaling") {
  const double gamma = 11.5, d_omega = 1.0, dd_dt = 0.074;
  auto six = odmr::six_point_frequencies(0.0, gamma, d_omega);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> scale(0.1, 50.0), shift(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    double dt_k = shift(gen);
    std::array<double, 6> p{};
    for (int k = 0; k < 6; ++k) p[k] = dip(six.freqs[k], dd_dt * dt_k, gamma);
    double base = odmr::six_point_temperature(p, d_omega, dd_dt);
    double a = scale(gen);
    std::array<double, 6> q{};
    for (int k = 0; k < 6; ++k) q[k] = a * p[k];
    CHECK(odmr::six_point_temperature(q, d_omega, dd_dt) ==
          doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("six-point temperature rejects a vanishing slope denominator") {
  std::array<double, 6> flat{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS((void)odmr::six_point_temperature(flat, 1.0, 0.074), std::invalid_argument);
}

TEST_CASE("shot-noise sensitivity formula") {
  // scaling: doubling R improves eta by sqrt(2)
  double eta1 = odmr::shot_noise_sensitivity(11.5, 0.1, 1e5, 0.074);
  double eta2 = odmr::shot_noise_sensitivity(11.5, 0.1, 2e5, 0.074);
  CHECK(eta1 / eta2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // the paper-scale ensemble combination back-solves to 2.5 K/sqrt(Hz)
  double r = std::pow(0.77 * 11.5 / (0.074 * 2.5 * 0.1), 2);
  CHECK(odmr::shot_noise_sensitivity(11.5, 0.1, r, 0.074) == doctest::Approx(2.5).epsilon(1e-12));

  // the constant matches 4/(3 sqrt(3)) to 0.1%
  CHECK(std::abs(0.77 - 4.0 / (3.0 * kSqrt3)) / (4.0 / (3.0 * kSqrt3)) < 1e-3);

  // sign of dD/dT does not flip the magnitude
  CHECK(odmr::shot_noise_sensitivity(11.5, 0.1, 1e5, -0.074) == doctest::Approx(eta1));
}

TEST_CASE("robustness: axial field has zero slope up to solver noise") {
  Setup s = make_setup(0.95, 47.0, 0.0, 61);
  double slope = odmr::dressed_slope(s.nv, s.field, 0.95, s.collapse, s.readout, 0.2, 61);
  CHECK(std::abs(slope) * 1e3 < 0.01);  // kHz/G
}

TEST_CASE("robustness map marks cells where the drive cannot split the tones") {
  Setup s = make_setup(0.95);
  // at 1 G the Zeeman splitting 2.8 MHz is below Omega = 5
  auto map = odmr::field_robustness_map(s.nv, 5.0, s.collapse, s.readout, {1.0, 47.0},
                                        {0.17453292519943295}, 0.2, 1);
  REQUIRE(map.cells.size() == 2);
  CHECK_FALSE(map.cells[0].valid);
  CHECK(map.cells[0].reason.find("gamma_e*Bz") != std::string::npos);
  CHECK(map.cells[1].valid);
}

TEST_CASE("bare slope at a small angle approaches gamma_e") {
  auto nv = nv_default();
  double slope = odmr::bare_slope(nv, {47.0, 0.17453292519943295});
  CHECK(slope == doctest::Approx(2.769).epsilon(1e-3));
  double axial = odmr::bare_slope(nv, {47.0, 0.0});
  CHECK(axial == doctest::Approx(2.8).epsilon(1e-9));
}
