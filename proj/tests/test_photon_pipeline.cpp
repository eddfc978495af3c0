#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "dthermo/photon_pipeline.hpp"
#include "dthermo/rng.hpp"

using namespace dthermo;
using photon::TagStream;
using photon::TimingConfig;

namespace {

odmr::LorentzianFit oracle_fit() { return {2870.0, 11.5, 0.1, 1.65e6, 0.0, true, 0}; }

struct Pipe {
  TimingConfig timing;
  odmr::LorentzianFit fit = oracle_fit();
  odmr::SixPointSet six = odmr::six_point_frequencies(2870.0, 11.5, 1.0);
  double dd_dt = 0.074;
  photon::ResponseFn response = photon::lorentzian_response(fit, six, dd_dt);
};

std::function<double(double)> pulse_profile(double amp, double rise = 0.15) {
  return [amp, rise](double t_us) {
    if (t_us < 0.0) return 0.0;
    if (t_us < 3.0) return amp * (1.0 - std::exp(-t_us / rise));
    double peak = amp * (1.0 - std::exp(-3.0 / rise));
    return peak * std::exp(-(t_us - 3.0) / rise);
  };
}

}  // namespace

TEST_CASE("timing config invariants") {
  TimingConfig t;
  t.validate();
  CHECK(t.bins_per_slot() == 625);
  CHECK(t.dead_bins() == 250);

  TimingConfig bad_cycle = t;
  bad_cycle.cycle_us = 50.0;
  CHECK_THROWS_AS(bad_cycle.validate(), std::invalid_argument);
  TimingConfig bad_dead = t;
  bad_dead.dead_us = 12.0;
  CHECK_THROWS_AS(bad_dead.validate(), std::invalid_argument);
  TimingConfig bad_heat = t;
  bad_heat.heat_duration_us = 11.0;
  CHECK_THROWS_AS(bad_heat.validate(), std::invalid_argument);
}

TEST_CASE("flat response gives identical Poisson means across all bins") {
  Pipe p;
  p.fit.c0 = 0.0;  // no dip at all
  p.response = photon::lorentzian_response(p.fit, p.six, p.dd_dt);
  TagStream s = photon::synthesize_stream(pulse_profile(5.0), p.response, p.timing, 1000, 1,
                                          1, false);
  std::uint64_t first = s.cycles[0][0][0];
  for (int slot = 0; slot < 6; ++slot)
    for (auto c : s.cycles[0][slot]) CHECK(c == first);
}

TEST_CASE("synthesis is deterministic in the seed") {
  Pipe p;
  TagStream a = photon::synthesize_stream(pulse_profile(5.0), p.response, p.timing, 100000, 42);
  TagStream b = photon::synthesize_stream(pulse_profile(5.0), p.response, p.timing, 100000, 42);
  TagStream c = photon::synthesize_stream(pulse_profile(5.0), p.response, p.timing, 100000, 43);
  CHECK(a.cycles == b.cycles);
  CHECK(a.cycles != c.cycles);
}

TEST_CASE("dead-time removal drops exactly the first 4 us of every slot") {
  Pipe p;
  TagStream raw = photon::synthesize_stream(pulse_profile(5.0), p.response, p.timing, 1000, 7);
  TagStream clean = photon::remove_dead_time(raw, p.timing);
  CHECK(raw.bins() == 625);
  CHECK(clean.bins() == 375);
  for (int slot = 0; slot < 6; ++slot)
    for (int b = 0; b < 375; ++b) CHECK(clean.cycles[0][slot][b] == raw.cycles[0][slot][b + 250]);

  TimingConfig no_dead = p.timing;
  no_dead.dead_us = 0.0;
  TagStream raw2 = photon::synthesize_stream(pulse_profile(5.0), p.response, no_dead, 1000, 7);
  TagStream same = photon::remove_dead_time(raw2, no_dead);
  CHECK(same.cycles == raw2.cycles);

  // shape mismatch rejected
  CHECK_THROWS_AS((void)photon::remove_dead_time(clean, p.timing), std::invalid_argument);
}

TEST_CASE("an all-zero stream stays all zero through the dead-time cut") {
  Pipe p;
  auto zero_rate = [](int, double) { return 0.0; };
  TagStream raw = photon::synthesize_stream(pulse_profile(5.0), zero_rate, p.timing, 1000, 7);
  TagStream clean = photon::remove_dead_time(raw, p.timing);
  for (int slot = 0; slot < 6; ++slot)
    for (auto c : clean.cycles[0][slot]) CHECK(c == 0);
}

TEST_CASE("stacking: one cycle is an identity regrouping, duplicates double") {
  Pipe p;
  TagStream raw = photon::synthesize_stream(pulse_profile(5.0), p.response, p.timing, 100000, 3);
  TagStream clean = photon::remove_dead_time(raw, p.timing);
  auto single = photon::stack_by_delay(clean, p.timing);
  for (int slot = 0; slot < 6; ++slot)
    for (int b = 0; b < 375; ++b)
      CHECK(single.counts[slot][b] == static_cast<double>(clean.cycles[0][slot][b]));

  TagStream doubled = clean;
  doubled.cycles.push_back(clean.cycles[0]);
  auto stacked = photon::stack_by_delay(doubled, p.timing);
  for (int slot = 0; slot < 6; ++slot)
    for (int b = 0; b < 375; ++b)
      CHECK(stacked.counts[slot][b] == 2.0 * single.counts[slot][b]);
}

TEST_CASE("stacking is additive over concatenated streams") {
  Pipe p;
  TagStream a = photon::synthesize_stream(pulse_profile(5.0), p.response, p.timing, 50000, 3, 2);
  TagStream b = photon::synthesize_stream(pulse_profile(5.0), p.response, p.timing, 50000, 4, 3);
  TagStream a_clean = photon::remove_dead_time(a, p.timing);
  TagStream b_clean = photon::remove_dead_time(b, p.timing);
  TagStream both = a_clean;
  both.cycles.insert(both.cycles.end(), b_clean.cycles.begin(), b_clean.cycles.end());

  auto sa = photon::stack_by_delay(a_clean, p.timing);
  auto sb = photon::stack_by_delay(b_clean, p.timing);
  auto sc = photon::stack_by_delay(both, p.timing);
  for (int slot = 0; slot < 6; ++slot)
    for (int bin = 0; bin < 375; ++bin)
      CHECK(sc.counts[slot][bin] == sa.counts[slot][bin] + sb.counts[slot][bin]);
}

TEST_CASE("stack delay axis starts at the heat trigger and stays contiguous") {
  Pipe p;  // dead 4, offset 7: live window is delay in [-3, 3)
  TagStream raw = photon::synthesize_stream(pulse_profile(5.0), p.response, p.timing, 1000, 3);
  auto st = photon::stack_by_delay(photon::remove_dead_time(raw, p.timing), p.timing);
  CHECK(st.delay_us.front() == doctest::Approx(-3.0 + 0.008));
  CHECK(st.delay_us.back() == doctest::Approx(3.0 - 0.008));
  for (std::size_t i = 1; i < st.delay_us.size(); ++i)
    CHECK(st.delay_us[i] - st.delay_us[i - 1] == doctest::Approx(0.016));
}

TEST_CASE("noiseless pipeline round trip recovers the injected step") {
  Pipe p;
  const double amp = 5.0;
  TagStream raw = photon::synthesize_stream(pulse_profile(amp), p.response, p.timing,
                                            2000000000ULL, 0, 1, false);
  auto st = photon::stack_by_delay(photon::remove_dead_time(raw, p.timing), p.timing);
  auto tr = photon::to_temperature(st, p.six, p.dd_dt, p.timing);
  REQUIRE(!tr.delay_ns.empty());
  CHECK(tr.resolution_ns == doctest::Approx(48.0));

  auto stats = photon::pipeline_stats(tr, -3000.0, 0.0, 2500.0, 3000.0,
                                      photon::point_integration_s(p.timing, 2000000000ULL));
  CHECK(std::abs(stats.amplitude_k - amp) / amp < 0.05);
  CHECK(stats.rms_k < 0.01);
  CHECK(stats.flag_rate == 0.0);

  // per-point linearization error stays below 5% of the step in the flat regions
  for (std::size_t i = 0; i < tr.delay_ns.size(); ++i) {
    if (tr.delay_ns[i] < 0.0) CHECK(std::abs(tr.dt_k[i]) < 0.05 * amp);
    if (tr.delay_ns[i] > 2000.0 && tr.delay_ns[i] < 3000.0)
      CHECK(std::abs(tr.dt_k[i] - amp) < 0.05 * amp);
  }
}

TEST_CASE("all channels equal gives an identically zero trace") {
  Pipe p;
  TimingConfig t = p.timing;
  photon::StackedCounts st;
  st.timing = t;
  st.n = 1;
  st.delay_us.assign(30, 0.0);
  for (int i = 0; i < 30; ++i) st.delay_us[i] = -1.0 + i * 0.016;
  for (int ch = 0; ch < 6; ++ch) st.counts[ch].assign(30, 1234.0);
  auto tr = photon::to_temperature(st, p.six, p.dd_dt, t);
  for (std::size_t i = 0; i < tr.dt_k.size(); ++i) {
    CHECK(tr.dt_k[i] == 0.0);
    CHECK(tr.flag[i] == 0);
  }
}

TEST_CASE("unstable denominators are flagged and carried as missing") {
  Pipe p;
  photon::StackedCounts st;
  st.timing = p.timing;
  st.n = 1;
  st.delay_us = {0.0, 0.016, 0.032};
  // pB != pE but the A/C and D/F side points cancel: denominator ~ 0
  for (int ch : {0, 2, 3, 5})
    st.counts[ch] = {1000.0, 1000.0, 1000.0};
  st.counts[1] = {1100.0, 1100.0, 1100.0};
  st.counts[4] = {900.0, 900.0, 900.0};
  auto tr = photon::to_temperature(st, p.six, p.dd_dt, p.timing);
  for (std::size_t i = 0; i < tr.dt_k.size(); ++i) {
    CHECK(tr.flag[i] == 1);
    CHECK(std::isnan(tr.dt_k[i]));
  }
  // a fully flagged window leaves nothing to average over
  CHECK_THROWS_AS((void)photon::pipeline_stats(tr, -1.0, 1000.0, 0.0, 1000.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("recovered noise scales as 1/sqrt(n) over two decades") {
  // a deep dip keeps the six-point denominator resolved above shot noise all
  // the way down to n = 1e4 (paper-contrast curves need n >~ 1e7 for that)
  Pipe p;
  p.fit.c0 = 0.5;
  p.fit.baseline = 2e7;
  p.response = photon::lorentzian_response(p.fit, p.six, p.dd_dt);
  auto rms_at = [&](std::uint64_t n) {
    double acc = 0.0;
    int count = 0;
    for (std::uint64_t rep = 0; rep < 6; ++rep) {
      TagStream raw = photon::synthesize_stream(pulse_profile(0.0), p.response, p.timing, n,
                                                1000 + rep);
      auto st = photon::stack_by_delay(photon::remove_dead_time(raw, p.timing), p.timing);
      auto tr = photon::to_temperature(st, p.six, p.dd_dt, p.timing);
      for (std::size_t i = 0; i < tr.dt_k.size(); ++i) {
        if (tr.flag[i]) continue;
        acc += tr.dt_k[i] * tr.dt_k[i];
        ++count;
      }
    }
    return std::sqrt(acc / count);
  };
  double r4 = rms_at(10000), r5 = rms_at(100000), r6 = rms_at(1000000);
  CHECK(r4 / r5 == doctest::Approx(std::sqrt(10.0)).epsilon(0.10));
  CHECK(r5 / r6 == doctest::Approx(std::sqrt(10.0)).epsilon(0.10));
  CHECK(r4 / r6 == doctest::Approx(10.0).epsilon(0.10));
}

TEST_CASE("pipeline stats identities") {
  photon::TemperatureTrace tr;
  for (int i = 0; i < 200; ++i) {
    tr.delay_ns.push_back(-3000.0 + i * 48.0);
    tr.dt_k.push_back(tr.delay_ns[i] < 0.0 ? 0.0 : 5.0);
    tr.flag.push_back(0);
  }
  auto constant = photon::pipeline_stats(tr, -3000.0, 0.0, 1000.0, 4000.0, 43.2);
  CHECK(constant.rms_k == 0.0);
  CHECK(constant.amplitude_k == doctest::Approx(5.0));

  // rms 0.6 K at 43.2 s per point -> 3.94 K/sqrt(Hz); snr 8.3
  photon::TemperatureTrace noisy = tr;
  rng::SplitMix64 g(5);
  for (int i = 0; i < 200; ++i)
    if (noisy.delay_ns[i] < 0.0) noisy.dt_k[i] = 0.6 * rng::normal(g);
  auto stats = photon::pipeline_stats(noisy, -3000.0, 0.0, 1000.0, 4000.0, 43.2);
  CHECK(stats.sensitivity == doctest::Approx(stats.rms_k * std::sqrt(43.2)));
  CHECK(stats.sensitivity == doctest::Approx(0.6 * std::sqrt(43.2)).epsilon(0.2));
  CHECK(stats.snr == doctest::Approx(stats.amplitude_k / stats.rms_k));
  CHECK(stats.snr == doctest::Approx(8.3).epsilon(0.25));

  CHECK_THROWS_AS(
      (void)photon::pipeline_stats(tr, 0.0, 0.0, 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("per-point integration time matches the six-channel bookkeeping") {
  TimingConfig t;
  CHECK(photon::point_integration_s(t, 150000000ULL) == doctest::Approx(43.2));
}

TEST_CASE("tag stream file round trip is byte exact") {
  Pipe p;
  TagStream s = photon::synthesize_stream(pulse_profile(5.0), p.response, p.timing, 100000, 11, 2);
  auto tmp = std::filesystem::temp_directory_path() / "dthermo_stream_test.txt";
  photon::write_tag_stream(tmp, s);
  TagStream back = photon::read_tag_stream(tmp);
  CHECK(back.cycles == s.cycles);
  CHECK(back.n == s.n);
  CHECK(back.seed == s.seed);

  auto tmp2 = std::filesystem::temp_directory_path() / "dthermo_stream_test2.txt";
  photon::write_tag_stream(tmp2, back);
  std::ifstream f1(tmp, std::ios::binary), f2(tmp2, std::ios::binary);
  std::string c1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string c2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(c1 == c2);
  std::filesystem::remove(tmp);
  std::filesystem::remove(tmp2);
}

TEST_CASE("poisson sampler: moments and determinism") {
  for (double lambda : {3.0, 40.0, 3000.0}) {
    rng::SplitMix64 g(17);
    double sum = 0.0, sum2 = 0.0;
    const int reps = 20000;
    for (int i = 0; i < reps; ++i) {
      double k = static_cast<double>(rng::poisson(g, lambda));
      sum += k;
      sum2 += k * k;
    }
    double mean = sum / reps;
    double var = sum2 / reps - mean * mean;
    CHECK(mean == doctest::Approx(lambda).epsilon(0.03));
    CHECK(var == doctest::Approx(lambda).epsilon(0.08));
  }
  rng::SplitMix64 a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(rng::poisson(a, 123.4) == rng::poisson(b, 123.4));
}
