#include "dthermo/photon_pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dthermo/rng.hpp"

namespace dthermo::photon {

void TimingConfig::validate() const {
  if (cycle_us <= 0.0 || slot_us <= 0.0 || bin_ns <= 0.0)
    throw std::invalid_argument("TimingConfig: cycle, slot and bin must be > 0");
  if (std::abs(cycle_us - 6.0 * slot_us) > 1e-9)
    throw std::invalid_argument("TimingConfig: cycle must equal 6 slots");
  if (dead_us < 0.0 || dead_us >= slot_us)
    throw std::invalid_argument("TimingConfig: dead time must lie within the slot");
  double bins = slot_us * 1000.0 / bin_ns;
  if (std::abs(bins - std::round(bins)) > 1e-9)
    throw std::invalid_argument("TimingConfig: bin must divide the slot");
  if (heat_duration_us > heat_period_us)
    throw std::invalid_argument("TimingConfig: heat duration exceeds the period");
  if (heat_period_us <= 0.0) throw std::invalid_argument("TimingConfig: heat period must be > 0");
  if (box < 1) throw std::invalid_argument("TimingConfig: box must be >= 1");
}

ResponseFn lorentzian_response(const odmr::LorentzianFit& fit, const odmr::SixPointSet& six,
                               double dd_dt) {
  return [fit, six, dd_dt](int slot, double dt_k) {
    odmr::LorentzianFit shifted = fit;
    shifted.f_avg = fit.f_avg + dd_dt * dt_k;
    return odmr::lorentzian_dip(six.freqs[static_cast<std::size_t>(slot)], shifted);
  };
}

ResponseFn lindblad_response(const spin::NVParams& nv, const spin::FieldVector& b,
                             double db_static_g, const odmr::SweepConfig& cfg,
                             const odmr::SixPointSet& six) {
  spin::RawDetuning env;
  env.dbz = db_static_g * std::cos(b.theta);
  env.dbx = db_static_g * std::sin(b.theta);
  return [nv, b, env, cfg, six, dd_dt = nv.dd_dt](int slot, double dt_k) {
    spin::RawDetuning total = env;
    total.d_shift += dd_dt * dt_k;
    return odmr::spectrum_point(nv, b, total, cfg, six.freqs[static_cast<std::size_t>(slot)]);
  };
}

TagStream synthesize_stream(const std::function<double(double)>& dt_of_us,
                            const ResponseFn& rate_cps, const TimingConfig& timing,
                            std::uint64_t n, std::uint64_t seed, int ncycles, bool poisson) {
  timing.validate();
  if (n < 1) throw std::invalid_argument("synthesize_stream: n must be >= 1");
  if (ncycles < 1) throw std::invalid_argument("synthesize_stream: ncycles must be >= 1");

  const int bins = timing.bins_per_slot();
  const double bin_s = timing.bin_ns * 1e-9;
  const double bin_us = timing.bin_ns * 1e-3;

  TagStream s;
  s.timing = timing;
  s.n = n;
  s.seed = seed;
  s.cycles.resize(ncycles);

  for (int cyc = 0; cyc < ncycles; ++cyc) {
    for (int slot = 0; slot < 6; ++slot) {
      auto& row = s.cycles[cyc][slot];
      row.resize(bins);
      for (int bin = 0; bin < bins; ++bin) {
        // bin center relative to the heat trigger, wrapped on the heat period
        double t_slot = (bin + 0.5) * bin_us;
        double delay = std::fmod(t_slot - timing.heat_offset_us + 10.0 * timing.heat_period_us,
                                 timing.heat_period_us);
        double mean = rate_cps(slot, dt_of_us(delay)) * bin_s * static_cast<double>(n);
        if (mean < 0.0) mean = 0.0;
        if (poisson) {
          rng::SplitMix64 g(rng::substream(seed, static_cast<std::uint64_t>(cyc) * 6 + slot,
                                           static_cast<std::uint64_t>(bin)));
          row[bin] = rng::poisson(g, mean);
        } else {
          row[bin] = static_cast<std::uint64_t>(std::llround(mean));
        }
      }
    }
  }
  return s;
}

TagStream remove_dead_time(const TagStream& raw, const TimingConfig& timing) {
  timing.validate();
  const int bins = timing.bins_per_slot();
  if (raw.bins() != bins)
    throw std::invalid_argument("remove_dead_time: stream shape does not match the timing");
  const int drop = timing.dead_bins();

  TagStream out;
  out.timing = timing;
  out.n = raw.n;
  out.seed = raw.seed;
  out.cycles.resize(raw.cycles.size());
  for (std::size_t cyc = 0; cyc < raw.cycles.size(); ++cyc)
    for (int slot = 0; slot < 6; ++slot)
      out.cycles[cyc][slot].assign(raw.cycles[cyc][slot].begin() + drop,
                                   raw.cycles[cyc][slot].end());
  return out;
}

StackedCounts stack_by_delay(const TagStream& clean, const TimingConfig& timing) {
  timing.validate();
  const int live = timing.bins_per_slot() - timing.dead_bins();
  if (clean.bins() != live)
    throw std::invalid_argument("stack_by_delay: expected a dead-time-stripped stream");

  const double bin_us = timing.bin_ns * 1e-3;
  StackedCounts st;
  st.timing = timing;
  st.n = clean.n;
  st.cycles_summed = clean.cycles.size();
  st.delay_us.resize(live);
  for (int b = 0; b < live; ++b) {
    double t_slot = timing.dead_us + (b + 0.5) * bin_us;
    // keep time order; fold only full periods so the axis stays contiguous
    double delay = t_slot - timing.heat_offset_us;
    while (delay >= timing.heat_period_us) delay -= timing.heat_period_us;
    st.delay_us[b] = delay;
  }
  for (int slot = 0; slot < 6; ++slot) {
    st.counts[slot].assign(live, 0.0);
    for (const auto& cyc : clean.cycles)
      for (int b = 0; b < live; ++b) st.counts[slot][b] += static_cast<double>(cyc[slot][b]);
  }
  return st;
}

TemperatureTrace to_temperature(const StackedCounts& st, const odmr::SixPointSet& six,
                                double dd_dt, const TimingConfig& timing, double flag_sigma) {
  timing.validate();
  if (dd_dt == 0.0) throw std::invalid_argument("to_temperature: dd_dt must be nonzero");
  const int live = static_cast<int>(st.delay_us.size());
  for (const auto& ch : st.counts)
    if (static_cast<int>(ch.size()) != live)
      throw std::invalid_argument("to_temperature: channel arrays are not aligned");

  const int box = timing.box;
  TemperatureTrace tr;
  tr.resolution_ns = box * timing.bin_ns;

  for (int start = 0; start + box <= live; start += box) {
    std::array<double, 6> p{};
    for (int ch = 0; ch < 6; ++ch) {
      double acc = 0.0;
      for (int k = 0; k < box; ++k) acc += st.counts[ch][start + k];
      p[ch] = acc / box;
    }
    double delay = 0.0;
    for (int k = 0; k < box; ++k) delay += st.delay_us[start + k];
    tr.delay_ns.push_back(delay / box * 1000.0);

    double den = (p[0] - p[2]) - (p[3] - p[5]);
    // shot-noise scale of the denominator: four box-averaged Poisson channels
    double var = (p[0] + p[2] + p[3] + p[5]) / box;
    double floor = flag_sigma * std::sqrt(std::max(var, 0.0));
    double abs_scale = 0.0;
    for (double v : p) abs_scale += std::abs(v);
    bool unstable = std::abs(den) <= floor || std::abs(den) < 1e-12 * std::max(abs_scale, 1e-300);
    if (unstable && p[1] == p[4]) {
      // exactly symmetric samples carry zero shift regardless of the slope
      tr.dt_k.push_back(0.0);
      tr.flag.push_back(0);
    } else if (unstable) {
      tr.dt_k.push_back(std::numeric_limits<double>::quiet_NaN());
      tr.flag.push_back(1);
    } else {
      tr.dt_k.push_back((p[1] - p[4]) / den * 2.0 * six.d_omega / dd_dt);
      tr.flag.push_back(0);
    }
  }
  return tr;
}

double point_integration_s(const TimingConfig& timing, std::uint64_t n) {
  return 6.0 * static_cast<double>(n) * timing.box * timing.bin_ns * 1e-9;
}

PipelineStats pipeline_stats(const TemperatureTrace& trace, double window_lo_ns,
                             double window_hi_ns, double plateau_lo_ns, double plateau_hi_ns,
                             double integration_s) {
  if (window_hi_ns <= window_lo_ns)
    throw std::invalid_argument("pipeline_stats: empty pre-heating window");

  double sum = 0.0, sum2 = 0.0;
  int npre = 0;
  double plateau = 0.0;
  int nplat = 0;
  int flagged = 0;
  for (std::size_t i = 0; i < trace.delay_ns.size(); ++i) {
    if (trace.flag[i]) { ++flagged; continue; }
    double d = trace.delay_ns[i];
    if (d >= window_lo_ns && d < window_hi_ns) {
      sum += trace.dt_k[i];
      sum2 += trace.dt_k[i] * trace.dt_k[i];
      ++npre;
    }
    if (d >= plateau_lo_ns && d < plateau_hi_ns) {
      plateau += trace.dt_k[i];
      ++nplat;
    }
  }
  if (npre == 0) throw std::invalid_argument("pipeline_stats: no samples in the pre-heating window");

  PipelineStats out;
  double mean = sum / npre;
  out.rms_k = std::sqrt(std::max(sum2 / npre - mean * mean, 0.0));
  out.window_points = npre;
  out.amplitude_k = nplat > 0 ? plateau / nplat - mean : 0.0;
  out.snr = out.rms_k > 0.0 ? std::abs(out.amplitude_k) / out.rms_k
                            : std::numeric_limits<double>::infinity();
  out.sensitivity = out.rms_k * std::sqrt(integration_s);
  out.flag_rate = trace.delay_ns.empty()
                      ? 0.0
                      : static_cast<double>(flagged) / static_cast<double>(trace.delay_ns.size());
  return out;
}

void write_tag_stream(const std::filesystem::path& path, const TagStream& s) {
  std::ofstream out(path, std::ios::binary);  // binary: exact newline control
  if (!out) throw std::runtime_error("write_tag_stream: cannot open " + path.string());
  char buf[256];
  out << "dressed-thermo-tagstream v1\n";
  std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g %.9g %.9g %.9g %.9g %d\n", s.timing.cycle_us,
                s.timing.slot_us, s.timing.bin_ns, s.timing.dead_us, s.timing.heat_offset_us,
                s.timing.heat_duration_us, s.timing.heat_period_us, s.timing.box);
  out << buf;
  out << s.n << ' ' << s.seed << ' ' << s.cycles.size() << ' ' << s.bins() << '\n';
  for (const auto& cyc : s.cycles) {
    for (const auto& slot : cyc) {
      for (std::size_t b = 0; b < slot.size(); ++b) out << (b ? " " : "") << slot[b];
      out << '\n';
    }
  }
}

TagStream read_tag_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_tag_stream: cannot open " + path.string());
  std::string magic;
  std::getline(in, magic);
  if (magic != "dressed-thermo-tagstream v1")
    throw std::runtime_error("read_tag_stream: bad magic line");

  TagStream s;
  std::size_t ncycles = 0;
  int bins = 0;
  in >> s.timing.cycle_us >> s.timing.slot_us >> s.timing.bin_ns >> s.timing.dead_us >>
      s.timing.heat_offset_us >> s.timing.heat_duration_us >> s.timing.heat_period_us >>
      s.timing.box;
  in >> s.n >> s.seed >> ncycles >> bins;
  if (!in) throw std::runtime_error("read_tag_stream: malformed header");
  s.cycles.resize(ncycles);
  for (auto& cyc : s.cycles)
    for (auto& slot : cyc) {
      slot.resize(bins);
      for (auto& c : slot)
        if (!(in >> c)) throw std::runtime_error("read_tag_stream: truncated counts");
    }
  return s;
}

}  // namespace dthermo::photon
