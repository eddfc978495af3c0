#include "dthermo/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "dthermo/io_util.hpp"
#include "dthermo/parallel.hpp"

namespace dthermo::scenarios {

using nlohmann::ordered_json;

namespace {

std::string db_tag(double db) {
  // stable filename fragment: -2 -> "m2", 1.5 -> "p1.5"
  std::string s = io::fmt(std::abs(db), "%.6g");
  return (db < 0.0 ? "m" : "p") + s;
}

void write_metadata(const Context& ctx, const std::string& command) {
  ordered_json meta;
  meta["command"] = command;
  meta["seed"] = ctx.seed;
  meta["scenario"] = ctx.cfg.get_string("", "scenario", "");
  auto now = std::chrono::system_clock::now();
  meta["generated_unix_s"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  io::write_text(ctx.out_dir / "metadata.json", meta.dump(2) + "\n");
}

ordered_json fit_to_json(const odmr::LorentzianFit& fit) {
  ordered_json j;
  j["f_avg_mhz"] = fit.f_avg;
  j["gamma_mhz"] = fit.gamma;
  j["c0"] = fit.c0;
  j["baseline_cps"] = fit.baseline;
  j["residual_rms_cps"] = fit.residual_rms;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  return j;
}

std::string spectrum_csv(const odmr::Spectrum& s) {
  std::string out = "f_MHz,pl_cps\n";
  for (std::size_t i = 0; i < s.f_mhz.size(); ++i)
    out += io::fmt(s.f_mhz[i], "%.10g") + "," + io::fmt(s.pl_cps[i], "%.10g") + "\n";
  return out;
}

}  // namespace

spin::NVParams nv_from(const config::Config& cfg) {
  spin::NVParams nv;
  nv.d0 = cfg.get_double("nv", "d0_mhz", 2870.0);
  nv.dd_dt = cfg.get_double("nv", "dd_dt_mhz_per_k", -0.074);
  nv.gamma_e = cfg.get_double("nv", "gamma_e_mhz_per_g", 2.8);
  nv.strain_e = cfg.get_double("nv", "e_mhz", 0.0);
  nv.validate();
  return nv;
}

spin::FieldVector field_from(const config::Config& cfg) {
  spin::FieldVector f;
  f.b_mag = cfg.require_double("field", "b_g");
  f.theta = cfg.get_double("field", "theta_rad", 0.0);
  f.validate();
  return f;
}

lindblad::CollapseSet collapse_from(const config::Config& cfg) {
  lindblad::CollapseSet c;
  c.gamma_gl = cfg.get_double("collapse", "gamma_gl_mhz", 10.0);
  c.validate();
  return c;
}

lindblad::ReadoutModel readout_from(const config::Config& cfg) {
  lindblad::ReadoutModel r;
  r.r_base = cfg.get_double("readout", "r_base_cps", 1e6);
  r.c_max = cfg.get_double("readout", "c_max", 0.2);
  r.validate();
  return r;
}

photon::TimingConfig timing_from(const config::Config& cfg) {
  photon::TimingConfig t;
  t.cycle_us = cfg.get_double("timing", "cycle_us", 60.0);
  t.slot_us = cfg.get_double("timing", "slot_us", 10.0);
  t.bin_ns = cfg.get_double("timing", "bin_ns", 16.0);
  t.dead_us = cfg.get_double("timing", "dead_us", 4.0);
  t.heat_offset_us = cfg.get_double("timing", "heat_offset_us", 7.0);
  t.heat_duration_us = cfg.get_double("timing", "heat_duration_us", 3.0);
  t.heat_period_us = cfg.get_double("timing", "heat_period_us", 10.0);
  t.box = static_cast<int>(cfg.get_int("timing", "box", 3));
  t.validate();
  return t;
}

namespace {

odmr::SweepConfig sweep_from(const config::Config& cfg, const spin::DriveParams& drive,
                             const lindblad::CollapseSet& collapse,
                             const lindblad::ReadoutModel& readout) {
  int points = static_cast<int>(cfg.get_int("sweep", "points", 121));
  double span = cfg.get_double("sweep", "span_mhz", 0.0);
  return odmr::make_sweep(drive, collapse, readout, points, span);
}

spin::RawDetuning field_step(const spin::FieldVector& b, double db_g) {
  spin::RawDetuning env;
  env.dbz = db_g * std::cos(b.theta);
  env.dbx = db_g * std::sin(b.theta);
  return env;
}

}  // namespace

void run_spectrum(const Context& ctx) {
  auto nv = nv_from(ctx.cfg);
  auto field = field_from(ctx.cfg);
  auto collapse = collapse_from(ctx.cfg);
  auto readout = readout_from(ctx.cfg);
  auto drive = spin::resonant_drive(nv, field, ctx.cfg.require_double("drive", "omega_mhz"));
  auto cfg = sweep_from(ctx.cfg, drive, collapse, readout);

  odmr::Spectrum s = odmr::simulate_spectrum(nv, field, {}, cfg);
  s.fit = odmr::fit_lorentzian(s);
  io::write_text(ctx.out_dir / "spectrum.csv", spectrum_csv(s));

  ordered_json fits;
  fits["reference"] = fit_to_json(*s.fit);

  auto db_list = ctx.cfg.get_list("sweep", "db_list_g", {});
  if (!db_list.empty()) {
    ordered_json family = ordered_json::array();
    for (double db : db_list) {
      odmr::Spectrum sd = odmr::simulate_spectrum(nv, field, field_step(field, db), cfg);
      io::write_text(ctx.out_dir / ("spectrum_db_" + db_tag(db) + ".csv"), spectrum_csv(sd));
      odmr::LorentzianFit fd = odmr::fit_lorentzian(sd);
      ordered_json item = fit_to_json(fd);
      item["db_g"] = db;
      family.push_back(item);
    }
    fits["db_sweep"] = family;
  }
  io::write_text(ctx.out_dir / "fit.json", fits.dump(2) + "\n");
  write_metadata(ctx, "spectrum");
}

void run_robustness(const Context& ctx) {
  auto nv = nv_from(ctx.cfg);
  auto collapse = collapse_from(ctx.cfg);
  auto readout = readout_from(ctx.cfg);
  double omega = ctx.cfg.require_double("drive", "omega_mhz");
  std::string mode = ctx.cfg.require_string("robustness", "mode");
  double h_g = ctx.cfg.get_double("robustness", "h_g", 0.2);

  ordered_json summary;
  if (mode == "line") {
    auto field = field_from(ctx.cfg);
    auto drive = spin::resonant_drive(nv, field, omega);
    auto cfg = sweep_from(ctx.cfg, drive, collapse, readout);
    odmr::Spectrum ref = odmr::simulate_spectrum(nv, field, {}, cfg);
    odmr::LorentzianFit fit = odmr::fit_lorentzian(ref);
    if (!fit.converged) throw std::runtime_error("robustness line: reference fit failed");

    double span = ctx.cfg.get_double("robustness", "db_span_g", 16.0);
    int points = static_cast<int>(ctx.cfg.get_int("robustness", "db_points", 33));
    const double off = fit.gamma / (2.0 * std::sqrt(3.0));
    std::string csv = "db_G,f_avg_shift_MHz\n";
    for (int i = 0; i < points; ++i) {
      double db = -0.5 * span + span * i / (points - 1);
      auto env = field_step(field, db);
      double p_b = odmr::spectrum_point(nv, field, env, cfg, fit.f_avg - off);
      double p_e = odmr::spectrum_point(nv, field, env, cfg, fit.f_avg + off);
      double p_0 = odmr::spectrum_point(nv, field, env, cfg, fit.f_avg - 5.0 * fit.gamma);
      csv += io::fmt(db) + "," + io::fmt(odmr::three_point_shift(p_b, p_e, p_0, fit.gamma)) + "\n";
    }
    io::write_text(ctx.out_dir / "line.csv", csv);

    double dressed = odmr::dressed_slope(nv, field, omega, collapse, readout, h_g,
                                         static_cast<int>(cfg.f_grid.size()));
    double bare = odmr::bare_slope(nv, field, h_g);
    summary["fit"] = fit_to_json(fit);
    summary["dressed_slope_khz_per_g"] = dressed * 1e3;
    summary["bare_slope_mhz_per_g"] = bare;
    summary["attenuation_ratio"] = std::abs(bare) / std::max(std::abs(dressed), 1e-300);
  } else if (mode == "map") {
    int nb = static_cast<int>(ctx.cfg.get_int("robustness", "b_points", 8));
    int nt = static_cast<int>(ctx.cfg.get_int("robustness", "theta_points", 8));
    double b0 = ctx.cfg.get_double("robustness", "b_min_g", 20.0);
    double b1 = ctx.cfg.get_double("robustness", "b_max_g", 200.0);
    double t0 = ctx.cfg.get_double("robustness", "theta_min_rad", 0.0);
    double t1 = ctx.cfg.get_double("robustness", "theta_max_rad", 0.7853981633974483);
    std::vector<double> bg(nb), tg(nt);
    for (int i = 0; i < nb; ++i) bg[i] = b0 + (b1 - b0) * i / std::max(nb - 1, 1);
    for (int i = 0; i < nt; ++i) tg[i] = t0 + (t1 - t0) * i / std::max(nt - 1, 1);

    odmr::RobustnessMap map =
        odmr::field_robustness_map(nv, omega, collapse, readout, bg, tg, h_g, ctx.threads);
    std::string csv = "B_G,theta_rad,slope_kHz_per_G,status\n";
    for (const auto& cell : map.cells) {
      csv += io::fmt(cell.b_mag) + "," + io::fmt(cell.theta) + ",";
      csv += cell.valid ? io::fmt(cell.slope_khz_per_g) : "nan";
      csv += ",";
      csv += cell.valid ? "ok" : cell.reason;
      csv += "\n";
    }
    io::write_text(ctx.out_dir / "map.csv", csv);
    summary["cells"] = map.cells.size();
    summary["h_g"] = h_g;
  } else {
    throw config::ConfigError("field 'robustness.mode': expected 'line' or 'map', got '" + mode +
                              "'");
  }
  io::write_text(ctx.out_dir / "summary.json", summary.dump(2) + "\n");
  write_metadata(ctx, "robustness");
}

namespace {

struct ThermalSetup {
  thermal::ThermalGrid grid;
  thermal::SourceSchedule schedule;
  std::vector<std::pair<int, int>> probes;
};

ThermalSetup thermal_from(const config::Config& cfg) {
  int nx = static_cast<int>(cfg.require_int("thermal", "nx"));
  int ny = static_cast<int>(cfg.require_int("thermal", "ny"));
  double lx = cfg.require_double("thermal", "lx_um") * 1e-6;
  double ly = cfg.require_double("thermal", "ly_um") * 1e-6;

  ThermalSetup s;
  double t_inf = cfg.get_double("thermal", "t_inf_c", 26.0);
  double t0 = cfg.get_double("thermal", "t_initial_c", t_inf);
  s.grid = thermal::make_uniform_grid(nx, ny, lx, ly, thermal::kAir, t0);
  s.grid.thickness = cfg.get_double("thermal", "l_nm", 500.0) * 1e-9;
  s.grid.h_conv = cfg.get_double("thermal", "h_w_m2k", 2e8);
  s.grid.t_inf = t_inf;

  // a gold strip across the domain; everything else stays air
  double x0 = cfg.get_double("thermal", "strip_x0_um", 0.0) * 1e-6;
  double x1 = cfg.get_double("thermal", "strip_x1_um", 0.0) * 1e-6;
  double y0 = cfg.get_double("thermal", "strip_y0_um", 0.0) * 1e-6;
  double y1 = cfg.get_double("thermal", "strip_y1_um", 0.0) * 1e-6;
  bool has_strip = x1 > x0 && y1 > y0;
  if (has_strip)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
        if (s.grid.xc(ix) >= x0 && s.grid.xc(ix) < x1 && s.grid.yc(iy) >= y0 &&
            s.grid.yc(iy) < y1)
          s.grid.mat[s.grid.idx(ix, iy)] = thermal::kGold;

  std::string source = cfg.get_string("thermal", "source", "");
  if (cfg.has("thermal", "source_csv")) {
    s.schedule.q_w_m2 =
        thermal::load_source_map(cfg.require_string("thermal", "source_csv"), s.grid);
  } else if (source == "gaussian") {
    s.schedule.q_w_m2 = thermal::gaussian_source(
        s.grid, cfg.require_double("thermal", "gauss_x0_um") * 1e-6,
        cfg.require_double("thermal", "gauss_y0_um") * 1e-6,
        cfg.require_double("thermal", "gauss_sigma_um") * 1e-6,
        cfg.require_double("thermal", "gauss_peak_w_m2"));
    // heating confined to the metal: the CPW dissipates, the surrounding air
    // does not
    if (has_strip)
      for (std::size_t i = 0; i < s.schedule.q_w_m2.size(); ++i)
        if (s.grid.mat[i].sigma != thermal::kGold.sigma) s.schedule.q_w_m2[i] = 0.0;
  } else if (has_strip) {
    s.schedule.q_w_m2 =
        thermal::strip_source(s.grid, x0, x1, y0, y1, cfg.get_double("thermal", "q_w_m2", 0.0));
  }
  s.schedule.start_us = cfg.get_double("thermal", "pulse_start_us", 0.0);
  s.schedule.duration_us = cfg.get_double("thermal", "pulse_duration_us", 3.0);
  s.schedule.period_us = cfg.get_double("thermal", "pulse_period_us", 0.0);
  s.schedule.validate(s.grid);

  std::string probes = cfg.get_string("thermal", "probes", "");
  std::istringstream in(probes);
  std::string item;
  while (std::getline(in, item, ';')) {
    std::size_t comma = item.find(',');
    if (comma == std::string::npos)
      throw config::ConfigError("field 'thermal.probes': expected 'x_um,y_um;...'");
    double px = std::stod(item.substr(0, comma)) * 1e-6;
    double py = std::stod(item.substr(comma + 1)) * 1e-6;
    int ix = 0, iy = 0;
    while (ix + 1 < nx && s.grid.x_edges[ix + 1] < px) ++ix;
    while (iy + 1 < ny && s.grid.y_edges[iy + 1] < py) ++iy;
    s.probes.emplace_back(ix, iy);
  }
  return s;
}

}  // namespace

void run_thermal(const Context& ctx) {
  ThermalSetup setup = thermal_from(ctx.cfg);
  double t_end = ctx.cfg.require_double("thermal", "t_end_us");
  double record = ctx.cfg.get_double("thermal", "record_every_us", 0.01);
  double snap = ctx.cfg.get_double("thermal", "snapshot_every_us", 0.0);
  bool gz = ctx.cfg.get_bool("thermal", "gzip_snapshots", false);

  thermal::save_map_csv(ctx.out_dir / "source_map.csv", setup.grid, setup.schedule.q_w_m2.empty()
                            ? std::vector<double>(setup.grid.t_c.size(), 0.0)
                            : setup.schedule.q_w_m2);

  thermal::RunResult result =
      thermal::run(setup.grid, setup.schedule, t_end, setup.probes, record, snap);

  for (std::size_t p = 0; p < result.traces.size(); ++p) {
    std::string csv = "t_us,T_C\n";
    const auto& tr = result.traces[p];
    for (std::size_t i = 0; i < tr.t_us.size(); ++i)
      csv += io::fmt(tr.t_us[i]) + "," + io::fmt(tr.temp_c[i], "%.12g") + "\n";
    io::write_text(ctx.out_dir / ("probe_" + std::to_string(p) + ".csv"), csv);
  }

  for (const auto& snapv : result.snapshots) {
    std::string name = "snapshot_t" + io::fmt(snapv.t_us, "%.6g") + "us.csv";
    std::string body;
    {
      std::ostringstream head;
      head << "# t_us " << io::fmt(snapv.t_us, "%.10g") << "\n";
      body = head.str();
      for (int iy = 0; iy < setup.grid.ny(); ++iy) {
        for (int ix = 0; ix < setup.grid.nx(); ++ix) {
          body += io::fmt(snapv.t_c[setup.grid.idx(ix, iy)], "%.10g");
          body += ix + 1 < setup.grid.nx() ? "," : "";
        }
        body += "\n";
      }
    }
    if (gz)
      io::write_text_gz(ctx.out_dir / (name + ".gz"), body);
    else
      io::write_text(ctx.out_dir / name, body);
  }

  // final-state snapshot is always written
  {
    std::string body;
    for (int iy = 0; iy < setup.grid.ny(); ++iy) {
      for (int ix = 0; ix < setup.grid.nx(); ++ix) {
        body += io::fmt(setup.grid.t_c[setup.grid.idx(ix, iy)], "%.10g");
        body += ix + 1 < setup.grid.nx() ? "," : "";
      }
      body += "\n";
    }
    io::write_text(ctx.out_dir / "final_field.csv", body);
  }

  ordered_json summary;
  summary["dt_s"] = result.dt_s;
  summary["t_end_us"] = t_end;
  summary["probes"] = result.traces.size();
  // source/convection balance is meaningful only while the source still runs
  if (!setup.schedule.q_w_m2.empty() && setup.schedule.active_at(t_end))
    summary["balance_defect"] = thermal::energy_balance_defect(setup.grid, setup.schedule.q_w_m2);
  if (!result.traces.empty() && setup.schedule.duration_us > 0.0) {
    try {
      summary["rise_time_10_90_us"] = thermal::rise_time_10_90(result.traces[0]);
    } catch (const std::exception&) {
      // trace did not rise; leave the field out
    }
  }
  io::write_text(ctx.out_dir / "summary.json", summary.dump(2) + "\n");
  write_metadata(ctx, "thermal");
}

void run_time_resolved(const Context& ctx) {
  auto nv = nv_from(ctx.cfg);
  auto field = field_from(ctx.cfg);
  auto collapse = collapse_from(ctx.cfg);
  auto readout = readout_from(ctx.cfg);
  auto timing = timing_from(ctx.cfg);
  auto drive = spin::resonant_drive(nv, field, ctx.cfg.require_double("drive", "omega_mhz"));
  auto cfg = sweep_from(ctx.cfg, drive, collapse, readout);

  // reference DS-ODMR curve fixes the six measurement frequencies
  odmr::Spectrum ref = odmr::simulate_spectrum(nv, field, {}, cfg);
  odmr::LorentzianFit fit = odmr::fit_lorentzian(ref);
  if (!fit.converged) throw std::runtime_error("time-resolved: reference fit failed");
  double d_omega = ctx.cfg.get_double("sixpoint", "d_omega_mhz", 1.0);
  odmr::SixPointSet six = odmr::six_point_frequencies(fit.f_avg, fit.gamma, d_omega);

  auto n = static_cast<std::uint64_t>(ctx.cfg.require_int("timeresolved", "n"));
  double flag_sigma = ctx.cfg.get_double("timeresolved", "flag_sigma", 5.0);
  bool save_stream = ctx.cfg.get_bool("timeresolved", "save_stream", false);

  // temperature profile over one heat period
  std::function<double(double)> profile;
  std::string kind = ctx.cfg.get_string("timeresolved", "profile", "pulse");
  if (kind == "pulse") {
    double amp = ctx.cfg.get_double("timeresolved", "amplitude_k", 5.0);
    double rise = ctx.cfg.get_double("timeresolved", "rise_time_us", 0.15);
    double fall = ctx.cfg.get_double("timeresolved", "fall_time_us", rise);
    double dur = timing.heat_duration_us;
    profile = [amp, rise, fall, dur](double t_us) {
      if (t_us < 0.0) return 0.0;
      if (t_us < dur) return amp * (1.0 - std::exp(-t_us / rise));
      double peak = amp * (1.0 - std::exp(-dur / rise));
      return peak * std::exp(-(t_us - dur) / fall);
    };
  } else if (kind == "trace") {
    auto [ts, vals] = io::read_xy_csv(ctx.cfg.require_string("timeresolved", "trace_csv"));
    if (ts.size() < 2) throw std::runtime_error("time-resolved: trace csv needs >= 2 rows");
    double t0 = ts.front(), v0 = vals.front();
    std::vector<double> t(ts), v(vals);
    for (auto& x : t) x -= t0;
    for (auto& x : v) x -= v0;
    profile = [t = std::move(t), v = std::move(v)](double t_us) {
      if (t_us <= t.front()) return v.front();
      if (t_us >= t.back()) return v.back();
      auto it = std::upper_bound(t.begin(), t.end(), t_us);
      std::size_t i = it - t.begin();
      double f = (t_us - t[i - 1]) / (t[i] - t[i - 1]);
      return v[i - 1] + f * (v[i] - v[i - 1]);
    };
  } else {
    throw config::ConfigError("field 'timeresolved.profile': expected 'pulse' or 'trace'");
  }

  auto db_list = ctx.cfg.get_list("timeresolved", "db_list_g", {0.0});
  double integration = photon::point_integration_s(timing, n);
  // amplitude taken over the settled part of the pulse (up to the last 2 us)
  double plateau_hi = timing.heat_duration_us * 1000.0;
  double plateau_lo = std::max(0.5 * plateau_hi, plateau_hi - 2000.0);

  ordered_json summary;
  summary["fit"] = fit_to_json(fit);
  {
    ordered_json sixj;
    sixj["freqs_mhz"] = six.freqs;
    sixj["d_omega_mhz"] = six.d_omega;
    sixj["gamma_ref_mhz"] = six.gamma_ref;
    summary["six_point"] = sixj;
  }
  summary["point_integration_s"] = integration;
  ordered_json runs = ordered_json::array();

  double amp0 = 0.0;
  bool have_amp0 = false;
  for (double db : db_list) {
    // the same seed is used for every delta|B| so that run-to-run differences
    // isolate the systematic shift rather than independent shot noise
    auto response = photon::lindblad_response(nv, field, db, cfg, six);
    photon::TagStream raw = photon::synthesize_stream(profile, response, timing, n, ctx.seed);
    if (save_stream)
      photon::write_tag_stream(ctx.out_dir / ("stream_db_" + db_tag(db) + ".txt"), raw);
    photon::TagStream clean = photon::remove_dead_time(raw, timing);
    photon::StackedCounts stacked = photon::stack_by_delay(clean, timing);
    photon::TemperatureTrace trace =
        photon::to_temperature(stacked, six, nv.dd_dt, timing, flag_sigma);

    std::string csv = "delay_ns,dT_K,flag\n";
    for (std::size_t i = 0; i < trace.delay_ns.size(); ++i) {
      csv += io::fmt(trace.delay_ns[i]) + ",";
      csv += trace.flag[i] ? "nan" : io::fmt(trace.dt_k[i], "%.10g");
      csv += trace.flag[i] ? ",1\n" : ",0\n";
    }
    io::write_text(ctx.out_dir / ("trace_db_" + db_tag(db) + ".csv"), csv);

    double window_lo = -timing.heat_offset_us * 1000.0;
    ordered_json run;
    run["db_g"] = db;
    try {
      photon::PipelineStats stats =
          photon::pipeline_stats(trace, window_lo, 0.0, plateau_lo, plateau_hi, integration);
      run["rms_k"] = stats.rms_k;
      run["snr"] = stats.snr;
      run["sensitivity_k_per_sqrthz"] = stats.sensitivity;
      run["amplitude_k"] = stats.amplitude_k;
      run["flag_rate"] = stats.flag_rate;
      if (db == 0.0 && !have_amp0) {
        amp0 = stats.amplitude_k;
        have_amp0 = true;
      }
    } catch (const std::invalid_argument&) {
      // the six-point denominator collapsed across the whole window; report
      // the run as unstable instead of aborting the sweep
      std::size_t flagged = 0;
      for (auto f : trace.flag) flagged += f;
      run["rms_k"] = nullptr;
      run["snr"] = nullptr;
      run["sensitivity_k_per_sqrthz"] = nullptr;
      run["amplitude_k"] = nullptr;
      run["flag_rate"] =
          trace.flag.empty() ? 1.0 : static_cast<double>(flagged) / trace.flag.size();
    }
    runs.push_back(run);
  }
  if (have_amp0)
    for (auto& run : runs)
      if (!run["amplitude_k"].is_null())
        run["amplitude_diff_vs_db0_k"] = run["amplitude_k"].get<double>() - amp0;
  summary["runs"] = runs;
  io::write_text(ctx.out_dir / "stats.json", summary.dump(2) + "\n");
  write_metadata(ctx, "time-resolved");
}

void run_command(const std::string& command, const Context& ctx) {
  ctx.cfg.validate(command);
  std::filesystem::create_directories(ctx.out_dir);
  if (command == "spectrum") run_spectrum(ctx);
  else if (command == "robustness") run_robustness(ctx);
  else if (command == "thermal") run_thermal(ctx);
  else if (command == "time-resolved") run_time_resolved(ctx);
  else throw config::ConfigError("unknown command '" + command + "'");
}

}  // namespace dthermo::scenarios
