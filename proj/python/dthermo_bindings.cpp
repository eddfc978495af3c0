// pybind11 bindings for the dressed-thermo core: spin Hamiltonians, Lindblad
// steady states, ODMR point methods, the thermal solver and the photon
// pipeline, plus the scenario drivers behind the CLI.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dthermo/config.hpp"
#include "dthermo/odmr_analysis.hpp"
#include "dthermo/photon_pipeline.hpp"
#include "dthermo/scenarios.hpp"
#include "dthermo/spin_model.hpp"
#include "dthermo/thermal_sim.hpp"

namespace py = pybind11;
using namespace dthermo;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "dressed-spin-state NV thermometry simulation toolkit";

  // ---- spin model ----------------------------------------------------
  py::enum_<spin::Basis>(m, "Basis")
      .value("Bare", spin::Basis::Bare)
      .value("Dressed", spin::Basis::Dressed);

  py::class_<spin::NVParams>(m, "NVParams")
      .def(py::init([](double d0, double dd_dt, double gamma_e, double strain_e) {
             spin::NVParams nv{d0, dd_dt, gamma_e, strain_e};
             nv.validate();
             return nv;
           }),
           py::arg("d0") = 2870.0, py::arg("dd_dt") = -0.074, py::arg("gamma_e") = 2.8,
           py::arg("strain_e") = 0.0)
      .def_readonly("d0", &spin::NVParams::d0)
      .def_readonly("dd_dt", &spin::NVParams::dd_dt)
      .def_readonly("gamma_e", &spin::NVParams::gamma_e)
      .def_readonly("strain_e", &spin::NVParams::strain_e);

  py::class_<spin::FieldVector>(m, "FieldVector")
      .def(py::init([](double b_mag, double theta) {
             spin::FieldVector f{b_mag, theta};
             f.validate();
             return f;
           }),
           py::arg("b_mag"), py::arg("theta") = 0.0)
      .def_readonly("b_mag", &spin::FieldVector::b_mag)
      .def_readonly("theta", &spin::FieldVector::theta)
      .def_property_readonly("bz", &spin::FieldVector::bz)
      .def_property_readonly("bx", &spin::FieldVector::bx);

  py::class_<spin::DriveParams>(m, "DriveParams")
      .def_readonly("omega", &spin::DriveParams::omega)
      .def_readonly("omega1", &spin::DriveParams::omega1)
      .def_readonly("omega2", &spin::DriveParams::omega2)
      .def_readonly("valid", &spin::DriveParams::valid)
      .def_readonly("diagnostic", &spin::DriveParams::diagnostic)
      .def_property_readonly("f_avg", &spin::DriveParams::f_avg)
      .def_property_readonly("splitting", &spin::DriveParams::splitting);

  m.def("resonant_drive", &spin::resonant_drive, py::arg("nv"), py::arg("field"),
        py::arg("omega"), "two tones placed on the exact transition frequencies");

  m.def(
      "bare_hamiltonian",
      [](const spin::NVParams& nv, const spin::FieldVector& b, double t_shift) {
        return spin::bare_hamiltonian(nv, b, t_shift).m;
      },
      py::arg("nv"), py::arg("field"), py::arg("t_shift_k") = 0.0,
      "3x3 lab-frame Hamiltonian in the |+1>,|0>,|-1> basis (MHz)");

  m.def(
      "transition_frequencies",
      [](const spin::NVParams& nv, const spin::FieldVector& b, double t_shift) {
        return spin::transition_frequencies(spin::bare_hamiltonian(nv, b, t_shift));
      },
      py::arg("nv"), py::arg("field"), py::arg("t_shift_k") = 0.0);

  m.def(
      "lambda_approx",
      [](const spin::NVParams& nv, const spin::FieldVector& b) {
        auto lam = spin::lambda_approx(nv, b);
        return py::make_tuple(lam.lambda_minus, lam.lambda_plus, lam.series_ok);
      },
      py::arg("nv"), py::arg("field"),
      "(lambda_minus, lambda_plus, series_ok) second-order level splittings");

  m.def(
      "dressed_hamiltonian",
      [](double delta_d, double delta_b, const spin::DriveParams& drive) {
        return spin::dressed_hamiltonian({delta_d, delta_b}, drive).m;
      },
      py::arg("delta_d"), py::arg("delta_b"), py::arg("drive"),
      "3x3 dressed-frame Hamiltonian in the |Bright>,|0>,|Dark> basis (MHz)");

  m.def(
      "dressed_detuning",
      [](const spin::NVParams& nv, const spin::FieldVector& b, double d_shift, double dbz,
         double dbx) {
        auto det = spin::dressed_detuning(nv, b, {d_shift, dbz, dbx});
        return py::make_tuple(det.delta_d, det.delta_b);
      },
      py::arg("nv"), py::arg("field"), py::arg("d_shift") = 0.0, py::arg("dbz") = 0.0,
      py::arg("dbx") = 0.0);

  // ---- lindblad + spectra ---------------------------------------------
  py::class_<lindblad::CollapseSet>(m, "CollapseSet")
      .def(py::init([](double gamma_gl) {
             return lindblad::CollapseSet{gamma_gl, spin::Basis::Dressed};
           }),
           py::arg("gamma_gl") = 10.0)
      .def_readonly("gamma_gl", &lindblad::CollapseSet::gamma_gl);

  py::class_<lindblad::ReadoutModel>(m, "ReadoutModel")
      .def(py::init([](double r_base, double c_max) {
             lindblad::ReadoutModel r{r_base, c_max};
             r.validate();
             return r;
           }),
           py::arg("r_base") = 1e6, py::arg("c_max") = 0.2)
      .def_readonly("r_base", &lindblad::ReadoutModel::r_base)
      .def_readonly("c_max", &lindblad::ReadoutModel::c_max);

  py::class_<odmr::SweepConfig>(m, "SweepConfig")
      .def_property_readonly("f_grid",
                             [](const odmr::SweepConfig& c) { return to_array(c.f_grid); });

  m.def("make_sweep", &odmr::make_sweep, py::arg("drive"), py::arg("collapse"),
        py::arg("readout"), py::arg("points") = 121, py::arg("span_mhz") = 0.0);

  py::class_<odmr::LorentzianFit>(m, "LorentzianFit")
      .def_readonly("f_avg", &odmr::LorentzianFit::f_avg)
      .def_readonly("gamma", &odmr::LorentzianFit::gamma)
      .def_readonly("c0", &odmr::LorentzianFit::c0)
      .def_readonly("baseline", &odmr::LorentzianFit::baseline)
      .def_readonly("residual_rms", &odmr::LorentzianFit::residual_rms)
      .def_readonly("converged", &odmr::LorentzianFit::converged)
      .def_readonly("iterations", &odmr::LorentzianFit::iterations);

  m.def(
      "simulate_spectrum",
      [](const spin::NVParams& nv, const spin::FieldVector& b, const odmr::SweepConfig& cfg,
         double d_shift, double dbz, double dbx) {
        auto s = odmr::simulate_spectrum(nv, b, {d_shift, dbz, dbx}, cfg);
        return py::make_tuple(to_array(s.f_mhz), to_array(s.pl_cps));
      },
      py::arg("nv"), py::arg("field"), py::arg("sweep"), py::arg("d_shift") = 0.0,
      py::arg("dbz") = 0.0, py::arg("dbx") = 0.0,
      "(f_MHz, pl_cps) steady-state DS-ODMR curve");

  m.def(
      "spectrum_point",
      [](const spin::NVParams& nv, const spin::FieldVector& b, const odmr::SweepConfig& cfg,
         double f_mhz, double d_shift, double dbz, double dbx) {
        return odmr::spectrum_point(nv, b, {d_shift, dbz, dbx}, cfg, f_mhz);
      },
      py::arg("nv"), py::arg("field"), py::arg("sweep"), py::arg("f_mhz"),
      py::arg("d_shift") = 0.0, py::arg("dbz") = 0.0, py::arg("dbx") = 0.0);

  m.def(
      "fit_lorentzian",
      [](py::array_t<double> f, py::array_t<double> pl) {
        odmr::Spectrum s;
        s.f_mhz.assign(f.data(), f.data() + f.size());
        s.pl_cps.assign(pl.data(), pl.data() + pl.size());
        return odmr::fit_lorentzian(s);
      },
      py::arg("f_mhz"), py::arg("pl_cps"));

  m.def("three_point_shift", &odmr::three_point_shift, py::arg("p_b"), py::arg("p_e"),
        py::arg("p_0"), py::arg("gamma"));

  m.def(
      "six_point_frequencies",
      [](double f_avg, double gamma, double d_omega) {
        return odmr::six_point_frequencies(f_avg, gamma, d_omega).freqs;
      },
      py::arg("f_avg"), py::arg("gamma"), py::arg("d_omega") = 1.0);

  m.def(
      "six_point_temperature",
      [](const std::array<double, 6>& p, double d_omega, double dd_dt) {
        return odmr::six_point_temperature(p, d_omega, dd_dt);
      },
      py::arg("p"), py::arg("d_omega"), py::arg("dd_dt"));

  m.def("shot_noise_sensitivity", &odmr::shot_noise_sensitivity, py::arg("gamma"), py::arg("c0"),
        py::arg("r_cps"), py::arg("dd_dt"));

  m.def("dressed_slope", &odmr::dressed_slope, py::arg("nv"), py::arg("field"), py::arg("omega"),
        py::arg("collapse"), py::arg("readout"), py::arg("h_g") = 0.2,
        py::arg("fit_points") = 121, "three-point d f_avg / d|B| in MHz/G");

  m.def("bare_slope", &odmr::bare_slope, py::arg("nv"), py::arg("field"), py::arg("h_g") = 0.2);

  m.def(
      "field_robustness_map",
      [](const spin::NVParams& nv, double omega, const lindblad::CollapseSet& collapse,
         const lindblad::ReadoutModel& readout, const std::vector<double>& b_grid,
         const std::vector<double>& theta_grid, double h_g, unsigned threads) {
        auto map = odmr::field_robustness_map(nv, omega, collapse, readout, b_grid, theta_grid,
                                              h_g, threads);
        py::array_t<double> slopes({theta_grid.size(), b_grid.size()});
        auto w = slopes.mutable_unchecked<2>();
        for (std::size_t it = 0; it < theta_grid.size(); ++it)
          for (std::size_t ib = 0; ib < b_grid.size(); ++ib) {
            const auto& cell = map.cells[it * b_grid.size() + ib];
            w(it, ib) = cell.valid ? cell.slope_khz_per_g
                                   : std::numeric_limits<double>::quiet_NaN();
          }
        return slopes;
      },
      py::arg("nv"), py::arg("omega"), py::arg("collapse"), py::arg("readout"),
      py::arg("b_grid"), py::arg("theta_grid"), py::arg("h_g") = 0.2, py::arg("threads") = 0,
      "slope map in kHz/G, shape (len(theta_grid), len(b_grid)), NaN = invalid cell");

  // ---- thermal solver --------------------------------------------------
  py::class_<thermal::MaterialCell>(m, "MaterialCell")
      .def(py::init([](double sigma, double c_sp, double rho_m) {
             thermal::MaterialCell mc{sigma, c_sp, rho_m};
             mc.validate();
             return mc;
           }),
           py::arg("sigma"), py::arg("c_sp"), py::arg("rho_m"))
      .def_readonly("sigma", &thermal::MaterialCell::sigma)
      .def_readonly("c_sp", &thermal::MaterialCell::c_sp)
      .def_readonly("rho_m", &thermal::MaterialCell::rho_m);

  m.attr("GOLD") = thermal::kGold;
  m.attr("AIR") = thermal::kAir;

  py::class_<thermal::ThermalGrid>(m, "ThermalGrid")
      .def_property_readonly("nx", &thermal::ThermalGrid::nx)
      .def_property_readonly("ny", &thermal::ThermalGrid::ny)
      .def_readwrite("thickness", &thermal::ThermalGrid::thickness)
      .def_readwrite("h_conv", &thermal::ThermalGrid::h_conv)
      .def_readwrite("t_inf", &thermal::ThermalGrid::t_inf)
      .def("set_material_rect",
           [](thermal::ThermalGrid& g, double x0, double x1, double y0, double y1,
              const thermal::MaterialCell& mat) {
             for (int iy = 0; iy < g.ny(); ++iy)
               for (int ix = 0; ix < g.nx(); ++ix)
                 if (g.xc(ix) >= x0 && g.xc(ix) < x1 && g.yc(iy) >= y0 && g.yc(iy) < y1)
                   g.mat[g.idx(ix, iy)] = mat;
           })
      .def_property_readonly("temperature", [](const thermal::ThermalGrid& g) {
        py::array_t<double> out({static_cast<py::ssize_t>(g.ny()),
                                 static_cast<py::ssize_t>(g.nx())});
        std::copy(g.t_c.begin(), g.t_c.end(), out.mutable_data());
        return out;
      });

  m.def("make_uniform_grid", &thermal::make_uniform_grid, py::arg("nx"), py::arg("ny"),
        py::arg("lx"), py::arg("ly"), py::arg("material"), py::arg("t0"));
  m.def("stability_limit", &thermal::stability_limit, py::arg("grid"));
  m.def("strip_source", &thermal::strip_source, py::arg("grid"), py::arg("x0"), py::arg("x1"),
        py::arg("y0"), py::arg("y1"), py::arg("q_w_m2"));
  m.def("gaussian_source", &thermal::gaussian_source, py::arg("grid"), py::arg("x0"),
        py::arg("y0"), py::arg("sigma_m"), py::arg("peak_w_m2"));

  m.def(
      "thermal_run",
      [](thermal::ThermalGrid& grid, const std::vector<double>& q_w_m2, double start_us,
         double duration_us, double period_us, double t_end_us,
         const std::vector<std::pair<int, int>>& probes, double record_every_us) {
        thermal::SourceSchedule schedule{q_w_m2, start_us, duration_us, period_us};
        auto result = thermal::run(grid, schedule, t_end_us, probes, record_every_us);
        py::list traces;
        for (const auto& tr : result.traces)
          traces.append(py::make_tuple(to_array(tr.t_us), to_array(tr.temp_c)));
        return traces;
      },
      py::arg("grid"), py::arg("q_w_m2"), py::arg("start_us"), py::arg("duration_us"),
      py::arg("period_us"), py::arg("t_end_us"), py::arg("probes"),
      py::arg("record_every_us") = 0.01,
      "march the grid in place; returns [(t_us, T_C), ...] per probe");

  // ---- photon pipeline ---------------------------------------------------
  py::class_<photon::TimingConfig>(m, "TimingConfig")
      .def(py::init([](double cycle_us, double slot_us, double bin_ns, double dead_us,
                       double heat_offset_us, double heat_duration_us, double heat_period_us,
                       int box) {
             photon::TimingConfig t{cycle_us, slot_us, bin_ns, dead_us, heat_offset_us,
                                    heat_duration_us, heat_period_us, box};
             t.validate();
             return t;
           }),
           py::arg("cycle_us") = 60.0, py::arg("slot_us") = 10.0, py::arg("bin_ns") = 16.0,
           py::arg("dead_us") = 4.0, py::arg("heat_offset_us") = 7.0,
           py::arg("heat_duration_us") = 3.0, py::arg("heat_period_us") = 10.0,
           py::arg("box") = 3)
      .def_readonly("cycle_us", &photon::TimingConfig::cycle_us)
      .def_readonly("bin_ns", &photon::TimingConfig::bin_ns)
      .def_readonly("box", &photon::TimingConfig::box)
      .def_property_readonly("bins_per_slot", &photon::TimingConfig::bins_per_slot)
      .def_property_readonly("dead_bins", &photon::TimingConfig::dead_bins);

  m.def(
      "pipeline_temperature_trace",
      [](const std::function<double(double)>& profile,
         const std::function<double(int, double)>& rate_cps, const photon::TimingConfig& timing,
         std::uint64_t n, std::uint64_t seed, const std::array<double, 6>& freqs, double d_omega,
         double gamma_ref, double dd_dt, bool poisson, double flag_sigma) {
        auto stream = photon::synthesize_stream(profile, rate_cps, timing, n, seed, 1, poisson);
        auto stacked = photon::stack_by_delay(photon::remove_dead_time(stream, timing), timing);
        odmr::SixPointSet six{freqs, d_omega, gamma_ref};
        auto tr = photon::to_temperature(stacked, six, dd_dt, timing, flag_sigma);
        py::array_t<bool> flags(static_cast<py::ssize_t>(tr.flag.size()));
        for (std::size_t i = 0; i < tr.flag.size(); ++i)
          flags.mutable_data()[i] = tr.flag[i] != 0;
        return py::make_tuple(to_array(tr.delay_ns), to_array(tr.dt_k), flags);
      },
      py::arg("profile"), py::arg("rate_cps"), py::arg("timing"), py::arg("n"), py::arg("seed"),
      py::arg("freqs"), py::arg("d_omega"), py::arg("gamma_ref"), py::arg("dd_dt"),
      py::arg("poisson") = true, py::arg("flag_sigma") = 5.0,
      "synthesize -> dead-time cut -> stack -> six-point; returns (delay_ns, dT_K, flags)");

  // ---- scenario drivers ----------------------------------------------------
  m.def(
      "run_scenario",
      [](const std::string& command, const std::filesystem::path& config_path,
         const std::filesystem::path& out_dir, py::object seed, unsigned threads) {
        scenarios::Context ctx;
        ctx.cfg = config::Config::parse_file(config_path);
        ctx.seed = seed.is_none()
                       ? static_cast<std::uint64_t>(ctx.cfg.get_int("", "seed", 0))
                       : seed.cast<std::uint64_t>();
        ctx.out_dir = out_dir;
        ctx.threads = threads;
        scenarios::run_command(command, ctx);
      },
      py::arg("command"), py::arg("config_path"), py::arg("out_dir"),
      py::arg("seed") = py::none(), py::arg("threads") = 0,
      "run one CLI scenario: spectrum | robustness | thermal | time-resolved");

  py::register_exception<config::ConfigError>(m, "ConfigError");
}
