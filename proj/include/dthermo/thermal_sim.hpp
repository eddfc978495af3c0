#pragma once

#include <filesystem>
#include <string>
#include <vector>

// Explicit finite-difference heat diffusion on a 2D nonuniform grid of
// heterogeneous material cells. The domain is a thin sheet of thickness l;
// edges are zero-flux (Neumann) and a distributed convection term
// h (T - T_inf) / l acts as the vertical heat sink of the 2D reduction.
// Interior fluxes are assembled once per face, so closed-domain heat content
// is conserved to roundoff.
//
// Units: lengths m, time s (schedules and traces carry us), temperature degC,
// conductivity W/(m K), specific heat J/(g K), density g/m^3, sources W/m^2.
namespace dthermo::thermal {

struct MaterialCell {
  double sigma = 0.026;   // thermal conductivity
  double c_sp = 1.006;    // specific heat
  double rho_m = 1.18e3;  // mass density

  void validate() const;
  double vol_heat() const { return c_sp * rho_m; }  // J/(m^3 K)
};

inline constexpr MaterialCell kGold{310.0, 0.129, 19.3e6};
inline constexpr MaterialCell kAir{0.026, 1.006, 1.18e3};

struct ThermalGrid {
  std::vector<double> x_edges;        // m, size nx+1, strictly increasing
  std::vector<double> y_edges;        // m, size ny+1
  std::vector<MaterialCell> mat;      // row-major, iy*nx+ix
  std::vector<double> t_c;            // cell temperatures
  double thickness = 5e-7;            // sheet thickness l, m
  double h_conv = 2e8;                // W/(m^2 K); paper-calibrated effective value
  double t_inf = 26.0;                // degC

  int nx() const { return static_cast<int>(x_edges.size()) - 1; }
  int ny() const { return static_cast<int>(y_edges.size()) - 1; }
  int idx(int ix, int iy) const { return iy * nx() + ix; }
  double dx(int ix) const { return x_edges[ix + 1] - x_edges[ix]; }
  double dy(int iy) const { return y_edges[iy + 1] - y_edges[iy]; }
  double cell_area(int ix, int iy) const { return dx(ix) * dy(iy); }
  double xc(int ix) const { return 0.5 * (x_edges[ix] + x_edges[ix + 1]); }
  double yc(int iy) const { return 0.5 * (y_edges[iy] + y_edges[iy + 1]); }

  void validate() const;
};

// uniform grid of one material at a uniform temperature
ThermalGrid make_uniform_grid(int nx, int ny, double lx, double ly,
                              const MaterialCell& mat, double t0);

enum class Direction { XMinus, XPlus, YMinus, YPlus };

// conductivity-weighted temperature at the face between a cell and its
// neighbor; returns the cell's own temperature at a Neumann edge
double interface_temperature(const ThermalGrid& g, int ix, int iy, Direction dir);

// largest stable explicit step (s), including a 0.5 safety factor
double stability_limit(const ThermalGrid& g);

// spatial source map (W/m^2) gated by a repeating pulse window
struct SourceSchedule {
  std::vector<double> q_w_m2;    // per cell; empty means no source
  double start_us = 0.0;         // first pulse start
  double duration_us = 0.0;      // pulse length
  double period_us = 0.0;        // repetition period; 0 = single pulse

  void validate(const ThermalGrid& g) const;
  bool active_at(double t_us) const;
};

// one explicit update; dt above the stability limit is rejected
ThermalGrid step(const ThermalGrid& g, double dt_s, const std::vector<double>* q_w_m2 = nullptr);

struct ProbeTrace {
  int ix = 0, iy = 0;
  std::vector<double> t_us;
  std::vector<double> temp_c;
};

struct Snapshot {
  double t_us = 0.0;
  std::vector<double> t_c;
};

struct RunResult {
  std::vector<ProbeTrace> traces;
  std::vector<Snapshot> snapshots;
  double dt_s = 0.0;   // step actually used
};

// fixed-dt march to t_end, recording probe temperatures every record_every_us
// (and full fields every snapshot_every_us when > 0); dt is chosen from the
// stability limit. The grid is updated in place.
RunResult run(ThermalGrid& g, const SourceSchedule& schedule, double t_end_us,
              const std::vector<std::pair<int, int>>& probes, double record_every_us,
              double snapshot_every_us = 0.0);

// sum of rho c T over cell volumes, J/K-free absolute heat content
double heat_content(const ThermalGrid& g);

// |source power - convective loss| / source power at the current state
double energy_balance_defect(const ThermalGrid& g, const std::vector<double>& q_w_m2);

// analytic source builders (W/m^2 over the strip / Gaussian spot)
std::vector<double> strip_source(const ThermalGrid& g, double x0, double x1, double y0,
                                 double y1, double q_w_m2);
std::vector<double> gaussian_source(const ThermalGrid& g, double x0, double y0, double sigma_m,
                                    double peak_w_m2);

// matrix file format: header lines "# nx <n>", "# ny <n>", "# x_edges ...",
// "# y_edges ..." followed by ny rows of nx comma-separated values
void save_map_csv(const std::filesystem::path& path, const ThermalGrid& g,
                  const std::vector<double>& values);
std::vector<double> load_source_map(const std::filesystem::path& path, const ThermalGrid& g);

// 10%-90% rise time (us) of a monotone-rise trace, interpolated
double rise_time_10_90(const ProbeTrace& trace);

}  // namespace dthermo::thermal
