#include "dthermo/thermal_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dthermo::thermal {

void MaterialCell::validate() const {
  if (sigma <= 0.0 || c_sp <= 0.0 || rho_m <= 0.0)
    throw std::invalid_argument("MaterialCell: sigma, c_sp, rho_m must all be > 0");
}

void ThermalGrid::validate() const {
  if (x_edges.size() < 2 || y_edges.size() < 2)
    throw std::invalid_argument("ThermalGrid: need at least one cell per axis");
  for (std::size_t i = 1; i < x_edges.size(); ++i)
    if (x_edges[i] <= x_edges[i - 1])
      throw std::invalid_argument("ThermalGrid: x edges must be strictly increasing");
  for (std::size_t i = 1; i < y_edges.size(); ++i)
    if (y_edges[i] <= y_edges[i - 1])
      throw std::invalid_argument("ThermalGrid: y edges must be strictly increasing");
  std::size_t n = static_cast<std::size_t>(nx()) * ny();
  if (mat.size() != n || t_c.size() != n)
    throw std::invalid_argument("ThermalGrid: cell array sizes do not match the edges");
  if (thickness <= 0.0) throw std::invalid_argument("ThermalGrid: thickness must be > 0");
  if (h_conv < 0.0) throw std::invalid_argument("ThermalGrid: h_conv must be >= 0");
  for (const auto& m : mat) m.validate();
  for (double t : t_c)
    if (!std::isfinite(t)) throw std::invalid_argument("ThermalGrid: non-finite temperature");
}

ThermalGrid make_uniform_grid(int nx, int ny, double lx, double ly, const MaterialCell& mat,
                              double t0) {
  if (nx < 1 || ny < 1 || lx <= 0.0 || ly <= 0.0)
    throw std::invalid_argument("make_uniform_grid: bad dimensions");
  ThermalGrid g;
  g.x_edges.resize(nx + 1);
  g.y_edges.resize(ny + 1);
  for (int i = 0; i <= nx; ++i) g.x_edges[i] = lx * i / nx;
  for (int j = 0; j <= ny; ++j) g.y_edges[j] = ly * j / ny;
  g.mat.assign(static_cast<std::size_t>(nx) * ny, mat);
  g.t_c.assign(static_cast<std::size_t>(nx) * ny, t0);
  return g;
}

double interface_temperature(const ThermalGrid& g, int ix, int iy, Direction dir) {
  int jx = ix, jy = iy;
  double di = 0.0, dj = 0.0;  // half-widths along the face normal
  switch (dir) {
    case Direction::XMinus: jx = ix - 1; di = 0.5 * g.dx(ix); break;
    case Direction::XPlus:  jx = ix + 1; di = 0.5 * g.dx(ix); break;
    case Direction::YMinus: jy = iy - 1; di = 0.5 * g.dy(iy); break;
    case Direction::YPlus:  jy = iy + 1; di = 0.5 * g.dy(iy); break;
  }
  if (jx < 0 || jx >= g.nx() || jy < 0 || jy >= g.ny())
    return g.t_c[g.idx(ix, iy)];  // Neumann edge: zero flux
  dj = (dir == Direction::XMinus || dir == Direction::XPlus) ? 0.5 * g.dx(jx) : 0.5 * g.dy(jy);
  // flux continuity across the two half-cells; reduces to the plain
  // sigma-weighted mean when the half-widths agree
  double wi = g.mat[g.idx(ix, iy)].sigma / di;
  double wj = g.mat[g.idx(jx, jy)].sigma / dj;
  return (wi * g.t_c[g.idx(ix, iy)] + wj * g.t_c[g.idx(jx, jy)]) / (wi + wj);
}

namespace {

// series conductance per unit face area between two cells, W/(m^2 K)
inline double face_conductance(const MaterialCell& a, double half_a, const MaterialCell& b,
                               double half_b) {
  return 1.0 / (half_a / a.sigma + half_b / b.sigma);
}

}  // namespace

double stability_limit(const ThermalGrid& g) {
  g.validate();
  const int nx = g.nx(), ny = g.ny();
  double dt = std::numeric_limits<double>::infinity();
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int i = g.idx(ix, iy);
      double coeff = 0.0;  // sum of face conductance * face area, W/K
      if (ix > 0)
        coeff += face_conductance(g.mat[i], 0.5 * g.dx(ix), g.mat[g.idx(ix - 1, iy)],
                                  0.5 * g.dx(ix - 1)) * g.dy(iy) * g.thickness;
      if (ix + 1 < nx)
        coeff += face_conductance(g.mat[i], 0.5 * g.dx(ix), g.mat[g.idx(ix + 1, iy)],
                                  0.5 * g.dx(ix + 1)) * g.dy(iy) * g.thickness;
      if (iy > 0)
        coeff += face_conductance(g.mat[i], 0.5 * g.dy(iy), g.mat[g.idx(ix, iy - 1)],
                                  0.5 * g.dy(iy - 1)) * g.dx(ix) * g.thickness;
      if (iy + 1 < ny)
        coeff += face_conductance(g.mat[i], 0.5 * g.dy(iy), g.mat[g.idx(ix, iy + 1)],
                                  0.5 * g.dy(iy + 1)) * g.dx(ix) * g.thickness;
      coeff += g.h_conv * g.cell_area(ix, iy);  // convective sink
      if (coeff <= 0.0) continue;
      double cap = g.mat[i].vol_heat() * g.cell_area(ix, iy) * g.thickness;  // J/K
      dt = std::min(dt, cap / coeff);
    }
  }
  return 0.5 * dt;
}

void SourceSchedule::validate(const ThermalGrid& g) const {
  if (!q_w_m2.empty() && q_w_m2.size() != g.t_c.size())
    throw std::invalid_argument("SourceSchedule: map size does not match the grid");
  for (double q : q_w_m2)
    if (q < 0.0 || !std::isfinite(q))
      throw std::invalid_argument("SourceSchedule: source density must be finite and >= 0");
  if (duration_us < 0.0) throw std::invalid_argument("SourceSchedule: negative duration");
  if (period_us > 0.0 && duration_us > period_us)
    throw std::invalid_argument("SourceSchedule: duration exceeds period");
}

bool SourceSchedule::active_at(double t_us) const {
  if (q_w_m2.empty() || duration_us <= 0.0) return false;
  if (t_us < start_us) return false;
  double local = t_us - start_us;
  if (period_us > 0.0) local = std::fmod(local, period_us);
  return local < duration_us;
}

namespace {

// one explicit flux-form update: reads `in`, writes `out`
void step_kernel(const ThermalGrid& g, const std::vector<double>& in, std::vector<double>& out,
                 double dt_s, const std::vector<double>* q) {
  const int nx = g.nx(), ny = g.ny();
  const double l = g.thickness;
  out = in;

  // interior faces once each; heat leaving one cell enters the other
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const int i = g.idx(ix, iy), j = g.idx(ix + 1, iy);
      double gfc = face_conductance(g.mat[i], 0.5 * g.dx(ix), g.mat[j], 0.5 * g.dx(ix + 1));
      double q_face = gfc * (in[j] - in[i]) * g.dy(iy) * l * dt_s;  // J into i
      out[i] += q_face / (g.mat[i].vol_heat() * g.cell_area(ix, iy) * l);
      out[j] -= q_face / (g.mat[j].vol_heat() * g.cell_area(ix + 1, iy) * l);
    }
  }
  for (int iy = 0; iy + 1 < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int i = g.idx(ix, iy), j = g.idx(ix, iy + 1);
      double gfc = face_conductance(g.mat[i], 0.5 * g.dy(iy), g.mat[j], 0.5 * g.dy(iy + 1));
      double q_face = gfc * (in[j] - in[i]) * g.dx(ix) * l * dt_s;
      out[i] += q_face / (g.mat[i].vol_heat() * g.cell_area(ix, iy) * l);
      out[j] -= q_face / (g.mat[j].vol_heat() * g.cell_area(ix, iy + 1) * l);
    }
  }

  // source heats, convection cools toward T_inf; both per unit surface area
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int i = g.idx(ix, iy);
      double dq = 0.0;
      if (q) dq += (*q)[i];
      dq -= g.h_conv * (in[i] - g.t_inf);
      out[i] += dq * dt_s / (g.mat[i].vol_heat() * l);
    }
  }
}

}  // namespace

ThermalGrid step(const ThermalGrid& g, double dt_s, const std::vector<double>* q_w_m2) {
  g.validate();
  if (q_w_m2 && q_w_m2->size() != g.t_c.size())
    throw std::invalid_argument("step: source map size does not match the grid");
  double limit = stability_limit(g);
  if (dt_s > limit * (1.0 + 1e-12))
    throw std::invalid_argument("step: dt exceeds the stability limit (" + std::to_string(limit) +
                                " s)");
  ThermalGrid out = g;
  step_kernel(g, g.t_c, out.t_c, dt_s, q_w_m2);
  return out;
}

RunResult run(ThermalGrid& g, const SourceSchedule& schedule, double t_end_us,
              const std::vector<std::pair<int, int>>& probes, double record_every_us,
              double snapshot_every_us) {
  g.validate();
  schedule.validate(g);
  if (t_end_us <= 0.0) throw std::invalid_argument("run: t_end must be > 0");
  if (record_every_us <= 0.0) throw std::invalid_argument("run: record interval must be > 0");

  RunResult result;
  result.dt_s = stability_limit(g);
  const double dt_us = result.dt_s * 1e6;
  const long nsteps = static_cast<long>(std::ceil(t_end_us / dt_us));

  result.traces.resize(probes.size());
  for (std::size_t p = 0; p < probes.size(); ++p) {
    auto [ix, iy] = probes[p];
    if (ix < 0 || ix >= g.nx() || iy < 0 || iy >= g.ny())
      throw std::invalid_argument("run: probe outside the grid");
    result.traces[p].ix = ix;
    result.traces[p].iy = iy;
  }

  std::vector<double> scratch(g.t_c.size());
  const bool has_source = !schedule.q_w_m2.empty();
  double next_record = 0.0;
  double next_snapshot = snapshot_every_us > 0.0 ? snapshot_every_us : -1.0;

  auto record = [&](double t_us) {
    for (std::size_t p = 0; p < probes.size(); ++p) {
      result.traces[p].t_us.push_back(t_us);
      result.traces[p].temp_c.push_back(g.t_c[g.idx(result.traces[p].ix, result.traces[p].iy)]);
    }
  };

  record(0.0);
  next_record = record_every_us;

  for (long s = 0; s < nsteps; ++s) {
    double t_us = s * dt_us;
    const std::vector<double>* q = has_source && schedule.active_at(t_us) ? &schedule.q_w_m2 : nullptr;
    step_kernel(g, g.t_c, scratch, result.dt_s, q);
    g.t_c.swap(scratch);
    double t_next = (s + 1) * dt_us;
    if (t_next + 1e-12 >= next_record) {
      record(t_next);
      next_record += record_every_us;
    }
    if (next_snapshot > 0.0 && t_next + 1e-12 >= next_snapshot) {
      result.snapshots.push_back({t_next, g.t_c});
      next_snapshot += snapshot_every_us;
    }
  }
  return result;
}

double heat_content(const ThermalGrid& g) {
  double acc = 0.0;
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix)
      acc += g.mat[g.idx(ix, iy)].vol_heat() * g.t_c[g.idx(ix, iy)] * g.cell_area(ix, iy) *
             g.thickness;
  return acc;
}

double energy_balance_defect(const ThermalGrid& g, const std::vector<double>& q_w_m2) {
  if (q_w_m2.size() != g.t_c.size())
    throw std::invalid_argument("energy_balance_defect: source map size mismatch");
  double in = 0.0, out = 0.0;
  for (int iy = 0; iy < g.ny(); ++iy) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      const int i = g.idx(ix, iy);
      in += q_w_m2[i] * g.cell_area(ix, iy);
      out += g.h_conv * (g.t_c[i] - g.t_inf) * g.cell_area(ix, iy);
    }
  }
  if (in == 0.0) return std::abs(out);
  return std::abs(in - out) / in;
}

std::vector<double> strip_source(const ThermalGrid& g, double x0, double x1, double y0, double y1,
                                 double q_w_m2) {
  if (q_w_m2 < 0.0) throw std::invalid_argument("strip_source: negative power density");
  std::vector<double> q(g.t_c.size(), 0.0);
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix)
      if (g.xc(ix) >= x0 && g.xc(ix) < x1 && g.yc(iy) >= y0 && g.yc(iy) < y1)
        q[g.idx(ix, iy)] = q_w_m2;
  return q;
}

std::vector<double> gaussian_source(const ThermalGrid& g, double x0, double y0, double sigma_m,
                                    double peak_w_m2) {
  if (sigma_m <= 0.0) throw std::invalid_argument("gaussian_source: sigma must be > 0");
  if (peak_w_m2 < 0.0) throw std::invalid_argument("gaussian_source: negative power density");
  std::vector<double> q(g.t_c.size(), 0.0);
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) {
      double rx = g.xc(ix) - x0, ry = g.yc(iy) - y0;
      q[g.idx(ix, iy)] = peak_w_m2 * std::exp(-0.5 * (rx * rx + ry * ry) / (sigma_m * sigma_m));
    }
  return q;
}

void save_map_csv(const std::filesystem::path& path, const ThermalGrid& g,
                  const std::vector<double>& values) {
  if (values.size() != g.t_c.size())
    throw std::invalid_argument("save_map_csv: value array size mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_map_csv: cannot open " + path.string());
  char buf[32];
  out << "# nx " << g.nx() << "\n# ny " << g.ny() << "\n";
  out << "# x_edges";
  for (double x : g.x_edges) { std::snprintf(buf, sizeof buf, " %.17g", x); out << buf; }
  out << "\n# y_edges";
  for (double y : g.y_edges) { std::snprintf(buf, sizeof buf, " %.17g", y); out << buf; }
  out << "\n";
  for (int iy = 0; iy < g.ny(); ++iy) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      std::snprintf(buf, sizeof buf, "%.17g", values[g.idx(ix, iy)]);
      out << buf << (ix + 1 < g.nx() ? "," : "");
    }
    out << "\n";
  }
}

std::vector<double> load_source_map(const std::filesystem::path& path, const ThermalGrid& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_source_map: cannot open " + path.string());
  std::vector<double> values;
  values.reserve(g.t_c.size());
  std::string line;
  int nx_file = -1, ny_file = -1;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "nx") hs >> nx_file;
      if (key == "ny") hs >> ny_file;
      continue;
    }
    std::istringstream ls(line);
    std::string tok;
    int col = 0;
    while (std::getline(ls, tok, ',')) {
      double v = 0.0;
      try {
        std::size_t pos = 0;
        v = std::stod(tok, &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw std::runtime_error("load_source_map: malformed value '" + tok + "' at row " +
                                 std::to_string(row));
      }
      if (v < 0.0)
        throw std::runtime_error("load_source_map: negative power at row " + std::to_string(row));
      values.push_back(v);
      ++col;
    }
    if (col != g.nx())
      throw std::runtime_error("load_source_map: row " + std::to_string(row) + " has " +
                               std::to_string(col) + " columns, grid expects " +
                               std::to_string(g.nx()));
    ++row;
  }
  if ((nx_file >= 0 && nx_file != g.nx()) || (ny_file >= 0 && ny_file != g.ny()) ||
      row != g.ny())
    throw std::runtime_error("load_source_map: dimensions do not match the grid");
  return values;
}

double rise_time_10_90(const ProbeTrace& trace) {
  if (trace.temp_c.size() < 3) throw std::invalid_argument("rise_time_10_90: trace too short");
  double lo = trace.temp_c.front();
  double hi = *std::max_element(trace.temp_c.begin(), trace.temp_c.end());
  if (hi <= lo) throw std::invalid_argument("rise_time_10_90: trace does not rise");
  double t10 = trace.temp_c.front(), t90 = trace.t_us.back();
  auto crossing = [&](double level) {
    for (std::size_t i = 1; i < trace.temp_c.size(); ++i) {
      if (trace.temp_c[i - 1] < level && trace.temp_c[i] >= level) {
        double f = (level - trace.temp_c[i - 1]) / (trace.temp_c[i] - trace.temp_c[i - 1]);
        return trace.t_us[i - 1] + f * (trace.t_us[i] - trace.t_us[i - 1]);
      }
    }
    return trace.t_us.back();
  };
  t10 = crossing(lo + 0.1 * (hi - lo));
  t90 = crossing(lo + 0.9 * (hi - lo));
  return t90 - t10;
}

}  // namespace dthermo::thermal
