#include "dthermo/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace dthermo::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

struct KeySpec {
  const char* section;
  const char* key;
};

// the full closed schema; one entry per accepted key
const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> kSchema = {
      {"", "scenario"}, {"", "seed"}, {"", "out_dir"},
      {"nv", "d0_mhz"}, {"nv", "dd_dt_mhz_per_k"}, {"nv", "gamma_e_mhz_per_g"}, {"nv", "e_mhz"},
      {"field", "b_g"}, {"field", "theta_rad"},
      {"drive", "omega_mhz"},
      {"collapse", "gamma_gl_mhz"},
      {"readout", "r_base_cps"}, {"readout", "c_max"},
      {"sweep", "points"}, {"sweep", "span_mhz"}, {"sweep", "db_list_g"},
      {"robustness", "mode"}, {"robustness", "h_g"},
      {"robustness", "db_span_g"}, {"robustness", "db_points"},
      {"robustness", "b_min_g"}, {"robustness", "b_max_g"}, {"robustness", "b_points"},
      {"robustness", "theta_min_rad"}, {"robustness", "theta_max_rad"},
      {"robustness", "theta_points"},
      {"sixpoint", "d_omega_mhz"},
      {"timing", "cycle_us"}, {"timing", "slot_us"}, {"timing", "bin_ns"}, {"timing", "dead_us"},
      {"timing", "heat_offset_us"}, {"timing", "heat_duration_us"}, {"timing", "heat_period_us"},
      {"timing", "box"},
      {"timeresolved", "n"}, {"timeresolved", "db_list_g"}, {"timeresolved", "profile"},
      {"timeresolved", "amplitude_k"}, {"timeresolved", "rise_time_us"},
      {"timeresolved", "fall_time_us"}, {"timeresolved", "trace_csv"},
      {"timeresolved", "trace_probe"},
      {"timeresolved", "save_stream"}, {"timeresolved", "flag_sigma"},
      {"thermal", "nx"}, {"thermal", "ny"}, {"thermal", "lx_um"}, {"thermal", "ly_um"},
      {"thermal", "strip_x0_um"}, {"thermal", "strip_x1_um"}, {"thermal", "strip_y0_um"},
      {"thermal", "strip_y1_um"}, {"thermal", "q_w_m2"}, {"thermal", "source_csv"},
      {"thermal", "source"}, {"thermal", "gauss_x0_um"}, {"thermal", "gauss_y0_um"},
      {"thermal", "gauss_sigma_um"}, {"thermal", "gauss_peak_w_m2"},
      {"thermal", "l_nm"}, {"thermal", "h_w_m2k"}, {"thermal", "t_inf_c"},
      {"thermal", "t_initial_c"}, {"thermal", "t_end_us"}, {"thermal", "record_every_us"},
      {"thermal", "snapshot_every_us"}, {"thermal", "probes"}, {"thermal", "gzip_snapshots"},
      {"thermal", "pulse_start_us"}, {"thermal", "pulse_duration_us"},
      {"thermal", "pulse_period_us"},
  };
  return kSchema;
}

struct Requirement {
  const char* command;
  const char* section;
  const char* key;
};

const std::vector<Requirement>& requirements() {
  static const std::vector<Requirement> kReq = {
      {"spectrum", "field", "b_g"},
      {"spectrum", "drive", "omega_mhz"},
      {"robustness", "robustness", "mode"},
      {"robustness", "drive", "omega_mhz"},
      {"thermal", "thermal", "nx"},
      {"thermal", "thermal", "ny"},
      {"thermal", "thermal", "lx_um"},
      {"thermal", "thermal", "ly_um"},
      {"thermal", "thermal", "t_end_us"},
      {"time-resolved", "field", "b_g"},
      {"time-resolved", "drive", "omega_mhz"},
      {"time-resolved", "timeresolved", "n"},
  };
  return kReq;
}

}  // namespace

std::vector<std::string> known_commands() {
  return {"spectrum", "robustness", "thermal", "time-resolved"};
}

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path.string());
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    auto& sec = cfg.sections_[section];
    if (sec.count(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                        (section.empty() ? key : section + "." + key) + "'");
    sec[key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::raw(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) throw ConfigError("missing required field '" +
                                              (section.empty() ? key : section + "." + key) + "'");
  auto k = s->second.find(key);
  if (k == s->second.end()) throw ConfigError("missing required field '" +
                                              (section.empty() ? key : section + "." + key) + "'");
  return k->second;
}

std::string Config::require_string(const std::string& section, const std::string& key) const {
  return raw(section, key);
}

namespace {

double parse_double(const std::string& v, const std::string& field) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("field '" + field + "': expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, const std::string& field) {
  try {
    std::size_t pos = 0;
    // accept scientific notation for counts like 1.5e8
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    long long i = static_cast<long long>(d);
    if (static_cast<double>(i) != d)
      throw std::invalid_argument("not integral");
    return i;
  } catch (const std::exception&) {
    throw ConfigError("field '" + field + "': expected an integer, got '" + v + "'");
  }
}

}  // namespace

double Config::require_double(const std::string& section, const std::string& key) const {
  return parse_double(raw(section, key), section.empty() ? key : section + "." + key);
}

long long Config::require_int(const std::string& section, const std::string& key) const {
  return parse_int(raw(section, key), section.empty() ? key : section + "." + key);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? raw(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? require_double(section, key) : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  return has(section, key) ? require_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = raw(section, key);
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("field '" + (section.empty() ? key : section + "." + key) +
                    "': expected a boolean, got '" + v + "'");
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key,
                                     const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  std::istringstream in(raw(section, key));
  std::vector<double> out;
  std::string tok;
  while (in >> tok)
    out.push_back(parse_double(tok, section.empty() ? key : section + "." + key));
  return out;
}

void Config::validate(const std::string& command) const {
  const auto& spec = schema();
  for (const auto& [section, keys] : sections_) {
    for (const auto& [key, value] : keys) {
      bool known = std::any_of(spec.begin(), spec.end(), [&](const KeySpec& k) {
        return section == k.section && key == k.key;
      });
      if (!known)
        throw ConfigError("unknown key '" + (section.empty() ? key : section + "." + key) + "'");
    }
  }
  if (command.empty()) return;
  auto cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
    throw ConfigError("unknown command '" + command + "'");
  for (const auto& req : requirements()) {
    if (command == req.command && !has(req.section, req.key))
      throw ConfigError("missing required field '" + std::string(req.section) + "." + req.key +
                        "' for command '" + command + "'");
  }
}

}  // namespace dthermo::config
