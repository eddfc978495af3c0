#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

// Deterministic text output helpers: all numeric formatting goes through
// snprintf with fixed precision, so identical runs produce identical bytes.
namespace dthermo::io {

inline std::string fmt(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
}

inline void write_text_gz(const std::filesystem::path& path, const std::string& content) {
  gzFile f = gzopen(path.string().c_str(), "wb9");
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  if (gzwrite(f, content.data(), static_cast<unsigned>(content.size())) !=
      static_cast<int>(content.size())) {
    gzclose(f);
    throw std::runtime_error("gzwrite failed: " + path.string());
  }
  gzclose(f);
}

// two-column csv reader, '#' comments allowed
inline std::pair<std::vector<double>, std::vector<double>> read_xy_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::vector<double> xs, ys;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) continue;
    try {
      xs.push_back(std::stod(line.substr(0, comma)));
      ys.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw std::runtime_error("malformed row in " + path.string() + ": " + line);
    }
  }
  return {xs, ys};
}

}  // namespace dthermo::io
