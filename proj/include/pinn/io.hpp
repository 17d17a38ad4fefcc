// Formatting and CSV helpers. All doubles are written with %.17g so files
// round-trip exactly and reruns with the same seed are byte-identical.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinn/problem.hpp"

namespace pinn {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) {
    out_.open(path);
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << fmt17(values[i]);
    }
    out_ << '\n';
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

// One file per point family: data.csv, boundary.csv, collocation.csv.
inline void write_samples_csv(const SampleSet& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::vector<std::string> header;
    for (int i = 0; i < s.d1; ++i) header.push_back("x" + std::to_string(i));
    for (int j = 0; j < s.d2; ++j) header.push_back("y" + std::to_string(j));
    CsvWriter w(dir / "data.csv", header);
    for (int i = 0; i < s.n; ++i) {
      std::vector<double> row;
      auto x = s.data_point(i);
      auto y = s.data_value(i);
      row.insert(row.end(), x.begin(), x.end());
      row.insert(row.end(), y.begin(), y.end());
      w.row(row);
    }
  }
  {
    std::vector<std::string> header;
    for (int i = 0; i < s.d1; ++i) header.push_back("x" + std::to_string(i));
    CsvWriter w(dir / "boundary.csv", header);
    for (int j = 0; j < s.n_e; ++j) {
      auto x = s.boundary_point(j);
      w.row(std::vector<double>(x.begin(), x.end()));
    }
    CsvWriter w2(dir / "collocation.csv", header);
    for (int l = 0; l < s.n_r; ++l) {
      auto x = s.colloc_point(l);
      w2.row(std::vector<double>(x.begin(), x.end()));
    }
  }
}

inline SampleSet read_samples_csv(const std::filesystem::path& dir, int d1, int d2) {
  SampleSet s;
  s.d1 = d1;
  s.d2 = d2;
  auto read = [](const std::filesystem::path& path, int cols) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> out;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::size_t pos = 0;
      for (int c = 0; c < cols; ++c) {
        std::size_t next = line.find(',', pos);
        out.push_back(std::stod(line.substr(pos, next - pos)));
        pos = (next == std::string::npos) ? line.size() : next + 1;
      }
    }
    return out;
  };
  std::vector<double> data = read(dir / "data.csv", d1 + d2);
  s.n = static_cast<int>(data.size()) / (d1 + d2);
  for (int i = 0; i < s.n; ++i) {
    for (int c = 0; c < d1; ++c) s.data_x.push_back(data[static_cast<std::size_t>(i) * (d1 + d2) + c]);
    for (int c = 0; c < d2; ++c)
      s.data_y.push_back(data[static_cast<std::size_t>(i) * (d1 + d2) + d1 + c]);
  }
  s.boundary_x = read(dir / "boundary.csv", d1);
  s.n_e = static_cast<int>(s.boundary_x.size()) / d1;
  s.colloc_x = read(dir / "collocation.csv", d1);
  s.n_r = static_cast<int>(s.colloc_x.size()) / d1;
  return s;
}

}  // namespace pinn
