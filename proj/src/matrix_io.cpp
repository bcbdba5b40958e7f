// Copyright 2026 The entop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "entop/matrix_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "entop/errors.hpp"

namespace entop {

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

double parse_real(const std::string& cell, std::size_t offset) {
  if (cell.empty()) throw ParseError(offset, "empty numeric cell");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE) {
    throw ParseError(offset, "not a number: '" + cell + "'");
  }
  return v;
}

}  // namespace

std::vector<std::string> polarization_labels(std::size_t nQubits) {
  std::vector<std::string> labels{""};
  for (std::size_t q = 0; q < nQubits; ++q) {
    std::vector<std::string> next;
    for (const auto& prefix : labels) {
      next.push_back(prefix + 'H');
      next.push_back(prefix + 'V');
    }
    labels = std::move(next);
  }
  return labels;
}

std::string emit_matrix_csv(const ComplexMatrix& m, const std::vector<std::string>& labels) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != labels.size()) {
    throw Error(ErrorKind::DimensionMismatch, "matrix and labels disagree in size");
  }
  std::string out = "block,row";
  for (const auto& l : labels) out += "," + l;
  out += "\n";
  for (int part = 0; part < 2; ++part) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out += part == 0 ? "re," : "im,";
      out += labels[static_cast<std::size_t>(r)];
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out += "," + format_real(part == 0 ? m(r, c).real() : m(r, c).imag());
      }
      out += "\n";
    }
  }
  return out;
}

LabeledMatrix parse_matrix_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError(0, "empty matrix file");
  const auto header = split(lines.front(), ',');
  if (header.size() < 3 || header[0] != "block" || header[1] != "row") {
    throw ParseError(0, "matrix header must start with block,row");
  }
  LabeledMatrix out;
  out.labels.assign(header.begin() + 2, header.end());
  const auto n = static_cast<Eigen::Index>(out.labels.size());
  if (lines.size() != static_cast<std::size_t>(2 * n + 1)) {
    throw ParseError(0, "expected " + std::to_string(2 * n) + " data rows");
  }
  out.matrix = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    const auto cells = split(lines[static_cast<std::size_t>(k + 1)], ',');
    const std::string expectedBlock = k < n ? "re" : "im";
    const Eigen::Index r = k % n;
    if (cells.size() != static_cast<std::size_t>(n + 2) || cells[0] != expectedBlock ||
        cells[1] != out.labels[static_cast<std::size_t>(r)]) {
      throw ParseError(static_cast<std::size_t>(k + 1), "malformed matrix row");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      const double v = parse_real(cells[static_cast<std::size_t>(c + 2)],
                                  static_cast<std::size_t>(k + 1));
      if (k < n) {
        out.matrix(r, c) += Complex(v, 0.0);
      } else {
        out.matrix(r, c) += Complex(0.0, v);
      }
    }
  }
  return out;
}

std::string emit_counts_csv(const std::vector<CountRecord>& counts) {
  std::string out = "setting_label,count,exposure\n";
  for (const auto& c : counts) {
    out += c.setting.label + "," + format_real(c.count) + "," + format_real(c.exposure) + "\n";
  }
  return out;
}

std::vector<CountRecord> parse_counts_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != "setting_label,count,exposure") {
    throw ParseError(0, "counts header must be setting_label,count,exposure");
  }
  std::vector<CountRecord> out;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cells = split(lines[k], ',');
    if (cells.size() != 3) throw ParseError(k, "counts row needs three cells");
    CountRecord rec{setting_from_label(cells[0]), parse_real(cells[1], k),
                    parse_real(cells[2], k)};
    if (rec.count < 0.0 || rec.exposure < 0.0) {
      throw ParseError(k, "counts and exposures must be non-negative");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Config, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::Config, "write failed for " + path);
}

}  // namespace entop
