/*
 * Copyright 2026 The gstfm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gstfm/core/field_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gstfm/util/error.hpp"

namespace gstfm {
namespace {

static_assert(std::endian::native == std::endian::little, "stf I/O assumes a little-endian host");

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

LatticeField read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: empty input");
  std::string header;
  for (char c : trim(line))
    if (c != ' ') header.push_back(c);
  if (header != "ell,s1,s2,t,value") throw DataError("csv: malformed header '" + trim(line) + "'");

  struct Row {
    long long idx[4];
    double value;
  };
  std::vector<Row> rows;
  long long max_idx[4] = {0, 0, 0, 0};
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    Row row{};
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      cell = trim(cell);
      if (col < 4) {
        long long v = 0;
        auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || p != cell.data() + cell.size() || v < 1)
          throw DataError("csv line " + std::to_string(line_no) + ": bad index '" + cell + "'");
        row.idx[col] = v;
        max_idx[col] = std::max(max_idx[col], v);
      } else if (col == 4) {
        char* end = nullptr;
        row.value = std::strtod(cell.c_str(), &end);
        if (cell.empty() || end != cell.c_str() + cell.size())
          throw DataError("csv line " + std::to_string(line_no) + ": bad value '" + cell + "'");
      }
      ++col;
    }
    if (col != 5) throw DataError("csv line " + std::to_string(line_no) + ": expected 5 columns");
    rows.push_back(row);
  }
  if (rows.empty()) throw DataError("csv: no data rows");
  const int n = static_cast<int>(max_idx[0]);
  const LatticeDims dims{static_cast<int>(max_idx[1]), static_cast<int>(max_idx[2]), static_cast<int>(max_idx[3])};
  const std::size_t expected = static_cast<std::size_t>(n) * dims.points();
  if (rows.size() != expected)
    throw DataError("csv payload length mismatch: expected " + std::to_string(expected) + " values, got " +
                    std::to_string(rows.size()));
  std::vector<double> values(expected, 0.0);
  std::vector<char> seen(expected, 0);
  for (const Row& r : rows) {
    const std::size_t i =
        ((static_cast<std::size_t>(r.idx[0] - 1) * dims.s1 + (r.idx[1] - 1)) * dims.s2 + (r.idx[2] - 1)) * dims.t +
        (r.idx[3] - 1);
    if (seen[i])
      throw DataError("csv: duplicate coordinate (" + std::to_string(r.idx[0]) + "," + std::to_string(r.idx[1]) +
                      "," + std::to_string(r.idx[2]) + "," + std::to_string(r.idx[3]) + ")");
    seen[i] = 1;
    values[i] = r.value;
  }
  return LatticeField(n, dims, std::move(values));
}

LatticeField read_stf(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("stf: empty input");
  std::istringstream hs(line);
  std::string magic;
  long long n = 0, s1 = 0, s2 = 0, t = 0;
  if (!(hs >> magic >> n >> s1 >> s2 >> t) || magic != "STF1")
    throw DataError("stf: malformed header '" + line + "'");
  std::string rest;
  if (hs >> rest) throw DataError("stf: malformed header '" + line + "'");
  if (n <= 0 || s1 <= 0 || s2 <= 0 || t <= 0) throw DataError("stf: header dimensions must be positive");
  const std::size_t expected = static_cast<std::size_t>(n * s1 * s2 * t);
  std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (payload.size() % sizeof(double) != 0)
    throw DataError("stf: payload is not a whole number of float64 values (" + std::to_string(payload.size()) +
                    " bytes)");
  const std::size_t got = payload.size() / sizeof(double);
  if (got != expected)
    throw DataError("stf payload length mismatch: expected " + std::to_string(expected) + " values, got " +
                    std::to_string(got));
  std::vector<double> values(expected);
  std::memcpy(values.data(), payload.data(), payload.size());
  return LatticeField(static_cast<int>(n), LatticeDims{static_cast<int>(s1), static_cast<int>(s2), static_cast<int>(t)},
                      std::move(values));
}

} // namespace

FieldFormat parse_field_format(const std::string& name) {
  if (name == "csv") return FieldFormat::csv;
  if (name == "stf" || name == "stf-binary") return FieldFormat::stf;
  throw ConfigError("unknown field format '" + name + "' (expected csv or stf)");
}

FieldFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? FieldFormat::csv : FieldFormat::stf;
}

LatticeField load_field(std::istream& in, FieldFormat format) {
  return format == FieldFormat::csv ? read_csv(in) : read_stf(in);
}

LatticeField load_field(const std::filesystem::path& path, FieldFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input '" + path.string() + "'");
  return load_field(in, format);
}

void store_field(std::ostream& out, const LatticeField& field, FieldFormat format) {
  const LatticeDims d = field.dims();
  if (format == FieldFormat::csv) {
    out << "ell,s1,s2,t,value\n";
    char buf[64];
    for (int ell = 0; ell < field.n(); ++ell)
      for (int s1 = 0; s1 < d.s1; ++s1)
        for (int s2 = 0; s2 < d.s2; ++s2)
          for (int t = 0; t < d.t; ++t) {
            const int len = std::snprintf(buf, sizeof buf, "%.17g", field(ell, s1, s2, t));
            out << ell + 1 << ',' << s1 + 1 << ',' << s2 + 1 << ',' << t + 1 << ',';
            out.write(buf, len);
            out << '\n';
          }
  } else {
    out << "STF1 " << field.n() << ' ' << d.s1 << ' ' << d.s2 << ' ' << d.t << '\n';
    out.write(reinterpret_cast<const char*>(field.values().data()),
              static_cast<std::streamsize>(field.size() * sizeof(double)));
  }
  if (!out) throw DataError("write failed");
}

void store_field(const std::filesystem::path& path, const LatticeField& field, FieldFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output '" + path.string() + "'");
  store_field(out, field, format);
}

} // namespace gstfm
