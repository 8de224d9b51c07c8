#pragma once

// CSV and JSON serialization of states and transform results. Numbers are
// written with %.17g so that a write/read cycle is exact and output is
// byte-stable across runs.

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqint/state.hpp"
#include "sqint/transforms.hpp"

namespace sqint {

using json = nlohmann::ordered_json;

/// Malformed input; carries the 1-based data row (0 for the header) and the field name.
class ParseError : public InvalidArgument {
 public:
  ParseError(std::size_t row, std::string field, const std::string& what)
      : InvalidArgument("row " + std::to_string(row) + ", field '" + field + "': " + what),
        row_(row),
        field_(std::move(field)) {}

  std::size_t row() const { return row_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t row_;
  std::string field_;
};

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return out;
}

inline double parse_number(const std::string& text, std::size_t row, const std::string& field) {
  if (text.empty()) throw ParseError(row, field, "empty value");
  // strtod rather than stod: gradual underflow to a subnormal is a valid value, only overflow is an error.
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str()) throw ParseError(row, field, "not a number: '" + text + "'");
  if (errno == ERANGE && std::isinf(v)) throw ParseError(row, field, "out of range: '" + text + "'");
  if (end != text.c_str() + text.size()) throw ParseError(row, field, "trailing characters in '" + text + "'");
  return v;
}

inline std::vector<std::string> coordinate_names(std::size_t rank) {
  if (rank == 1) return {"x"};
  std::vector<std::string> out;
  for (std::size_t d = 0; d < rank; ++d) out.push_back("x" + std::to_string(d + 1));
  return out;
}

/// Reads non-empty lines; returns the header fields and data rows.
inline std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>> read_table(std::istream& in) {
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (header.empty()) {
      header = split_csv(line);
    } else {
      rows.push_back(split_csv(line));
    }
  }
  if (header.empty()) throw ParseError(0, "header", "empty input");
  return {header, rows};
}

}  // namespace detail

// --- state grids and signals ----------------------------------------------------------

inline json to_json(const StateGrid& g) {
  json j;
  j["offset"] = g.offset;
  j["spacing"] = g.spacing;
  j["count"] = g.count;
  return j;
}

inline StateGrid state_grid_from_json(const json& j) {
  try {
    StateGrid g{j.at("offset").get<std::vector<double>>(), j.at("spacing").get<std::vector<double>>(),
                j.at("count").get<std::vector<std::size_t>>()};
    if (g.offset.size() != g.count.size() || g.spacing.size() != g.count.size() || g.count.empty()) {
      throw InvalidArgument("state grid header: offset, spacing and count differ in length");
    }
    return g;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("state grid header: ") + e.what());
  }
}

/// Header `index,x,re,im` (x1..xn for rank n), one row per sample in row-major order.
inline void write_signal_csv(std::ostream& out, const DiscretizedState& f) {
  const auto& g = f.grid();
  out << "index";
  for (const auto& name : detail::coordinate_names(g.rank())) out << ',' << name;
  out << ",re,im\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = g.unflatten(i);
    out << i;
    for (std::size_t d = 0; d < g.rank(); ++d) out << ',' << format_double(g.coord(d, idx[d]));
    out << ',' << format_double(f[i].real()) << ',' << format_double(f[i].imag()) << '\n';
  }
}

/// Reads a signal CSV and infers the uniform row-major grid from its coordinate columns.
inline DiscretizedState read_signal_csv(std::istream& in) {
  const auto [header, rows] = detail::read_table(in);
  if (header.size() < 4 || header.front() != "index" || header[header.size() - 2] != "re" || header.back() != "im") {
    throw ParseError(0, "header", "expected index,<coordinates>,re,im");
  }
  const std::size_t rank = header.size() - 3;
  const auto names = detail::coordinate_names(rank);
  for (std::size_t d = 0; d < rank; ++d) {
    if (header[1 + d] != names[d]) throw ParseError(0, header[1 + d], "expected coordinate column '" + names[d] + "'");
  }
  if (rows.empty()) throw ParseError(1, "index", "no data rows");

  std::vector<std::vector<double>> coords(rows.size(), std::vector<double>(rank));
  std::vector<cplx> values(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t row = r + 1;
    if (rows[r].size() != header.size()) {
      throw ParseError(row, "index", "expected " + std::to_string(header.size()) + " fields, found " +
                                         std::to_string(rows[r].size()));
    }
    const double index = detail::parse_number(rows[r][0], row, "index");
    if (index != static_cast<double>(r)) throw ParseError(row, "index", "rows must be numbered 0, 1, 2, ...");
    for (std::size_t d = 0; d < rank; ++d) coords[r][d] = detail::parse_number(rows[r][1 + d], row, names[d]);
    values[r] = {detail::parse_number(rows[r][rank + 1], row, "re"), detail::parse_number(rows[r][rank + 2], row, "im")};
  }

  // Row-major: the last axis varies fastest; counts follow from where each axis first repeats.
  StateGrid g;
  g.offset = coords.front();
  g.spacing.assign(rank, 0.0);
  g.count.assign(rank, 1);
  std::size_t block = 1;
  for (std::size_t d = rank; d-- > 0;) {
    if (block < rows.size()) g.spacing[d] = coords[block][d] - coords[0][d];
    std::size_t cnt = 1;
    while (cnt * block < rows.size() && coords[cnt * block][d] != coords[0][d]) ++cnt;
    g.count[d] = cnt;
    block *= cnt;
  }
  if (g.size() != rows.size()) {
    throw ParseError(rows.size(), "index", "row count " + std::to_string(rows.size()) +
                                              " is not a full tensor grid (inferred " + std::to_string(g.size()) + ")");
  }
  for (std::size_t d = 0; d < rank; ++d) {
    if (!(g.spacing[d] > 0.0)) throw ParseError(1, names[d], "coordinates must increase along each axis");
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto idx = g.unflatten(r);
    for (std::size_t d = 0; d < rank; ++d) {
      const double expect = g.coord(d, idx[d]);
      if (std::abs(coords[r][d] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
        throw ParseError(r + 1, names[d], "grid mismatch: expected " + format_double(expect) + ", found " +
                                              format_double(coords[r][d]));
      }
    }
  }
  return DiscretizedState(g, std::move(values));
}

// --- transform results ----------------------------------------------------------------

inline json box_to_json(const Box& box) {
  json j = json::array();
  for (const auto& [lo, hi] : box) j.push_back({format_double(lo), format_double(hi)});
  return j;
}

inline Box box_from_json(const json& j) {
  Box box;
  for (const auto& e : j) box.push_back({std::stod(e.at(0).get<std::string>()), std::stod(e.at(1).get<std::string>())});
  return box;
}

/// Metadata header of a TransformResult; `state_grid` records where psi and phi live.
inline json transform_header(const TransformResult& r, const StateGrid& state_grid) {
  json j;
  j["group"] = r.group;
  j["coords"] = r.coords;
  j["rep"] = r.rep;
  j["psi"] = r.psi_id;
  j["dm_norm"] = r.dm_norm ? json(format_double(*r.dm_norm)) : json("unset");
  j["box"] = box_to_json(r.grid.box);
  j["resolution"] = r.grid.resolution;
  json spacing = json::array();
  for (auto s : r.grid.spacing) spacing.push_back(s == AxisSpacing::log ? "log" : "linear");
  j["spacing"] = spacing;
  j["nodes"] = r.grid.size();
  j["clipped_nodes"] = r.clipped_nodes;
  j["safe_box"] = box_to_json(r.safe_box);
  j["tail_estimate"] = format_double(r.tail_estimate);
  j["state_grid"] = to_json(state_grid);
  return j;
}

/// Header: one column per group coordinate, then weight, re, im.
inline void write_transform_csv(std::ostream& out, const TransformResult& r) {
  for (const auto& c : r.coords) out << c << ',';
  out << "weight,re,im\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    for (double x : r.grid.nodes[i]) out << format_double(x) << ',';
    out << format_double(r.grid.weights[i]) << ',' << format_double(r.coefficients[i].real()) << ','
        << format_double(r.coefficients[i].imag()) << '\n';
  }
}

/// Rebuilds a TransformResult from its CSV table and JSON header.
inline TransformResult read_transform(std::istream& csv, const json& header) {
  TransformResult r;
  try {
    r.group = header.at("group").get<std::string>();
    r.coords = header.at("coords").get<std::vector<std::string>>();
    r.rep = header.at("rep").get<std::string>();
    r.psi_id = header.at("psi").get<std::string>();
    const auto dm = header.at("dm_norm").get<std::string>();
    if (dm != "unset") r.dm_norm = std::stod(dm);
    r.grid.box = box_from_json(header.at("box"));
    r.grid.resolution = header.at("resolution").get<std::vector<std::size_t>>();
    for (const auto& s : header.at("spacing")) r.grid.spacing.push_back(s == "log" ? AxisSpacing::log : AxisSpacing::linear);
    r.clipped_nodes = header.at("clipped_nodes").get<std::size_t>();
    r.safe_box = box_from_json(header.at("safe_box"));
    r.tail_estimate = std::stod(header.at("tail_estimate").get<std::string>());
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("transform header: ") + e.what());
  }
  const auto [cols, rows] = detail::read_table(csv);
  const std::size_t dim = r.coords.size();
  if (cols.size() != dim + 3) throw ParseError(0, "header", "expected " + std::to_string(dim + 3) + " columns");
  for (std::size_t d = 0; d < dim; ++d) {
    if (cols[d] != r.coords[d]) throw ParseError(0, cols[d], "expected coordinate column '" + r.coords[d] + "'");
  }
  if (cols[dim] != "weight" || cols[dim + 1] != "re" || cols[dim + 2] != "im") {
    throw ParseError(0, "header", "expected weight,re,im after the coordinates");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols.size()) throw ParseError(i + 1, cols.front(), "wrong number of fields");
    Point x(dim);
    for (std::size_t d = 0; d < dim; ++d) x[d] = detail::parse_number(rows[i][d], i + 1, cols[d]);
    r.grid.nodes.push_back(std::move(x));
    r.grid.weights.push_back(detail::parse_number(rows[i][dim], i + 1, "weight"));
    r.coefficients.push_back({detail::parse_number(rows[i][dim + 1], i + 1, "re"),
                              detail::parse_number(rows[i][dim + 2], i + 1, "im")});
  }
  const std::size_t expected = header.value("nodes", rows.size());
  if (expected != rows.size()) {
    throw ParseError(rows.size(), "nodes", "header declares " + std::to_string(expected) + " nodes, table has " +
                                               std::to_string(rows.size()));
  }
  return r;
}

}  // namespace sqint
