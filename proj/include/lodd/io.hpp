#pragma once

// Point-table ingestion (delimited text and ASCII XYZ clouds), min-max
// scaling, and serialization of detection results and label vectors.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "core.hpp"
#include "ratio.hpp"

namespace lodd {

struct TableSchema {
  char delimiter = ',';
  bool has_header = true;
  /// Header name, or a 0-based column index when there is no header.
  std::optional<std::string> label_column;
  /// Explicit feature columns (names or indices); empty means every column
  /// other than the label column.
  std::vector<std::string> feature_columns;
};

enum class ResultFormat { Csv, Json };

namespace detail {

inline std::string location(const std::string& path, std::size_t row, std::optional<std::size_t> col = {}) {
  std::string s = path + ":" + std::to_string(row);
  if (col) s += " column " + std::to_string(*col + 1);
  return s;
}

/// Splits one line into fields. Double quotes delimit a field and "" inside
/// quotes is a literal quote.
inline std::vector<std::string> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delimiter) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_integer(std::string_view s) {
  s = trim(s);
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  return out;
}

inline std::size_t resolve_column(const std::string& key, const std::vector<std::string>& header, bool has_header,
                                  std::size_t width, const std::string& path) {
  if (has_header) {
    const auto it = std::find(header.begin(), header.end(), key);
    if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
  }
  if (const auto idx = parse_integer(key); idx && *idx >= 0 && static_cast<std::size_t>(*idx) < width) {
    return static_cast<std::size_t>(*idx);
  }
  throw Error(ErrorCode::ParseError, "column '" + key + "' not found in " + path);
}

/// 17 significant digits: enough to round-trip any double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Reads a rectangular numeric table. Labels come from schema.label_column;
/// integer labels are kept, other label strings are numbered by first
/// appearance.
inline PointSet read_points(const std::string& path, const TableSchema& schema = {}) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::optional<std::size_t> width;
  std::vector<std::size_t> features;
  std::optional<std::size_t> label_col;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::map<std::string, int> label_codes;

  auto configure = [&](std::size_t w) {
    width = w;
    if (schema.label_column) {
      label_col = detail::resolve_column(*schema.label_column, header, schema.has_header, w, path);
    }
    if (schema.feature_columns.empty()) {
      for (std::size_t c = 0; c < w; ++c) {
        if (!label_col || c != *label_col) features.push_back(c);
      }
    } else {
      for (const auto& key : schema.feature_columns) {
        features.push_back(detail::resolve_column(key, header, schema.has_header, w, path));
      }
    }
    if (features.empty()) throw Error(ErrorCode::ParseError, path + " has no feature columns");
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_fields(line, schema.delimiter);
    if (schema.has_header && header.empty()) {
      for (auto& f : fields) header.emplace_back(detail::trim(f));
      configure(header.size());
      continue;
    }
    if (!width) configure(fields.size());
    if (fields.size() != *width) {
      throw Error(ErrorCode::RaggedRows, detail::location(path, line_no) + " has " + std::to_string(fields.size()) +
                                             " fields, expected " + std::to_string(*width));
    }
    std::vector<double> row;
    row.reserve(features.size());
    for (std::size_t c : features) {
      const auto v = detail::parse_double(fields[c]);
      if (!v) {
        throw Error(ErrorCode::NonNumeric,
                    detail::location(path, line_no, c) + ": '" + fields[c] + "' is not a number");
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
    if (label_col) {
      const std::string raw(detail::trim(fields[*label_col]));
      if (const auto iv = detail::parse_integer(raw)) {
        labels.push_back(static_cast<int>(*iv));
      } else {
        const auto [it, inserted] = label_codes.emplace(raw, static_cast<int>(label_codes.size()));
        labels.push_back(it->second);
      }
    }
  }
  if (rows.empty()) throw Error(ErrorCode::EmptySet, path + " contains no data rows");
  std::optional<std::vector<int>> label_vec;
  if (label_col) label_vec = std::move(labels);
  return PointSet::from_rows(rows, std::move(label_vec));
}

/// Whitespace-separated ASCII cloud: the first three numbers of each line are
/// x y z. Blank lines and lines starting with '#' are skipped.
inline PointSet read_xyz(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream fields{std::string(t)};
    std::vector<double> row;
    std::string token;
    while (row.size() < 3 && fields >> token) {
      const auto v = detail::parse_double(token);
      if (!v) {
        throw Error(ErrorCode::NonNumeric,
                    detail::location(path, line_no, row.size()) + ": '" + token + "' is not a number");
      }
      row.push_back(*v);
    }
    if (row.size() < 3) {
      throw Error(ErrorCode::RaggedRows, detail::location(path, line_no) + " has fewer than 3 coordinates");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptySet, path + " contains no points");
  return PointSet::from_rows(rows);
}

/// read_xyz for .xyz/.pts files, read_points otherwise.
inline PointSet read_any(const std::string& path, const TableSchema& schema = {}) {
  auto ends_with = [&](std::string_view ext) {
    return path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
  };
  if (ends_with(".xyz") || ends_with(".pts")) return read_xyz(path);
  return read_points(path, schema);
}

/// Scales every feature to [0, 1] by (x - min) / (max - min); constant
/// features become 0.
inline PointSet minmax_normalize(const PointSet& point_set) {
  Matrix m = point_set.points();
  for (Index f = 0; f < m.rows(); ++f) {
    const double lo = m.row(f).minCoeff();
    const double range = m.row(f).maxCoeff() - lo;
    if (range > 0.0) {
      m.row(f) = (m.row(f).array() - lo) / range;
    } else {
      m.row(f).setZero();
    }
  }
  return PointSet(std::move(m), point_set.labels());
}

/// CSV: id,score,boundary per point. JSON: params, effective_ratio,
/// boundary_count and a per-point array.
inline void write_result(const DetectionResult& result, const LoddScores& scores, const std::string& path,
                         ResultFormat format, const std::optional<RatioEstimate>& estimate = std::nullopt) {
  const std::size_t n = result.boundary_mask.size();
  if (scores.values.size() != n) throw Error(ErrorCode::LengthMismatch, "scores and mask differ in length");
  std::ofstream out = detail::open_output(path);
  if (format == ResultFormat::Csv) {
    out << "id,score,boundary\n";
    for (std::size_t i = 0; i < n; ++i) {
      out << i << ',' << detail::format_double(scores.values[i]) << ',' << (result.boundary_mask[i] ? 1 : 0)
          << '\n';
    }
  } else {
    nlohmann::ordered_json doc;
    const Params& p = scores.params;
    doc["params"] = {{"k", p.k},
                     {"omega", p.omega},
                     {"ratio", p.ratio ? nlohmann::ordered_json(*p.ratio) : nlohmann::ordered_json(nullptr)},
                     {"adaptive", p.adaptive},
                     {"cluster_count", p.cluster_count ? nlohmann::ordered_json(*p.cluster_count)
                                                       : nlohmann::ordered_json(nullptr)}};
    doc["n"] = n;
    doc["effective_ratio"] = result.effective_ratio;
    doc["boundary_count"] = result.boundary_count;
    if (estimate) {
      doc["estimate"] = {{"intrinsic_dim", estimate->intrinsic_dim},
                         {"components", estimate->components},
                         {"boundary_count", estimate->boundary_count},
                         {"ratio", estimate->ratio},
                         {"mode", to_string(estimate->mode)}};
    }
    auto& points = doc["points"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
      points.push_back({{"id", i}, {"score", scores.values[i]}, {"boundary", static_cast<bool>(result.boundary_mask[i])}});
    }
    out << doc.dump(2) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

struct ResultTable {
  std::vector<double> scores;
  std::vector<bool> boundary_mask;
};

/// Reads back the CSV written by write_result.
inline ResultTable read_result_csv(const std::string& path) {
  TableSchema schema;
  const PointSet table = read_points(path, schema);
  if (table.dim() != 3) throw Error(ErrorCode::ParseError, path + " is not an id,score,boundary table");
  ResultTable out;
  for (Index i = 0; i < table.size(); ++i) {
    if (table.points()(0, i) != static_cast<double>(i)) {
      throw Error(ErrorCode::ParseError, detail::location(path, static_cast<std::size_t>(i) + 2) + ": ids out of order");
    }
    out.scores.push_back(table.points()(1, i));
    out.boundary_mask.push_back(table.points()(2, i) != 0.0);
  }
  return out;
}

/// Header x0..x{d-1}, plus `label` when labels are present.
inline void write_points_csv(const PointSet& point_set, const std::string& path, bool include_labels = true) {
  std::ofstream out = detail::open_output(path);
  const bool labels = include_labels && point_set.has_labels();
  for (Index f = 0; f < point_set.dim(); ++f) out << (f ? "," : "") << 'x' << f;
  if (labels) out << ",label";
  out << '\n';
  for (Index i = 0; i < point_set.size(); ++i) {
    for (Index f = 0; f < point_set.dim(); ++f) {
      out << (f ? "," : "") << detail::format_double(point_set.points()(f, i));
    }
    if (labels) out << ',' << (*point_set.labels())[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

/// Writes id,label rows (and a boundary column when a mask is given).
inline void write_labels(const std::vector<int>& labels, const std::string& path,
                         const std::optional<std::vector<bool>>& boundary = std::nullopt) {
  if (boundary && boundary->size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "labels and boundary mask differ in length");
  }
  std::ofstream out = detail::open_output(path);
  out << "id,label" << (boundary ? ",boundary" : "") << '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << i << ',' << labels[i];
    if (boundary) out << ',' << ((*boundary)[i] ? 1 : 0);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

/// Integer label column of a delimited file: `column` when given, otherwise
/// the column named "label", otherwise the last column.
inline std::vector<int> read_labels(const std::string& path, const std::optional<std::string>& column = std::nullopt,
                                    char delimiter = ',') {
  std::ifstream in = detail::open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> col;
  std::size_t width = 0;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line, delimiter);
    if (!col) {
      width = fields.size();
      std::vector<std::string> header;
      for (const auto& f : fields) header.emplace_back(detail::trim(f));
      const bool is_header = !detail::parse_double(fields.back()) || column.has_value();
      if (column) {
        col = detail::resolve_column(*column, header, true, width, path);
      } else {
        const auto it = std::find(header.begin(), header.end(), "label");
        col = it != header.end() ? static_cast<std::size_t>(it - header.begin()) : width - 1;
      }
      if (is_header && !detail::parse_integer(fields[*col])) continue;
    }
    if (fields.size() != width) {
      throw Error(ErrorCode::RaggedRows, detail::location(path, line_no) + " has " + std::to_string(fields.size()) +
                                             " fields, expected " + std::to_string(width));
    }
    const auto v = detail::parse_integer(fields[*col]);
    if (!v) {
      throw Error(ErrorCode::NonNumeric,
                  detail::location(path, line_no, *col) + ": '" + fields[*col] + "' is not an integer label");
    }
    labels.push_back(static_cast<int>(*v));
  }
  if (labels.empty()) throw Error(ErrorCode::EmptySet, path + " contains no labels");
  return labels;
}

}  // namespace lodd
