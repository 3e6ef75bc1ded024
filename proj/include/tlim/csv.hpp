#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tlim/error.hpp"
#include "tlim/sample.hpp"

namespace tlim {

struct CsvRecord {
  std::size_t line = 0; ///< 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC-4180 style parsing: quoted fields may contain the delimiter, doubled
/// quotes and line breaks. Accepts LF and CRLF. A trailing line break does
/// not start a new record.
inline std::vector<CsvRecord> parse_csv(std::string_view text, char delimiter = ',') {
  std::vector<CsvRecord> out;
  CsvRecord rec{1, {}};
  std::string field;
  std::size_t line = 1;
  bool in_quotes = false, field_started = false, any = false;

  auto end_field = [&] {
    rec.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    out.push_back(std::move(rec));
    rec = CsvRecord{line, {}};
    any = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n')
          ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = field_started = any = true;
    } else if (c == delimiter) {
      end_field();
      any = true;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      // handled with the '\n'
    } else if (c == '\n') {
      ++line;
      end_record();
    } else {
      field += c;
      field_started = any = true;
    }
  }
  if (in_quotes)
    throw Error(ErrorCode::ParseError, "unterminated quoted field starting on line " +
                                           std::to_string(rec.line), rec.line);
  if (any || !field.empty())
    end_record();
  return out;
}

enum class RejectReason { NonNumeric, NonPositive, Missing };

constexpr std::string_view to_string(RejectReason r) noexcept {
  switch (r) {
  case RejectReason::NonNumeric: return "non-numeric";
  case RejectReason::NonPositive: return "nonpositive";
  case RejectReason::Missing: return "missing";
  }
  return "?";
}

struct Rejection {
  std::size_t line = 0;
  RejectReason reason = RejectReason::Missing;
  std::string text;
};

struct CsvOptions {
  std::string path;
  std::string column = "0"; ///< header name, or 0-based index
  char delimiter = ',';
  bool header = true;
};

/// What was read from a file and what was thrown away.
struct DatasetDescriptor {
  CsvOptions options;
  std::size_t column_index = 0;
  std::size_t total_rows = 0; ///< data rows, header excluded
  std::size_t rows_read = 0;  ///< accepted rows
  std::vector<Rejection> rejected;

  std::size_t rejected_count(RejectReason r) const {
    std::size_t k = 0;
    for (const auto &x : rejected)
      k += x.reason == r;
    return k;
  }
};

struct LoadedColumn {
  DatasetDescriptor descriptor;
  std::vector<double> values; ///< accepted values, file order
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline bool parse_number(std::string_view s, double &out) {
  if (!s.empty() && s.front() == '+')
    s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace detail

/// Loads one numeric column, rejecting rows outside `domain`.
inline LoadedColumn load_column_text(std::string_view text, const CsvOptions &opt,
                                     ValueDomain domain) {
  auto records = parse_csv(text, opt.delimiter);
  LoadedColumn out;
  out.descriptor.options = opt;

  std::size_t col = 0;
  std::size_t first = 0;
  std::size_t parsed_index = 0;
  const bool numeric_column =
      !opt.column.empty() &&
      std::from_chars(opt.column.data(), opt.column.data() + opt.column.size(), parsed_index).ptr ==
          opt.column.data() + opt.column.size();
  if (opt.header) {
    if (records.empty())
      throw Error(ErrorCode::ParseError, "missing header row", 1);
    first = 1;
    const auto &names = records.front().fields;
    if (numeric_column) {
      col = parsed_index;
    } else {
      auto it = std::find_if(names.begin(), names.end(),
                             [&](const std::string &n) { return detail::trim(n) == opt.column; });
      if (it == names.end())
        throw Error(ErrorCode::ParseError, "no column named '" + opt.column + "'", 1);
      col = static_cast<std::size_t>(it - names.begin());
    }
  } else {
    if (!numeric_column)
      throw Error(ErrorCode::InvalidArgument,
                  "column must be a 0-based index when the file has no header");
    col = parsed_index;
  }
  out.descriptor.column_index = col;

  for (std::size_t r = first; r < records.size(); ++r) {
    const auto &rec = records[r];
    ++out.descriptor.total_rows;
    if (col >= rec.fields.size() || detail::trim(rec.fields[col]).empty()) {
      out.descriptor.rejected.push_back({rec.line, RejectReason::Missing, ""});
      continue;
    }
    const std::string_view cell = detail::trim(rec.fields[col]);
    double v = 0.0;
    if (!detail::parse_number(cell, v)) {
      out.descriptor.rejected.push_back({rec.line, RejectReason::NonNumeric, std::string(cell)});
      continue;
    }
    if (domain == ValueDomain::Positive && !(v > 0.0)) {
      out.descriptor.rejected.push_back({rec.line, RejectReason::NonPositive, std::string(cell)});
      continue;
    }
    out.values.push_back(v);
  }
  out.descriptor.rows_read = out.values.size();
  if (out.values.empty())
    throw Error(ErrorCode::AllRowsRejected,
                "no usable rows in '" + opt.path + "' (" +
                    std::to_string(out.descriptor.total_rows) + " data rows)");
  return out;
}

inline LoadedColumn load_column(const CsvOptions &opt, ValueDomain domain) {
  return load_column_text(detail::read_file(opt.path), opt, domain);
}

/// Loads the selected column as a validated sample.
inline Sample load_csv(const CsvOptions &opt, ValueDomain domain,
                       DatasetDescriptor *descriptor = nullptr) {
  LoadedColumn col = load_column(opt, domain);
  if (descriptor)
    *descriptor = col.descriptor;
  return make_sample(std::move(col.values), domain);
}

} // namespace tlim
