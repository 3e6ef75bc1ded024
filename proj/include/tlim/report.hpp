#pragma once

// Report documents produced by the command-line front end, with text, CSV
// and structured (JSON) renderings. Structured output is versioned through
// its "schema" field; see README.md for the layout.

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlim/asymptotics.hpp"
#include "tlim/closed_forms.hpp"
#include "tlim/csv.hpp"
#include "tlim/error.hpp"
#include "tlim/harness.hpp"
#include "tlim/index.hpp"

namespace tlim {

using ojson = nlohmann::ordered_json;

inline constexpr std::string_view report_schema = "tlim-report/1";
inline constexpr std::string_view compare_schema = "tlim-compare/1";
inline constexpr std::string_view crosscheck_schema = "tlim-crosscheck/1";
inline constexpr std::string_view simulation_schema = "tlim-simulation/1";

enum class OutputFormat { Text, Csv, Structured };

namespace fmt {

// Locale-independent number formatting ('.' decimal, no grouping).
inline std::string fixed(double x, int precision) {
  if (!std::isfinite(x))
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  std::array<char, 64> buf{};
  auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::fixed, precision);
  return std::string(buf.data(), r.ptr);
}

inline std::string sci(double x, int precision) {
  if (!std::isfinite(x))
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  std::array<char, 64> buf{};
  auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::scientific,
                         precision);
  return std::string(buf.data(), r.ptr);
}

inline std::string shortest(double x) { return detail::format_real(x); }

/// Rounds to 12 significant digits, stripping binary noise from derived
/// quantities (100 * 0.43102 prints as 43.102).
inline double round_sig(double x) {
  if (!std::isfinite(x) || x == 0.0)
    return x;
  std::array<char, 64> buf{};
  auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 12);
  double y = 0.0;
  std::from_chars(buf.data(), r.ptr, y);
  return y;
}

inline std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width)
    return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

inline std::string csv_quote(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string q = "\"";
  for (char c : s)
    q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

} // namespace fmt

// ---------------------------------------------------------------------------
// Index report.

struct ReportRow {
  std::string index; ///< IndexSpec::name()
  std::size_t n = 0;
  double value = 0.0;
  double sigma2 = 0.0;
  bool degenerate = false;
  std::string error; ///< non-empty for a failed row

  bool ok() const { return error.empty(); }
  Estimate estimate(double level) const {
    return make_estimate(parse_index(index), value, sigma2, n, level, degenerate);
  }
};

struct ReportDocument {
  std::string source;
  double level = 0.95;
  std::size_t n = 0;  ///< accepted rows
  double mean = 0.0;  ///< mean of accepted rows
  std::size_t rejected_non_numeric = 0;
  std::size_t rejected_nonpositive = 0;
  std::size_t rejected_missing = 0;
  std::vector<ReportRow> rows;

  const ReportRow *find(const std::string &index) const {
    for (const auto &r : rows)
      if (r.index == index)
        return &r;
    return nullptr;
  }
};

inline ReportRow make_row(const Estimate &e) {
  return {e.spec.name(), e.n, e.value, e.sigma2, e.degenerate, {}};
}

inline ReportRow make_error_row(const std::string &index, const std::string &error) {
  ReportRow r;
  r.index = index;
  r.error = error;
  return r;
}

inline ojson to_json(const ReportDocument &d) {
  ojson j;
  j["schema"] = report_schema;
  j["source"] = d.source;
  j["level"] = d.level;
  j["descriptives"] = {{"n", d.n}, {"mean", d.mean}};
  j["rejected"] = {{"non_numeric", d.rejected_non_numeric},
                   {"nonpositive", d.rejected_nonpositive},
                   {"missing", d.rejected_missing}};
  ojson rows = ojson::array();
  for (const auto &r : d.rows) {
    ojson o;
    o["index"] = r.index;
    if (!r.ok()) {
      o["error"] = r.error;
      rows.push_back(std::move(o));
      continue;
    }
    const Estimate e = r.estimate(d.level);
    o["n"] = r.n;
    o["value"] = r.value;
    o["sigma2"] = r.sigma2;
    o["value_percent"] = fmt::round_sig(100.0 * r.value);
    o["sigma2_percent_scale"] = fmt::round_sig(1e4 * r.sigma2);
    o["std_error"] = fmt::round_sig(e.std_error);
    o["ci_low"] = fmt::round_sig(e.ci_low);
    o["ci_high"] = fmt::round_sig(e.ci_high);
    o["degenerate"] = r.degenerate;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline std::string to_structured(const ReportDocument &d) { return to_json(d).dump(2) + "\n"; }

/// Reads a structured report. Derived fields (percent scale, stderr,
/// interval) are recomputed on output and ignored here.
inline ReportDocument read_report(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const std::exception &e) {
    throw Error(ErrorCode::ParseError, std::string("report is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != report_schema)
      throw Error(ErrorCode::ParseError, "unsupported report schema");
    ReportDocument d;
    d.source = j.at("source").get<std::string>();
    d.level = j.at("level").get<double>();
    d.n = j.at("descriptives").at("n").get<std::size_t>();
    d.mean = j.at("descriptives").at("mean").get<double>();
    d.rejected_non_numeric = j.at("rejected").at("non_numeric").get<std::size_t>();
    d.rejected_nonpositive = j.at("rejected").at("nonpositive").get<std::size_t>();
    d.rejected_missing = j.at("rejected").at("missing").get<std::size_t>();
    for (const auto &o : j.at("rows")) {
      ReportRow r;
      r.index = o.at("index").get<std::string>();
      parse_index(r.index);
      if (o.contains("error")) {
        r.error = o.at("error").get<std::string>();
      } else {
        r.n = o.at("n").get<std::size_t>();
        r.value = o.at("value").get<double>();
        r.sigma2 = o.at("sigma2").get<double>();
        r.degenerate = o.at("degenerate").get<bool>();
      }
      d.rows.push_back(std::move(r));
    }
    return d;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::ParseError, std::string("malformed report: ") + e.what());
  }
}

inline std::string to_csv(const ReportDocument &d) {
  std::ostringstream os;
  os << "index,n,value,value_percent,sigma2,sigma2_percent_scale,std_error,ci_low,ci_high,level,"
        "degenerate,error\n";
  for (const auto &r : d.rows) {
    os << fmt::csv_quote(r.index) << ',';
    if (!r.ok()) {
      os << ",,,,,,,,," << fmt::shortest(d.level) << ",," << fmt::csv_quote(r.error) << '\n';
      continue;
    }
    const Estimate e = r.estimate(d.level);
    os << r.n << ',' << fmt::shortest(r.value) << ',' << fmt::fixed(100.0 * r.value, 4) << ','
       << fmt::shortest(r.sigma2) << ',' << fmt::shortest(fmt::round_sig(1e4 * r.sigma2)) << ','
       << fmt::shortest(e.std_error) << ',' << fmt::shortest(e.ci_low) << ','
       << fmt::shortest(e.ci_high) << ',' << fmt::shortest(d.level) << ','
       << (r.degenerate ? "true" : "false") << ",\n";
  }
  return os.str();
}

inline std::string to_text(const ReportDocument &d) {
  std::ostringstream os;
  os << "source: " << d.source << "\n";
  os << "n = " << d.n << "   mean = " << fmt::fixed(d.mean, 4) << "   level = "
     << fmt::shortest(d.level) << "\n";
  const std::size_t rej = d.rejected_non_numeric + d.rejected_nonpositive + d.rejected_missing;
  if (rej)
    os << "rejected rows: " << rej << " (non-numeric " << d.rejected_non_numeric
       << ", nonpositive " << d.rejected_nonpositive << ", missing " << d.rejected_missing
       << ")\n";
  os << fmt::pad("index", 10, true) << fmt::pad("T (%)", 12) << fmt::pad("sigma2", 14)
     << fmt::pad("sigma2 x1e4", 14) << fmt::pad("std.err", 12) << fmt::pad("CI low (%)", 12)
     << fmt::pad("CI high (%)", 12) << "\n";
  for (const auto &r : d.rows) {
    os << fmt::pad(r.index, 10, true);
    if (!r.ok()) {
      os << "  error: " << r.error << "\n";
      continue;
    }
    const Estimate e = r.estimate(d.level);
    os << fmt::pad(fmt::fixed(100.0 * r.value, 4), 12) << fmt::pad(fmt::sci(r.sigma2, 4), 14)
       << fmt::pad(fmt::fixed(1e4 * r.sigma2, 4), 14) << fmt::pad(fmt::sci(e.std_error, 3), 12)
       << fmt::pad(fmt::fixed(100.0 * e.ci_low, 4), 12)
       << fmt::pad(fmt::fixed(100.0 * e.ci_high, 4), 12) << (r.degenerate ? "  [degenerate]" : "")
       << "\n";
  }
  return os.str();
}

inline std::string render(const ReportDocument &d, OutputFormat f) {
  switch (f) {
  case OutputFormat::Text: return to_text(d);
  case OutputFormat::Csv: return to_csv(d);
  case OutputFormat::Structured: return to_structured(d);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Two-sample comparison.

struct CompareRow {
  std::string index;
  double value_a = 0.0, value_b = 0.0;
  Comparison result;
  std::string error;
  bool ok() const { return error.empty(); }
};

struct CompareDocument {
  std::string source_a, source_b;
  std::size_t n_a = 0, n_b = 0;
  double level = 0.95;
  std::vector<CompareRow> rows;
};

inline CompareDocument compare_reports(const ReportDocument &a, const ReportDocument &b) {
  CompareDocument d;
  d.source_a = a.source;
  d.source_b = b.source;
  d.n_a = a.n;
  d.n_b = b.n;
  d.level = a.level;
  for (const auto &ra : a.rows) {
    CompareRow row;
    row.index = ra.index;
    const ReportRow *rb = b.find(ra.index);
    if (!rb)
      row.error = "index missing from second report";
    else if (!ra.ok())
      row.error = ra.error;
    else if (!rb->ok())
      row.error = rb->error;
    else {
      row.value_a = ra.value;
      row.value_b = rb->value;
      row.result = compare(ra.estimate(a.level), rb->estimate(b.level));
    }
    d.rows.push_back(std::move(row));
  }
  return d;
}

inline std::string render(const CompareDocument &d, OutputFormat f) {
  std::ostringstream os;
  switch (f) {
  case OutputFormat::Structured: {
    ojson j;
    j["schema"] = compare_schema;
    j["a"] = {{"source", d.source_a}, {"n", d.n_a}};
    j["b"] = {{"source", d.source_b}, {"n", d.n_b}};
    j["level"] = d.level;
    ojson rows = ojson::array();
    for (const auto &r : d.rows) {
      ojson o;
      o["index"] = r.index;
      if (!r.ok()) {
        o["error"] = r.error;
      } else {
        o["value_a"] = r.value_a;
        o["value_b"] = r.value_b;
        o["difference"] = r.result.difference;
        o["std_error"] = r.result.std_error;
        o["z"] = r.result.z;
        o["p_value"] = r.result.p_value;
      }
      rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    os << j.dump(2) << "\n";
    break;
  }
  case OutputFormat::Csv:
    os << "index,value_a,value_b,difference,std_error,z,p_value,error\n";
    for (const auto &r : d.rows) {
      os << fmt::csv_quote(r.index) << ',';
      if (!r.ok())
        os << ",,,,,," << fmt::csv_quote(r.error) << '\n';
      else
        os << fmt::shortest(r.value_a) << ',' << fmt::shortest(r.value_b) << ','
           << fmt::shortest(r.result.difference) << ',' << fmt::shortest(r.result.std_error) << ','
           << fmt::shortest(r.result.z) << ',' << fmt::shortest(r.result.p_value) << ",\n";
    }
    break;
  case OutputFormat::Text:
    os << "A: " << d.source_a << " (n = " << d.n_a << ")\n";
    os << "B: " << d.source_b << " (n = " << d.n_b << ")\n";
    os << fmt::pad("index", 10, true) << fmt::pad("A (%)", 12) << fmt::pad("B (%)", 12)
       << fmt::pad("A-B (%)", 12) << fmt::pad("std.err", 12) << fmt::pad("z", 10)
       << fmt::pad("p-value", 10) << "\n";
    for (const auto &r : d.rows) {
      os << fmt::pad(r.index, 10, true);
      if (!r.ok()) {
        os << "  error: " << r.error << "\n";
        continue;
      }
      os << fmt::pad(fmt::fixed(100.0 * r.value_a, 4), 12)
         << fmt::pad(fmt::fixed(100.0 * r.value_b, 4), 12)
         << fmt::pad(fmt::fixed(100.0 * r.result.difference, 4), 12)
         << fmt::pad(fmt::sci(r.result.std_error, 3), 12) << fmt::pad(fmt::fixed(r.result.z, 3), 10)
         << fmt::pad(fmt::fixed(r.result.p_value, 4), 10) << "\n";
    }
    break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Closed-form cross-check ledger.

struct LedgerEntry {
  std::string index;
  std::optional<ClosedFormReport> report;
  std::string error;
};

struct LedgerDocument {
  std::string source;
  std::vector<LedgerEntry> entries;

  bool any_suspected() const {
    for (const auto &e : entries)
      if (e.report && e.report->status == CrossCheckStatus::PaperTypoSuspected)
        return true;
    return false;
  }
};

inline std::string render(const LedgerDocument &d, OutputFormat f) {
  std::ostringstream os;
  switch (f) {
  case OutputFormat::Structured: {
    ojson j;
    j["schema"] = crosscheck_schema;
    j["source"] = d.source;
    j["rtol"] = crosscheck_rtol;
    ojson rows = ojson::array();
    for (const auto &e : d.entries) {
      ojson o;
      o["index"] = e.index;
      if (!e.report) {
        o["error"] = e.error;
        rows.push_back(std::move(o));
        continue;
      }
      const auto &r = *e.report;
      o["n"] = r.n;
      o["status"] = to_string(r.status);
      o["sigma2_closed"] = r.sigma2_closed;
      o["sigma2_general"] = r.sigma2_general;
      o["sigma2_referee"] = r.sigma2_referee;
      o["rel_gap"] = r.rel_gap;
      o["referee_gap"] = r.referee_gap;
      o["formula"] = r.formula;
      if (r.sigma2_alternative) {
        o["alternative"] = {{"formula", r.alternative_label},
                            {"sigma2", *r.sigma2_alternative},
                            {"rel_gap", *r.alternative_gap}};
      }
      o["note"] = r.note;
      rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    os << j.dump(2) << "\n";
    break;
  }
  case OutputFormat::Csv:
    os << "index,n,status,sigma2_closed,sigma2_general,sigma2_referee,rel_gap,referee_gap,"
          "alternative_sigma2,alternative_gap,formula,alternative_formula,note,error\n";
    for (const auto &e : d.entries) {
      os << fmt::csv_quote(e.index) << ',';
      if (!e.report) {
        os << ",,,,,,,,,,,," << fmt::csv_quote(e.error) << '\n';
        continue;
      }
      const auto &r = *e.report;
      os << r.n << ',' << to_string(r.status) << ',' << fmt::shortest(r.sigma2_closed) << ','
         << fmt::shortest(r.sigma2_general) << ',' << fmt::shortest(r.sigma2_referee) << ','
         << fmt::shortest(r.rel_gap) << ',' << fmt::shortest(r.referee_gap) << ','
         << (r.sigma2_alternative ? fmt::shortest(*r.sigma2_alternative) : "") << ','
         << (r.alternative_gap ? fmt::shortest(*r.alternative_gap) : "") << ','
         << fmt::csv_quote(r.formula) << ',' << fmt::csv_quote(r.alternative_label) << ','
         << fmt::csv_quote(r.note) << ",\n";
    }
    break;
  case OutputFormat::Text:
    os << "source: " << d.source << "\n";
    os << fmt::pad("index", 10, true) << fmt::pad("status", 20) << fmt::pad("closed", 14)
       << fmt::pad("general", 14) << fmt::pad("referee", 14) << fmt::pad("rel_gap", 11) << "\n";
    for (const auto &e : d.entries) {
      os << fmt::pad(e.index, 10, true);
      if (!e.report) {
        os << "  error: " << e.error << "\n";
        continue;
      }
      const auto &r = *e.report;
      os << fmt::pad(std::string(to_string(r.status)), 20) << fmt::pad(fmt::sci(r.sigma2_closed, 6), 14)
         << fmt::pad(fmt::sci(r.sigma2_general, 6), 14)
         << fmt::pad(fmt::sci(r.sigma2_referee, 6), 14) << fmt::pad(fmt::sci(r.rel_gap, 2), 11)
         << "\n";
      os << "          formula: " << r.formula << "\n";
      if (r.sigma2_alternative)
        os << "          alternative: " << r.alternative_label << " -> "
           << fmt::sci(*r.sigma2_alternative, 6) << " (rel_gap " << fmt::sci(*r.alternative_gap, 2)
           << ")\n";
      os << "          note: " << r.note << "\n";
    }
    break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Simulation report.

inline ojson to_json(const SimReport &r) {
  ojson j;
  j["index"] = r.spec.name();
  j["model"] = r.model.name();
  j["n"] = r.n;
  j["replicates"] = r.replicates;
  j["level"] = r.level;
  j["seed"] = r.seed;
  j["seed_rule"] = "replicate r uses CounterRng(derive_key(seed, r))";
  j["feasible"] = r.feasible;
  j["degenerate"] = r.degenerate;
  j["truth_T"] = r.truth_T;
  j["truth_sigma2"] = r.truth_sigma2;
  j["coverage"] = r.coverage;
  j["ks_distance"] = r.ks_distance;
  j["variance_ratio"] = r.variance_ratio;
  j["mean_bias"] = r.mean_bias;
  j["mean_abs_error"] = r.mean_abs_error;
  return j;
}

inline std::string to_structured(const std::vector<SimReport> &runs) {
  ojson j;
  j["schema"] = simulation_schema;
  j["runs"] = ojson::array();
  for (const auto &r : runs)
    j["runs"].push_back(to_json(r));
  return j.dump(2) + "\n";
}

inline std::string summary_line(const SimReport &r) {
  std::string s = r.spec.name() + " " + r.model.name() + " n=" + std::to_string(r.n) +
                  " R=" + std::to_string(r.replicates) + " coverage=" + fmt::fixed(r.coverage, 4);
  if (r.degenerate)
    return s + " [degenerate: zero asymptotic variance]";
  return s + " ks=" + fmt::fixed(r.ks_distance, 4) +
         " variance_ratio=" + fmt::fixed(r.variance_ratio, 4) +
         (r.feasible ? "" : " [forced: moment conditions fail]");
}

} // namespace tlim
