#pragma once

// Command-line front end: compute | crosscheck | simulate | compare.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tlim/closed_forms.hpp"
#include "tlim/csv.hpp"
#include "tlim/error.hpp"
#include "tlim/feasibility.hpp"
#include "tlim/harness.hpp"
#include "tlim/index.hpp"
#include "tlim/model.hpp"
#include "tlim/report.hpp"

namespace tlim::cli {

enum ExitCode : int {
  Success = 0,
  Failure = 1,
  Usage = 2,
  DataRejected = 3,
  Infeasible = 4,
  StrictTypo = 5,
};

inline constexpr std::string_view default_indices =
    "GE:0.5,GE:2,THEIL,MLD,ATK:0.5,ATK:-0.5,CHAMP,DR:0.5,DR:2,KOLM:1";

inline int exit_code_for(ErrorCode c) {
  switch (c) {
  case ErrorCode::ParameterOutOfRange:
  case ErrorCode::MissingParameter:
  case ErrorCode::InvalidArgument:
  case ErrorCode::SpecMismatch: return Usage;
  case ErrorCode::EmptySample:
  case ErrorCode::NonPositiveValue:
  case ErrorCode::ZeroMean:
  case ErrorCode::DomainViolation:
  case ErrorCode::FileNotFound:
  case ErrorCode::ParseError:
  case ErrorCode::AllRowsRejected: return DataRejected;
  case ErrorCode::InfeasibleMoments:
  case ErrorCode::NonFiniteMoment: return Infeasible;
  default: return Failure;
  }
}

/// Decimal or 0x-prefixed hexadecimal 64-bit seed; anything else is a usage
/// error.
inline std::uint64_t parse_seed(const std::string &text) {
  std::string_view s = text;
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorCode::InvalidArgument, "bad seed '" + text + "'");
  return v;
}

inline std::vector<IndexSpec> parse_index_list(const std::string &text) {
  std::vector<IndexSpec> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos)
      end = text.size();
    const auto item = tlim::detail::trim(std::string_view(text).substr(start, end - start));
    if (!item.empty())
      out.push_back(parse_index(item));
    start = end + 1;
  }
  if (out.empty())
    throw Error(ErrorCode::InvalidArgument, "empty index list");
  return out;
}

inline OutputFormat parse_format(const std::string &s) {
  if (s == "text")
    return OutputFormat::Text;
  if (s == "csv")
    return OutputFormat::Csv;
  if (s == "structured" || s == "json")
    return OutputFormat::Structured;
  throw Error(ErrorCode::InvalidArgument, "unknown format '" + s + "'");
}

inline std::string extension(OutputFormat f) {
  switch (f) {
  case OutputFormat::Text: return ".txt";
  case OutputFormat::Csv: return ".csv";
  case OutputFormat::Structured: return ".json";
  }
  return "";
}

/// File-name friendly form of an index name: "ATK(-0.5)" -> "ATK_-0.5".
inline std::string file_tag(const IndexSpec &spec) {
  std::string s;
  for (char c : spec.name()) {
    if (c == '(')
      s += '_';
    else if (c != ')')
      s += c;
  }
  return s;
}

struct Options {
  std::string input, input_b, report_a, report_b;
  std::string column = "0";
  std::string delimiter = ",";
  bool no_header = false;
  std::string indices;
  bool indices_given = false; ///< an empty --indices is a usage error
  double level = 0.95;
  std::string format = "text";
  std::string seed = "1";
  std::string out_dir;
  bool strict = false;
  bool force = false;
  bool per_index_domains = false;
  unsigned threads = 1;

  std::string model;
  double meanlog = 0.0, sdlog = 0.5, shape = 2.0, scale = 1.0, tail = 5.0, xmin = 1.0, atom = 1.0;
  std::size_t n = 0;
  std::size_t replicates = 2000;
};

namespace detail {

inline void write_file(const std::filesystem::path &path, const std::string &content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  f << content;
}

inline PopulationModel build_model(const Options &o) {
  if (o.model == "lognormal")
    return PopulationModel::lognormal(o.meanlog, o.sdlog);
  if (o.model == "gamma")
    return PopulationModel::gamma(o.shape, o.scale);
  if (o.model == "pareto")
    return PopulationModel::pareto(o.tail, o.xmin);
  if (o.model == "pointmass" || o.model == "point-mass")
    return PopulationModel::point_mass(o.atom);
  throw Error(ErrorCode::InvalidArgument,
              o.model.empty() ? "--model is required" : "unknown model '" + o.model + "'");
}

inline CsvOptions csv_options(const Options &o, const std::string &path) {
  if (o.delimiter.size() != 1)
    throw Error(ErrorCode::InvalidArgument, "delimiter must be a single character");
  CsvOptions c;
  c.path = path;
  c.column = o.column;
  c.delimiter = o.delimiter == "\\t" ? '\t' : o.delimiter[0];
  c.header = !o.no_header;
  return c;
}

inline ValueDomain strictest_domain(const std::vector<IndexSpec> &specs) {
  for (const auto &s : specs)
    if (domain_of(s.kind()) == ValueDomain::Positive)
      return ValueDomain::Positive;
  return ValueDomain::Real;
}

inline std::string row_error(const Error &e) {
  return std::string(to_string(e.code())) + ": " + e.what();
}

} // namespace detail

inline std::vector<IndexSpec> requested_indices(const Options &o, std::string_view fallback) {
  return parse_index_list(o.indices_given ? o.indices : std::string(fallback));
}

/// Builds the index report for one CSV file.
inline ReportDocument compute_report(const Options &o, const std::string &path,
                                     const std::vector<IndexSpec> &specs) {
  const CsvOptions copt = detail::csv_options(o, path);
  const std::string text = tlim::detail::read_file(path);
  const ValueDomain strict = detail::strictest_domain(specs);

  std::map<ValueDomain, std::optional<Sample>> samples;
  std::map<ValueDomain, std::string> failures;
  auto sample_for = [&](ValueDomain d) -> const Sample * {
    if (!samples.contains(d) && !failures.contains(d)) {
      try {
        auto col = load_column_text(text, copt, d);
        samples[d] = make_sample(std::move(col.values), d);
      } catch (const Error &e) {
        failures[d] = detail::row_error(e);
      }
    }
    return samples.contains(d) ? &*samples[d] : nullptr;
  };

  ReportDocument doc;
  doc.source = path;
  doc.level = o.level;

  // Descriptives and rejection counts always describe the strictest domain
  // unless per-index domains are requested and nothing survives it.
  ValueDomain desc_domain = strict;
  LoadedColumn col;
  try {
    col = load_column_text(text, copt, strict);
  } catch (const Error &e) {
    if (!o.per_index_domains || e.code() != ErrorCode::AllRowsRejected)
      throw;
    desc_domain = ValueDomain::Real;
    col = load_column_text(text, copt, desc_domain);
  }
  const auto &dd = col.descriptor;
  doc.rejected_non_numeric = dd.rejected_count(RejectReason::NonNumeric);
  doc.rejected_nonpositive = dd.rejected_count(RejectReason::NonPositive);
  doc.rejected_missing = dd.rejected_count(RejectReason::Missing);
  {
    const Sample s = make_sample(col.values, desc_domain);
    doc.n = s.size();
    doc.mean = s.mean();
    samples[desc_domain] = s;
  }

  for (const auto &spec : specs) {
    const ValueDomain d = o.per_index_domains ? domain_of(spec.kind()) : strict;
    const Sample *s = sample_for(d);
    if (!s) {
      doc.rows.push_back(make_error_row(spec.name(), failures[d]));
      continue;
    }
    try {
      doc.rows.push_back(make_row(estimate(spec, *s, o.level)));
    } catch (const Error &e) {
      doc.rows.push_back(make_error_row(spec.name(), detail::row_error(e)));
    }
  }
  return doc;
}

inline int cmd_compute(const Options &o, std::ostream &out) {
  if (o.input.empty())
    throw Error(ErrorCode::InvalidArgument, "--input is required");
  const auto specs = requested_indices(o, default_indices);
  const OutputFormat format = parse_format(o.format);
  normal_critical_value(o.level);
  const ReportDocument doc = compute_report(o, o.input, specs);
  const std::string rendered = render(doc, format);
  out << rendered;
  if (!o.out_dir.empty())
    detail::write_file(std::filesystem::path(o.out_dir) / ("report" + extension(format)), rendered);
  return Success;
}

inline int cmd_crosscheck(const Options &o, std::ostream &out) {
  const auto specs = requested_indices(o, default_indices);
  const OutputFormat format = parse_format(o.format);
  LedgerDocument doc;
  std::map<ValueDomain, std::optional<Sample>> samples;
  std::map<ValueDomain, std::string> failures;

  std::function<Sample(ValueDomain)> load;
  if (!o.input.empty()) {
    const CsvOptions copt = detail::csv_options(o, o.input);
    const std::string text = tlim::detail::read_file(o.input);
    doc.source = o.input;
    load = [copt, text](ValueDomain d) {
      auto col = load_column_text(text, copt, d);
      return make_sample(std::move(col.values), d);
    };
  } else if (!o.model.empty()) {
    const PopulationModel model = detail::build_model(o);
    const std::uint64_t seed = parse_seed(o.seed);
    const std::size_t n = o.n ? o.n : 500;
    doc.source = model.name() + " n=" + std::to_string(n) + " seed=" + std::to_string(seed);
    load = [model, n, seed](ValueDomain) { return draw(model, n, seed); };
  } else {
    throw Error(ErrorCode::InvalidArgument, "crosscheck needs --input or --model");
  }

  const ValueDomain strict = detail::strictest_domain(specs);
  for (const auto &spec : specs) {
    const ValueDomain d = o.per_index_domains ? domain_of(spec.kind()) : strict;
    if (!samples.contains(d) && !failures.contains(d)) {
      try {
        samples[d] = load(d);
      } catch (const Error &e) {
        if (!o.per_index_domains)
          throw;
        failures[d] = detail::row_error(e);
      }
    }
    LedgerEntry entry{spec.name(), std::nullopt, {}};
    if (!samples.contains(d)) {
      entry.error = failures[d];
    } else {
      try {
        entry.report = crosscheck(spec, *samples[d]);
      } catch (const Error &e) {
        entry.error = detail::row_error(e);
      }
    }
    doc.entries.push_back(std::move(entry));
  }
  const std::string rendered = render(doc, format);
  out << rendered;
  if (!o.out_dir.empty())
    detail::write_file(std::filesystem::path(o.out_dir) / ("crosscheck" + extension(format)), rendered);
  return o.strict && doc.any_suspected() ? StrictTypo : Success;
}

inline int cmd_simulate(const Options &o, std::ostream &out, std::ostream &err) {
  const PopulationModel model = detail::build_model(o);
  const auto specs = requested_indices(o, "THEIL");
  const OutputFormat format = parse_format(o.format);
  const std::uint64_t seed = parse_seed(o.seed);
  const std::size_t n = o.n ? o.n : 2000;
  normal_critical_value(o.level);

  for (const auto &spec : specs) {
    const auto v = moment_feasibility(model, spec);
    if (!v.feasible()) {
      if (!o.force)
        throw Error(ErrorCode::InfeasibleMoments,
                    spec.name() + " under " + model.name() + " needs " + v.missing());
      err << "warning: " << spec.name() << " under " << model.name() << " needs " << v.missing()
          << "; running anyway\n";
    }
  }

  HarnessOptions hopt;
  hopt.threads = std::max(1u, o.threads);
  hopt.force = o.force;
  std::vector<SimReport> runs;
  for (const auto &spec : specs)
    runs.push_back(run_replicates(model, spec, n, o.replicates, o.level, seed, hopt));

  const std::filesystem::path dir = o.out_dir.empty() ? "." : o.out_dir;
  detail::write_file(dir / "report.json", to_structured(runs));
  for (const auto &r : runs) {
    std::ostringstream z;
    z << "replicate,standardized\n";
    for (std::size_t i = 0; i < r.standardized.size(); ++i)
      z << i << ',' << fmt::shortest(r.standardized[i]) << '\n';
    detail::write_file(dir / ("standardized_" + file_tag(r.spec) + ".csv"), z.str());

    std::ostringstream h;
    h << "lower,upper,count,expected\n";
    for (const auto &b : normal_histogram(r.standardized, -4.0, 4.0, 32))
      h << fmt::shortest(b.lower) << ',' << fmt::shortest(b.upper) << ',' << b.count << ','
        << fmt::shortest(b.expected) << '\n';
    detail::write_file(dir / ("histogram_" + file_tag(r.spec) + ".csv"), h.str());
  }

  switch (format) {
  case OutputFormat::Structured: out << to_structured(runs); break;
  case OutputFormat::Csv:
    out << "index,model,n,replicates,level,seed,truth_T,truth_sigma2,coverage,ks_distance,"
           "variance_ratio,mean_bias,degenerate,feasible\n";
    for (const auto &r : runs)
      out << r.spec.name() << ',' << fmt::csv_quote(r.model.name()) << ',' << r.n << ','
          << r.replicates << ',' << fmt::shortest(r.level) << ',' << r.seed << ','
          << fmt::shortest(r.truth_T) << ',' << fmt::shortest(r.truth_sigma2) << ','
          << fmt::shortest(r.coverage) << ',' << fmt::shortest(r.ks_distance) << ','
          << fmt::shortest(r.variance_ratio) << ',' << fmt::shortest(r.mean_bias) << ','
          << (r.degenerate ? "true" : "false") << ',' << (r.feasible ? "true" : "false") << '\n';
    break;
  case OutputFormat::Text:
    for (const auto &r : runs)
      out << summary_line(r) << '\n';
    break;
  }
  return Success;
}

inline int cmd_compare(const Options &o, std::ostream &out) {
  const OutputFormat format = parse_format(o.format);
  ReportDocument a, b;
  if (!o.report_a.empty() || !o.report_b.empty()) {
    if (o.report_a.empty() || o.report_b.empty())
      throw Error(ErrorCode::InvalidArgument, "--report-a and --report-b go together");
    a = read_report(tlim::detail::read_file(o.report_a));
    b = read_report(tlim::detail::read_file(o.report_b));
    if (o.indices_given) {
      const auto specs = parse_index_list(o.indices);
      std::vector<ReportRow> keep;
      for (const auto &s : specs) {
        if (const ReportRow *r = a.find(s.name()))
          keep.push_back(*r);
        else
          keep.push_back(make_error_row(s.name(), "index missing from first report"));
      }
      a.rows = std::move(keep);
    }
  } else {
    if (o.input.empty() || o.input_b.empty())
      throw Error(ErrorCode::InvalidArgument,
                  "compare needs --input and --input-b, or --report-a and --report-b");
    normal_critical_value(o.level);
    const auto specs = requested_indices(o, default_indices);
    a = compute_report(o, o.input, specs);
    b = compute_report(o, o.input_b, specs);
  }
  const std::string rendered = render(compare_reports(a, b), format);
  out << rendered;
  if (!o.out_dir.empty())
    detail::write_file(std::filesystem::path(o.out_dir) / ("compare" + extension(format)), rendered);
  return Success;
}

/// Entry point. Returns the process exit code.
inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  Options o;
  CLI::App app{"Theil-like inequality indices: estimates, variances, cross-checks, simulations",
               "tlim"};
  app.require_subcommand(1);

  auto data_flags = [&](CLI::App *c) {
    c->add_option("--input", o.input, "CSV file");
    c->add_option("--column", o.column, "column name or 0-based index")->capture_default_str();
    c->add_option("--delimiter", o.delimiter, "field delimiter")->capture_default_str();
    c->add_flag("--no-header", o.no_header, "first row is data");
    c->add_flag("--per-index-domains", o.per_index_domains,
                "apply each index's own value domain when rejecting rows");
  };
  auto common_flags = [&](CLI::App *c) {
    c->add_option("--indices", o.indices, "comma-separated list, e.g. GE:0.5,THEIL,KOLM:1");
    c->add_option("--level", o.level, "confidence level")->capture_default_str();
    c->add_option("--format", o.format, "text, csv or structured")->capture_default_str();
    c->add_option("--out-dir", o.out_dir, "directory for output files");
  };
  auto model_flags = [&](CLI::App *c) {
    c->add_option("--model", o.model, "lognormal, gamma, pareto or pointmass");
    c->add_option("--meanlog", o.meanlog)->capture_default_str();
    c->add_option("--sdlog", o.sdlog)->capture_default_str();
    c->add_option("--shape", o.shape)->capture_default_str();
    c->add_option("--scale", o.scale)->capture_default_str();
    c->add_option("--tail", o.tail, "Pareto tail index")->capture_default_str();
    c->add_option("--xmin", o.xmin, "Pareto minimum")->capture_default_str();
    c->add_option("--atom", o.atom, "point-mass location")->capture_default_str();
    c->add_option("--n", o.n, "sample size");
    c->add_option("--seed", o.seed, "decimal or 0x-hex 64-bit seed")->capture_default_str();
  };

  auto *compute = app.add_subcommand("compute", "index and variance report for a CSV column");
  data_flags(compute);
  common_flags(compute);

  auto *cross = app.add_subcommand("crosscheck", "closed-form versus general variance ledger");
  data_flags(cross);
  common_flags(cross);
  model_flags(cross);
  cross->add_flag("--strict", o.strict, "exit 5 if any closed form disagrees");

  auto *sim = app.add_subcommand("simulate", "Monte-Carlo coverage and normality check");
  common_flags(sim);
  model_flags(sim);
  sim->add_option("--replicates", o.replicates)->capture_default_str();
  sim->add_option("--threads", o.threads)->capture_default_str();
  sim->add_flag("--force", o.force, "run even when required moments are infinite");

  auto *cmp = app.add_subcommand("compare", "difference tests between two datasets or reports");
  data_flags(cmp);
  common_flags(cmp);
  cmp->add_option("--input-b", o.input_b, "second CSV file");
  cmp->add_option("--report-a", o.report_a, "first structured report");
  cmp->add_option("--report-b", o.report_b, "second structured report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Success : Usage;
  }

  for (auto *c : {compute, cross, sim, cmp})
    if (c->parsed())
      o.indices_given = c->count("--indices") > 0;

  try {
    if (compute->parsed())
      return cmd_compute(o, out);
    if (cross->parsed())
      return cmd_crosscheck(o, out);
    if (sim->parsed())
      return cmd_simulate(o, out, err);
    return cmd_compare(o, out);
  } catch (const Error &e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return Failure;
  }
}

} // namespace tlim::cli
