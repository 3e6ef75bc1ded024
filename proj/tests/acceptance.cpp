// Acceptance criteria, one PASS/FAIL line each. Exit status is the number of
// failed criteria (0 when all pass).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlim/cli.hpp"
#include "tlim/tlim.hpp"

using namespace tlim;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string &what) {
    if (!ok && pass) {
      pass = false;
      detail << "first failure: " << what << "; ";
    }
  }
};

std::vector<IndexSpec> panel() {
  return {catalog(IndexKind::GeneralizedEntropy, 0.5), catalog(IndexKind::GeneralizedEntropy, 2.0),
          catalog(IndexKind::Theil),                   catalog(IndexKind::MLD),
          catalog(IndexKind::Atkinson, 0.5),           catalog(IndexKind::Atkinson, -0.5),
          catalog(IndexKind::Champernowne),            catalog(IndexKind::Kolm, 1.0),
          catalog(IndexKind::RenyiDivergence, 0.5),    catalog(IndexKind::RenyiDivergence, 2.0)};
}

// Random positive sample i: lognormal with varying spread and size.
Sample random_sample(std::uint64_t i, std::size_t n = 0) {
  CounterRng rng(derive_key(0xACCE97, i));
  const double sd = 0.2 + 1.0 * rng.uniform();
  const double m = -2.0 + 4.0 * rng.uniform();
  if (n == 0)
    n = 2 + static_cast<std::size_t>(rng.next_u64() % 500);
  return draw(PopulationModel::lognormal(m, sd), n, derive_key(0x5A3D, i));
}

bool rel_close(double got, double want, double rtol) {
  return std::fabs(got - want) <= rtol * std::max(std::fabs(want), 1e-300);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void c1_zero_on_equality(Outcome &o) {
  double worst = 0.0;
  for (std::size_t n : {1u, 10u, 1000u})
    for (double c : {0.37, 1.0, 995.2})
      for (const auto &spec : panel()) {
        const double v = eval_index(spec, make_sample(std::vector<double>(n, c), ValueDomain::Positive));
        worst = std::max(worst, std::fabs(v));
        o.require(std::fabs(v) <= 1e-12, spec.name() + " n=" + std::to_string(n));
      }
  o.detail << "max |T_n| = " << worst;
}

void c2_invariance(Outcome &o) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Sample s = random_sample(i);
    const std::vector<double> xs(s.values().begin(), s.values().end());
    for (const auto &spec : panel()) {
      const double v = eval_index(spec, s);
      const bool scale = is_scale_invariant(spec.kind());
      for (double c : scale ? std::vector<double>{1e-3, 1e3} : std::vector<double>{-10.0, 10.0}) {
        std::vector<double> ys = xs;
        for (auto &y : ys)
          y = scale ? y * c : y + c;
        const double w =
            eval_index(spec, make_sample(ys, scale ? ValueDomain::Positive : ValueDomain::Real));
        worst = std::max(worst, std::fabs(w - v) / std::fabs(v));
        o.require(rel_close(w, v, 1e-10), spec.name() + " sample " + std::to_string(i));
      }
    }
  }
  o.detail << "100 samples, max rel diff = " << worst;
}

void c3_champernowne(Outcome &o) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Sample s = random_sample(i);
    const double ch = eval_index(catalog(IndexKind::Champernowne), s);
    const double mld = eval_index(catalog(IndexKind::MLD), s);
    const double d = std::fabs(ch - (1.0 - std::exp(-mld)));
    worst = std::max(worst, d);
    o.require(d <= 1e-12, "sample " + std::to_string(i));
  }
  o.detail << "max |Ch - (1 - e^-MLD)| = " << worst;
}

void c4_influence(Outcome &o) {
  double worst_var = 0.0, worst_mean = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Sample s = random_sample(i);
    for (const auto &spec : panel()) {
      const double general = variance_plugin(spec, s);
      const double table = referee_variance(spec, s);
      worst_var = std::max(worst_var, std::fabs(table - general) / std::fabs(general));
      o.require(rel_close(table, general, 1e-10), spec.name() + " variance, sample " + std::to_string(i));

      const double mu = s.mean(), B = table_B(spec, s);
      CompensatedSum f;
      for (double x : s.values())
        f += table_influence(spec, mu, B, x);
      const double mean = f.value() / static_cast<double>(s.size());
      const double want = table_mean_influence(spec, mu, B);
      worst_mean = std::max(worst_mean, std::fabs(mean - want) / std::fabs(want));
      o.require(rel_close(mean, want, 1e-8), spec.name() + " mean influence, sample " + std::to_string(i));
    }
  }
  o.detail << "max rel gap variance = " << worst_var << ", mean influence = " << worst_mean;
}

void c5_closed_forms(Outcome &o) {
  std::vector<Sample> samples;
  for (std::uint64_t i = 0; i < 100; ++i)
    samples.push_back(random_sample(1000 + i, 500));
  double worst = 0.0;
  for (const char *name : {"MLD", "CHAMP", "GE:0.5", "GE:2", "ATK:0.5", "ATK:-0.5", "DR:0.5", "DR:2"})
    for (const auto &s : samples) {
      const auto r = crosscheck(parse_index(name), s);
      worst = std::max(worst, r.rel_gap);
      o.require(r.status == CrossCheckStatus::Agree, std::string(name) + " closed form");
    }
  o.detail << "max closed/general gap = " << worst << "; ";
  for (const char *name : {"THEIL", "KOLM:1"}) {
    std::size_t flagged = 0;
    double worst_referee = 0.0;
    for (const auto &s : samples) {
      const auto r = crosscheck(parse_index(name), s);
      flagged += r.status == CrossCheckStatus::PaperTypoSuspected;
      worst_referee = std::max(worst_referee, r.referee_gap);
      o.require(r.referee_gap <= 1e-8, std::string(name) + " referee");
    }
    o.detail << name << " referee gap " << worst_referee << " (" << flagged
             << "/100 PaperTypoSuspected); ";
  }
}

void c6_clt(Outcome &o) {
  const auto model = PopulationModel::lognormal(0.0, 0.5);
  for (const char *name : {"THEIL", "MLD", "GE:2", "ATK:0.5", "KOLM:1", "DR:2"}) {
    const SimReport r = run_replicates(model, parse_index(name), 2000, 2000, 0.95, 20240601);
    o.require(r.coverage >= 0.93 && r.coverage <= 0.97, std::string(name) + " coverage");
    o.require(r.ks_distance < 0.05, std::string(name) + " ks");
    o.require(r.variance_ratio >= 0.9 && r.variance_ratio <= 1.1, std::string(name) + " variance ratio");
    o.detail << r.spec.name() << " cov=" << fmt::fixed(r.coverage, 4)
             << " ks=" << fmt::fixed(r.ks_distance, 4)
             << " vr=" << fmt::fixed(r.variance_ratio, 4) << "; ";
  }
}

void c7_consistency(Outcome &o) {
  const std::vector<std::size_t> grid = {100, 1000, 10000};
  const std::vector<std::pair<PopulationModel, IndexSpec>> cases = {
      {PopulationModel::lognormal(0.0, 0.5), catalog(IndexKind::Theil)},
      {PopulationModel::gamma(2.0, 1.0), catalog(IndexKind::MLD)}};
  for (const auto &[model, spec] : cases) {
    std::vector<std::vector<double>> err(grid.size());
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto rows = consistency_sweep(model, spec, grid, 200, seed);
      for (std::size_t g = 0; g < grid.size(); ++g)
        err[g].push_back(rows[g].mean_abs_error);
    }
    o.detail << spec.name() << "/" << model.name() << ":";
    for (std::size_t g = 0; g < grid.size(); ++g) {
      o.detail << " " << fmt::sci(median(err[g]), 3);
      if (g > 0)
        o.require(median(err[g]) < median(err[g - 1]), spec.name() + " not decreasing");
    }
    o.detail << "; ";
  }
}

void c8_feasibility(Outcome &o) {
  const IndexSpec ge2 = catalog(IndexKind::GeneralizedEntropy, 2.0);
  try {
    run_replicates(PopulationModel::pareto(3.0, 1.0), ge2, 5000, 2000, 0.95, 20240601);
    o.require(false, "Pareto(3) GE(2) was not refused");
  } catch (const Error &e) {
    const std::string msg = e.what();
    o.require(e.code() == ErrorCode::InfeasibleMoments && msg.find("X^4") != std::string::npos,
              "refusal does not name E X^4");
    o.detail << "Pareto(3): refused (" << msg << "); ";
  }
  const SimReport r =
      run_replicates(PopulationModel::pareto(5.0, 1.0), ge2, 5000, 2000, 0.95, 20240601);
  o.require(r.coverage >= 0.92 && r.coverage <= 0.98, "Pareto(5) coverage");
  o.require(r.ks_distance < 0.05, "Pareto(5) ks");
  o.require(r.variance_ratio >= 0.9 && r.variance_ratio <= 1.1, "Pareto(5) variance ratio");
  o.detail << "Pareto(5): cov=" << fmt::fixed(r.coverage, 4) << " ks=" << fmt::fixed(r.ks_distance, 4)
           << " vr=" << fmt::fixed(r.variance_ratio, 4);
}

void c9_derivatives(Outcome &o) {
  CounterRng rng(derive_key(0xD1FF, 0));
  double worst = 0.0;
  auto check = [&](const std::string &what, auto &&f, double d, double x) {
    const double h = 1e-5 * std::max(1.0, std::fabs(x));
    const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
    const double gap = d == 0.0 ? std::fabs(fd) : std::fabs(fd - d) / std::fabs(d);
    worst = std::max(worst, gap);
    o.require(gap <= 1e-6, what);
  };
  for (const auto &spec : panel())
    for (int i = 0; i < 1000; ++i) {
      const double x = 0.1 + 9.9 * rng.uniform();
      check(spec.name() + " tau'", [&](double t) { return spec.tau(t); }, spec.tau_prime(x), x);
      check(spec.name() + " h1'", [&](double t) { return spec.h1(t); }, spec.h1_prime(x), x);
      check(spec.name() + " h2'", [&](double t) { return spec.h2(t); }, spec.h2_prime(x), x);
    }
  o.detail << "max rel gap = " << worst;
}

void c10_round_trip(Outcome &o) {
  const std::string dir = TLIM_FIXTURE_DIR;
  for (const char *name : {"table4_esam2.json", "table4_esps.json"}) {
    const std::string text = slurp(dir + "/" + name);
    o.require(!text.empty() && to_structured(read_report(text)) == text,
              std::string(name) + " round trip");
  }
  const ReportRow *theil = read_report(slurp(dir + "/table4_esam2.json")).find("THEIL");
  o.require(theil && theil->value == 0.43102 && theil->sigma2 == 0.0004371, "fixture THEIL row");

  const std::vector<std::string> args = {"tlim", "compare", "--report-a", dir + "/table4_esam2.json",
                                         "--report-b", dir + "/table4_esps.json", "--format",
                                         "structured"};
  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.require(code == 0, "compare exit code");
  if (code == 0) {
    const auto doc = nlohmann::json::parse(out.str());
    bool found = false;
    for (const auto &row : doc["rows"])
      if (row["index"] == "THEIL") {
        found = true;
        const double d = row["difference"];
        o.require(d > 0.0, "Theil difference not positive");
        o.detail << "fixtures byte-identical; THEIL difference " << d
                 << " z=" << row["z"].get<double>();
      }
    o.require(found, "no THEIL row in comparison");
  }
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome &)>>> criteria = {
      {"1 zero on equality", c1_zero_on_equality},
      {"2 scale/translation invariance", c2_invariance},
      {"3 Champernowne identity", c3_champernowne},
      {"4 influence consistency", c4_influence},
      {"5 closed-form oracle", c5_closed_forms},
      {"6 CLT validation", c6_clt},
      {"7 consistency", c7_consistency},
      {"8 feasibility gate", c8_feasibility},
      {"9 kernel derivatives", c9_derivatives},
      {"10 CLI round trip", c10_round_trip},
  };
  int failed = 0;
  for (const auto &[label, run] : criteria) {
    Outcome o;
    try {
      run(o);
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << label << ": " << o.detail.str()
              << std::endl;
  }
  return failed;
}
