#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "paracube/bench.hpp"
#include "paracube/integrands.hpp"
#include "paracube/mcubes.hpp"
#include "paracube/pagani.hpp"

using namespace paracube;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitBadArgs = 2;

constexpr const char* kCompareFooter =
    "note: A and B are two configurations of this build on one machine. The ratio is not a "
    "comparison between GPU toolchains.";

struct Global {
  unsigned workers = 0;
  bool unordered = false;
  std::uint64_t seed = 1;
  std::string format = "text";
  std::string out;
};

ExecConfig exec_from(const Global& g) {
  ExecConfig e;
  e.workers = g.workers;
  e.deterministic = !g.unordered;
  return e;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ArgumentError("cannot write " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ErrorMode parse_error_mode(const std::string& s) {
  if (s == "max-null") return ErrorMode::MaxNull;
  if (s == "pairwise") return ErrorMode::Pairwise;
  if (s == "asymptotic") return ErrorMode::Asymptotic;
  throw ArgumentError("unknown error mode '" + s + "'");
}

// "workers=8,unordered,chunk=4" style configuration string
ExecConfig parse_config(const std::string& text, const ExecConfig& base) {
  ExecConfig c = base;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    const std::string key = item.substr(0, eq);
    const std::string val = eq == std::string::npos ? "" : item.substr(eq + 1);
    try {
      if (key == "workers") {
        c.workers = static_cast<unsigned>(std::stoul(val));
      } else if (key == "chunk") {
        c.chunk = std::stoul(val);
        if (c.chunk == 0) throw ArgumentError("chunk must be >= 1");
      } else if (key == "deterministic" && val.empty()) {
        c.deterministic = true;
      } else if (key == "unordered" && val.empty()) {
        c.deterministic = false;
      } else {
        throw ArgumentError("unknown configuration item '" + item + "'");
      }
    } catch (const std::logic_error&) {
      throw ArgumentError("bad configuration item '" + item + "'");
    }
  }
  return c;
}

struct IntegrateArgs {
  std::string integrator;
  std::string integrand;
  int d = 5;
  double rel_tol = 1e-3;
  int max_iterations = 60;
  std::size_t initial_regions = 1024;
  std::string error_mode = "max-null";
  double n = 1e6;
  int iterations = 10;
  int skip = 0;
  bool progress = false;
  bool no_reference = false;
};

int cmd_integrate(const Global& g, const IntegrateArgs& a) {
  const Integrator which = parse_integrator(a.integrator);
  const auto f = make_integrand(a.integrand, a.d);
  if (!f) throw ArgumentError("unknown integrand '" + a.integrand + "'");
  const ExecConfig exec = exec_from(g);

  json report = {{"integrator", a.integrator}, {"integrand", a.integrand}, {"d", a.d}};
  bool converged = false;
  double estimate = 0.0, errorest = 0.0;
  if (which == Integrator::Pagani) {
    PaganiConfig cfg;
    cfg.rel_tol = a.rel_tol;
    cfg.max_iterations = a.max_iterations;
    cfg.initial_regions = a.initial_regions;
    cfg.error_mode = parse_error_mode(a.error_mode);
    if (a.progress) cfg.progress = &std::cerr;
    const auto r = refine(*f, cfg, exec);
    estimate = r.estimate;
    errorest = r.errorest;
    converged = r.converged;
    report["iterations"] = r.iterations;
    report["regions_processed"] = r.regions_processed;
    report["reason"] = r.reason;
  } else {
    McubesConfig cfg;
    cfg.iterations = a.iterations;
    cfg.skip = a.skip;
    cfg.seed = g.seed;
    if (a.progress) cfg.progress = &std::cerr;
    const auto r = run(*f, a.n, cfg, exec);
    estimate = r.estimate;
    errorest = r.errorest;
    // Monte Carlo has no stopping rule; only an explicit target can fail.
    converged = !(a.rel_tol > 0.0) || errorest <= a.rel_tol * std::fabs(estimate);
    report["iterations"] = cfg.iterations;
    report["samples_per_iteration"] = r.plan.samples;
    report["chi2_per_dof"] = r.chi2_per_dof;
  }
  report["estimate"] = estimate;
  report["errorest"] = errorest;
  report["converged"] = converged;
  if (!a.no_reference) {
    const auto ref = reference_for(a.integrand, a.d, exec);
    report["reference"] = ref->value;
    report["reference_method"] = std::string(to_string(ref->method));
    report["abs_diff"] = std::fabs(estimate - ref->value);
  }

  Output out(g.out);
  auto& os = out.os();
  if (g.format == "json") {
    os << report.dump(2) << '\n';
  } else if (g.format == "csv") {
    os << "integrator,integrand,d,estimate,errorest,reference,abs_diff,converged\n";
    os << a.integrator << ',' << a.integrand << ',' << a.d << ',' << g17(estimate) << ','
       << g17(errorest) << ',' << (report.contains("reference") ? g17(report["reference"]) : "")
       << ',' << (report.contains("abs_diff") ? g17(report["abs_diff"]) : "") << ','
       << (converged ? 1 : 0) << '\n';
  } else {
    os << a.integrator << ' ' << a.integrand << " d=" << a.d << '\n';
    os << "  estimate   " << g17(estimate) << '\n';
    os << "  errorest   " << g17(errorest) << '\n';
    if (report.contains("reference")) {
      os << "  reference  " << g17(report["reference"]) << " ("
         << report["reference_method"].get<std::string>() << ")\n";
      os << "  |diff|     " << g17(report["abs_diff"]) << '\n';
    }
    if (report.contains("chi2_per_dof"))
      os << "  chi2/dof   " << g17(report["chi2_per_dof"]) << '\n';
    if (report.contains("reason")) os << "  stop       " << report["reason"].get<std::string>() << '\n';
    os << "  converged  " << (converged ? "yes" : "no") << '\n';
  }
  return converged ? kExitOk : kExitNotConverged;
}

struct InvokeArgs {
  std::string integrand;
  int d = 8;
  double points = 1e6;
  int repetitions = kDefaultInvokeRepetitions;
};

int cmd_bench_invoke(const Global& g, const InvokeArgs& a) {
  if (!(a.points >= 1.0)) throw ArgumentError("bench-invoke: points must be >= 1");
  const auto rep = bench_invoke(a.integrand, a.d, static_cast<std::size_t>(a.points),
                                a.repetitions, exec_from(g), g.seed);
  Output out(g.out);
  auto& os = out.os();
  if (g.format == "json") {
    json j = {{"integrand", rep.integrand}, {"d", rep.d},
              {"points", rep.points},       {"workers", rep.workers},
              {"accumulator", rep.accumulator}, {"samples_ms", rep.stats.samples_ms},
              {"mean_ms", rep.stats.mean_ms},   {"std_ms", rep.stats.std_ms}};
    os << j.dump(2) << '\n';
  } else if (g.format == "csv") {
    os << "integrand,d,points,workers,accumulator,mean_ms,std_ms\n";
    os << rep.integrand << ',' << rep.d << ',' << rep.points << ',' << rep.workers << ','
       << g17(rep.accumulator) << ',' << g17(rep.stats.mean_ms) << ',' << g17(rep.stats.std_ms)
       << '\n';
  } else {
    os << "bench-invoke " << rep.integrand << " d=" << rep.d << " points=" << rep.points
       << " workers=" << rep.workers << '\n';
    os << "  accumulator " << g17(rep.accumulator) << '\n';
    os << "  samples_ms ";
    for (double v : rep.stats.samples_ms) os << ' ' << v;
    os << '\n';
    os << "  mean_ms     " << rep.stats.mean_ms << '\n';
    os << "  std_ms      " << rep.stats.std_ms << '\n';
  }
  return kExitOk;
}

struct CompareArgs {
  std::string a = "workers=1";
  std::string b;
  std::string scenarios;
  std::string integrator = "pagani";
  int repetitions = 0;
};

int cmd_compare(const Global& g, const CompareArgs& args) {
  const ExecConfig base = exec_from(g);
  const ExecConfig ca = parse_config(args.a, base);
  const ExecConfig cb = parse_config(args.b, base);
  std::vector<Scenario> list;
  if (!args.scenarios.empty()) {
    list = load_scenarios(args.scenarios);
  } else {
    list = default_scenarios(parse_integrator(args.integrator), kDefaultKernelRepetitions);
  }
  if (args.repetitions > 0)
    for (auto& s : list) s.repetitions = args.repetitions;

  std::vector<TimingRow> rows;
  try {
    rows = compare(list, ca, cb, g.seed);
  } catch (const ScenarioError& e) {
    std::cerr << "paracube compare: " << e.what() << '\n';
    return kExitNotConverged;
  }

  Output out(g.out);
  auto& os = out.os();
  if (g.format == "csv") {
    write_csv(os, rows);
  } else if (g.format == "json") {
    json j = {{"a", args.a}, {"b", args.b}, {"rows", json::array()}, {"note", kCompareFooter}};
    for (const auto& r : rows) j["rows"].push_back(to_json(r));
    os << j.dump(2) << '\n';
  } else {
    os << "A: " << args.a << "\nB: " << args.b << "\n\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %12s %12s %10s %10s %8s\n", "id", "mean_a_ms",
                  "mean_b_ms", "std_a", "std_b", "ratio");
    os << line;
    for (const auto& r : rows) {
      std::snprintf(line, sizeof line, "%-24s %12.4f %12.4f %10.4f %10.4f %8.4f\n", r.id.c_str(),
                    r.mean_a_ms, r.mean_b_ms, r.std_a, r.std_b, r.ratio());
      os << line;
    }
    os << '\n' << kCompareFooter << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paracube: parallel cubature (PAGANI) and Monte Carlo (m-Cubes) integration"};
  app.require_subcommand(1);

  Global g;
  app.add_option("--workers", g.workers, "worker threads (0 = " + std::string(kWorkersEnv) +
                                             " or hardware concurrency)");
  auto* det = app.add_flag("--deterministic", "fixed-order reductions (default)");
  auto* uno = app.add_flag("--unordered", g.unordered, "shared accumulators, unordered adds");
  det->excludes(uno);
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--format", g.format, "report format")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  app.add_option("--out", g.out, "write the report to FILE instead of stdout");

  IntegrateArgs ia;
  auto* integ = app.add_subcommand("integrate", "integrate one benchmark integrand");
  integ->fallthrough();
  integ->add_option("integrator", ia.integrator, "pagani or mcubes")
      ->required()
      ->check(CLI::IsMember({"pagani", "mcubes"}));
  integ->add_option("integrand", ia.integrand, "f1..f6 or sum")->required();
  integ->add_option("-d,--dim", ia.d, "dimension")->check(CLI::Range(1, kMaxDim));
  integ->add_option("--rel-tol", ia.rel_tol, "relative error target (mcubes: 0 = none)");
  integ->add_option("--max-iterations", ia.max_iterations, "pagani refinement iterations");
  integ->add_option("--initial-regions", ia.initial_regions, "pagani starting region count");
  integ->add_option("--error-mode", ia.error_mode, "pagani region error")
      ->check(CLI::IsMember({"max-null", "pairwise", "asymptotic"}));
  integ->add_option("-n,--samples", ia.n, "mcubes samples per iteration");
  integ->add_option("--iterations", ia.iterations, "mcubes iterations");
  integ->add_option("--skip", ia.skip, "mcubes warm-up iterations left out of the result");
  integ->add_flag("--progress", ia.progress, "per-iteration JSON lines on stderr");
  integ->add_flag("--no-reference", ia.no_reference, "skip the reference value");

  InvokeArgs va;
  auto* inv = app.add_subcommand("bench-invoke", "time serial integrand invocation");
  inv->fallthrough();
  inv->add_option("integrand", va.integrand, "f1..f6 or sum")->required();
  inv->add_option("-d,--dim", va.d, "dimension")->check(CLI::Range(1, kMaxDim));
  inv->add_option("--points", va.points, "invocations per repetition");
  inv->add_option("--repetitions", va.repetitions, "timed repetitions")
      ->check(CLI::PositiveNumber);

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "time kernels under two configurations");
  cmp->fallthrough();
  cmp->add_option("--a", ca.a, "configuration A, e.g. workers=1");
  cmp->add_option("--b", ca.b, "configuration B, e.g. workers=8,unordered")->required();
  cmp->add_option("--scenarios", ca.scenarios, "JSON scenario file");
  cmp->add_option("--integrator", ca.integrator, "built-in 8-d scenario set")
      ->check(CLI::IsMember({"pagani", "mcubes"}));
  cmp->add_option("--repetitions", ca.repetitions, "override repetitions of every scenario")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadArgs;
  }

  try {
    if (*integ) return cmd_integrate(g, ia);
    if (*inv) return cmd_bench_invoke(g, va);
    return cmd_compare(g, ca);
  } catch (const ArgumentError& e) {
    std::cerr << "paracube: " << e.what() << "\n\n" << app.help();
    return kExitBadArgs;
  } catch (const std::exception& e) {
    std::cerr << "paracube: " << e.what() << '\n';
    return kExitNotConverged;
  }
}
