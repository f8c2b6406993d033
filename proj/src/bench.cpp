#include "paracube/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "paracube/integrands.hpp"
#include "paracube/mcubes.hpp"
#include "paracube/pagani.hpp"
#include "paracube/quadrature.hpp"
#include "paracube/rng.hpp"

namespace paracube {

TimingStats summarize(std::vector<double> samples_ms) {
  TimingStats s;
  s.samples_ms = std::move(samples_ms);
  const auto n = static_cast<double>(s.samples_ms.size());
  if (s.samples_ms.empty()) return s;
  double sum = 0.0;
  for (double v : s.samples_ms) sum += v;
  s.mean_ms = sum / n;
  if (s.samples_ms.size() > 1) {
    double ss = 0.0;
    for (double v : s.samples_ms) ss += (v - s.mean_ms) * (v - s.mean_ms);
    s.std_ms = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& cell, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size() || cell.empty())
    throw ArgumentError("csv line " + std::to_string(line) + ": bad number '" + cell + "'");
  return v;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<TimingRow>& rows) {
  os << kCompareHeader << '\n';
  for (const auto& r : rows) {
    if (r.id.find_first_of(",\n\"") != std::string::npos)
      throw ArgumentError("csv: scenario id may not contain ',', '\"' or newlines");
    os << r.id << ',' << fmt(r.mean_a_ms) << ',' << fmt(r.mean_b_ms) << ',' << fmt(r.std_a)
       << ',' << fmt(r.std_b) << ',' << fmt(r.ratio()) << '\n';
  }
}

std::vector<TimingRow> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCompareHeader)
    throw ArgumentError("csv: header must be '" + std::string(kCompareHeader) + "'");
  std::vector<TimingRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6)
      throw ArgumentError("csv line " + std::to_string(lineno) + ": expected 6 columns");
    TimingRow r{cells[0], parse_number(cells[1], lineno), parse_number(cells[2], lineno),
                parse_number(cells[3], lineno), parse_number(cells[4], lineno)};
    const double ratio = parse_number(cells[5], lineno);
    if (fmt(ratio) != fmt(r.ratio()))
      throw ArgumentError("csv line " + std::to_string(lineno) + ": ratio does not match means");
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json to_json(const TimingRow& row) {
  return {{"id", row.id},         {"mean_a_ms", row.mean_a_ms}, {"mean_b_ms", row.mean_b_ms},
          {"std_a", row.std_a},   {"std_b", row.std_b},         {"ratio", row.ratio()}};
}

std::string_view to_string(Integrator i) {
  return i == Integrator::Pagani ? "pagani" : "mcubes";
}

Integrator parse_integrator(std::string_view s) {
  if (s == "pagani") return Integrator::Pagani;
  if (s == "mcubes") return Integrator::Mcubes;
  throw ArgumentError("unknown integrator '" + std::string(s) + "'");
}

void Scenario::validate() const {
  if (id.empty()) throw ArgumentError("scenario: empty id");
  if (repetitions < 1) throw ArgumentError("scenario " + id + ": repetitions must be >= 1");
  check_dim(d);
  if (!make_integrand(integrand, d))
    throw ArgumentError("scenario " + id + ": unknown integrand '" + integrand + "'");
  if (integrator == Integrator::Pagani) {
    if (!(workload >= 1.0) || workload != std::floor(workload))
      throw ArgumentError("scenario " + id + ": pagani workload is a split count >= 1");
  } else if (!(workload >= std::ldexp(1.0, d + 1))) {
    throw ArgumentError("scenario " + id + ": mcubes workload must be >= 2^(d+1)");
  }
}

std::vector<Scenario> parse_scenarios(const nlohmann::json& j) {
  const nlohmann::json& list = j.is_object() && j.contains("scenarios") ? j.at("scenarios") : j;
  if (!list.is_array()) throw ArgumentError("scenarios: expected a JSON array");
  std::vector<Scenario> out;
  try {
    for (const auto& e : list) {
      Scenario s;
      s.id = e.at("id").get<std::string>();
      s.integrator = parse_integrator(e.at("integrator").get<std::string>());
      s.integrand = e.at("integrand").get<std::string>();
      s.d = e.at("d").get<int>();
      s.workload = e.at("workload").get<double>();
      s.repetitions = e.value("repetitions", kDefaultKernelRepetitions);
      s.validate();
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("scenarios: ") + e.what());
  }
  return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open scenario file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("scenario file " + path + ": " + e.what());
  }
  return parse_scenarios(j);
}

std::vector<Scenario> default_scenarios(Integrator integrator, int repetitions) {
  std::vector<Scenario> out;
  for (int f = 1; f <= 6; ++f) {
    Scenario s;
    s.integrator = integrator;
    s.integrand = "f" + std::to_string(f);
    s.d = 8;
    s.workload = integrator == Integrator::Pagani ? 3.0 : 1e5;
    s.repetitions = repetitions;
    s.id = std::string(to_string(integrator)) + "-" + s.integrand + "-8d";
    out.push_back(std::move(s));
  }
  return out;
}

ScenarioTiming time_scenario(const Scenario& s, const ExecConfig& exec, std::uint64_t seed) {
  s.validate();
  const Integrand f = *make_integrand(s.integrand, s.d);
  std::vector<double> ms;
  ms.reserve(static_cast<std::size_t>(s.repetitions));
  ScenarioTiming out;
  using clock = std::chrono::steady_clock;

  if (s.integrator == Integrator::Pagani) {
    const RuleTable rule = build_rule(s.d);
    const RegionList regions = uniform_split(s.d, static_cast<int>(s.workload));
    const PaganiConfig cfg;
    for (int r = 0; r < s.repetitions; ++r) {
      const auto t0 = clock::now();
      const RegionEstimates est = pagani_kernel(f, regions, rule, exec, cfg);
      ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
      out.estimate = pairwise_sum(est.integrals);
    }
  } else {
    const McubesPlan plan = make_plan(s.workload, s.d);
    const VegasGrid grid = init_grid(s.d);
    for (int r = 0; r < s.repetitions; ++r) {
      const auto t0 = clock::now();
      const auto it = mcubes_kernel(f, plan, grid, exec, seed);
      ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
      out.estimate = it.integral;
    }
  }
  out.stats = summarize(std::move(ms));
  return out;
}

std::vector<TimingRow> compare(std::vector<Scenario> scenarios, const ExecConfig& a,
                               const ExecConfig& b, std::uint64_t seed) {
  std::stable_sort(scenarios.begin(), scenarios.end(),
                   [](const Scenario& x, const Scenario& y) { return x.id < y.id; });
  std::vector<TimingRow> rows;
  for (const auto& s : scenarios) {
    try {
      const auto ta = time_scenario(s, a, seed);
      const auto tb = time_scenario(s, b, seed);
      rows.push_back({s.id, ta.stats.mean_ms, tb.stats.mean_ms, ta.stats.std_ms, tb.stats.std_ms});
    } catch (const std::exception& e) {
      throw ScenarioError(s.id, e.what());
    }
  }
  return rows;
}

InvokeReport bench_invoke(std::string_view integrand, int d, std::size_t points,
                          int repetitions, const ExecConfig& exec, std::uint64_t seed) {
  if (points == 0) throw ArgumentError("bench-invoke: points must be >= 1");
  if (repetitions < 1) throw ArgumentError("bench-invoke: repetitions must be >= 1");
  const auto f = make_integrand(integrand, d);
  if (!f) throw ArgumentError("unknown integrand '" + std::string(integrand) + "'");

  std::vector<double> xs(points * static_cast<std::size_t>(d));
  RngStream rng(seed, 0);
  for (double& v : xs) v = rng.uniform();

  InvokeReport rep;
  rep.integrand = std::string(integrand);
  rep.d = d;
  rep.points = points;
  rep.workers = exec.resolved_workers();

  auto serial_sum = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < points; ++i)
      acc += (*f)(std::span<const double>(xs.data() + i * d, static_cast<std::size_t>(d)));
    return acc;
  };

  ExecConfig one_each = exec;
  one_each.chunk = 1;
  std::vector<double> ms;
  using clock = std::chrono::steady_clock;
  for (int r = 0; r < repetitions; ++r) {
    const auto t0 = clock::now();
    std::vector<double> sums;
    try {
      sums = parallel_for_groups(rep.workers, [&](std::size_t) { return serial_sum(); }, one_each);
    } catch (const GroupTaskError& e) {
      rethrow_original(e);
    }
    ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
    rep.accumulator = sums.front();
  }
  rep.stats = summarize(std::move(ms));
  return rep;
}

}  // namespace paracube
