#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "paracube/core.hpp"
#include "paracube/exec.hpp"

namespace paracube {

/// Mean and sample standard deviation (n - 1) of timings in milliseconds.
struct TimingStats {
  std::vector<double> samples_ms;
  double mean_ms = 0.0;
  double std_ms = 0.0;
};

TimingStats summarize(std::vector<double> samples_ms);

/// One line of a configuration-A vs configuration-B table.
struct TimingRow {
  std::string id;
  double mean_a_ms = 0.0;
  double mean_b_ms = 0.0;
  double std_a = 0.0;
  double std_b = 0.0;

  double ratio() const { return mean_b_ms / mean_a_ms; }
  bool operator==(const TimingRow&) const = default;
};

inline constexpr std::string_view kCompareHeader = "id,mean_a_ms,mean_b_ms,std_a,std_b,ratio";

/// Header line plus one line per row; numbers printed with %.17g so that
/// parse_csv gives back identical rows.
void write_csv(std::ostream& os, const std::vector<TimingRow>& rows);
std::vector<TimingRow> parse_csv(std::istream& is);

nlohmann::json to_json(const TimingRow& row);

enum class Integrator { Pagani, Mcubes };

std::string_view to_string(Integrator i);
Integrator parse_integrator(std::string_view s);

inline constexpr int kDefaultKernelRepetitions = 100;
inline constexpr int kDefaultInvokeRepetitions = 10;

/// One timed kernel launch. workload is the per-axis split count g for
/// pagani (g^d regions) and the samples per iteration n for mcubes.
struct Scenario {
  std::string id;
  Integrator integrator = Integrator::Pagani;
  std::string integrand;
  int d = 0;
  double workload = 0.0;
  int repetitions = kDefaultKernelRepetitions;

  void validate() const;
};

/// Scenario list from JSON: either an array or {"scenarios": [...]}, each
/// entry {"id", "integrator", "integrand", "d", "workload", "repetitions"?}.
std::vector<Scenario> parse_scenarios(const nlohmann::json& j);
std::vector<Scenario> load_scenarios(const std::string& path);

/// Six 8-d benchmark kernels for one integrator at a desk-scale workload.
std::vector<Scenario> default_scenarios(Integrator integrator, int repetitions);

struct ScenarioTiming {
  TimingStats stats;
  double estimate = 0.0;  ///< kernel result of the last repetition
};

/// Times `repetitions` launches of the scenario's kernel under `exec`.
ScenarioTiming time_scenario(const Scenario& s, const ExecConfig& exec, std::uint64_t seed);

/// Raised by compare(); names the scenario that failed.
class ScenarioError : public Error {
 public:
  ScenarioError(std::string id, const std::string& what)
      : Error("scenario " + id + ": " + what), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// Times every scenario under both configurations; rows sorted by id.
std::vector<TimingRow> compare(std::vector<Scenario> scenarios, const ExecConfig& a,
                               const ExecConfig& b, std::uint64_t seed);

struct InvokeReport {
  std::string integrand;
  int d = 0;
  std::size_t points = 0;
  std::size_t workers = 0;
  double accumulator = 0.0;  ///< serial sum of f over the point set
  TimingStats stats;
};

/// Draws `points` uniform points up front, then per repetition has every
/// worker run f over all of them serially, keeping the running sum.
InvokeReport bench_invoke(std::string_view integrand, int d, std::size_t points,
                          int repetitions, const ExecConfig& exec, std::uint64_t seed);

}  // namespace paracube
