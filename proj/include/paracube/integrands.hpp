#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paracube/core.hpp"
#include "paracube/exec.hpp"

namespace paracube {

/// One of the six benchmark families f1..f6 at dimension d.
struct BenchmarkId {
  int family = 1;
  int d = 1;

  void validate() const;
  std::string name() const;  ///< "f<family>"
};

/// Exact evaluation of the benchmark family at x (x.size() == d):
///   f1 = cos(sum i x_i)
///   f2 = prod (1/50^2 + (x_i - 1/2)^2)^-1
///   f3 = (1 + sum i x_i)^(-d-1)
///   f4 = exp(-625 sum (x_i - 1/2)^2)
///   f5 = exp(-10 sum |x_i - 1/2|)
///   f6 = exp(sum (i+4) x_i) if every x_i < (3+i)/10, else 0
/// with axes numbered i = 1..d.
double eval_benchmark(const BenchmarkId& id, std::span<const double> x);

Integrand benchmark_integrand(const BenchmarkId& id);

/// f(x) = sum_j x_j, whose unit-cube integral is d/2.
Integrand sum_integrand(int d);

enum class ReferenceMethod { SeparableAnalytic, ClosedForm, LowDiscrepancyOracle };

std::string_view to_string(ReferenceMethod m);

struct ReferenceValue {
  double value = 0.0;
  ReferenceMethod method = ReferenceMethod::SeparableAnalytic;
  double claimed_abs_error = 0.0;
};

/// Unit-cube integral of a benchmark family. f2, f4, f5, f6 are products of
/// 1-D closed forms; f1 is Re prod (e^{ik} - 1)/(ik); f3 comes from the
/// low-discrepancy oracle with 2^27 points (computed once per d and cached).
ReferenceValue reference_value(const BenchmarkId& id, const ExecConfig& exec = {});

/// f3 by the inclusion-exclusion closed form
///   1/(d! prod a_i) * sum_{S} (-1)^{|S|} / (1 + sum_{i in S} a_i), a_i = i,
/// evaluated in long double. Heavy cancellation limits it to small d.
double f3_closed_form(int d);

struct OracleResult {
  double value = 0.0;
  double abs_error_bound = 0.0;
  std::size_t points = 0;
  std::size_t shifts = 0;
};

inline constexpr std::size_t kOracleMinPoints = std::size_t{1} << 16;

/// Randomly digit-shifted Sobol estimate. n_points are split evenly across
/// `shifts` independent replicas; the bound is 4 standard errors of the
/// replica mean. Deterministic for fixed shift_seed.
OracleResult oracle_integral(const Integrand& f, std::size_t n_points,
                             std::uint64_t shift_seed = 20230601, std::size_t shifts = 16,
                             const ExecConfig& exec = {});

/// Registry lookup by id: "f1".."f6" or "sum". Returns nullopt on unknown ids.
std::optional<Integrand> make_integrand(std::string_view id, int d);

/// Reference for a registry id ("sum" gives d/2 exactly).
std::optional<ReferenceValue> reference_for(std::string_view id, int d,
                                            const ExecConfig& exec = {});

/// All registry ids, in order.
std::vector<std::string> integrand_ids();

}  // namespace paracube
