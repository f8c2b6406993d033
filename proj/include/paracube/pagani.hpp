#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "paracube/core.hpp"
#include "paracube/exec.hpp"
#include "paracube/quadrature.hpp"

namespace paracube {

/// How a region's error is read off its five rule values.
enum class ErrorMode {
  MaxNull,   ///< max |values[k]|, k = 1..4 (each null rule is rule 0 minus an embedded rule)
  Pairwise,  ///< max |values[a] - values[b]| over pairs of the four null rules
  /// |values[1]| (the degree-5 null) alone when it is at least
  /// kAsymptoticRatio times smaller than each degree-3 null, else MaxNull.
  Asymptotic,
};

inline constexpr double kAsymptoticRatio = 5.0;

struct PaganiConfig {
  double rel_tol = 1e-3;
  int max_iterations = 60;
  int group_size = kDefaultPaganiGroupSize;
  std::size_t region_cap = kDefaultRegionCap;
  /// Iteration 0 uses uniform_split(d, g) with the smallest g such that
  /// g^d >= initial_regions.
  std::size_t initial_regions = 1024;
  /// Each iteration splits the largest-error regions until the leaves left
  /// alone hold at most this fraction of the error target rel_tol * |I|.
  double keep_fraction = 0.75;
  double rel_floor = 1e-15;
  ErrorMode error_mode = ErrorMode::MaxNull;
  /// When set, one JSON object per iteration is written here.
  std::ostream* progress = nullptr;

  void validate() const;
};

struct RegionRecord {
  Region region;
  double volume = 0.0;
  double integral = 0.0;
  double error = 0.0;
  int split_axis = 0;
};

struct IterationRecord {
  int iteration = 0;
  std::size_t n_regions = 0;  ///< leaves after this iteration
  std::size_t evaluated = 0;  ///< regions evaluated in this iteration
  double estimate = 0.0;
  double errorest = 0.0;
};

struct IntegralResult {
  double estimate = 0.0;
  double errorest = 0.0;
  int iterations = 0;
  std::size_t regions_processed = 0;
  bool converged = false;
  std::string reason;
  std::vector<IterationRecord> history;
  /// Iterations after which the total error grew; logged, not enforced.
  std::vector<int> error_increases;
};

/// Largest null-rule magnitude (or largest pairwise difference), clamped
/// from below at rel_floor * |values[0]|.
double find_max_err(const RuleEstimates& est, double rel_floor,
                    ErrorMode mode = ErrorMode::MaxNull);

/// Axis whose axial evaluations show the largest fourth difference
/// |D2(lambda2) - (lambda2/lambda3)^2 D2(lambda3)|, where D2(r) is the second
/// difference f(c + r e_j) + f(c - r e_j) - 2 f(c). Differences at rounding
/// level count as zero; ties go to the lowest axis. If every axis reads zero
/// and `lengths` is given, the longest side is returned instead.
int compute_split_axis(std::span<const double> evals, const RuleTable& rule,
                       std::span<const double> lengths = {});

/// Evaluates every region; one region per work-group. Results are
/// bit-identical for any worker count.
RegionEstimates pagani_kernel(const Integrand& f, const RegionList& regions,
                              const RuleTable& rule, const ExecConfig& exec,
                              const PaganiConfig& cfg = {});

/// Adaptive driver: evaluate, split the regions carrying most of the error
/// in two along their split axis, repeat until the total error meets
/// rel_tol * |estimate| or a budget runs out.
IntegralResult refine(const Integrand& f, const PaganiConfig& cfg, const ExecConfig& exec);

/// Smallest g with g^d >= n.
int initial_splits(int d, std::size_t n);

}  // namespace paracube
