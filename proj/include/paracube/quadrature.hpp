#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "paracube/core.hpp"

namespace paracube {

inline constexpr int kNumRules = 5;

/// Fully symmetric degree-7 point set (Genz-Malik) with five rules over it.
///
/// Points are grouped in five orbits, stored in this order:
///   0  the centre
///   1  +/-lambda2 on each axis          (2d points, axis-major, + then -)
///   2  +/-lambda3 on each axis          (2d points)
///   3  +/-lambda4 on every axis pair    (2d(d-1) points)
///   4  +/-lambda5 on all axes           (2^d points)
///
/// weights[0] is the degree-7 integration rule. weights[1..4] are null rules:
/// rule 0 minus an embedded lower-degree rule (degree 5 on orbits 0-3, and
/// degree 3 on orbits {0,1}, {0,2}, {0,4}). Every weight row is normalised to
/// the mean over [-1,1]^d, so rule 0 sums to 1 and null rules sum to 0.
struct RuleTable {
  int d = 0;
  std::size_t f_eval = 0;
  std::vector<double> generators;  ///< f_eval x d, row-major, entries in [-1, 1]
  std::array<std::vector<double>, kNumRules> weights;
  /// Polynomial degree each row integrates exactly (rule 0) or annihilates
  /// (null rules).
  std::array<int, kNumRules> degree{};
  /// Coefficients of the axial second differences at lambda2 and lambda3
  /// whose combination cancels the second derivative; see compute_split_axis.
  std::array<double, 2> split_weights{};
  std::array<double, 4> lambda{};  ///< lambda2, lambda3, lambda4, lambda5
  std::array<std::size_t, 6> orbit_offset{};  ///< first index of each orbit, plus f_eval

  std::span<const double> generator(std::size_t i) const {
    return {generators.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
  }
  /// Index of the axial point on `axis` in ring 0 (lambda2) or 1 (lambda3).
  std::size_t axial_index(int axis, int ring, bool negative) const {
    return orbit_offset[1 + ring] + 2 * static_cast<std::size_t>(axis) + (negative ? 1 : 0);
  }
};

/// 2^d + 2d^2 + 2d + 1.
std::size_t rule_point_count(int d);

/// Builds the rule for dimension d; deterministic, throws UnsupportedDimension
/// outside [1, 12].
RuleTable build_rule(int d);

/// Generator row f_id mapped into the region.
Point eval_point(const RuleTable& rule, const Region& region, std::size_t f_id);

struct RuleEstimates {
  std::array<double, kNumRules> values{};  ///< scaled by region volume
};

struct RuleEvaluation {
  RuleEstimates estimates;
  std::vector<double> evals;  ///< f at every point, in point order
};

inline constexpr int kDefaultPaganiGroupSize = 64;

/// Reusable buffers for apply_rules on one worker.
struct RuleWorkspace {
  std::vector<double> evals;
  std::vector<double> point;
  std::vector<double> partial;  ///< kNumRules x min(group_size, f_eval)
};

/// Evaluates f at every rule point of the region (left/length spans) and
/// forms the five weighted sums. Point f_id is assigned to logical thread
/// f_id % group_size; each thread accumulates its points in ascending order
/// and the per-thread partials are combined with pairwise_sum, so the result
/// only depends on group_size. Evaluations are left in ws.evals.
RuleEstimates apply_rules(const Integrand& f, std::span<const double> left,
                          std::span<const double> length, const RuleTable& rule,
                          RuleWorkspace& ws, int group_size = kDefaultPaganiGroupSize);

RuleEvaluation apply_rules(const Integrand& f, const Region& region, const RuleTable& rule,
                           int group_size = kDefaultPaganiGroupSize);

/// Text dump: a '#' header line, then one row per point with its index,
/// generator coordinates and the five weights.
void write_rule_table(std::ostream& os, const RuleTable& rule);

}  // namespace paracube
