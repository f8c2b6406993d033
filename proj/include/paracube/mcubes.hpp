#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "paracube/core.hpp"
#include "paracube/exec.hpp"
#include "paracube/rng.hpp"
#include "paracube/vegas_grid.hpp"

namespace paracube {

inline constexpr int kDefaultMcubesGroupSize = 128;
inline constexpr std::size_t kDefaultTargetGroups = 256;

/// Sub-cube partition for one m-Cubes iteration.
struct McubesPlan {
  int d = 0;
  int g = 0;            ///< stratification intervals per axis
  std::size_t m = 0;    ///< sub-cubes, g^d
  int p = 0;            ///< samples per sub-cube
  std::size_t s = 0;    ///< sub-cubes per logical thread
  int group_size = kDefaultMcubesGroupSize;
  std::size_t samples = 0;  ///< m * p

  std::size_t threads() const noexcept { return (m + s - 1) / s; }
  std::size_t groups() const noexcept {
    return (threads() + group_size - 1) / static_cast<std::size_t>(group_size);
  }
};

/// g = floor((n/2)^(1/d)), m = g^d, p = max(2, round(n/m)), and
/// s = ceil(m / (group_size * target_groups)). Throws ArgumentError when
/// n < 2^(d+1).
McubesPlan make_plan(double n, int d, int group_size = kDefaultMcubesGroupSize,
                     std::size_t target_groups = kDefaultTargetGroups);

/// What each sample adds to its bins.
enum class ContributionWeight {
  Weighted,  ///< (f(x) * jacobian)^2
  Raw,       ///< f(x)^2
};

struct CubeSums {
  double s1 = 0.0;
  double s2 = 0.0;
};

/// Draws plan.p points in sub-cube `cube`, pushes each through the grid and
/// reports sink(bin_ids, contribution) per sample. Coordinates of the cube
/// are the base-g digits of its index, last axis fastest.
template <class Sink>
CubeSums sample_cube_with(const Integrand& f, std::size_t cube, const McubesPlan& plan,
                          const VegasGrid& grid, RngStream& rng, Sink&& sink,
                          ContributionWeight weight = ContributionWeight::Weighted) {
  const int d = plan.d;
  double origin[kMaxDim];
  double y[kMaxDim];
  double x[kMaxDim];
  int bins[kMaxDim];
  std::size_t rest = cube;
  for (int j = d - 1; j >= 0; --j) {
    origin[j] = static_cast<double>(rest % static_cast<std::size_t>(plan.g));
    rest /= static_cast<std::size_t>(plan.g);
  }
  const double inv_g = 1.0 / plan.g;
  const std::span<const double> xs(x, static_cast<std::size_t>(d));
  CubeSums sums;
  for (int k = 0; k < plan.p; ++k) {
    for (int j = 0; j < d; ++j) {
      double v = (origin[j] + rng.uniform()) * inv_g;
      y[j] = v < 1.0 ? v : std::nextafter(1.0, 0.0);
    }
    const double jac = transform_into({y, static_cast<std::size_t>(d)}, grid,
                                      {x, static_cast<std::size_t>(d)},
                                      {bins, static_cast<std::size_t>(d)});
    const double fx = f(xs);
    if (!std::isfinite(fx)) throw NonFiniteEvaluation(Point(x, x + d), fx);
    const double v = fx * jac;
    sums.s1 += v;
    sums.s2 += v * v;
    sink(std::span<const int>(bins, static_cast<std::size_t>(d)),
         weight == ContributionWeight::Weighted ? v * v : fx * fx);
  }
  return sums;
}

struct BinHit {
  std::vector<int> bins;
  double contribution = 0.0;
};

struct CubeSample {
  double s1 = 0.0;
  double s2 = 0.0;
  std::vector<BinHit> bin_hits;
};

CubeSample sample_cube(const Integrand& f, std::size_t cube, const McubesPlan& plan,
                       const VegasGrid& grid, RngStream& rng,
                       ContributionWeight weight = ContributionWeight::Weighted);

struct VarianceUpdate {
  double estimate = 0.0;
  double variance = 0.0;
  bool clamped = false;  ///< S2 - S1^2/p came out negative and was set to 0
};

/// estimate = S1 / (p m); variance = (S2 - S1^2/p) / (p (p-1) m^2).
VarianceUpdate update_variance(double s1, double s2, int p, std::size_t m);

struct McubesIterationResult {
  double integral = 0.0;
  double variance = 0.0;
  BinContributions contributions;
  std::size_t clamp_events = 0;
};

/// One pass over every sub-cube. Logical thread t owns sub-cubes
/// [t*s, (t+1)*s) and RNG stream t; a work-group of plan.group_size threads
/// reduces its thread totals with a pairwise tree. Group totals are combined
/// by the deterministic tree or, in unordered mode, by atomic adds.
McubesIterationResult mcubes_kernel(const Integrand& f, const McubesPlan& plan,
                                    const VegasGrid& grid, const ExecConfig& exec,
                                    std::uint64_t seed,
                                    ContributionWeight weight = ContributionWeight::Weighted);

inline constexpr double kVarianceFloor = 1e-30;

struct McubesConfig {
  int iterations = 10;
  /// Leading iterations that only adapt the grid and are left out of the
  /// combined estimate.
  int skip = 0;
  std::uint64_t seed = 1;
  bool adapt = true;  ///< refit the grid between iterations
  GridRefineParams refine;
  int n_bins = kDefaultBins;
  int group_size = kDefaultMcubesGroupSize;
  std::size_t target_groups = kDefaultTargetGroups;
  ContributionWeight weight = ContributionWeight::Weighted;
  /// When set, one JSON object per iteration is written here.
  std::ostream* progress = nullptr;

  void validate() const;
};

struct IterationSummary {
  int iteration = 0;
  double integral = 0.0;
  double variance = 0.0;
  std::size_t clamp_events = 0;
};

struct MonteCarloResult {
  double estimate = 0.0;
  double errorest = 0.0;
  double chi2_per_dof = 0.0;
  std::vector<IterationSummary> iterations;
  McubesPlan plan;
  VegasGrid grid;  ///< grid after the last refit
};

struct WeightedMean {
  double estimate = 0.0;
  double errorest = 0.0;
  double chi2_per_dof = 0.0;
};

/// Inverse-variance combination of iteration results; variances are
/// floored at kVarianceFloor.
WeightedMean combine_iterations(std::span<const IterationSummary> its);

/// Seed of iteration `it` derived from the run seed.
std::uint64_t iteration_seed(std::uint64_t seed, int it);

/// Repeats {mcubes_kernel, refine_grid} and combines the iterations after
/// the first cfg.skip.
MonteCarloResult run(const Integrand& f, double n, const McubesConfig& cfg,
                     const ExecConfig& exec);

}  // namespace paracube
