#include "paracube/mcubes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace paracube {

McubesPlan make_plan(double n, int d, int group_size, std::size_t target_groups) {
  check_dim(d);
  if (group_size < 1) throw ArgumentError("make_plan: group_size must be >= 1");
  if (target_groups < 1) throw ArgumentError("make_plan: target_groups must be >= 1");
  const double min_n = std::ldexp(1.0, d + 1);
  if (!(n >= min_n))
    throw ArgumentError("make_plan: need at least 2^(d+1) samples per iteration");

  const double half = n / 2.0;
  auto pow_le_half = [&](std::size_t g) {
    return std::pow(static_cast<double>(g), d) <= half;
  };
  auto g = static_cast<std::size_t>(std::floor(std::pow(half, 1.0 / d)));
  g = std::max<std::size_t>(g, 1);
  // pow() may land one off at exact roots.
  while (pow_le_half(g + 1)) ++g;
  while (g > 1 && !pow_le_half(g)) --g;

  McubesPlan plan;
  plan.d = d;
  plan.g = static_cast<int>(g);
  plan.m = 1;
  for (int j = 0; j < d; ++j) plan.m *= g;
  plan.p = std::max(2, static_cast<int>(std::llround(n / static_cast<double>(plan.m))));
  plan.group_size = group_size;
  const std::size_t per_wave = static_cast<std::size_t>(group_size) * target_groups;
  plan.s = std::max<std::size_t>(1, (plan.m + per_wave - 1) / per_wave);
  plan.samples = plan.m * static_cast<std::size_t>(plan.p);
  return plan;
}

CubeSample sample_cube(const Integrand& f, std::size_t cube, const McubesPlan& plan,
                       const VegasGrid& grid, RngStream& rng, ContributionWeight weight) {
  if (cube >= plan.m) throw IndexOutOfRange("sub-cube " + std::to_string(cube));
  if (grid.dim() != plan.d || f.dim() != plan.d)
    throw ArgumentError("sample_cube: dimension mismatch");
  CubeSample out;
  const auto sums = sample_cube_with(
      f, cube, plan, grid, rng,
      [&](std::span<const int> bins, double c) {
        out.bin_hits.push_back({std::vector<int>(bins.begin(), bins.end()), c});
      },
      weight);
  out.s1 = sums.s1;
  out.s2 = sums.s2;
  return out;
}

VarianceUpdate update_variance(double s1, double s2, int p, std::size_t m) {
  if (p < 2) throw ArgumentError("update_variance: need at least 2 samples per sub-cube");
  const double pd = p;
  const double md = static_cast<double>(m);
  VarianceUpdate u;
  u.estimate = s1 / (pd * md);
  double spread = s2 - s1 * s1 / pd;
  if (spread < 0.0) {
    spread = 0.0;
    u.clamped = true;
  }
  u.variance = spread / (pd * (pd - 1.0) * md * md);
  return u;
}

McubesIterationResult mcubes_kernel(const Integrand& f, const McubesPlan& plan,
                                    const VegasGrid& grid, const ExecConfig& exec,
                                    std::uint64_t seed, ContributionWeight weight) {
  if (grid.dim() != plan.d || f.dim() != plan.d)
    throw ArgumentError("mcubes_kernel: dimension mismatch");
  if (plan.p < 2 || plan.s < 1 || plan.m < 1) throw ArgumentError("mcubes_kernel: invalid plan");

  const int n_bins = grid.bins();
  const std::size_t n_threads = plan.threads();
  const std::size_t n_groups = plan.groups();
  const std::size_t group = static_cast<std::size_t>(plan.group_size);
  const ReductionMode mode = exec.mode();
  Accumulator bins(static_cast<std::size_t>(plan.d) * n_bins, n_groups, mode);

  struct GroupTotals {
    double integral = 0.0;
    double variance = 0.0;
    std::size_t clamps = 0;
  };
  double shared_result[2] = {0.0, 0.0};

  std::vector<GroupTotals> totals;
  try {
    totals = parallel_for_groups(
        n_groups,
        [&](std::size_t gid) {
          const std::size_t t_lo = gid * group;
          const std::size_t t_hi = std::min(n_threads, t_lo + group);
          std::vector<double> thread_i(t_hi - t_lo), thread_e(t_hi - t_lo);
          GroupTotals out;
          auto sink = [&](std::span<const int> b, double c) {
            accumulate(bins, gid, n_bins, b, c);
          };
          for (std::size_t t = t_lo; t < t_hi; ++t) {
            RngStream rng(seed, t);
            double i_acc = 0.0, e_acc = 0.0;
            const std::size_t c_hi = std::min(plan.m, (t + 1) * plan.s);
            for (std::size_t c = t * plan.s; c < c_hi; ++c) {
              const CubeSums sums = sample_cube_with(f, c, plan, grid, rng, sink, weight);
              const VarianceUpdate u = update_variance(sums.s1, sums.s2, plan.p, plan.m);
              i_acc += u.estimate;
              e_acc += u.variance;
              out.clamps += u.clamped;
            }
            thread_i[t - t_lo] = i_acc;
            thread_e[t - t_lo] = e_acc;
          }
          out.integral = pairwise_sum(thread_i);
          out.variance = pairwise_sum(thread_e);
          if (mode == ReductionMode::Unordered) {
            std::atomic_ref<double>(shared_result[0]).fetch_add(out.integral);
            std::atomic_ref<double>(shared_result[1]).fetch_add(out.variance);
          }
          return out;
        },
        exec);
  } catch (const GroupTaskError& e) {
    rethrow_original(e);
  }

  McubesIterationResult r;
  if (mode == ReductionMode::DeterministicTree) {
    std::vector<double> gi(n_groups), ge(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g) {
      gi[g] = totals[g].integral;
      ge[g] = totals[g].variance;
    }
    r.integral = pairwise_sum(gi);
    r.variance = pairwise_sum(ge);
  } else {
    r.integral = shared_result[0];
    r.variance = shared_result[1];
  }
  for (const auto& t : totals) r.clamp_events += t.clamps;
  r.contributions = BinContributions(plan.d, n_bins, bins.snapshot());
  return r;
}

void McubesConfig::validate() const {
  if (iterations < 1) throw ArgumentError("mcubes: iterations must be >= 1");
  if (n_bins < 2) throw ArgumentError("mcubes: n_bins must be >= 2");
  if (skip < 0 || skip >= iterations)
    throw ArgumentError("mcubes: skip must lie in [0, iterations)");
  refine.validate();
}

WeightedMean combine_iterations(std::span<const IterationSummary> its) {
  WeightedMean out;
  if (its.empty()) return out;
  double wsum = 0.0, wi = 0.0;
  for (const auto& it : its) {
    const double w = 1.0 / std::max(it.variance, kVarianceFloor);
    wsum += w;
    wi += w * it.integral;
  }
  out.estimate = wi / wsum;
  out.errorest = 1.0 / std::sqrt(wsum);
  if (its.size() > 1) {
    double chi2 = 0.0;
    for (const auto& it : its) {
      const double dev = it.integral - out.estimate;
      chi2 += dev * dev / std::max(it.variance, kVarianceFloor);
    }
    out.chi2_per_dof = chi2 / static_cast<double>(its.size() - 1);
  }
  return out;
}

std::uint64_t iteration_seed(std::uint64_t seed, int it) {
  return RngStream::mix(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(it + 1));
}

MonteCarloResult run(const Integrand& f, double n, const McubesConfig& cfg,
                     const ExecConfig& exec) {
  cfg.validate();
  const int d = f.dim();
  MonteCarloResult res;
  res.plan = make_plan(n, d, cfg.group_size, cfg.target_groups);
  VegasGrid grid = init_grid(d, cfg.n_bins);

  for (int it = 0; it < cfg.iterations; ++it) {
    auto r = mcubes_kernel(f, res.plan, grid, exec, iteration_seed(cfg.seed, it), cfg.weight);
    res.iterations.push_back({it, r.integral, r.variance, r.clamp_events});
    if (cfg.adapt) grid = refine_grid(grid, r.contributions, cfg.refine);

    const auto kept = std::span<const IterationSummary>(res.iterations)
                          .subspan(std::min<std::size_t>(cfg.skip, res.iterations.size()));
    const WeightedMean wm = combine_iterations(kept);
    if (cfg.progress) {
      nlohmann::json j = {{"iteration", it},
                          {"integral", r.integral},
                          {"stddev", std::sqrt(r.variance)},
                          {"estimate", wm.estimate},
                          {"errorest", wm.errorest},
                          {"chi2", wm.chi2_per_dof}};
      *cfg.progress << j.dump() << '\n';
    }
  }
  const WeightedMean wm =
      combine_iterations(std::span<const IterationSummary>(res.iterations).subspan(cfg.skip));
  res.estimate = wm.estimate;
  res.errorest = wm.errorest;
  res.chi2_per_dof = wm.chi2_per_dof;
  res.grid = std::move(grid);
  return res;
}

}  // namespace paracube
