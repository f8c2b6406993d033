#include "paracube/pagani.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

namespace paracube {

void PaganiConfig::validate() const {
  if (!(rel_tol > 0.0)) throw ArgumentError("pagani: rel_tol must be > 0");
  if (group_size < 1) throw ArgumentError("pagani: group_size must be >= 1");
  if (max_iterations < 0) throw ArgumentError("pagani: max_iterations must be >= 0");
  if (region_cap < 1) throw ArgumentError("pagani: region_cap must be >= 1");
  if (!(keep_fraction >= 0.0 && keep_fraction < 1.0))
    throw ArgumentError("pagani: keep_fraction must lie in [0, 1)");
  if (!(rel_floor >= 0.0)) throw ArgumentError("pagani: rel_floor must be >= 0");
}

double find_max_err(const RuleEstimates& est, double rel_floor, ErrorMode mode) {
  for (double v : est.values)
    if (!std::isfinite(v)) throw NonFiniteEvaluation({}, v);
  double err = 0.0;
  if (mode == ErrorMode::MaxNull || mode == ErrorMode::Asymptotic) {
    double low = std::numeric_limits<double>::infinity();
    for (int k = 1; k < kNumRules; ++k) {
      err = std::max(err, std::fabs(est.values[k]));
      if (k > 1) low = std::min(low, std::fabs(est.values[k]));
    }
    const double hi = std::fabs(est.values[1]);
    if (mode == ErrorMode::Asymptotic && kAsymptoticRatio * hi <= low) err = hi;
  } else {
    for (int a = 1; a < kNumRules; ++a)
      for (int b = a + 1; b < kNumRules; ++b)
        err = std::max(err, std::fabs(est.values[a] - est.values[b]));
  }
  return std::max(err, rel_floor * std::fabs(est.values[0]));
}

int compute_split_axis(std::span<const double> evals, const RuleTable& rule,
                       std::span<const double> lengths) {
  if (evals.size() != rule.f_eval) throw ArgumentError("compute_split_axis: wrong eval count");
  constexpr double kNoise = 64 * std::numeric_limits<double>::epsilon();
  const double f0 = evals[0];
  const double c_inner = rule.split_weights[0];
  const double c_outer = rule.split_weights[1];
  int axis = 0;
  double best = 0.0;
  for (int j = 0; j < rule.d; ++j) {
    const double p2 = evals[rule.axial_index(j, 0, false)];
    const double m2 = evals[rule.axial_index(j, 0, true)];
    const double p3 = evals[rule.axial_index(j, 1, false)];
    const double m3 = evals[rule.axial_index(j, 1, true)];
    const double diff = std::fabs(c_inner * (p2 + m2 - 2 * f0) - c_outer * (p3 + m3 - 2 * f0));
    if (!std::isfinite(diff)) throw NonFiniteEvaluation({}, diff);
    const double scale = c_inner * (std::fabs(p2) + std::fabs(m2) + 2 * std::fabs(f0)) +
                         c_outer * (std::fabs(p3) + std::fabs(m3) + 2 * std::fabs(f0));
    if (diff <= kNoise * scale) continue;
    if (diff > best) {
      best = diff;
      axis = j;
    }
  }
  if (best == 0.0 && lengths.size() == static_cast<std::size_t>(rule.d))
    axis = static_cast<int>(std::max_element(lengths.begin(), lengths.end()) - lengths.begin());
  return axis;
}

RegionEstimates pagani_kernel(const Integrand& f, const RegionList& regions,
                              const RuleTable& rule, const ExecConfig& exec,
                              const PaganiConfig& cfg) {
  if (regions.empty()) throw ArgumentError("pagani_kernel: no regions");
  if (regions.dim() != rule.d || f.dim() != rule.d)
    throw ArgumentError("pagani_kernel: dimension mismatch");
  const std::size_t n = regions.size();
  const int d = rule.d;

  RegionEstimates out;
  out.integrals.resize(n);
  out.errors.resize(n);
  out.split_axes.resize(n);

  try {
    parallel_for_each_group(
        n,
        [&](std::size_t i) {
          thread_local RuleWorkspace ws;
          double left[kMaxDim], length[kMaxDim];
          regions.gather(i, {left, static_cast<std::size_t>(d)},
                         {length, static_cast<std::size_t>(d)});
          RuleEstimates est;
          try {
            est = apply_rules(f, {left, static_cast<std::size_t>(d)},
                              {length, static_cast<std::size_t>(d)}, rule, ws, cfg.group_size);
          } catch (const NonFiniteEvaluation& e) {
            throw NonFiniteEvaluation(e.point(), e.value(), i);
          }
          out.integrals[i] = est.values[0];
          out.errors[i] = find_max_err(est, cfg.rel_floor, cfg.error_mode);
          out.split_axes[i] = compute_split_axis(ws.evals, rule, {length, static_cast<std::size_t>(d)});
        },
        exec);
  } catch (const GroupTaskError& e) {
    rethrow_original(e);
  }
  return out;
}

int initial_splits(int d, std::size_t n) {
  check_dim(d);
  int g = 1;
  while (true) {
    const auto p = checked_power(static_cast<std::size_t>(g), d,
                                 std::numeric_limits<std::size_t>::max());
    if (!p || *p >= n) return g;
    ++g;
  }
}

namespace {

struct Leaves {
  int d = 0;
  std::vector<double> lefts;    // region-major, n x d
  std::vector<double> lengths;  // region-major, n x d
  std::vector<double> integrals;
  std::vector<double> errors;
  std::vector<int> axes;

  std::size_t size() const { return integrals.size(); }

  void append(const RegionList& regions, const RegionEstimates& est) {
    for (std::size_t i = 0; i < regions.size(); ++i) {
      for (int j = 0; j < d; ++j) {
        lefts.push_back(regions.left(i, j));
        lengths.push_back(regions.length(i, j));
      }
      integrals.push_back(est.integrals[i]);
      errors.push_back(est.errors[i]);
      axes.push_back(est.split_axes[i]);
    }
  }
};

void emit_progress(std::ostream& os, const IterationRecord& rec) {
  nlohmann::json j = {{"iteration", rec.iteration},
                      {"n_regions", rec.n_regions},
                      {"evaluated", rec.evaluated},
                      {"estimate", rec.estimate},
                      {"errorest", rec.errorest}};
  os << j.dump() << '\n';
}

}  // namespace

IntegralResult refine(const Integrand& f, const PaganiConfig& cfg, const ExecConfig& exec) {
  cfg.validate();
  const int d = f.dim();
  const RuleTable rule = build_rule(d);
  IntegralResult result;

  const int g0 = initial_splits(d, cfg.initial_regions);
  RegionList initial;
  try {
    initial = uniform_split(d, g0, cfg.region_cap);
  } catch (const BudgetExceeded&) {
    result.reason = "initial split exceeds region cap";
    return result;
  }

  Leaves leaves;
  leaves.d = d;
  leaves.append(initial, pagani_kernel(f, initial, rule, exec, cfg));
  result.regions_processed = initial.size();
  std::size_t evaluated = initial.size();

  double prev_err = std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    const double estimate = reduce(leaves.integrals, exec.mode(), exec);
    const double errorest = reduce(leaves.errors, exec.mode(), exec);
    result.estimate = estimate;
    result.errorest = errorest;
    result.iterations = it + 1;

    IterationRecord rec{it, leaves.size(), evaluated, estimate, errorest};
    result.history.push_back(rec);
    if (cfg.progress) emit_progress(*cfg.progress, rec);
    if (errorest > prev_err) result.error_increases.push_back(it);
    prev_err = errorest;

    if (errorest <= cfg.rel_tol * std::fabs(estimate)) {
      result.converged = true;
      result.reason = "tolerance reached";
      return result;
    }
    if (it >= cfg.max_iterations) {
      result.reason = "max iterations reached";
      return result;
    }

    // Leave alone the smallest-error leaves whose combined error fits in
    // keep_fraction of the target; split everything else.
    const std::size_t n = leaves.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return leaves.errors[a] < leaves.errors[b];
    });
    const double budget = cfg.keep_fraction * cfg.rel_tol * std::fabs(estimate);
    std::vector<char> active(n, 1);
    double kept = 0.0;
    for (std::size_t idx : order) {
      if (kept + leaves.errors[idx] > budget) break;
      kept += leaves.errors[idx];
      active[idx] = 0;
    }
    const std::size_t n_active =
        static_cast<std::size_t>(std::count(active.begin(), active.end(), char{1}));
    if (n_active == 0) {
      result.reason = "no region left to split";
      return result;
    }
    if (n + n_active > cfg.region_cap) {
      result.reason = "region cap reached";
      return result;
    }

    RegionList children(d, 2 * n_active);
    std::vector<double> left(d), length(d);
    std::size_t c = 0;
    Leaves next;
    next.d = d;
    for (std::size_t i = 0; i < n; ++i) {
      const double* li = leaves.lefts.data() + i * d;
      const double* wi = leaves.lengths.data() + i * d;
      if (!active[i]) {
        next.lefts.insert(next.lefts.end(), li, li + d);
        next.lengths.insert(next.lengths.end(), wi, wi + d);
        next.integrals.push_back(leaves.integrals[i]);
        next.errors.push_back(leaves.errors[i]);
        next.axes.push_back(leaves.axes[i]);
        continue;
      }
      const int k = leaves.axes[i];
      std::copy(li, li + d, left.begin());
      std::copy(wi, wi + d, length.begin());
      length[k] = wi[k] / 2;
      children.set(c++, left, length);
      left[k] = li[k] + length[k];
      children.set(c++, left, length);
    }
    next.append(children, pagani_kernel(f, children, rule, exec, cfg));
    leaves = std::move(next);
    evaluated = children.size();
    result.regions_processed += children.size();
  }
}

}  // namespace paracube
