#include "paracube/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "paracube/exec.hpp"

namespace paracube {

namespace {

using Real = long double;

// Genz-Malik generator radii.
const Real kLambda2 = std::sqrt(Real{9} / Real{70});
const Real kLambda3 = std::sqrt(Real{9} / Real{10});
const Real kLambda4 = std::sqrt(Real{9} / Real{10});
const Real kLambda5 = std::sqrt(Real{9} / Real{19});

// Even monomials up to degree 6 that fully symmetric rules must match, as
// exponent lists on the leading axes.
const std::vector<std::vector<int>> kMoments = {
    {}, {2}, {4}, {2, 2}, {6}, {4, 2}, {2, 2, 2},
};

int moment_degree(const std::vector<int>& m) {
  int s = 0;
  for (int p : m) s += p;
  return s;
}

Real monomial(const std::vector<Real>& x, const std::vector<int>& m) {
  Real v = 1;
  for (std::size_t j = 0; j < m.size(); ++j) v *= std::pow(x[j], m[j]);
  return v;
}

// Mean of the monomial over [-1, 1]^d.
Real cube_moment(const std::vector<int>& m) {
  Real v = 1;
  for (int p : m) v /= (p + 1);
  return v;
}

std::vector<std::vector<std::vector<Real>>> make_orbits(int d) {
  std::vector<std::vector<std::vector<Real>>> orbits(5);
  orbits[0].push_back(std::vector<Real>(d, 0));
  for (int ring = 0; ring < 2; ++ring) {
    const Real lam = ring == 0 ? kLambda2 : kLambda3;
    for (int j = 0; j < d; ++j) {
      for (Real s : {Real{1}, Real{-1}}) {
        std::vector<Real> p(d, 0);
        p[j] = s * lam;
        orbits[1 + ring].push_back(std::move(p));
      }
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      for (Real sj : {Real{1}, Real{-1}}) {
        for (Real sk : {Real{1}, Real{-1}}) {
          std::vector<Real> p(d, 0);
          p[j] = sj * kLambda4;
          p[k] = sk * kLambda4;
          orbits[3].push_back(std::move(p));
        }
      }
    }
  }
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    std::vector<Real> p(d);
    for (int j = 0; j < d; ++j) p[j] = ((mask >> j) & 1) ? -kLambda5 : kLambda5;
    orbits[4].push_back(std::move(p));
  }
  return orbits;
}

// Least-squares solve of A w = b (rows >= cols) by Householder QR.
std::vector<Real> solve_least_squares(std::vector<std::vector<Real>> a, std::vector<Real> b) {
  const std::size_t rows = a.size();
  const std::size_t cols = a.front().size();
  for (std::size_t k = 0; k < cols; ++k) {
    Real norm = 0;
    for (std::size_t i = k; i < rows; ++i) norm += a[i][k] * a[i][k];
    norm = std::sqrt(norm);
    if (norm == 0) throw Error("rule construction: singular moment system");
    const Real alpha = a[k][k] > 0 ? -norm : norm;
    std::vector<Real> v(rows, 0);
    for (std::size_t i = k; i < rows; ++i) v[i] = a[i][k];
    v[k] -= alpha;
    Real vv = 0;
    for (std::size_t i = k; i < rows; ++i) vv += v[i] * v[i];
    for (std::size_t c = k; c < cols; ++c) {
      Real dot = 0;
      for (std::size_t i = k; i < rows; ++i) dot += v[i] * a[i][c];
      for (std::size_t i = k; i < rows; ++i) a[i][c] -= 2 * dot / vv * v[i];
    }
    Real dot = 0;
    for (std::size_t i = k; i < rows; ++i) dot += v[i] * b[i];
    for (std::size_t i = k; i < rows; ++i) b[i] -= 2 * dot / vv * v[i];
  }
  std::vector<Real> w(cols);
  for (std::size_t k = cols; k-- > 0;) {
    Real s = b[k];
    for (std::size_t c = k + 1; c < cols; ++c) s -= a[k][c] * w[c];
    w[k] = s / a[k][k];
  }
  return w;
}

// Per-point weights (one per orbit) of the rule on `orbit_ids` that matches
// every moment of degree <= max_degree.
std::vector<Real> fit_rule(const std::vector<std::vector<std::vector<Real>>>& orbits,
                           std::vector<int> orbit_ids, int max_degree, int d) {
  std::erase_if(orbit_ids, [&](int o) { return orbits[o].empty(); });
  std::vector<std::vector<Real>> a;
  std::vector<Real> b;
  std::vector<std::vector<int>> used;
  for (const auto& m : kMoments) {
    if (static_cast<int>(m.size()) > d || moment_degree(m) > max_degree) continue;
    std::vector<Real> row;
    for (int o : orbit_ids) {
      Real s = 0;
      for (const auto& p : orbits[o]) s += monomial(p, m);
      row.push_back(s);
    }
    a.push_back(std::move(row));
    b.push_back(cube_moment(m));
    used.push_back(m);
  }
  if (a.size() < orbit_ids.size())
    throw Error("rule construction: underdetermined moment system");
  const auto w = solve_least_squares(a, b);
  for (std::size_t r = 0; r < a.size(); ++r) {
    Real s = 0;
    for (std::size_t c = 0; c < w.size(); ++c) s += a[r][c] * w[c];
    if (std::fabs(s - b[r]) > Real{1e-16} * std::max(Real{1}, std::fabs(b[r])))
      throw Error("rule construction: inconsistent moment equations for d=" + std::to_string(d));
  }
  std::vector<Real> per_orbit(5, 0);
  for (std::size_t c = 0; c < orbit_ids.size(); ++c) per_orbit[orbit_ids[c]] = w[c];
  return per_orbit;
}

}  // namespace

std::size_t rule_point_count(int d) {
  check_dim(d);
  const std::size_t n = static_cast<std::size_t>(d);
  return (std::size_t{1} << d) + 2 * n * n + 2 * n + 1;
}

RuleTable build_rule(int d) {
  check_dim(d);
  const auto orbits = make_orbits(d);

  RuleTable rule;
  rule.d = d;
  rule.f_eval = rule_point_count(d);
  rule.lambda = {static_cast<double>(kLambda2), static_cast<double>(kLambda3),
                 static_cast<double>(kLambda4), static_cast<double>(kLambda5)};
  rule.split_weights = {1.0, static_cast<double>((kLambda2 * kLambda2) / (kLambda3 * kLambda3))};

  std::size_t offset = 0;
  for (int o = 0; o < 5; ++o) {
    rule.orbit_offset[o] = offset;
    offset += orbits[o].size();
  }
  rule.orbit_offset[5] = offset;
  if (offset != rule.f_eval) throw Error("rule construction: point count mismatch");

  rule.generators.reserve(rule.f_eval * d);
  for (const auto& orbit : orbits)
    for (const auto& p : orbit)
      for (Real c : p) rule.generators.push_back(static_cast<double>(c));

  const auto basic = fit_rule(orbits, {0, 1, 2, 3, 4}, 6, d);
  const std::array<std::vector<Real>, 4> embedded = {
      fit_rule(orbits, {0, 1, 2, 3}, 4, d),
      fit_rule(orbits, {0, 1}, 2, d),
      fit_rule(orbits, {0, 2}, 2, d),
      fit_rule(orbits, {0, 4}, 2, d),
  };
  rule.degree = {7, 5, 3, 3, 3};

  for (int k = 0; k < kNumRules; ++k) {
    auto& w = rule.weights[k];
    w.reserve(rule.f_eval);
    for (int o = 0; o < 5; ++o) {
      const Real wo = k == 0 ? basic[o] : basic[o] - embedded[k - 1][o];
      w.insert(w.end(), orbits[o].size(), static_cast<double>(wo));
    }
  }
  return rule;
}

Point eval_point(const RuleTable& rule, const Region& region, std::size_t f_id) {
  if (f_id >= rule.f_eval)
    throw IndexOutOfRange("rule point " + std::to_string(f_id) + " >= f_eval " +
                          std::to_string(rule.f_eval));
  if (region.dim() != rule.d) throw ArgumentError("eval_point: dimension mismatch");
  const auto g = rule.generator(f_id);
  Point x(rule.d);
  for (int j = 0; j < rule.d; ++j) x[j] = region.left[j] + region.length[j] * (g[j] + 1.0) / 2.0;
  return x;
}

RuleEstimates apply_rules(const Integrand& f, std::span<const double> left,
                          std::span<const double> length, const RuleTable& rule,
                          RuleWorkspace& ws, int group_size) {
  const int d = rule.d;
  const std::size_t n = rule.f_eval;
  const std::size_t threads = static_cast<std::size_t>(std::max(group_size, 1));
  ws.evals.resize(n);
  ws.point.resize(d);
  // Slots past f_eval never receive a point and are left out of the tree.
  const std::size_t used = std::min(threads, n);
  ws.partial.assign(used * kNumRules, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const double* g = rule.generators.data() + i * d;
    for (int j = 0; j < d; ++j) ws.point[j] = left[j] + length[j] * (g[j] + 1.0) / 2.0;
    const double v = f(ws.point);
    if (!std::isfinite(v)) throw NonFiniteEvaluation(ws.point, v);
    ws.evals[i] = v;
    const std::size_t t = i % threads;
    for (int k = 0; k < kNumRules; ++k) ws.partial[k * used + t] += v * rule.weights[k][i];
  }

  const double volume = region_volume(length);
  RuleEstimates est;
  for (int k = 0; k < kNumRules; ++k)
    est.values[k] = volume * pairwise_sum({ws.partial.data() + k * used, used});
  return est;
}

RuleEvaluation apply_rules(const Integrand& f, const Region& region, const RuleTable& rule,
                           int group_size) {
  region.validate();
  if (region.dim() != rule.d || f.dim() != rule.d)
    throw ArgumentError("apply_rules: dimension mismatch");
  RuleWorkspace ws;
  RuleEvaluation out;
  out.estimates = apply_rules(f, region.left, region.length, rule, ws, group_size);
  out.evals = std::move(ws.evals);
  return out;
}

void write_rule_table(std::ostream& os, const RuleTable& rule) {
  const auto old_prec = os.precision(17);
  os << "# d=" << rule.d << " f_eval=" << rule.f_eval << " degrees=";
  for (int k = 0; k < kNumRules; ++k) os << (k ? "," : "") << rule.degree[k];
  os << " split_weights=" << rule.split_weights[0] << ',' << rule.split_weights[1] << '\n';
  os << "# index";
  for (int j = 0; j < rule.d; ++j) os << " g" << j;
  for (int k = 0; k < kNumRules; ++k) os << " w" << k;
  os << '\n';
  for (std::size_t i = 0; i < rule.f_eval; ++i) {
    os << i;
    for (double g : rule.generator(i)) os << ' ' << g;
    for (int k = 0; k < kNumRules; ++k) os << ' ' << rule.weights[k][i];
    os << '\n';
  }
  os.precision(old_prec);
}

}  // namespace paracube
