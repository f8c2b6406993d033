#include "paracube/integrands.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

#include "paracube/rng.hpp"
#include "paracube/sobol.hpp"

namespace paracube {

void BenchmarkId::validate() const {
  if (family < 1 || family > 6)
    throw ArgumentError("unknown benchmark family f" + std::to_string(family));
  check_dim(d);
}

std::string BenchmarkId::name() const { return "f" + std::to_string(family); }

double eval_benchmark(const BenchmarkId& id, std::span<const double> x) {
  const int d = id.d;
  switch (id.family) {
    case 1: {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += (i + 1) * x[i];
      return std::cos(s);
    }
    case 2: {
      double p = 1.0;
      for (int i = 0; i < d; ++i) {
        const double t = x[i] - 0.5;
        p *= 1.0 / (1.0 / 2500.0 + t * t);
      }
      return p;
    }
    case 3: {
      double s = 1.0;
      for (int i = 0; i < d; ++i) s += (i + 1) * x[i];
      return std::pow(s, -(d + 1));
    }
    case 4: {
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        const double t = x[i] - 0.5;
        s += t * t;
      }
      return std::exp(-625.0 * s);
    }
    case 5: {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += std::fabs(x[i] - 0.5);
      return std::exp(-10.0 * s);
    }
    case 6: {
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        const int axis = i + 1;
        if (!(x[i] < (3.0 + axis) / 10.0)) return 0.0;
        s += (axis + 4) * x[i];
      }
      return std::exp(s);
    }
    default:
      throw ArgumentError("unknown benchmark family f" + std::to_string(id.family));
  }
}

Integrand benchmark_integrand(const BenchmarkId& id) {
  id.validate();
  return Integrand(id.d, [id](std::span<const double> x) { return eval_benchmark(id, x); });
}

Integrand sum_integrand(int d) {
  return Integrand(d, [d](std::span<const double> x) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += x[j];
    return s;
  });
}

std::string_view to_string(ReferenceMethod m) {
  switch (m) {
    case ReferenceMethod::SeparableAnalytic: return "separable-analytic";
    case ReferenceMethod::ClosedForm: return "closed-form";
    case ReferenceMethod::LowDiscrepancyOracle: return "low-discrepancy-oracle";
  }
  return "?";
}

double f3_closed_form(int d) {
  check_dim(d);
  using Real = long double;
  Real sum = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Real a = 1;
    int bits = 0;
    for (int i = 0; i < d; ++i) {
      if ((mask >> i) & 1) {
        a += i + 1;
        ++bits;
      }
    }
    sum += (bits % 2 ? -1 : 1) / a;
  }
  Real denom = 1;
  for (int i = 1; i <= d; ++i) denom *= Real(i) * Real(i);  // d! * prod a_i
  return static_cast<double>(sum / denom);
}

namespace {

constexpr std::size_t kF3OraclePoints = std::size_t{1} << 27;

double separable_value(const BenchmarkId& id) {
  double p = 1.0;
  for (int i = 1; i <= id.d; ++i) {
    double axis = 0.0;
    switch (id.family) {
      case 2: axis = 100.0 * std::atan(25.0); break;
      case 4: axis = std::sqrt(std::numbers::pi) * std::erf(12.5) / 25.0; break;
      case 5: axis = -std::expm1(-5.0) / 5.0; break;
      case 6: {
        const double a = i + 4;
        const double c = std::min(1.0, (3.0 + i) / 10.0);
        axis = std::expm1(a * c) / a;
        break;
      }
      default: throw ArgumentError("not a separable family");
    }
    p *= axis;
  }
  return p;
}

}  // namespace

ReferenceValue reference_value(const BenchmarkId& id, const ExecConfig& exec) {
  id.validate();
  switch (id.family) {
    case 1: {
      std::complex<double> p{1.0, 0.0};
      for (int k = 1; k <= id.d; ++k) {
        const std::complex<double> ik{0.0, static_cast<double>(k)};
        p *= (std::exp(ik) - 1.0) / ik;
      }
      return {p.real(), ReferenceMethod::ClosedForm, 1e-15 * id.d};
    }
    case 3: {
      static std::mutex mu;
      static std::map<int, ReferenceValue> cache;
      std::lock_guard lock(mu);
      if (auto it = cache.find(id.d); it != cache.end()) return it->second;
      const auto o = oracle_integral(benchmark_integrand(id), kF3OraclePoints, 20230601, 16, exec);
      ReferenceValue r{o.value, ReferenceMethod::LowDiscrepancyOracle, o.abs_error_bound};
      cache.emplace(id.d, r);
      return r;
    }
    default: {
      const double v = separable_value(id);
      return {v, ReferenceMethod::SeparableAnalytic, 1e-14 * std::fabs(v)};
    }
  }
}

OracleResult oracle_integral(const Integrand& f, std::size_t n_points, std::uint64_t shift_seed,
                             std::size_t shifts, const ExecConfig& exec) {
  if (n_points < kOracleMinPoints)
    throw ArgumentError("oracle_integral: need at least 2^16 points");
  if (shifts < 2) throw ArgumentError("oracle_integral: need at least 2 shifts");
  const int d = f.dim();
  const std::size_t per = n_points / shifts;
  if (per == 0 || per > std::size_t{0xffffffffu})
    throw ArgumentError("oracle_integral: points per shift out of range");

  ExecConfig sub = exec;
  sub.chunk = 1;
  sub.deterministic = true;
  std::vector<double> means;
  try {
    means = parallel_for_groups(
        shifts,
        [&](std::size_t r) {
          RngStream rng(shift_seed, r);
          std::uint32_t shift[SobolSequence::kMaxDim];
          for (int j = 0; j < d; ++j) shift[j] = static_cast<std::uint32_t>(rng.next_u64() >> 32);
          SobolSequence seq(d, {shift, static_cast<std::size_t>(d)});
          double x[SobolSequence::kMaxDim];
          constexpr std::size_t kBlock = 4096;
          std::vector<double> blocks;
          blocks.reserve(per / kBlock + 1);
          double acc = 0.0;
          for (std::size_t i = 0; i < per; ++i) {
            seq.next({x, static_cast<std::size_t>(d)});
            // Sobol points may land on 0; nudge onto the open cube's interior.
            for (int j = 0; j < d; ++j) x[j] += 0x1.0p-33;
            const double v = f({x, static_cast<std::size_t>(d)});
            if (!std::isfinite(v))
              throw NonFiniteEvaluation(std::vector<double>(x, x + d), v);
            acc += v;
            if ((i + 1) % kBlock == 0) {
              blocks.push_back(acc);
              acc = 0.0;
            }
          }
          blocks.push_back(acc);
          return pairwise_sum(blocks) / static_cast<double>(per);
        },
        sub);
  } catch (const GroupTaskError& e) {
    rethrow_original(e);
  }

  const double r = static_cast<double>(shifts);
  const double mean = pairwise_sum(means) / r;
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  const double stderr_mean = std::sqrt(ss / (r - 1.0) / r);
  return {mean, 4.0 * stderr_mean, per * shifts, shifts};
}

std::vector<std::string> integrand_ids() { return {"f1", "f2", "f3", "f4", "f5", "f6", "sum"}; }

std::optional<Integrand> make_integrand(std::string_view id, int d) {
  check_dim(d);
  if (id == "sum") return sum_integrand(d);
  if (id.size() == 2 && id[0] == 'f' && id[1] >= '1' && id[1] <= '6')
    return benchmark_integrand({id[1] - '0', d});
  return std::nullopt;
}

std::optional<ReferenceValue> reference_for(std::string_view id, int d, const ExecConfig& exec) {
  check_dim(d);
  if (id == "sum") return ReferenceValue{d / 2.0, ReferenceMethod::ClosedForm, 0.0};
  if (id.size() == 2 && id[0] == 'f' && id[1] >= '1' && id[1] <= '6')
    return reference_value({id[1] - '0', d}, exec);
  return std::nullopt;
}

}  // namespace paracube
