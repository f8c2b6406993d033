#include <doctest.h>

#include <cmath>
#include <numbers>

#include "paracube/integrands.hpp"
#include "paracube/rng.hpp"
#include "paracube/sobol.hpp"

using namespace paracube;

TEST_SUITE("integrands") {

TEST_CASE("eval_benchmark examples") {
  CHECK(eval_benchmark({4, 5}, std::vector<double>(5, 0.5)) == 1.0);
  CHECK(eval_benchmark({1, 4}, std::vector<double>(4, 0.0)) == 1.0);
  CHECK(eval_benchmark({6, 5}, std::vector<double>{0.5, 0.5, 0.7, 0.5, 0.5}) == 0.0);
  CHECK(eval_benchmark({6, 5}, std::vector<double>{0.35, 0.45, 0.55, 0.5, 0.5}) > 0.0);
  CHECK(eval_benchmark({2, 1}, std::vector<double>{0.5}) == doctest::Approx(2500.0));
  CHECK(eval_benchmark({3, 2}, std::vector<double>{0.0, 0.0}) == 1.0);
  CHECK(eval_benchmark({5, 2}, std::vector<double>{0.5, 0.5}) == 1.0);
  CHECK_THROWS_AS(benchmark_integrand({7, 2}), ArgumentError);
  CHECK_THROWS_AS(benchmark_integrand({1, 13}), UnsupportedDimension);
}

TEST_CASE("f6 cuts are literal for every axis") {
  const BenchmarkId id{6, 8};
  std::vector<double> x(8, 0.01);
  CHECK(eval_benchmark(id, x) > 0.0);
  for (int i = 0; i < 8; ++i) {
    const double cut = (3.0 + (i + 1)) / 10.0;
    auto y = x;
    y[i] = std::min(cut, 0.999);
    if (cut < 1.0) CHECK(eval_benchmark(id, y) == 0.0);
    else CHECK(eval_benchmark(id, y) > 0.0);
  }
}

TEST_CASE("benchmarks are finite on the cube") {
  RngStream rng(12, 0);
  for (int fam = 1; fam <= 6; ++fam) {
    for (int d : {1, 5, 8, 12}) {
      std::vector<double> x(d);
      for (int t = 0; t < 200; ++t) {
        for (double& v : x) v = rng.uniform();
        CHECK(std::isfinite(eval_benchmark({fam, d}, x)));
      }
    }
  }
}

TEST_CASE("reference examples") {
  CHECK(reference_value({2, 1}).value == doctest::Approx(100.0 * std::atan(25.0)).epsilon(1e-14));
  CHECK(reference_value({5, 5}).value == doctest::Approx(3.0936e-4).epsilon(1e-4));
  CHECK(reference_value({4, 5}).value == doctest::Approx(1.7913e-6).epsilon(1e-4));
  double f6 = 1.0;
  for (int i = 1; i <= 5; ++i) f6 *= std::expm1((i + 4) * (3.0 + i) / 10.0) / (i + 4);
  CHECK(reference_value({6, 5}).value == doctest::Approx(f6).epsilon(1e-14));
  CHECK(reference_value({5, 5}).method == ReferenceMethod::SeparableAnalytic);
  CHECK(reference_value({1, 5}).method == ReferenceMethod::ClosedForm);
  CHECK(to_string(ReferenceMethod::LowDiscrepancyOracle) == "low-discrepancy-oracle");
}

TEST_CASE("f1 closed form in one dimension") {
  CHECK(reference_value({1, 1}).value == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
}

TEST_CASE("f3 closed form in low dimension") {
  CHECK(f3_closed_form(1) == doctest::Approx(0.5).epsilon(1e-14));
  // integral of (1 + x + 2y)^-3 over the unit square
  CHECK(f3_closed_form(2) == doctest::Approx(5.0 / 48.0).epsilon(1e-12));
}

TEST_CASE("sum integrand") {
  CHECK(sum_integrand(5)(std::vector<double>(5, 0.0)) == 0.0);
  CHECK(reference_for("sum", 5)->value == 2.5);
  CHECK(reference_for("sum", 8)->value == 4.0);
}

TEST_CASE("registry") {
  CHECK(integrand_ids().size() == 7);
  for (const auto& id : integrand_ids()) CHECK(make_integrand(id, 3).has_value());
  CHECK_FALSE(make_integrand("f7", 3).has_value());
  CHECK_FALSE(make_integrand("", 3).has_value());
  CHECK_FALSE(reference_for("nope", 3).has_value());
}

TEST_CASE("oracle on simple integrands") {
  const Integrand one(4, [](std::span<const double>) { return 1.0; });
  auto o = oracle_integral(one, 1 << 16);
  CHECK(o.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(o.abs_error_bound <= 1e-14);
  CHECK(o.shifts == 16);
  o = oracle_integral(sum_integrand(5), 1 << 20);
  CHECK(std::fabs(o.value - 2.5) <= o.abs_error_bound);
  CHECK_THROWS_AS(oracle_integral(one, 1000), ArgumentError);
  const auto again = oracle_integral(sum_integrand(5), 1 << 20);
  CHECK(again.value == o.value);
}

TEST_CASE("oracle agrees with the f1 and f3 closed forms") {
  for (int d : {3, 5}) {
    const auto o = oracle_integral(benchmark_integrand({1, d}), 1 << 22);
    CHECK(std::fabs(o.value - reference_value({1, d}).value) <= o.abs_error_bound + 1e-14);
    const auto o3 = oracle_integral(benchmark_integrand({3, d}), 1 << 22);
    CHECK(std::fabs(o3.value - f3_closed_form(d)) <= o3.abs_error_bound);
  }
}

TEST_CASE("sobol sequence basics") {
  SobolSequence s(3);
  std::vector<double> x(3);
  s.next(x);
  for (double v : x) CHECK(v == 0.0);
  s.next(x);
  for (double v : x) CHECK(v == 0.5);
  // first 2^k points are stratified in each coordinate
  SobolSequence t(5);
  std::vector<int> counts(5 * 8, 0);
  std::vector<double> y(5);
  for (int i = 0; i < 64; ++i) {
    t.next(y);
    for (int j = 0; j < 5; ++j) counts[j * 8 + static_cast<int>(y[j] * 8)]++;
  }
  for (int c : counts) CHECK(c == 8);
  SobolSequence u(5);
  u.seek(10);
  SobolSequence w(5);
  std::vector<double> a(5), b(5);
  for (int i = 0; i <= 10; ++i) w.next(b);
  u.next(a);
  CHECK(a == b);
  CHECK_THROWS_AS(SobolSequence(13), UnsupportedDimension);
}

}
