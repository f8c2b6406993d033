#include <doctest.h>

#include <cmath>
#include <sstream>

#include "paracube/bench.hpp"
#include "paracube/rng.hpp"

using namespace paracube;

TEST_SUITE("bench") {

TEST_CASE("summary statistics") {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean_ms == 2.5);
  CHECK(s.std_ms == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(summarize({7.0}).std_ms == 0.0);
}

TEST_CASE("csv header is exact") {
  std::ostringstream os;
  write_csv(os, {});
  CHECK(os.str() == "id,mean_a_ms,mean_b_ms,std_a,std_b,ratio\n");
}

TEST_CASE("csv round trip") {
  RngStream rng(4, 0);
  std::vector<TimingRow> rows;
  for (int i = 0; i < 20; ++i)
    rows.push_back({"s" + std::to_string(i), 1 + 100 * rng.uniform(), 1 + 100 * rng.uniform(),
                    rng.uniform(), rng.uniform() * 1e-7});
  std::stringstream ss;
  write_csv(ss, rows);
  CHECK(parse_csv(ss) == rows);
}

TEST_CASE("csv parse errors") {
  std::stringstream bad_header("id,a\n");
  CHECK_THROWS_AS(parse_csv(bad_header), ArgumentError);
  std::stringstream bad_cols("id,mean_a_ms,mean_b_ms,std_a,std_b,ratio\nx,1,2\n");
  CHECK_THROWS_AS(parse_csv(bad_cols), ArgumentError);
  std::stringstream bad_ratio("id,mean_a_ms,mean_b_ms,std_a,std_b,ratio\nx,1,2,0,0,3\n");
  CHECK_THROWS_AS(parse_csv(bad_ratio), ArgumentError);
  std::vector<TimingRow> comma{{"a,b", 1, 1, 0, 0}};
  std::ostringstream os;
  CHECK_THROWS_AS(write_csv(os, comma), ArgumentError);
}

TEST_CASE("ratio comes from the means") {
  const TimingRow r{"x", 2.0, 3.0, 0.1, 0.2};
  CHECK(r.ratio() == 1.5);
  CHECK(to_json(r)["ratio"].get<double>() == 1.5);
}

TEST_CASE("scenario parsing") {
  const auto j = nlohmann::json::parse(R"({"scenarios": [
    {"id": "b", "integrator": "mcubes", "integrand": "f4", "d": 5, "workload": 1e4},
    {"id": "a", "integrator": "pagani", "integrand": "sum", "d": 3, "workload": 2, "repetitions": 2}
  ]})");
  const auto s = parse_scenarios(j);
  REQUIRE(s.size() == 2);
  CHECK(s[0].repetitions == kDefaultKernelRepetitions);
  CHECK(s[1].integrator == Integrator::Pagani);
  CHECK_THROWS_AS(parse_scenarios(nlohmann::json::parse(R"([{"id": "x"}])")), ArgumentError);
  CHECK_THROWS_AS(parse_scenarios(nlohmann::json::parse(
                      R"([{"id": "x", "integrator": "gpu", "integrand": "f1", "d": 2, "workload": 2}])")),
                  ArgumentError);
  CHECK_THROWS_AS(parse_scenarios(nlohmann::json::parse(
                      R"([{"id": "x", "integrator": "mcubes", "integrand": "f1", "d": 5, "workload": 10}])")),
                  ArgumentError);
  CHECK_THROWS_AS(load_scenarios("/nonexistent/file.json"), ArgumentError);
}

TEST_CASE("default scenarios are the six 8-d kernels") {
  const auto s = default_scenarios(Integrator::Mcubes, 3);
  CHECK(s.size() == 6);
  for (const auto& x : s) {
    CHECK(x.d == 8);
    CHECK_NOTHROW(x.validate());
  }
}

TEST_CASE("compare sorts rows and names failures") {
  std::vector<Scenario> list{
      {"zeta", Integrator::Pagani, "sum", 3, 2, 2},
      {"alpha", Integrator::Mcubes, "f5", 3, 1e3, 2},
  };
  ExecConfig a, b;
  a.workers = 1;
  b.workers = 2;
  const auto rows = compare(list, a, b, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].id == "alpha");
  CHECK(rows[1].id == "zeta");
  for (const auto& r : rows) {
    CHECK(r.mean_a_ms > 0.0);
    CHECK(r.mean_b_ms > 0.0);
  }
  list.push_back({"bad", Integrator::Pagani, "sum", 3, 0, 1});
  try {
    compare(list, a, b, 1);
    FAIL("expected ScenarioError");
  } catch (const ScenarioError& e) {
    CHECK(e.id() == "bad");
  }
}

TEST_CASE("kernel estimates do not depend on timing configuration") {
  const Scenario s{"p", Integrator::Pagani, "f1", 4, 3, 1};
  ExecConfig a, b;
  a.workers = 1;
  b.workers = 4;
  CHECK(time_scenario(s, a, 1).estimate == time_scenario(s, b, 1).estimate);
  const Scenario m{"m", Integrator::Mcubes, "f1", 4, 1e4, 1};
  CHECK(time_scenario(m, a, 1).estimate == time_scenario(m, b, 1).estimate);
}

TEST_CASE("bench_invoke accumulator and structure") {
  ExecConfig ex;
  ex.workers = 2;
  const auto rep = bench_invoke("sum", 5, 1000000, 10, ex, 3);
  CHECK(rep.stats.samples_ms.size() == 10);
  CHECK(rep.workers == 2);
  RngStream rng(3, 0);
  std::vector<double> xs(5000000);
  for (double& v : xs) v = rng.uniform();
  double direct = 0.0;
  for (std::size_t i = 0; i < 1000000; ++i) {
    double s = 0.0;
    for (int j = 0; j < 5; ++j) s += xs[i * 5 + j];
    direct += s;
  }
  CHECK(std::fabs(rep.accumulator - direct) <= 1e-9 * std::fabs(direct));
  CHECK_THROWS_AS(bench_invoke("sum", 5, 0, 1, ex, 1), ArgumentError);
  CHECK_THROWS_AS(bench_invoke("f9", 5, 10, 1, ex, 1), ArgumentError);
}

}
