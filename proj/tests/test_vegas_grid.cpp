#include <doctest.h>

#include <cmath>
#include <sstream>

#include "paracube/rng.hpp"
#include "paracube/vegas_grid.hpp"

using namespace paracube;

TEST_SUITE("vegas_grid") {

TEST_CASE("init_grid examples") {
  const auto g = init_grid(1, 4);
  const std::vector<double> want{0, 0.25, 0.5, 0.75, 1};
  CHECK(std::vector<double>(g.axis(0).begin(), g.axis(0).end()) == want);
  const auto g3 = init_grid(3);
  CHECK(g3.bins() == 500);
  CHECK(g3.boundaries().size() == 3 * 501);
  for (int j = 0; j < 3; ++j) {
    CHECK(g3.axis(j).front() == 0.0);
    CHECK(g3.axis(j).back() == 1.0);
  }
  CHECK_THROWS_AS(init_grid(2, 1), ArgumentError);
}

TEST_CASE("grid construction validates boundaries") {
  CHECK_THROWS_AS(VegasGrid(1, 2, {0.0, 0.5, 0.9}), DomainError);
  CHECK_THROWS_AS(VegasGrid(1, 2, {0.0, 0.6, 0.5}), DomainError);
  CHECK_THROWS_AS(VegasGrid(1, 2, {0.0, 1.0}), ArgumentError);
}

TEST_CASE("transform examples") {
  const auto u = init_grid(3, 10);
  const std::vector<double> y{0.13, 0.5, 0.999};
  const auto t = transform(y, u);
  for (int j = 0; j < 3; ++j) CHECK(t.x[j] == doctest::Approx(y[j]).epsilon(1e-15));
  CHECK(t.jacobian == doctest::Approx(1.0).epsilon(1e-15));

  const auto z = transform(std::vector<double>{0.0, 0.0, 0.0}, u);
  for (int j = 0; j < 3; ++j) {
    CHECK(z.x[j] == 0.0);
    CHECK(z.bins[j] == 0);
  }

  const VegasGrid g(1, 2, {0.0, 0.8, 1.0});
  const auto h = transform(std::vector<double>{0.75}, g);
  CHECK(h.bins[0] == 1);
  CHECK(h.x[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(h.jacobian == doctest::Approx(0.4).epsilon(1e-15));

  CHECK_THROWS_AS(transform(std::vector<double>{1.0}, g), DomainError);
  CHECK_THROWS_AS(transform(std::vector<double>{-0.1}, g), DomainError);
  CHECK_THROWS_AS(transform(std::vector<double>{0.1, 0.2}, g), ArgumentError);
}

TEST_CASE("average jacobian is 1") {
  std::vector<double> b{0.0};
  for (int k = 1; k < 8; ++k) b.push_back(std::pow(k / 8.0, 2.5));
  b.push_back(1.0);
  std::vector<double> all;
  for (int j = 0; j < 2; ++j) all.insert(all.end(), b.begin(), b.end());
  const VegasGrid g(2, 8, all);
  RngStream rng(3, 0);
  const int n = 100000;
  double s = 0.0;
  std::vector<double> y(2);
  for (int i = 0; i < n; ++i) {
    y[0] = rng.uniform();
    y[1] = rng.uniform();
    s += transform(y, g).jacobian;
  }
  CHECK(std::fabs(s / n - 1.0) <= 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("transform bins index the widths behind the jacobian") {
  const VegasGrid g(2, 4, {0, 0.1, 0.3, 0.7, 1.0, 0, 0.4, 0.5, 0.6, 1.0});
  RngStream rng(8, 0);
  std::vector<double> y(2);
  for (int i = 0; i < 200; ++i) {
    y[0] = rng.uniform();
    y[1] = rng.uniform();
    const auto t = transform(y, g);
    double jac = 1.0;
    for (int j = 0; j < 2; ++j) {
      const auto b = g.axis(j);
      jac *= 4 * (b[t.bins[j] + 1] - b[t.bins[j]]);
      CHECK(t.x[j] >= b[t.bins[j]]);
      CHECK(t.x[j] <= b[t.bins[j] + 1]);
    }
    CHECK(t.jacobian == doctest::Approx(jac).epsilon(1e-14));
  }
}

TEST_CASE("accumulate fans out per axis") {
  BinContributions c(2, 10);
  const std::vector<int> bins{3, 7};
  accumulate(c, bins, 0.0);
  for (double v : c.values()) CHECK(v == 0.0);
  accumulate(c, bins, 1.5);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 10; ++k)
      CHECK(c.at(j, k) == ((j == 0 && k == 3) || (j == 1 && k == 7) ? 1.5 : 0.0));
  c.reset();
  for (double v : c.values()) CHECK(v == 0.0);
}

TEST_CASE("concurrent accumulation adds up") {
  for (auto mode : {ReductionMode::DeterministicTree, ReductionMode::Unordered}) {
    Accumulator acc(2 * 10, 2, mode);
    const std::vector<int> bins{4, 4};
    ExecConfig ex;
    ex.workers = 2;
    ex.chunk = 1;
    parallel_for_each_group(2, [&](std::size_t s) { accumulate(acc, s, 10, bins, 1.0); }, ex);
    const auto snap = acc.snapshot();
    CHECK(snap[4] == 2.0);
    CHECK(snap[14] == 2.0);
  }
}

TEST_CASE("refine_grid on equal or zero contributions") {
  const auto g = init_grid(2, 50);
  BinContributions eq(2, 50, std::vector<double>(100, 3.0));
  const auto r = refine_grid(g, eq);
  for (std::size_t i = 0; i < g.boundaries().size(); ++i)
    CHECK(r.boundaries()[i] == doctest::Approx(g.boundaries()[i]).epsilon(1e-12));
  const auto z = refine_grid(g, BinContributions(2, 50));
  CHECK(std::vector<double>(z.boundaries().begin(), z.boundaries().end()) ==
        std::vector<double>(g.boundaries().begin(), g.boundaries().end()));
  CHECK_THROWS_AS(refine_grid(g, BinContributions(2, 40)), ArgumentError);
  GridRefineParams bad;
  bad.alpha = -1;
  CHECK_THROWS_AS(refine_grid(g, eq, bad), ArgumentError);
}

TEST_CASE("refine_grid concentrates bins on a peak") {
  const int n = 500;
  auto g = init_grid(1, n);
  for (int round = 0; round < 5; ++round) {
    // density on [0.45, 0.55] binned on the current grid
    std::vector<double> c(n, 0.0);
    const auto b = g.axis(0);
    for (int k = 0; k < n; ++k) {
      const double lo = std::max(b[k], 0.45), hi = std::min(b[k + 1], 0.55);
      if (hi > lo) c[k] = (hi - lo) / (b[k + 1] - b[k]);
    }
    g = refine_grid(g, BinContributions(1, n, c));
    g.validate();
  }
  const auto b = g.axis(0);
  int inside = 0;
  for (int k = 0; k < n; ++k) inside += b[k] >= 0.4 && b[k + 1] <= 0.6;
  const double frac = static_cast<double>(inside) / n;
  MESSAGE("fraction of bins inside [0.4, 0.6] after 5 refits: " << frac);
  CHECK(frac >= 0.4);
  CHECK(inside == 498);  // frozen from the first verified run
}

TEST_CASE("refine_grid without smoothing") {
  auto g = init_grid(1, 4);
  GridRefineParams p;
  p.smoothing = false;
  const auto r = refine_grid(g, BinContributions(1, 4, {0, 1, 1, 0}), p);
  const auto b = r.axis(0);
  CHECK(b[0] == 0.0);
  CHECK(b[4] == 1.0);
  CHECK(b[1] > 0.25);
  CHECK(b[3] < 0.75);
  CHECK(b[2] == doctest::Approx(0.5));
}

TEST_CASE("grid snapshot text") {
  std::ostringstream os;
  write_grid(os, init_grid(2, 2));
  CHECK(os.str() == "axis 0: 0 0.5 1\naxis 1: 0 0.5 1\n");
}

}
