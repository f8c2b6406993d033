#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>
#include <numeric>
#include <stdexcept>

#include "paracube/exec.hpp"
#include "paracube/rng.hpp"

using namespace paracube;

namespace {

ExecConfig with(unsigned workers, bool det = true, std::size_t chunk = 8) {
  ExecConfig c;
  c.workers = workers;
  c.deterministic = det;
  c.chunk = chunk;
  return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_SUITE("exec") {

TEST_CASE("parallel_for_groups ordering") {
  CHECK(parallel_for_groups(0, [](std::size_t g) { return g; }, with(4)).empty());
  const auto a = parallel_for_groups(1000, [](std::size_t g) { return g * 3; }, with(1));
  for (unsigned w : {2u, 8u})
    for (std::size_t chunk : {1u, 7u, 64u}) {
      const auto b = parallel_for_groups(1000, [](std::size_t g) { return g * 3; },
                                         with(w, true, chunk));
      CHECK(a == b);
      const auto c = parallel_for_groups(1000, [](std::size_t g) { return g * 3; },
                                         with(w, false, chunk));
      CHECK(a == c);
    }
  CHECK(a[999] == 2997);
}

TEST_CASE("every group runs exactly once") {
  std::vector<std::atomic<int>> hits(5000);
  parallel_for_each_group(5000, [&](std::size_t g) { hits[g].fetch_add(1); }, with(8, false, 3));
  for (auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("a failing task reports its group id") {
  for (unsigned w : {1u, 4u}) {
    try {
      parallel_for_groups(
          100,
          [](std::size_t g) -> int {
            if (g == 37) throw std::domain_error("boom " + std::to_string(g));
            return 0;
          },
          with(w, true, 1));
      FAIL("expected an error");
    } catch (const GroupTaskError& e) {
      CHECK(e.group_id() == 37);
      CHECK_THROWS_AS(rethrow_original(e), std::domain_error);
    }
  }
}

TEST_CASE("reduce examples") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(reduce(v, ReductionMode::DeterministicTree) == 10.0);
  CHECK(reduce(v, ReductionMode::Unordered) == 10.0);
  CHECK(reduce({}, ReductionMode::DeterministicTree) == 0.0);
  CHECK(pairwise_sum({}) == 0.0);
}

TEST_CASE("deterministic reduce is bit-identical across workers") {
  std::vector<double> v(1000000, 1e-8);
  v[123457] = 1.0;
  const double ref = reduce(v, ReductionMode::DeterministicTree, with(1));
  for (unsigned w : {2u, 4u, 8u})
    CHECK(same_bits(reduce(v, ReductionMode::DeterministicTree, with(w)), ref));
  CHECK(same_bits(pairwise_sum(v), ref));
}

TEST_CASE("pairwise_sum matches across the block boundary") {
  RngStream rng(5, 0);
  for (std::size_t n : {1u, 2u, 1023u, 1024u, 1025u, 5000u}) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform() - 0.3;
    double naive = 0.0;
    for (double x : v) naive += x;
    CHECK(pairwise_sum(v) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("accumulator contract") {
  Accumulator z(4, 2, ReductionMode::DeterministicTree);
  for (double v : z.snapshot()) CHECK(v == 0.0);

  for (auto mode : {ReductionMode::DeterministicTree, ReductionMode::Unordered}) {
    Accumulator a(3, 2, mode);
    parallel_for_each_group(
        2, [&](std::size_t s) { a.add(s, 0, s == 0 ? 1.0 : 2.0); }, with(2, true, 1));
    CHECK(a.snapshot()[0] == 3.0);
    CHECK_THROWS_AS(a.add(0, 3, 1.0), IndexOutOfRange);
    CHECK_THROWS_AS(a.add(2, 0, 1.0), IndexOutOfRange);
  }
}

TEST_CASE("deterministic accumulator snapshots do not depend on workers") {
  auto fill = [](unsigned workers) {
    Accumulator a(16, 64, ReductionMode::DeterministicTree);
    parallel_for_each_group(
        64,
        [&](std::size_t s) {
          RngStream rng(9, s);
          for (int k = 0; k < 1000; ++k)
            a.add(s, static_cast<std::size_t>(rng.next_u64() % 16), rng.uniform());
        },
        with(workers));
    return a.snapshot();
  };
  const auto ref = fill(1);
  for (unsigned w : {2u, 8u}) {
    const auto s = fill(w);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(same_bits(s[i], ref[i]));
  }
}

TEST_CASE("worker count from the environment") {
  ::setenv(kWorkersEnv, "3", 1);
  CHECK(default_workers() == 3);
  CHECK(ExecConfig{}.resolved_workers() == 3);
  CHECK(with(5).resolved_workers() == 5);
  ::setenv(kWorkersEnv, "junk", 1);
  CHECK(default_workers() >= 1);
  ::unsetenv(kWorkersEnv);
  CHECK(default_workers() >= 1);
}

TEST_CASE("rng streams are pure functions of (seed, stream, counter)") {
  RngStream a(1, 2), b(1, 2), c(1, 3);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  RngStream jump(1, 2, 5);
  RngStream walk(1, 2);
  for (int i = 0; i < 5; ++i) walk.next_u64();
  CHECK(jump.next_u64() == walk.next_u64());
  RngStream u(4, 0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

}
