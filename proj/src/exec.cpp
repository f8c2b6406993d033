#include "paracube/exec.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>

namespace paracube {

unsigned default_workers() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

unsigned ExecConfig::resolved_workers() const {
  return workers == 0 ? default_workers() : workers;
}

GroupTaskError::GroupTaskError(std::size_t group_id, const std::string& what)
    : Error("group " + std::to_string(group_id) + ": " + what), group_id_(group_id) {}

void rethrow_original(const GroupTaskError& e) {
  std::rethrow_if_nested(e);
  throw e;
}

namespace detail {

void run_groups(std::size_t n, const std::function<void(std::size_t)>& body,
                const ExecConfig& cfg) {
  if (n == 0) return;
  const std::size_t chunk = std::max<std::size_t>(cfg.chunk, 1);
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(cfg.resolved_workers(), n_chunks));

  std::atomic<bool> failed{false};
  std::atomic<std::size_t> next_chunk{0};
  std::mutex err_mu;
  std::size_t err_group = std::numeric_limits<std::size_t>::max();
  std::exception_ptr err;

  auto run_chunk = [&](std::size_t c) {
    const std::size_t lo = c * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    for (std::size_t g = lo; g < hi; ++g) {
      if (failed.load(std::memory_order_relaxed)) return;
      try {
        body(g);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (g < err_group) {
          err_group = g;
          err = std::current_exception();
        }
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  auto worker = [&](unsigned w) {
    if (cfg.deterministic) {
      for (std::size_t c = w; c < n_chunks; c += workers) {
        if (failed.load(std::memory_order_relaxed)) return;
        run_chunk(c);
      }
    } else {
      for (;;) {
        const std::size_t c = next_chunk.fetch_add(1, std::memory_order_relaxed);
        if (c >= n_chunks || failed.load(std::memory_order_relaxed)) return;
        run_chunk(c);
      }
    }
  };

  if (workers <= 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker, w);
    worker(0);
  }

  if (err) {
    try {
      std::rethrow_exception(err);
    } catch (const std::exception& e) {
      std::throw_with_nested(GroupTaskError(err_group, e.what()));
    } catch (...) {
      std::throw_with_nested(GroupTaskError(err_group, "unknown error"));
    }
  }
}

}  // namespace detail

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  // In-place bottom-up tree over a scratch copy of at most 1024 values at a
  // time; blocks are aligned to powers of two so the result matches a single
  // pass over the whole array.
  constexpr std::size_t kBlock = 1024;
  double buf[kBlock];
  if (values.size() <= kBlock) {
    std::size_t m = values.size();
    std::copy_n(values.begin(), m, buf);
    while (m > 1) {
      const std::size_t half = m / 2;
      for (std::size_t i = 0; i < half; ++i) buf[i] = buf[2 * i] + buf[2 * i + 1];
      if (m % 2) buf[half] = buf[m - 1];
      m = half + (m % 2);
    }
    return buf[0];
  }
  std::vector<double> level;
  level.reserve((values.size() + kBlock - 1) / kBlock);
  for (std::size_t lo = 0; lo < values.size(); lo += kBlock) {
    std::size_t m = std::min(kBlock, values.size() - lo);
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(lo), m, buf);
    while (m > 1) {
      const std::size_t half = m / 2;
      for (std::size_t i = 0; i < half; ++i) buf[i] = buf[2 * i] + buf[2 * i + 1];
      if (m % 2) buf[half] = buf[m - 1];
      m = half + (m % 2);
    }
    level.push_back(buf[0]);
  }
  while (level.size() > 1) {
    const std::size_t m = level.size();
    const std::size_t half = m / 2;
    for (std::size_t i = 0; i < half; ++i) level[i] = level[2 * i] + level[2 * i + 1];
    if (m % 2) level[half] = level[m - 1];
    level.resize(half + (m % 2));
  }
  return level[0];
}

double reduce(std::span<const double> values, ReductionMode mode, const ExecConfig& cfg) {
  if (values.empty()) return 0.0;
  // Leaf blocks are power-of-two sized and aligned, so per-block pairwise
  // sums combined by the same tree reproduce pairwise_sum exactly.
  constexpr std::size_t kLeaf = std::size_t{1} << 14;
  const std::size_t n_blocks = (values.size() + kLeaf - 1) / kLeaf;
  if (n_blocks == 1) return pairwise_sum(values);

  ExecConfig sub = cfg;
  sub.chunk = 1;
  sub.deterministic = mode == ReductionMode::DeterministicTree;
  auto partial = parallel_for_groups(
      n_blocks,
      [&](std::size_t b) {
        const std::size_t lo = b * kLeaf;
        return pairwise_sum(values.subspan(lo, std::min(kLeaf, values.size() - lo)));
      },
      sub);

  if (mode == ReductionMode::DeterministicTree) return pairwise_sum(partial);
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

Accumulator::Accumulator(std::size_t size, std::size_t streams, ReductionMode mode)
    : size_(size), streams_(std::max<std::size_t>(streams, 1)), mode_(mode) {
  data_.assign(mode_ == ReductionMode::DeterministicTree ? size_ * streams_ : size_, 0.0);
}

void Accumulator::add(std::size_t stream, std::size_t index, double value) {
  if (index >= size_) throw IndexOutOfRange("accumulator index " + std::to_string(index));
  if (stream >= streams_) throw IndexOutOfRange("accumulator stream " + std::to_string(stream));
  if (mode_ == ReductionMode::DeterministicTree) {
    data_[stream * size_ + index] += value;
  } else {
    std::atomic_ref<double>(data_[index]).fetch_add(value, std::memory_order_relaxed);
  }
}

std::vector<double> Accumulator::snapshot() const {
  if (mode_ == ReductionMode::Unordered) return data_;
  std::vector<double> out(size_);
  std::vector<double> column(streams_);
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t s = 0; s < streams_; ++s) column[s] = data_[s * size_ + i];
    out[i] = pairwise_sum(column);
  }
  return out;
}

}  // namespace paracube
