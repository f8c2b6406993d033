#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "paracube/core.hpp"

namespace paracube {

/// Name of the environment variable holding the default worker count.
inline constexpr const char* kWorkersEnv = "PARACUBE_WORKERS";

enum class ReductionMode { DeterministicTree, Unordered };

struct ExecConfig {
  unsigned workers = 0;  ///< 0 = PARACUBE_WORKERS, else hardware concurrency
  bool deterministic = true;
  std::size_t chunk = 8;  ///< groups per scheduling unit

  unsigned resolved_workers() const;
  ReductionMode mode() const noexcept {
    return deterministic ? ReductionMode::DeterministicTree : ReductionMode::Unordered;
  }
};

/// Worker count from PARACUBE_WORKERS, falling back to hardware concurrency.
unsigned default_workers();

/// A task failure inside parallel_for_groups. The original exception is
/// nested (std::throw_with_nested) so callers can recover its type.
class GroupTaskError : public Error {
 public:
  GroupTaskError(std::size_t group_id, const std::string& what);
  std::size_t group_id() const noexcept { return group_id_; }

 private:
  std::size_t group_id_;
};

/// Rethrows the exception a GroupTaskError wraps (or the error itself when
/// nothing is nested).
[[noreturn]] void rethrow_original(const GroupTaskError& e);

namespace detail {

/// Runs body(group_id) for every group in [0, n). Deterministic mode hands
/// out chunks block-cyclically (chunk c goes to worker c % workers); the
/// unordered mode lets idle workers grab the next chunk. On failure the
/// lowest failing group id wins and remaining chunks are skipped.
void run_groups(std::size_t n, const std::function<void(std::size_t)>& body,
                const ExecConfig& cfg);

}  // namespace detail

/// Executes task(group_id) once per group; results are ordered by group id.
template <class Task>
auto parallel_for_groups(std::size_t n_groups, Task&& task, const ExecConfig& cfg = {})
    -> std::vector<decltype(task(std::size_t{}))> {
  using R = decltype(task(std::size_t{}));
  std::vector<R> out(n_groups);
  detail::run_groups(
      n_groups, [&](std::size_t g) { out[g] = task(g); }, cfg);
  return out;
}

/// Same as parallel_for_groups for tasks that write their own outputs.
template <class Task>
void parallel_for_each_group(std::size_t n_groups, Task&& task, const ExecConfig& cfg = {}) {
  detail::run_groups(
      n_groups, [&](std::size_t g) { task(g); }, cfg);
}

/// Bottom-up pairwise sum: at each level neighbours (2i, 2i+1) are added and
/// an odd tail element is carried. The tree depends only on values.size().
double pairwise_sum(std::span<const double> values);

/// Sum of values. DeterministicTree gives the pairwise_sum bits no matter how
/// many workers take part; Unordered adds worker partials as they finish.
double reduce(std::span<const double> values, ReductionMode mode, const ExecConfig& cfg = {});

/// Shared accumulation target for concurrent add(index, value).
///
/// Deterministic mode keeps one private partial array per logical stream and
/// merges streams in stream order on snapshot(); a stream must only be fed
/// by one task at a time. Unordered mode adds atomically into a single array,
/// ignoring the stream id, which mirrors a device-wide AtomicAdd.
class Accumulator {
 public:
  Accumulator(std::size_t size, std::size_t streams, ReductionMode mode);

  std::size_t size() const noexcept { return size_; }
  std::size_t streams() const noexcept { return streams_; }
  ReductionMode mode() const noexcept { return mode_; }

  void add(std::size_t stream, std::size_t index, double value);
  /// Sum over streams per index; call only after all adds have completed.
  std::vector<double> snapshot() const;

 private:
  std::size_t size_;
  std::size_t streams_;
  ReductionMode mode_;
  std::vector<double> data_;
};

}  // namespace paracube
