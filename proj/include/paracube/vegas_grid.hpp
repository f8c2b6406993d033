#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "paracube/core.hpp"
#include "paracube/exec.hpp"

namespace paracube {

inline constexpr int kDefaultBins = 500;

/// Per-axis piecewise-linear map from [0,1) onto itself. Axis j owns
/// boundaries()[j * (n_bins + 1) .. (j + 1) * (n_bins + 1)).
class VegasGrid {
 public:
  VegasGrid() = default;
  VegasGrid(int d, int n_bins, std::vector<double> boundaries);

  int dim() const noexcept { return d_; }
  int bins() const noexcept { return n_bins_; }
  std::span<const double> axis(int j) const {
    return {b_.data() + static_cast<std::size_t>(j) * (n_bins_ + 1),
            static_cast<std::size_t>(n_bins_) + 1};
  }
  std::span<const double> boundaries() const noexcept { return b_; }

  /// Pinned ends, strictly increasing; throws DomainError otherwise.
  void validate() const;

 private:
  int d_ = 0;
  int n_bins_ = 0;
  std::vector<double> b_;
};

/// Equally spaced grid, B[k] = k / n_bins on every axis.
VegasGrid init_grid(int d, int n_bins = kDefaultBins);

struct Transformed {
  Point x;
  double jacobian = 1.0;
  std::vector<int> bins;
};

/// Maps y in [0,1)^d through the grid. Throws DomainError if any y[j] lies
/// outside [0, 1).
Transformed transform(std::span<const double> y, const VegasGrid& grid);

/// Allocation-free variant for sampling loops; y is assumed in range.
/// Returns the jacobian.
inline double transform_into(std::span<const double> y, const VegasGrid& grid,
                             std::span<double> x, std::span<int> bins) {
  const int n = grid.bins();
  double jac = 1.0;
  for (int j = 0; j < grid.dim(); ++j) {
    const auto b = grid.axis(j);
    const double z = y[j] * n;
    int k = static_cast<int>(z);
    if (k >= n) k = n - 1;
    const double width = b[k + 1] - b[k];
    x[j] = b[k] + (z - k) * width;
    jac *= n * width;
    bins[j] = k;
  }
  return jac;
}

/// Accumulated squared sample values per axis and bin.
class BinContributions {
 public:
  BinContributions() = default;
  BinContributions(int d, int n_bins);
  BinContributions(int d, int n_bins, std::vector<double> values);

  int dim() const noexcept { return d_; }
  int bins() const noexcept { return n_bins_; }
  double& at(int axis, int bin) { return c_[static_cast<std::size_t>(axis) * n_bins_ + bin]; }
  double at(int axis, int bin) const {
    return c_[static_cast<std::size_t>(axis) * n_bins_ + bin];
  }
  std::span<const double> axis(int j) const {
    return {c_.data() + static_cast<std::size_t>(j) * n_bins_, static_cast<std::size_t>(n_bins_)};
  }
  std::span<const double> values() const noexcept { return c_; }
  void reset();

 private:
  int d_ = 0;
  int n_bins_ = 0;
  std::vector<double> c_;
};

/// C[j][bins[j]] += contribution for every axis j. Single owner.
void accumulate(BinContributions& c, std::span<const int> bins, double contribution);

/// Same fan-out into a shared Accumulator sized d * n_bins (index
/// j * n_bins + bin); safe for concurrent callers under its contract.
void accumulate(Accumulator& acc, std::size_t stream, int n_bins, std::span<const int> bins,
                double contribution);

struct GridRefineParams {
  double alpha = 1.5;
  bool smoothing = true;

  void validate() const;
};

/// One VEGAS refit. Per axis: optional 3-point smoothing (2-point at the
/// edges), weights w = ((1 - r)/ln(1/r))^alpha of the normalised
/// contributions r, then new boundaries splitting total w evenly with linear
/// interpolation inside old bins. Axes with no contribution are unchanged.
VegasGrid refine_grid(const VegasGrid& grid, const BinContributions& c,
                      const GridRefineParams& params = {});

/// Text snapshot, one line per axis: "axis <j>: b0 b1 ... bn".
void write_grid(std::ostream& os, const VegasGrid& grid);

}  // namespace paracube
