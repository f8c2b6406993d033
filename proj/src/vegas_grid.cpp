#include "paracube/vegas_grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace paracube {

VegasGrid::VegasGrid(int d, int n_bins, std::vector<double> boundaries)
    : d_(d), n_bins_(n_bins), b_(std::move(boundaries)) {
  check_dim(d);
  if (n_bins < 2) throw ArgumentError("vegas grid: need at least 2 bins per axis");
  if (b_.size() != static_cast<std::size_t>(d) * (n_bins + 1))
    throw ArgumentError("vegas grid: boundary list has the wrong size");
  validate();
}

void VegasGrid::validate() const {
  for (int j = 0; j < d_; ++j) {
    const auto b = axis(j);
    if (b.front() != 0.0 || b.back() != 1.0)
      throw DomainError("vegas grid: axis " + std::to_string(j) + " is not pinned to [0, 1]");
    for (int k = 0; k < n_bins_; ++k)
      if (!(b[k] < b[k + 1]))
        throw DomainError("vegas grid: axis " + std::to_string(j) + " not strictly increasing");
  }
}

VegasGrid init_grid(int d, int n_bins) {
  check_dim(d);
  if (n_bins < 2) throw ArgumentError("init_grid: need at least 2 bins per axis");
  std::vector<double> b;
  b.reserve(static_cast<std::size_t>(d) * (n_bins + 1));
  for (int j = 0; j < d; ++j)
    for (int k = 0; k <= n_bins; ++k) b.push_back(static_cast<double>(k) / n_bins);
  return VegasGrid(d, n_bins, std::move(b));
}

Transformed transform(std::span<const double> y, const VegasGrid& grid) {
  if (static_cast<int>(y.size()) != grid.dim())
    throw ArgumentError("transform: dimension mismatch");
  for (std::size_t j = 0; j < y.size(); ++j)
    if (!(y[j] >= 0.0 && y[j] < 1.0))
      throw DomainError("transform: y[" + std::to_string(j) + "] outside [0, 1)");
  Transformed t{Point(y.size()), 1.0, std::vector<int>(y.size())};
  t.jacobian = transform_into(y, grid, t.x, t.bins);
  return t;
}

BinContributions::BinContributions(int d, int n_bins)
    : d_(d), n_bins_(n_bins), c_(static_cast<std::size_t>(d) * n_bins, 0.0) {}

BinContributions::BinContributions(int d, int n_bins, std::vector<double> values)
    : d_(d), n_bins_(n_bins), c_(std::move(values)) {
  if (c_.size() != static_cast<std::size_t>(d) * n_bins)
    throw ArgumentError("bin contributions: wrong size");
}

void BinContributions::reset() { std::fill(c_.begin(), c_.end(), 0.0); }

void accumulate(BinContributions& c, std::span<const int> bins, double contribution) {
  for (int j = 0; j < c.dim(); ++j) c.at(j, bins[j]) += contribution;
}

void accumulate(Accumulator& acc, std::size_t stream, int n_bins, std::span<const int> bins,
                double contribution) {
  for (std::size_t j = 0; j < bins.size(); ++j)
    acc.add(stream, j * static_cast<std::size_t>(n_bins) + bins[j], contribution);
}

void GridRefineParams::validate() const {
  if (!(alpha >= 0.0)) throw ArgumentError("grid refine: alpha must be >= 0");
}

VegasGrid refine_grid(const VegasGrid& grid, const BinContributions& c,
                      const GridRefineParams& params) {
  params.validate();
  if (c.dim() != grid.dim() || c.bins() != grid.bins())
    throw ArgumentError("refine_grid: contribution shape does not match the grid");
  const int n = grid.bins();
  std::vector<double> out(grid.boundaries().begin(), grid.boundaries().end());
  std::vector<double> s(n), w(n);

  for (int j = 0; j < grid.dim(); ++j) {
    const auto cj = c.axis(j);
    if (params.smoothing) {
      s[0] = (cj[0] + cj[1]) / 2.0;
      for (int k = 1; k < n - 1; ++k) s[k] = (cj[k - 1] + cj[k] + cj[k + 1]) / 3.0;
      s[n - 1] = (cj[n - 2] + cj[n - 1]) / 2.0;
    } else {
      std::copy(cj.begin(), cj.end(), s.begin());
    }
    double total = 0.0;
    for (double v : s) total += v;
    if (!(total > 0.0) || !std::isfinite(total)) continue;

    double wsum = 0.0;
    for (int k = 0; k < n; ++k) {
      const double r = s[k] / total;
      if (r <= 0.0) {
        w[k] = 0.0;
      } else if (r >= 1.0) {
        w[k] = 1.0;  // limit of (1 - r)/ln(1/r) as r -> 1
      } else {
        w[k] = std::pow((1.0 - r) / -std::log(r), params.alpha);
      }
      wsum += w[k];
    }
    if (!(wsum > 0.0)) continue;

    const auto old = grid.axis(j);
    double* nb = out.data() + static_cast<std::size_t>(j) * (n + 1);
    const double per_bin = wsum / n;
    // Walk the old bins, dropping a new boundary each time the running
    // weight passes another multiple of per_bin.
    int k = 0;
    double acc = 0.0;  // weight of old bins [0, k)
    for (int i = 1; i < n; ++i) {
      const double target = i * per_bin;
      while (k < n - 1 && acc + w[k] < target) acc += w[k++];
      const double frac = w[k] > 0.0 ? std::clamp((target - acc) / w[k], 0.0, 1.0) : 1.0;
      nb[i] = old[k] + frac * (old[k + 1] - old[k]);
    }
    nb[0] = 0.0;
    nb[n] = 1.0;
    // Guard against collapsed bins from rounding in extreme weight ratios.
    for (int i = 1; i <= n; ++i) {
      if (!(nb[i] > nb[i - 1])) {
        std::copy(old.begin(), old.end(), nb);
        break;
      }
    }
  }
  return VegasGrid(grid.dim(), n, std::move(out));
}

void write_grid(std::ostream& os, const VegasGrid& grid) {
  const auto old_prec = os.precision(17);
  for (int j = 0; j < grid.dim(); ++j) {
    os << "axis " << j << ':';
    for (double b : grid.axis(j)) os << ' ' << b;
    os << '\n';
  }
  os.precision(old_prec);
}

}  // namespace paracube
