#include "paracube/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace paracube {

namespace {

std::string describe_point(const std::vector<double>& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t j = 0; j < x.size(); ++j) os << (j ? ", " : "") << x[j];
  os << ')';
  return os.str();
}

}  // namespace

UnsupportedDimension::UnsupportedDimension(int d)
    : ArgumentError("unsupported dimension " + std::to_string(d) + " (expected 1.." +
                    std::to_string(kMaxDim) + ")"),
      dim_(d) {}

BudgetExceeded::BudgetExceeded(std::size_t requested, std::size_t cap)
    : Error("region budget exceeded: " + std::to_string(requested) + " > cap " +
            std::to_string(cap)),
      requested_(requested),
      cap_(cap) {}

NonFiniteEvaluation::NonFiniteEvaluation(std::vector<double> point, double value,
                                         std::optional<std::size_t> region)
    : Error("non-finite integrand value " + std::to_string(value) + " at " +
            describe_point(point) +
            (region ? " in region " + std::to_string(*region) : std::string{})),
      point_(std::move(point)),
      value_(value),
      region_(region) {}

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) throw UnsupportedDimension(d);
}

IntegrationBounds IntegrationBounds::unit(int d) {
  check_dim(d);
  return {std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
}

void IntegrationBounds::validate() const {
  if (low.size() != high.size()) throw DomainError("bounds: low/high size mismatch");
  check_dim(dim());
  for (std::size_t j = 0; j < low.size(); ++j) {
    if (!(low[j] < high[j]) || !std::isfinite(low[j]) || !std::isfinite(high[j]))
      throw DomainError("bounds: axis " + std::to_string(j) + " requires finite low < high");
  }
}

double IntegrationBounds::jacobian() const {
  validate();
  double v = 1.0;
  for (std::size_t j = 0; j < low.size(); ++j) v *= high[j] - low[j];
  return v;
}

Integrand::Integrand(int dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {
  check_dim(dim);
  if (!fn_) throw ArgumentError("integrand: empty function");
}

Integrand on_unit_cube(Integrand f, const IntegrationBounds& bounds) {
  bounds.validate();
  if (bounds.dim() != f.dim()) throw ArgumentError("bounds dimension does not match integrand");
  const double jac = bounds.jacobian();
  std::vector<double> low = bounds.low;
  std::vector<double> width(low.size());
  for (std::size_t j = 0; j < low.size(); ++j) width[j] = bounds.high[j] - low[j];

  const int d = f.dim();
  return Integrand(d, [f = std::move(f), low = std::move(low), width = std::move(width), jac,
                       d](std::span<const double> u) {
    double buf[kMaxDim];
    for (int j = 0; j < d; ++j) buf[j] = low[j] + width[j] * u[j];
    return jac * f(std::span<const double>(buf, d));
  });
}

Region Region::unit(int d) {
  check_dim(d);
  return {std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
}

void Region::validate() const {
  if (left.size() != length.size()) throw DomainError("region: left/length size mismatch");
  check_dim(dim());
  for (std::size_t j = 0; j < left.size(); ++j) {
    if (!(length[j] > 0.0) || left[j] < 0.0 || left[j] + length[j] > 1.0 + 1e-15)
      throw DomainError("region: axis " + std::to_string(j) + " outside the unit cube");
  }
}

double region_volume(std::span<const double> length) {
  double v = 1.0;
  for (double l : length) v *= l;
  return v;
}

double region_volume(const Region& region) { return region_volume(region.length); }

RegionList::RegionList(int d, std::size_t n)
    : d_(d), n_(n), lefts_(n * static_cast<std::size_t>(d)), lengths_(n * static_cast<std::size_t>(d)) {
  check_dim(d);
}

void RegionList::set(std::size_t i, std::span<const double> left,
                     std::span<const double> length) {
  if (i >= n_) throw IndexOutOfRange("region index " + std::to_string(i));
  for (int j = 0; j < d_; ++j) {
    lefts_[j * n_ + i] = left[j];
    lengths_[j * n_ + i] = length[j];
  }
}

Region RegionList::region(std::size_t i) const {
  if (i >= n_) throw IndexOutOfRange("region index " + std::to_string(i));
  Region r{std::vector<double>(d_), std::vector<double>(d_)};
  gather(i, r.left, r.length);
  return r;
}

void RegionList::gather(std::size_t i, std::span<double> left, std::span<double> length) const {
  for (int j = 0; j < d_; ++j) {
    left[j] = lefts_[j * n_ + i];
    length[j] = lengths_[j * n_ + i];
  }
}

double RegionList::volume(std::size_t i) const {
  double v = 1.0;
  for (int j = 0; j < d_; ++j) v *= lengths_[j * n_ + i];
  return v;
}

std::optional<std::size_t> checked_power(std::size_t g, int d, std::size_t cap) {
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    if (g != 0 && total > cap / g) return std::nullopt;
    total *= g;
  }
  if (total > cap) return std::nullopt;
  return total;
}

RegionList uniform_split(int d, int g, std::size_t region_cap) {
  check_dim(d);
  if (g < 1) throw ArgumentError("uniform_split: splits per axis must be >= 1");
  const auto total = checked_power(static_cast<std::size_t>(g), d, region_cap);
  if (!total) {
    const double want = std::pow(static_cast<double>(g), d);
    throw BudgetExceeded(want >= static_cast<double>(std::numeric_limits<std::size_t>::max())
                             ? std::numeric_limits<std::size_t>::max()
                             : static_cast<std::size_t>(want),
                         region_cap);
  }

  RegionList out(d, *total);
  const double side = 1.0 / g;
  std::vector<double> left(d), length(d, side);
  std::vector<int> digit(d, 0);
  for (std::size_t i = 0; i < *total; ++i) {
    for (int j = 0; j < d; ++j) left[j] = digit[j] * side;
    out.set(i, left, length);
    // odometer with axis d-1 varying fastest
    for (int j = d - 1; j >= 0; --j) {
      if (++digit[j] < g) break;
      digit[j] = 0;
    }
  }
  return out;
}

}  // namespace paracube
