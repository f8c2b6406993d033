#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace paracube {

inline constexpr int kMaxDim = 12;
inline constexpr std::size_t kDefaultRegionCap = std::size_t{1} << 26;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public ArgumentError {
 public:
  explicit UnsupportedDimension(int d);
  int dim() const noexcept { return dim_; }

 private:
  int dim_;
};

class IndexOutOfRange : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

class DomainError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::size_t requested, std::size_t cap);
  std::size_t requested() const noexcept { return requested_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

/// Raised when an integrand returns NaN or infinity. Carries the offending
/// point and, when known, the index of the region being evaluated.
class NonFiniteEvaluation : public Error {
 public:
  NonFiniteEvaluation(std::vector<double> point, double value,
                      std::optional<std::size_t> region = std::nullopt);

  const std::vector<double>& point() const noexcept { return point_; }
  double value() const noexcept { return value_; }
  std::optional<std::size_t> region() const noexcept { return region_; }

 private:
  std::vector<double> point_;
  double value_;
  std::optional<std::size_t> region_;
};

/// Throws UnsupportedDimension unless 1 <= d <= kMaxDim.
void check_dim(int d);

// ---------------------------------------------------------------------------
// Points, bounds, integrands
// ---------------------------------------------------------------------------

using Point = std::vector<double>;

struct IntegrationBounds {
  std::vector<double> low;
  std::vector<double> high;

  static IntegrationBounds unit(int d);

  int dim() const noexcept { return static_cast<int>(low.size()); }
  /// Product of (high - low); throws DomainError if any axis is empty.
  double jacobian() const;
  void validate() const;
};

/// A real-valued function of a d-dimensional point. Evaluation must be pure
/// so the engine can call it from many workers at once.
class Integrand {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  Integrand() = default;
  Integrand(int dim, Fn fn);

  int dim() const noexcept { return dim_; }
  double operator()(std::span<const double> x) const { return fn_(x); }
  explicit operator bool() const noexcept { return static_cast<bool>(fn_); }

 private:
  int dim_ = 0;
  Fn fn_;
};

/// Wraps f so it can be integrated over the unit cube: points are mapped
/// affinely into `bounds` and the result is scaled by the bounds' volume.
Integrand on_unit_cube(Integrand f, const IntegrationBounds& bounds);

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

struct Region {
  std::vector<double> left;
  std::vector<double> length;

  static Region unit(int d);

  int dim() const noexcept { return static_cast<int>(left.size()); }
  void validate() const;
};

double region_volume(std::span<const double> length);
double region_volume(const Region& region);

/// Regions stored as two axis-major lists: lefts[j * n + i] is the low
/// boundary of region i on axis j, and lengths follows the same layout.
class RegionList {
 public:
  RegionList() = default;
  RegionList(int d, std::size_t n);

  int dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }

  double left(std::size_t i, int j) const { return lefts_[j * n_ + i]; }
  double length(std::size_t i, int j) const { return lengths_[j * n_ + i]; }
  void set(std::size_t i, std::span<const double> left, std::span<const double> length);

  Region region(std::size_t i) const;
  /// Copies region i into caller-provided buffers of size dim().
  void gather(std::size_t i, std::span<double> left, std::span<double> length) const;
  double volume(std::size_t i) const;

  std::span<const double> lefts() const noexcept { return lefts_; }
  std::span<const double> lengths() const noexcept { return lengths_; }

 private:
  int d_ = 0;
  std::size_t n_ = 0;
  std::vector<double> lefts_;
  std::vector<double> lengths_;
};

struct RegionEstimates {
  std::vector<double> integrals;
  std::vector<double> errors;
  std::vector<int> split_axes;

  std::size_t size() const noexcept { return integrals.size(); }
};

/// g^d congruent cells of side 1/g tiling the unit cube, ordered with axis 0
/// as the most significant index.
RegionList uniform_split(int d, int g, std::size_t region_cap = kDefaultRegionCap);

/// g^d, or nullopt when it exceeds `cap`.
std::optional<std::size_t> checked_power(std::size_t g, int d, std::size_t cap);

}  // namespace paracube
