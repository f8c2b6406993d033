#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace paracube {

/// Sobol digital sequence in up to 12 dimensions (Joe-Kuo direction
/// numbers), generated in Gray-code order, with an optional digital shift.
class SobolSequence {
 public:
  static constexpr int kMaxDim = 12;
  static constexpr int kBits = 32;

  SobolSequence(int dim, std::span<const std::uint32_t> shift = {});

  int dim() const noexcept { return dim_; }
  /// Writes the next point into x (size dim()). The first point is the
  /// shifted origin.
  void next(std::span<double> x);
  /// Restart at point `index` (Gray-code position).
  void seek(std::uint32_t index);

 private:
  int dim_;
  std::uint32_t index_ = 0;
  std::array<std::array<std::uint32_t, kBits>, kMaxDim> v_{};
  std::array<std::uint32_t, kMaxDim> state_{};
  std::array<std::uint32_t, kMaxDim> shift_{};
};

}  // namespace paracube
