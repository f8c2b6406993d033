#include "paracube/sobol.hpp"

#include <bit>

#include "paracube/core.hpp"

namespace paracube {

namespace {

struct Direction {
  int degree;
  std::uint32_t poly;  // interior coefficients a
  std::array<std::uint32_t, 5> m;
};

// Joe & Kuo (2008) primitive polynomials and initial direction numbers for
// dimensions 2..12; dimension 1 is the van der Corput sequence.
constexpr std::array<Direction, 11> kDirections = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
}};

}  // namespace

SobolSequence::SobolSequence(int dim, std::span<const std::uint32_t> shift) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw UnsupportedDimension(dim);
  for (int b = 0; b < kBits; ++b) v_[0][b] = std::uint32_t{1} << (kBits - 1 - b);
  for (int j = 1; j < dim; ++j) {
    const Direction& dir = kDirections[j - 1];
    const int s = dir.degree;
    auto& v = v_[j];
    for (int b = 0; b < s && b < kBits; ++b) v[b] = dir.m[b] << (kBits - 1 - b);
    for (int b = s; b < kBits; ++b) {
      std::uint32_t x = v[b - s] ^ (v[b - s] >> s);
      for (int k = 1; k < s; ++k)
        if ((dir.poly >> (s - 1 - k)) & 1u) x ^= v[b - k];
      v[b] = x;
    }
  }
  for (int j = 0; j < dim && j < static_cast<int>(shift.size()); ++j) shift_[j] = shift[j];
  seek(0);
}

void SobolSequence::seek(std::uint32_t index) {
  index_ = index;
  const std::uint32_t gray = index ^ (index >> 1);
  for (int j = 0; j < dim_; ++j) {
    std::uint32_t s = 0;
    for (int b = 0; b < kBits; ++b)
      if ((gray >> b) & 1u) s ^= v_[j][b];
    state_[j] = s;
  }
}

void SobolSequence::next(std::span<double> x) {
  constexpr double kScale = 1.0 / 4294967296.0;
  for (int j = 0; j < dim_; ++j) x[j] = static_cast<double>(state_[j] ^ shift_[j]) * kScale;
  const int c = std::countr_one(index_);
  ++index_;
  if (c < kBits)
    for (int j = 0; j < dim_; ++j) state_[j] ^= v_[j][c];
}

}  // namespace paracube
