#include "uqbench/hpo/sobol.hpp"

#include "uqbench/errors.hpp"

#include <array>
#include <string>
#include <random>
#include <vector>

namespace uqb::hpo {

namespace {

constexpr int kBits = 32;

struct Primitive {
  int degree;
  std::uint32_t a;
  std::array<std::uint32_t, 6> m;
};

// Dimensions 2..16 of new-joe-kuo-6.21201.
constexpr std::array<Primitive, kSobolMaxDims - 1> kTable{{
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
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
}};

std::array<std::uint32_t, kBits> directions(int dim) {
  std::array<std::uint32_t, kBits> v{};
  if (dim == 0) {
    for (int k = 0; k < kBits; ++k) v[static_cast<std::size_t>(k)] = 1u << (kBits - 1 - k);
    return v;
  }
  const Primitive& p = kTable[static_cast<std::size_t>(dim - 1)];
  const int s = p.degree;
  for (int k = 0; k < s; ++k) {
    v[static_cast<std::size_t>(k)] = p.m[static_cast<std::size_t>(k)] << (kBits - 1 - k);
  }
  for (int k = s; k < kBits; ++k) {
    std::uint32_t value = v[static_cast<std::size_t>(k - s)] ^ (v[static_cast<std::size_t>(k - s)] >> s);
    for (int i = 1; i < s; ++i) {
      if ((p.a >> (s - 1 - i)) & 1u) value ^= v[static_cast<std::size_t>(k - i)];
    }
    v[static_cast<std::size_t>(k)] = value;
  }
  return v;
}

int rightmost_zero(std::uint64_t n) {
  int c = 0;
  while (n & 1u) {
    n >>= 1;
    ++c;
  }
  return c;
}

}  // namespace

Eigen::MatrixXd sobol_points(int n, int dims, std::uint64_t seed, int skip) {
  detail::require(n >= 0, "sobol_points: n must be >= 0");
  detail::require(dims >= 1 && dims <= kSobolMaxDims,
                  "sobol_points: dims must be in [1, " + std::to_string(kSobolMaxDims) + "]");
  detail::require(skip >= 0, "sobol_points: skip must be >= 0");
  std::vector<std::array<std::uint32_t, kBits>> v;
  for (int d = 0; d < dims; ++d) v.push_back(directions(d));
  std::vector<std::uint32_t> shift(static_cast<std::size_t>(dims), 0u);
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    for (auto& s : shift) s = static_cast<std::uint32_t>(rng() >> 32);
  }

  std::vector<std::uint32_t> state(static_cast<std::size_t>(dims), 0u);
  Eigen::MatrixXd out(n, dims);
  const std::uint64_t total = static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(skip);
  for (std::uint64_t i = 0; i < total; ++i) {
    const int c = rightmost_zero(i);
    detail::require(c < kBits, "sobol_points: sequence exhausted");
    for (int d = 0; d < dims; ++d) {
      state[static_cast<std::size_t>(d)] ^= v[static_cast<std::size_t>(d)][static_cast<std::size_t>(c)];
    }
    if (i < static_cast<std::uint64_t>(skip)) continue;
    const auto row = static_cast<Eigen::Index>(i - static_cast<std::uint64_t>(skip));
    for (int d = 0; d < dims; ++d) {
      const std::uint32_t bits = state[static_cast<std::size_t>(d)] ^ shift[static_cast<std::size_t>(d)];
      out(row, d) = static_cast<double>(bits) / 4294967296.0;
    }
  }
  return out;
}

}  // namespace uqb::hpo
