#ifndef TSVD_SYNTHETIC_HPP
#define TSVD_SYNTHETIC_HPP

#include <tsvd/tensor.hpp>
#include <tsvd/tproduct.hpp>

#include <cstdint>
#include <random>

namespace tsvd {

/// Tensor with independent standard-normal entries.
inline Tensor gaussian_tensor(const Shape& dims, std::mt19937_64& rng) {
  Tensor t(dims);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : t.data()) {
    v = normal(rng);
  }
  return t;
}

/**
 * X * Y with X of shape n1 x r x ... and Y of shape r x n2 x ..., both with
 * standard-normal entries drawn from a generator seeded with `seed`. Generic
 * draws have tubal rank exactly r. r == 0 yields the zero tensor.
 */
inline Tensor low_tubal_rank(const Shape& dims, std::size_t r, std::uint64_t seed) {
  Tensor probe(dims); // validates the shape
  if (r > std::min(dims[0], dims[1])) {
    throw InfeasibleError("tubal rank " + std::to_string(r) + " exceeds min(n1, n2) for " +
                          to_string(dims));
  }
  if (r == 0) {
    return probe;
  }
  std::mt19937_64 rng(seed);
  Shape left = dims;
  left[1] = r;
  Shape right = dims;
  right[0] = r;
  const Tensor x = gaussian_tensor(left, rng);
  const Tensor y = gaussian_tensor(right, rng);
  return t_product(x, y);
}

} // namespace tsvd

#endif // TSVD_SYNTHETIC_HPP
