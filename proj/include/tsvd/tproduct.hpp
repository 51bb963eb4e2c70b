#ifndef TSVD_TPRODUCT_HPP
#define TSVD_TPRODUCT_HPP

#include <tsvd/tensor.hpp>
#include <tsvd/transform.hpp>

namespace tsvd {

/// Circular convolution of two equal-length tubes.
inline Tube tube_mult(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw DimensionError("tube lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " differ");
  }
  const std::size_t n = a.size();
  Tube c(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += a[j] * b[(k + n - j) % n];
    }
    c[k] = acc;
  }
  return c;
}

/// Identity tensor: first frontal slice I_n, every other slice zero.
inline Tensor identity(std::size_t n, std::size_t n3) {
  if (n == 0 || n3 == 0) {
    throw DimensionError("identity extents must be positive");
  }
  Tensor out({n, n, n3});
  out.slice(0).setIdentity();
  return out;
}

/// Order-N identity: the (0, ..., 0) frontal slice is I_n.
inline Tensor identity(std::size_t n, const Shape& tube_dims) {
  Shape dims{n, n};
  dims.insert(dims.end(), tube_dims.begin(), tube_dims.end());
  Tensor out(dims);
  out.slice(0).setIdentity();
  return out;
}

/// Slice-wise product of two spectra (the t-product in the Fourier domain).
inline ComplexTensor spectral_product(const ComplexTensor& a, const ComplexTensor& b) {
  if (a.cols() != b.rows() || !std::equal(a.dims().begin() + 2, a.dims().end(),
                                          b.dims().begin() + 2, b.dims().end())) {
    throw DimensionError("t-product of " + to_string(a.dims()) + " and " + to_string(b.dims()));
  }
  Shape dims = a.dims();
  dims[1] = b.cols();
  ComplexTensor c(dims);
  for (std::size_t s = 0; s < c.slice_count(); ++s) {
    c.slice(s).noalias() = a.slice(s) * b.slice(s);
  }
  return c;
}

/**
 * t-product A * B: a matrix product over tubes where scalar multiplication is
 * circular convolution. Computed slice-wise in the Fourier domain.
 */
inline Tensor t_product(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows() || !std::equal(a.dims().begin() + 2, a.dims().end(),
                                          b.dims().begin() + 2, b.dims().end())) {
    throw DimensionError("t-product of " + to_string(a.dims()) + " and " + to_string(b.dims()));
  }
  return ifft_mode3(spectral_product(fft_mode3(a), fft_mode3(b)));
}

/**
 * Tensor transpose: transpose each frontal slice and reverse the order of
 * slices 2..n3. For order > 3 every tube-mode index is reversed the same way,
 * which is the extension that makes the transpose a slice-wise conjugate
 * transpose in the Fourier domain.
 */
inline Tensor transpose(const Tensor& a) {
  Shape dims = a.dims();
  std::swap(dims[0], dims[1]);
  Tensor out(dims);
  for (std::size_t s = 0; s < a.slice_count(); ++s) {
    out.slice(s) = a.slice(partner_slice(a.dims(), s)).transpose();
  }
  return out;
}

/// Checks Q^T * Q == Q * Q^T == I within tol * ||I||_F.
inline bool is_orthogonal(const Tensor& q, double tol) {
  if (q.rows() != q.cols()) {
    throw DimensionError("orthogonality needs square frontal slices, got " + to_string(q.dims()));
  }
  const Shape tube_dims(q.dims().begin() + 2, q.dims().end());
  const Tensor eye = identity(q.rows(), tube_dims);
  const Tensor qt = transpose(q);
  const double bound = tol * std::sqrt(static_cast<double>(q.rows()));
  return frobenius(t_product(qt, q) - eye) <= bound && frobenius(t_product(q, qt) - eye) <= bound;
}

} // namespace tsvd

#endif // TSVD_TPRODUCT_HPP
