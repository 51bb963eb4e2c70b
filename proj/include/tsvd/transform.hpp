#ifndef TSVD_TRANSFORM_HPP
#define TSVD_TRANSFORM_HPP

#include <tsvd/tensor.hpp>

#include <unsupported/Eigen/FFT>

#include <cstdint>
#include <random>

namespace tsvd {

// Transform convention: the forward DFT along each tube mode is unnormalized
// and the inverse carries the 1/n factor, so ||fft(A)||_F^2 == rho * ||A||_F^2
// with rho the product of the tube-mode extents.

namespace detail {

// Applies a 1-D transform to every fibre along `mode` (mode >= 2), in place.
template <typename Fn>
void for_each_fiber(ComplexTensor& a, std::size_t mode, Fn&& fn) {
  const auto& dims = a.dims();
  const std::size_t n = dims[mode];
  if (n == 1) {
    return;
  }
  std::size_t stride = 1;
  for (std::size_t m = 0; m < mode; ++m) {
    stride *= dims[m];
  }
  const std::size_t block = stride * n;
  const std::size_t outer = a.size() / block;
  std::vector<Complex> in(n);
  std::vector<Complex> out(n);
  for (std::size_t o = 0; o < outer; ++o) {
    Complex* base = a.data().data() + o * block;
    for (std::size_t inner = 0; inner < stride; ++inner) {
      for (std::size_t k = 0; k < n; ++k) {
        in[k] = base[inner + k * stride];
      }
      fn(out, in);
      for (std::size_t k = 0; k < n; ++k) {
        base[inner + k * stride] = out[k];
      }
    }
  }
}

inline void forward_in_place(ComplexTensor& a) {
  Eigen::FFT<double> fft;
  for (std::size_t mode = 2; mode < a.order(); ++mode) {
    for_each_fiber(a, mode, [&](std::vector<Complex>& out, const std::vector<Complex>& in) {
      fft.fwd(out, in);
    });
  }
}

inline void inverse_in_place(ComplexTensor& a) {
  Eigen::FFT<double> fft; // scales by 1/n on inverse
  for (std::size_t mode = 2; mode < a.order(); ++mode) {
    for_each_fiber(a, mode, [&](std::vector<Complex>& out, const std::vector<Complex>& in) {
      fft.inv(out, in);
    });
  }
}

} // namespace detail

/// Forward DFT along every tube mode (3..N).
inline ComplexTensor fft_mode3(const Tensor& a) {
  ComplexTensor out = to_complex(a);
  detail::forward_in_place(out);
  return out;
}

inline ComplexTensor fft_mode3(const ComplexTensor& a) {
  ComplexTensor out = a;
  detail::forward_in_place(out);
  return out;
}

/// Inverse DFT along every tube mode without discarding the imaginary part.
inline ComplexTensor ifft_mode3_complex(const ComplexTensor& a) {
  ComplexTensor out = a;
  detail::inverse_in_place(out);
  return out;
}

/**
 * Inverse DFT along every tube mode, returning the real part.
 *
 * The input must be the spectrum of a real tensor. A residual imaginary part
 * above 1e-8 * (1 + max|real|) means the conjugate symmetry was broken and
 * raises SymmetryError.
 */
inline Tensor ifft_mode3(const ComplexTensor& a) {
  ComplexTensor full = ifft_mode3_complex(a);
  double max_real = 0.0;
  double max_imag = 0.0;
  for (const auto& z : full.data()) {
    max_real = std::max(max_real, std::abs(z.real()));
    max_imag = std::max(max_imag, std::abs(z.imag()));
  }
  if (max_imag > 1e-8 * (1.0 + max_real)) {
    throw SymmetryError("inverse transform left an imaginary residue of " + std::to_string(max_imag));
  }
  return real_part(full);
}

/**
 * Index of the frontal slice holding the complex conjugate of slice `s` in the
 * spectrum of a real tensor: every tube-mode index j maps to (-j) mod n.
 */
inline std::size_t partner_slice(const Shape& dims, std::size_t s) {
  std::size_t result = 0;
  std::size_t weight = 1;
  for (std::size_t mode = 2; mode < dims.size(); ++mode) {
    const std::size_t n = dims[mode];
    const std::size_t j = s % n;
    s /= n;
    result += ((n - j) % n) * weight;
    weight *= n;
  }
  return result;
}

/// Dense {0,1} indicator of the observed entries.
class Mask {
public:
  Mask() = default;

  /// Mask of the given shape with every entry set to `value`.
  explicit Mask(Shape dims, bool value = false) : bits_(std::move(dims)) {
    std::fill(bits_.data().begin(), bits_.data().end(), static_cast<std::uint8_t>(value));
  }

  explicit Mask(BasicTensor<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_.data()) {
      if (b > 1) {
        throw ContractError("mask entries must be 0 or 1");
      }
    }
  }

  /// Reads a mask stored as a real tensor of 0.0 / 1.0 values.
  static Mask from_tensor(const Tensor& t) {
    BasicTensor<std::uint8_t> bits(t.dims());
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] != 0.0 && t[i] != 1.0) {
        throw ContractError("mask tensor entries must be exactly 0 or 1");
      }
      bits[i] = static_cast<std::uint8_t>(t[i] == 1.0);
    }
    return Mask(std::move(bits));
  }

  /// Independent Bernoulli(rate) draw per entry.
  static Mask bernoulli(const Shape& dims, double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw ContractError("sampling rate must lie in [0, 1]");
    }
    Mask m(dims);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& b : m.bits_.data()) {
      b = static_cast<std::uint8_t>(u(rng) < rate);
    }
    return m;
  }

  const Shape& dims() const noexcept { return bits_.dims(); }
  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = static_cast<std::uint8_t>(v); }
  std::size_t observed() const {
    return static_cast<std::size_t>(std::count(bits_.data().begin(), bits_.data().end(), 1));
  }

  Tensor to_tensor() const {
    Tensor t(dims());
    for (std::size_t i = 0; i < size(); ++i) {
      t[i] = bits_[i];
    }
    return t;
  }

  friend bool operator==(const Mask&, const Mask&) = default;

private:
  BasicTensor<std::uint8_t> bits_;
};

/// The orthogonal projector P_Omega onto tensors supported on the mask.
class SamplingOperator {
public:
  explicit SamplingOperator(Mask mask) : mask_(std::move(mask)) {}

  const Mask& mask() const noexcept { return mask_; }

  template <typename T>
  BasicTensor<T> operator()(BasicTensor<T> x) const {
    if (x.dims() != mask_.dims()) {
      throw DimensionError("sampling mask " + to_string(mask_.dims()) + " vs tensor " +
                           to_string(x.dims()));
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!mask_[i]) {
        x[i] = T{};
      }
    }
    return x;
  }

private:
  Mask mask_;
};

inline Tensor apply_sampling(const SamplingOperator& p, const Tensor& x) { return p(x); }

/// The sampling operator seen from the Fourier domain: fft . P_Omega . ifft.
inline ComplexTensor apply_G(const SamplingOperator& p, const ComplexTensor& x_hat) {
  return fft_mode3(apply_sampling(p, ifft_mode3(x_hat)));
}

} // namespace tsvd

#endif // TSVD_TRANSFORM_HPP
