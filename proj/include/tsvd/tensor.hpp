#ifndef TSVD_TENSOR_HPP
#define TSVD_TENSOR_HPP

#include <tsvd/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace tsvd {

using Complex = std::complex<double>;
using Shape = std::vector<std::size_t>;

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

inline std::string to_string(const Shape& dims) {
  std::ostringstream os;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    os << (i ? "x" : "") << dims[i];
  }
  return os.str();
}

inline std::size_t element_count(const Shape& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

/**
 * Dense order-N (N >= 3) array in first-index-fastest order.
 *
 * The first two modes index rows and columns of a frontal slice; every
 * remaining mode is a "tube" mode. Frontal slices are stored contiguously,
 * so slice s is the n1 x n2 column-major block at offset s * n1 * n2, and
 * slices are enumerated with the mode-3 index fastest.
 */
template <typename T>
class BasicTensor {
public:
  using value_type = T;
  using SliceMap = Eigen::Map<Matrix<T>>;
  using ConstSliceMap = Eigen::Map<const Matrix<T>>;

  BasicTensor() = default;

  explicit BasicTensor(Shape dims) : dims_(std::move(dims)) {
    validate_shape(dims_);
    data_.assign(element_count(dims_), T{});
  }

  BasicTensor(Shape dims, std::vector<T> data) : dims_(std::move(dims)), data_(std::move(data)) {
    validate_shape(dims_);
    if (data_.size() != element_count(dims_)) {
      throw DimensionError("tensor of shape " + to_string(dims_) + " needs " +
                           std::to_string(element_count(dims_)) + " values, got " +
                           std::to_string(data_.size()));
    }
  }

  const Shape& dims() const noexcept { return dims_; }
  std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
  std::size_t order() const noexcept { return dims_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t rows() const noexcept { return dims_[0]; }
  std::size_t cols() const noexcept { return dims_[1]; }
  std::size_t slice_size() const noexcept { return dims_[0] * dims_[1]; }
  /// Number of frontal slices: the product of all tube-mode extents.
  std::size_t slice_count() const noexcept { return empty() ? 0 : data_.size() / slice_size(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  T& operator[](std::size_t linear) { return data_[linear]; }
  const T& operator[](std::size_t linear) const { return data_[linear]; }

  T& operator()(std::size_t i, std::size_t j, std::size_t s) {
    return data_[i + dims_[0] * (j + dims_[1] * s)];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t s) const {
    return data_[i + dims_[0] * (j + dims_[1] * s)];
  }

  SliceMap slice(std::size_t s) {
    return SliceMap(data_.data() + s * slice_size(), static_cast<Eigen::Index>(dims_[0]),
                    static_cast<Eigen::Index>(dims_[1]));
  }
  ConstSliceMap slice(std::size_t s) const {
    return ConstSliceMap(data_.data() + s * slice_size(), static_cast<Eigen::Index>(dims_[0]),
                         static_cast<Eigen::Index>(dims_[1]));
  }

  /// Copy of the tube at (i, j): one value per frontal slice.
  std::vector<T> tube(std::size_t i, std::size_t j) const {
    std::vector<T> out(slice_count());
    for (std::size_t s = 0; s < out.size(); ++s) {
      out[s] = (*this)(i, j, s);
    }
    return out;
  }

  void set_tube(std::size_t i, std::size_t j, std::span<const T> values) {
    if (values.size() != slice_count()) {
      throw DimensionError("tube length " + std::to_string(values.size()) + " != " +
                           std::to_string(slice_count()));
    }
    for (std::size_t s = 0; s < values.size(); ++s) {
      (*this)(i, j, s) = values[s];
    }
  }

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

  BasicTensor& operator+=(const BasicTensor& other) {
    require_same_shape(*this, other, "+=");
    std::transform(data_.begin(), data_.end(), other.data_.begin(), data_.begin(), std::plus<>{});
    return *this;
  }
  BasicTensor& operator-=(const BasicTensor& other) {
    require_same_shape(*this, other, "-=");
    std::transform(data_.begin(), data_.end(), other.data_.begin(), data_.begin(), std::minus<>{});
    return *this;
  }
  BasicTensor& operator*=(T scale) {
    for (auto& v : data_) {
      v *= scale;
    }
    return *this;
  }

  friend BasicTensor operator+(BasicTensor a, const BasicTensor& b) { return a += b; }
  friend BasicTensor operator-(BasicTensor a, const BasicTensor& b) { return a -= b; }
  friend BasicTensor operator*(T scale, BasicTensor a) { return a *= scale; }

  template <typename U, typename A>
  static void require_same_shape(const BasicTensor<U>& a, const BasicTensor<A>& b, const char* op) {
    if (a.dims() != b.dims()) {
      throw DimensionError(std::string(op) + ": shape " + to_string(a.dims()) + " vs " +
                           to_string(b.dims()));
    }
  }

private:
  static void validate_shape(const Shape& dims) {
    if (dims.size() < 3) {
      throw DimensionError("tensors must have order >= 3, got order " + std::to_string(dims.size()));
    }
    for (auto d : dims) {
      if (d == 0) {
        throw DimensionError("zero extent in shape " + to_string(dims));
      }
    }
  }

  Shape dims_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<double>;
using ComplexTensor = BasicTensor<Complex>;
using Tube = std::vector<double>;

template <typename T>
double frobenius(const BasicTensor<T>& a) {
  double sum = 0.0;
  for (const auto& v : a.data()) {
    sum += std::norm(v);
  }
  return std::sqrt(sum);
}

/// Throws ContractError when any entry is NaN or infinite.
inline void require_finite(const Tensor& a, const char* what = "tensor") {
  for (double v : a.data()) {
    if (!std::isfinite(v)) {
      throw ContractError(std::string(what) + " contains a non-finite value");
    }
  }
}

inline Tensor real_part(const ComplexTensor& a) {
  Tensor out(a.dims());
  std::transform(a.data().begin(), a.data().end(), out.data().begin(),
                 [](const Complex& z) { return z.real(); });
  return out;
}

inline ComplexTensor to_complex(const Tensor& a) {
  ComplexTensor out(a.dims());
  std::copy(a.data().begin(), a.data().end(), out.data().begin());
  return out;
}

/// Largest absolute entrywise difference; shapes must agree.
template <typename T>
double max_abs_diff(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  BasicTensor<T>::require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

/// ||a - b||_F / ||b||_F, or the absolute error when b is zero.
template <typename T>
double relative_error(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  const double ref = frobenius(b);
  const double err = frobenius(a - b);
  return ref > 0.0 ? err / ref : err;
}

} // namespace tsvd

#endif // TSVD_TENSOR_HPP
