#ifndef TSVD_COMPRESSION_HPP
#define TSVD_COMPRESSION_HPP

#include <tsvd/completion.hpp>
#include <tsvd/tensor.hpp>
#include <tsvd/tproduct.hpp>
#include <tsvd/tsvd.hpp>

#include <optional>
#include <string_view>

namespace tsvd {

enum class Method : std::uint8_t {
  svd = 0,        ///< rank-k1 SVD of the (n1 n2) x n3 unfolding
  tsvd = 1,       ///< k2 largest spectral singular values, chosen across all slices
  tsvd_tubal = 2, ///< first k3 singular tubes
};

inline std::string_view to_string(Method m) {
  switch (m) {
  case Method::svd:
    return "svd";
  case Method::tsvd:
    return "tsvd";
  case Method::tsvd_tubal:
    return "tsvd-tubal";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
  if (name == "svd") {
    return Method::svd;
  }
  if (name == "tsvd") {
    return Method::tsvd;
  }
  if (name == "tsvd-tubal" || name == "tsvd_tubal") {
    return Method::tsvd_tubal;
  }
  return std::nullopt;
}

namespace detail {

inline void require_order3(const Shape& dims) {
  if (dims.size() != 3) {
    throw DimensionError("compression accepts order-3 tensors only, got " + to_string(dims));
  }
}

} // namespace detail

/// Largest admissible truncation parameter for the method.
inline std::size_t max_k(Method method, const Shape& dims) {
  detail::require_order3(dims);
  const std::size_t n0 = std::min(dims[0], dims[1]);
  switch (method) {
  case Method::svd:
    return std::min(dims[0] * dims[1], dims[2]);
  case Method::tsvd:
    return n0 * dims[2];
  case Method::tsvd_tubal:
    return n0;
  }
  return 0;
}

/// Number of stored scalars the method needs at parameter k.
inline double stored_scalars(Method method, const Shape& dims, std::size_t k) {
  detail::require_order3(dims);
  const double n1 = static_cast<double>(dims[0]);
  const double n2 = static_cast<double>(dims[1]);
  const double n3 = static_cast<double>(dims[2]);
  const double kk = static_cast<double>(k);
  switch (method) {
  case Method::svd:
    return kk * (n1 * n2 + n3 + 1.0);
  case Method::tsvd:
    return kk * (n1 + n2 + 1.0);
  case Method::tsvd_tubal:
    return kk * (n1 + n2 + 1.0) * n3;
  }
  return 0.0;
}

/**
 * Closed-form compression ratio:
 *   svd:        n1 n2 n3 / (k1 (n1 n2 + n3 + 1))
 *   tsvd:       n1 n2 n3 / (k2 (n1 + n2 + 1))
 *   tsvd-tubal: n1 n2    / (k3 (n1 + n2 + 1))
 */
inline double compression_ratio(Method method, const Shape& dims, std::size_t k) {
  detail::require_order3(dims);
  const double n1 = static_cast<double>(dims[0]);
  const double n2 = static_cast<double>(dims[1]);
  const double n3 = static_cast<double>(dims[2]);
  const double kk = static_cast<double>(k);
  switch (method) {
  case Method::svd:
    return n1 * n2 * n3 / (kk * (n1 * n2 + n3 + 1.0));
  case Method::tsvd:
    return n1 * n2 * n3 / (kk * (n1 + n2 + 1.0));
  case Method::tsvd_tubal:
    return n1 * n2 / (kk * (n1 + n2 + 1.0));
  }
  return 0.0;
}

/// Largest k whose ratio still reaches target_ratio. A target of 1 asks for no compression and gives max_k.
inline std::size_t k_for_ratio(Method method, const Shape& dims, double target_ratio) {
  if (!(target_ratio >= 1.0)) {
    throw ContractError("target compression ratio must be >= 1");
  }
  if (target_ratio == 1.0) {
    return max_k(method, dims);
  }
  for (std::size_t k = max_k(method, dims); k >= 1; --k) {
    if (compression_ratio(method, dims, k) >= target_ratio) {
      return k;
    }
  }
  throw InfeasibleError("no " + std::string(to_string(method)) + " truncation of " + to_string(dims) +
                        " reaches ratio " + std::to_string(target_ratio) + " (best " +
                        std::to_string(compression_ratio(method, dims, 1)) + ")");
}

/// One retained spectral singular triple (slice, index) of the tsvd method.
struct SpectralRecord {
  std::size_t slice = 0;
  std::size_t index = 0;
  double sigma = 0.0;
  std::vector<Complex> u;
  std::vector<Complex> v;

  friend bool operator==(const SpectralRecord&, const SpectralRecord&) = default;
};

/**
 * Retained factors of a compressed tensor.
 *
 * svd:        `coefficients` = U_k (n1 n2 x k, column-major), sigma (k), V_k (n3 x k).
 * tsvd-tubal: `coefficients` = U(:, 0:k, :) (n1 x k x n3), S(i,i,:) for i < k
 *             (k x n3, index fastest), V(:, 0:k, :) (n2 x k x n3).
 * tsvd:       one `records` entry per selected spectral value. The conjugate
 *             partner of a record is implied by symmetry and never stored.
 */
struct CompressedForm {
  Method method = Method::svd;
  Shape dims;
  std::size_t k = 0;
  std::vector<double> coefficients;
  std::vector<SpectralRecord> records;

  /// Stored scalars, a complex entry counting as one.
  std::size_t scalar_count() const {
    std::size_t n = coefficients.size();
    for (const auto& r : records) {
      n += r.u.size() + r.v.size() + 1;
    }
    return n;
  }

  /// Stored real numbers; complex entries off the self-conjugate slices count twice.
  std::size_t real_scalar_count() const {
    std::size_t n = coefficients.size();
    for (const auto& r : records) {
      const bool real = partner_slice(dims, r.slice) == r.slice;
      n += (real ? 1 : 2) * (r.u.size() + r.v.size()) + 1;
    }
    return n;
  }

  friend bool operator==(const CompressedForm&, const CompressedForm&) = default;
};

struct CompressionResult {
  Method method = Method::svd;
  std::size_t k = 0;
  /// Closed-form ratio for (dims, k).
  double ratio = 0.0;
  /// Element count over real numbers actually stored in `form`.
  double achieved_ratio = 0.0;
  double rse_db = 0.0;
  Tensor reconstruction;
  CompressedForm form;
};

/// Rebuilds the approximation from its retained factors.
inline Tensor decode(const CompressedForm& form) {
  detail::require_order3(form.dims);
  const std::size_t n1 = form.dims[0];
  const std::size_t n2 = form.dims[1];
  const std::size_t n3 = form.dims[2];
  const std::size_t k = form.k;
  if (form.scalar_count() != static_cast<std::size_t>(stored_scalars(form.method, form.dims, k))) {
    throw FormatError("compressed form holds " + std::to_string(form.scalar_count()) +
                      " scalars, expected " +
                      std::to_string(stored_scalars(form.method, form.dims, k)));
  }
  const auto& c = form.coefficients;

  switch (form.method) {
  case Method::svd: {
    const auto rows = static_cast<Eigen::Index>(n1 * n2);
    const auto kk = static_cast<Eigen::Index>(k);
    Eigen::Map<const Matrix<double>> u(c.data(), rows, kk);
    Eigen::Map<const Eigen::VectorXd> sigma(c.data() + rows * kk, kk);
    Eigen::Map<const Matrix<double>> v(c.data() + rows * kk + kk, static_cast<Eigen::Index>(n3), kk);
    Tensor out(form.dims);
    Eigen::Map<Matrix<double>>(out.data().data(), rows, static_cast<Eigen::Index>(n3)) =
        u * sigma.asDiagonal() * v.transpose();
    return out;
  }
  case Method::tsvd_tubal: {
    auto next = c.begin();
    Tensor u({n1, k, n3}, std::vector<double>(next, next + static_cast<std::ptrdiff_t>(n1 * k * n3)));
    next += static_cast<std::ptrdiff_t>(n1 * k * n3);
    Tensor s({k, k, n3});
    for (std::size_t j = 0; j < n3; ++j) {
      for (std::size_t i = 0; i < k; ++i) {
        s(i, i, j) = *next++;
      }
    }
    Tensor v({n2, k, n3}, std::vector<double>(next, c.end()));
    return t_product(t_product(u, s), transpose(v));
  }
  case Method::tsvd: {
    ComplexTensor hat(form.dims);
    std::vector<std::vector<bool>> stored(n3, std::vector<bool>(std::min(n1, n2), false));
    for (const auto& r : form.records) {
      stored.at(r.slice).at(r.index) = true;
    }
    auto add = [&](std::size_t slice, const SpectralRecord& r, bool conj) {
      Eigen::Map<const Eigen::VectorXcd> u(r.u.data(), static_cast<Eigen::Index>(n1));
      Eigen::Map<const Eigen::VectorXcd> v(r.v.data(), static_cast<Eigen::Index>(n2));
      if (conj) {
        hat.slice(slice) += r.sigma * u.conjugate() * v.transpose();
      } else {
        hat.slice(slice) += r.sigma * u * v.adjoint();
      }
    };
    for (const auto& r : form.records) {
      add(r.slice, r, false);
      const std::size_t p = partner_slice(form.dims, r.slice);
      if (p != r.slice && !stored[p][r.index]) {
        add(p, r, true);
      }
    }
    return ifft_mode3(hat);
  }
  }
  throw FormatError("unknown compression method");
}

namespace detail {

inline void require_k(Method method, const Shape& dims, std::size_t k) {
  const std::size_t top = max_k(method, dims);
  if (k < 1 || k > top) {
    throw ContractError(std::string(to_string(method)) + ": k = " + std::to_string(k) +
                        " outside [1, " + std::to_string(top) + "]");
  }
}

// Keeping every factor reproduces the input, so full retention returns it unchanged.
inline CompressionResult finish(const Tensor& m, Tensor reconstruction, CompressedForm form) {
  if (form.k == max_k(form.method, m.dims())) {
    reconstruction = m;
  }
  CompressionResult r;
  r.method = form.method;
  r.k = form.k;
  r.ratio = compression_ratio(form.method, m.dims(), form.k);
  r.achieved_ratio = static_cast<double>(m.size()) / static_cast<double>(form.real_scalar_count());
  r.rse_db = rse_db(reconstruction, m);
  r.reconstruction = std::move(reconstruction);
  r.form = std::move(form);
  return r;
}

} // namespace detail

/// Rank-k1 truncated SVD of the unfolding whose columns are the vectorized frontal slices.
inline CompressionResult compress_svd(const Tensor& m, std::size_t k1) {
  detail::require_order3(m.dims());
  detail::require_k(Method::svd, m.dims(), k1);
  require_finite(m, "compression input");
  const auto rows = static_cast<Eigen::Index>(m.slice_size());
  const auto cols = static_cast<Eigen::Index>(m.dim(2));
  const auto kk = static_cast<Eigen::Index>(k1);
  Eigen::Map<const Matrix<double>> unfolded(m.data().data(), rows, cols);
  Eigen::BDCSVD<Matrix<double>> svd(unfolded, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("unfolding SVD failed", 0);
  }

  CompressedForm form{Method::svd, m.dims(), k1, {}, {}};
  form.coefficients.reserve(static_cast<std::size_t>(stored_scalars(Method::svd, m.dims(), k1)));
  const Matrix<double> u = svd.matrixU().leftCols(kk);
  const Eigen::VectorXd sigma = svd.singularValues().head(kk);
  const Matrix<double> v = svd.matrixV().leftCols(kk);
  form.coefficients.insert(form.coefficients.end(), u.data(), u.data() + u.size());
  form.coefficients.insert(form.coefficients.end(), sigma.data(), sigma.data() + sigma.size());
  form.coefficients.insert(form.coefficients.end(), v.data(), v.data() + v.size());

  Tensor rec(m.dims());
  Eigen::Map<Matrix<double>>(rec.data().data(), rows, cols) = u * sigma.asDiagonal() * v.transpose();
  return detail::finish(m, std::move(rec), std::move(form));
}

/// Spectral entries ordered for selection: magnitude descending, then (slice, index) ascending.
inline std::vector<std::pair<std::size_t, std::size_t>> spectral_order(const TSvdFactors& f) {
  const std::size_t n0 = f.rank_bound();
  const std::size_t n3 = f.spectral_S.slice_count();
  std::vector<std::pair<std::size_t, std::size_t>> order;
  order.reserve(n0 * n3);
  for (std::size_t s = 0; s < n3; ++s) {
    for (std::size_t i = 0; i < n0; ++i) {
      order.emplace_back(s, i);
    }
  }
  auto sigma = [&](const std::pair<std::size_t, std::size_t>& e) {
    return f.spectral_S(e.second, e.second, e.first).real();
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](const auto& a, const auto& b) { return sigma(a) > sigma(b); });
  return order;
}

/**
 * Keeps the k2 largest spectral singular values across all slices.
 *
 * A selected value whose conjugate partner fell outside the top k2 still
 * brings the partner along (it is the conjugate of the stored triple and costs
 * nothing to store), so the approximation stays real and the kept set grows
 * monotonically with k2.
 */
inline CompressionResult compress_tsvd(const Tensor& m, std::size_t k2) {
  detail::require_order3(m.dims());
  detail::require_k(Method::tsvd, m.dims(), k2);
  const TSvdFactors f = t_svd(m);
  const auto order = spectral_order(f);
  const std::size_t n1 = m.rows();
  const std::size_t n2 = m.cols();

  CompressedForm form{Method::tsvd, m.dims(), k2, {}, {}};
  form.records.reserve(k2);
  for (std::size_t e = 0; e < k2; ++e) {
    const auto [s, i] = order[e];
    SpectralRecord r;
    r.slice = s;
    r.index = i;
    r.sigma = f.spectral_S(i, i, s).real();
    const auto u = f.spectral_U.slice(s).col(static_cast<Eigen::Index>(i));
    const auto v = f.spectral_V.slice(s).col(static_cast<Eigen::Index>(i));
    r.u.assign(u.data(), u.data() + n1);
    r.v.assign(v.data(), v.data() + n2);
    form.records.push_back(std::move(r));
  }

  // Zero every spectral triple outside the kept set, then transform back.
  std::vector<std::vector<bool>> kept(f.spectral_S.slice_count(), std::vector<bool>(f.rank_bound(), false));
  for (const auto& r : form.records) {
    kept[r.slice][r.index] = true;
    kept[partner_slice(m.dims(), r.slice)][r.index] = true;
  }
  ComplexTensor hat(m.dims());
  for (std::size_t s = 0; s < hat.slice_count(); ++s) {
    Eigen::VectorXcd sigma = f.spectral_S.slice(s).diagonal();
    for (std::size_t i = 0; i < kept[s].size(); ++i) {
      if (!kept[s][i]) {
        sigma(static_cast<Eigen::Index>(i)) = 0.0;
      }
    }
    const auto r = static_cast<Eigen::Index>(f.rank_bound());
    hat.slice(s).noalias() = f.spectral_U.slice(s).leftCols(r) * sigma.asDiagonal() *
                             f.spectral_V.slice(s).leftCols(r).adjoint();
  }
  return detail::finish(m, ifft_mode3(hat), std::move(form));
}

/// First k3 singular tubes; identical to truncate(t_svd(m), k3).
inline CompressionResult compress_tsvd_tubal(const Tensor& m, std::size_t k3) {
  detail::require_order3(m.dims());
  detail::require_k(Method::tsvd_tubal, m.dims(), k3);
  const TSvdFactors f = t_svd(m);
  const std::size_t n1 = m.rows();
  const std::size_t n2 = m.cols();
  const std::size_t n3 = m.dim(2);

  CompressedForm form{Method::tsvd_tubal, m.dims(), k3, {}, {}};
  auto& c = form.coefficients;
  c.reserve(static_cast<std::size_t>(stored_scalars(Method::tsvd_tubal, m.dims(), k3)));
  for (std::size_t s = 0; s < n3; ++s) {
    for (std::size_t j = 0; j < k3; ++j) {
      for (std::size_t i = 0; i < n1; ++i) {
        c.push_back(f.U(i, j, s));
      }
    }
  }
  for (std::size_t s = 0; s < n3; ++s) {
    for (std::size_t i = 0; i < k3; ++i) {
      c.push_back(f.S(i, i, s));
    }
  }
  for (std::size_t s = 0; s < n3; ++s) {
    for (std::size_t j = 0; j < k3; ++j) {
      for (std::size_t i = 0; i < n2; ++i) {
        c.push_back(f.V(i, j, s));
      }
    }
  }
  return detail::finish(m, truncate(f, k3), std::move(form));
}

inline CompressionResult compress(Method method, const Tensor& m, std::size_t k) {
  switch (method) {
  case Method::svd:
    return compress_svd(m, k);
  case Method::tsvd:
    return compress_tsvd(m, k);
  case Method::tsvd_tubal:
    return compress_tsvd_tubal(m, k);
  }
  throw ContractError("unknown compression method");
}

} // namespace tsvd

#endif // TSVD_COMPRESSION_HPP
