#ifndef TSVD_TSVD_HPP
#define TSVD_TSVD_HPP

#include <tsvd/tensor.hpp>
#include <tsvd/tproduct.hpp>
#include <tsvd/transform.hpp>

#include <Eigen/SVD>

namespace tsvd {

/// Default relative tolerance for numerical ranks.
inline constexpr double kRankTolerance = 1e-8;

/**
 * Factors of M = U * S * V^T.
 *
 * The spectral (Fourier-domain) factors are kept alongside the real ones:
 * slice s of spectral_S is diagonal, real, nonnegative and nonincreasing, and
 * spectral_U / spectral_V hold unitary slices.
 */
struct TSvdFactors {
  Tensor U;
  Tensor S;
  Tensor V;
  ComplexTensor spectral_U;
  ComplexTensor spectral_S;
  ComplexTensor spectral_V;

  std::size_t rank_bound() const { return std::min(S.rows(), S.cols()); }
};

struct MultiRank {
  std::vector<std::size_t> ranks;

  std::size_t l1() const { return std::accumulate(ranks.begin(), ranks.end(), std::size_t{0}); }
  friend bool operator==(const MultiRank&, const MultiRank&) = default;
};

namespace detail {

struct SliceSvd {
  Matrix<Complex> U;
  Eigen::VectorXd sigma;
  Matrix<Complex> V;
};

template <typename Scalar>
SliceSvd full_svd(const Matrix<Scalar>& a, std::size_t slice) {
  const auto m = a.rows();
  const auto n = a.cols();
  if (a.isZero(0.0)) {
    return {Matrix<Complex>::Identity(m, m), Eigen::VectorXd::Zero(std::min(m, n)),
            Matrix<Complex>::Identity(n, n)};
  }
  Eigen::BDCSVD<Matrix<Scalar>> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success || !svd.singularValues().allFinite()) {
    throw NumericalError("slice SVD failed", slice);
  }
  return {svd.matrixU().template cast<Complex>(), svd.singularValues(),
          svd.matrixV().template cast<Complex>()};
}

// A slice that is its own conjugate partner is real; decompose it in real
// arithmetic so its factors stay real.
inline bool self_conjugate(const Shape& dims, std::size_t s) { return partner_slice(dims, s) == s; }

inline Eigen::VectorXd slice_singular_values(const ComplexTensor& hat, std::size_t s) {
  if (self_conjugate(hat.dims(), s)) {
    const Matrix<double> re = hat.slice(s).real();
    Eigen::BDCSVD<Matrix<double>> svd(re);
    if (svd.info() != Eigen::Success) {
      throw NumericalError("slice SVD failed", s);
    }
    return svd.singularValues();
  }
  Eigen::BDCSVD<Matrix<Complex>> svd(Matrix<Complex>(hat.slice(s)));
  if (svd.info() != Eigen::Success) {
    throw NumericalError("slice SVD failed", s);
  }
  return svd.singularValues();
}

// Singular values of every spectral slice; conjugate partners share values.
inline std::vector<Eigen::VectorXd> spectral_singular_values(const ComplexTensor& hat) {
  std::vector<Eigen::VectorXd> out(hat.slice_count());
  for (std::size_t s = 0; s < out.size(); ++s) {
    const std::size_t p = partner_slice(hat.dims(), s);
    out[s] = p < s ? out[p] : slice_singular_values(hat, s);
  }
  return out;
}

} // namespace detail

/**
 * t-SVD by slice-wise SVDs of the spectrum.
 *
 * Only one slice of each conjugate pair is decomposed; its partner receives
 * the conjugated factors, so the inverse transforms are real. All-zero slices
 * get identity U and V.
 */
inline TSvdFactors t_svd(const Tensor& m) {
  require_finite(m, "t_svd input");
  const ComplexTensor hat = fft_mode3(m);
  const std::size_t n1 = m.rows();
  const std::size_t n2 = m.cols();

  Shape u_dims = m.dims();
  u_dims[1] = n1;
  Shape v_dims = m.dims();
  v_dims[0] = n2;
  TSvdFactors f;
  f.spectral_U = ComplexTensor(u_dims);
  f.spectral_S = ComplexTensor(m.dims());
  f.spectral_V = ComplexTensor(v_dims);

  for (std::size_t s = 0; s < hat.slice_count(); ++s) {
    const std::size_t p = partner_slice(m.dims(), s);
    if (p < s) {
      f.spectral_U.slice(s) = f.spectral_U.slice(p).conjugate();
      f.spectral_S.slice(s) = f.spectral_S.slice(p);
      f.spectral_V.slice(s) = f.spectral_V.slice(p).conjugate();
      continue;
    }
    detail::SliceSvd svd = p == s ? detail::full_svd(Matrix<double>(hat.slice(s).real()), s)
                                  : detail::full_svd(Matrix<Complex>(hat.slice(s)), s);
    f.spectral_U.slice(s) = svd.U;
    f.spectral_V.slice(s) = svd.V;
    for (Eigen::Index i = 0; i < svd.sigma.size(); ++i) {
      f.spectral_S.slice(s)(i, i) = svd.sigma(i);
    }
  }

  f.U = ifft_mode3(f.spectral_U);
  f.S = ifft_mode3(f.spectral_S);
  f.V = ifft_mode3(f.spectral_V);
  return f;
}

/// Leading-k spectral reconstruction: sum over i < k of U(:,i,:) * S(i,i,:) * V(:,i,:)^T.
inline ComplexTensor truncated_spectrum(const TSvdFactors& f, std::size_t k) {
  ComplexTensor out(f.S.dims());
  const auto kk = static_cast<Eigen::Index>(k);
  for (std::size_t s = 0; s < out.slice_count(); ++s) {
    const auto sigma = f.spectral_S.slice(s).diagonal().head(kk);
    out.slice(s).noalias() = f.spectral_U.slice(s).leftCols(kk) * sigma.asDiagonal() *
                             f.spectral_V.slice(s).leftCols(kk).adjoint();
  }
  return out;
}

/// Best approximation among t-products with inner extent k.
inline Tensor truncate(const TSvdFactors& f, std::size_t k) {
  if (k < 1 || k > f.rank_bound()) {
    throw ContractError("truncation rank " + std::to_string(k) + " outside [1, " +
                        std::to_string(f.rank_bound()) + "]");
  }
  return ifft_mode3(truncated_spectrum(f, k));
}

/// U * S * V^T.
inline Tensor reconstruct(const TSvdFactors& f) { return ifft_mode3(truncated_spectrum(f, f.rank_bound())); }

/// Per-slice spectral singular values, read from the cached factors.
inline Eigen::VectorXd spectral_sigma(const TSvdFactors& f, std::size_t slice) {
  return f.spectral_S.slice(slice).diagonal().real();
}

/// Energy the truncation at k throws away: (1/rho) * sum of squared discarded spectral values.
inline double discarded_energy(const TSvdFactors& f, std::size_t k) {
  double sum = 0.0;
  for (std::size_t s = 0; s < f.spectral_S.slice_count(); ++s) {
    const Eigen::VectorXd sigma = spectral_sigma(f, s);
    for (Eigen::Index i = static_cast<Eigen::Index>(k); i < sigma.size(); ++i) {
      sum += sigma(i) * sigma(i);
    }
  }
  return sum / static_cast<double>(f.spectral_S.slice_count());
}

/// Numerical rank of each spectral slice, relative to the largest spectral singular value overall.
inline MultiRank multi_rank(const Tensor& m, double tol = kRankTolerance) {
  const auto sigmas = detail::spectral_singular_values(fft_mode3(m));
  double global_max = 0.0;
  for (const auto& s : sigmas) {
    if (s.size() > 0) {
      global_max = std::max(global_max, s.maxCoeff());
    }
  }
  MultiRank r;
  r.ranks.reserve(sigmas.size());
  for (const auto& s : sigmas) {
    r.ranks.push_back(static_cast<std::size_t>((s.array() > tol * global_max).count()));
  }
  return r;
}

/// l2 norm of each singular tube S(i,i,:).
inline std::vector<double> singular_tube_norms(const TSvdFactors& f) {
  std::vector<double> norms(f.rank_bound(), 0.0);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    double sum = 0.0;
    for (std::size_t s = 0; s < f.S.slice_count(); ++s) {
      sum += f.S(i, i, s) * f.S(i, i, s);
    }
    norms[i] = std::sqrt(sum);
  }
  return norms;
}

inline std::size_t tubal_rank(const TSvdFactors& f, double tol = kRankTolerance) {
  const auto norms = singular_tube_norms(f);
  const double top = norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
  return static_cast<std::size_t>(
      std::count_if(norms.begin(), norms.end(), [&](double n) { return n > tol * top; }));
}

/// Number of singular tubes above tol relative to the largest one.
inline std::size_t tubal_rank(const Tensor& m, double tol = kRankTolerance) {
  return tubal_rank(t_svd(m), tol);
}

/// Tensor nuclear norm: sum of singular values over every spectral slice.
inline double tnn(const Tensor& m) {
  double sum = 0.0;
  for (const auto& s : detail::spectral_singular_values(fft_mode3(m))) {
    sum += s.sum();
  }
  return sum;
}

/// Tensor tubal norm: sum of the l2 norms of the singular tubes.
inline double ttn(const TSvdFactors& f) {
  const auto norms = singular_tube_norms(f);
  return std::accumulate(norms.begin(), norms.end(), 0.0);
}

inline double ttn(const Tensor& m) { return ttn(t_svd(m)); }

} // namespace tsvd

#endif // TSVD_TSVD_HPP
