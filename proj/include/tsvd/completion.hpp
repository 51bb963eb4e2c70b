#ifndef TSVD_COMPLETION_HPP
#define TSVD_COMPLETION_HPP

#include <tsvd/tensor.hpp>
#include <tsvd/tproduct.hpp>
#include <tsvd/transform.hpp>
#include <tsvd/tsvd.hpp>

#include <limits>
#include <optional>

namespace tsvd {

/**
 * Singular value thresholding: U diag((sigma_i - tau)_+) V^H, the proximal
 * map of tau * ||.||_* at W.
 */
template <typename Scalar>
Matrix<Scalar> svt(const Matrix<Scalar>& w, double tau, double* nuclear_out = nullptr) {
  if (!(tau >= 0.0)) {
    throw ContractError("svt threshold must be nonnegative");
  }
  if (w.size() == 0) {
    return w;
  }
  Eigen::BDCSVD<Matrix<Scalar>> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success || !svd.singularValues().allFinite()) {
    throw NumericalError("svt: SVD failed", 0);
  }
  const Eigen::VectorXd shrunk = (svd.singularValues().array() - tau).max(0.0).matrix();
  if (nuclear_out) {
    *nuclear_out = shrunk.sum();
  }
  const Eigen::Index keep = (shrunk.array() > 0.0).count();
  if (keep == 0) {
    return Matrix<Scalar>::Zero(w.rows(), w.cols());
  }
  return svd.matrixU().leftCols(keep) * shrunk.head(keep).asDiagonal() *
         svd.matrixV().leftCols(keep).adjoint();
}

namespace detail {

// Slice-wise SVT over a conjugate-symmetric spectrum, in place. Returns the
// nuclear norm of the result summed over all slices.
inline double shrink_in_place(ComplexTensor& w_hat, double tau) {
  double nuclear = 0.0;
  for (std::size_t s = 0; s < w_hat.slice_count(); ++s) {
    const std::size_t p = partner_slice(w_hat.dims(), s);
    if (p < s) {
      continue;
    }
    double slice_nuclear = 0.0;
    if (p == s) {
      const Matrix<double> re = w_hat.slice(s).real();
      w_hat.slice(s) = svt(re, tau, &slice_nuclear).cast<Complex>();
      nuclear += slice_nuclear;
    } else {
      w_hat.slice(s) = svt(Matrix<Complex>(w_hat.slice(s)), tau, &slice_nuclear);
      w_hat.slice(p) = w_hat.slice(s).conjugate();
      nuclear += 2.0 * slice_nuclear;
    }
  }
  return nuclear;
}

} // namespace detail

/**
 * SVT with threshold tau on every frontal slice of a spectrum. The input is
 * taken to be the spectrum of a real tensor; each conjugate pair is shrunk
 * once and mirrored.
 */
inline ComplexTensor shrink_step(const ComplexTensor& w_hat, double tau) {
  if (!(tau >= 0.0)) {
    throw ContractError("shrink threshold must be nonnegative");
  }
  ComplexTensor out = w_hat;
  detail::shrink_in_place(out, tau);
  return out;
}

/**
 * The same shrinkage carried out in the original domain: with W = U * S * V^T,
 * each singular tube S(i,i,:) is circularly convolved with the gain tube whose
 * spectrum is (1 - tau / S_hat(i,i,j))_+, and the result is U * (S * T) * V^T.
 */
inline Tensor tubal_shrink(const Tensor& w, double tau) {
  if (!(tau >= 0.0)) {
    throw ContractError("shrink threshold must be nonnegative");
  }
  const TSvdFactors f = t_svd(w);
  const std::size_t r = f.rank_bound();

  ComplexTensor gain_hat(f.S.dims());
  for (std::size_t s = 0; s < gain_hat.slice_count(); ++s) {
    for (std::size_t i = 0; i < r; ++i) {
      const double sigma = f.spectral_S(i, i, s).real();
      gain_hat(i, i, s) = sigma > 0.0 ? std::max(0.0, 1.0 - tau / sigma) : 0.0;
    }
  }
  const Tensor gain = ifft_mode3(gain_hat);

  Tensor shrunk(f.S.dims());
  if (f.S.order() == 3) {
    for (std::size_t i = 0; i < r; ++i) {
      const Tube s_tube = f.S.tube(i, i);
      const Tube g_tube = gain.tube(i, i);
      shrunk.set_tube(i, i, std::span<const double>(tube_mult(s_tube, g_tube)));
    }
  } else {
    // Multi-mode tubes: the f-diagonal t-product is the mode-wise circular convolution.
    Shape square = f.S.dims();
    square[0] = square[1];
    Tensor gain_sq(square);
    for (std::size_t i = 0; i < r; ++i) {
      gain_sq.set_tube(i, i, std::span<const double>(gain.tube(i, i)));
    }
    shrunk = t_product(f.S, gain_sq);
  }
  return t_product(t_product(f.U, shrunk), transpose(f.V));
}

/**
 * Least-squares projection onto {X : P_Omega(X) = Y}: Y on the mask, W off it.
 * Y must vanish off the mask.
 */
inline Tensor project_constraint(const SamplingOperator& p, const Tensor& y, const Tensor& w) {
  const Mask& mask = p.mask();
  if (y.dims() != mask.dims() || w.dims() != mask.dims()) {
    throw DimensionError("project_constraint: mask " + to_string(mask.dims()) + ", Y " +
                         to_string(y.dims()) + ", W " + to_string(w.dims()));
  }
  Tensor x = w;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mask[i]) {
      x[i] = y[i];
    } else if (y[i] != 0.0) {
      throw ContractError("observed data is nonzero outside the mask");
    }
  }
  return x;
}

/// RSE in dB: 20 log10(||rec - ref||_F / ||ref||_F). An exact match gives -infinity.
inline double rse_db(const Tensor& rec, const Tensor& ref) {
  Tensor::require_same_shape(rec, ref, "rse_db");
  const double ref_norm = frobenius(ref);
  if (ref_norm == 0.0) {
    throw UndefinedMetricError("RSE is undefined against a zero reference tensor");
  }
  return 20.0 * std::log10(frobenius(rec - ref) / ref_norm);
}

struct AdmmConfig {
  /// Penalty; the slice shrink threshold is 1 / rho.
  double rho = 1.0;
  std::size_t max_iter = 1000;
  /// Stop once ||X - Z||_F / max(1, ||X||_F) falls to this level...
  double tol_primal = 1e-7;
  /// ...and the low-rank iterate Z fits the observations to this relative level.
  double tol_fit = 1e-6;
  /// Clamp unobserved entries of X at zero after every X-update.
  bool positivity = false;
};

struct SolveReport {
  std::size_t iterations = 0;
  std::vector<double> primal_residuals;
  std::vector<double> fit_residuals;
  std::vector<double> tnn_values;
  std::optional<double> final_rse_db;
  bool converged = false;

  friend bool operator==(const SolveReport&, const SolveReport&) = default;
};

struct CompletionResult {
  Tensor X;
  SolveReport report;
};

/**
 * TNN-penalized completion of Y from the entries selected by the mask.
 *
 * ADMM with X^0 = Z^0 = Y and Q^0 = 0:
 *   X <- projection of Z - Q onto the constraint,
 *   Z <- slice-wise SVT of fft(X + Q) with tau = 1/rho, transformed back,
 *   Q <- Q + X - Z.
 * The returned X agrees with Y on every observed entry.
 */
inline CompletionResult complete(const Tensor& y, const Mask& mask, const AdmmConfig& cfg,
                                 const Tensor* truth = nullptr) {
  if (!(cfg.rho > 0.0) || !(cfg.tol_primal > 0.0) || !(cfg.tol_fit > 0.0) || cfg.max_iter == 0) {
    throw ContractError("ADMM config needs rho > 0, positive tolerances and max_iter >= 1");
  }
  if (y.dims() != mask.dims()) {
    throw DimensionError("data " + to_string(y.dims()) + " vs mask " + to_string(mask.dims()));
  }
  require_finite(y, "observed data");
  const SamplingOperator p(mask);
  if (apply_sampling(p, y) != y) {
    throw ContractError("observed data is nonzero outside the mask");
  }

  CompletionResult result{y, {}};
  SolveReport& report = result.report;
  const double tau = 1.0 / cfg.rho;
  const double y_norm = frobenius(y);

  if (mask.observed() == mask.size()) {
    // Every entry is pinned by the constraint.
    report.iterations = 1;
    report.primal_residuals.push_back(0.0);
    report.fit_residuals.push_back(0.0);
    report.tnn_values.push_back(tnn(y));
    report.converged = true;
  } else {
    Tensor x = y;
    Tensor z = y;
    Tensor q(y.dims());
    for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
      x = project_constraint(p, y, z - q);
      if (cfg.positivity) {
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (!mask[i] && x[i] < 0.0) {
            x[i] = 0.0;
          }
        }
      }

      ComplexTensor w_hat = fft_mode3(x + q);
      const double nuclear = detail::shrink_in_place(w_hat, tau);
      z = ifft_mode3(w_hat);
      q += x - z;

      const double x_norm = frobenius(x);
      const double primal = frobenius(x - z) / std::max(1.0, x_norm);
      const double fit = frobenius(apply_sampling(p, z) - y) / std::max(1.0, y_norm);
      if (!std::isfinite(primal) || !std::isfinite(fit) || !std::isfinite(nuclear)) {
        throw DivergenceError(it);
      }
      report.iterations = it;
      report.primal_residuals.push_back(primal);
      report.fit_residuals.push_back(fit);
      report.tnn_values.push_back(nuclear);
      if (primal <= cfg.tol_primal && fit <= cfg.tol_fit) {
        report.converged = true;
        break;
      }
    }
    result.X = std::move(x);
  }

  if (truth != nullptr) {
    report.final_rse_db = rse_db(result.X, *truth);
  }
  return result;
}

} // namespace tsvd

#endif // TSVD_COMPLETION_HPP
