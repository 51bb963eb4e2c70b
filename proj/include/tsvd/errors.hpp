#ifndef TSVD_ERRORS_HPP
#define TSVD_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsvd {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand extents are incompatible with the requested operation.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A caller-side precondition was violated (bad k, nonzero data off the mask, ...).
class ContractError : public Error {
public:
  using Error::Error;
};

/// Malformed input file or stream.
class FormatError : public Error {
public:
  using Error::Error;
};

/// A requested ratio or rank cannot be met by any admissible parameter.
class InfeasibleError : public Error {
public:
  using Error::Error;
};

/// Metric is undefined for the given reference (e.g. RSE against a zero tensor).
class UndefinedMetricError : public Error {
public:
  using Error::Error;
};

/// A spectral tensor whose inverse transform is not real to working precision.
class SymmetryError : public Error {
public:
  using Error::Error;
};

/// Slice SVD failure.
class NumericalError : public Error {
public:
  NumericalError(const std::string& what, std::size_t slice)
      : Error(what + " (slice " + std::to_string(slice) + ")"), slice_(slice) {}

  std::size_t slice() const noexcept { return slice_; }

private:
  std::size_t slice_;
};

/// An ADMM iterate stopped being finite.
class DivergenceError : public Error {
public:
  explicit DivergenceError(std::size_t iteration)
      : Error("non-finite iterate at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

private:
  std::size_t iteration_;
};

} // namespace tsvd

#endif // TSVD_ERRORS_HPP
