#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jdgamma {

// Error categories. The CLI maps these onto exit codes:
// ConfigError/ArgumentError -> 2, DataError -> 3, NumericalError/DomainError -> 4.

class ArgumentError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public ArgumentError
{
public:
  using ArgumentError::ArgumentError;
};

class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

//! Bad input data (non-finite values, nonpositive prices, unparseable rows).
class DataError : public std::runtime_error
{
public:
  explicit DataError(const std::string& what, std::size_t row = npos)
    : std::runtime_error(what)
    , row_(row)
  {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  //! Offending row (0-based sequence index or 1-based file line), npos if n/a.
  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_;
};

class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! No usable kernel mass near the evaluation point.
class SparseRegionError : public NumericalError
{
public:
  explicit SparseRegionError(double x)
    : NumericalError("sparse region: no usable kernel mass at x = " +
                     std::to_string(x))
    , x_(x)
  {}
  double x() const noexcept { return x_; }

private:
  double x_;
};

//! Weighted design has (numerically) no spread around the evaluation point.
class DegenerateDesignError : public NumericalError
{
public:
  explicit DegenerateDesignError(double x, const std::string& detail = {})
    : NumericalError("degenerate design at x = " + std::to_string(x) +
                     (detail.empty() ? std::string{} : ": " + detail))
    , x_(x)
  {}
  double x() const noexcept { return x_; }

private:
  double x_;
};

class NotIdentifiableError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

} // namespace jdgamma
