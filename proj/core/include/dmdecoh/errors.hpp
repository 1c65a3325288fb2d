#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dmdecoh {

/// An input violates a documented invariant. The message names the field.
class ValidationError : public std::invalid_argument
{
  public:
    ValidationError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field)
    {
    }
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// Adaptive refinement ran out of budget; carries the best estimate so far.
class ConvergenceError : public std::runtime_error
{
  public:
    ConvergenceError(const std::string& what, std::complex<double> partial, double abs_err)
        : std::runtime_error(what), partial_(partial), abs_err_(abs_err)
    {
    }
    std::complex<double> partial() const noexcept { return partial_; }
    double abs_err() const noexcept { return abs_err_; }

  private:
    std::complex<double> partial_;
    double abs_err_;
};

/// Input data admit no answer (zero denominators, empty series, zero pilot rate).
class DegenerateDataError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Limiting formulas refuse parameter points where no scale dominates.
class MixedRegimeError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace dmdecoh
