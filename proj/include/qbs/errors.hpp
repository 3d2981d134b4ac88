#pragma once

#include <stdexcept>
#include <string>

namespace qbs {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or incomplete input data: bad files, bad arguments, gaps.
// The CLI maps these to exit code 1.
class InputError : public Error {
public:
    using Error::Error;
};

// A path or series does not span the interval it is asked to cover.
class CoverageError : public InputError {
public:
    using InputError::InputError;
};

// Failures of the numerics proper. The CLI maps these to exit code 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

// An argument outside the mathematical domain of an operation
// (negative volatility, non-finite argument, gamma < 1, ...).
class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// beta * VIX / 100 came out negative.
class NegativeVolatilityError : public DomainError {
public:
    NegativeVolatilityError(const std::string& what, double beta)
        : DomainError(what), beta_(beta) {}

    double beta() const noexcept { return beta_; }

private:
    double beta_;
};

enum class PriceBound { Lower, Upper };

// Market price outside the strict no-arbitrage interior: no implied volatility exists.
class NoSolutionError : public NumericalError {
public:
    NoSolutionError(const std::string& what, PriceBound violated)
        : NumericalError(what), violated_(violated) {}

    PriceBound violated_bound() const noexcept { return violated_; }

private:
    PriceBound violated_;
};

class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace qbs
