#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace delaylim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class of all errors thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix or vector sizes do not fit together.
class DimensionError : public Error {
    using Error::Error;
};

/// An input value violates a precondition (non-finite entries, empty stream, ...).
class InvalidInput : public Error {
    using Error::Error;
};

/// A model or algorithm parameter is out of its admissible range.
class InvalidParameter : public Error {
    using Error::Error;
};

/// The undamped eigenproblem has no purely oscillatory solution.
class NoVibrationModes : public Error {
    using Error::Error;
};

/// Energy-based distance weights cannot be formed from the given modes.
class WeightsUndefined : public Error {
    using Error::Error;
};

/// The operation needs data (e.g. a modal transform) that is not available.
class UnsupportedOperation : public Error {
    using Error::Error;
};

/// A run configuration is inconsistent.
class ConfigError : public Error {
    using Error::Error;
};

/// Reading or writing result files failed.
class IoError : public Error {
    using Error::Error;
};

}  // namespace delaylim
