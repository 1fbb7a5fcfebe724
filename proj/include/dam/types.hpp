#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dam {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 3.0e8;  // m/s

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two propagation paths landed on the same integer tap.
class DelayCollision : public Error {
 public:
  using Error::Error;
};

/// Constraint set is empty (e.g. zero-forcing with too few antennas).
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Every channel involved is identically zero.
class DegenerateChannel : public Error {
 public:
  using Error::Error;
};

/// Operation requires a channel structure the input does not have.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Inconsistent scenario / experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

}  // namespace dam
