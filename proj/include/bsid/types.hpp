#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bsid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Base of all library errors. The CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration or arguments (dimension mismatches included).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure could not produce a usable result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace bsid
