#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace becprobe {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A Fock truncation discards more probability mass than allowed.
class CutoffError : public Error {
 public:
  using Error::Error;
};

// A parameter or precondition is outside the operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Conditioning on an event of (numerically) zero probability.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace becprobe
