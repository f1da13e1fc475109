#pragma once

#include <stdexcept>
#include <string>

namespace polysr {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad parameters supplied by the caller (zoom < 1, negative damping, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Numerical failures. The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Third homogeneous component vanished during perspective division.
class DegenerateProjection : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyPolygon : public Error {
 public:
  using Error::Error;
};

class EmptyFrameSet : public Error {
 public:
  using Error::Error;
};

// Dataset / file problems. The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

class MissingFile : public DataError {
 public:
  using DataError::DataError;
};

class MalformedHomography : public DataError {
 public:
  using DataError::DataError;
};

class InconsistentDimensions : public DataError {
 public:
  using DataError::DataError;
};

class MalformedImage : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace polysr
