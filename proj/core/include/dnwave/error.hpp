#pragma once

#include <stdexcept>
#include <string>

namespace dnwave {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (m, p) outside the slow diffusion regime, or an otherwise invalid setting.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Jet at (or too close to) the pole 1 + d_n w = 0.
class DegenerateJetError : public Error {
 public:
  using Error::Error;
};

class GridError : public Error {
 public:
  using Error::Error;
};

class CflError : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf produced by a solver; the message names the offending cell.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Support or data reached an artificial boundary of the truncated domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Hodograph input not monotone in the normal direction.
class MonotonicityError : public Error {
 public:
  using Error::Error;
};

/// Too few snapshots inside a cylinder time window.
class SnapshotDensityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dnwave
