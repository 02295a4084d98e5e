#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tphase {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Field evaluation requested within the exclusion radius of a singular axis.
struct AxisProximity : Error {
  using Error::Error;
};

// Expression evaluation hit a domain error (log of non-positive, x/0, ...).
// `offset` is the byte offset of the offending node in the source text.
struct ExpressionDomain : Error {
  std::size_t offset;
  ExpressionDomain(const std::string& msg, std::size_t off)
      : Error(msg + " (at offset " + std::to_string(off) + ")"), offset(off) {}
};

// Parse failure; `offset` is the byte offset, `expected` a human-readable
// list of tokens that would have been accepted there.
struct SyntaxError : Error {
  std::size_t offset;
  std::string expected;
  SyntaxError(const std::string& msg, std::size_t off, std::string exp)
      : Error(msg + " (at offset " + std::to_string(off) + ", expected: " + exp + ")"),
        offset(off),
        expected(std::move(exp)) {}
};

// Adaptive quadrature failed to reach the requested tolerance at max depth.
struct QuadratureNonconvergence : Error {
  using Error::Error;
};

// Winding-number query for a path that touches the reference axis.
struct PathIntersectsAxis : Error {
  using Error::Error;
};

// A surface element of a flux integral lies within the exclusion radius of a
// field singularity; the flux there is not numerically integrable.
struct SurfaceCrossesSingularity : Error {
  using Error::Error;
};

// Iterative linear solver failed to converge within its iteration budget.
struct SolverNonconvergence : Error {
  using Error::Error;
};

// Interferometric overlap |<psi_L|psi_R>| too small for a meaningful phase.
struct OverlapTooSmall : Error {
  using Error::Error;
};

// File/stream I/O failure.
struct IoError : Error {
  using Error::Error;
};

}  // namespace tphase
