// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace jspec {

// Base class of every exception thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An off-diagonal coefficient a_n evaluated to zero; the three-term
// recurrence cannot be continued across it.
struct ZeroOffDiagonal : Error {
  using Error::Error;
};

// Index past the end of an explicitly tabulated coefficient model.
struct IndexOutOfTable : Error {
  using Error::Error;
};

// Blend slot index outside 0..N+1.
struct SlotOutOfRange : Error {
  using Error::Error;
};

// Offset outside the range admitted by the limit family.
struct OffsetOutOfRange : Error {
  using Error::Error;
};

// Zero initial condition for a generalised eigenvector.
struct DegenerateInitial : Error {
  using Error::Error;
};

// Empty or inverted scan range.
struct EmptyRange : Error {
  using Error::Error;
};

// A characteristic-polynomial zero sits on (or too close to) a contour
// used for argument-principle counting; the caller should perturb the box.
struct RootOnBoundary : Error {
  using Error::Error;
};

// A quantity that must be real up to rounding carried an imaginary part
// beyond the accepted residue.
struct RealnessViolation : Error {
  using Error::Error;
};

// Malformed input file or JSON document.
struct ParseError : Error {
  using Error::Error;
};

// A documented operation precondition was violated by the caller.
struct PreconditionError : Error {
  using Error::Error;
};

}  // namespace jspec
