#pragma once

#include <stdexcept>
#include <string>

namespace qkz {

// Error taxonomy. The CLI maps these onto exit codes:
//   configuration problems -> 2, numerical failures -> 3.
// A verification check that merely fails its tolerance is not an exception;
// it is reported in the result object and the CLI exits with 1.

struct ConfigInvalid : std::runtime_error {
  explicit ConfigInvalid(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidProfile : ConfigInvalid {
  explicit InvalidProfile(const std::string& what) : ConfigInvalid(what) {}
};

struct LegOutOfRange : ConfigInvalid {
  explicit LegOutOfRange(const std::string& what) : ConfigInvalid(what) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Argument of a special function fell on (or too close to) a pole or zero
// lattice, so the value is not representable.
struct PoleOrZero : NumericalError {
  explicit PoleOrZero(const std::string& what) : NumericalError(what) {}
};

struct NonConvergence : NumericalError {
  explicit NonConvergence(const std::string& what) : NumericalError(what) {}
};

struct SingularDenominator : NumericalError {
  explicit SingularDenominator(const std::string& what) : NumericalError(what) {}
};

// Weight profile violates the concavity condition that makes the
// integrals absolutely convergent.
struct NotConvergent : NumericalError {
  explicit NotConvergent(const std::string& what) : NumericalError(what) {}
};

// An integrand pole sits on (or within indentation distance of) a contour
// in its final position.
struct ContourPinch : NumericalError {
  explicit ContourPinch(const std::string& what) : NumericalError(what) {}
};

// A contour translation would sweep across a pole that is not cancelled by
// a zero of the integrand, so the shifted and unshifted integrals differ.
struct PoleCrossing : NumericalError {
  explicit PoleCrossing(const std::string& what) : NumericalError(what) {}
};

// Quadrature error estimate exceeds the requested tolerance.
struct ToleranceNotMet : NumericalError {
  explicit ToleranceNotMet(const std::string& what) : NumericalError(what) {}
};

}  // namespace qkz
