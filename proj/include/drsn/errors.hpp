// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace drsn {

// Argument outside its documented domain (bad family parameter, negative
// step size, coupling vector of the wrong length, ...).
class InvalidParameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Request exceeds a hard resource cap (vertex count, dense-oracle size).
class SizeLimit : public std::length_error {
public:
  using std::length_error::length_error;
};

// The BFS strata of the graph do not close into a three-term recursion:
// some stratum is not regular seen from the reference vertex.
class NotStratifiable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Structural requirement violated before stratification is even attempted
// (disconnected graph, last stratum not a singleton, missing antipode).
class UnsupportedTopology : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The Jacobi matrix produced (numerically) repeated eigenvalues, so the
// spectral weights are not well defined.
class DegenerateJacobi : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The linear system for the couplings is singular or too ill conditioned
// to trust.
class SolverFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The explicit integrator was asked to run outside its stability region
// or with a nonsensical grid.
class IntegrationFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An internal cross-check failed (imaginary residue of a fidelity sum,
// weight normalization). Indicates a bug or catastrophic cancellation,
// not bad user input.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace drsn
