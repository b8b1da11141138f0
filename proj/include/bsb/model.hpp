#pragma once

#include <functional>
#include <string_view>

namespace bsb {

/// Geometry and damping of the beam-string-beam structure.
///
/// Beam 1 occupies (l0, l1), the string (l1, l2) and beam 2 (l2, l3). Both
/// beams carry structural damping (rho1, rho2) and the string carries
/// frictional damping (beta). All material constants are normalized to 1.
struct StructureConfig {
  double l0 = 0.0;
  double l1 = 1.0;
  double l2 = 2.0;
  double l3 = 3.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double beta = 0.0;

  double beam1_length() const { return l1 - l0; }
  double string_length() const { return l2 - l1; }
  double beam2_length() const { return l3 - l2; }

  friend bool operator==(const StructureConfig&, const StructureConfig&) = default;
};

enum class DampingCase {
  DDD,           // every component damped
  UDU,           // undamped beams, damped string
  Conservative,  // no damping at all
  Other,
};

std::string_view to_string(DampingCase c);

/// Throws Error{OrderingViolation | NegativeDamping | NonfiniteValue}; returns cfg unchanged otherwise.
StructureConfig validate_config(const StructureConfig& cfg);

DampingCase classify_damping(const StructureConfig& cfg);

/// True for every regime in which some damping term is active.
inline bool is_dissipative(DampingCase c) { return c != DampingCase::Conservative; }

using ScalarField = std::function<double(double)>;

/// Closed-form field on a beam: the Hermite interpolant needs both value and slope.
struct BeamField {
  ScalarField value;
  ScalarField slope;
};

/// Closed-form initial data (positions u0, v0, w0 and velocities u1, v1, w1).
///
/// Empty callables are read as the zero function.
struct InitialData {
  BeamField u0, u1;
  ScalarField v0, v1;
  BeamField w0, w1;
};

}  // namespace bsb
