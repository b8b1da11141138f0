#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <vector>

#include "bsb/model.hpp"

namespace bsb {

enum class Component { Beam1 = 0, String = 1, Beam2 = 2 };

/// Uniform nodes on each of the three intervals. Interface nodes appear in
/// both adjacent node lists.
struct Mesh {
  std::array<int, 3> elements{};
  std::array<std::vector<double>, 3> nodes;

  int count(Component c) const { return elements[static_cast<int>(c)]; }
  const std::vector<double>& nodes_of(Component c) const { return nodes[static_cast<int>(c)]; }
  double spacing(Component c) const;
  double left(Component c) const { return nodes_of(c).front(); }
  double right(Component c) const { return nodes_of(c).back(); }
};

Mesh build_mesh(const StructureConfig& cfg, int n1, int n2, int n3);

/// Global numbering of the unknowns.
///
/// Beam nodes carry (deflection, slope); string nodes carry deflection only.
/// Clamped DOFs at l0 and l3 are eliminated (index -1). The string's end
/// deflections are the beams' tip deflections, so continuity at l1 and l2
/// holds by construction. Ordering: beam 1 node-major, string interior, beam 2.
struct DofMap {
  int total_dofs = 0;
  std::vector<std::array<int, 2>> beam1;  // per node: {deflection, slope}
  std::vector<int> string;                // per node: deflection
  std::vector<std::array<int, 2>> beam2;
  int interface_l1 = -1;
  int interface_l2 = -1;

  std::array<int, 4> beam_element(Component beam, int e) const;
  std::array<int, 2> string_element(int e) const;
};

DofMap build_dof_map(const Mesh& mesh);

enum class ElementKind { BeamBending, BeamSlopeGram, BeamMass, StringStiffness, StringMass };

/// Local matrix of one element of length h. Beam kinds are 4x4 over
/// (w_left, theta_left, w_right, theta_right); string kinds are 2x2.
Eigen::MatrixXd element_matrix(ElementKind kind, double h);

/// Matrix pair (B, K) of the semi-discrete system B y' = K y with y = (p, q).
///
/// B = blockdiag(S, M) is the energy Gram matrix and K = [[0, S], [-S, -D]]
/// is the Galerkin matrix of the generator form.
struct SystemPencil {
  Eigen::MatrixXd S;
  Eigen::MatrixXd M;
  Eigen::MatrixXd D;
  Eigen::MatrixXd B;
  Eigen::MatrixXd K;
  DampingCase regime = DampingCase::Other;

  Eigen::Index dofs() const { return S.rows(); }
  Eigen::Index dimension() const { return B.rows(); }
};

/// Forms B and K from the three blocks. Throws DimensionMismatch.
SystemPencil make_pencil(Eigen::MatrixXd S, Eigen::MatrixXd M, Eigen::MatrixXd D, DampingCase regime);

enum class AssemblyOrder { Forward, Reversed };

SystemPencil assemble_pencil(const StructureConfig& cfg, const Mesh& mesh, const DofMap& dofs,
                             AssemblyOrder order = AssemblyOrder::Forward);

/// Standalone damped string on (0, length) with both ends fixed, P1 elements.
SystemPencil assemble_string_pencil(double length, double beta, int elements);

/// Standalone beam on (0, length), clamped at 0 and free at length.
SystemPencil assemble_beam_pencil(double length, double rho, int elements);

struct StateVector {
  Eigen::VectorXd p;  // positions
  Eigen::VectorXd q;  // velocities

  static StateVector zero(Eigen::Index n) { return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)}; }
  static StateVector from_stacked(const Eigen::VectorXd& y);
  Eigen::VectorXd stacked() const;
  Eigen::Index dofs() const { return p.size(); }
};

/// Nodal values (and slopes on the beams) of one field triple.
struct NodalField {
  std::vector<double> beam1_value, beam1_slope;
  std::vector<double> string_value;
  std::vector<double> beam2_value, beam2_slope;
};

struct SampledInitialData {
  NodalField position;
  NodalField velocity;
};

/// Throws IncompatibleInterface when the supplied data break continuity at l1/l2
/// or clamping at l0/l3 (beyond 1e-12 relative), DimensionMismatch on wrong sample counts.
StateVector interpolate(const SampledInitialData& data, const Mesh& mesh, const DofMap& dofs);
StateVector interpolate(const InitialData& data, const Mesh& mesh, const DofMap& dofs);

struct PointValue {
  double displacement = 0.0;
  double velocity = 0.0;
};

/// Evaluates the discrete fields at x in [l0, l3]; throws OutOfDomain.
PointValue evaluate_state(const Mesh& mesh, const DofMap& dofs, const StateVector& y, double x);

/// Evaluates one component's interpolant; x must lie in that component's closed interval.
PointValue evaluate_component(const Mesh& mesh, const DofMap& dofs, const StateVector& y, Component c, double x);

}  // namespace bsb
