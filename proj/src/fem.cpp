#include "bsb/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "bsb/errors.hpp"

namespace bsb {

namespace {

// 4-point Gauss-Legendre rule on [0, 1]; exact through degree 7.
constexpr std::array<double, 4> kGaussNodes = {
    0.069431844202973712388, 0.33000947820757186760, 0.66999052179242813240, 0.93056815579702628761};
constexpr std::array<double, 4> kGaussWeights = {
    0.17392742256872692869, 0.32607257743127307131, 0.32607257743127307131, 0.17392742256872692869};

// Hermite cubic shape functions on [0, h] in reference coordinate xi, with
// derivatives taken with respect to x.
std::array<double, 4> hermite_value(double xi, double h) {
  const double xi2 = xi * xi, xi3 = xi2 * xi;
  return {1.0 - 3.0 * xi2 + 2.0 * xi3, h * (xi - 2.0 * xi2 + xi3), 3.0 * xi2 - 2.0 * xi3, h * (xi3 - xi2)};
}

std::array<double, 4> hermite_first(double xi, double h) {
  const double xi2 = xi * xi;
  return {(6.0 * xi2 - 6.0 * xi) / h, 1.0 - 4.0 * xi + 3.0 * xi2, (6.0 * xi - 6.0 * xi2) / h, 3.0 * xi2 - 2.0 * xi};
}

std::array<double, 4> hermite_second(double xi, double h) {
  const double h2 = h * h;
  return {(12.0 * xi - 6.0) / h2, (6.0 * xi - 4.0) / h, (6.0 - 12.0 * xi) / h2, (6.0 * xi - 2.0) / h};
}

std::array<double, 2> linear_value(double xi) { return {1.0 - xi, xi}; }
std::array<double, 2> linear_first(double h) { return {-1.0 / h, 1.0 / h}; }

template <std::size_t Size, typename Basis>
Eigen::MatrixXd gram(double h, Basis basis) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(Size, Size);
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
    const auto phi = basis(kGaussNodes[k]);
    const double w = kGaussWeights[k] * h;
    for (std::size_t a = 0; a < Size; ++a)
      for (std::size_t b = 0; b < Size; ++b) out(a, b) += w * (phi[a] * phi[b]);  // keeps out exactly symmetric
  }
  return out;
}

std::vector<double> uniform_nodes(double a, double b, int n) {
  std::vector<double> x(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) x[k] = a + (b - a) * static_cast<double>(k) / n;
  x.back() = b;
  return x;
}

// Entry contributions are gathered first and then summed in (row, col, element)
// order, so the assembled matrices do not depend on element traversal order.
struct Contribution {
  int row;
  int col;
  int source;
  double value;
};

class Accumulator {
 public:
  explicit Accumulator(int n) : n_(n) {}

  template <std::size_t Size>
  void add(const std::array<int, Size>& idx, const Eigen::MatrixXd& local, double scale, int source) {
    if (scale == 0.0) return;
    for (std::size_t a = 0; a < Size; ++a) {
      if (idx[a] < 0) continue;
      for (std::size_t b = 0; b < Size; ++b) {
        if (idx[b] < 0) continue;
        entries_.push_back({idx[a], idx[b], source, scale * local(a, b)});
      }
    }
  }

  Eigen::MatrixXd finish() {
    std::sort(entries_.begin(), entries_.end(), [](const Contribution& x, const Contribution& y) {
      return std::tie(x.row, x.col, x.source) < std::tie(y.row, y.col, y.source);
    });
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& c : entries_) out(c.row, c.col) += c.value;
    return out;
  }

 private:
  int n_;
  std::vector<Contribution> entries_;
};

std::vector<int> element_order(int n, AssemblyOrder order) {
  std::vector<int> e(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) e[k] = k;
  if (order == AssemblyOrder::Reversed) std::reverse(e.begin(), e.end());
  return e;
}

bool agree(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= 1e-12 * scale;
}

double call_or_zero(const ScalarField& f, double x) { return f ? f(x) : 0.0; }

void check_count(const std::vector<double>& v, std::size_t expected, const char* what) {
  if (v.size() != expected) {
    std::ostringstream os;
    os << what << ": expected " << expected << " nodal samples, got " << v.size();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

Eigen::VectorXd interpolate_field(const NodalField& f, const Mesh& mesh, const DofMap& dofs, const char* label) {
  const auto n1 = static_cast<std::size_t>(mesh.count(Component::Beam1)) + 1;
  const auto n2 = static_cast<std::size_t>(mesh.count(Component::String)) + 1;
  const auto n3 = static_cast<std::size_t>(mesh.count(Component::Beam2)) + 1;
  check_count(f.beam1_value, n1, label);
  check_count(f.beam1_slope, n1, label);
  check_count(f.string_value, n2, label);
  check_count(f.beam2_value, n3, label);
  check_count(f.beam2_slope, n3, label);

  double scale = 0.0;
  for (const auto* v : {&f.beam1_value, &f.string_value, &f.beam2_value})
    for (double s : *v) scale = std::max(scale, std::abs(s));

  auto clamp_ok = [scale](double v) { return std::abs(v) <= 1e-12 * scale; };
  if (!clamp_ok(f.beam1_value.front()) || !clamp_ok(f.beam2_value.back())) {
    throw Error(ErrorCode::IncompatibleInterface, std::string(label) + ": nonzero deflection at a clamped end");
  }
  if (!agree(f.beam1_value.back(), f.string_value.front())) {
    throw Error(ErrorCode::IncompatibleInterface, std::string(label) + ": beam 1 and string disagree at l1");
  }
  if (!agree(f.string_value.back(), f.beam2_value.front())) {
    throw Error(ErrorCode::IncompatibleInterface, std::string(label) + ": string and beam 2 disagree at l2");
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.total_dofs);
  for (std::size_t k = 0; k < n1; ++k) {
    if (dofs.beam1[k][0] >= 0) out(dofs.beam1[k][0]) = f.beam1_value[k];
    if (dofs.beam1[k][1] >= 0) out(dofs.beam1[k][1]) = f.beam1_slope[k];
  }
  for (std::size_t k = 1; k + 1 < n2; ++k) out(dofs.string[k]) = f.string_value[k];
  for (std::size_t k = 0; k < n3; ++k) {
    if (dofs.beam2[k][0] >= 0) out(dofs.beam2[k][0]) = f.beam2_value[k];
    if (dofs.beam2[k][1] >= 0) out(dofs.beam2[k][1]) = f.beam2_slope[k];
  }
  return out;
}

NodalField sample(const BeamField& u, const ScalarField& v, const BeamField& w, const Mesh& mesh) {
  NodalField f;
  for (double x : mesh.nodes_of(Component::Beam1)) {
    f.beam1_value.push_back(call_or_zero(u.value, x));
    f.beam1_slope.push_back(call_or_zero(u.slope, x));
  }
  for (double x : mesh.nodes_of(Component::String)) f.string_value.push_back(call_or_zero(v, x));
  for (double x : mesh.nodes_of(Component::Beam2)) {
    f.beam2_value.push_back(call_or_zero(w.value, x));
    f.beam2_slope.push_back(call_or_zero(w.slope, x));
  }
  return f;
}

double coefficient(const Eigen::VectorXd& v, int idx) { return idx >= 0 ? v(idx) : 0.0; }

}  // namespace

double Mesh::spacing(Component c) const { return (right(c) - left(c)) / count(c); }

Mesh build_mesh(const StructureConfig& cfg, int n1, int n2, int n3) {
  if (n1 < 1 || n2 < 1 || n3 < 1) {
    std::ostringstream os;
    os << "element counts must be >= 1, got (" << n1 << ", " << n2 << ", " << n3 << ")";
    throw Error(ErrorCode::ZeroElements, os.str());
  }
  const StructureConfig c = validate_config(cfg);
  Mesh mesh;
  mesh.elements = {n1, n2, n3};
  mesh.nodes[0] = uniform_nodes(c.l0, c.l1, n1);
  mesh.nodes[1] = uniform_nodes(c.l1, c.l2, n2);
  mesh.nodes[2] = uniform_nodes(c.l2, c.l3, n3);
  return mesh;
}

DofMap build_dof_map(const Mesh& mesh) {
  const int n1 = mesh.count(Component::Beam1);
  const int n2 = mesh.count(Component::String);
  const int n3 = mesh.count(Component::Beam2);
  DofMap d;
  int next = 0;

  d.beam1.assign(static_cast<std::size_t>(n1) + 1, {-1, -1});
  for (int k = 1; k <= n1; ++k) d.beam1[k] = {next++, next++};
  d.interface_l1 = d.beam1[n1][0];

  d.string.assign(static_cast<std::size_t>(n2) + 1, -1);
  d.string[0] = d.interface_l1;
  for (int k = 1; k < n2; ++k) d.string[k] = next++;

  d.beam2.assign(static_cast<std::size_t>(n3) + 1, {-1, -1});
  for (int k = 0; k < n3; ++k) d.beam2[k] = {next++, next++};
  d.interface_l2 = d.beam2[0][0];
  d.string[n2] = d.interface_l2;

  d.total_dofs = next;
  return d;
}

std::array<int, 4> DofMap::beam_element(Component beam, int e) const {
  const auto& nodes = beam == Component::Beam1 ? beam1 : beam2;
  return {nodes[e][0], nodes[e][1], nodes[e + 1][0], nodes[e + 1][1]};
}

std::array<int, 2> DofMap::string_element(int e) const { return {string[e], string[e + 1]}; }

Eigen::MatrixXd element_matrix(ElementKind kind, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    std::ostringstream os;
    os << "element length must be positive, got " << h;
    throw Error(ErrorCode::NonpositiveLength, os.str());
  }
  switch (kind) {
    case ElementKind::BeamBending: return gram<4>(h, [h](double xi) { return hermite_second(xi, h); });
    case ElementKind::BeamSlopeGram: return gram<4>(h, [h](double xi) { return hermite_first(xi, h); });
    case ElementKind::BeamMass: return gram<4>(h, [h](double xi) { return hermite_value(xi, h); });
    case ElementKind::StringStiffness: return gram<2>(h, [h](double) { return linear_first(h); });
    case ElementKind::StringMass: return gram<2>(h, [](double xi) { return linear_value(xi); });
  }
  throw Error(ErrorCode::NonpositiveLength, "unknown element kind");
}

SystemPencil make_pencil(Eigen::MatrixXd S, Eigen::MatrixXd M, Eigen::MatrixXd D, DampingCase regime) {
  const Eigen::Index n = S.rows();
  if (S.cols() != n || M.rows() != n || M.cols() != n || D.rows() != n || D.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "S, M and D must be square and of equal size");
  }
  SystemPencil P;
  P.B = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  P.B.topLeftCorner(n, n) = S;
  P.B.bottomRightCorner(n, n) = M;
  P.K = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  P.K.topRightCorner(n, n) = S;
  P.K.bottomLeftCorner(n, n) = -S;
  P.K.bottomRightCorner(n, n) = -D;
  P.S = std::move(S);
  P.M = std::move(M);
  P.D = std::move(D);
  P.regime = regime;
  return P;
}

SystemPencil assemble_pencil(const StructureConfig& cfg, const Mesh& mesh, const DofMap& dofs, AssemblyOrder order) {
  const StructureConfig c = validate_config(cfg);
  const int n1 = mesh.count(Component::Beam1);
  const int n2 = mesh.count(Component::String);
  const int n3 = mesh.count(Component::Beam2);
  if (dofs.total_dofs != 2 * n1 + (n2 - 1) + 2 * n3) {
    throw Error(ErrorCode::DimensionMismatch, "DOF map does not belong to this mesh");
  }

  Accumulator S(dofs.total_dofs), M(dofs.total_dofs), D(dofs.total_dofs);

  const double h1 = mesh.spacing(Component::Beam1);
  const Eigen::MatrixXd bend1 = element_matrix(ElementKind::BeamBending, h1);
  const Eigen::MatrixXd mass1 = element_matrix(ElementKind::BeamMass, h1);
  const Eigen::MatrixXd slope1 = element_matrix(ElementKind::BeamSlopeGram, h1);
  for (int e : element_order(n1, order)) {
    const auto idx = dofs.beam_element(Component::Beam1, e);
    S.add(idx, bend1, 1.0, e);
    M.add(idx, mass1, 1.0, e);
    D.add(idx, slope1, c.rho1, e);
  }

  const double h2 = mesh.spacing(Component::String);
  const Eigen::MatrixXd stiff2 = element_matrix(ElementKind::StringStiffness, h2);
  const Eigen::MatrixXd mass2 = element_matrix(ElementKind::StringMass, h2);
  for (int e : element_order(n2, order)) {
    const auto idx = dofs.string_element(e);
    S.add(idx, stiff2, 1.0, n1 + e);
    M.add(idx, mass2, 1.0, n1 + e);
    D.add(idx, mass2, c.beta, n1 + e);
  }

  const double h3 = mesh.spacing(Component::Beam2);
  const Eigen::MatrixXd bend3 = element_matrix(ElementKind::BeamBending, h3);
  const Eigen::MatrixXd mass3 = element_matrix(ElementKind::BeamMass, h3);
  const Eigen::MatrixXd slope3 = element_matrix(ElementKind::BeamSlopeGram, h3);
  for (int e : element_order(n3, order)) {
    const auto idx = dofs.beam_element(Component::Beam2, e);
    S.add(idx, bend3, 1.0, n1 + n2 + e);
    M.add(idx, mass3, 1.0, n1 + n2 + e);
    D.add(idx, slope3, c.rho2, n1 + n2 + e);
  }

  return make_pencil(S.finish(), M.finish(), D.finish(), classify_damping(c));
}

SystemPencil assemble_string_pencil(double length, double beta, int elements) {
  if (elements < 2) throw Error(ErrorCode::ZeroElements, "a fixed-fixed string needs at least 2 elements");
  if (beta < 0.0) throw Error(ErrorCode::NegativeDamping, "beta must be >= 0");
  const double h = length / elements;
  const Eigen::MatrixXd stiff = element_matrix(ElementKind::StringStiffness, h);
  const Eigen::MatrixXd mass = element_matrix(ElementKind::StringMass, h);
  const int n = elements - 1;
  Accumulator S(n), M(n), D(n);
  for (int e = 0; e < elements; ++e) {
    const std::array<int, 2> idx = {e - 1, e == elements - 1 ? -1 : e};
    S.add(idx, stiff, 1.0, e);
    M.add(idx, mass, 1.0, e);
    D.add(idx, mass, beta, e);
  }
  return make_pencil(S.finish(), M.finish(), D.finish(),
                     beta > 0.0 ? DampingCase::Other : DampingCase::Conservative);
}

SystemPencil assemble_beam_pencil(double length, double rho, int elements) {
  if (elements < 1) throw Error(ErrorCode::ZeroElements, "beam needs at least 1 element");
  if (rho < 0.0) throw Error(ErrorCode::NegativeDamping, "rho must be >= 0");
  const double h = length / elements;
  const Eigen::MatrixXd bend = element_matrix(ElementKind::BeamBending, h);
  const Eigen::MatrixXd mass = element_matrix(ElementKind::BeamMass, h);
  const Eigen::MatrixXd slope = element_matrix(ElementKind::BeamSlopeGram, h);
  const int n = 2 * elements;
  Accumulator S(n), M(n), D(n);
  for (int e = 0; e < elements; ++e) {
    // node k >= 1 owns DOFs (2k-2, 2k-1); node 0 is clamped
    const std::array<int, 4> idx = {e == 0 ? -1 : 2 * e - 2, e == 0 ? -1 : 2 * e - 1, 2 * e, 2 * e + 1};
    S.add(idx, bend, 1.0, e);
    M.add(idx, mass, 1.0, e);
    D.add(idx, slope, rho, e);
  }
  return make_pencil(S.finish(), M.finish(), D.finish(),
                     rho > 0.0 ? DampingCase::Other : DampingCase::Conservative);
}

StateVector StateVector::from_stacked(const Eigen::VectorXd& y) {
  if (y.size() % 2 != 0) throw Error(ErrorCode::DimensionMismatch, "stacked state must have even length");
  const Eigen::Index n = y.size() / 2;
  return {y.head(n), y.tail(n)};
}

Eigen::VectorXd StateVector::stacked() const {
  Eigen::VectorXd y(p.size() + q.size());
  y << p, q;
  return y;
}

StateVector interpolate(const SampledInitialData& data, const Mesh& mesh, const DofMap& dofs) {
  return {interpolate_field(data.position, mesh, dofs, "position"),
          interpolate_field(data.velocity, mesh, dofs, "velocity")};
}

StateVector interpolate(const InitialData& data, const Mesh& mesh, const DofMap& dofs) {
  SampledInitialData s{sample(data.u0, data.v0, data.w0, mesh), sample(data.u1, data.v1, data.w1, mesh)};
  return interpolate(s, mesh, dofs);
}

PointValue evaluate_component(const Mesh& mesh, const DofMap& dofs, const StateVector& y, Component c, double x) {
  if (y.p.size() != dofs.total_dofs || y.q.size() != dofs.total_dofs) {
    throw Error(ErrorCode::DimensionMismatch, "state does not match DOF map");
  }
  const double a = mesh.left(c), b = mesh.right(c);
  if (!(x >= a && x <= b)) {
    std::ostringstream os;
    os << "x=" << x << " outside [" << a << ", " << b << "]";
    throw Error(ErrorCode::OutOfDomain, os.str());
  }
  const int n = mesh.count(c);
  const double h = mesh.spacing(c);
  const int e = std::clamp(static_cast<int>(std::floor((x - a) / h)), 0, n - 1);
  const auto& nodes = mesh.nodes_of(c);
  const double xi = std::clamp((x - nodes[e]) / (nodes[e + 1] - nodes[e]), 0.0, 1.0);

  PointValue out;
  if (c == Component::String) {
    const auto idx = dofs.string_element(e);
    const auto phi = linear_value(xi);
    for (int k = 0; k < 2; ++k) {
      out.displacement += phi[k] * coefficient(y.p, idx[k]);
      out.velocity += phi[k] * coefficient(y.q, idx[k]);
    }
  } else {
    const auto idx = dofs.beam_element(c, e);
    const auto phi = hermite_value(xi, h);
    for (int k = 0; k < 4; ++k) {
      out.displacement += phi[k] * coefficient(y.p, idx[k]);
      out.velocity += phi[k] * coefficient(y.q, idx[k]);
    }
  }
  return out;
}

PointValue evaluate_state(const Mesh& mesh, const DofMap& dofs, const StateVector& y, double x) {
  const double l0 = mesh.left(Component::Beam1), l1 = mesh.right(Component::Beam1);
  const double l2 = mesh.right(Component::String), l3 = mesh.right(Component::Beam2);
  if (!(x >= l0 && x <= l3)) {
    std::ostringstream os;
    os << "x=" << x << " outside [" << l0 << ", " << l3 << "]";
    throw Error(ErrorCode::OutOfDomain, os.str());
  }
  if (x <= l1) return evaluate_component(mesh, dofs, y, Component::Beam1, x);
  if (x < l2) return evaluate_component(mesh, dofs, y, Component::String, x);
  return evaluate_component(mesh, dofs, y, Component::Beam2, x);
}

}  // namespace bsb
