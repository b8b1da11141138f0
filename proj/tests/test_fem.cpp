#include <cmath>
#include <random>

#include "bsb/errors.hpp"
#include "bsb/fem.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bsb;

namespace {

const StructureConfig kUnit{0.0, 1.0, 2.0, 3.0, 0.0, 0.0, 0.0};

StructureConfig with_damping(double rho1, double rho2, double beta) {
  StructureConfig c = kUnit;
  c.rho1 = rho1;
  c.rho2 = rho2;
  c.beta = beta;
  return c;
}

struct Setup {
  Mesh mesh;
  DofMap dofs;
  SystemPencil pencil;
};

Setup setup(const StructureConfig& c, int n1, int n2, int n3) {
  Setup s;
  s.mesh = build_mesh(c, n1, n2, n3);
  s.dofs = build_dof_map(s.mesh);
  s.pencil = assemble_pencil(c, s.mesh, s.dofs);
  return s;
}

Eigen::MatrixXd oracle_matrix(ElementKind kind, double h) {
  const bool beam = kind == ElementKind::BeamBending || kind == ElementKind::BeamSlopeGram || kind == ElementKind::BeamMass;
  auto basis = beam ? oracle::hermite_basis(h) : oracle::linear_basis(h);
  int order = 0;
  if (kind == ElementKind::BeamBending) order = 2;
  if (kind == ElementKind::BeamSlopeGram || kind == ElementKind::StringStiffness) order = 1;
  for (auto& p : basis)
    for (int k = 0; k < order; ++k) p = oracle::derivative(p);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = oracle::integrate(oracle::multiply(basis[a], basis[b]), h);
  return out;
}

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

// Cubic with u(0) = u'(0) = 0 on beam 1, affine on the string, and a cubic
// clamped at x = 3 on beam 2; continuous at x = 1 and x = 2.
InitialData piecewise_polynomial() {
  InitialData d;
  d.u0.value = [](double x) { return 0.7 * x * x - 0.2 * x * x * x; };  // u(1) = 0.5
  d.u0.slope = [](double x) { return 1.4 * x - 0.6 * x * x; };
  d.v0 = [](double x) { return 0.5 + 0.25 * (x - 1.0); };              // v(2) = 0.75
  d.w0.value = [](double x) { const double s = x - 3.0; return s * s * (0.5 - 0.25 * s); };  // w(2) = 0.75
  d.w0.slope = [](double x) { const double s = x - 3.0; return 2.0 * s * (0.5 - 0.25 * s) - 0.25 * s * s; };
  d.u1 = d.u0;
  d.v1 = d.v0;
  d.w1 = d.w0;
  return d;
}

}  // namespace

TEST_SUITE("fem") {
  TEST_CASE("build_mesh places uniform nodes") {
    const Mesh m = build_mesh(kUnit, 2, 2, 2);
    CHECK(m.nodes_of(Component::Beam1) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(m.nodes_of(Component::String) == std::vector<double>{1.0, 1.5, 2.0});
    CHECK(m.nodes_of(Component::Beam2) == std::vector<double>{2.0, 2.5, 3.0});

    const Mesh single = build_mesh(kUnit, 1, 1, 1);
    for (int c = 0; c < 3; ++c) CHECK(single.nodes[c].size() == 2);
  }

  TEST_CASE("build_mesh rejects empty intervals") {
    CHECK_THROWS_AS(build_mesh(kUnit, 0, 2, 2), Error);
    try {
      build_mesh(kUnit, 0, 2, 2);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroElements);
    }
  }

  TEST_CASE("DOF counts follow 2 n1 + n2 - 1 + 2 n3") {
    CHECK(build_dof_map(build_mesh(kUnit, 2, 2, 2)).total_dofs == 9);
    CHECK(build_dof_map(build_mesh(kUnit, 1, 1, 1)).total_dofs == 4);
    CHECK(build_dof_map(build_mesh(kUnit, 3, 4, 5)).total_dofs == 19);
  }

  TEST_CASE("interfaces share deflection DOFs and leave slopes free") {
    const DofMap d = build_dof_map(build_mesh(kUnit, 1, 1, 1));
    CHECK(d.beam1[0] == std::array<int, 2>{-1, -1});
    CHECK(d.beam2[1] == std::array<int, 2>{-1, -1});
    CHECK(d.string[0] == d.beam1[1][0]);
    CHECK(d.string[1] == d.beam2[0][0]);
    CHECK(d.interface_l1 == 0);
    CHECK(d.beam1[1][1] == 1);
    CHECK(d.interface_l2 == 2);
    CHECK(d.beam2[0][1] == 3);

    const DofMap big = build_dof_map(build_mesh(kUnit, 3, 4, 5));
    CHECK(big.string[0] == big.beam1[3][0]);
    CHECK(big.string[4] == big.beam2[0][0]);
    CHECK(big.string[1] == 6);  // string interior follows beam 1
    CHECK(big.beam2[0][0] == 9);
  }

  TEST_CASE("element matrices match exact polynomial integration") {
    for (double h : {1.0, 0.5, 0.1, 1.0 / 3.0, 0.025}) {
      for (auto kind : {ElementKind::BeamBending, ElementKind::BeamSlopeGram, ElementKind::BeamMass,
                        ElementKind::StringStiffness, ElementKind::StringMass}) {
        const Eigen::MatrixXd m = element_matrix(kind, h);
        CHECK(rel_diff(m, oracle_matrix(kind, h)) < 1e-13);
        CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }

  TEST_CASE("element matrices equal the textbook closed forms") {
    const double h = 0.3;
    Eigen::MatrixXd stiff(2, 2), smass(2, 2), bend(4, 4), slope(4, 4), bmass(4, 4);
    stiff << 1, -1, -1, 1;
    stiff /= h;
    smass << 2, 1, 1, 2;
    smass *= h / 6.0;
    bend << 12, 6 * h, -12, 6 * h, 6 * h, 4 * h * h, -6 * h, 2 * h * h, -12, -6 * h, 12, -6 * h, 6 * h, 2 * h * h,
        -6 * h, 4 * h * h;
    bend /= h * h * h;
    slope << 36, 3 * h, -36, 3 * h, 3 * h, 4 * h * h, -3 * h, -h * h, -36, -3 * h, 36, -3 * h, 3 * h, -h * h, -3 * h,
        4 * h * h;
    slope /= 30.0 * h;
    bmass << 156, 22 * h, 54, -13 * h, 22 * h, 4 * h * h, 13 * h, -3 * h * h, 54, 13 * h, 156, -22 * h, -13 * h,
        -3 * h * h, -22 * h, 4 * h * h;
    bmass *= h / 420.0;

    // the closed forms must themselves pass the quadrature-free oracle
    CHECK(rel_diff(oracle_matrix(ElementKind::BeamBending, h), bend) < 1e-13);
    CHECK(rel_diff(oracle_matrix(ElementKind::BeamSlopeGram, h), slope) < 1e-13);
    CHECK(rel_diff(oracle_matrix(ElementKind::BeamMass, h), bmass) < 1e-13);

    CHECK(rel_diff(element_matrix(ElementKind::StringStiffness, h), stiff) < 1e-14);
    CHECK(rel_diff(element_matrix(ElementKind::StringMass, h), smass) < 1e-14);
    CHECK(rel_diff(element_matrix(ElementKind::BeamBending, h), bend) < 1e-13);
    CHECK(rel_diff(element_matrix(ElementKind::BeamSlopeGram, h), slope) < 1e-13);
    CHECK(rel_diff(element_matrix(ElementKind::BeamMass, h), bmass) < 1e-13);
  }

  TEST_CASE("element_matrix rejects nonpositive lengths") {
    for (double h : {0.0, -1.0}) {
      try {
        element_matrix(ElementKind::StringMass, h);
        FAIL("expected NonpositiveLength");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonpositiveLength);
      }
    }
  }

  TEST_CASE("conservative assembly has a zero damping matrix") {
    const auto s = setup(kUnit, 4, 5, 6);
    CHECK(s.pencil.D.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.pencil.regime == DampingCase::Conservative);
  }

  TEST_CASE("assembled S, M, D are exactly symmetric, S and M positive definite, D semidefinite") {
    for (const auto& c : {kUnit, with_damping(1, 1, 1), with_damping(0, 0, 0.5), with_damping(2, 0, 0)}) {
      for (auto n : {std::array<int, 3>{1, 1, 1}, {3, 4, 5}, {20, 20, 20}}) {
        const auto s = setup(c, n[0], n[1], n[2]);
        CHECK((s.pencil.S - s.pencil.S.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((s.pencil.M - s.pencil.M.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((s.pencil.D - s.pencil.D.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(Eigen::LLT<Eigen::MatrixXd>(s.pencil.S).info() == Eigen::Success);
        CHECK(Eigen::LLT<Eigen::MatrixXd>(s.pencil.M).info() == Eigen::Success);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.pencil.D);
        CHECK(es.eigenvalues().minCoeff() >= -1e-13 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()));
      }
    }
  }

  TEST_CASE("UDU damping lives on the string only and equals beta times the string mass") {
    const StructureConfig c = with_damping(0, 0, 1);
    const auto s = setup(c, 3, 4, 5);
    const auto& d = s.dofs;
    std::vector<bool> on_string(d.total_dofs, false);
    for (int idx : d.string) on_string[idx] = true;
    for (int i = 0; i < d.total_dofs; ++i) {
      for (int j = 0; j < d.total_dofs; ++j) {
        if (!on_string[i] || !on_string[j]) {
          CHECK(s.pencil.D(i, j) == 0.0);
        }
      }
    }
    // D restricted to the string equals the P1 mass assembled by hand
    const double h = 0.25;
    const Eigen::MatrixXd local = element_matrix(ElementKind::StringMass, h);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(d.total_dofs, d.total_dofs);
    for (int e = 0; e < 4; ++e)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) expected(d.string[e + a], d.string[e + b]) += local(a, b);
    CHECK((s.pencil.D - expected).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("assembly is independent of element traversal order") {
    const StructureConfig c = with_damping(0.3, 1.7, 0.9);
    const Mesh m = build_mesh(c, 7, 5, 9);
    const DofMap d = build_dof_map(m);
    const auto fwd = assemble_pencil(c, m, d, AssemblyOrder::Forward);
    const auto rev = assemble_pencil(c, m, d, AssemblyOrder::Reversed);
    CHECK(fwd.S == rev.S);
    CHECK(fwd.M == rev.M);
    CHECK(fwd.D == rev.D);
  }

  TEST_CASE("discrete dissipativity: Re(y^H K y) = -q^H D q on random complex states") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    for (const auto& c : {with_damping(1, 1, 1), with_damping(0, 0, 0.5), kUnit, with_damping(1, 0, 0)}) {
      const auto s = setup(c, 20, 20, 20);
      const Eigen::Index n = s.pencil.dimension();
      for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXcd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y(i) = {normal(rng), normal(rng)};
        const std::complex<double> yKy = oracle::quadratic_form(s.pencil.K, y);
        const double qDq = oracle::quadratic_form(s.pencil.D, y.tail(s.pencil.dofs())).real();
        CHECK(std::abs(yKy.real() + qDq) <= 1e-12 * (std::abs(yKy) + qDq + 1.0));
      }
    }
  }

  TEST_CASE("pencil blocks have the generator layout") {
    const auto s = setup(with_damping(1, 2, 3), 2, 3, 2);
    const Eigen::Index n = s.pencil.dofs();
    CHECK(s.pencil.B.topLeftCorner(n, n) == s.pencil.S);
    CHECK(s.pencil.B.bottomRightCorner(n, n) == s.pencil.M);
    CHECK(s.pencil.B.topRightCorner(n, n).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.pencil.K.topLeftCorner(n, n).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.pencil.K.topRightCorner(n, n) == s.pencil.S);
    CHECK(s.pencil.K.bottomLeftCorner(n, n) == -s.pencil.S);
    CHECK(s.pencil.K.bottomRightCorner(n, n) == -s.pencil.D);
  }

  TEST_CASE("make_pencil checks block sizes") {
    CHECK_THROWS_AS(make_pencil(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3),
                                Eigen::MatrixXd::Zero(2, 2), DampingCase::Other),
                    Error);
  }

  TEST_CASE("interpolate: zero data gives the zero state") {
    const auto s = setup(kUnit, 3, 3, 3);
    const StateVector y = interpolate(InitialData{}, s.mesh, s.dofs);
    CHECK(y.p.cwiseAbs().maxCoeff() == 0.0);
    CHECK(y.q.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("interpolate reproduces affine string data and cubic beam data everywhere") {
    const auto s = setup(kUnit, 3, 4, 5);
    const InitialData d = piecewise_polynomial();
    const StateVector y = interpolate(d, s.mesh, s.dofs);
    for (int k = 0; k <= 300; ++k) {
      const double x = 3.0 * k / 300.0;
      const PointValue v = evaluate_state(s.mesh, s.dofs, y, x);
      const double exact = x <= 1.0 ? d.u0.value(x) : (x < 2.0 ? d.v0(x) : d.w0.value(x));
      CHECK(v.displacement == doctest::Approx(exact).epsilon(1e-13));
      CHECK(v.velocity == doctest::Approx(exact).epsilon(1e-13));
    }
    // midpoint of a string element
    const PointValue mid = evaluate_state(s.mesh, s.dofs, y, 1.125);
    CHECK(mid.displacement == doctest::Approx(d.v0(1.125)).epsilon(1e-15));
  }

  TEST_CASE("interpolate rejects data that break continuity or clamping") {
    const auto s = setup(kUnit, 2, 2, 2);
    InitialData bad = piecewise_polynomial();
    bad.v0 = [](double x) { return 0.5 + 0.25 * (x - 1.0) + 1e-6; };
    try {
      interpolate(bad, s.mesh, s.dofs);
      FAIL("expected IncompatibleInterface");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IncompatibleInterface);
    }

    InitialData unclamped;
    unclamped.u0.value = [](double) { return 1.0; };
    unclamped.v0 = [](double) { return 1.0; };
    CHECK_THROWS_AS(interpolate(unclamped, s.mesh, s.dofs), Error);

    SampledInitialData short_samples;
    CHECK_THROWS_AS(interpolate(short_samples, s.mesh, s.dofs), Error);
  }

  TEST_CASE("interface mismatch below 1e-12 relative is accepted") {
    const auto s = setup(kUnit, 2, 2, 2);
    InitialData d = piecewise_polynomial();
    d.v0 = [](double x) { return (0.5 + 0.25 * (x - 1.0)) * (1.0 + 1e-14); };
    CHECK_NOTHROW(interpolate(d, s.mesh, s.dofs));
  }

  TEST_CASE("evaluate_state agrees across interfaces and rejects points outside") {
    const auto s = setup(kUnit, 3, 4, 5);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    StateVector y = StateVector::zero(s.dofs.total_dofs);
    for (Eigen::Index i = 0; i < y.dofs(); ++i) {
      y.p(i) = normal(rng);
      y.q(i) = normal(rng);
    }
    for (double x : {1.0, 2.0}) {
      const Component left = x == 1.0 ? Component::Beam1 : Component::String;
      const Component right = x == 1.0 ? Component::String : Component::Beam2;
      const PointValue a = evaluate_component(s.mesh, s.dofs, y, left, x);
      const PointValue b = evaluate_component(s.mesh, s.dofs, y, right, x);
      CHECK(a.displacement == b.displacement);
      CHECK(a.velocity == b.velocity);
    }
    const PointValue clamped = evaluate_state(s.mesh, s.dofs, y, 0.0);
    CHECK(clamped.displacement == 0.0);
    CHECK(evaluate_state(s.mesh, s.dofs, StateVector::zero(s.dofs.total_dofs), 1.7).displacement == 0.0);
    try {
      evaluate_state(s.mesh, s.dofs, y, 3.0001);
      FAIL("expected OutOfDomain");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OutOfDomain);
    }
  }

  TEST_CASE("Galerkin nesting: energies of data in both discrete spaces agree across refinement") {
    const InitialData d = piecewise_polynomial();
    const auto coarse = setup(kUnit, 2, 3, 4);
    const auto fine = setup(kUnit, 4, 6, 8);
    const StateVector yc = interpolate(d, coarse.mesh, coarse.dofs);
    const StateVector yf = interpolate(d, fine.mesh, fine.dofs);
    const double ec = 0.5 * (yc.p.dot(coarse.pencil.S * yc.p) + yc.q.dot(coarse.pencil.M * yc.q));
    const double ef = 0.5 * (yf.p.dot(fine.pencil.S * yf.p) + yf.q.dot(fine.pencil.M * yf.q));
    CHECK(ec == doctest::Approx(ef).epsilon(1e-12));
  }

  TEST_CASE("standalone string and beam pencils have the expected sizes") {
    const auto str = assemble_string_pencil(M_PI, 1.0, 10);
    CHECK(str.dofs() == 9);
    CHECK(str.D == str.M);
    const auto beam = assemble_beam_pencil(1.0, 0.0, 10);
    CHECK(beam.dofs() == 20);
    CHECK(beam.regime == DampingCase::Conservative);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(beam.S).info() == Eigen::Success);
  }
}
