#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "nesslab/adiabatic.hpp"

using namespace nesslab;
using namespace nesslab::adiabatic;

namespace {

GeneratorFamily constant_family(const Matrix& a) {
  GeneratorFamily f;
  f.dim = static_cast<int>(a.rows());
  f.evaluate = [a](double) { return a; };
  f.derivative = [n = f.dim](double) { return Matrix(Matrix::Zero(n, n)); };
  return f;
}

// A(s) = R(s) diag(1,2) R(s)^{-1} for a smooth invertible (unitary) path R.
GeneratorFamily similarity_family(std::uint64_t seed) {
  Matrix k = random_skew(2, seed, 0.6);
  GeneratorFamily f;
  f.dim = 2;
  Vector d(2);
  d << 1.0, 2.0;
  f.evaluate = [=](double s) {
    Matrix r = (s * k).exp();
    return Matrix(r * d.asDiagonal() * r.adjoint());
  };
  f.derivative = [=](double s) {
    Matrix r = (s * k).exp();
    Matrix a = r * d.asDiagonal() * r.adjoint();
    return Matrix(k * a - a * k);
  };
  return f;
}

std::vector<double> uniform_grid(int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = double(i) / (n - 1);
  return g;
}

}  // namespace

TEST_CASE("assumption report on constant and shifting diagonal families") {
  Matrix d13(2, 2);
  d13 << 1, 0, 0, 3;
  auto rep = assumption_report(constant_family(d13), 1.0, 11);
  CHECK(rep.min_gap == doctest::Approx(2.0).epsilon(1e-12));

  GeneratorFamily shifting;
  shifting.dim = 2;
  shifting.evaluate = [](double s) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 3.0 + s;
    return m;
  };
  auto rep2 = assumption_report(shifting, 1.0, 11);
  CHECK(rep2.min_gap == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep2.samples.front().gap == doctest::Approx(2.0));
  CHECK(rep2.samples.back().gap == doctest::Approx(3.0));
}

TEST_CASE("assumption report passes on the synthetic acceptance family") {
  GeneratorFamily fam = synthetic_family(12345);
  auto rep = assumption_report(fam, 0.0, 11);
  CHECK(rep.min_gap >= 0.5);
  for (auto& v : rep.violations)
    CHECK(v.find("contraction") != std::string::npos);
}

TEST_CASE("riesz projection closed forms") {
  SUBCASE("diagonal family") {
    Matrix d12(2, 2);
    d12 << 1, 0, 0, 2;
    auto rp = riesz_projection(constant_family(d12), 0.3, 1.0);
    Matrix p_expect = Matrix::Zero(2, 2);
    p_expect(0, 0) = 1.0;
    CHECK(linops::frob_norm(rp.P - p_expect) < 1e-12);
    CHECK(linops::frob_norm(rp.Pdot) < 1e-10);
    CHECK(std::abs(rp.lambda - 1.0) < 1e-12);
  }
  SUBCASE("similarity family matches the transformed projection") {
    GeneratorFamily fam = similarity_family(5);
    Matrix k = random_skew(2, 5, 0.6);
    for (double s : {0.0, 0.4, 1.0}) {
      auto rp = riesz_projection(fam, s, 1.0);
      Matrix r = (s * k).exp();
      Matrix p0 = Matrix::Zero(2, 2);
      p0(0, 0) = 1.0;
      Matrix expect = r * p0 * r.adjoint();
      CHECK(linops::frob_norm(rp.P - expect) < 1e-8);
    }
  }
  SUBCASE("P Pdot P vanishes") {
    GeneratorFamily fam = synthetic_family(12345);
    auto rp = riesz_projection(fam, 0.37, 0.0);
    CHECK(linops::frob_norm(rp.P * rp.Pdot * rp.P) < 1e-8);
    CHECK(linops::frob_norm(rp.P * rp.P - rp.P) < 1e-9);
    Matrix a = fam.A(0.37);
    CHECK(linops::frob_norm(a * rp.P - rp.lambda * rp.P) <
          1e-8 * linops::frob_norm(a));
  }
}

TEST_CASE("commutator operator X satisfies [X, A] = [Pdot, P]") {
  SUBCASE("constant family has commuting X") {
    Matrix d12(2, 2);
    d12 << 1, 0, 0, 2;
    GeneratorFamily fam = constant_family(d12);
    auto rp = riesz_projection(fam, 0.5, 1.0);
    Matrix x = commutator_operator_X(fam, 0.5, rp);
    CHECK(linops::frob_norm(x * d12 - d12 * x) < 1e-10);
  }
  SUBCASE("similarity family residual") {
    GeneratorFamily fam = similarity_family(5);
    for (double s : {0.1, 0.6}) {
      auto rp = riesz_projection(fam, s, 1.0);
      Matrix a = fam.A(s);
      Matrix x = commutator_operator_X(fam, s, rp);
      Matrix lhs = x * a - a * x;
      Matrix rhs = rp.Pdot * rp.P - rp.P * rp.Pdot;
      CHECK(linops::frob_norm(lhs - rhs) < 1e-8);
    }
  }
  SUBCASE("uniform bound on the synthetic family") {
    GeneratorFamily fam = synthetic_family(12345);
    Complex lam = 0.0;
    for (double s : uniform_grid(9)) {
      auto rp = riesz_projection(fam, s, lam);
      lam = rp.lambda;
      Matrix x = commutator_operator_X(fam, s, rp);
      CHECK(linops::op_norm(x) < 10.0);
    }
  }
}

TEST_CASE("adiabatic generator limits") {
  GeneratorFamily fam = similarity_family(5);
  auto rp = riesz_projection(fam, 0.5, 1.0);
  Matrix a = fam.A(0.5);
  SUBCASE("tau -> infinity recovers A") {
    Matrix big = adiabatic_generator(fam, rp, 1e12, 0.5);
    CHECK(linops::frob_norm(big - a) < 1e-10);
  }
  SUBCASE("hand-assembled value at tau = 10") {
    Matrix got = adiabatic_generator(fam, rp, 10.0, 0.5);
    Matrix expect = a - (rp.Pdot * rp.P - rp.P * rp.Pdot) / 10.0;
    CHECK(linops::frob_norm(got - expect) == 0.0);
  }
}

TEST_CASE("propagation closed forms and contraction") {
  SUBCASE("constant family: both modes equal the exponential") {
    Matrix d(2, 2);
    d << Complex(0.5, 1.0), 0, 0, Complex(2.0, -0.3);
    GeneratorFamily fam = constant_family(d);
    const double tau = 3.0;
    auto grid = uniform_grid(5);
    auto ut = propagate(fam, tau, grid, Mode::True, Complex(0.5, 1.0));
    auto ua = propagate(fam, tau, grid, Mode::Adiabatic, Complex(0.5, 1.0));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      Matrix ref = Matrix(-tau * grid[i] * d).exp();
      CHECK((ut.U[i] - ref).norm() < 1e-9);
      CHECK((ua.U[i] - ut.U[i]).norm() < 1e-8);
    }
    CHECK(ut.U[0].isIdentity(0.0));
  }
  SUBCASE("contraction for an accretive normal family") {
    Matrix k = random_skew(4, 31, 0.5);
    Vector d(4);
    d << Complex(0, 0), Complex(1, 1), Complex(2, -1), Complex(0.5, 0.2);
    GeneratorFamily fam;
    fam.dim = 4;
    fam.evaluate = [=](double s) {
      Matrix r = (s * k).exp();
      return Matrix(r * d.asDiagonal() * r.adjoint());
    };
    auto ut = propagate(fam, 5.0, uniform_grid(9), Mode::True, 0.0);
    for (auto& u : ut.U) CHECK(linops::op_norm(u) <= 1.0 + 1e-8);
  }
}

TEST_CASE("kato product propagator") {
  SUBCASE("constant family is exact for any n") {
    Matrix d(2, 2);
    d << 1, 0, 0, Complex(0, 2);
    GeneratorFamily fam = constant_family(d);
    auto pg = kato_product_propagator(fam, 2.5, 3);
    Matrix ref = Matrix(-2.5 * d).exp();
    CHECK((pg.U.back() - ref).norm() < 1e-12);
  }
  SUBCASE("n-doubling converges monotonically to the ODE propagator") {
    GeneratorFamily fam = synthetic_family(12345);
    auto grid = uniform_grid(2);  // endpoint comparison
    auto ode_u = propagate(fam, 10.0, {0.0, 1.0}, Mode::True, 0.0);
    double prev = 1e300;
    for (int n : {8, 16, 32, 64}) {
      auto pg = kato_product_propagator(fam, 10.0, n);
      double defect = (pg.U.back() - ode_u.U.back()).norm();
      CHECK(defect < prev);
      prev = defect;
    }
  }
}

TEST_CASE("intertwining defect") {
  SUBCASE("constant family commutes exactly") {
    Matrix d(2, 2);
    d << 1, 0, 0, 2;
    auto defects = intertwining_defect(constant_family(d), 7.0, uniform_grid(5), 1.0);
    for (double v : defects) CHECK(v < 1e-12);
  }
  SUBCASE("synthetic family at tau = 10 stays at integrator noise") {
    GeneratorFamily fam = synthetic_family(12345);
    auto defects = intertwining_defect(fam, 10.0, uniform_grid(21), 0.0);
    for (double v : defects) CHECK(v < 1e-8);
  }
}

TEST_CASE("adiabatic error sweep") {
  SUBCASE("constant family is degenerate") {
    Matrix d(2, 2);
    d << Complex(0, 1), 0, 0, Complex(0, -2);
    auto sw = adiabatic_error_sweep(constant_family(d), {10, 100}, uniform_grid(5),
                                    Complex(0, 1));
    CHECK(sw.degenerate);
  }
  SUBCASE("synthetic family scales like 1/tau") {
    GeneratorFamily fam = synthetic_family(12345);
    auto sw = adiabatic_error_sweep(fam, {10.0, 31.6, 100.0}, uniform_grid(41), 0.0);
    REQUIRE(!sw.degenerate);
    CHECK(sw.slope == doctest::Approx(-1.0).epsilon(0.2));
    // Theorem-style bound: defect * (1 + tau) bounded across the sweep
    double c0 = sw.defect[0] * (1 + sw.parameter[0]);
    for (std::size_t i = 1; i < sw.defect.size(); ++i)
      CHECK(sw.defect[i] * (1 + sw.parameter[i]) < 3.0 * c0);
  }
}
