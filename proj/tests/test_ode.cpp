#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "nesslab/ode.hpp"
#include "nesslab/types.hpp"

using namespace nesslab;

TEST_CASE("autonomous matrix equation reproduces the exponential") {
  Matrix a = random_matrix(5, 3, 0.5);
  a = -I * Matrix(a + a.adjoint());  // bounded trajectories
  const double tau = 7.0;
  ode::Rhs rhs = [&](double, const Matrix& u) { return Matrix(-tau * (a * u)); };
  std::vector<double> grid{0.0, 0.5, 1.0};
  std::vector<Matrix> got;
  ode::integrate(rhs, Matrix::Identity(5, 5), 0.0, 1.0, grid,
                 [&](double, const Matrix& u) { got.push_back(u); });
  REQUIRE(got.size() == 3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Matrix ref = Matrix(-tau * grid[i] * a).exp();
    CHECK((got[i] - ref).norm() < 1e-8);  // default local tolerance 1e-10
  }
}

TEST_CASE("sink is called exactly at the requested grid points") {
  ode::Rhs rhs = [](double s, const Matrix& u) { return Matrix(s * u); };
  std::vector<double> grid{0.0, 0.25, 0.7, 1.0};
  std::vector<double> seen;
  ode::integrate(rhs, Matrix::Ones(1, 1), 0.0, 1.0, grid,
                 [&](double s, const Matrix&) { seen.push_back(s); });
  REQUIRE(seen == grid);
}

TEST_CASE("scalar closed form y' = s*y") {
  ode::Rhs rhs = [](double s, const Matrix& u) { return Matrix(s * u); };
  Matrix y = ode::integrate(rhs, Matrix::Ones(1, 1), 0.0, 1.0, {}, {});
  CHECK(std::abs(y(0, 0) - std::exp(0.5)) < 1e-10);
}

TEST_CASE("factored integrator absorbs fast diagonal phases and decay") {
  // y' = D y + B y where D carries fast phases with mild sector decay, the
  // profile of a deformed free generator; B is a weak coupling
  const int n = 6;
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = Complex(-2.0 * i, -400.0 * i + 13.0);
  Matrix b = random_matrix(n, 5, 0.05);
  ode::Rhs rhs_full = [&](double, const Matrix& u) {
    return Matrix(Matrix(d.asDiagonal()) * u + b * u);
  };
  ode::Rhs rhs_part = [&](double, const Matrix& u) { return Matrix(b * u); };
  Vector y0 = random_vector(n, 9);

  Matrix full = Matrix(d.asDiagonal());
  full += b;
  Matrix ref = Matrix(full.exp()) * y0;

  ode::Stats st_plain, st_fact;
  Matrix y_plain = ode::integrate(rhs_full, y0, 0.0, 1.0, {}, {}, {}, &st_plain);
  Matrix y_fact = ode::integrate_factored(d, rhs_part, y0, 0.0, 1.0, {}, {}, {}, &st_fact);

  CHECK((y_plain - ref).norm() < 1e-7 * (1 + ref.norm()));
  CHECK((y_fact - ref).norm() < 1e-7 * (1 + ref.norm()));
  // the factored path should not pay for the fast diagonal
  CHECK(st_fact.steps * 5 < st_plain.steps);
}

TEST_CASE("factored integrator rejects growing diagonals") {
  Vector d(2);
  d << Complex(1.0, 0.0), Complex(0.0, 0.0);
  ode::Rhs rhs = [](double, const Matrix& u) { return Matrix(0.0 * u); };
  CHECK_THROWS_AS(
      ode::integrate_factored(d, rhs, Matrix::Ones(2, 1), 0.0, 1.0, {}, {}),
      ConfigError);
}

TEST_CASE("tolerance controls the global error") {
  Matrix a = random_matrix(4, 21, 1.0);
  a = -I * Matrix(a + a.adjoint());
  ode::Rhs rhs = [&](double s, const Matrix& u) {
    return Matrix((1.0 + 0.3 * std::sin(3 * s)) * (a * u));
  };
  auto run = [&](double tol) {
    ode::Options opt;
    opt.tol = tol;
    return ode::integrate(rhs, Matrix::Identity(4, 4), 0.0, 1.0, {}, {}, opt);
  };
  Matrix coarse = run(1e-6), fine = run(1e-12);
  double err = (coarse - fine).norm();
  CHECK(err < 1e-5);
  CHECK(err > 1e-13);  // coarse really is coarser
}
