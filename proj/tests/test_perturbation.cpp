#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nesslab/perturbation.hpp"

using namespace nesslab;
using namespace nesslab::perturbation;
using model::ModelSpec;

namespace {

ModelSpec small_spec() {
  ModelSpec s = ModelSpec::defaults();
  s.reservoirs[0].modes = 2;
  s.reservoirs[1].modes = 2;
  return s;
}

}  // namespace

TEST_CASE("principal value closed forms") {
  SUBCASE("constant numerator on a symmetric domain vanishes") {
    CHECK(std::abs(pv_integral([](double) { return 1.0; }, 0.7, -1.3, 2.7)) < 1e-12);
  }
  SUBCASE("linear numerator over a symmetric domain") {
    // PV int u/(0 - u) du over [-1, 1] = int (-1) du = -2
    CHECK(pv_integral([](double u) { return u; }, 0.0, -1.0, 1.0) ==
          doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("two independent quadratures agree on the default kernel") {
    auto f = [](double u) { return u * u * u * u * std::exp(-2.0 * u * u); };
    const double gl = pv_integral(f, 2.0, -8.0, 12.0);
    // independent route: symmetric-point subtraction on a fine uniform grid
    const double c = 2.0, R = 10.0;
    const int n = 2000001;
    double acc = 0;
    const double fc = f(c);
    for (int i = 0; i < n; ++i) {
      const double u = c - R + 2.0 * R * i / (n - 1);
      const double w = (i == 0 || i == n - 1 ? 0.5 : 1.0) * 2.0 * R / (n - 1);
      if (std::abs(c - u) > 1e-12)
        acc += w * (f(u) - fc) / (c - u);
      else  // removable point: the integrand limit is -f'(c)
        acc += w * (f(c - 1e-5) - f(c + 1e-5)) / 2e-5;
    }
    CHECK(std::abs(gl - acc) < 1e-7);
  }
}

TEST_CASE("gamma blocks: structure and closed-form eigenvalues") {
  ModelSpec sp = small_spec();
  auto b = gamma2_blocks(sp, 0.0);
  const double w0 = sp.small.omega0;

  SUBCASE("shell weight and B1") {
    const double tf = 4.0 * std::exp(-4.0);
    CHECK(b.shell == doctest::Approx(2.0 * 2.0 * tf * tf).epsilon(1e-14));
  }
  SUBCASE("(1,1) is a kernel vector: row sums vanish") {
    Vector ones(2);
    ones << 1.0, 1.0;
    CHECK((b.gamma01 * ones).norm() < 1e-15);
  }
  SUBCASE("nonzero eigenvalue is -i pi S, exactly in closed form") {
    // trace = sum of eigenvalues and det = 0
    CHECK(std::abs(b.gamma01.determinant()) < 1e-18);
    CHECK(std::abs(b.gamma01.trace() - Complex(0.0, -M_PI * b.shell)) < 1e-12);
  }
  SUBCASE("imaginary parts of the coherence blocks are equal") {
    CHECK(b.gamma2.imag() == doctest::Approx(b.gamma3.imag()).epsilon(1e-14));
    CHECK(b.gamma2.imag() == doctest::Approx(-M_PI / 2.0 * b.shell).epsilon(1e-12));
    CHECK(b.gamma2.real() == doctest::Approx(-b.gamma3.real()).epsilon(1e-12));
  }
  SUBCASE("second-order eigenvalue assembly") {
    auto e = second_order_eigenvalues(sp, 0.0, 0.05);
    CHECK(e[0] == Complex(0.0, 0.0));
    CHECK(std::abs(e[1] - Complex(0.0, -M_PI * b.shell * 0.0025)) < 1e-15);
    CHECK(std::abs(e[3] - (2.0 * w0 + 0.0025 * b.gamma3)) < 1e-15);
    SUBCASE("even in g") {
      auto em = second_order_eigenvalues(sp, 0.0, -0.05);
      for (int j = 0; j < 4; ++j) CHECK(std::abs(e[j] - em[j]) == 0.0);
    }
  }
}

TEST_CASE("quasi-Liouvillean second coefficient cross-checks the gamma blocks") {
  // The contour route integrates the one-fermion kernels on the deformed line
  // with no principal-value splitting; the closed forms use Plemelj plus a
  // subtracted PV quadrature. Both must land on the same blocks.
  ModelSpec sp = small_spec();
  const Complex theta(0.0, -0.25);
  auto s2 = quasi_liouvillean_S2(sp, 0.3, theta);
  auto b = gamma2_blocks(sp, 0.3);
  CHECK(std::abs(s2.gamma3 - b.gamma3) < 1e-7);
  CHECK(std::abs(s2.gamma2 - b.gamma2) < 1e-7);
  CHECK(linops::frob_norm(s2.zero_block - b.gamma01) < 1e-7);
  SUBCASE("kernel vector (1,1) annihilated") {
    Vector ones(2);
    ones << 1.0, 1.0;
    CHECK((s2.zero_block * ones).norm() < 1e-7);
  }
  SUBCASE("off-diagonal blocks of S2 between different towers vanish") {
    CHECK(std::abs(s2.s2(0, 1)) < 1e-9);
    CHECK(std::abs(s2.s2(1, 0)) < 1e-9);
    CHECK(std::abs(s2.s2(2, 3)) < 1e-9);
  }
  SUBCASE("first order vanishes: the interaction has no vacuum block") {
    model::ModelOperators ops(sp);
    Matrix v = ops.deformed(0.3, theta) - ops.L0().eval();
    for (int idx = 0; idx < ops.dim(); ++idx) v(idx, idx) -= theta * ops.n_diag()(idx);
    const int fdim = ops.dim() / 4;
    for (int m = 0; m < 4; ++m)
      for (int mm = 0; mm < 4; ++mm)
        CHECK(std::abs(v(m * fdim, mm * fdim)) == 0.0);
  }
}

TEST_CASE("grid coefficients reproduce the numeric resonances to O(g^4)") {
  ModelSpec sp = small_spec();
  const Complex theta(0.0, -0.25);
  auto gc = second_order_grid(sp, 0.0, theta);
  for (double g : {0.01, 0.02}) {
    auto rep = numeric_resonances(sp, 0.0, g, theta);
    CHECK(std::abs(rep.e_num[0]) < 1e-9);
    CHECK(std::abs(rep.e_num[1] - g * g * gc.e1) < 100 * g * g * g * g);
    CHECK(std::abs(rep.e_num[2] - (-2.0 + g * g * gc.gamma2)) < 100 * g * g * g * g);
    CHECK(std::abs(rep.e_num[3] - (2.0 + g * g * gc.gamma3)) < 100 * g * g * g * g);
    CHECK(rep.overlap_ratio >= 10.0);
    for (int j = 0; j < 4; ++j) CHECK(rep.e_num[j].imag() <= 1e-9);
  }
  SUBCASE("grid block kills (1,1) exactly (exact zero mode of the truncation)") {
    Vector ones(2);
    ones << 1.0, 1.0;
    CHECK((gc.block01 * ones).norm() < 1e-14);
  }
}

TEST_CASE("residual sweep fits the g^4 order after floor subtraction") {
  ModelSpec sp = small_spec();
  auto sweep = pt_compare_sweep(sp, 0.0, Complex(0.0, -0.25),
                                {0.02, 0.035, 0.05, 0.07, 0.1});
  for (int j = 0; j < 3; ++j) CHECK(sweep.slope[j] >= 3.5);
  // adjusted residual at the anchor coupling is zero by construction
  for (int j = 1; j < 4; ++j) CHECK(sweep.adjusted[0][j] < 1e-14);
}

TEST_CASE("theta independence of the resonances") {
  ModelSpec sp = small_spec();
  auto scan = theta_independence(sp, 0.0, 0.05, {-0.2, -0.25, -0.3});
  CHECK(scan.max_drift <= 1e-6 + scan.predicted_floor);
  SUBCASE("at g = 0 the zero-particle eigenvalues do not move with theta") {
    ModelSpec s0 = small_spec();
    s0.g = 0.0;
    model::ModelOperators ops(s0);
    const int fdim = ops.dim() / 4;
    for (double ti : {-0.2, -0.3}) {
      Matrix l = ops.deformed(0.0, Complex(0.0, ti));
      for (int m = 0; m < 4; ++m)
        CHECK(std::abs(l(m * fdim, m * fdim).imag()) == 0.0);
    }
  }
}

TEST_CASE("projection distance") {
  ModelSpec sp = small_spec();
  const Complex theta(0.0, -0.25);
  SUBCASE("g = 0 gives distance zero") {
    CHECK(projection_distance(sp, 0.0, 0.0, theta) < 1e-10);
  }
  SUBCASE("strict bound and monotone growth in |g|") {
    double prev = 0.0;
    for (double g : {0.01, 0.02, 0.05}) {
      const double d = projection_distance(sp, 0.0, g, theta);
      CHECK(d < 1.0);
      CHECK(d > prev);
      prev = d;
    }
  }
}
