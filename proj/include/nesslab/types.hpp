#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace nesslab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex I{0.0, 1.0};

// Error conditions named by the contract they guard.
struct SingularShift : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvergent : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GapViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EigenvalueLost : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StepFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Overflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PoleProximity : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct KernelViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AssumptionViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResonanceAmbiguity : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Seeded helpers; every stochastic choice in the project flows through these.
inline Matrix random_matrix(int n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = scale * Complex(nd(rng), nd(rng));
  return m;
}

inline Vector random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(nd(rng), nd(rng));
  return v;
}

// Skew-Hermitian matrix, K^H = -K, used to generate unitary paths exp(sK).
inline Matrix random_skew(int n, std::uint64_t seed, double scale = 1.0) {
  Matrix m = random_matrix(n, seed, scale);
  return 0.5 * (m - m.adjoint());
}

}  // namespace nesslab
