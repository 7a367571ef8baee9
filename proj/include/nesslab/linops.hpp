#pragma once

#include <functional>

#include "nesslab/types.hpp"

namespace nesslab::linops {

/// Circle contour for spectral quadrature: nodes equispaced on
/// center + radius * exp(2*pi*i*k/nodes).
struct Contour {
  Complex center;
  double radius = 0.0;
  int nodes = 64;

  void validate() const;
  Complex point(int k) const;
};

/// Eigendecomposition of a dense non-Hermitian complex matrix.
/// `residual` is ||A*V - V*diag(lambda)|| / ||A||; decompositions reported by
/// `eig` always satisfy residual <= 1e-10 or an exception is thrown.
struct EigenDecomposition {
  Vector values;
  Matrix vectors;       // right eigenvectors, one per column
  double residual = 0;  // reconstruction residual relative to ||A||
  std::vector<double> condition;  // 1/|v_l^H v_r| per eigenvalue
};

double op_norm(const Matrix& a);         // spectral norm (SVD-free power iteration)
double frob_norm(const Matrix& a);

/// Full eigendecomposition (LAPACK zgeev), validated by reconstruction residual.
EigenDecomposition eig(const Matrix& a);
/// Eigenvalues only (no eigenvectors); much cheaper at large dimension.
Vector eig_values(const Matrix& a);
/// Eigenvalues of a Hermitian matrix (LAPACK zheev).
RealVector eig_hermitian(const Matrix& a);

/// Reusable LU factorization of (z - A); backs resolvents and inverse iteration.
class ShiftedSolver {
 public:
  ShiftedSolver(const Matrix& a, Complex z);
  Vector solve(const Vector& rhs) const;
  Matrix solve(const Matrix& rhs) const;
  /// Solve with (z - A)^H instead of (z - A).
  Vector solve_adjoint(const Vector& rhs) const;
  int dim() const { return n_; }

 private:
  int n_;
  Matrix lu_;
  std::vector<int> ipiv_;
};

/// R(z) = (z - A)^{-1} with a multiply-back residual check.
/// Throws SingularShift when the solve fails or the residual exceeds
/// tol * cond-estimate.
Matrix resolvent(const Matrix& a, Complex z, double tol = 1e-10);

/// (1/2pi i) * contour integral of f over the circle, trapezoidal rule.
/// Node evaluations run in OpenMP blocks; the block accumulation order is
/// fixed, so results are independent of the thread count.
Matrix contour_integral(const std::function<Matrix(Complex)>& f, const Contour& c);
/// Reference implementation with a plain serial loop; kept for testing.
Matrix contour_integral_serial(const std::function<Matrix(Complex)>& f, const Contour& c);

/// Node-doubling convergence check: integrates with c.nodes and 2*c.nodes and
/// throws NonConvergent if the results differ by more than tol.
Matrix contour_integral_checked(const std::function<Matrix(Complex)>& f, const Contour& c,
                                double tol = 1e-10);

/// Contour integral of R(z) * inner(z) * rhs-columns without forming full
/// resolvents; one LU per node, applied to the given columns.
Matrix contour_apply(const Matrix& a, const Contour& c, const Matrix& rhs);

/// Dense matrix exponential (scaling and squaring).
Matrix expm(const Matrix& a);

/// e^{tA} v. Throws Overflow when ||tA|| exceeds `cap`.
Vector expm_action(const Matrix& a, double t, const Vector& v, double cap = 1e4);

/// Least-squares slope of log(y) vs log(x); returns {slope, rms residual}.
std::pair<double, double> loglog_fit(const std::vector<double>& x,
                                     const std::vector<double>& y);

}  // namespace nesslab::linops
