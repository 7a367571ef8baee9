#pragma once

#include "nesslab/types.hpp"

namespace nesslab::fock {

/// Discretization of the energy line: strictly increasing energies u_j with
/// positive quadrature weights w_j, symmetric about 0.
struct ModeGrid {
  RealVector energies;
  RealVector weights;

  int modes() const { return static_cast<int>(energies.size()); }
  void validate() const;            // increasing energies, positive weights
  void validate_symmetric() const;  // additionally symmetric about 0

  /// Symmetric grid with a node pair snapped onto +-u_snap, trapezoid weights.
  static ModeGrid symmetric(int modes, double u_max, double u_snap);
};

/// Grid inner product (f, g) = sum_j w_j conj(f_j) g_j.
Complex grid_inner(const ModeGrid& g, const Vector& f, const Vector& h);

/// 2^M-dimensional fermionic Fock space over a mode grid, realized through
/// Jordan-Wigner strings. Mode operators are cached at construction; the space
/// is immutable afterwards and safe to share across threads.
class FockSpace {
 public:
  explicit FockSpace(ModeGrid grid);

  const ModeGrid& grid() const { return grid_; }
  int dim() const { return dim_; }
  int modes() const { return grid_.modes(); }

  const Matrix& annihilator(int j) const;  // c_j, 1-based mode index
  Matrix creator(int j) const { return annihilator(j).adjoint(); }

  /// Smeared fields a(f) = sum_j sqrt(w_j) conj(f_j) c_j and its adjoint.
  Matrix a(const Vector& f) const;
  Matrix a_dag(const Vector& f) const;
  /// Annihilator with an explicitly supplied coefficient function:
  /// sum_j sqrt(w_j) k_j c_j (no conjugation; used by analytic deformations).
  Matrix a_coeff(const Vector& k) const;
  Matrix a_dag_coeff(const Vector& k) const;

  /// Second quantization of the multiplication operator h(u).
  Matrix dGamma(const Vector& h) const;
  Matrix number_operator() const;
  Matrix parity() const;  // (-1)^N

  Vector vacuum() const;

 private:
  ModeGrid grid_;
  int dim_;
  std::vector<Matrix> c_;  // cached annihilators
};

/// Kronecker product assembly in fixed factor order (left factor varies
/// slowest). OpenMP-tiled; `kron_serial` is the reference implementation.
Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_serial(const Matrix& a, const Matrix& b);
Matrix assemble(const std::vector<Matrix>& factors);

}  // namespace nesslab::fock
