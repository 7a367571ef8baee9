#pragma once

#include "nesslab/fock.hpp"
#include "nesslab/linops.hpp"
#include "nesslab/types.hpp"

namespace nesslab::model {

/// Coupling schedule h(s) on [0,1].
struct Schedule {
  enum class Kind { Smoothstep, Frozen };
  Kind kind = Kind::Smoothstep;

  // smoothstep: h(0) = 1, h(1) = 3/2, hdot(0) = hdot(1) = 0
  double h(double s) const {
    return kind == Kind::Frozen ? 1.0 : 1.0 + 0.5 * s * s * (3.0 - 2.0 * s);
  }
  double hdot(double s) const { return kind == Kind::Frozen ? 0.0 : 3.0 * s * (1.0 - s); }
  double hddot(double s) const { return kind == Kind::Frozen ? 0.0 : 3.0 - 6.0 * s; }
  static Schedule parse(const std::string& name);
  std::string name() const { return kind == Kind::Frozen ? "frozen" : "smoothstep"; }
};

struct SmallSystemSpec {
  double omega0 = 1.0;  // H_S = omega0 * sigma3; initial state is the trace state
};

struct ReservoirSpec {
  double beta = 1.0;
  int modes = 4;       // glued modes, even, symmetric about 0
  double u_max = 4.0;
  Schedule schedule;
};

struct ModelSpec {
  SmallSystemSpec small;
  std::vector<ReservoirSpec> reservoirs;
  double g = 0.05;
  double theta_im = -0.25;  // Im(theta) < 0
  double delta = 0.35;      // analyticity strip half-width used in the checks
  double nu = -0.04;        // essential-spectrum threshold parameter
  int contour_nodes = 64;
  double ode_tol = 1e-10;
  std::uint64_t seed = 12345;
  int s_samples = 201;

  double k() const;  // min(delta, pi/beta_1, ..., pi/beta_n)
  Complex theta() const { return Complex(0.0, theta_im); }
  void validate() const;
  static ModelSpec defaults();
};

/// Fermi function 1/(e^{beta u} + 1), continued to complex u away from the
/// poles at Im u = +-pi/beta.
Complex rho_beta(double beta, Complex u);

/// Entire glued form factor: h(s) * u^2 * exp(-u^2) (auxiliary space is
/// one-dimensional, so the B-norm is the absolute value).
Complex glued_tilde(const ReservoirSpec& res, double s, Complex u);
Complex glued_tilde_ds(const ReservoirSpec& res, double s, Complex u, int order);

/// (f_beta(u), f_beta^sharp(u)) by the closed forms
///   f_beta(u)  = (1 + e^{-beta u})^{-1/2} * tilde_f(u)
///   f^sharp(u) = i * conj(f_beta(-conj(u)))
/// valid on real u and continued into the admissible strip.
std::pair<Complex, Complex> glued_pair(const ReservoirSpec& res, double s, Complex u);

/// |f_beta|^2 continued: tilde_f(z)^2 / (1 + e^{-beta z}); the one-fermion
/// kernel behind every second-order formula.
Complex q_kernel(const ReservoirSpec& res, double s, Complex z);

/// Splice two half-line grid functions into one full-line grid function and
/// back (the measure lives in the grid weights, so the splice is plain).
Vector glue_halves(const fock::ModeGrid& grid, const Vector& f_pos, const Vector& g_pos);
std::pair<Vector, Vector> split_full(const fock::ModeGrid& grid, const Vector& h);

/// Assembled operators of the truncated model on
/// H = C^2 (x) C^2 (x) F_1 (x) ... (x) F_n. Pure and immutable; builders can
/// be called concurrently for different (s, theta).
class ModelOperators {
 public:
  explicit ModelOperators(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  int dim() const { return dim_; }
  int reservoirs() const { return static_cast<int>(spaces_.size()); }
  const fock::FockSpace& space(int i) const { return spaces_[i]; }

  const RealVector& l0_diag() const { return l0_diag_; }
  const RealVector& n_diag() const { return n_diag_; }
  Matrix L0() const;
  const Vector& omega() const { return omega_; }

  /// Deformed generator split into its constant diagonal part and one
  /// interaction block per reservoir at unit schedule:
  ///   L*_g(s, theta) = diag(l) + g * sum_i h_i(s) W_i.
  struct DeformedParts {
    Vector l_diag;
    std::vector<Matrix> w;
  };
  DeformedParts deformed_parts(Complex theta) const;

  /// L*_g(s, theta) = L0 + theta N + g Vtot(s, theta).
  Matrix deformed(double s, Complex theta) const;
  /// C-Liouvillean L_C(s) = adjoint of the deformed generator at theta = 0;
  /// annihilates the reference vector by construction.
  Matrix c_liouvillean(double s) const;
  /// Self-adjoint interaction I(s) of the standard Liouvillean.
  Matrix standard_interaction(double s) const;
  /// Represented perturbation pi(V(s)) (the first term of I(s)).
  Matrix represented_V(double s) const;

  double kernel_residual(double s) const;  // || L_C(s) Omega ||

  /// pi(a) for a small-system observable a (2x2).
  Matrix observable(const Matrix& a_small) const;
  static Matrix pauli(int k);

 private:
  Matrix embed_reservoir(int i, const Matrix& small4, const Matrix& field) const;

  ModelSpec spec_;
  std::vector<fock::FockSpace> spaces_;
  int dim_ = 0;
  RealVector l0_diag_, n_diag_;
  Vector omega_;
};

/// || (L*(theta) - z)^{-1} - (L*(Re theta) - z)^{-1} || along a sequence of
/// deformations with Im(theta) increasing to 0.
std::vector<double> boundary_limit_check(const ModelOperators& ops, double s, Complex z,
                                         const std::vector<double>& theta_im_seq);

struct ModelAssumptions {
  double b1_min = 0;            // min over s of sum_i |tilde_f_i(2 omega0, s)|
  double strip_norm[3] = {0, 0, 0};  // H2 norms of e^{-beta u/2} d^j/ds^j tilde_f
  double c_bound = 0;           // interaction norm bound from the strip norms
  double k = 0;
  double nu = 0;
  double g1 = 0;                // largest coupling the sufficient condition admits
  bool g_in_window = false;     // |g| < g1 / 2
  double vtot_norm = 0;         // measured sup ||Vtot(s, theta)|| on the sample grid
  std::vector<std::string> notes;
};

ModelAssumptions assumption_checks(const ModelSpec& spec, int s_samples = 21);

struct ModularCheck {
  double identity_residual = 0;   // max over algebra samples of ||J D^{1/2} a W - a* W||
  double two_point_residual = 0;  // thermal two-point function mismatch
};

/// Finite-dimensional modular-theory check in the doubled (pre-glued)
/// representation of a single reservoir with M <= 3 half-line modes.
ModularCheck modular_identity_check(double beta, int half_modes, double u_max,
                                    std::uint64_t seed);

}  // namespace nesslab::model
