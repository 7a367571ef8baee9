#pragma once

#include "nesslab/model.hpp"

namespace nesslab::perturbation {

/// Cauchy principal value of integral F(u)/(c - u) du over [lo, hi] by
/// singularity subtraction: the regularized part by refined Gauss-Legendre
/// quadrature, the subtracted pole in closed form. Throws NonConvergent when
/// refinement stalls above `tol`.
double pv_integral(const std::function<double(double)>& f, double c, double lo,
                   double hi, double tol = 1e-8);

/// Second-order level-shift data, continuum closed forms.
///
/// Conventions: `shell` is the total Fermi-golden-rule weight
/// S(s) = sum_i [ |tf_i(2w0,s)|^2 + |tf_i(-2w0,s)|^2 ]; blocks are reported in
/// the orientation whose degenerate zero block annihilates (1,1) on the right.
struct GammaBlocks {
  double pv = 0;       // sum_i PV int |tf_i(u)|^2 / (2 w0 - u) du
  double shell = 0;    // S(s)
  Complex gamma2, gamma3;
  Matrix gamma01;      // 2x2 degenerate block
};

GammaBlocks gamma2_blocks(const model::ModelSpec& spec, double s);

/// E_j to second order in g from the continuum blocks:
/// E0 = 0, E1 = -i pi S g^2, E{2,3} = -+2w0 +- g^2 PV - i (pi/2) S g^2.
std::array<Complex, 4> second_order_eigenvalues(const model::ModelSpec& spec, double s,
                                                double g);

/// Exact second-order coefficients of the *truncated* generator (grid sums
/// with the deformed denominators); matches numeric resonances to O(g^4) and
/// predicts the theta drift of the truncation.
struct GridCoefficients {
  Complex e1;              // trace of the degenerate block
  Complex gamma2, gamma3;  // nondegenerate coefficients
  Matrix block01;          // 2x2 degenerate block, same orientation as GammaBlocks
};
GridCoefficients second_order_grid(const model::ModelSpec& spec, double s, Complex theta);

/// Second Taylor coefficient of the quasi-Liouvillean by the contour formula,
/// evaluated blockwise around each unperturbed eigenvalue with the one-fermion
/// kernels integrated by plain quadrature (no principal-value splitting); an
/// independent route to the same blocks as `gamma2_blocks`.
struct QuasiS2 {
  Matrix s2;          // 4x4 on the doubled small system, reported orientation
  Matrix zero_block;  // rows/cols {0, 3}
  Complex gamma2, gamma3;
};
QuasiS2 quasi_liouvillean_S2(const model::ModelSpec& spec, double s, Complex theta);

/// Numerically extracted resonances of the deformed generator paired with the
/// perturbation-theory predictions.
struct SpectrumReport {
  double s = 0, g = 0;
  Complex theta;
  std::array<Complex, 4> e_num;  // labeled j = 0..3 matching {0, 0, -2w0, +2w0}
  std::array<Complex, 4> e_pt;
  std::array<double, 4> residual;
  double overlap_ratio = 0;  // Omega-overlap separation of the near-zero pair
};

SpectrumReport numeric_resonances(const model::ModelSpec& spec, double s, double g,
                                  Complex theta);

struct ThetaScan {
  std::vector<double> theta_im;
  std::vector<std::array<Complex, 4>> e_num;  // per theta
  double max_drift = 0;        // max pairwise resonance movement
  double predicted_floor = 0;  // truncation drift predicted by grid coefficients
};
ThetaScan theta_independence(const model::ModelSpec& spec, double s, double g,
                             const std::vector<double>& theta_im_list);

/// || P_g(s,theta) - P_0 || with P_g built by contour integration of the
/// deformed resolvent around the resonance clusters {0, -2w0, +2w0}.
double projection_distance(const model::ModelSpec& spec, double s, double g,
                           Complex theta);

/// Residual-vs-g sweep at fixed (s, theta): the g-independent truncation-floor
/// coefficient F_j = (E_num - E_pt)/g^2 measured at the smallest g is removed
/// before the order fit.
struct PtSweep {
  std::vector<double> g_list;
  std::vector<std::array<Complex, 4>> e_num;   // per g
  std::vector<std::array<Complex, 4>> e_pt;    // per g
  std::array<Complex, 4> floor_coeff;          // measured at g_list.front()
  std::vector<std::array<double, 4>> adjusted; // |E_num - E_pt - F g^2|
  std::array<double, 3> slope;                 // fit for j = 1, 2, 3 over g > g_min
  std::array<double, 3> fit_residual;
};
PtSweep pt_compare_sweep(const model::ModelSpec& spec, double s, Complex theta,
                         const std::vector<double>& g_list);

}  // namespace nesslab::perturbation
