#pragma once

#include "nesslab/linops.hpp"
#include "nesslab/ode.hpp"
#include "nesslab/types.hpp"

namespace nesslab::adiabatic {

/// Differentiable family s in [0,1] -> A(s). If no closed-form derivative is
/// supplied, a central finite difference with step 1e-5 is used.
struct GeneratorFamily {
  int dim = 0;
  std::function<Matrix(double)> evaluate;
  std::function<Matrix(double)> derivative;  // optional

  Matrix A(double s) const { return evaluate(s); }
  Matrix Adot(double s) const;
};

/// Riesz projection data at one value of s.
struct RieszProjection {
  double s = 0;
  Complex lambda;   // refined tracked eigenvalue
  double gap = 0;   // distance to the rest of the spectrum
  Matrix P;
  Matrix Pdot;
  linops::Contour contour;
};

struct PropagatorGrid {
  std::vector<double> s;
  std::vector<Matrix> U;
  double tau = 0;
  std::string method;
  double tolerance = 0;
};

struct SweepResult {
  std::vector<double> parameter;  // tau or g, strictly increasing
  std::vector<double> defect;
  double slope = 0;
  double fit_residual = 0;
  bool degenerate = false;  // all defects below the noise floor, fit skipped
};

struct AssumptionSample {
  double s = 0;
  double abscissa = 0;    // numerical abscissa of -A(s)
  Complex lambda;
  double gap = 0;
  double p_smoothness = 0;  // finite-difference norm of dP/ds
};

struct AssumptionReport {
  std::vector<AssumptionSample> samples;
  double max_abscissa = 0;
  double min_gap = 0;
  double propagator_bound = 1;  // quasi-contraction constant, sup_s cond(V(s))
  bool strict_contraction = false;
  std::vector<std::string> violations;
};

/// Track the eigenvalue branch continuing lambda0 and sample the generator
/// family diagnostics (contraction surrogate, gap, projection smoothness)
/// along the s-grid. Throws EigenvalueLost when the gap collapses below 1e-6.
AssumptionReport assumption_report(const GeneratorFamily& fam, Complex lambda0,
                                   int s_samples = 21);

/// Riesz projection with contour radius gap/2 around the tracked eigenvalue;
/// Pdot by differentiation under the contour integral. Throws GapViolation
/// when a second eigenvalue enters the contour.
RieszProjection riesz_projection(const GeneratorFamily& fam, double s, Complex lambda_est,
                                 int nodes = 64);

/// X(s) = (1/2pi i) contour integral of R(z) Pdot R(z) dz; satisfies
/// [X, A] = [Pdot, P] up to quadrature error.
Matrix commutator_operator_X(const GeneratorFamily& fam, double s,
                             const RieszProjection& proj);

/// A(s) - (1/tau) [Pdot, P].
Matrix adiabatic_generator(const GeneratorFamily& fam, const RieszProjection& proj,
                           double tau, double s);

enum class Mode { True, Adiabatic };

/// Solve dU/ds = -tau A(s) U (or the adiabatic variant) across [0,1],
/// reporting U at every grid point.
PropagatorGrid propagate(const GeneratorFamily& fam, double tau,
                         const std::vector<double>& grid, Mode mode, Complex lambda0,
                         double tol = 1e-10);

/// Ordered product of interval exponentials with the generator frozen on each
/// subinterval (midpoint by default; `left_endpoint` freezes at the left edge).
PropagatorGrid kato_product_propagator(const GeneratorFamily& fam, double tau, int n,
                                       bool left_endpoint = false);

/// || P(s) U_a(s,0) - U_a(s,0) P(0) || per grid point.
std::vector<double> intertwining_defect(const GeneratorFamily& fam, double tau,
                                        const std::vector<double>& grid, Complex lambda0,
                                        double tol = 1e-10);

/// sup_s || U_tau(s,0) - U_a(s,0) || per tau, with a log-log slope fit.
SweepResult adiabatic_error_sweep(const GeneratorFamily& fam,
                                  const std::vector<double>& tau_list,
                                  const std::vector<double>& grid, Complex lambda0,
                                  double tol = 1e-10);

/// The 6x6 nonnormal acceptance family: unitary path exp(sK) conjugating a
/// fixed spectrum plus a fixed nilpotent perturbation.
GeneratorFamily synthetic_family(std::uint64_t seed, double k_scale = 0.012,
                                 double nil_scale = 0.1);

}  // namespace nesslab::adiabatic
