#pragma once

#include "nesslab/adiabatic.hpp"
#include "nesslab/model.hpp"
#include "nesslab/perturbation.hpp"

namespace nesslab::ness {

/// Zero-energy resonance data at one rescaled time.
struct NessState {
  double s = 0;
  Complex theta;
  Matrix p0g;      // spectral projection at the zero eigenvalue, rank one
  Vector omega_g;  // P0g * Omega
};

enum class Method {
  Contour,  // Riesz integral around the zero eigenvalue
  Kernel    // bordered solve for the exact zero mode (same projection)
};

/// Spectral projection onto the zero resonance. Refuses (ResonanceAmbiguity)
/// when the nearest nonzero resonance cannot be separated from zero, e.g. at
/// g = 0 where the zero eigenvalue is doubly degenerate.
NessState ness_state(const model::ModelOperators& ops, double s, Complex theta,
                     Method method = Method::Contour);

/// <P0g Omega, a Omega> / <P0g Omega, Omega> for a small-system observable.
Complex steady_expectation(const NessState& state, const model::ModelOperators& ops,
                           const Matrix& a_small);

/// Right zero-mode r(s) of the deformed generator, normalized to
/// <Omega, r> = 1 (the left zero mode is Omega exactly); optionally its
/// s-derivative from the bordered system L rdot = -Ldot r.
Vector kernel_vector(const model::ModelOperators& ops,
                     const model::ModelOperators::DeformedParts& parts, double s,
                     double g, Vector* rdot = nullptr);

struct RelaxationTrace {
  std::vector<double> t;
  std::vector<Complex> value;   // <e^{-itL} Omega, a Omega>
  Complex steady;
  double fitted_rate = 0;       // from the windowed envelope of |value - steady|
  double predicted_rate = 0;    // pi g^2 S from the golden-rule shell weight
};

/// Expectation trace under the frozen generator at s0 = 0; `deformed` selects
/// theta or the theta = 0 variant. Computed from the validated
/// eigendecomposition of the generator.
RelaxationTrace relaxation_trace(const model::ModelSpec& spec, const Matrix& a_small,
                                 double t_max, double dt, bool deformed,
                                 bool fit_envelope = true);

/// 2 pi / (smallest spacing of the reservoir grid energies): the revival
/// horizon of the truncation; undeformed traces are meaningful below ~1/4 of it.
double recurrence_horizon(const model::ModelSpec& spec);

struct TrackingResult {
  double tau = 0;
  std::vector<double> s;
  std::vector<double> defect;
  double sup_defect = 0;
  std::string observable;
};

/// Propagate the initial NESS vector with the scaled generator and compare
/// against the instantaneous NESS expectation at every grid point.
TrackingResult quasi_static_tracking(const model::ModelSpec& spec, double tau,
                                     const Matrix& a_small,
                                     const std::string& observable_name = "");

/// sup-defect versus tau with a log-log slope fit.
adiabatic::SweepResult tau_sweep(const model::ModelSpec& spec,
                                 const std::vector<double>& tau_list,
                                 const Matrix& a_small);

/// Sampled intertwining defect of the adiabatic NESS propagator:
/// max over probe vectors of ||P0(s) U_a psi - U_a P0(0) psi|| at s = 1.
double intertwining_probe(const model::ModelSpec& spec, double tau, int probes,
                          std::uint64_t seed);

struct FamilyReport {
  double min_gap = 1e300;       // distance from 0 to the rest of the spectrum
  double max_abscissa = 0;      // numerical abscissa of -iL (contraction check)
  double kernel_smoothness = 0; // finite-difference norm of dr/ds
  std::vector<std::string> notes;
};

/// Generator-family diagnostics (contraction surrogate, uniform gap, zero-mode
/// smoothness) for s -> i L*(s, theta), sampled with the structure-aware
/// solvers: the zero mode is exact, so the gap is |E_1(s)|.
FamilyReport family_report(const model::ModelSpec& spec, int s_samples = 5);

}  // namespace nesslab::ness
