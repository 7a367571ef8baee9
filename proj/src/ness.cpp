#include "nesslab/ness.hpp"

#include <lapacke.h>

#include <cmath>

namespace nesslab::ness {

using model::ModelOperators;
using model::ModelSpec;

namespace {

// LU-factored bordered system [[L, Omega], [Omega^H, 0]]; nonsingular exactly
// when the zero eigenvalue of L is simple and not orthogonal to Omega.
class BorderedSolver {
 public:
  BorderedSolver(const Matrix& l, const Vector& omega) : n_(static_cast<int>(l.rows())) {
    lu_.resize(n_ + 1, n_ + 1);
    lu_.topLeftCorner(n_, n_) = l;
    lu_.topRightCorner(n_, 1) = omega;
    lu_.bottomLeftCorner(1, n_) = omega.adjoint();
    lu_(n_, n_) = 0.0;
    ipiv_.resize(n_ + 1);
    int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n_ + 1, n_ + 1,
                              reinterpret_cast<lapack_complex_double*>(lu_.data()),
                              n_ + 1, ipiv_.data());
    if (info != 0) throw ResonanceAmbiguity("bordered zero-mode system is singular");
  }

  // solve for the top block given [rhs_top; rhs_bottom]
  Vector solve(const Vector& rhs_top, Complex rhs_bottom) const {
    Vector full(n_ + 1);
    full.head(n_) = rhs_top;
    full(n_) = rhs_bottom;
    int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n_ + 1, 1,
                              reinterpret_cast<const lapack_complex_double*>(lu_.data()),
                              n_ + 1, ipiv_.data(),
                              reinterpret_cast<lapack_complex_double*>(full.data()),
                              n_ + 1);
    if (info != 0) throw ResonanceAmbiguity("bordered solve failed");
    return full.head(n_);
  }

 private:
  int n_;
  Matrix lu_;
  std::vector<int> ipiv_;
};

Matrix assemble_generator(const ModelOperators& ops,
                          const ModelOperators::DeformedParts& parts, double s,
                          double g) {
  Matrix l = Matrix::Zero(ops.dim(), ops.dim());
  l.diagonal() = parts.l_diag;
  for (int i = 0; i < ops.reservoirs(); ++i)
    l += (g * ops.spec().reservoirs[i].schedule.h(s)) * parts.w[i];
  return l;
}

// a(small) applied to the reference vector: vec(a)/sqrt(2) in the doubled
// small slot tensored with the reservoir vacuum
Vector observable_on_omega(const ModelOperators& ops, const Matrix& a_small) {
  if (a_small.rows() != 2 || a_small.cols() != 2)
    throw DimensionMismatch("observable_on_omega: 2x2 expected");
  Vector v = Vector::Zero(ops.dim());
  const int fdim = ops.dim() / 4;
  v(0 * fdim) = a_small(0, 0) / std::sqrt(2.0);
  v(1 * fdim) = a_small(0, 1) / std::sqrt(2.0);
  v(2 * fdim) = a_small(1, 0) / std::sqrt(2.0);
  v(3 * fdim) = a_small(1, 1) / std::sqrt(2.0);
  return v;
}

}  // namespace

Vector kernel_vector(const ModelOperators& ops,
                     const ModelOperators::DeformedParts& parts, double s, double g,
                     Vector* rdot) {
  const Matrix l = assemble_generator(ops, parts, s, g);
  BorderedSolver solver(l, ops.omega());
  Vector r = solver.solve(Vector::Zero(ops.dim()), 1.0);
  const double res = (l * r).norm() / std::max(1.0, r.norm());
  if (res > 1e-9)
    throw ResonanceAmbiguity("kernel vector residual " + std::to_string(res));
  if (rdot) {
    Matrix ldot = Matrix::Zero(ops.dim(), ops.dim());
    for (int i = 0; i < ops.reservoirs(); ++i)
      ldot += (g * ops.spec().reservoirs[i].schedule.hdot(s)) * parts.w[i];
    *rdot = solver.solve(Vector(-(ldot * r)), 0.0);
  }
  return r;
}

NessState ness_state(const ModelOperators& ops, double s, Complex theta, Method method) {
  const ModelSpec& spec = ops.spec();
  if (spec.g == 0.0)
    throw ResonanceAmbiguity("ness_state: zero eigenvalue is degenerate at g = 0");
  NessState st;
  st.s = s;
  st.theta = theta;
  auto parts = ops.deformed_parts(theta);

  if (method == Method::Kernel) {
    Vector r = kernel_vector(ops, parts, s, spec.g);
    st.p0g = r * ops.omega().adjoint();  // <Omega, r> = 1 normalization
    st.omega_g = r;
  } else {
    // contour of radius min(d, |Im E1|) / 2 around zero
    auto gc = perturbation::second_order_grid(spec, s, theta);
    const double e1 = std::abs(gc.e1) * spec.g * spec.g;
    if (e1 < 1e-8)
      throw ResonanceAmbiguity("ness_state: nearest resonance too close to zero");
    linops::Contour c{Complex(0.0, 0.0), e1 / 2.0, spec.contour_nodes};
    const Matrix l = assemble_generator(ops, parts, s, spec.g);
    st.p0g = linops::contour_integral(
        [&](Complex z) {
          linops::ShiftedSolver sol(l, z);
          return sol.solve(Matrix(Matrix::Identity(ops.dim(), ops.dim())));
        },
        c);
    st.omega_g = st.p0g * ops.omega();
  }

  if (linops::frob_norm(st.p0g * st.p0g - st.p0g) > 1e-9)
    throw ResonanceAmbiguity("ness_state: projection is not idempotent");
  if (std::abs(st.p0g.trace() - 1.0) > 1e-8)
    throw ResonanceAmbiguity("ness_state: projection rank is not one");
  if (std::abs(ops.omega().dot(st.omega_g)) < 1e-6)
    throw ResonanceAmbiguity("ness_state: resonance pairing with Omega degenerates");
  return st;
}

Complex steady_expectation(const NessState& state, const ModelOperators& ops,
                           const Matrix& a_small) {
  const Vector a_omega = observable_on_omega(ops, a_small);
  const Complex num = state.omega_g.dot(a_omega);
  const Complex den = state.omega_g.dot(ops.omega());
  return num / den;
}

double recurrence_horizon(const ModelSpec& spec) {
  double du = 1e300;
  for (const auto& r : spec.reservoirs) {
    auto grid = fock::ModeGrid::symmetric(r.modes, r.u_max, 2.0 * spec.small.omega0);
    for (int j = 1; j < grid.modes(); ++j)
      du = std::min(du, grid.energies(j) - grid.energies(j - 1));
  }
  return 2.0 * M_PI / du;
}

RelaxationTrace relaxation_trace(const ModelSpec& spec, const Matrix& a_small,
                                 double t_max, double dt, bool deformed,
                                 bool fit_envelope) {
  spec.validate();
  ModelOperators ops(spec);
  const Complex theta = deformed ? spec.theta() : Complex(0.0, 0.0);
  const Matrix l = ops.deformed(0.0, theta);
  auto eig = linops::eig(l);

  // Omega = sum_k alpha_k v_k ; <e^{-itL} Omega, a Omega> then separates
  Eigen::PartialPivLU<Matrix> vlu(eig.vectors);
  Vector alpha = vlu.solve(ops.omega());
  const Vector a_omega = observable_on_omega(ops, a_small);
  const int n = ops.dim();
  std::vector<int> keep;
  std::vector<Complex> coef, freq;
  int k0 = 0;
  for (int k = 1; k < n; ++k)
    if (std::abs(eig.values(k)) < std::abs(eig.values(k0))) k0 = k;
  RelaxationTrace out;
  for (int k = 0; k < n; ++k) {
    const Complex c = std::conj(alpha(k)) * eig.vectors.col(k).dot(a_omega);
    if (k == k0) {
      out.steady = c;
      continue;
    }
    if (std::abs(c) > 1e-16) {
      coef.push_back(c);
      freq.push_back(std::conj(eig.values(k)));
    }
  }

  const int steps = static_cast<int>(std::floor(t_max / dt)) + 1;
  out.t.resize(steps);
  out.value.resize(steps);
  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    Complex acc = out.steady;
    for (std::size_t k = 0; k < coef.size(); ++k)
      acc += coef[k] * std::exp(I * t * freq[k]);
    out.t[i] = t;
    out.value[i] = acc;
  }

  out.predicted_rate =
      M_PI * spec.g * spec.g * perturbation::gamma2_blocks(spec, 0.0).shell;
  if (fit_envelope) {
    // windowed log fit of |value - steady|^2; the window averages out the
    // carrier oscillation, the slope gives twice the envelope rate
    const double carrier = M_PI / spec.small.omega0;
    const int window = std::max(4, static_cast<int>(std::round(20.0 * carrier / dt)));
    std::vector<double> ts, ln;
    for (int i = window; i + window < steps; i += window / 2) {
      double acc = 0;
      for (int j = i - window; j < i + window; ++j)
        acc += std::norm(out.value[j] - out.steady);
      acc /= (2 * window);
      const double t = out.t[i];
      if (t < 0.05 * t_max || t > 0.9 * t_max) continue;
      if (acc <= 0) continue;
      ts.push_back(t);
      ln.push_back(std::log(acc));
    }
    if (ts.size() >= 4) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        sx += ts[i];
        sy += ln[i];
        sxx += ts[i] * ts[i];
        sxy += ts[i] * ln[i];
      }
      const double nn = double(ts.size());
      out.fitted_rate = -(nn * sxy - sx * sy) / (nn * sxx - sx * sx) / 2.0;
    }
  }
  return out;
}

namespace {

struct SteadyGrid {
  std::vector<double> s;
  std::vector<Complex> expectation;
};

SteadyGrid steady_grid(const ModelOperators& ops,
                       const ModelOperators::DeformedParts& parts,
                       const Vector& a_omega, int samples) {
  SteadyGrid out;
  for (int i = 0; i < samples; ++i) {
    const double s = double(i) / (samples - 1);
    Vector r = kernel_vector(ops, parts, s, ops.spec().g);
    out.s.push_back(s);
    out.expectation.push_back(r.dot(a_omega) / r.dot(ops.omega()));
  }
  return out;
}

}  // namespace

TrackingResult quasi_static_tracking(const ModelSpec& spec, double tau,
                                     const Matrix& a_small,
                                     const std::string& observable_name) {
  spec.validate();
  ModelOperators ops(spec);
  const Complex theta = spec.theta();
  auto parts = ops.deformed_parts(theta);
  const Vector a_omega = observable_on_omega(ops, a_small);
  SteadyGrid steady = steady_grid(ops, parts, a_omega, spec.s_samples);

  TrackingResult out;
  out.tau = tau;
  out.observable = observable_name;

  Vector psi0 = kernel_vector(ops, parts, 0.0, spec.g);
  Vector d(ops.dim());
  for (int i = 0; i < ops.dim(); ++i) d(i) = -I * tau * parts.l_diag(i);
  ode::Rhs rhs = [&](double s, const Matrix& psi) -> Matrix {
    Matrix acc = Matrix::Zero(psi.rows(), psi.cols());
    for (int i = 0; i < ops.reservoirs(); ++i)
      acc += (spec.g * spec.reservoirs[i].schedule.h(s)) * (parts.w[i] * psi);
    return Matrix(-I * tau * acc);
  };
  ode::Options opt;
  opt.tol = std::min(1e-12, spec.ode_tol);
  std::size_t idx = 0;
  ode::integrate_factored(d, rhs, psi0, 0.0, 1.0, steady.s,
                          [&](double s, const Matrix& psi) {
                            const Vector p = psi.col(0);
                            const Complex num = p.dot(a_omega);
                            const Complex den = p.dot(ops.omega());
                            const double defect =
                                std::abs(num / den - steady.expectation[idx]);
                            out.s.push_back(s);
                            out.defect.push_back(defect);
                            out.sup_defect = std::max(out.sup_defect, defect);
                            ++idx;
                          },
                          opt);
  return out;
}

adiabatic::SweepResult tau_sweep(const ModelSpec& spec,
                                 const std::vector<double>& tau_list,
                                 const Matrix& a_small) {
  if (tau_list.size() < 2) throw ConfigError("tau_sweep: need >= 2 values");
  adiabatic::SweepResult out;
  out.parameter = tau_list;
  out.defect.resize(tau_list.size());
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < std::int64_t(tau_list.size()); ++i) {
    try {
      out.defect[i] = quasi_static_tracking(spec, tau_list[i], a_small).sup_defect;
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  if (*std::max_element(out.defect.begin(), out.defect.end()) < 100.0 * spec.ode_tol) {
    out.degenerate = true;
    return out;
  }
  auto [slope, res] = linops::loglog_fit(out.parameter, out.defect);
  out.slope = slope;
  out.fit_residual = res;
  return out;
}

double intertwining_probe(const ModelSpec& spec, double tau, int probes,
                          std::uint64_t seed) {
  spec.validate();
  ModelOperators ops(spec);
  const Complex theta = spec.theta();
  auto parts = ops.deformed_parts(theta);
  const int n = ops.dim();

  // rdot(s) interpolated on Chebyshev nodes; analytic in s, so a small node
  // count reaches integrator tolerance
  const int cheb = 33;
  std::vector<double> nodes(cheb);
  std::vector<Vector> rdots(cheb);
  for (int k = 0; k < cheb; ++k) {
    nodes[k] = 0.5 * (1.0 - std::cos(M_PI * k / (cheb - 1)));
    Vector rd;
    kernel_vector(ops, parts, nodes[k], spec.g, &rd);
    rdots[k] = rd;
  }
  auto rdot_at = [&](double s) -> Vector {
    Complex den = 0;
    Vector num = Vector::Zero(n);
    for (int k = 0; k < cheb; ++k) {
      const double d = s - nodes[k];
      if (std::abs(d) < 1e-14) return rdots[k];
      const double w = ((k % 2) ? -1.0 : 1.0) * ((k == 0 || k == cheb - 1) ? 0.5 : 1.0);
      num += (w / d) * rdots[k];
      den += w / d;
    }
    return num / den;
  };

  // adiabatic propagation of [r(0), probes] as one block
  Matrix block(n, probes + 1);
  block.col(0) = kernel_vector(ops, parts, 0.0, spec.g);
  for (int p = 0; p < probes; ++p) {
    Vector v = random_vector(n, seed + p);
    block.col(p + 1) = v / v.norm();
  }
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = -I * tau * parts.l_diag(i);
  ode::Rhs rhs = [&](double s, const Matrix& psi) -> Matrix {
    Matrix acc = Matrix::Zero(psi.rows(), psi.cols());
    for (int i = 0; i < ops.reservoirs(); ++i)
      acc += (spec.g * spec.reservoirs[i].schedule.h(s)) * (parts.w[i] * psi);
    acc = -I * tau * acc;
    // commutator correction [Pdot, P] = |rdot><Omega| for the exact zero mode
    acc += rdot_at(s) * (ops.omega().adjoint() * psi);
    return acc;
  };
  ode::Options opt;
  opt.tol = std::min(1e-12, spec.ode_tol);
  Matrix final = ode::integrate_factored(d, rhs, block, 0.0, 1.0, {}, {}, opt);

  const Vector r1 = kernel_vector(ops, parts, 1.0, spec.g);
  double worst = 0;
  for (int p = 0; p <= probes; ++p) {
    const Vector x = final.col(p);
    // P(1) x = r(1) <Omega, x>; U_a P(0) psi_p = <Omega, psi_p> * final.col(0)
    const Complex c0 = (p == 0) ? Complex(1.0) : ops.omega().dot(block.col(p));
    const Vector lhs = r1 * ops.omega().dot(x);
    const Vector rhs_v = final.col(0) * c0;
    worst = std::max(worst, (lhs - rhs_v).norm());
  }
  return worst;
}

FamilyReport family_report(const ModelSpec& spec, int s_samples) {
  spec.validate();
  ModelOperators ops(spec);
  const Complex theta = spec.theta();
  auto parts = ops.deformed_parts(theta);
  FamilyReport rep;
  for (int i = 0; i < s_samples; ++i) {
    const double s = double(i) / (s_samples - 1);
    const Matrix l = assemble_generator(ops, parts, s, spec.g);
    Vector ev = linops::eig_values(l);
    // zero is exact; the gap is the second-smallest magnitude
    double d0 = 1e300, d1 = 1e300;
    for (int k = 0; k < ev.size(); ++k) {
      const double a = std::abs(ev(k));
      if (a < d0) {
        d1 = d0;
        d0 = a;
      } else if (a < d1) {
        d1 = a;
      }
    }
    if (d1 < 1e-6) throw EigenvalueLost("family_report: zero-resonance gap collapsed");
    rep.min_gap = std::min(rep.min_gap, d1);
    const Matrix herm = 0.5 * (I * l + (I * l).adjoint());
    rep.max_abscissa = std::max(rep.max_abscissa,
                                linops::eig_hermitian(Matrix(-herm)).maxCoeff());
  }
  const double h = 1e-4;
  Vector ra = kernel_vector(ops, parts, 0.5 - h, spec.g);
  Vector rb = kernel_vector(ops, parts, 0.5 + h, spec.g);
  rep.kernel_smoothness = (rb - ra).norm() / (2.0 * h);
  if (rep.max_abscissa > 1e-10)
    rep.notes.push_back(
        "contraction holds only up to the quasi-contraction bound exp(c g sigma); "
        "numerical abscissa " +
        std::to_string(rep.max_abscissa));
  return rep;
}

}  // namespace nesslab::ness
