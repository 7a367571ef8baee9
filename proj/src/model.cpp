#include "nesslab/model.hpp"

#include <cmath>

namespace nesslab::model {

using fock::FockSpace;
using fock::ModeGrid;

Schedule Schedule::parse(const std::string& name) {
  if (name == "smoothstep") return Schedule{Kind::Smoothstep};
  if (name == "frozen") return Schedule{Kind::Frozen};
  throw ConfigError("unknown schedule '" + name + "'");
}

double ModelSpec::k() const {
  double k = delta;
  for (const auto& r : reservoirs) k = std::min(k, M_PI / r.beta);
  return k;
}

void ModelSpec::validate() const {
  if (!(small.omega0 > 0)) throw ConfigError("omega0 must be > 0");
  if (reservoirs.empty()) throw ConfigError("need at least one reservoir");
  for (const auto& r : reservoirs) {
    if (!(r.beta > 0)) throw ConfigError("beta must be > 0");
    if (r.modes < 2 || r.modes % 2) throw ConfigError("modes must be even and >= 2");
    if (!(r.u_max > 0)) throw ConfigError("u_max must be > 0");
    // principal-branch continuation of (1+e^{-beta z})^{-1/2} needs the strip
    // |Im z| < pi/(2 beta)
    if (std::abs(theta_im) >= 0.999 * M_PI / (2.0 * r.beta))
      throw ConfigError("theta too deep for the closed-form continuation");
  }
  if (!(theta_im < 0)) throw ConfigError("Im(theta) must be < 0");
  if (!(theta_im > -k())) throw ConfigError("theta outside I^-(k)");
  if (!(delta > 0)) throw ConfigError("delta must be > 0");
  if (!(nu < 0 && nu > -k())) throw ConfigError("nu must lie in (-k, 0)");
  if (contour_nodes < 16 || contour_nodes % 2) throw ConfigError("bad contour nodes");
  if (!(ode_tol > 0)) throw ConfigError("ode_tol must be > 0");
  if (s_samples < 2) throw ConfigError("s_samples must be >= 2");
}

ModelSpec ModelSpec::defaults() {
  ModelSpec s;
  s.reservoirs = {ReservoirSpec{1.0, 4, 4.0, Schedule{}},
                  ReservoirSpec{2.0, 4, 4.0, Schedule{}}};
  return s;
}

Complex rho_beta(double beta, Complex u) {
  const Complex den = std::exp(beta * u) + 1.0;
  if (std::abs(den) < 1e-8) throw PoleProximity("rho_beta: too close to a Fermi pole");
  return 1.0 / den;
}

Complex glued_tilde(const ReservoirSpec& res, double s, Complex u) {
  return res.schedule.h(s) * u * u * std::exp(-u * u);
}

Complex glued_tilde_ds(const ReservoirSpec& res, double s, Complex u, int order) {
  double c = 0;
  switch (order) {
    case 0: c = res.schedule.h(s); break;
    case 1: c = res.schedule.hdot(s); break;
    case 2: c = res.schedule.hddot(s); break;
    default: throw ConfigError("glued_tilde_ds: order must be 0, 1, 2");
  }
  return c * u * u * std::exp(-u * u);
}

namespace {

Complex f_beta(const ReservoirSpec& res, double s, Complex u) {
  const Complex den = 1.0 + std::exp(-res.beta * u);
  if (std::abs(den) < 1e-8) throw PoleProximity("glued pair: too close to a Fermi pole");
  return glued_tilde(res, s, u) / std::sqrt(den);
}

Complex f_sharp(const ReservoirSpec& res, double s, Complex u) {
  return I * std::conj(f_beta(res, s, -std::conj(u)));
}

}  // namespace

std::pair<Complex, Complex> glued_pair(const ReservoirSpec& res, double s, Complex u) {
  return {f_beta(res, s, u), f_sharp(res, s, u)};
}

Complex q_kernel(const ReservoirSpec& res, double s, Complex z) {
  const Complex den = 1.0 + std::exp(-res.beta * z);
  if (std::abs(den) < 1e-8) throw PoleProximity("q_kernel: too close to a Fermi pole");
  const Complex t = glued_tilde(res, s, z);
  return t * t / den;
}

Vector glue_halves(const ModeGrid& grid, const Vector& f_pos, const Vector& g_pos) {
  grid.validate_symmetric();
  const int m = grid.modes(), half = m / 2;
  if (f_pos.size() != half || g_pos.size() != half)
    throw DimensionMismatch("glue_halves: halves must have modes/2 entries");
  Vector h(m);
  for (int k = 0; k < half; ++k) {
    h(half + k) = f_pos(k);       // u_{half+k} = +pos_k
    h(half - 1 - k) = g_pos(k);   // u_{half-1-k} = -pos_k
  }
  return h;
}

std::pair<Vector, Vector> split_full(const ModeGrid& grid, const Vector& h) {
  grid.validate_symmetric();
  const int m = grid.modes(), half = m / 2;
  if (h.size() != m) throw DimensionMismatch("split_full: size mismatch");
  Vector f(half), g(half);
  for (int k = 0; k < half; ++k) {
    f(k) = h(half + k);
    g(k) = h(half - 1 - k);
  }
  return {f, g};
}

Matrix ModelOperators::pauli(int k) {
  Matrix s(2, 2);
  switch (k) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -I, I, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw ConfigError("pauli: k in 0..3");
  }
  return s;
}

ModelOperators::ModelOperators(ModelSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const double w0 = spec_.small.omega0;
  dim_ = 4;
  for (const auto& r : spec_.reservoirs) {
    ModeGrid grid = ModeGrid::symmetric(r.modes, r.u_max, 2.0 * w0);
    grid.validate_symmetric();
    spaces_.emplace_back(grid);
    dim_ *= spaces_.back().dim();
  }

  // diagonal tables: L0 = L_S + sum_i dGamma_i(u), N = sum_i N_i
  l0_diag_.resize(dim_);
  n_diag_.resize(dim_);
  const double ls[4] = {0.0, 2.0 * w0, -2.0 * w0, 0.0};
  for (int idx = 0; idx < dim_; ++idx) {
    int rem = idx;
    double e = 0, np = 0;
    for (int i = reservoirs() - 1; i >= 0; --i) {
      const auto& f = spaces_[i];
      const int k = rem % f.dim();
      rem /= f.dim();
      const int m = f.modes();
      for (int j = 0; j < m; ++j)
        if (k >> (m - 1 - j) & 1) {
          e += f.grid().energies(j);
          np += 1.0;
        }
    }
    l0_diag_(idx) = ls[rem] + e;
    n_diag_(idx) = np;
  }

  // Omega = Omega_S (x) vac (x) ... (x) vac, Omega_S = (e0 e0 + e1 e1)/sqrt(2)
  omega_ = Vector::Zero(dim_);
  const int fdim = dim_ / 4;
  omega_(0 * fdim) = 1.0 / std::sqrt(2.0);
  omega_(3 * fdim) = 1.0 / std::sqrt(2.0);
}

Matrix ModelOperators::L0() const {
  Matrix m = Matrix::Zero(dim_, dim_);
  m.diagonal() = l0_diag_.cast<Complex>();
  return m;
}

Matrix ModelOperators::embed_reservoir(int i, const Matrix& small4,
                                       const Matrix& field) const {
  std::vector<Matrix> factors;
  factors.push_back(small4);
  for (int r = 0; r < reservoirs(); ++r)
    factors.push_back(r == i ? field
                             : Matrix(Matrix::Identity(spaces_[r].dim(), spaces_[r].dim())));
  return fock::assemble(factors);
}

ModelOperators::DeformedParts ModelOperators::deformed_parts(Complex theta) const {
  DeformedParts out;
  out.l_diag.resize(dim_);
  for (int idx = 0; idx < dim_; ++idx)
    out.l_diag(idx) = l0_diag_(idx) + theta * n_diag_(idx);

  const Matrix a_slot = fock::kron(pauli(1), pauli(0));  // sigma1 (x) 1
  const Matrix b_slot = fock::kron(pauli(0), pauli(1));  // 1 (x) sigma1
  const Complex thetabar = std::conj(theta);
  for (int i = 0; i < reservoirs(); ++i) {
    const auto& res = spec_.reservoirs[i];
    const auto& f = spaces_[i];
    const int m = f.modes();
    // coefficient functions at unit schedule; annihilator slots carry the
    // analytic continuation of the conjugated functions so that the family is
    // analytic in theta (and exactly unitary-equivalent for real theta)
    Vector f1(m), f2(m), g1(m), g2(m);
    for (int j = 0; j < m; ++j) {
      const double u = f.grid().energies(j);
      f2(j) = f_beta(res, 0.0, u + theta) / res.schedule.h(0.0);
      f1(j) = std::conj(f_beta(res, 0.0, u + thetabar)) / res.schedule.h(0.0);
      g2(j) = std::exp(-res.beta * (u + theta) / 2.0) * f_sharp(res, 0.0, u + theta) /
              res.schedule.h(0.0);
      g1(j) = std::conj(std::exp(res.beta * (u + thetabar) / 2.0) *
                        f_sharp(res, 0.0, u + thetabar)) /
              res.schedule.h(0.0);
    }
    const Matrix phi = f.a_coeff(f1) + f.a_dag_coeff(f2);
    const Matrix psi = f.parity() * (f.a_coeff(g1) + f.a_dag_coeff(g2));
    out.w.push_back(embed_reservoir(i, a_slot, phi) -
                    I * embed_reservoir(i, b_slot, psi));
  }
  return out;
}

Matrix ModelOperators::deformed(double s, Complex theta) const {
  DeformedParts p = deformed_parts(theta);
  Matrix l = Matrix::Zero(dim_, dim_);
  l.diagonal() = p.l_diag;
  for (int i = 0; i < reservoirs(); ++i)
    l += (spec_.g * spec_.reservoirs[i].schedule.h(s)) * p.w[i];
  return l;
}

Matrix ModelOperators::c_liouvillean(double s) const {
  DeformedParts p = deformed_parts(Complex(0.0, 0.0));
  Matrix l = Matrix::Zero(dim_, dim_);
  l.diagonal() = p.l_diag;
  for (int i = 0; i < reservoirs(); ++i)
    l += (spec_.g * spec_.reservoirs[i].schedule.h(s)) * p.w[i].adjoint();
  const double res = (l * omega_).norm();
  if (res > 1e-10)
    throw KernelViolation("c_liouvillean: ||L_C Omega|| = " + std::to_string(res));
  return l;
}

Matrix ModelOperators::standard_interaction(double s) const {
  const Matrix a_slot = fock::kron(pauli(1), pauli(0));
  const Matrix b_slot = fock::kron(pauli(0), pauli(1));
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int i = 0; i < reservoirs(); ++i) {
    const auto& res = spec_.reservoirs[i];
    const auto& f = spaces_[i];
    const int m = f.modes();
    Vector fb(m), fs(m);
    for (int j = 0; j < m; ++j) {
      auto [b, sharp] = glued_pair(res, s, f.grid().energies(j));
      fb(j) = b;
      fs(j) = sharp;
    }
    const Matrix phi = f.a(fb) + f.a_dag(fb);
    const Matrix psi = f.parity() * (f.a(fs) + f.a_dag(fs));
    out += embed_reservoir(i, a_slot, phi) - I * embed_reservoir(i, b_slot, psi);
  }
  return out;
}

Matrix ModelOperators::represented_V(double s) const {
  const Matrix a_slot = fock::kron(pauli(1), pauli(0));
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int i = 0; i < reservoirs(); ++i) {
    const auto& res = spec_.reservoirs[i];
    const auto& f = spaces_[i];
    const int m = f.modes();
    Vector fb(m);
    for (int j = 0; j < m; ++j) fb(j) = glued_pair(res, s, f.grid().energies(j)).first;
    out += embed_reservoir(i, a_slot, Matrix(f.a(fb) + f.a_dag(fb)));
  }
  return out;
}

double ModelOperators::kernel_residual(double s) const {
  DeformedParts p = deformed_parts(Complex(0.0, 0.0));
  Vector v = Vector::Zero(dim_);
  for (int i = 0; i < reservoirs(); ++i)
    v += (spec_.g * spec_.reservoirs[i].schedule.h(s)) * (p.w[i].adjoint() * omega_);
  for (int idx = 0; idx < dim_; ++idx) v(idx) += l0_diag_(idx) * omega_(idx);
  return v.norm();
}

Matrix ModelOperators::observable(const Matrix& a_small) const {
  if (a_small.rows() != 2 || a_small.cols() != 2)
    throw DimensionMismatch("observable: small-system observables are 2x2");
  std::vector<Matrix> factors;
  factors.push_back(fock::kron(a_small, pauli(0)));
  for (int r = 0; r < reservoirs(); ++r)
    factors.push_back(Matrix::Identity(spaces_[r].dim(), spaces_[r].dim()));
  return fock::assemble(factors);
}

std::vector<double> boundary_limit_check(const ModelOperators& ops, double s, Complex z,
                                         const std::vector<double>& theta_im_seq) {
  for (std::size_t i = 1; i < theta_im_seq.size(); ++i)
    if (!(theta_im_seq[i] > theta_im_seq[i - 1]))
      throw ConfigError("boundary_limit_check: Im(theta) must increase to 0");
  const Matrix l_real = ops.deformed(s, Complex(0.0, 0.0));
  linops::ShiftedSolver base(l_real, z);
  std::vector<double> out;
  for (double ti : theta_im_seq) {
    const Matrix l = ops.deformed(s, Complex(0.0, ti));
    linops::ShiftedSolver def(l, z);
    // power iteration for || R_def - R_base ||
    Vector v = random_vector(ops.dim(), 2024);
    v.normalize();
    double nrm = 0;
    for (int it = 0; it < 60; ++it) {
      Vector w = def.solve(v) - base.solve(v);
      Vector u = def.solve_adjoint(w) - base.solve_adjoint(w);
      const double nn = std::sqrt(u.norm());
      if (u.norm() == 0) break;
      v = u / u.norm();
      if (std::abs(nn - nrm) < 1e-4 * std::max(nn, 1e-30)) {
        nrm = nn;
        break;
      }
      nrm = nn;
    }
    out.push_back(nrm);
  }
  return out;
}

namespace {

// sup over the strip |Im z| < delta of the squared H2 integrand, by quadrature
double strip_norm_sq(const ReservoirSpec& res, double delta, int ds_order, double s) {
  const double L = std::max(12.0, res.u_max + 8.0);
  const int nu_grid = 9, n_u = 4001;
  double best = 0;
  for (int iv = 0; iv < nu_grid; ++iv) {
    const double v = -delta * 0.999 + (2 * 0.999 * delta) * iv / (nu_grid - 1);
    double acc = 0;
    for (int iu = 0; iu < n_u; ++iu) {
      const double u = -L + 2.0 * L * iu / (n_u - 1);
      const Complex fz = glued_tilde_ds(res, s, Complex(u, v), ds_order);
      const double w = (iu == 0 || iu == n_u - 1) ? 0.5 : 1.0;
      acc += w * std::exp(-res.beta * u) * std::norm(fz);
    }
    acc *= 2.0 * L / (n_u - 1);
    best = std::max(best, acc);
  }
  return best;
}

double plain_strip_norm_sq(const ReservoirSpec& res, double delta, double s) {
  const double L = std::max(12.0, res.u_max + 8.0);
  const int nu_grid = 9, n_u = 4001;
  double best = 0;
  for (int iv = 0; iv < nu_grid; ++iv) {
    const double v = -delta * 0.999 + (2 * 0.999 * delta) * iv / (nu_grid - 1);
    double acc = 0;
    for (int iu = 0; iu < n_u; ++iu) {
      const double u = -L + 2.0 * L * iu / (n_u - 1);
      const double w = (iu == 0 || iu == n_u - 1) ? 0.5 : 1.0;
      acc += w * std::norm(glued_tilde(res, s, Complex(u, v)));
    }
    acc *= 2.0 * L / (n_u - 1);
    best = std::max(best, acc);
  }
  return best;
}

}  // namespace

ModelAssumptions assumption_checks(const ModelSpec& spec, int s_samples) {
  spec.validate();
  ModelAssumptions rep;
  rep.k = spec.k();
  rep.nu = spec.nu;
  const double w0 = spec.small.omega0;

  rep.b1_min = 1e300;
  for (int i = 0; i < s_samples; ++i) {
    const double s = double(i) / (s_samples - 1);
    double b1 = 0;
    for (const auto& r : spec.reservoirs) b1 += std::abs(glued_tilde(r, s, 2.0 * w0));
    rep.b1_min = std::min(rep.b1_min, b1);
  }
  if (!(rep.b1_min > 0))
    throw AssumptionViolated("B1: Fermi golden rule weight vanishes");

  // H2-strip norms (B2/B3) and the interaction norm bound they imply
  double c_sum = 0;
  for (const auto& r : spec.reservoirs) {
    double nf = 0, ne = 0;
    for (double s : {0.0, 0.5, 1.0}) {
      nf = std::max(nf, std::sqrt(plain_strip_norm_sq(r, spec.delta, s)));
      ne = std::max(ne, std::sqrt(strip_norm_sq(r, spec.delta, 0, s)));
    }
    for (int j = 0; j < 3; ++j) {
      double nj = 0;
      for (double s : {0.0, 0.5, 1.0})
        nj = std::max(nj, std::sqrt(strip_norm_sq(r, spec.delta, j, s)));
      if (!std::isfinite(nj)) throw AssumptionViolated("B2/B3: strip norm diverged");
      rep.strip_norm[j] = std::max(rep.strip_norm[j], nj);
    }
    // |1 + e^{-beta z}|^{-1/2} stays below ~1 on the admissible strip
    double zfac = 0;
    for (int iv = 0; iv < 9; ++iv) {
      const double v = -spec.delta * 0.999 + 2 * 0.999 * spec.delta * iv / 8;
      for (int ix = 0; ix <= 40; ++ix) {
        const double x = -10.0 + 0.5 * ix;
        zfac = std::max(zfac, 1.0 / std::sqrt(std::abs(
                                   1.0 + std::exp(-r.beta * Complex(x, v)))));
      }
    }
    c_sum += zfac * (3.0 * nf + ne);
  }
  rep.c_bound = 0.5 * std::sqrt(2.0) * c_sum;
  rep.g1 = 0.999 * (rep.k - std::abs(rep.nu)) / (2.0 * rep.c_bound);
  rep.g_in_window = std::abs(spec.g) < rep.g1 / 2.0;
  if (!rep.g_in_window)
    rep.notes.push_back(
        "coupling exceeds the sufficient-condition window g1/2 = " +
        std::to_string(rep.g1 / 2.0) + "; resonance isolation is verified numerically");

  const double win_lo = -rep.k, win_hi = -(rep.k + std::abs(rep.nu)) / 2.0;
  if (!(spec.theta_im > win_lo && spec.theta_im < win_hi))
    rep.notes.push_back("theta outside the (nu, k) window (" + std::to_string(win_lo) +
                        ", " + std::to_string(win_hi) + ")");
  rep.notes.push_back(
      "B4: test observables restricted to the small system, for which the "
      "deformed pairing is the plain pairing");

  // measured interaction norm against the bound
  ModelOperators ops(spec);
  auto parts = ops.deformed_parts(spec.theta());
  for (double s : {0.0, 0.5, 1.0}) {
    Matrix v = Matrix::Zero(ops.dim(), ops.dim());
    for (int i = 0; i < ops.reservoirs(); ++i)
      v += spec.reservoirs[i].schedule.h(s) * parts.w[i];
    rep.vtot_norm = std::max(rep.vtot_norm, linops::op_norm(v));
  }
  if (rep.vtot_norm > rep.c_bound)
    throw AssumptionViolated("interaction norm exceeds its strip-norm bound");
  return rep;
}

ModularCheck modular_identity_check(double beta, int half_modes, double u_max,
                                    std::uint64_t seed) {
  if (half_modes < 1 || half_modes > 3)
    throw ConfigError("modular_identity_check: half_modes must be 1..3");
  ModeGrid sym = ModeGrid::symmetric(2 * half_modes, u_max, 0.0);
  ModeGrid half;
  half.energies.resize(half_modes);
  half.weights.resize(half_modes);
  for (int k = 0; k < half_modes; ++k) {
    half.energies(k) = sym.energies(half_modes + k);
    half.weights(k) = sym.weights(half_modes + k);
  }
  FockSpace f(half);
  const int d = f.dim(), dd = d * d;

  Vector rho(half_modes), sq_rho(half_modes), sq_rhobar(half_modes);
  for (int j = 0; j < half_modes; ++j) {
    rho(j) = rho_beta(beta, half.energies(j));
    sq_rho(j) = std::sqrt(rho(j).real());
    sq_rhobar(j) = std::sqrt(1.0 - rho(j).real());
  }

  auto pi_b = [&](const Vector& fn) {
    Vector left = fn, right = fn;
    for (int j = 0; j < half_modes; ++j) {
      left(j) = sq_rhobar(j) * fn(j);
      right(j) = sq_rho(j) * std::conj(fn(j));
    }
    return Matrix(fock::kron(f.a(left), Matrix::Identity(d, d)) +
                  fock::kron(f.parity(), f.a_dag(right)));
  };

  // L_R = dGamma(u) (x) 1 - 1 (x) dGamma(u); Delta^{1/2} = exp(-beta L_R / 2)
  Vector u(half_modes);
  for (int j = 0; j < half_modes; ++j) u(j) = half.energies(j);
  Matrix dg = f.dGamma(u);
  Vector delta_half(dd);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      delta_half(a * d + b) =
          std::exp(-beta * (dg(a, a).real() - dg(b, b).real()) / 2.0);

  auto phase = [](int occ) {
    const int n = __builtin_popcount(unsigned(occ));
    return (n * (n - 1) / 2) % 2 ? -1.0 : 1.0;
  };
  auto apply_J = [&](const Vector& v) {
    Vector out(dd);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        out(b * d + a) = phase(a) * phase(b) * std::conj(v(a * d + b));
    return out;
  };

  Vector omega = Vector::Zero(dd);
  omega(0) = 1.0;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  auto rand_fn = [&]() {
    Vector fn(half_modes);
    for (int j = 0; j < half_modes; ++j) fn(j) = Complex(nd(rng), nd(rng));
    return fn;
  };

  std::vector<Matrix> algebra;
  algebra.push_back(Matrix::Identity(dd, dd));
  Vector f1 = rand_fn(), f2 = rand_fn();
  algebra.push_back(pi_b(f1));
  algebra.push_back(pi_b(f1).adjoint());
  algebra.push_back(pi_b(f1).adjoint() * pi_b(f2));
  algebra.push_back(pi_b(f1) * pi_b(f2));
  algebra.push_back(pi_b(f1) * pi_b(f2).adjoint() + 0.7 * I * pi_b(f2));

  ModularCheck out;
  for (const auto& a : algebra) {
    Vector lhs = apply_J(Vector(delta_half.asDiagonal() * (a * omega)));
    Vector rhs = a.adjoint() * omega;
    out.identity_residual = std::max(out.identity_residual, (lhs - rhs).norm());
  }

  // two-point function of the quasi-free state
  Complex got = omega.dot(Matrix(pi_b(f1).adjoint() * pi_b(f1)) * omega);
  Complex expect = 0;
  for (int j = 0; j < half_modes; ++j)
    expect += half.weights(j) * rho(j) * std::norm(f1(j));
  out.two_point_residual = std::abs(got - expect);
  return out;
}

}  // namespace nesslab::model
