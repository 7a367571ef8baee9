#include "nesslab/adiabatic.hpp"

#include <cmath>
#include <memory>
#include <unsupported/Eigen/MatrixFunctions>

namespace nesslab::adiabatic {

using linops::Contour;

Matrix GeneratorFamily::Adot(double s) const {
  if (derivative) return derivative(s);
  const double h = 1e-5;
  const double lo = std::max(0.0, s - h), hi = std::min(1.0, s + h);
  return (evaluate(hi) - evaluate(lo)) / (hi - lo);
}

namespace {

// Nearest-eigenvalue continuation step: pick the eigenvalue of `vals` closest
// to `prev`; tie-break by spectral projection overlap is unnecessary as long
// as the winner is unique at the sampling resolution.
int nearest_index(const Vector& vals, Complex prev) {
  int best = 0;
  for (int k = 1; k < vals.size(); ++k)
    if (std::abs(vals(k) - prev) < std::abs(vals(best) - prev)) best = k;
  return best;
}

double gap_from(const Vector& vals, int idx) {
  double g = 1e300;
  for (int k = 0; k < vals.size(); ++k)
    if (k != idx) g = std::min(g, std::abs(vals(k) - vals(idx)));
  return g;
}

}  // namespace

AssumptionReport assumption_report(const GeneratorFamily& fam, Complex lambda0,
                                   int s_samples) {
  AssumptionReport rep;
  rep.max_abscissa = -1e300;
  rep.min_gap = 1e300;
  Complex lam = lambda0;
  const double norm0 = linops::frob_norm(fam.A(0.0));
  {
    Vector v0 = linops::eig_values(fam.A(0.0));
    const int i0 = nearest_index(v0, lambda0);
    if (std::abs(v0(i0) - lambda0) > 0.1 * std::max(1.0, norm0))
      throw EigenvalueLost("assumption_report: lambda0 is not close to any eigenvalue");
    lam = v0(i0);
  }
  Matrix prevP;
  double prev_s = 0;
  for (int i = 0; i < s_samples; ++i) {
    const double s = double(i) / (s_samples - 1);
    const Matrix a = fam.A(s);
    AssumptionSample smp;
    smp.s = s;
    // numerical abscissa of -A: largest eigenvalue of the Hermitian part
    smp.abscissa = linops::eig_hermitian(-0.5 * (a + a.adjoint())).maxCoeff();

    linops::EigenDecomposition d = linops::eig(a);
    const int idx = nearest_index(d.values, lam);
    smp.gap = gap_from(d.values, idx);
    if (smp.gap < 1e-6) throw EigenvalueLost("assumption_report: gap collapsed");
    lam = d.values(idx);
    smp.lambda = lam;

    // quasi-contraction constant from eigenvector conditioning
    Eigen::JacobiSVD<Matrix> svd(d.vectors);
    const double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
    rep.propagator_bound = std::max(rep.propagator_bound, cond);

    RieszProjection rp = riesz_projection(fam, s, lam);
    if (prevP.size() > 0)
      smp.p_smoothness = linops::frob_norm(rp.P - prevP) / (s - prev_s);
    prevP = rp.P;
    prev_s = s;

    rep.max_abscissa = std::max(rep.max_abscissa, smp.abscissa);
    rep.min_gap = std::min(rep.min_gap, smp.gap);
    rep.samples.push_back(smp);
  }
  rep.strict_contraction = rep.max_abscissa <= 1e-12;
  if (!rep.strict_contraction)
    rep.violations.push_back("contraction: numerical abscissa positive, quasi-contraction bound " +
                             std::to_string(rep.propagator_bound) + " applies instead");
  return rep;
}

RieszProjection riesz_projection(const GeneratorFamily& fam, double s, Complex lambda_est,
                                 int nodes) {
  const Matrix a = fam.A(s);
  Vector vals = linops::eig_values(a);
  const int idx = nearest_index(vals, lambda_est);
  const double gap = gap_from(vals, idx);
  if (gap < 1e-6) throw GapViolation("riesz_projection: eigenvalue not isolated");

  RieszProjection out;
  out.s = s;
  out.gap = gap;
  out.contour = Contour{vals(idx), gap / 2.0, nodes};

  const Matrix adot = fam.Adot(s);
  out.P = linops::contour_integral(
      [&](Complex z) { return linops::resolvent(a, z); }, out.contour);
  // dP/ds = (1/2pi i) contour of R Adot R
  out.Pdot = linops::contour_integral(
      [&](Complex z) {
        const Matrix r = linops::resolvent(a, z);
        return Matrix(r * adot * r);
      },
      out.contour);

  const Complex tr = out.P.trace();
  if (std::abs(tr - 1.0) > 0.1)
    throw GapViolation("riesz_projection: contour does not enclose exactly one eigenvalue");
  out.lambda = (a * out.P).trace() / tr;
  return out;
}

Matrix commutator_operator_X(const GeneratorFamily& fam, double s,
                             const RieszProjection& proj) {
  const Matrix a = fam.A(s);
  return linops::contour_integral(
      [&](Complex z) {
        const Matrix r = linops::resolvent(a, z);
        return Matrix(r * proj.Pdot * r);
      },
      proj.contour);
}

Matrix adiabatic_generator(const GeneratorFamily& fam, const RieszProjection& proj,
                           double tau, double s) {
  if (!(tau > 0)) throw ConfigError("adiabatic_generator: tau must be > 0");
  const Matrix comm = proj.Pdot * proj.P - proj.P * proj.Pdot;
  return fam.A(s) - comm / tau;
}

namespace {

// Barycentric interpolation of a matrix-valued function on Chebyshev-Lobatto
// nodes over [0,1]; spectrally accurate for analytic families, so the cached
// commutator term does not limit the integrator tolerance.
class ChebMatrix {
 public:
  ChebMatrix(const std::function<Matrix(double)>& f, int n) : n_(n) {
    nodes_.resize(n);
    vals_.resize(n);
    wts_.resize(n);
    for (int k = 0; k < n; ++k) {
      nodes_[k] = 0.5 * (1.0 - std::cos(M_PI * k / (n - 1)));
      vals_[k] = f(nodes_[k]);
      wts_[k] = (k % 2 ? -1.0 : 1.0) * ((k == 0 || k == n - 1) ? 0.5 : 1.0);
    }
  }

  Matrix operator()(double s) const {
    Complex denom = 0;
    Matrix num = Matrix::Zero(vals_[0].rows(), vals_[0].cols());
    for (int k = 0; k < n_; ++k) {
      const double d = s - nodes_[k];
      if (std::abs(d) < 1e-14) return vals_[k];
      const double c = wts_[k] / d;
      num += c * vals_[k];
      denom += c;
    }
    return num / denom;
  }

 private:
  int n_;
  std::vector<double> nodes_;
  std::vector<Matrix> vals_;
  std::vector<double> wts_;
};

}  // namespace

PropagatorGrid propagate(const GeneratorFamily& fam, double tau,
                         const std::vector<double>& grid, Mode mode, Complex lambda0,
                         double tol) {
  if (grid.empty() || grid.front() != 0.0 || grid.back() > 1.0)
    throw ConfigError("propagate: grid must start at 0 and stay within [0,1]");
  PropagatorGrid out;
  out.tau = tau;
  out.tolerance = tol;
  out.method = mode == Mode::True ? "true" : "adiabatic";

  std::unique_ptr<ChebMatrix> comm;
  if (mode == Mode::Adiabatic) {
    // continuation runs once over the (increasing) node set; cache [Pdot, P]
    Complex lam = lambda0;
    comm = std::make_unique<ChebMatrix>(
        [&](double s) {
          RieszProjection rp = riesz_projection(fam, s, lam);
          lam = rp.lambda;
          return Matrix(rp.Pdot * rp.P - rp.P * rp.Pdot);
        },
        96);
  }

  ode::Rhs rhs = [&](double s, const Matrix& u) -> Matrix {
    Matrix au = fam.A(s) * u;
    if (mode == Mode::Adiabatic) au -= (1.0 / tau) * ((*comm)(s)*u);
    return Matrix(-tau * au);
  };

  ode::Options opt;
  opt.tol = tol / 100.0;  // local tolerance margin so the grid values meet `tol`
  ode::integrate(rhs, Matrix::Identity(fam.dim, fam.dim), 0.0, grid.back(), grid,
                 [&](double s, const Matrix& u) {
                   out.s.push_back(s);
                   out.U.push_back(u);
                 },
                 opt);
  return out;
}

PropagatorGrid kato_product_propagator(const GeneratorFamily& fam, double tau, int n,
                                       bool left_endpoint) {
  if (n < 1) throw ConfigError("kato_product_propagator: n must be >= 1");
  PropagatorGrid out;
  out.tau = tau;
  out.method = left_endpoint ? "product-left" : "product-midpoint";
  const double h = 1.0 / n;
  Matrix u = Matrix::Identity(fam.dim, fam.dim);
  out.s.push_back(0.0);
  out.U.push_back(u);
  for (int k = 0; k < n; ++k) {
    const double sk = left_endpoint ? k * h : (k + 0.5) * h;
    u = (Matrix(-tau * h * fam.A(sk))).exp() * u;
    out.s.push_back((k + 1) * h);
    out.U.push_back(u);
  }
  return out;
}

std::vector<double> intertwining_defect(const GeneratorFamily& fam, double tau,
                                        const std::vector<double>& grid, Complex lambda0,
                                        double tol) {
  PropagatorGrid ua = propagate(fam, tau, grid, Mode::Adiabatic, lambda0, tol);
  RieszProjection p0 = riesz_projection(fam, 0.0, lambda0);
  std::vector<double> out;
  Complex lam = p0.lambda;
  for (std::size_t i = 0; i < ua.s.size(); ++i) {
    RieszProjection ps = riesz_projection(fam, ua.s[i], lam);
    lam = ps.lambda;
    out.push_back(linops::frob_norm(ps.P * ua.U[i] - ua.U[i] * p0.P));
  }
  return out;
}

SweepResult adiabatic_error_sweep(const GeneratorFamily& fam,
                                  const std::vector<double>& tau_list,
                                  const std::vector<double>& grid, Complex lambda0,
                                  double tol) {
  if (tau_list.size() < 2) throw ConfigError("adiabatic_error_sweep: need >= 2 taus");
  SweepResult out;
  out.parameter = tau_list;
  out.defect.resize(tau_list.size());
  // sweep entries are independent; propagate each pair on its own
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < std::int64_t(tau_list.size()); ++t) {
    try {
      PropagatorGrid ut = propagate(fam, tau_list[t], grid, Mode::True, lambda0, tol);
      PropagatorGrid ua = propagate(fam, tau_list[t], grid, Mode::Adiabatic, lambda0, tol);
      double sup = 0;
      for (std::size_t i = 0; i < ut.U.size(); ++i)
        sup = std::max(sup, linops::op_norm(ut.U[i] - ua.U[i]));
      out.defect[t] = sup;
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  if (*std::max_element(out.defect.begin(), out.defect.end()) < 1e-10) {
    out.degenerate = true;
    return out;
  }
  auto [slope, res] = linops::loglog_fit(out.parameter, out.defect);
  out.slope = slope;
  out.fit_residual = res;
  return out;
}

GeneratorFamily synthetic_family(std::uint64_t seed, double k_scale, double nil_scale) {
  const int n = 6;
  // simple tracked eigenvalue at 0; the other eigenvalues keep Re >= 0 so that
  // the true propagator stays bounded over long horizons
  Vector d0(n);
  d0 << Complex(0, 0), Complex(1, 1), Complex(2, 0.5), Complex(3, 0), Complex(3.5, 2),
      Complex(1, -1);
  Matrix K = random_skew(n, seed, k_scale);
  Matrix nil = Matrix::Zero(n, n);
  {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int j = 1; j < n; ++j)
      for (int i = 0; i < j; ++i) nil(i, j) = nil_scale * Complex(nd(rng), nd(rng)) / 3.0;
  }
  GeneratorFamily fam;
  fam.dim = n;
  fam.evaluate = [=](double s) {
    Matrix q = (s * K).exp();
    return Matrix(q * d0.asDiagonal() * q.adjoint() + nil);
  };
  fam.derivative = [=](double s) {
    Matrix q = (s * K).exp();
    Matrix a0 = q * d0.asDiagonal() * q.adjoint();
    return Matrix(K * a0 - a0 * K);
  };
  return fam;
}

}  // namespace nesslab::adiabatic
