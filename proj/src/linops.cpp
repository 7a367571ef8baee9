#include "nesslab/linops.hpp"

#include <lapacke.h>
#include <omp.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace nesslab::linops {

void Contour::validate() const {
  if (!(radius > 0.0)) throw ConfigError("Contour: radius must be > 0");
  if (nodes < 16) throw ConfigError("Contour: nodes must be >= 16");
  if (nodes % 2 != 0) throw ConfigError("Contour: nodes must be even");
}

Complex Contour::point(int k) const {
  const double phi = 2.0 * M_PI * k / nodes;
  return center + radius * std::exp(I * phi);
}

double frob_norm(const Matrix& a) { return a.norm(); }

double op_norm(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  if (a.rows() <= 32) return a.jacobiSvd().singularValues()(0);
  // power iteration on A^H A with a fixed start; plenty for tolerance checks
  Vector v = Vector::Ones(a.cols());
  v.normalize();
  double s = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vector w = a.adjoint() * (a * v);
    double ns = std::sqrt(w.norm());
    if (w.norm() == 0.0) return 0.0;
    v = w / w.norm();
    if (std::abs(ns - s) <= 1e-12 * std::max(1.0, ns)) return ns;
    s = ns;
  }
  return s;
}

namespace {

void zgeev_call(const Matrix& a, Vector& w, Matrix* vr, Matrix* vl) {
  const int n = static_cast<int>(a.rows());
  Matrix work = a;  // zgeev destroys its input
  w.resize(n);
  if (vr) vr->resize(n, n);
  if (vl) vl->resize(n, n);
  int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, vl ? 'V' : 'N', vr ? 'V' : 'N', n,
      reinterpret_cast<lapack_complex_double*>(work.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()),
      vl ? reinterpret_cast<lapack_complex_double*>(vl->data()) : nullptr, n,
      vr ? reinterpret_cast<lapack_complex_double*>(vr->data()) : nullptr, n);
  if (info != 0) throw NonConvergent("zgeev failed, info=" + std::to_string(info));
}

}  // namespace

EigenDecomposition eig(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  EigenDecomposition d;
  Matrix vl;
  zgeev_call(a, d.values, &d.vectors, &vl);
  const double na = std::max(1e-300, frob_norm(a));
  d.residual = frob_norm(a * d.vectors - d.vectors * d.values.asDiagonal()) / na;
  if (d.residual > 1e-10)
    throw NonConvergent("eig: reconstruction residual " + std::to_string(d.residual));
  d.condition.resize(n);
  for (int k = 0; k < n; ++k) {
    const Complex ov = vl.col(k).dot(d.vectors.col(k));
    d.condition[k] = std::abs(ov) > 0 ? 1.0 / std::abs(ov) : 1e300;
  }
  return d;
}

Vector eig_values(const Matrix& a) {
  Vector w;
  zgeev_call(a, w, nullptr, nullptr);
  return w;
}

RealVector eig_hermitian(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  Matrix work = a;
  RealVector w(n);
  int info = LAPACKE_zheev(LAPACK_COL_MAJOR, 'N', 'U', n,
                           reinterpret_cast<lapack_complex_double*>(work.data()), n,
                           w.data());
  if (info != 0) throw NonConvergent("zheev failed, info=" + std::to_string(info));
  return w;
}

ShiftedSolver::ShiftedSolver(const Matrix& a, Complex z) : n_(static_cast<int>(a.rows())) {
  lu_ = -a;
  lu_.diagonal().array() += z;
  ipiv_.resize(n_);
  int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n_, n_,
                            reinterpret_cast<lapack_complex_double*>(lu_.data()), n_,
                            ipiv_.data());
  if (info > 0) throw SingularShift("(z - A) is numerically singular");
  if (info < 0) throw SingularShift("zgetrf: bad argument");
}

Matrix ShiftedSolver::solve(const Matrix& rhs) const {
  Matrix x = rhs;
  int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n_, static_cast<int>(rhs.cols()),
                            reinterpret_cast<const lapack_complex_double*>(lu_.data()), n_,
                            ipiv_.data(),
                            reinterpret_cast<lapack_complex_double*>(x.data()), n_);
  if (info != 0) throw SingularShift("zgetrs failed");
  return x;
}

Vector ShiftedSolver::solve(const Vector& rhs) const {
  return solve(Matrix(rhs)).col(0);
}

Vector ShiftedSolver::solve_adjoint(const Vector& rhs) const {
  Matrix x = rhs;
  int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'C', n_, 1,
                            reinterpret_cast<const lapack_complex_double*>(lu_.data()), n_,
                            ipiv_.data(),
                            reinterpret_cast<lapack_complex_double*>(x.data()), n_);
  if (info != 0) throw SingularShift("zgetrs (adjoint) failed");
  return x.col(0);
}

Matrix resolvent(const Matrix& a, Complex z, double tol) {
  const int n = static_cast<int>(a.rows());
  ShiftedSolver s(a, z);
  Matrix r = s.solve(Matrix(Matrix::Identity(n, n)));
  // multiply-back check, scaled by a cheap conditioning proxy
  Matrix zma = -a;
  zma.diagonal().array() += z;
  const double res = frob_norm(zma * r - Matrix::Identity(n, n));
  const double cond = std::max(1.0, frob_norm(zma) * frob_norm(r) / std::sqrt(double(n)));
  if (res > tol * cond) throw SingularShift("resolvent residual " + std::to_string(res));
  return r;
}

namespace {

// Fixed-order block accumulation: identical summation order for any thread
// count, and identical to the serial reference.
Matrix contour_sum(const std::function<Matrix(Complex)>& f, const Contour& c, bool parallel) {
  c.validate();
  const int n = c.nodes;
  const int block = 4;
  Matrix acc;
  std::vector<Matrix> slot(block);
  for (int b0 = 0; b0 < n; b0 += block) {
    const int m = std::min(block, n - b0);
#pragma omp parallel for schedule(static) if (parallel)
    for (int j = 0; j < m; ++j) {
      const int k = b0 + j;
      const double phi = 2.0 * M_PI * k / n;
      const Complex e = std::exp(I * phi);
      slot[j] = f(c.center + c.radius * e) * e;
    }
    for (int j = 0; j < m; ++j) {
      if (acc.size() == 0)
        acc = slot[j];
      else
        acc += slot[j];
    }
  }
  return (c.radius / n) * acc;
}

}  // namespace

Matrix contour_integral(const std::function<Matrix(Complex)>& f, const Contour& c) {
  return contour_sum(f, c, true);
}

Matrix contour_integral_serial(const std::function<Matrix(Complex)>& f, const Contour& c) {
  return contour_sum(f, c, false);
}

Matrix contour_integral_checked(const std::function<Matrix(Complex)>& f, const Contour& c,
                                double tol) {
  Matrix coarse = contour_integral(f, c);
  Contour fine = c;
  fine.nodes = 2 * c.nodes;
  Matrix refined = contour_integral(f, fine);
  if (frob_norm(refined - coarse) > tol)
    throw NonConvergent("contour integral did not pass the node-doubling check");
  return refined;
}

Matrix contour_apply(const Matrix& a, const Contour& c, const Matrix& rhs) {
  c.validate();
  const int n = c.nodes;
  Matrix acc = Matrix::Zero(rhs.rows(), rhs.cols());
  for (int k = 0; k < n; ++k) {  // LU per node dominates; BLAS threads inside
    const double phi = 2.0 * M_PI * k / n;
    const Complex e = std::exp(I * phi);
    ShiftedSolver s(a, c.center + c.radius * e);
    acc += s.solve(rhs) * e;
  }
  return (c.radius / n) * acc;
}

Matrix expm(const Matrix& a) { return a.exp(); }

Vector expm_action(const Matrix& a, double t, const Vector& v, double cap) {
  const double scale = std::abs(t) * a.cwiseAbs().rowwise().sum().maxCoeff();
  if (scale > cap) throw Overflow("expm_action: ||tA|| exceeds cap");
  if (a.rows() <= 64) return (t * a).exp() * v;
  // substepped Taylor; each substep has ||tA/s|| <= 4
  const int s = std::max(1, static_cast<int>(std::ceil(scale / 4.0)));
  Vector y = v;
  for (int step = 0; step < s; ++step) {
    Vector term = y;
    Vector acc = y;
    for (int k = 1; k <= 40; ++k) {
      term = (t / double(s) / double(k)) * (a * term);
      acc += term;
      if (term.norm() <= 1e-16 * acc.norm()) break;
    }
    y = acc;
  }
  return y;
}

std::pair<double, double> loglog_fit(const std::vector<double>& x,
                                     const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != x.size()) throw ConfigError("loglog_fit: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double icept = (sy - slope * sx) / n;
  double rss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = std::log(y[i]) - (icept + slope * std::log(x[i]));
    rss += r * r;
  }
  return {slope, std::sqrt(rss / n)};
}

}  // namespace nesslab::linops
