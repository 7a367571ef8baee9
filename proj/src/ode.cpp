#include "nesslab/ode.hpp"

#include <algorithm>
#include <cmath>

namespace nesslab::ode {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct Stepper {
  const Vector* d = nullptr;  // optional constant diagonal part
  const Rhs* rhs = nullptr;

  // row scaling by exp(d * t); no-op when d is absent
  Matrix scale(const Matrix& y, double t) const {
    if (!d || t == 0.0) return y;
    Matrix out = y;
    for (int i = 0; i < out.rows(); ++i) out.row(i) *= std::exp((*d)(i) * t);
    return out;
  }

  // stage derivative in the transformed variable at offset t from step start
  Matrix stage(double s, double t, const Matrix& phi) const {
    Matrix f = (*rhs)(s, scale(phi, t));
    return scale(f, -t);
  }

  // one trial step of size h from (s, y); fills y5 and the error estimate
  void step(double s, double h, const Matrix& y, Matrix& y5, double& err) const {
    const Matrix k1 = stage(s, 0.0, y);
    const Matrix k2 = stage(s + c2 * h, c2 * h, y + h * (a21 * k1));
    const Matrix k3 = stage(s + c3 * h, c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Matrix k4 = stage(s + c4 * h, c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Matrix k5 =
        stage(s + c5 * h, c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Matrix k6 =
        stage(s + h, h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Matrix phi5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Matrix k7 = stage(s + h, h, phi5);
    // error is controlled on the original variable, after the step factor
    const Matrix ediff =
        scale(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7), h);
    y5 = scale(phi5, h);
    err = ediff.norm() / (1.0 + y5.norm());
  }
};

Matrix run(const Vector* d, const Rhs& rhs, Matrix y, double s0, double s1,
           const std::vector<double>& grid,
           const std::function<void(double, const Matrix&)>& sink, const Options& opt,
           Stats* stats) {
  Stepper st{d, &rhs};
  const double span = s1 - s0;
  if (span <= 0) throw ConfigError("integrate: need s1 > s0");
  double h_cap = span;
  if (d) {
    double remax = 0;
    for (int i = 0; i < d->size(); ++i) remax = std::max(remax, -d->coeff(i).real());
    if (remax > 0) h_cap = std::min(h_cap, 40.0 / remax);  // keep exp(-d t) finite
  }

  std::size_t gi = 0;
  while (gi < grid.size() && grid[gi] <= s0 + 1e-15 * span) {
    sink(grid[gi], y);
    ++gi;
  }

  double s = s0;
  double h = std::min(opt.h_init, h_cap);
  long steps = 0, rejected = 0;
  while (s < s1 - 1e-14 * span) {
    double target = s1;
    if (gi < grid.size()) target = std::min(target, grid[gi]);
    h = std::min(h, h_cap);
    bool clipped = false;
    if (s + h >= target) {
      h = target - s;
      clipped = true;
    }
    if (h < opt.h_min_factor * span) throw StepFailure("integrate: step size underflow");

    Matrix y5;
    double err = 0;
    st.step(s, h, y, y5, err);
    ++steps;
    if (steps > opt.max_steps) throw StepFailure("integrate: max step count exceeded");

    if (!std::isfinite(err)) {
      h *= 0.25;
      ++rejected;
      continue;
    }
    if (err > opt.tol) {
      h *= std::max(0.2, 0.9 * std::pow(opt.tol / err, 0.2));
      ++rejected;
      continue;
    }
    s += h;
    y.swap(y5);
    if (gi < grid.size() && s >= grid[gi] - 1e-14 * span) {
      sink(grid[gi], y);
      ++gi;
    }
    const double grow = err > 0 ? 0.9 * std::pow(opt.tol / err, 0.2) : 5.0;
    double hn = h * std::clamp(grow, 0.2, 5.0);
    if (clipped && err < opt.tol) hn = std::max(hn, h * 2);  // do not inherit clipping
    h = hn;
  }
  if (stats) {
    stats->steps = steps;
    stats->rejected = rejected;
  }
  return y;
}

}  // namespace

Matrix integrate(const Rhs& rhs, Matrix y, double s0, double s1,
                 const std::vector<double>& grid,
                 const std::function<void(double, const Matrix&)>& sink, const Options& opt,
                 Stats* stats) {
  return run(nullptr, rhs, std::move(y), s0, s1, grid, sink, opt, stats);
}

Matrix integrate_factored(const Vector& d, const Rhs& rhs, Matrix y, double s0, double s1,
                          const std::vector<double>& grid,
                          const std::function<void(double, const Matrix&)>& sink,
                          const Options& opt, Stats* stats) {
  for (int i = 0; i < d.size(); ++i)
    if (d(i).real() > 1e-12)
      throw ConfigError("integrate_factored: diagonal part must have Re <= 0");
  return run(&d, rhs, std::move(y), s0, s1, grid, sink, opt, stats);
}

}  // namespace nesslab::ode
