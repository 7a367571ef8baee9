#include "nesslab/perturbation.hpp"

#include <array>
#include <cmath>

namespace nesslab::perturbation {

using model::ModelOperators;
using model::ModelSpec;

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirrored)
constexpr double kGlNode[8] = {0.0950125098376374, 0.2816035507792589,
                               0.4580167776572274, 0.6178762444026438,
                               0.7554044083550030, 0.8656312023878318,
                               0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeight[8] = {0.1894506104550685, 0.1826034150449236,
                                 0.1691565193950025, 0.1495959888165767,
                                 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};

double gl_panel(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0;
  for (int k = 0; k < 8; ++k)
    acc += kGlWeight[k] * (f(mid + half * kGlNode[k]) + f(mid - half * kGlNode[k]));
  return half * acc;
}

double gl_composite(const std::function<double(double)>& f, double a, double b,
                    int panels) {
  double acc = 0;
  for (int p = 0; p < panels; ++p)
    acc += gl_panel(f, a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels);
  return acc;
}

Complex gl_composite_c(const std::function<Complex(double)>& f, double a, double b,
                       int panels) {
  double re = gl_composite([&](double u) { return f(u).real(); }, a, b, panels);
  double im = gl_composite([&](double u) { return f(u).imag(); }, a, b, panels);
  return Complex(re, im);
}

}  // namespace

double pv_integral(const std::function<double(double)>& f, double c, double lo,
                   double hi, double tol) {
  if (!(lo < c && c < hi)) throw ConfigError("pv_integral: pole must lie inside [lo,hi]");
  const double fc = f(c);
  auto reg = [&](double u) {
    const double d = c - u;
    if (std::abs(d) < 1e-9) {
      // removable point: the limit is -f'(c)
      const double h = 1e-5 * std::max(1.0, std::abs(c));
      return (f(c - h) - f(c + h)) / (2.0 * h);
    }
    return (f(u) - fc) / d;
  };
  double prev = gl_composite(reg, lo, hi, 8);
  for (int panels = 16; panels <= 1024; panels *= 2) {
    const double cur = gl_composite(reg, lo, hi, panels);
    if (std::abs(cur - prev) <= tol) {
      // subtracted pole in closed form: fc * log((c - lo)/(hi - c))
      return cur + fc * std::log((c - lo) / (hi - c));
    }
    prev = cur;
  }
  throw NonConvergent("pv_integral: refinement stalled");
}

GammaBlocks gamma2_blocks(const ModelSpec& spec, double s) {
  spec.validate();
  const double w0 = spec.small.omega0;
  GammaBlocks out;
  out.gamma01 = Matrix::Zero(2, 2);
  double b1 = 0;
  for (const auto& res : spec.reservoirs) {
    const double tf = std::abs(model::glued_tilde(res, s, 2.0 * w0));
    b1 += tf;
    const double shell_i = 2.0 * tf * tf;
    out.shell += shell_i;
    const double reach = res.u_max + 4.0;
    const double pv_i = pv_integral(
        [&](double u) { return std::norm(model::glued_tilde(res, s, u)); }, 2.0 * w0,
        2.0 * w0 - reach - 2.0 * w0, 2.0 * w0 + reach + 2.0 * w0);
    out.pv += pv_i;
    const double b = res.beta * w0;
    Matrix m(2, 2);
    m << std::exp(b), -std::exp(b), -std::exp(-b), std::exp(-b);
    out.gamma01 += (-I * M_PI * shell_i / (2.0 * std::cosh(b))) * m;
  }
  if (!(b1 > 0)) throw AssumptionViolated("B1 fails at s: no golden-rule weight");
  out.gamma3 = out.pv - I * (M_PI / 2.0) * out.shell;
  out.gamma2 = -out.pv - I * (M_PI / 2.0) * out.shell;
  return out;
}

std::array<Complex, 4> second_order_eigenvalues(const ModelSpec& spec, double s,
                                                double g) {
  GammaBlocks b = gamma2_blocks(spec, s);
  const double w0 = spec.small.omega0;
  return {Complex(0.0, 0.0), -I * M_PI * b.shell * g * g,
          -2.0 * w0 + g * g * b.gamma2, 2.0 * w0 + g * g * b.gamma3};
}

GridCoefficients second_order_grid(const ModelSpec& spec, double s, Complex theta) {
  ModelOperators ops(spec);
  const double w0 = spec.small.omega0;
  GridCoefficients out;
  Complex m00 = 0, m03 = 0, m30 = 0, m33 = 0;
  out.gamma2 = out.gamma3 = 0;
  for (int i = 0; i < ops.reservoirs(); ++i) {
    const auto& res = spec.reservoirs[i];
    const auto& grid = ops.space(i).grid();
    for (int j = 0; j < grid.modes(); ++j) {
      const Complex z = grid.energies(j) + theta;
      const double w = grid.weights(j);
      const Complex q = model::q_kernel(res, s, z);
      const Complex eps = std::exp(-res.beta * z);
      const Complex tf = model::glued_tilde(res, s, z);
      const Complex d_m = 1.0 / (2.0 * w0 - z);    // through the -2w0 state
      const Complex d_p = 1.0 / (-2.0 * w0 - z);   // through the +2w0 state
      out.gamma3 += w * tf * tf / (2.0 * w0 - z);
      out.gamma2 += w * tf * tf / (-2.0 * w0 - z);
      m00 += w * q * (d_m + eps * d_p);
      m03 += w * q * (-eps * d_m - d_p);
      m30 += w * q * (-eps * d_p - d_m);
      m33 += w * q * (d_p + eps * d_m);
    }
  }
  // reported in the orientation that annihilates (1,1) on the right
  out.block01 = Matrix(2, 2);
  out.block01 << m00, m30, m03, m33;
  out.e1 = m00 + m33;
  return out;
}

namespace {

// state-side xi(z) = P0 V R0(z) V P0 as a 4x4 matrix, one-fermion kernels
// integrated over the deformed line by plain quadrature
Matrix xi_matrix(const ModelSpec& spec, double s, Complex theta, Complex z, int panels) {
  const double w0 = spec.small.omega0;
  Matrix xi = Matrix::Zero(4, 4);
  for (const auto& res : spec.reservoirs) {
    const double reach = std::max(9.0, res.u_max + 5.0);
    auto kernel = [&](int which) {
      return gl_composite_c(
          [&](double u) -> Complex {
            const Complex uz = u + theta;
            const Complex q = model::q_kernel(res, s, uz);
            const Complex eps = std::exp(-res.beta * uz);
            const Complex d_m = 1.0 / (z + 2.0 * w0 - uz);  // E' = -2w0
            const Complex d_0 = 1.0 / (z - uz);             // E' = 0
            const Complex d_p = 1.0 / (z - 2.0 * w0 - uz);  // E' = +2w0
            switch (which) {
              case 0: return q * (d_m + eps * d_p);          // (0,0)
              case 1: return q * (1.0 + eps) * d_0;          // (1,1) and (2,2)
              case 2: return q * (d_p + eps * d_m);          // (3,3)
              case 3: return q * (-eps * d_m - d_p);         // (0,3)
              case 4: return q * (-eps * d_p - d_m);         // (3,0)
              case 5: return q * (-eps - 1.0) * d_0;         // (1,2) and (2,1)
              default: return Complex(0.0);
            }
          },
          -reach, reach, panels);
    };
    xi(0, 0) += kernel(0);
    xi(1, 1) += kernel(1);
    xi(2, 2) += kernel(1);
    xi(3, 3) += kernel(2);
    xi(0, 3) += kernel(3);
    xi(3, 0) += kernel(4);
    xi(1, 2) += kernel(5);
    xi(2, 1) += kernel(5);
  }
  return xi;
}

}  // namespace

QuasiS2 quasi_liouvillean_S2(const ModelSpec& spec, double s, Complex theta) {
  spec.validate();
  const double w0 = spec.small.omega0;
  Vector ls(4);
  ls << 0.0, 2.0 * w0, -2.0 * w0, 0.0;

  const double radius = 0.45 * std::min(2.0 * w0, std::abs(theta.imag()));
  const int panels = 64;
  auto f = [&](Complex z) {
    Matrix xi = xi_matrix(spec, s, theta, z, panels);
    Matrix r = Matrix::Zero(4, 4);
    for (int k = 0; k < 4; ++k) r(k, k) = 1.0 / (z - ls(k));
    return Matrix(0.5 * (xi * r + r * xi));
  };

  Matrix s2_state = Matrix::Zero(4, 4);
  for (Complex center : {Complex(0.0, 0.0), Complex(-2.0 * w0, 0.0), Complex(2.0 * w0, 0.0)}) {
    linops::Contour c{center, radius, spec.contour_nodes};
    s2_state += linops::contour_integral_checked(f, c, 1e-9);
  }

  QuasiS2 out;
  out.s2 = s2_state.transpose();  // report in the (1,1)-kernel orientation
  out.zero_block = Matrix(2, 2);
  out.zero_block << out.s2(0, 0), out.s2(0, 3), out.s2(3, 0), out.s2(3, 3);
  out.gamma3 = out.s2(1, 1);
  out.gamma2 = out.s2(2, 2);
  return out;
}

namespace {

// two-sided inverse-iteration refinement of an eigenvalue estimate
Complex refine_eigenvalue(const Matrix& l, Complex est, Vector* right_out = nullptr) {
  const int n = static_cast<int>(l.rows());
  Vector v = random_vector(n, 0x5eed);
  v.normalize();
  Vector w = random_vector(n, 0x5eee);
  w.normalize();
  Complex lambda = est;
  for (int it = 0; it < 4; ++it) {
    try {
      linops::ShiftedSolver solver(l, lambda + 1e-15);
      v = solver.solve(v);
      v.normalize();
      w = solver.solve_adjoint(w);
      w.normalize();
    } catch (const SingularShift&) {
      break;  // the shift already sits on the eigenvalue to machine precision
    }
    const Complex num = w.dot(l * v), den = w.dot(v);
    if (std::abs(den) < 1e-14) break;
    const Complex next = num / den;
    if (std::abs(next - lambda) < 1e-15 * std::max(1.0, std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  if (right_out) *right_out = v;
  return lambda;
}

}  // namespace

SpectrumReport numeric_resonances(const ModelSpec& spec, double s, double g,
                                  Complex theta) {
  ModelSpec sp = spec;
  sp.g = g;
  sp.theta_im = theta.imag();
  sp.validate();
  ModelOperators ops(sp);
  const double w0 = sp.small.omega0;
  const Matrix l = ops.deformed(s, theta);
  Vector ev = linops::eig_values(l);

  auto nearest = [&](Complex target, Complex exclude, bool use_exclude) {
    int best = -1;
    for (int k = 0; k < ev.size(); ++k) {
      if (use_exclude && std::abs(ev(k) - exclude) < 1e-13) continue;
      if (best < 0 || std::abs(ev(k) - target) < std::abs(ev(best) - target)) best = k;
    }
    return ev(best);
  };

  SpectrumReport rep;
  rep.s = s;
  rep.g = g;
  rep.theta = theta;

  // near-zero pair, separated by right-eigenvector overlap with Omega
  const Complex z_first = nearest(0.0, 0.0, false);
  const Complex z_second = nearest(0.0, z_first, true);
  Vector v_first, v_second;
  Complex r_first = refine_eigenvalue(l, z_first, &v_first);
  Complex r_second = refine_eigenvalue(l, z_second, &v_second);
  const double o_first = std::abs(ops.omega().dot(v_first));
  const double o_second = std::abs(ops.omega().dot(v_second));
  const double ratio = std::max(o_first, o_second) /
                       std::max(1e-300, std::min(o_first, o_second));
  rep.overlap_ratio = ratio;
  if (ratio < 10.0)
    throw ResonanceAmbiguity("near-zero resonances not separated by Omega overlap");
  if (o_first >= o_second) {
    rep.e_num[0] = r_first;
    rep.e_num[1] = r_second;
  } else {
    rep.e_num[0] = r_second;
    rep.e_num[1] = r_first;
  }

  rep.e_num[2] = refine_eigenvalue(l, nearest(-2.0 * w0, 0.0, false));
  rep.e_num[3] = refine_eigenvalue(l, nearest(2.0 * w0, 0.0, false));

  rep.e_pt = second_order_eigenvalues(sp, s, g);
  for (int j = 0; j < 4; ++j) rep.residual[j] = std::abs(rep.e_num[j] - rep.e_pt[j]);
  return rep;
}

ThetaScan theta_independence(const ModelSpec& spec, double s, double g,
                             const std::vector<double>& theta_im_list) {
  ThetaScan out;
  out.theta_im = theta_im_list;
  for (double ti : theta_im_list)
    out.e_num.push_back(numeric_resonances(spec, s, g, Complex(0.0, ti)).e_num);
  for (std::size_t a = 0; a < out.e_num.size(); ++a)
    for (std::size_t b = a + 1; b < out.e_num.size(); ++b)
      for (int j = 0; j < 4; ++j)
        out.max_drift = std::max(out.max_drift,
                                 std::abs(out.e_num[a][j] - out.e_num[b][j]));
  // truncation drift predicted at second order
  std::vector<GridCoefficients> gc;
  for (double ti : theta_im_list)
    gc.push_back(second_order_grid(spec, s, Complex(0.0, ti)));
  for (std::size_t a = 0; a < gc.size(); ++a)
    for (std::size_t b = a + 1; b < gc.size(); ++b) {
      out.predicted_floor = std::max(
          {out.predicted_floor, g * g * std::abs(gc[a].e1 - gc[b].e1),
           g * g * std::abs(gc[a].gamma2 - gc[b].gamma2),
           g * g * std::abs(gc[a].gamma3 - gc[b].gamma3)});
    }
  return out;
}

double projection_distance(const ModelSpec& spec, double s, double g, Complex theta) {
  ModelSpec sp = spec;
  sp.g = g;
  sp.theta_im = theta.imag();
  sp.validate();
  ModelOperators ops(sp);
  const double w0 = sp.small.omega0;
  const Matrix l = ops.deformed(s, theta);

  const double radius = 0.45 * std::min(2.0 * w0, std::abs(theta.imag()));
  Matrix pg = Matrix::Zero(ops.dim(), ops.dim());
  for (Complex center :
       {Complex(0.0, 0.0), Complex(-2.0 * w0, 0.0), Complex(2.0 * w0, 0.0)}) {
    linops::Contour c{center, radius, sp.contour_nodes};
    pg += linops::contour_integral(
        [&](Complex z) { return linops::resolvent(l, z); }, c);
  }
  const double rank = std::abs(pg.trace());
  if (std::abs(rank - 4.0) > 0.05)
    throw GapViolation("projection_distance: contour rank is not 4");

  // P0 = 1_small (x) |vac><vac|
  Matrix p0 = Matrix::Zero(ops.dim(), ops.dim());
  const int fdim = ops.dim() / 4;
  for (int m = 0; m < 4; ++m) p0(m * fdim, m * fdim) = 1.0;
  return linops::op_norm(pg - p0);
}

PtSweep pt_compare_sweep(const ModelSpec& spec, double s, Complex theta,
                         const std::vector<double>& g_list) {
  if (g_list.size() < 3) throw ConfigError("pt_compare_sweep: need >= 3 couplings");
  for (std::size_t i = 1; i < g_list.size(); ++i)
    if (!(g_list[i] > g_list[i - 1]))
      throw ConfigError("pt_compare_sweep: g_list must increase");
  PtSweep out;
  out.g_list = g_list;
  for (double g : g_list) {
    auto rep = numeric_resonances(spec, s, g, theta);
    out.e_num.push_back(rep.e_num);
    out.e_pt.push_back(rep.e_pt);
  }
  const double g0 = g_list.front();
  for (int j = 0; j < 4; ++j)
    out.floor_coeff[j] = (out.e_num[0][j] - out.e_pt[0][j]) / (g0 * g0);
  for (std::size_t i = 0; i < g_list.size(); ++i) {
    std::array<double, 4> adj{};
    for (int j = 0; j < 4; ++j)
      adj[j] = std::abs(out.e_num[i][j] - out.e_pt[i][j] -
                        out.floor_coeff[j] * g_list[i] * g_list[i]);
    out.adjusted.push_back(adj);
  }
  for (int j = 1; j <= 3; ++j) {
    std::vector<double> xs, ys;
    for (std::size_t i = 1; i < g_list.size(); ++i) {
      xs.push_back(g_list[i]);
      ys.push_back(std::max(out.adjusted[i][j], 1e-16));
    }
    auto [slope, res] = linops::loglog_fit(xs, ys);
    out.slope[j - 1] = slope;
    out.fit_residual[j - 1] = res;
  }
  return out;
}

}  // namespace nesslab::perturbation
