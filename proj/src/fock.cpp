#include "nesslab/fock.hpp"

#include <algorithm>
#include <cmath>

namespace nesslab::fock {

void ModeGrid::validate() const {
  const int m = modes();
  if (m <= 0 || weights.size() != m) throw ConfigError("ModeGrid: empty or inconsistent");
  double wsum = 0;
  for (int j = 0; j < m; ++j) {
    if (j > 0 && !(energies(j) > energies(j - 1)))
      throw ConfigError("ModeGrid: energies must be strictly increasing");
    if (!(weights(j) > 0)) throw ConfigError("ModeGrid: weights must be positive");
    wsum += weights(j);
  }
  if (!(wsum > 0)) throw ConfigError("ModeGrid: weight sum must be positive");
}

void ModeGrid::validate_symmetric() const {
  validate();
  const int m = modes();
  for (int j = 0; j < m; ++j) {
    // the mirrored energy must be on the grid too
    const double mirror = -energies(j);
    bool found = false;
    for (int k = 0; k < m; ++k)
      if (std::abs(energies(k) - mirror) <= 1e-12 * std::max(1.0, std::abs(mirror)))
        found = true;
    if (!found) throw ConfigError("ModeGrid: grid must be symmetric about 0");
  }
}

ModeGrid ModeGrid::symmetric(int modes, double u_max, double u_snap) {
  if (modes < 2 || modes % 2 != 0)
    throw ConfigError("ModeGrid: modes must be even and >= 2");
  if (!(u_max > 0)) throw ConfigError("ModeGrid: u_max must be > 0");
  const int half = modes / 2;
  std::vector<double> pos(half);
  for (int k = 0; k < half; ++k) pos[k] = u_max * double(k + 1) / half;
  if (u_snap > 0 && u_snap < u_max) {
    int best = 0;
    for (int k = 1; k < half; ++k)
      if (std::abs(pos[k] - u_snap) < std::abs(pos[best] - u_snap)) best = k;
    pos[best] = u_snap;
    std::sort(pos.begin(), pos.end());
  }
  ModeGrid g;
  g.energies.resize(modes);
  for (int k = 0; k < half; ++k) {
    g.energies(half - 1 - k) = -pos[k];
    g.energies(half + k) = pos[k];
  }
  g.weights.resize(modes);
  for (int j = 0; j < modes; ++j) {
    const double lo = (j == 0) ? g.energies(0) : g.energies(j - 1);
    const double hi = (j == modes - 1) ? g.energies(modes - 1) : g.energies(j + 1);
    g.weights(j) = 0.5 * (hi - lo);
    if (j == 0) g.weights(j) = 0.5 * (g.energies(1) - g.energies(0));
    if (j == modes - 1) g.weights(j) = 0.5 * (g.energies(j) - g.energies(j - 1));
  }
  g.validate_symmetric();
  return g;
}

Complex grid_inner(const ModeGrid& g, const Vector& f, const Vector& h) {
  Complex s = 0;
  for (int j = 0; j < g.modes(); ++j) s += g.weights(j) * std::conj(f(j)) * h(j);
  return s;
}

FockSpace::FockSpace(ModeGrid grid) : grid_(std::move(grid)) {
  grid_.validate();
  const int m = grid_.modes();
  if (m > 14) throw ConfigError("FockSpace: refusing dense representation for M > 14");
  dim_ = 1 << m;
  // occupation basis |n_1 ... n_M>, with mode 1 the slowest bit; c_j carries a
  // Jordan-Wigner sign over modes 1..j-1
  c_.resize(m);
  for (int j = 0; j < m; ++j) {
    Matrix c = Matrix::Zero(dim_, dim_);
    const int bit = m - 1 - j;  // mode j+1 occupies this bit
    for (int idx = 0; idx < dim_; ++idx) {
      if (!(idx >> bit & 1)) continue;
      int sign = 0;
      for (int p = 0; p < j; ++p) sign ^= (idx >> (m - 1 - p)) & 1;
      c(idx ^ (1 << bit), idx) = sign ? -1.0 : 1.0;
    }
    c_[j] = std::move(c);
  }
}

const Matrix& FockSpace::annihilator(int j) const {
  if (j < 1 || j > modes()) throw DimensionMismatch("mode index out of range");
  return c_[j - 1];
}

Matrix FockSpace::a(const Vector& f) const {
  Vector k(modes());
  for (int j = 0; j < modes(); ++j) k(j) = std::conj(f(j));
  return a_coeff(k);
}

Matrix FockSpace::a_dag(const Vector& f) const { return a_dag_coeff(f); }

Matrix FockSpace::a_coeff(const Vector& k) const {
  if (k.size() != modes()) throw DimensionMismatch("coefficient size != modes");
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int j = 0; j < modes(); ++j)
    out += std::sqrt(grid_.weights(j)) * k(j) * c_[j];
  return out;
}

Matrix FockSpace::a_dag_coeff(const Vector& k) const {
  if (k.size() != modes()) throw DimensionMismatch("coefficient size != modes");
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int j = 0; j < modes(); ++j)
    out += std::sqrt(grid_.weights(j)) * k(j) * c_[j].adjoint();
  return out;
}

Matrix FockSpace::dGamma(const Vector& h) const {
  if (h.size() != modes()) throw DimensionMismatch("dGamma: size != modes");
  const int m = modes();
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int idx = 0; idx < dim_; ++idx) {
    Complex e = 0;
    for (int j = 0; j < m; ++j)
      if (idx >> (m - 1 - j) & 1) e += h(j);
    out(idx, idx) = e;
  }
  return out;
}

Matrix FockSpace::number_operator() const { return dGamma(Vector::Ones(modes())); }

Matrix FockSpace::parity() const {
  const int m = modes();
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int idx = 0; idx < dim_; ++idx)
    out(idx, idx) = (__builtin_popcount(unsigned(idx)) % 2) ? -1.0 : 1.0;
  (void)m;
  return out;
}

Vector FockSpace::vacuum() const {
  Vector v = Vector::Zero(dim_);
  v(0) = 1.0;
  return v;
}

namespace {

template <bool Parallel>
Matrix kron_impl(const Matrix& a, const Matrix& b) {
  const int ar = static_cast<int>(a.rows()), ac = static_cast<int>(a.cols());
  const int br = static_cast<int>(b.rows()), bc = static_cast<int>(b.cols());
  Matrix out(ar * br, ac * bc);
#pragma omp parallel for collapse(2) schedule(static) if (Parallel)
  for (int j = 0; j < ac; ++j)
    for (int i = 0; i < ar; ++i) out.block(i * br, j * bc, br, bc) = a(i, j) * b;
  return out;
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) { return kron_impl<true>(a, b); }
Matrix kron_serial(const Matrix& a, const Matrix& b) { return kron_impl<false>(a, b); }

Matrix assemble(const std::vector<Matrix>& factors) {
  if (factors.empty()) throw DimensionMismatch("assemble: no factors");
  for (const auto& f : factors)
    if (f.rows() != f.cols() || f.rows() == 0)
      throw DimensionMismatch("assemble: factors must be square and nonempty");
  Matrix out = factors[0];
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

}  // namespace nesslab::fock
