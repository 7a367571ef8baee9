#pragma once

#include <functional>

#include "nesslab/types.hpp"

namespace nesslab::ode {

/// Right-hand side of Y' = rhs(s, Y); Y is any dense complex matrix
/// (a column vector is an n x 1 matrix).
using Rhs = std::function<Matrix(double, const Matrix&)>;

struct Options {
  double tol = 1e-10;       // local error tolerance (abs and rel combined)
  double h_init = 1e-3;
  double h_min_factor = 1e-13;  // StepFailure below h_min_factor * span
  long max_steps = 50'000'000;
};

struct Stats {
  long steps = 0;
  long rejected = 0;
};

/// Adaptive embedded Dormand-Prince 5(4). Integrates from s0 to s1 and calls
/// `sink(s, Y)` exactly at every requested grid point (steps are clipped, no
/// interpolation). Returns the final state.
Matrix integrate(const Rhs& rhs, Matrix y, double s0, double s1,
                 const std::vector<double>& grid,
                 const std::function<void(double, const Matrix&)>& sink,
                 const Options& opt = {}, Stats* stats = nullptr);

/// Same stepper with an exact integrating factor for a constant diagonal part:
///   Y' = diag(d) Y + rhs(s, Y).
/// Each macro-step is taken in the locally transformed variable
/// phi = exp(-diag(d)(s - s_step)) Y, so stiff diagonal decay and fast diagonal
/// phases cost nothing. Requires Re(d) <= 0 entrywise.
Matrix integrate_factored(const Vector& d, const Rhs& rhs, Matrix y, double s0, double s1,
                          const std::vector<double>& grid,
                          const std::function<void(double, const Matrix&)>& sink,
                          const Options& opt = {}, Stats* stats = nullptr);

}  // namespace nesslab::ode
