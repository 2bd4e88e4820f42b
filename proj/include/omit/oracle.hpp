#pragma once

#include <array>
#include <string_view>

#include <Eigen/Dense>

#include "omit/model.hpp"

namespace omit {

using Matrix8 = Eigen::Matrix<cplx, 8, 8>;
using Vector8 = Eigen::Matrix<cplx, 8, 1>;

/// Fluctuation amplitudes in row/column order of the sideband systems.
enum class Variable : int { q = 0, p, c, A, C, Q, P, X };

std::string_view label(Variable v);

enum class Sideband { plus, minus };

/// One of the two first-order sideband systems: matrix * amplitudes = rhs.
/// Row k holds the k-th equation of the set, moved to the left-hand side.
struct SidebandSystem {
  Sideband side = Sideband::plus;
  double delta = 0.0;
  Matrix8 matrix = Matrix8::Zero();
  Vector8 rhs = Vector8::Zero();
};

struct SidebandSolution {
  Vector8 values = Vector8::Zero();
  double residual_norm = 0.0;
  double condition = 1.0;

  cplx value(Variable v) const { return values(static_cast<int>(v)); }
};

SidebandSystem assemble_plus(const SystemParams& p, const SteadyState& ss, double delta);
SidebandSystem assemble_minus(const SystemParams& p, const SteadyState& ss, double delta);

/// Dense solve. Throws SingularMatrixError when the condition estimate
/// exceeds 1e12, NumericalError if the residual check fails.
SidebandSolution solve_sidebands(const SidebandSystem& sys);

/// Homogeneous drift matrix M of the linearized equations, x' = M x + drive(t),
/// using the same factor conventions as the sideband systems.
Matrix8 drift_matrix(const SystemParams& p, const SteadyState& ss);

struct DriftSpectrum {
  std::array<cplx, 8> eigenvalues{};
  double max_real = 0.0;
  double spectral_radius = 0.0;

  bool stable() const { return max_real < 0.0; }
};

DriftSpectrum drift_spectrum(const SystemParams& p, const SteadyState& ss);

struct TimeDomainOptions {
  enum class Mode {
    /// Periodic steady state by shooting over one drive period.
    periodic,
    /// Zero initial conditions, transients discarded (needs a stable drift).
    transient,
  };
  Mode mode = Mode::periodic;
  /// Transient mode only; 0 selects 60 mechanical periods.
  double horizon = 0.0;
  /// 0 selects half the largest step satisfying the resolution rule.
  double dt = 0.0;
  /// Relative drift allowed between the last two projection windows.
  double tolerance = 1e-3;
};

struct TimeDomainResult {
  cplx delta_c_plus;
  double dt = 0.0;
  long steps = 0;
  double window_drift = 0.0;
};

/// Integrates the linearized drift equations with fixed-step RK4 under the
/// probe drive eps_p e^{-i delta t} and the phonon drive
/// eps~_m (e^{-i delta t} + e^{i delta t}), then projects the cavity
/// fluctuation onto e^{-i delta t}. Throws ConvergenceError on a drifting
/// coefficient or (transient mode) an unstable drift matrix.
TimeDomainResult time_domain_run(const SystemParams& p, const SteadyState& ss, double delta,
                                 const TimeDomainOptions& options = {});

cplx time_domain_delta_c(const SystemParams& p, const SteadyState& ss, double delta,
                         const TimeDomainOptions& options = {});

/// Largest step allowed by the resolution rule at this detuning.
double max_time_step(const SystemParams& p, const SteadyState& ss, double delta);

}  // namespace omit
