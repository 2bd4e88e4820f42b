#include "omit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "omit/errors.hpp"
#include "omit/response.hpp"

namespace omit {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kMaxCondition = 1e12;
constexpr double kResidualTolerance = 1e-10;

constexpr int idx(Variable v) { return static_cast<int>(v); }

SidebandSystem assemble(const SystemParams& p, const SteadyState& ss, double delta, Sideband side) {
  using V = Variable;
  const double sign = side == Sideband::plus ? 1.0 : -1.0;
  const cplx rot = -sign * kI * delta;  // -i delta (plus) or +i delta (minus)
  const double wm = p.omega_m;
  const double we = ss.omega_m_eff;
  const double gm = p.gamma_m;
  const double G = ss.G(p);
  const double G_sm = ss.G_sm(p);
  const cplx G_t = ss.G_t(p);

  const cplx chi_a = p.gamma_1 + rot + kI * p.delta_a;
  const cplx chi_b = p.gamma_2 + rot + kI * p.delta_b;
  const cplx chi_c = rot + kI * p.delta_o + p.kappa;

  SidebandSystem sys;
  sys.side = side;
  sys.delta = delta;
  Matrix8& m = sys.matrix;

  // rot dq = wm dp
  m(0, idx(V::q)) = rot;
  m(0, idx(V::p)) = -wm;
  // (rot + gm) dp = -we dq - G dc + eps~_m
  m(1, idx(V::p)) = rot + gm;
  m(1, idx(V::q)) = we;
  m(1, idx(V::c)) = G;
  sys.rhs(1) = p.phonon_drive();
  // chi_c dc = -i (G1 dq + G2 dQ) - i Ga dA [+ eps_p]
  m(2, idx(V::c)) = chi_c;
  m(2, idx(V::q)) = kI * p.g1;
  m(2, idx(V::Q)) = kI * p.g2;
  m(2, idx(V::A)) = kI * p.ga;
  if (side == Sideband::plus) sys.rhs(2) = p.eps_p;
  // chi_a dA = -i Ga dc - i Omega dC
  m(3, idx(V::A)) = chi_a;
  m(3, idx(V::c)) = kI * p.ga;
  m(3, idx(V::C)) = kI * p.rabi;
  // chi_b dC = -i Omega dA
  m(4, idx(V::C)) = chi_b;
  m(4, idx(V::A)) = kI * p.rabi;
  // rot dQ = wm dX
  m(5, idx(V::Q)) = rot;
  m(5, idx(V::X)) = -wm;
  // (rot + 2 gm) dP = -we dX - G_sm dp
  m(6, idx(V::P)) = rot + 2.0 * gm;
  m(6, idx(V::X)) = we;
  m(6, idx(V::p)) = G_sm;
  // (rot + gm) dX = 2 wm dP - 2 we dQ - G_t dc - G_sm dq
  m(7, idx(V::X)) = rot + gm;
  m(7, idx(V::P)) = -2.0 * wm;
  m(7, idx(V::Q)) = 2.0 * we;
  m(7, idx(V::c)) = G_t;
  m(7, idx(V::q)) = G_sm;
  return sys;
}

// Classic RK4 for y' = f(t, y) with any Eigen state.
template <typename State, typename Rhs>
void rk4_step(State& y, double t, double h, const Rhs& f) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, State(y + 0.5 * h * k1));
  const State k3 = f(t + 0.5 * h, State(y + 0.5 * h * k2));
  const State k4 = f(t + h, State(y + h * k3));
  y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Drive {
  Vector8 probe = Vector8::Zero();
  Vector8 phonon = Vector8::Zero();
  double delta = 0.0;

  Vector8 operator()(double t) const {
    const cplx down = std::exp(-kI * delta * t);
    if (delta == 0.0) return probe + phonon;
    const cplx up = std::conj(down);
    return probe * down + phonon * (down + up);
  }
};

double projection_period(const SystemParams& p, double delta) {
  const double two_pi = 2.0 * std::numbers::pi;
  return delta == 0.0 ? 10.0 * two_pi / p.omega_m : two_pi / std::abs(delta);
}

}  // namespace

std::string_view label(Variable v) {
  static constexpr std::array<std::string_view, 8> names{"dq", "dp", "dc", "dA",
                                                          "dC", "dQ", "dP", "dX"};
  return names[static_cast<std::size_t>(idx(v))];
}

SidebandSystem assemble_plus(const SystemParams& p, const SteadyState& ss, double delta) {
  return assemble(p, ss, delta, Sideband::plus);
}

SidebandSystem assemble_minus(const SystemParams& p, const SteadyState& ss, double delta) {
  return assemble(p, ss, delta, Sideband::minus);
}

SidebandSolution solve_sidebands(const SidebandSystem& sys) {
  const Eigen::JacobiSVD<Matrix8> svd(sys.matrix);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  const double condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(condition < kMaxCondition)) {
    throw SingularMatrixError("singular sideband system at delta = " + std::to_string(sys.delta),
                              sys.delta, condition);
  }

  SidebandSolution sol;
  sol.condition = condition;
  sol.values = sys.matrix.partialPivLu().solve(sys.rhs);
  sol.residual_norm = (sys.matrix * sol.values - sys.rhs).norm();
  if (sol.residual_norm > kResidualTolerance * sys.rhs.norm()) {
    throw NumericalError("sideband solve residual too large at delta = " +
                         std::to_string(sys.delta));
  }
  return sol;
}

Matrix8 drift_matrix(const SystemParams& p, const SteadyState& ss) {
  using V = Variable;
  const double wm = p.omega_m;
  const double we = ss.omega_m_eff;
  const double gm = p.gamma_m;

  Matrix8 m = Matrix8::Zero();
  m(idx(V::q), idx(V::p)) = wm;

  m(idx(V::p), idx(V::p)) = -gm;
  m(idx(V::p), idx(V::q)) = -we;
  m(idx(V::p), idx(V::c)) = -ss.G(p);

  m(idx(V::c), idx(V::c)) = -(p.kappa + kI * p.delta_o);
  m(idx(V::c), idx(V::q)) = -kI * p.g1;
  m(idx(V::c), idx(V::Q)) = -kI * p.g2;
  m(idx(V::c), idx(V::A)) = -kI * p.ga;

  m(idx(V::A), idx(V::A)) = -(p.gamma_1 + kI * p.delta_a);
  m(idx(V::A), idx(V::c)) = -kI * p.ga;
  m(idx(V::A), idx(V::C)) = -kI * p.rabi;

  m(idx(V::C), idx(V::C)) = -(p.gamma_2 + kI * p.delta_b);
  m(idx(V::C), idx(V::A)) = -kI * p.rabi;

  m(idx(V::Q), idx(V::X)) = wm;

  m(idx(V::P), idx(V::P)) = -2.0 * gm;
  m(idx(V::P), idx(V::X)) = -we;
  m(idx(V::P), idx(V::p)) = -ss.G_sm(p);

  m(idx(V::X), idx(V::P)) = 2.0 * wm;
  m(idx(V::X), idx(V::X)) = -gm;
  m(idx(V::X), idx(V::Q)) = -2.0 * we;
  m(idx(V::X), idx(V::c)) = -ss.G_t(p);
  m(idx(V::X), idx(V::q)) = -ss.G_sm(p);
  return m;
}

DriftSpectrum drift_spectrum(const SystemParams& p, const SteadyState& ss) {
  const Eigen::ComplexEigenSolver<Matrix8> solver(drift_matrix(p, ss), false);
  if (solver.info() != Eigen::Success) throw NumericalError("drift eigensolve failed");
  DriftSpectrum out;
  out.max_real = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 8; ++i) {
    const cplx ev = solver.eigenvalues()(i);
    out.eigenvalues[static_cast<std::size_t>(i)] = ev;
    out.max_real = std::max(out.max_real, ev.real());
    out.spectral_radius = std::max(out.spectral_radius, std::abs(ev));
  }
  return out;
}

double max_time_step(const SystemParams& p, const SteadyState& ss, double delta) {
  const double fastest = std::max({std::abs(delta), p.omega_m, std::abs(p.delta_o),
                                   drift_spectrum(p, ss).spectral_radius});
  return 2.0 * std::numbers::pi / (50.0 * fastest);
}

TimeDomainResult time_domain_run(const SystemParams& p, const SteadyState& ss, double delta,
                                 const TimeDomainOptions& options) {
  using Mode = TimeDomainOptions::Mode;
  const Matrix8 m = drift_matrix(p, ss);
  const double dt_max = max_time_step(p, ss, delta);
  if (options.dt < 0.0 || options.dt > dt_max) {
    throw ValidationError("time step " + std::to_string(options.dt) +
                          " does not resolve the fastest frequency (max " + std::to_string(dt_max) + ")");
  }
  // Half the ceiling by default: narrow resonances amplify RK4 phase error.
  const double dt_target = options.dt > 0.0 ? options.dt : 0.5 * dt_max;

  Drive drive;
  drive.delta = delta;
  drive.probe(idx(Variable::c)) = p.eps_p;
  drive.phonon(idx(Variable::p)) = p.phonon_drive();

  const double period = projection_period(p, delta);
  const long n = std::max<long>(8, static_cast<long>(std::ceil(period / dt_target)));
  const double h = period / static_cast<double>(n);

  TimeDomainResult result;
  result.dt = h;

  auto rhs = [&](double t, const Vector8& x) -> Vector8 { return m * x + drive(t); };

  // Fourier coefficient on e^{-i delta t} over `periods` drive periods
  // starting at t0; rectangle rule equals the trapezoid rule for periodic data.
  auto project = [&](Vector8& x, double& t, long periods) {
    cplx acc{0.0, 0.0};
    const long steps = periods * n;
    for (long k = 0; k < steps; ++k) {
      acc += x(idx(Variable::c)) * std::exp(kI * delta * t);
      rk4_step(x, t, h, rhs);
      t += h;
    }
    result.steps += steps;
    return acc / static_cast<double>(steps);
  };

  Vector8 x = Vector8::Zero();
  double t = 0.0;
  long window_periods = 1;

  if (options.mode == Mode::periodic) {
    // Columns 0..7 propagate unit vectors without drive, column 8 the driven
    // state from rest; one period gives the monodromy and the particular part.
    using Block = Eigen::Matrix<cplx, 8, 9>;
    Block y = Block::Zero();
    y.leftCols<8>() = Matrix8::Identity();
    auto block_rhs = [&](double tau, const Block& s) -> Block {
      Block out = m * s;
      out.col(8) += drive(tau);
      return out;
    };
    double tau = 0.0;
    for (long k = 0; k < n; ++k) {
      rk4_step(y, tau, h, block_rhs);
      tau += h;
    }
    result.steps += n;
    const Matrix8 shoot = Matrix8::Identity() - y.leftCols<8>();
    x = shoot.partialPivLu().solve(Vector8(y.col(8)));
    if (!x.allFinite()) throw ConvergenceError("periodic shooting failed at delta = " + std::to_string(delta));
  } else {
    if (!drift_spectrum(p, ss).stable()) {
      throw ConvergenceError("drift matrix has a growing mode; transient integration cannot settle");
    }
    const double horizon = options.horizon > 0.0 ? options.horizon : 60.0 * 2.0 * std::numbers::pi / p.omega_m;
    // The last 20% of the horizon holds two equal windows of whole periods.
    window_periods = std::max<long>(1, static_cast<long>(std::floor(0.1 * horizon / period)));
    const long total = std::max<long>(static_cast<long>(std::ceil(horizon / h)), 10 * window_periods * n);
    const long settle = total - 2 * window_periods * n;
    for (long k = 0; k < settle; ++k) {
      rk4_step(x, t, h, rhs);
      t += h;
    }
    result.steps += settle;
  }

  const cplx first = project(x, t, window_periods);
  const cplx second = project(x, t, window_periods);
  const double scale = std::max(std::abs(second), std::abs(first));
  result.window_drift = scale > 0.0 ? std::abs(first - second) / scale : 0.0;
  if (!std::isfinite(result.window_drift) || result.window_drift > options.tolerance) {
    throw ConvergenceError("time-domain coefficient drifts by " + std::to_string(result.window_drift) +
                           " between projection windows at delta = " + std::to_string(delta));
  }
  result.delta_c_plus = options.mode == Mode::periodic ? first : second;
  return result;
}

cplx time_domain_delta_c(const SystemParams& p, const SteadyState& ss, double delta,
                         const TimeDomainOptions& options) {
  return time_domain_run(p, ss, delta, options).delta_c_plus;
}

}  // namespace omit
