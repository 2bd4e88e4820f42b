#include "omit/response.hpp"

#include <cmath>
#include <initializer_list>
#include <string>

#include "omit/errors.hpp"
#include "omit/oracle.hpp"

namespace omit {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPoleTolerance = 1e-14;

// Divides, throwing PoleError when |den| is negligible against `scale`.
cplx guarded_div(cplx num, cplx den, double scale, double delta, const char* what) {
  if (!(std::abs(den) > kPoleTolerance * scale)) {
    throw PoleError(std::string("pole in ") + what + " at delta = " + std::to_string(delta), delta);
  }
  return num / den;
}

double magnitude_sum(std::initializer_list<cplx> terms) {
  double s = 0.0;
  for (const cplx& t : terms) s += std::abs(t);
  return s;
}

void require_zero(double value, const char* name, const char* formula) {
  if (value != 0.0) {
    throw PreconditionError(std::string(formula) + " requires " + name + " = 0");
  }
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::closed_form: return "closed_form";
    case Method::linear_solve: return "linear_solve";
    case Method::eliminated: return "eliminated";
  }
  return "unknown";
}

OutputScales output_scales(double kappa) {
  return {std::sqrt(kappa), std::sqrt(2.0 * kappa)};
}

Susceptibilities susceptibilities(const SystemParams& p, const SteadyState& ss, double delta) {
  const double d = delta;
  const double gm = p.gamma_m;
  const double wm = p.omega_m;
  const double we = ss.omega_m_eff;

  Susceptibilities s;
  s.delta = d;
  s.chi_a = p.gamma_1 - kI * d + kI * p.delta_a;
  s.chi_b = p.gamma_2 - kI * d + kI * p.delta_b;
  s.chi_c = -kI * d + kI * p.delta_o + p.kappa;
  s.chi_d = -kI * gm * d - d * d + wm * we;
  s.chi_e = 2.0 * wm * we + (gm - kI * d) * (2.0 * gm - kI * d);
  s.chi_f = 2.0 * wm * we * (2.0 * gm - kI * d) - kI * d * s.chi_e;
  s.chi_g = -2.0 * gm * gm + 3.0 * kI * gm * d + d * d + 2.0 * wm * we;
  s.chi_a_o = p.gamma_1 + kI * d + kI * p.delta_a;
  s.chi_b_o = p.gamma_2 + kI * d + kI * p.delta_b;
  s.chi_c_o = kI * d + kI * p.delta_o + p.kappa;

  s.G = ss.G(p);
  s.G_sm = ss.G_sm(p);
  s.G_t = ss.G_t(p);

  const cplx quartic = 2.0 * s.chi_d - s.chi_e * s.chi_g;
  s.alpha = s.G * s.G_sm * wm * quartic +
            s.G_t * s.chi_d * (-2.0 * gm * gm + 3.0 * kI * gm * d + d * d);
  s.beta = p.phonon_drive() * s.G_sm * wm * wm * quartic /
           (s.chi_d * s.chi_f * (d + kI * gm));
  s.S = 1.0 / (gm * s.chi_d * s.chi_f - kI * d * s.chi_d * s.chi_f);
  return s;
}

cplx delta_c_plus_closed_form(const SystemParams& p, const SteadyState& ss, double delta) {
  const Susceptibilities s = susceptibilities(p, ss, delta);
  const double wm = p.omega_m;
  const cplx drive = p.phonon_drive();

  cplx linear{0.0, 0.0};
  if (p.g1 != 0.0) {
    linear = guarded_div(-kI * p.g1 * wm * (s.G - drive), s.chi_d,
                         std::abs(p.omega_m * ss.omega_m_eff) + delta * delta, delta, "chi_d");
  }

  cplx quad_num{0.0, 0.0};
  cplx quad_den{0.0, 0.0};
  if (p.g2 != 0.0) {
    const double df_scale = std::abs(s.chi_d) * std::abs(s.chi_f);
    if (!(df_scale > 0.0) || !std::isfinite(std::abs(s.S)) || !std::isfinite(std::abs(s.beta))) {
      throw PoleError("pole in S at delta = " + std::to_string(delta), delta);
    }
    quad_num = kI * s.beta * p.g2 * s.S;
    quad_den = kI * s.alpha * p.g2 * s.S * wm;
  }

  cplx atomic{0.0, 0.0};
  if (p.ga != 0.0) {
    const cplx pair = s.chi_a * s.chi_b + p.rabi * p.rabi;
    atomic = guarded_div(p.ga * p.ga * s.chi_b, pair,
                         std::abs(s.chi_a) * std::abs(s.chi_b) + p.rabi * p.rabi, delta,
                         "atomic susceptibility");
  }

  const cplx num = p.eps_p + quad_num;
  const cplx den = s.chi_c + linear + quad_den + atomic;
  return guarded_div(num, den, magnitude_sum({s.chi_c, linear, quad_den, atomic}), delta,
                     "closed-form denominator");
}

cplx delta_c_plus_eliminated(const SystemParams& p, const SteadyState& ss, double delta) {
  const Susceptibilities s = susceptibilities(p, ss, delta);
  const double d = delta;
  const double gm = p.gamma_m;
  const double wm = p.omega_m;
  const cplx drive = p.phonon_drive();

  // Mechanics: q = q_c * c + q_0.
  const double d_scale = std::abs(p.omega_m * ss.omega_m_eff) + d * d;
  const cplx q_c = guarded_div(-wm * s.G, s.chi_d, d_scale, d, "chi_d");
  const cplx q_0 = guarded_div(wm * drive, s.chi_d, d_scale, d, "chi_d");

  // Second moments: chi_f Q = -wm (2 gm - i d) G_t c - G_sm wm (2 gm - 3 i d) q.
  cplx Q_c{0.0, 0.0};
  cplx Q_0{0.0, 0.0};
  if (p.g2 != 0.0) {
    const cplx h = s.G_sm * wm * (2.0 * gm - 3.0 * kI * d);
    const double f_scale = std::abs(s.chi_e) * d + 2.0 * wm * ss.omega_m_eff * std::abs(2.0 * gm - kI * d);
    Q_c = guarded_div(-wm * (2.0 * gm - kI * d) * s.G_t - h * q_c, s.chi_f, f_scale, d, "chi_f");
    Q_0 = guarded_div(-h * q_0, s.chi_f, f_scale, d, "chi_f");
  }

  cplx atomic{0.0, 0.0};
  if (p.ga != 0.0) {
    const cplx pair = s.chi_a * s.chi_b + p.rabi * p.rabi;
    atomic = guarded_div(p.ga * p.ga * s.chi_b, pair,
                         std::abs(s.chi_a) * std::abs(s.chi_b) + p.rabi * p.rabi, d,
                         "atomic susceptibility");
  }

  const cplx num = p.eps_p - kI * p.g1 * q_0 - kI * p.g2 * Q_0;
  const cplx lin = kI * p.g1 * q_c;
  const cplx quad = kI * p.g2 * Q_c;
  const cplx den = s.chi_c + lin + quad + atomic;
  return guarded_div(num, den, magnitude_sum({s.chi_c, lin, quad, atomic}), d,
                     "eliminated denominator");
}

ProbeResponse make_response(const SystemParams& p, double delta, cplx delta_c_plus) {
  const OutputScales scales = output_scales(p.kappa);
  ProbeResponse r;
  r.delta = delta;
  r.delta_c_plus = delta_c_plus;
  r.eps_out = scales.quadrature * delta_c_plus / p.eps_p;
  r.t_p = (p.eps_p - scales.transmission * delta_c_plus) / p.eps_p;
  r.nu_p = r.eps_out.real();
  r.rho_p = r.eps_out.imag();
  return r;
}

ProbeResponse probe_response(const SystemParams& p, const SteadyState& ss, double delta,
                             Method method) {
  switch (method) {
    case Method::closed_form:
      return make_response(p, delta, delta_c_plus_closed_form(p, ss, delta));
    case Method::eliminated:
      return make_response(p, delta, delta_c_plus_eliminated(p, ss, delta));
    case Method::linear_solve: {
      const SidebandSolution sol = solve_sidebands(assemble_plus(p, ss, delta));
      return make_response(p, delta, sol.value(Variable::c));
    }
  }
  throw ValidationError("unknown method");
}

cplx reduced_bare(const SystemParams& p, double delta) {
  require_zero(p.g1, "G1", "bare-cavity formula");
  require_zero(p.g2, "G2", "bare-cavity formula");
  require_zero(p.ga, "Ga", "bare-cavity formula");
  require_zero(p.eps_m, "eps_m", "bare-cavity formula");
  const cplx chi_c = -kI * delta + kI * p.delta_o + p.kappa;
  return guarded_div(std::sqrt(2.0 * p.kappa) * p.eps_p, chi_c, std::abs(p.kappa + kI * p.delta_o) + std::abs(delta),
                     delta, "bare-cavity formula");
}

cplx reduced_atoms(const SystemParams& p, double delta) {
  require_zero(p.g1, "G1", "atomic formula");
  require_zero(p.g2, "G2", "atomic formula");
  require_zero(p.eps_m, "eps_m", "atomic formula");
  const cplx chi_a = p.gamma_1 - kI * delta + kI * p.delta_a;
  const cplx chi_b = p.gamma_2 - kI * delta + kI * p.delta_b;
  const cplx chi_c = -kI * delta + kI * p.delta_o + p.kappa;
  const cplx pair = chi_a * chi_b + p.rabi * p.rabi;
  const cplx t1 = p.ga * p.ga * chi_b;
  const cplx t2 = chi_c * pair;
  return guarded_div(std::sqrt(2.0 * p.kappa) * pair, t1 + t2, magnitude_sum({t1, t2}), delta,
                     "atomic formula");
}

cplx reduced_linear(const SystemParams& p, const SteadyState& ss, double delta) {
  require_zero(p.g2, "G2", "linear-coupling formula");
  require_zero(p.ga, "Ga", "linear-coupling formula");
  const Susceptibilities s = susceptibilities(p, ss, delta);
  const double wm = p.omega_m;
  const cplx t1 = kI * p.phonon_drive() * p.g1 * wm;
  const cplx t2 = -kI * s.G * p.g1 * wm;
  const cplx t3 = s.chi_c * s.chi_d;
  return guarded_div(std::sqrt(2.0 * p.kappa) * s.chi_d, t1 + t2 + t3, magnitude_sum({t1, t2, t3}),
                     delta, "linear-coupling formula");
}

cplx reduced_linear_atoms(const SystemParams& p, const SteadyState& ss, double delta) {
  require_zero(p.g2, "G2", "linear-atomic formula");
  require_zero(p.eps_m, "eps_m", "linear-atomic formula");
  const Susceptibilities s = susceptibilities(p, ss, delta);
  const cplx pair = s.chi_a * s.chi_b + p.rabi * p.rabi;
  const cplx t1 = s.chi_b * s.chi_d * p.ga * p.ga;
  const cplx t2 = pair * (s.chi_c * s.chi_d - 2.0 * kI * p.g1 * p.g1 * p.omega_m);
  return guarded_div(std::sqrt(2.0 * p.kappa) * p.eps_p * s.chi_d * pair, t1 + t2,
                     magnitude_sum({t1, t2}), delta, "linear-atomic formula");
}

}  // namespace omit
