#pragma once

#include <string_view>

#include "omit/model.hpp"

namespace omit {

/// Susceptibility ladder and derived coefficients at one probe detuning.
/// `chi_*_o` are the minus-sideband variants (delta -> -delta).
struct Susceptibilities {
  double delta = 0.0;
  cplx chi_a, chi_b, chi_c, chi_d, chi_e, chi_f, chi_g;
  cplx chi_a_o, chi_b_o, chi_c_o;
  cplx alpha, beta, S;
  double G = 0.0;
  double G_sm = 0.0;
  cplx G_t;
};

struct ProbeResponse {
  double delta = 0.0;
  cplx delta_c_plus;
  cplx eps_out;
  cplx t_p;
  double nu_p = 0.0;   // absorption, Re(eps_out)
  double rho_p = 0.0;  // dispersion, Im(eps_out)
};

/// How the first-sideband cavity amplitude is obtained.
enum class Method {
  closed_form,   // reference closed form, evaluated as written
  linear_solve,  // dense solve of the plus-sideband system
  eliminated,    // closed form by exact elimination of the plus-sideband system
};

std::string_view to_string(Method method);

/// Output normalizations. Transmission uses sqrt(kappa), the output
/// quadrature sqrt(2 kappa). The two input-output conventions are kept
/// side by side on purpose.
struct OutputScales {
  double transmission;
  double quadrature;
};

OutputScales output_scales(double kappa);

Susceptibilities susceptibilities(const SystemParams& p, const SteadyState& ss, double delta);

/// Reference closed form for the first-sideband amplitude. Throws PoleError
/// when a denominator vanishes relative to its natural scale.
cplx delta_c_plus_closed_form(const SystemParams& p, const SteadyState& ss, double delta);

/// Closed form obtained by eliminating the mechanical and second-moment
/// amplitudes from the plus-sideband system. Agrees with the dense solve.
cplx delta_c_plus_eliminated(const SystemParams& p, const SteadyState& ss, double delta);

/// Assembles the probe response from an already computed amplitude.
ProbeResponse make_response(const SystemParams& p, double delta, cplx delta_c_plus);

ProbeResponse probe_response(const SystemParams& p, const SteadyState& ss, double delta,
                             Method method = Method::closed_form);

// Reduced output quadratures for special coupling configurations, as written.
// Each throws PreconditionError when a coupling that must vanish is non-zero.

/// G1 = G2 = Ga = eps_m = 0.
cplx reduced_bare(const SystemParams& p, double delta);
/// G1 = G2 = eps_m = 0.
cplx reduced_atoms(const SystemParams& p, double delta);
/// G2 = Ga = 0.
cplx reduced_linear(const SystemParams& p, const SteadyState& ss, double delta);
/// G2 = eps_m = 0.
cplx reduced_linear_atoms(const SystemParams& p, const SteadyState& ss, double delta);

}  // namespace omit
