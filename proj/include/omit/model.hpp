#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace omit {

using cplx = std::complex<double>;

/// One physical scenario. Everything is dimensionless, in units of the
/// mechanical frequency. Couplings are the effective (linearized) ones.
struct SystemParams {
  double omega_m = 1.0;      // mechanical frequency
  double omega_m_eff = 1.0;  // effective mechanical frequency
  double kappa = 0.0;        // cavity decay
  double gamma_m = 0.0;      // mechanical damping
  double gamma_1 = 0.0;      // |a>-|b> decay
  double gamma_2 = 0.0;      // |a>-|c> decay
  double rabi = 0.0;         // control-field Rabi frequency
  double delta_o = 0.0;      // effective cavity detuning
  double delta_a = 0.0;      // atomic detuning w_ab - w_l
  double delta_b = 0.0;      // atomic detuning w_cb + nu - w_l
  double g1 = 0.0;           // linear optomechanical coupling
  double g2 = 0.0;           // quadratic optomechanical coupling
  double ga = 0.0;           // collective atom-field coupling g*sqrt(N)
  double eps_l = 0.0;        // pump amplitude
  double eps_p = 1.0;        // probe amplitude
  double eps_m = 0.0;        // phonon-pump magnitude
  double phi_m = 0.0;        // phonon-pump phase, radians
  double n_th = 0.0;         // thermal phonon occupation

  /// Complex phonon drive eps_m * exp(i phi_m).
  cplx phonon_drive() const { return std::polar(eps_m, phi_m); }

  bool operator==(const SystemParams&) const = default;
};

/// Mean-field operating point.
///
/// `c_s` is the cavity amplitude in the laser frame; `c_gauge` = |c_s| is the
/// value after rotating the global field phase so the amplitude is real and
/// non-negative. The mechanical moments and the derived couplings use
/// `c_gauge`, the atomic coherences are solved against `c_s`.
struct SteadyState {
  cplx c_s;
  double c_gauge = 0.0;
  double q_s = 0.0;
  cplx Q_s;  // complex when the phonon drive has a non-trivial phase
  double P_s = 1.0;
  double X_s = 0.0;
  cplx A_s;
  cplx C_s;
  double omega_m_eff = 1.0;

  /// G = 2 (G1 + 2 G2 q_s).
  double G(const SystemParams& p) const { return 2.0 * (p.g1 + 2.0 * p.g2 * q_s); }
  /// G_sm = 2 c_s G1.
  double G_sm(const SystemParams& p) const { return 2.0 * c_gauge * p.g1; }
  /// G_t = 4 (G1 q_s + 2 G2 Q_s).
  cplx G_t(const SystemParams& p) const { return 4.0 * (p.g1 * q_s + 2.0 * p.g2 * Q_s); }
};

/// Residuals of the stationary drift equations evaluated at a steady state.
struct SteadyStateResiduals {
  double cavity = 0.0;
  double atom_a = 0.0;
  double atom_c = 0.0;
  double displacement = 0.0;
  double momentum = 0.0;
  double second_p = 0.0;
  double second_x = 0.0;

  double max() const;
};

/// Returns `p` unchanged, or throws ValidationError naming the first violated invariant.
SystemParams validate_params(const SystemParams& p);

/// Throws ValidationError on invalid params, NumericalError on a degenerate
/// operating point.
SteadyState steady_state(const SystemParams& p);

/// Substitutes `ss` back into the stationary equations of motion
/// (noise means zero, drives at their stationary values).
SteadyStateResiduals steady_state_residuals(const SystemParams& p, const SteadyState& ss);

enum class FeatureKind { peak, dip };

std::string_view to_string(FeatureKind kind);

struct ExpectedFeature {
  FeatureKind kind;
  double location;
};

struct ScenarioPreset {
  std::string name;
  std::string description;
  SystemParams params;
  std::vector<ExpectedFeature> expected_features;
};

/// Reference parameter sets. Throws ValidationError for unknown names.
const ScenarioPreset& scenario(std::string_view name);

const std::vector<ScenarioPreset>& all_scenarios();

std::vector<std::string> scenario_names();

}  // namespace omit
