#include "omit/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "omit/errors.hpp"

namespace omit {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kDegenerate = 1e-14;

void require(bool ok, const char* message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

double SteadyStateResiduals::max() const {
  return std::max({cavity, atom_a, atom_c, displacement, momentum, second_p, second_x});
}

SystemParams validate_params(const SystemParams& p) {
  const std::array<std::pair<double, const char*>, 18> fields{{
      {p.omega_m, "omega_m"}, {p.omega_m_eff, "omega_m_eff"}, {p.kappa, "kappa"},
      {p.gamma_m, "gamma_m"}, {p.gamma_1, "gamma_1"}, {p.gamma_2, "gamma_2"},
      {p.rabi, "Omega"}, {p.delta_o, "Delta_o"}, {p.delta_a, "Delta_a"},
      {p.delta_b, "Delta_b"}, {p.g1, "G1"}, {p.g2, "G2"}, {p.ga, "Ga"},
      {p.eps_l, "eps_l"}, {p.eps_p, "eps_p"}, {p.eps_m, "eps_m"},
      {p.phi_m, "Phi_m"}, {p.n_th, "n_th"},
  }};
  for (const auto& [value, name] : fields) {
    if (!std::isfinite(value)) throw ValidationError(std::string(name) + " must be finite");
  }
  require(p.kappa > 0.0, "kappa must be positive");
  require(p.gamma_m > 0.0, "gamma_m must be positive");
  require(p.omega_m > 0.0, "omega_m must be positive");
  require(p.omega_m_eff > 0.0, "omega_m_eff must be positive");
  require(p.gamma_1 >= 0.0, "gamma_1 must be non-negative");
  require(p.gamma_2 >= 0.0, "gamma_2 must be non-negative");
  require(p.n_th >= 0.0, "n_th must be non-negative");
  require(p.eps_p > 0.0, "eps_p must be positive");
  require(p.g1 >= 0.0, "G1 must be non-negative");
  require(p.g2 >= 0.0, "G2 must be non-negative");
  require(p.ga >= 0.0, "Ga must be non-negative");
  require(p.eps_l >= 0.0, "eps_l must be non-negative");
  require(p.eps_m >= 0.0, "eps_m must be non-negative");
  require(p.phi_m >= 0.0 && p.phi_m < 2.0 * std::numbers::pi, "Phi_m must lie in [0, 2*pi)");
  return p;
}

SteadyState steady_state(const SystemParams& params) {
  const SystemParams p = validate_params(params);
  const cplx da = kI * p.delta_a + p.gamma_1;
  const cplx db = kI * p.delta_b + p.gamma_2;
  const double rabi2 = p.rabi * p.rabi;
  const cplx pair_det = da * db + rabi2;

  cplx atomic{0.0, 0.0};
  if (p.ga != 0.0) {
    if (std::abs(pair_det) <= kDegenerate * (std::abs(da) * std::abs(db) + rabi2)) {
      throw NumericalError("degenerate operating point: atomic pair determinant vanishes");
    }
    atomic = p.ga * p.ga * db / pair_det;
  }
  const cplx bare = p.kappa + kI * p.delta_o;
  const cplx den = bare + atomic;
  if (std::abs(den) <= kDegenerate * (std::abs(bare) + std::abs(atomic))) {
    throw NumericalError("degenerate operating point: cavity denominator vanishes");
  }

  SteadyState ss;
  ss.omega_m_eff = p.omega_m_eff;
  ss.c_s = p.eps_l / den;
  ss.c_gauge = std::abs(ss.c_s);

  // (da) A + i Omega C = -i Ga c,  i Omega A + (db) C = 0
  if (ss.c_s != cplx{0.0, 0.0} && p.ga != 0.0) {
    const cplx rhs = -kI * p.ga * ss.c_s;
    ss.A_s = rhs * db / pair_det;
    ss.C_s = -kI * p.rabi * rhs / pair_det;
  }

  const double we = p.omega_m_eff;
  ss.P_s = 1.0 + 2.0 * p.n_th;
  ss.X_s = 0.0;
  ss.q_s = -p.g1 * ss.c_gauge / we;
  ss.Q_s = p.omega_m * ss.P_s / we +
           (p.g1 * p.g1 * ss.c_gauge * ss.c_gauge - p.g1 * ss.c_gauge * p.phonon_drive()) / (we * we);
  return ss;
}

SteadyStateResiduals steady_state_residuals(const SystemParams& p, const SteadyState& ss) {
  const cplx da = kI * p.delta_a + p.gamma_1;
  const cplx db = kI * p.delta_b + p.gamma_2;
  const double we = ss.omega_m_eff;
  const double c = ss.c_gauge;
  const double p_s = 0.0;

  SteadyStateResiduals r;
  r.cavity = std::abs(-(p.kappa + kI * p.delta_o) * ss.c_s - kI * p.ga * ss.A_s + p.eps_l);
  r.atom_a = std::abs(da * ss.A_s + kI * p.ga * ss.c_s + kI * p.rabi * ss.C_s);
  r.atom_c = std::abs(db * ss.C_s + kI * p.rabi * ss.A_s);
  r.displacement = std::abs(p.omega_m * p_s);
  // The phonon drive oscillates at delta and averages out of the momentum
  // equation; its product with <q> survives in the X equation.
  r.momentum = std::abs(-we * ss.q_s - p.gamma_m * p_s - p.g1 * c);
  r.second_p = std::abs(-2.0 * p.gamma_m * ss.P_s - we * ss.X_s + 2.0 * p.gamma_m * (1.0 + 2.0 * p.n_th));
  r.second_x = std::abs(-p.gamma_m * ss.X_s + 2.0 * ss.P_s * p.omega_m - 2.0 * we * ss.Q_s -
                        2.0 * p.g1 * c * ss.q_s + 2.0 * ss.q_s * p.phonon_drive());
  return r;
}

std::string_view to_string(FeatureKind kind) { return kind == FeatureKind::peak ? "peak" : "dip"; }

namespace {

SystemParams shared_defaults() {
  SystemParams p;
  p.eps_p = 1.0;
  p.delta_o = 1.0;
  p.phi_m = 0.0;
  p.omega_m = 1.0;
  p.n_th = 0.0;
  p.eps_m = 0.0;
  return p;
}

std::vector<ScenarioPreset> build_presets() {
  std::vector<ScenarioPreset> out;

  {
    SystemParams p = shared_defaults();
    p.rabi = 0.7;
    p.kappa = 0.1;
    p.omega_m_eff = 1.0006;
    p.delta_a = 0.02;
    p.delta_b = 0.02;
    p.gamma_1 = 0.0001;
    p.gamma_2 = 0.0001;
    p.eps_l = 0.05;
    p.gamma_m = 0.00016;
    out.push_back({"fig2", "bare cavity: all couplings off", p, {{FeatureKind::peak, 1.0}}});
  }
  {
    SystemParams p = shared_defaults();
    p.rabi = 0.01;
    p.kappa = 0.2;
    p.omega_m_eff = 1.006;
    p.delta_a = 1.0;
    p.delta_b = 1.0;
    p.gamma_1 = 0.30;
    p.gamma_2 = 0.01;
    p.eps_l = 0.5;
    p.ga = 1.0;
    p.gamma_m = 0.001;
    out.push_back({"fig3", "atomic coupling only", p, {{FeatureKind::dip, 1.0}}});
  }
  {
    SystemParams p = shared_defaults();
    p.rabi = 1.0;
    p.kappa = 0.1;
    p.omega_m_eff = 1.006;
    p.delta_a = 1.0;
    p.delta_b = 2.0;
    p.gamma_1 = 1.01;
    p.gamma_2 = 0.01;
    p.eps_l = 0.5;
    p.g1 = 0.15;
    p.gamma_m = 0.004;
    out.push_back({"fig4", "linear optomechanical coupling only", p, {{FeatureKind::dip, 1.0}}});
  }
  {
    SystemParams p = shared_defaults();
    p.rabi = 1.0;
    p.kappa = 0.3;
    p.omega_m_eff = 1.006;
    p.delta_a = 1.0;
    p.delta_b = 1.0;
    p.gamma_1 = 0.35;
    p.gamma_2 = 0.075;
    p.eps_l = 0.05;
    p.ga = 2.0;
    p.g1 = 0.15;
    p.gamma_m = 0.0016;
    out.push_back({"fig5", "linear + atomic coupling", p,
                   {{FeatureKind::dip, 1.0}, {FeatureKind::dip, 3.0}}});
  }
  {
    SystemParams p = shared_defaults();
    p.rabi = 0.6;
    p.kappa = 0.1;
    p.omega_m_eff = 1.006;
    p.delta_a = 0.02;
    p.delta_b = 0.03;
    p.gamma_1 = 0.001;
    p.gamma_2 = 0.001;
    p.eps_l = 0.05;
    p.g1 = 0.19;
    p.ga = 0.22;
    p.g2 = 0.26;
    p.gamma_m = 0.0015;
    out.push_back({"fig6", "linear + quadratic + atomic coupling", p,
                   {{FeatureKind::dip, 0.6}, {FeatureKind::dip, 1.0}, {FeatureKind::dip, 2.2}}});
  }
  {
    SystemParams p = shared_defaults();
    p.rabi = 0.5;
    p.kappa = 0.2;
    p.omega_m_eff = 1.006;
    p.delta_a = 0.1;
    p.delta_b = 0.1;
    p.gamma_1 = 0.001;
    p.gamma_2 = 0.001;
    p.eps_m = 0.3;
    p.gamma_m = 0.00015;
    p.g1 = 0.23;
    p.ga = 0.26;
    p.g2 = 0.025;
    // Pump amplitude unspecified for this set; same as fig5 and fig6.
    p.eps_l = 0.05;
    out.push_back({"fig7", "all couplings + phonon pump, Phi_m = 0", p, {}});
    p.phi_m = std::numbers::pi / 2.0;
    out.push_back({"fig7_phi_pi2", "all couplings + phonon pump, Phi_m = pi/2", p, {}});
    p.phi_m = std::numbers::pi;
    out.push_back({"fig7_phi_pi", "all couplings + phonon pump, Phi_m = pi", p, {}});
  }
  return out;
}

}  // namespace

const std::vector<ScenarioPreset>& all_scenarios() {
  static const std::vector<ScenarioPreset> presets = build_presets();
  return presets;
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const auto& preset : all_scenarios()) names.push_back(preset.name);
  return names;
}

const ScenarioPreset& scenario(std::string_view name) {
  for (const auto& preset : all_scenarios()) {
    if (preset.name == name) return preset;
  }
  std::ostringstream msg;
  msg << "unknown scenario '" << name << "'; valid names:";
  for (const auto& preset : all_scenarios()) msg << ' ' << preset.name;
  throw ValidationError(msg.str());
}

}  // namespace omit
