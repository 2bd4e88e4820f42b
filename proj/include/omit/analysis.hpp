#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "omit/model.hpp"
#include "omit/response.hpp"

namespace omit {

/// Uniform detuning grid, endpoints included.
struct Grid {
  double min = 0.0;
  double max = 4.0;
  std::size_t count = 801;

  std::vector<double> points() const;
  double step() const { return (max - min) / static_cast<double>(count - 1); }
};

/// Throws ValidationError unless count >= 2 and min < max (both finite).
Grid validate_grid(const Grid& grid);

/// Parses "min:max:count".
Grid parse_grid(std::string_view text);

struct Profile {
  Method method = Method::closed_form;
  std::vector<double> deltas;
  std::vector<ProbeResponse> responses;  // grid points that evaluated, in order
  std::vector<double> skipped;           // grid points at a pole or singular system

  std::vector<double> absorption() const;
};

/// Evaluates the probe response on every grid point; pole points go to `skipped`.
Profile sweep(const SystemParams& p, const SteadyState& ss, const Grid& grid, Method method);

struct SpectralFeature {
  FeatureKind kind = FeatureKind::peak;
  double location = 0.0;   // parabola-refined
  double value = 0.0;      // Re(eps_out) at the refined location
  double prominence = 0.0;
  std::size_t index = 0;   // index into Profile::responses of the grid extremum
};

/// 2% of the max-min span of Re(eps_out).
double default_min_prominence(const Profile& profile, double fraction = 0.02);

/// Peaks and dips of Re(eps_out) with at least `min_prominence`, sorted by location.
std::vector<SpectralFeature> detect_features(const Profile& profile, double min_prominence);

/// Full width at half maximum of a peak, measured against a zero baseline by
/// linear interpolation between grid points. nullopt if a side never drops below half.
std::optional<double> half_max_width(const Profile& profile, const SpectralFeature& peak);

enum class RootCase { eq13, eq14, eq16 };

std::string_view to_string(RootCase c);
RootCase parse_root_case(std::string_view text);

struct RootReport {
  RootCase root_case = RootCase::eq13;
  std::vector<cplx> coefficients;  // ascending powers of delta
  std::vector<cplx> roots;
  std::vector<double> residuals;   // |poly(r)| / sum |c_k| |r|^k
  std::vector<cplx> resonant;
  double resonance_threshold = 0.0;
  std::optional<std::string> warning;
};

/// Expands the selected reduced denominator in powers of delta and finds all
/// of its roots via the companion matrix.
RootReport denominator_roots(RootCase root_case, const SystemParams& p, const SteadyState& ss);

/// Evaluates a polynomial given in ascending coefficients.
cplx evaluate_polynomial(const std::vector<cplx>& coefficients, cplx x);

/// Roots of a polynomial (ascending coefficients) from its companion matrix,
/// Newton-polished.
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coefficients);

struct FeatureTrack {
  FeatureKind kind = FeatureKind::peak;
  std::vector<std::optional<SpectralFeature>> per_phase;
};

struct PhaseStudy {
  std::vector<double> phases;
  std::vector<Profile> profiles;
  std::vector<std::vector<SpectralFeature>> features;
  std::vector<FeatureTrack> tracks;
  /// Dip track nearest the second-moment resonance 2 sqrt(omega_m omega_m_eff).
  std::optional<std::size_t> quadratic_track;
};

/// One sweep per phonon-pump phase with everything else fixed; features are
/// aligned across phases by nearest location at the previous phase.
PhaseStudy phase_study(const SystemParams& p, const std::vector<double>& phases, const Grid& grid,
                       Method method, double prominence_fraction = 0.02);

}  // namespace omit
