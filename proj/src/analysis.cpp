#include "omit/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "omit/errors.hpp"

namespace omit {

namespace {

constexpr cplx kI{0.0, 1.0};

using Poly = std::vector<cplx>;

Poly operator*(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Poly operator*(cplx s, const Poly& a) {
  Poly out = a;
  for (cplx& c : out) c *= s;
  return out;
}

double parse_double(std::string_view s, std::string_view what) {
  try {
    std::size_t used = 0;
    const std::string str(s);
    const double v = std::stod(str, &used);
    if (used != str.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  }
}

// Vertex of the parabola through three points; falls back to the middle point.
std::pair<double, double> parabola_vertex(double x0, double y0, double x1, double y1, double x2,
                                          double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);
  if (curvature == 0.0 || !std::isfinite(curvature)) return {x1, y1};
  // y = y1 + b (x - x1) + curvature (x - x1)^2 with b from the divided differences
  const double b = d01 + curvature * (x1 - x0);
  double dx = -b / (2.0 * curvature);
  dx = std::clamp(dx, x0 - x1, x2 - x1);
  return {x1 + dx, y1 + b * dx + curvature * dx * dx};
}

std::vector<SpectralFeature> find_extrema(const std::vector<double>& x, const std::vector<double>& y,
                                          FeatureKind kind, double min_prominence) {
  const std::size_t n = y.size();
  std::vector<SpectralFeature> out;
  if (n < 3) return out;

  const double sign = kind == FeatureKind::peak ? 1.0 : -1.0;
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = sign * y[i];
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double tol = 1e-12 * (*hi - *lo);

  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(s[i] > s[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && s[j + 1] == s[i]) ++j;
    if (j + 1 >= n || !(s[j + 1] < s[i])) {
      i = j + 1;
      continue;
    }
    const std::size_t mid = (i + j) / 2;
    const double top = s[mid];

    // Ties go to the leftmost extremum: equal height to the left stops the scan,
    // to the right only strictly higher does.
    double left_min = top;
    for (std::size_t k = i; k-- > 0;) {
      if (s[k] >= top - tol) break;
      left_min = std::min(left_min, s[k]);
    }
    double right_min = top;
    for (std::size_t k = j + 1; k < n; ++k) {
      if (s[k] > top + tol) break;
      right_min = std::min(right_min, s[k]);
    }
    const double prominence = top - std::max(left_min, right_min);

    if (prominence >= min_prominence && prominence > 0.0) {
      const auto [loc, val] = parabola_vertex(x[i - 1], s[i - 1], x[mid], s[mid], x[j + 1], s[j + 1]);
      out.push_back({kind, loc, sign * val, prominence, mid});
    }
    i = j + 1;
  }
  return out;
}

void require_zero(double value, const char* name, RootCase c) {
  if (value != 0.0) {
    throw PreconditionError(std::string(to_string(c)) + " denominator requires " + name + " = 0");
  }
}

}  // namespace

std::vector<double> Grid::points() const {
  std::vector<double> out(count);
  const double h = step();
  for (std::size_t i = 0; i < count; ++i) out[i] = min + h * static_cast<double>(i);
  out.back() = max;
  return out;
}

Grid validate_grid(const Grid& grid) {
  if (grid.count < 2) throw ValidationError("grid needs at least 2 points");
  if (!std::isfinite(grid.min) || !std::isfinite(grid.max) || !(grid.min < grid.max)) {
    throw ValidationError("grid range must satisfy min < max");
  }
  return grid;
}

Grid parse_grid(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos) {
    throw ParseError("grid must look like min:max:count, got '" + std::string(text) + "'");
  }
  Grid g;
  g.min = parse_double(text.substr(0, a), "grid min");
  g.max = parse_double(text.substr(a + 1, b - a - 1), "grid max");
  const std::string_view count = text.substr(b + 1);
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), n);
  if (ec != std::errc{} || ptr != count.data() + count.size()) {
    throw ParseError("cannot parse grid count '" + std::string(count) + "'");
  }
  g.count = n;
  return validate_grid(g);
}

std::vector<double> Profile::absorption() const {
  std::vector<double> out;
  out.reserve(responses.size());
  for (const auto& r : responses) out.push_back(r.nu_p);
  return out;
}

Profile sweep(const SystemParams& p, const SteadyState& ss, const Grid& grid, Method method) {
  validate_params(p);
  Profile profile;
  profile.method = method;
  profile.deltas = validate_grid(grid).points();
  profile.responses.reserve(profile.deltas.size());
  for (const double d : profile.deltas) {
    try {
      profile.responses.push_back(probe_response(p, ss, d, method));
    } catch (const PoleError&) {
      profile.skipped.push_back(d);
    } catch (const SingularMatrixError&) {
      profile.skipped.push_back(d);
    }
  }
  return profile;
}

double default_min_prominence(const Profile& profile, double fraction) {
  const auto y = profile.absorption();
  if (y.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  return fraction * (*hi - *lo);
}

std::vector<SpectralFeature> detect_features(const Profile& profile, double min_prominence) {
  if (profile.responses.empty()) throw ValidationError("cannot detect features in an empty profile");
  std::vector<double> x;
  x.reserve(profile.responses.size());
  for (const auto& r : profile.responses) x.push_back(r.delta);
  const auto y = profile.absorption();

  auto out = find_extrema(x, y, FeatureKind::peak, min_prominence);
  auto dips = find_extrema(x, y, FeatureKind::dip, min_prominence);
  out.insert(out.end(), dips.begin(), dips.end());
  std::sort(out.begin(), out.end(),
            [](const SpectralFeature& a, const SpectralFeature& b) { return a.location < b.location; });
  return out;
}

std::optional<double> half_max_width(const Profile& profile, const SpectralFeature& peak) {
  const auto& r = profile.responses;
  const double half = 0.5 * peak.value;
  auto crossing = [&](std::size_t a, std::size_t b) {
    const double t = (r[a].nu_p - half) / (r[a].nu_p - r[b].nu_p);
    return r[a].delta + t * (r[b].delta - r[a].delta);
  };
  std::optional<double> left;
  for (std::size_t k = peak.index; k > 0; --k) {
    if (r[k - 1].nu_p < half) {
      left = crossing(k, k - 1);
      break;
    }
  }
  std::optional<double> right;
  for (std::size_t k = peak.index; k + 1 < r.size(); ++k) {
    if (r[k + 1].nu_p < half) {
      right = crossing(k, k + 1);
      break;
    }
  }
  if (!left || !right) return std::nullopt;
  return *right - *left;
}

std::string_view to_string(RootCase c) {
  switch (c) {
    case RootCase::eq13: return "eq13";
    case RootCase::eq14: return "eq14";
    case RootCase::eq16: return "eq16";
  }
  return "unknown";
}

RootCase parse_root_case(std::string_view text) {
  if (text == "eq13") return RootCase::eq13;
  if (text == "eq14") return RootCase::eq14;
  if (text == "eq16") return RootCase::eq16;
  throw ValidationError("unknown root case '" + std::string(text) + "' (eq13, eq14, eq16)");
}

cplx evaluate_polynomial(const std::vector<cplx>& coefficients, cplx x) {
  cplx acc{0.0, 0.0};
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coefficients) {
  std::vector<cplx> c = coefficients;
  while (!c.empty() && c.back() == cplx{0.0, 0.0}) c.pop_back();
  if (c.size() < 2) return {};
  const int degree = static_cast<int>(c.size()) - 1;

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw NumericalError("companion eigensolve failed");

  std::vector<cplx> derivative(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) derivative[k - 1] = static_cast<double>(k) * c[k];

  std::vector<cplx> roots;
  for (int i = 0; i < degree; ++i) {
    cplx r = solver.eigenvalues()(i);
    for (int it = 0; it < 3; ++it) {
      const cplx f = evaluate_polynomial(c, r);
      const cplx df = evaluate_polynomial(derivative, r);
      if (df == cplx{0.0, 0.0}) break;
      const cplx next = r - f / df;
      if (!(std::abs(evaluate_polynomial(c, next)) < std::abs(f))) break;
      r = next;
    }
    roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return std::pair{a.real(), a.imag()} < std::pair{b.real(), b.imag()};
  });
  return roots;
}

RootReport denominator_roots(RootCase root_case, const SystemParams& p, const SteadyState& ss) {
  validate_params(p);
  require_zero(p.g2, "G2", root_case);
  require_zero(p.eps_m, "eps_m", root_case);
  if (root_case != RootCase::eq16) require_zero(p.g1, "G1", root_case);
  if (root_case == RootCase::eq13) require_zero(p.ga, "Ga", root_case);

  // Each susceptibility in ascending powers of delta.
  const Poly chi_a{p.gamma_1 + kI * p.delta_a, -kI};
  const Poly chi_b{p.gamma_2 + kI * p.delta_b, -kI};
  const Poly chi_c{p.kappa + kI * p.delta_o, -kI};
  const Poly chi_d{cplx{p.omega_m * ss.omega_m_eff, 0.0}, -kI * p.gamma_m, cplx{-1.0, 0.0}};
  const Poly pair = chi_a * chi_b + Poly{cplx{p.rabi * p.rabi, 0.0}};
  const cplx ga2{p.ga * p.ga, 0.0};

  RootReport report;
  report.root_case = root_case;
  switch (root_case) {
    case RootCase::eq13:
      report.coefficients = chi_c;
      break;
    case RootCase::eq14:
      report.coefficients = ga2 * chi_b + chi_c * pair;
      break;
    case RootCase::eq16: {
      const Poly mech = chi_c * chi_d + Poly{-2.0 * kI * p.g1 * p.g1 * p.omega_m};
      report.coefficients = ga2 * (chi_b * chi_d) + pair * mech;
      break;
    }
  }

  double scale = 0.0;
  for (const cplx& c : report.coefficients) scale = std::max(scale, std::abs(c));
  if (std::abs(report.coefficients.back()) < 1e-12 * scale) {
    report.warning = "leading coefficient is negligible; polynomial is ill-conditioned";
  }

  report.roots = polynomial_roots(report.coefficients);
  report.resonance_threshold = 5.0 * std::max({p.kappa, p.gamma_1, p.gamma_m});
  for (const cplx& r : report.roots) {
    double natural = 0.0;
    double power = 1.0;
    for (const cplx& c : report.coefficients) {
      natural += std::abs(c) * power;
      power *= std::abs(r);
    }
    report.residuals.push_back(std::abs(evaluate_polynomial(report.coefficients, r)) / natural);
    if (std::abs(r.imag()) <= report.resonance_threshold) report.resonant.push_back(r);
  }
  return report;
}

PhaseStudy phase_study(const SystemParams& p, const std::vector<double>& phases, const Grid& grid,
                       Method method, double prominence_fraction) {
  if (phases.size() < 2) throw ValidationError("phase study needs at least 2 phases");
  validate_grid(grid);

  PhaseStudy study;
  study.phases = phases;
  for (const double phi : phases) {
    SystemParams q = p;
    q.phi_m = phi;
    const SteadyState ss = steady_state(q);
    study.profiles.push_back(sweep(q, ss, grid, method));
    const Profile& prof = study.profiles.back();
    study.features.push_back(detect_features(prof, default_min_prominence(prof, prominence_fraction)));
  }

  const std::size_t np = phases.size();
  for (const auto& f : study.features[0]) {
    FeatureTrack t;
    t.kind = f.kind;
    t.per_phase.assign(np, std::nullopt);
    t.per_phase[0] = f;
    study.tracks.push_back(std::move(t));
  }

  for (std::size_t k = 1; k < np; ++k) {
    const auto& current = study.features[k];
    // (distance, track, feature) candidates, assigned greedily by distance.
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t t = 0; t < study.tracks.size(); ++t) {
      const auto& prev = study.tracks[t].per_phase[k - 1];
      if (!prev) continue;
      for (std::size_t f = 0; f < current.size(); ++f) {
        if (current[f].kind != study.tracks[t].kind) continue;
        pairs.emplace_back(std::abs(current[f].location - prev->location), t, f);
      }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<bool> track_used(study.tracks.size(), false);
    std::vector<bool> feature_used(current.size(), false);
    for (const auto& [dist, t, f] : pairs) {
      if (track_used[t] || feature_used[f]) continue;
      track_used[t] = feature_used[f] = true;
      study.tracks[t].per_phase[k] = current[f];
    }
    for (std::size_t f = 0; f < current.size(); ++f) {
      if (feature_used[f]) continue;
      FeatureTrack t;
      t.kind = current[f].kind;
      t.per_phase.assign(np, std::nullopt);
      t.per_phase[k] = current[f];
      study.tracks.push_back(std::move(t));
    }
  }

  const double resonance = 2.0 * std::sqrt(p.omega_m * p.omega_m_eff);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < study.tracks.size(); ++t) {
    const auto& first = study.tracks[t].per_phase[0];
    if (study.tracks[t].kind != FeatureKind::dip || !first) continue;
    const double dist = std::abs(first->location - resonance);
    if (dist < best) {
      best = dist;
      study.quadratic_track = t;
    }
  }
  return study;
}

}  // namespace omit
