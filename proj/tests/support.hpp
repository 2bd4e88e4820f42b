#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "omit/model.hpp"

namespace omit::test {

inline double rel(cplx a, cplx ref) {
  const double s = std::abs(ref);
  return s > 0.0 ? std::abs(a - ref) / s : std::abs(a - ref);
}

inline double rel(double a, double ref) { return rel(cplx{a, 0.0}, cplx{ref, 0.0}); }

// Bare cavity with the couplings and the phonon pump off.
inline SystemParams bare_cavity() {
  SystemParams p = scenario("fig2").params;
  p.g1 = p.g2 = p.ga = p.eps_m = 0.0;
  return p;
}

inline const char* const kPresets[] = {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};

}  // namespace omit::test
