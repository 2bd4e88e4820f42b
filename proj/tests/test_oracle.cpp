#include <doctest.h>

#include <cmath>

#include "omit/errors.hpp"
#include "omit/oracle.hpp"
#include "omit/response.hpp"
#include "support.hpp"

using namespace omit;
using omit::test::bare_cavity;
using omit::test::rel;

namespace {
const cplx I{0.0, 1.0};
int at(Variable v) { return static_cast<int>(v); }
}  // namespace

TEST_CASE("decoupled plus system is block diagonal") {
  const SystemParams p = bare_cavity();
  const SteadyState ss = steady_state(p);
  const double d = 0.8;
  const SidebandSystem sys = assemble_plus(p, ss, d);
  const int c = at(Variable::c);
  for (int k = 0; k < 8; ++k) {
    if (k == c) continue;
    CHECK(sys.matrix(c, k) == cplx{0.0, 0.0});
    CHECK(sys.matrix(k, c) == cplx{0.0, 0.0});
    CHECK(sys.rhs(k) == cplx{0.0, 0.0});
  }
  CHECK(sys.matrix(c, c) == p.kappa + I * (p.delta_o - d));
  CHECK(sys.rhs(c) == cplx{p.eps_p, 0.0});
  CHECK(rel(solve_sidebands(sys).value(Variable::c), p.eps_p / (p.kappa + I * (p.delta_o - d))) <= 1e-15);
}

TEST_CASE("phonon drive enters the momentum row only") {
  SystemParams p = scenario("fig7").params;
  const SteadyState ss = steady_state(p);
  p.eps_p = 0.0;
  for (const SidebandSystem& sys : {assemble_plus(p, ss, 1.3), assemble_minus(p, ss, 1.3)}) {
    for (int k = 0; k < 8; ++k) {
      if (k == at(Variable::p)) CHECK(sys.rhs(k) == p.phonon_drive());
      else CHECK(sys.rhs(k) == cplx{0.0, 0.0});
    }
  }
  // The minus set carries no probe term even when the probe is on.
  const SidebandSystem minus = assemble_minus(scenario("fig6").params, steady_state(scenario("fig6").params), 1.0);
  CHECK(minus.rhs.isZero());
}

TEST_CASE("diagonal entries reproduce the susceptibilities") {
  const SystemParams p = scenario("fig5").params;
  const SteadyState ss = steady_state(p);
  const Susceptibilities s = susceptibilities(p, ss, 1.0);
  const SidebandSystem plus = assemble_plus(p, ss, 1.0);
  CHECK(plus.matrix(at(Variable::A), at(Variable::A)) == s.chi_a);
  CHECK(plus.matrix(at(Variable::C), at(Variable::C)) == s.chi_b);
  CHECK(plus.matrix(at(Variable::c), at(Variable::c)) == s.chi_c);
  const SidebandSystem minus = assemble_minus(p, ss, 1.0);
  CHECK(minus.matrix(at(Variable::A), at(Variable::A)) == s.chi_a_o);
  CHECK(minus.matrix(at(Variable::C), at(Variable::C)) == s.chi_b_o);
  CHECK(minus.matrix(at(Variable::c), at(Variable::c)) == s.chi_c_o);

  const SidebandSystem p0 = assemble_plus(p, ss, 0.0);
  const SidebandSystem m0 = assemble_minus(p, ss, 0.0);
  CHECK(p0.matrix == m0.matrix);
}

TEST_CASE("minus sideband vanishes without a phonon pump") {
  for (const char* name : {"fig2", "fig3", "fig4", "fig5", "fig6"}) {
    CAPTURE(std::string(name));
    const SystemParams p = scenario(name).params;
    const SteadyState ss = steady_state(p);
    for (const double d : {0.2, 1.0, 2.5}) {
      CHECK(solve_sidebands(assemble_minus(p, ss, d)).values.isZero(0.0));
    }
  }
  SystemParams p = scenario("fig4").params;
  p.eps_m = 0.2;
  const SteadyState ss = steady_state(p);
  CHECK(std::abs(solve_sidebands(assemble_minus(p, ss, 1.4)).value(Variable::c)) > 0.0);
}

TEST_CASE("dense solve meets its residual bound") {
  for (const char* name : omit::test::kPresets) {
    CAPTURE(std::string(name));
    const SystemParams p = scenario(name).params;
    const SteadyState ss = steady_state(p);
    for (const double d : {0.0, 0.7, 1.0, 2.006, 3.9}) {
      for (const SidebandSystem& sys : {assemble_plus(p, ss, d), assemble_minus(p, ss, d)}) {
        const SidebandSolution sol = solve_sidebands(sys);
        CHECK(sol.residual_norm <= 1e-10 * std::max(1.0, sys.rhs.norm()));
        CHECK((sys.matrix * sol.values - sys.rhs).norm() <= 1e-10 * std::max(1.0, sys.rhs.norm()));
        CHECK(sol.condition < 1e12);
      }
    }
  }
}

TEST_CASE("dense solve reproduces the atomic reduced response") {
  const SystemParams p = scenario("fig3").params;
  const SteadyState ss = steady_state(p);
  for (int k = 0; k <= 40; ++k) {
    const double d = 0.1 * k;
    const cplx dc = solve_sidebands(assemble_plus(p, ss, d)).value(Variable::c);
    CHECK(rel(std::sqrt(2.0 * p.kappa) * dc / p.eps_p, reduced_atoms(p, d)) <= 1e-9);
  }
}

TEST_CASE("singular system reports its detuning") {
  SystemParams p = scenario("fig3").params;
  p.gamma_1 = 0.0;
  p.gamma_2 = 0.0;
  p.rabi = 0.0;
  p.ga = 0.0;
  const SteadyState ss = steady_state(p);
  CHECK_THROWS_AS(solve_sidebands(assemble_plus(p, ss, p.delta_a)), SingularMatrixError);
  try {
    solve_sidebands(assemble_plus(p, ss, p.delta_a));
  } catch (const SingularMatrixError& e) {
    CHECK(e.delta() == p.delta_a);
    CHECK(e.condition() >= 1e12);
  }
}

TEST_CASE("drift matrix is the homogeneous part of the plus system") {
  for (const char* name : omit::test::kPresets) {
    CAPTURE(std::string(name));
    const SystemParams p = scenario(name).params;
    const SteadyState ss = steady_state(p);
    const Matrix8 m = drift_matrix(p, ss);
    for (const double d : {0.0, 0.9, 2.4}) {
      const Matrix8 expected = -(assemble_plus(p, ss, d).matrix + I * d * Matrix8::Identity());
      CHECK((m - expected).norm() <= 1e-14 * m.norm());
    }
  }
}

TEST_CASE("drift stability of the presets") {
  // Measured: the fig5-fig7 sets sit past the parametric instability threshold.
  for (const char* name : {"fig2", "fig3", "fig4"}) {
    CAPTURE(std::string(name));
    CHECK(drift_spectrum(scenario(name).params, steady_state(scenario(name).params)).stable());
  }
  for (const char* name : {"fig5", "fig6", "fig7"}) {
    CAPTURE(std::string(name));
    const DriftSpectrum s = drift_spectrum(scenario(name).params, steady_state(scenario(name).params));
    CHECK_FALSE(s.stable());
    CHECK(s.max_real < 0.05);
  }
}

TEST_CASE("transient integration converges to the bare-cavity response") {
  const SystemParams p = bare_cavity();
  const SteadyState ss = steady_state(p);
  TimeDomainOptions opts;
  opts.mode = TimeDomainOptions::Mode::transient;
  double last_error = 1.0;
  for (const double periods : {20.0, 60.0}) {
    opts.horizon = periods * 2.0 * M_PI;
    const TimeDomainResult r = time_domain_run(p, ss, p.delta_o, opts);
    const double err = rel(r.delta_c_plus, cplx{p.eps_p / p.kappa, 0.0});
    CHECK(err <= last_error);
    last_error = err;
  }
  CHECK(last_error <= 1e-3);
}

TEST_CASE("undriven dynamics decay to zero") {
  SystemParams p = scenario("fig3").params;
  const SteadyState ss = steady_state(p);
  p.eps_p = 0.0;
  TimeDomainOptions opts;
  opts.mode = TimeDomainOptions::Mode::transient;
  CHECK(std::abs(time_domain_delta_c(p, ss, 1.2, opts)) == 0.0);
  CHECK(std::abs(time_domain_delta_c(p, ss, 1.2)) <= 1e-14);
}

TEST_CASE("time-domain oracle matches the dense solve") {
  SUBCASE("fig6 at delta = 2.2") {
    const SystemParams p = scenario("fig6").params;
    const SteadyState ss = steady_state(p);
    const cplx ref = solve_sidebands(assemble_plus(p, ss, 2.2)).value(Variable::c);
    CHECK(rel(time_domain_delta_c(p, ss, 2.2), ref) <= 1e-3);
  }
  SUBCASE("transient and periodic modes agree on a stable preset") {
    const SystemParams p = scenario("fig3").params;
    const SteadyState ss = steady_state(p);
    TimeDomainOptions transient;
    transient.mode = TimeDomainOptions::Mode::transient;
    transient.horizon = 400.0 * 2.0 * M_PI;
    for (const double d : {0.5, 1.0, 1.99}) {
      const cplx ref = solve_sidebands(assemble_plus(p, ss, d)).value(Variable::c);
      CHECK(rel(time_domain_delta_c(p, ss, d), ref) <= 1e-3);
      CHECK(rel(time_domain_delta_c(p, ss, d, transient), ref) <= 1e-3);
    }
  }
  SUBCASE("phonon drive at zero detuning") {
    const SystemParams p = scenario("fig7").params;
    const SteadyState ss = steady_state(p);
    const cplx ref = solve_sidebands(assemble_plus(p, ss, 0.0)).value(Variable::c);
    CHECK(rel(time_domain_delta_c(p, ss, 0.0), ref) <= 1e-3);
  }
}

TEST_CASE("time-domain guards") {
  const SystemParams p = scenario("fig6").params;
  const SteadyState ss = steady_state(p);
  TimeDomainOptions coarse;
  coarse.dt = 2.0 * max_time_step(p, ss, 1.0);
  CHECK_THROWS_AS(time_domain_run(p, ss, 1.0, coarse), ValidationError);

  TimeDomainOptions transient;
  transient.mode = TimeDomainOptions::Mode::transient;
  CHECK_THROWS_AS(time_domain_run(p, ss, 1.0, transient), ConvergenceError);

  const TimeDomainResult r = time_domain_run(p, ss, 1.0);
  CHECK(r.dt <= max_time_step(p, ss, 1.0));
  CHECK(r.window_drift <= 1e-3);
  CHECK(r.steps > 0);
}
