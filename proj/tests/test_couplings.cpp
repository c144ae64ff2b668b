#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "drsn/couplings.hpp"
#include "drsn/graph.hpp"
#include "drsn/spectrum.hpp"

using namespace drsn;

namespace {

constexpr double pi = std::numbers::pi;

Spectrum family_spectrum(const FullGraph& g) { return spectrum_of(stratify(g).jacobi); }

void require_close(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(std::abs(got[i] - want[i]) <= tol);
}

} // namespace

TEST_CASE("energy levels of the printed coupling sets", "[couplings]") {
  SECTION("C_4 with J = (-pi/4, 0, pi/4)") {
    const Spectrum s = family_spectrum(build_cycle(2));
    require_close(energies(CouplingVector{{-pi / 4, 0.0, pi / 4}}, s).values, {0.0, -pi, 0.0},
                  1e-14);
  }
  SECTION("H(3,2) with J = (-3pi/4, pi/4, 0, 0)") {
    const Spectrum s = family_spectrum(build_hypercube(3));
    require_close(energies(CouplingVector{{-3 * pi / 4, pi / 4, 0.0, 0.0}}, s).values,
                  {0.0, -pi, -2 * pi, -3 * pi}, 1e-13);
  }
  SECTION("crown m=3 with J = (-pi/4, 0, 0, pi/4)") {
    const Spectrum s = family_spectrum(build_crown(3));
    require_close(energies(CouplingVector{{-pi / 4, 0.0, 0.0, pi / 4}}, s).values,
                  {0.0, -pi, 0.0, -pi}, 5e-14);
  }
  SECTION("size mismatch rejected") {
    const Spectrum s = family_spectrum(build_cycle(2));
    REQUIRE_THROWS_AS(energies(CouplingVector{{1.0, 2.0}}, s), InvalidParameter);
  }
}

TEST_CASE("phase alignment check", "[couplings]") {
  SECTION("exact ladder passes") {
    const PstCheckResult r = pst_check(EnergyLevels{{0.0, -pi, -2 * pi, -3 * pi}}, 1.0);
    REQUIRE(r.pst);
    REQUIRE(r.phase_residual <= 1e-12);
  }
  SECTION("a detuned level fails") {
    const PstCheckResult r = pst_check(EnergyLevels{{0.0, -pi, -2.1 * pi, -3 * pi}}, 1.0);
    REQUIRE_FALSE(r.pst);
    REQUIRE(r.phase_residual > 1e-3);
  }
  SECTION("folded assignment passes") {
    REQUIRE(pst_check(EnergyLevels{{0.0, -pi, 0.0, -pi}}, 1.0).pst);
  }
  SECTION("bad arguments rejected") {
    REQUIRE_THROWS_AS(pst_check(EnergyLevels{}, 1.0), InvalidParameter);
    REQUIRE_THROWS_AS(pst_check(EnergyLevels{{0.0}}, 0.0), InvalidParameter);
  }
}

TEST_CASE("solver reproduces the printed coupling sets", "[couplings]") {
  SECTION("C_4, folded target") {
    const Spectrum s = family_spectrum(build_cycle(2));
    require_close(solve_couplings(s, PstTarget::folded(1.0)).values, {-pi / 4, 0.0, pi / 4},
                  1e-12);
  }
  SECTION("H(3,2), ladder target") {
    const Spectrum s = family_spectrum(build_hypercube(3));
    require_close(solve_couplings(s, PstTarget::ladder(1.0)).values,
                  {-3 * pi / 4, pi / 4, 0.0, 0.0}, 1e-12);
  }
  SECTION("crown m=3, folded target") {
    const Spectrum s = family_spectrum(build_crown(3));
    require_close(solve_couplings(s, PstTarget::folded(1.0)).values,
                  {-pi / 4, 0.0, 0.0, pi / 4}, 1e-12);
  }
}

TEST_CASE("ladder couplings for the larger instances", "[couplings]") {
  SECTION("C_6") {
    const Spectrum s = family_spectrum(build_cycle(3));
    require_close(solve_couplings(s, PstTarget::ladder(1.0)).values,
                  {-3 * pi / 4, pi / 3, 0.0, pi / 12}, 1e-12);
  }
  SECTION("C_8") {
    const Spectrum s = family_spectrum(build_cycle(4));
    require_close(solve_couplings(s, PstTarget::ladder(1.0)).values,
                  {-pi, (2 + std::numbers::sqrt2) * pi / 8, 0.0,
                   (2 - std::numbers::sqrt2) * pi / 8, 0.0},
                  1e-12);
  }
  SECTION("H(4,2)") {
    const Spectrum s = family_spectrum(build_hypercube(4));
    require_close(solve_couplings(s, PstTarget::ladder(1.0)).values,
                  {-pi, pi / 4, 0.0, 0.0, 0.0}, 1e-12);
  }
  SECTION("H(5,2)") {
    const Spectrum s = family_spectrum(build_hypercube(5));
    require_close(solve_couplings(s, PstTarget::ladder(1.0)).values,
                  {-5 * pi / 4, pi / 4, 0.0, 0.0, 0.0, 0.0}, 1e-12);
  }
  SECTION("crown m=5") {
    const Spectrum s = family_spectrum(build_crown(5));
    require_close(solve_couplings(s, PstTarget::ladder(1.0)).values,
                  {-3 * pi / 4, pi / 5, 0.0, -pi / 20}, 1e-12);
  }
}

TEST_CASE("solver hits arbitrary targets across families and times", "[couplings][property]") {
  std::mt19937 rng(77031);
  std::uniform_real_distribution<double> t0_dist(0.3, 3.0);

  std::vector<Spectrum> spectra;
  for (int m : {2, 3, 4}) spectra.push_back(family_spectrum(build_cycle(m)));
  for (int d : {3, 4, 5}) spectra.push_back(family_spectrum(build_hypercube(d)));
  for (int m : {3, 4, 5}) spectra.push_back(family_spectrum(build_crown(m)));

  for (const Spectrum& s : spectra) {
    for (TargetStrategy strat : {TargetStrategy::ladder, TargetStrategy::folded}) {
      const double t0 = t0_dist(rng);
      const PstTarget target = (strat == TargetStrategy::ladder) ? PstTarget::ladder(t0)
                                                                 : PstTarget::folded(t0);
      const CouplingVector j = solve_couplings(s, target);
      const std::vector<double> want = target.target_energies(s.d());
      const EnergyLevels got = energies(j, s);
      for (int k = 0; k < s.size(); ++k)
        REQUIRE(std::abs(got.values[k] - want[k]) <= 1e-10 * std::max(1.0, std::abs(want[k])));
      REQUIRE(pst_check(got, t0).pst);
    }
  }
}

TEST_CASE("couplings scale inversely with the transfer time", "[couplings]") {
  const Spectrum s = family_spectrum(build_hypercube(4));
  const CouplingVector slow = solve_couplings(s, PstTarget::ladder(2.0));
  const CouplingVector fast = solve_couplings(s, PstTarget::ladder(1.0));
  REQUIRE(slow.values.size() == fast.values.size());
  for (std::size_t i = 0; i < slow.values.size(); ++i)
    REQUIRE(std::abs(2.0 * slow.values[i] - fast.values[i]) <=
            1e-10 * std::max(1.0, std::abs(fast.values[i])));
}

TEST_CASE("target construction rejects bad input", "[couplings]") {
  const Spectrum s = family_spectrum(build_cycle(2));
  REQUIRE_THROWS_AS(solve_couplings(s, PstTarget::ladder(0.0)), InvalidParameter);
  REQUIRE_THROWS_AS(solve_couplings(s, PstTarget::folded(-1.0)), InvalidParameter);
  const PstTarget bad = PstTarget::explicit_levels_at({0.0, -pi}); // d()=2 needs 3 levels
  REQUIRE_THROWS_AS(solve_couplings(s, bad), InvalidParameter);
  const PstTarget good = PstTarget::explicit_levels_at({0.0, -pi, -2 * pi});
  REQUIRE_NOTHROW(solve_couplings(s, good));
}

TEST_CASE("a singular coefficient matrix is reported", "[couplings]") {
  // two identical quadrature rows make the linear system rank deficient
  Spectrum s;
  s.eigenvalues = {1.0, 1.0};
  s.weights = {0.5, 0.5};
  s.paper_weights = {0.5, 0.5};
  s.p = {{1.0, 1.0}, {1.0, 1.0}};
  s.poly.jp.d = 1;
  s.poly.jp.alpha = {0.0, 0.0};
  s.poly.jp.beta = {0.0, 1.0};
  s.poly.jp.beta_sq = {0, 1};
  s.poly.jp.kappa = {1, 1};
  REQUIRE_THROWS_AS(solve_couplings(s, PstTarget::ladder(1.0)), SolverFailure);
}
