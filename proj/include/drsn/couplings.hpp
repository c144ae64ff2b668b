// Hamiltonian energies and coupling design.
//
// With couplings J_m on the distance shells, the reduced Hamiltonian is
// diagonal in the spectral basis with energies E_k = 2 sum_m J_m P_m(x_k).
// Perfect state transfer at time t0 requires e^{-i E_k t0} (-1)^k to be
// independent of k. Two canonical target spectra realize it:
//
//   ladder: E_k = -k pi / t0         (equally spaced, Christandl style)
//   folded: E_k = -(k mod 2) pi / t0 (two-level, parity only)
//
// solve_couplings inverts the linear map J -> E for a chosen target. The
// elimination is written out here (partial pivoting) so the solver path
// stays independent of the eigen backend used elsewhere.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "drsn/errors.hpp"
#include "drsn/spectrum.hpp"

namespace drsn {

struct CouplingVector {
  std::vector<double> values; // J_0 .. J_d
};

struct EnergyLevels {
  std::vector<double> values; // E_0 .. E_d, following the descending x_k order
};

enum class TargetStrategy { ladder, folded, explicit_levels };

inline const char* to_string(TargetStrategy s) {
  switch (s) {
    case TargetStrategy::ladder: return "ladder";
    case TargetStrategy::folded: return "folded";
    case TargetStrategy::explicit_levels: return "explicit";
  }
  return "?";
}

struct PstTarget {
  TargetStrategy strategy = TargetStrategy::ladder;
  double transfer_time = 1.0;
  std::vector<double> levels; // used by explicit_levels only

  static PstTarget ladder(double t0) { return {TargetStrategy::ladder, t0, {}}; }
  static PstTarget folded(double t0) { return {TargetStrategy::folded, t0, {}}; }
  static PstTarget explicit_levels_at(std::vector<double> e, double t0 = 1.0) {
    return {TargetStrategy::explicit_levels, t0, std::move(e)};
  }

  std::vector<double> target_energies(int d) const {
    if (!(transfer_time > 0.0) || !std::isfinite(transfer_time))
      throw InvalidParameter("pst target: transfer time must be positive");
    const double pi = std::numbers::pi;
    std::vector<double> e(d + 1);
    switch (strategy) {
      case TargetStrategy::ladder:
        for (int k = 0; k <= d; ++k) e[k] = -k * pi / transfer_time;
        break;
      case TargetStrategy::folded:
        for (int k = 0; k <= d; ++k) e[k] = -(k % 2) * pi / transfer_time;
        break;
      case TargetStrategy::explicit_levels:
        if (static_cast<int>(levels.size()) != d + 1)
          throw InvalidParameter("pst target: explicit level list has " +
                                 std::to_string(levels.size()) + " entries, expected " +
                                 std::to_string(d + 1));
        e = levels;
        break;
    }
    return e;
  }
};

// E_k = 2 sum_m J_m P_m(x_k).
inline EnergyLevels energies(const CouplingVector& j, const Spectrum& s) {
  const int m = s.size();
  if (static_cast<int>(j.values.size()) != m)
    throw InvalidParameter("energies: coupling vector has " + std::to_string(j.values.size()) +
                           " entries, expected " + std::to_string(m));
  EnergyLevels e;
  e.values.resize(m);
  for (int k = 0; k < m; ++k) {
    double sum = 0.0;
    for (int l = 0; l < m; ++l) sum += j.values[l] * s.big_p(l, k);
    e.values[k] = 2.0 * sum;
  }
  return e;
}

// Transfer condition at t0: the phases e^{-i E_k t0} (-1)^k must coincide.
struct PstCheckResult {
  bool pst = false;
  double phase_residual = 0.0; // max_k |e^{-i E_k t0} (-1)^k - e^{-i E_0 t0}|
};

inline PstCheckResult pst_check(const EnergyLevels& e, double t0, double tol = 1e-9) {
  if (e.values.empty()) throw InvalidParameter("pst_check: empty energy list");
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw InvalidParameter("pst_check: t0 must be positive");
  const std::complex<double> z0 = std::polar(1.0, -e.values[0] * t0);
  PstCheckResult r;
  for (std::size_t k = 1; k < e.values.size(); ++k) {
    std::complex<double> z = std::polar(1.0, -e.values[k] * t0);
    if (k % 2 == 1) z = -z;
    r.phase_residual = std::max(r.phase_residual, std::abs(z - z0));
  }
  r.pst = r.phase_residual <= tol;
  return r;
}

// Invert 2 sum_m J_m P_m(x_k) = E_k^target by Gaussian elimination with
// partial pivoting.
inline CouplingVector solve_couplings(const Spectrum& s, const PstTarget& target) {
  const int m = s.size();
  std::vector<double> rhs = target.target_energies(s.d());
  std::vector<std::vector<double>> a(m, std::vector<double>(m));
  double max_entry = 0.0;
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      a[k][l] = 2.0 * s.big_p(l, k);
      max_entry = std::max(max_entry, std::abs(a[k][l]));
    }
  }
  const double pivot_floor = 1e-12 * max_entry;

  for (int col = 0; col < m; ++col) {
    int best = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[best][col])) best = r;
    if (std::abs(a[best][col]) <= pivot_floor)
      throw SolverFailure("solve_couplings: system singular at column " + std::to_string(col) +
                          " (pivot " + std::to_string(std::abs(a[best][col])) + ")");
    std::swap(a[col], a[best]);
    std::swap(rhs[col], rhs[best]);
    for (int r = col + 1; r < m; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      a[r][col] = 0.0;
      for (int c = col + 1; c < m; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  CouplingVector j;
  j.values.assign(m, 0.0);
  for (int row = m - 1; row >= 0; --row) {
    double v = rhs[row];
    for (int c = row + 1; c < m; ++c) v -= a[row][c] * j.values[c];
    j.values[row] = v / a[row][row];
  }
  return j;
}

} // namespace drsn
