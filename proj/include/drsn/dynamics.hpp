// Intrinsic-decoherence dynamics in the reduced spectral picture.
//
// The master equation  drho/dt = -i[H, rho] - (gamma/2)[H, [H, rho]]
// acts diagonally on the energy-basis matrix elements:
//
//   rho_{kk'}(t) = rho_{kk'}(0) exp(-i t dE - (gamma t / 2) dE^2),
//   dE = E_k - E_{k'}.
//
// Starting at the reference vertex, rho_{kk'}(0) = sqrt(mu_k mu_k'), and the
// antipodal-transfer fidelity picks up the (-1)^k sign alternation of the
// last stratum component:
//
//   F(t) = sum_{kk'} (-1)^{k+k'} mu_k mu_k' exp(-i t dE - (gamma t / 2) dE^2).
//
// Only pairs with dE = 0 survive t -> inf, giving a gamma-independent steady
// fidelity. Three independent oracle routes validate the closed form: an RK4
// integrator of the master equation (generic matrix products), a truncated
// Kraus sum with Poissonian weights, and a dense diagonalization of the full
// vertex-space Hamiltonian.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drsn/couplings.hpp"
#include "drsn/errors.hpp"
#include "drsn/graph.hpp"
#include "drsn/spectrum.hpp"

namespace drsn {

struct DecoherenceParams {
  double gamma = 0.0; // intrinsic decoherence rate, >= 0
};

namespace detail {

inline void validate_dynamics_args(const EnergyLevels& e, DecoherenceParams dp, double t) {
  if (e.values.empty()) throw InvalidParameter("dynamics: empty energy list");
  if (!(dp.gamma >= 0.0) || !std::isfinite(dp.gamma))
    throw InvalidParameter("dynamics: gamma must be finite and non-negative");
  if (!(t >= 0.0) || !std::isfinite(t))
    throw InvalidParameter("dynamics: time must be finite and non-negative");
}

inline double max_level_gap(const std::vector<double>& e) {
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  return *hi - *lo;
}

} // namespace detail

// Transfer fidelity with an explicit weight vector. The public entry points
// pass Spectrum::weights; the literal stratum-scaled normalization
// (Spectrum::paper_weights) plugs in through here as a compatibility mode.
inline double fidelity_from_weights(const std::vector<double>& w, const std::vector<double>& e,
                                    double gamma, double t) {
  if (w.size() != e.size()) throw InvalidParameter("fidelity: weight/energy size mismatch");
  const int m = static_cast<int>(e.size());
  std::complex<double> f = 0.0;
  for (int k = 0; k < m; ++k) {
    for (int q = 0; q < m; ++q) {
      const double de = e[k] - e[q];
      const double sign = ((k + q) % 2 == 0) ? 1.0 : -1.0;
      const double damp = std::exp(-0.5 * gamma * t * de * de);
      f += sign * w[k] * w[q] * damp * std::polar(1.0, -t * de);
    }
  }
  if (std::abs(f.imag()) > 1e-12)
    throw NumericalError("fidelity: imaginary residual " + std::to_string(f.imag()));
  return f.real();
}

inline double fidelity(const EnergyLevels& e, const Spectrum& s, DecoherenceParams dp, double t) {
  detail::validate_dynamics_args(e, dp, t);
  return fidelity_from_weights(s.weights, e.values, dp.gamma, t);
}

// Long-time limit: diagonal pairs plus any exactly degenerate level pairs.
// The degeneracy tolerance scales with the level magnitude.
inline double steady_fidelity_from_weights(const std::vector<double>& w,
                                           const std::vector<double>& e,
                                           double degeneracy_tol = -1.0) {
  if (w.size() != e.size()) throw InvalidParameter("steady fidelity: weight/energy size mismatch");
  const int m = static_cast<int>(e.size());
  if (degeneracy_tol < 0.0) {
    double emax = 0.0;
    for (double x : e) emax = std::max(emax, std::abs(x));
    degeneracy_tol = 1e-9 * std::max(1.0, emax);
  }
  double f = 0.0;
  for (int k = 0; k < m; ++k) f += w[k] * w[k];
  for (int k = 0; k < m; ++k) {
    for (int q = k + 1; q < m; ++q) {
      if (std::abs(e[k] - e[q]) <= degeneracy_tol) {
        const double sign = ((k + q) % 2 == 0) ? 1.0 : -1.0;
        f += 2.0 * sign * w[k] * w[q];
      }
    }
  }
  return f;
}

inline double steady_fidelity(const EnergyLevels& e, const Spectrum& s,
                              double degeneracy_tol = -1.0) {
  if (e.values.size() != s.weights.size())
    throw InvalidParameter("steady fidelity: energy/spectrum size mismatch");
  return steady_fidelity_from_weights(s.weights, e.values, degeneracy_tol);
}

struct FidelityTrace {
  std::vector<double> times;
  std::vector<double> values;
  double gamma = 0.0;
  std::string label;
};

inline FidelityTrace fidelity_trace(const EnergyLevels& e, const Spectrum& s,
                                    DecoherenceParams dp, double t_max, double dt,
                                    std::string label = "",
                                    const std::vector<double>* weights_override = nullptr) {
  detail::validate_dynamics_args(e, dp, 0.0);
  if (!(dt > 0.0) || !(t_max >= 0.0))
    throw InvalidParameter("fidelity_trace: need dt > 0 and t_max >= 0");
  const std::vector<double>& w = weights_override ? *weights_override : s.weights;
  const int n = static_cast<int>(std::floor(t_max / dt + 1e-9)) + 1;
  FidelityTrace tr;
  tr.gamma = dp.gamma;
  tr.label = std::move(label);
  tr.times.resize(n);
  tr.values.resize(n);
  for (int i = 0; i < n; ++i) {
    tr.times[i] = i * dt;
    tr.values[i] = fidelity_from_weights(w, e.values, dp.gamma, tr.times[i]);
  }
  return tr;
}

// First strict local maximum of the sampled trace; falls back to the global
// maximum when the trace is monotone over the window.
struct TracePeak {
  int index = 0;
  double t = 0.0;
  double value = 0.0;
};

inline TracePeak first_peak(const FidelityTrace& tr) {
  if (tr.values.empty()) throw InvalidParameter("first_peak: empty trace");
  const int n = static_cast<int>(tr.values.size());
  for (int i = 1; i + 1 < n; ++i) {
    if (tr.values[i] >= tr.values[i - 1] && tr.values[i] > tr.values[i + 1])
      return {i, tr.times[i], tr.values[i]};
  }
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (tr.values[i] > tr.values[best]) best = i;
  return {best, tr.times[best], tr.values[best]};
}

// Density matrices, either in the energy eigenbasis or rotated back to the
// stratum (Krylov) basis.
enum class StateBasis { energy, krylov };

struct EvolvedState {
  double t = 0.0;
  StateBasis basis = StateBasis::energy;
  Eigen::MatrixXcd rho;
};

inline EvolvedState evolve_closed_form(const EnergyLevels& e, const Spectrum& s,
                                       DecoherenceParams dp, double t) {
  detail::validate_dynamics_args(e, dp, t);
  const int m = s.size();
  if (static_cast<int>(e.values.size()) != m)
    throw InvalidParameter("evolve_closed_form: energy/spectrum size mismatch");
  EvolvedState st;
  st.t = t;
  st.basis = StateBasis::energy;
  st.rho.resize(m, m);
  for (int k = 0; k < m; ++k) {
    for (int q = 0; q < m; ++q) {
      const double de = e.values[k] - e.values[q];
      const double amp = std::sqrt(s.weights[k] * s.weights[q]);
      st.rho(k, q) = amp * std::exp(-0.5 * dp.gamma * t * de * de) *
                     std::polar(1.0, -t * de);
    }
  }
  return st;
}

// Rotate an energy-basis state into the stratum basis through the overlap
// matrix V(l,k) = sqrt(mu_k) p_l(x_k).
inline EvolvedState to_krylov_basis(const EvolvedState& st, const Spectrum& s) {
  if (st.basis != StateBasis::energy)
    throw InvalidParameter("to_krylov_basis: state is not in the energy basis");
  const int m = s.size();
  if (st.rho.rows() != m || st.rho.cols() != m)
    throw InvalidParameter("to_krylov_basis: state/spectrum size mismatch");
  Eigen::MatrixXd v(m, m);
  for (int l = 0; l < m; ++l)
    for (int k = 0; k < m; ++k) v(l, k) = s.eigenvector_component(l, k);
  EvolvedState out;
  out.t = st.t;
  out.basis = StateBasis::krylov;
  out.rho = v * st.rho * v.transpose();
  return out;
}

// Fidelity extracted from a density matrix in either basis.
inline double target_fidelity(const EvolvedState& st, const Spectrum& s) {
  const int m = s.size();
  if (st.rho.rows() != m || st.rho.cols() != m)
    throw InvalidParameter("target_fidelity: state/spectrum size mismatch");
  std::complex<double> f = 0.0;
  if (st.basis == StateBasis::krylov) {
    f = st.rho(m - 1, m - 1);
  } else {
    for (int k = 0; k < m; ++k) {
      for (int q = 0; q < m; ++q) {
        const double sign = ((k + q) % 2 == 0) ? 1.0 : -1.0;
        f += sign * std::sqrt(s.weights[k] * s.weights[q]) * st.rho(k, q);
      }
    }
  }
  if (std::abs(f.imag()) > 1e-12)
    throw NumericalError("target_fidelity: imaginary residual " + std::to_string(f.imag()));
  return f.real();
}

// ---------- oracle 1: explicit RK4 integration of the master equation ----

// Fastest decay/rotation scale of the generator; used for step control.
inline double generator_spectral_radius(const EnergyLevels& e, DecoherenceParams dp) {
  const double de = detail::max_level_gap(e.values);
  const double rot = de;
  const double damp = 0.5 * dp.gamma * de * de;
  return std::sqrt(rot * rot + damp * damp);
}

inline double suggested_rk_step(const EnergyLevels& e, DecoherenceParams dp) {
  const double r = generator_spectral_radius(e, dp);
  return r > 0.0 ? std::min(0.1, 0.02 / r) : 0.1;
}

// Integrate drho/dt = -i[H,rho] - (gamma/2)[H,[H,rho]] with fixed-step RK4,
// sampling `samples` evenly spaced states on [0, t_max]. Deliberately uses
// generic dense products (H as a matrix) rather than the closed-form phase
// factors, so it is an independent route to the same trajectory.
inline std::vector<EvolvedState> integrate_master_equation(const EnergyLevels& e,
                                                           const Spectrum& s,
                                                           DecoherenceParams dp, double t_max,
                                                           double dt, int samples = 0) {
  detail::validate_dynamics_args(e, dp, t_max);
  if (!(dt > 0.0)) throw InvalidParameter("integrate_master_equation: need dt > 0");
  const double radius = generator_spectral_radius(e, dp);
  if (radius * dt > 2.5)
    throw IntegrationFailure("integrate_master_equation: step " + std::to_string(dt) +
                             " outside the RK4 stability region (|lambda| dt = " +
                             std::to_string(radius * dt) + " > 2.5)");
  if (samples <= 0) samples = std::max(2, static_cast<int>(std::floor(t_max / 0.01)) + 1);
  if (t_max == 0.0) samples = 1;

  const int m = s.size();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m, m);
  for (int k = 0; k < m; ++k) h(k, k) = e.values[k];
  const std::complex<double> minus_i(0.0, -1.0);
  const auto deriv = [&](const Eigen::MatrixXcd& rho) {
    const Eigen::MatrixXcd comm = h * rho - rho * h;
    return (minus_i * comm - 0.5 * dp.gamma * (h * comm - comm * h)).eval();
  };

  Eigen::MatrixXcd rho(m, m);
  for (int k = 0; k < m; ++k)
    for (int q = 0; q < m; ++q) rho(k, q) = std::sqrt(s.weights[k] * s.weights[q]);

  std::vector<EvolvedState> out;
  out.reserve(samples);
  out.push_back({0.0, StateBasis::energy, rho});
  double t = 0.0;
  for (int i = 1; i < samples; ++i) {
    const double t_next = t_max * i / (samples - 1);
    const double span = t_next - t;
    const int steps = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-12)));
    const double hstep = span / steps;
    for (int sstep = 0; sstep < steps; ++sstep) {
      const Eigen::MatrixXcd k1 = deriv(rho);
      const Eigen::MatrixXcd k2 = deriv(rho + 0.5 * hstep * k1);
      const Eigen::MatrixXcd k3 = deriv(rho + 0.5 * hstep * k2);
      const Eigen::MatrixXcd k4 = deriv(rho + hstep * k3);
      rho += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    t = t_next;
    out.push_back({t, StateBasis::energy, rho});
  }
  return out;
}

// ---------- oracle 2: truncated Kraus decomposition ----------------------

// Poisson pmf in log space; exact at lambda = 0.
inline double poisson_pmf(int l, double lambda) {
  if (lambda == 0.0) return l == 0 ? 1.0 : 0.0;
  return std::exp(l * std::log(lambda) - lambda - std::lgamma(static_cast<double>(l) + 1.0));
}

// Smallest l_max whose Poisson tail beyond it stays under `tail` for the
// largest level magnitude present.
inline int kraus_truncation_order(DecoherenceParams dp, double t, double max_abs_e,
                                  double tail = 1e-12) {
  const double lambda = dp.gamma * t * max_abs_e * max_abs_e;
  if (lambda == 0.0) return 0;
  double cum = 0.0;
  for (int l = 0; l <= 200000; ++l) {
    cum += poisson_pmf(l, lambda);
    if (1.0 - cum < tail) return l;
  }
  throw NumericalError("kraus_truncation_order: truncation did not converge");
}

// rho(t) = sum_{l<=l_max} K_l rho(0) K_l^dag with diagonal Kraus operators
// (K_l)_kk = sgn(E_k)^l sqrt(pmf_l(gamma t E_k^2)) e^{-i E_k t}.
inline EvolvedState kraus_sum(const EnergyLevels& e, const Spectrum& s, DecoherenceParams dp,
                              double t, int l_max) {
  detail::validate_dynamics_args(e, dp, t);
  if (l_max < 0) throw InvalidParameter("kraus_sum: negative truncation order");
  const int m = s.size();
  if (static_cast<int>(e.values.size()) != m)
    throw InvalidParameter("kraus_sum: energy/spectrum size mismatch");

  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> lambda(m), amp(m);
  std::vector<int> sign(m);
  for (int k = 0; k < m; ++k) {
    lambda[k] = dp.gamma * t * e.values[k] * e.values[k];
    sign[k] = e.values[k] < 0.0 ? -1 : 1;
  }
  for (int l = 0; l <= l_max; ++l) {
    for (int k = 0; k < m; ++k) {
      const double base = std::sqrt(poisson_pmf(l, lambda[k]));
      amp[k] = (l % 2 == 1 && sign[k] < 0) ? -base : base;
    }
    for (int k = 0; k < m; ++k)
      for (int q = 0; q < m; ++q) coupling(k, q) += amp[k] * amp[q];
  }

  EvolvedState st;
  st.t = t;
  st.basis = StateBasis::energy;
  st.rho.resize(m, m);
  for (int k = 0; k < m; ++k) {
    for (int q = 0; q < m; ++q) {
      const double amp0 = std::sqrt(s.weights[k] * s.weights[q]);
      st.rho(k, q) = amp0 * coupling(k, q) * std::polar(1.0, -(e.values[k] - e.values[q]) * t);
    }
  }
  return st;
}

// max_k |sum_{l<=l_max} pmf_l(lambda_k) - 1|: how complete the truncated
// Kraus family is.
inline double kraus_completeness_defect(const EnergyLevels& e, DecoherenceParams dp, double t,
                                        int l_max) {
  double worst = 0.0;
  for (double ek : e.values) {
    const double lambda = dp.gamma * t * ek * ek;
    double cum = 0.0;
    for (int l = 0; l <= l_max; ++l) cum += poisson_pmf(l, lambda);
    worst = std::max(worst, std::abs(1.0 - cum));
  }
  return worst;
}

// ---------- oracle 3: dense full-vertex-space evolution -------------------

// Diagonalizes H = 2 sum_m J_m A_m on the full vertex space (optionally with
// the constant shell term ((n-4)/2) sum_m J_m kappa_m I, which shifts every
// level equally and must not change the fidelity). Precomputes the overlap
// profile once; each fidelity evaluation is then a double sum over levels.
class FullSpaceOracle {
public:
  static constexpr int default_cap = 2048;

  FullSpaceOracle(const FullGraph& g, const CouplingVector& j, bool include_shell_constant = false,
                  int cap = default_cap) {
    if (g.n > cap)
      throw SizeLimit("full-space oracle: " + std::to_string(g.n) +
                      " vertices exceeds dense cap " + std::to_string(cap));
    const StratifyResult sr = stratify(g);
    const int d = sr.strata.diameter;
    if (static_cast<int>(j.values.size()) != d + 1)
      throw InvalidParameter("full-space oracle: coupling vector has " +
                             std::to_string(j.values.size()) + " entries, expected " +
                             std::to_string(d + 1));
    const DistanceMatrices dm = all_pairs_distances(g, cap);
    if (dm.diameter > d)
      throw UnsupportedTopology("full-space oracle: graph diameter exceeds the reference eccentricity");

    Eigen::MatrixXd h(g.n, g.n);
    for (int u = 0; u < g.n; ++u)
      for (int v = 0; v < g.n; ++v) h(u, v) = 2.0 * j.values[dm.distance(u, v)];
    if (include_shell_constant) {
      double shell = 0.0;
      for (int l = 0; l <= d; ++l) shell += j.values[l] * static_cast<double>(sr.jacobi.kappa[l]);
      h.diagonal().array() += 0.5 * (g.n - 4) * shell;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success)
      throw NumericalError("full-space oracle: dense eigensolver did not converge");
    levels_.resize(g.n);
    overlap_.resize(g.n);
    for (int k = 0; k < g.n; ++k) {
      levels_[k] = es.eigenvalues()[k];
      overlap_[k] = es.eigenvectors()(g.reference, k) * es.eigenvectors()(sr.strata.target, k);
    }
  }

  double fidelity(DecoherenceParams dp, double t) const {
    if (!(dp.gamma >= 0.0) || !(t >= 0.0))
      throw InvalidParameter("full-space oracle: need gamma >= 0 and t >= 0");
    const int n = static_cast<int>(levels_.size());
    double f = 0.0;
    for (int k = 0; k < n; ++k) {
      for (int q = 0; q < n; ++q) {
        const double de = levels_[k] - levels_[q];
        f += overlap_[k] * overlap_[q] * std::cos(t * de) *
             std::exp(-0.5 * dp.gamma * t * de * de);
      }
    }
    return f;
  }

  const std::vector<double>& levels() const { return levels_; }

private:
  std::vector<double> levels_;
  std::vector<double> overlap_;
};

inline double full_space_fidelity(const FullGraph& g, const CouplingVector& j,
                                  DecoherenceParams dp, double t,
                                  bool include_shell_constant = false,
                                  int cap = FullSpaceOracle::default_cap) {
  return FullSpaceOracle(g, j, include_shell_constant, cap).fidelity(dp, t);
}

} // namespace drsn
