// Orthogonal polynomials and spectral data of the stratified network.
//
// The recursion coefficients (alpha_i, beta_i) define monic polynomials
//
//   Q_0 = 1,  Q_1 = x - alpha_0,
//   Q_{i+1} = (x - alpha_i) Q_i - beta_i^2 Q_{i-1},
//
// whose degree-(d+1) member is the characteristic polynomial of the Jacobi
// matrix. The orthonormal family p_l shares the roots structure:
//
//   p_0 = 1,  beta_{i+1} p_{i+1} = (x - alpha_i) p_i - beta_i p_{i-1},
//
// and the spectral weights are mu_k = 1 / sum_l p_l(x_k)^2, which makes
// sum_k mu_k = 1 and recovers the reference-vertex resolution of identity.
// Note the normalization: the weights use the orthonormal p_l, not the
// stratum-scaled P_l = sqrt(kappa_l) p_l; using P_l instead does not sum to
// one and is kept only as a compatibility mode (paper_weights).
//
// Eigenvalues are computed from the tridiagonal matrix directly and sorted
// in DESCENDING order, so index k = 0 is the top of the band and the sign
// alternation P_d(x_k) = (-1)^k holds with this indexing. Root-finding on
// the Q_{d+1} coefficients is kept as an independent cross-check route, not
// the production path.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drsn/errors.hpp"
#include "drsn/graph.hpp"

namespace drsn {

struct PolynomialTable {
  // Coefficient tables are O(d^2); spectra of this size are far beyond any
  // sensible transfer scenario.
  static constexpr int degree_cap = 2048;

  JacobiParams jp;
  std::vector<std::vector<double>> coeffs; // Q_0 .. Q_{d+1}, ascending powers

  // Horner evaluation of Q_i from its stored coefficients.
  double eval(int i, double x) const {
    const auto& c = coeffs[i];
    double v = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) v = v * x + c[j];
    return v;
  }

  // Orthonormal family p_0..p_d at x, by the three-term recursion.
  std::vector<double> orthonormal_at(double x) const {
    const int d = jp.d;
    std::vector<double> p(d + 1);
    p[0] = 1.0;
    if (d >= 1) p[1] = (x - jp.alpha[0]) / jp.beta[1];
    for (int i = 1; i < d; ++i)
      p[i + 1] = ((x - jp.alpha[i]) * p[i] - jp.beta[i] * p[i - 1]) / jp.beta[i + 1];
    return p;
  }
};

namespace detail {

// beta_i^2, preferring the exact integer product recorded by stratify().
inline double beta_squared(const JacobiParams& jp, int i) {
  return jp.beta_sq[i] > 0 ? static_cast<double>(jp.beta_sq[i]) : jp.beta[i] * jp.beta[i];
}

inline void validate_jacobi(const JacobiParams& jp) {
  const std::size_t m = static_cast<std::size_t>(jp.d) + 1;
  if (jp.d < 0 || jp.alpha.size() != m || jp.beta.size() != m || jp.beta_sq.size() != m)
    throw InvalidParameter("jacobi parameters: inconsistent sizes");
  for (int i = 0; i <= jp.d; ++i)
    if (!std::isfinite(jp.alpha[i])) throw InvalidParameter("jacobi parameters: non-finite alpha");
  for (int i = 1; i <= jp.d; ++i)
    if (!(jp.beta[i] > 0.0) || !std::isfinite(jp.beta[i]))
      throw InvalidParameter("jacobi parameters: beta_" + std::to_string(i) + " must be positive");
  if (!jp.kappa.empty() && jp.kappa.size() != m)
    throw InvalidParameter("jacobi parameters: kappa size mismatch");
}

} // namespace detail

// Build the monic coefficient table from the recursion.
inline PolynomialTable polynomials(const JacobiParams& jp) {
  detail::validate_jacobi(jp);
  if (jp.d + 1 > PolynomialTable::degree_cap)
    throw SizeLimit("polynomials: degree " + std::to_string(jp.d + 1) + " exceeds cap " +
                    std::to_string(PolynomialTable::degree_cap));
  PolynomialTable t;
  t.jp = jp;
  if (t.jp.kappa.empty()) t.jp.kappa.assign(jp.d + 1, 1); // hand-built parameters
  t.coeffs.resize(jp.d + 2);
  t.coeffs[0] = {1.0};
  t.coeffs[1] = {-jp.alpha[0], 1.0};
  for (int i = 1; i <= jp.d; ++i) {
    const auto& qi = t.coeffs[i];
    const auto& qm = t.coeffs[i - 1];
    const double b2 = detail::beta_squared(jp, i);
    std::vector<double> next(i + 2, 0.0);
    for (std::size_t j = 0; j < qi.size(); ++j) {
      next[j + 1] += qi[j];
      next[j] -= jp.alpha[i] * qi[j];
    }
    for (std::size_t j = 0; j < qm.size(); ++j) next[j] -= b2 * qm[j];
    t.coeffs[i + 1] = std::move(next);
  }
  return t;
}

struct Spectrum {
  PolynomialTable poly;
  std::vector<double> eigenvalues;    // strictly decreasing
  std::vector<double> weights;        // mu_k, summing to 1
  std::vector<double> paper_weights;  // 1 / sum_l P_l(x_k)^2 compatibility mode
  std::vector<std::vector<double>> p; // p[l][k], orthonormal values at x_k

  int d() const { return poly.jp.d; }
  int size() const { return d() + 1; }
  // Stratum-scaled value P_l(x_k) = sqrt(kappa_l) p_l(x_k).
  double big_p(int l, int k) const {
    return std::sqrt(static_cast<double>(poly.jp.kappa[l])) * p[l][k];
  }
  // Overlap of stratum vector l with eigenvector k.
  double eigenvector_component(int l, int k) const { return std::sqrt(weights[k]) * p[l][k]; }
};

// Diagonalize the Jacobi matrix and attach the spectral weights.
inline Spectrum eigen_solve(PolynomialTable poly) {
  detail::validate_jacobi(poly.jp);
  if (poly.jp.kappa.empty()) poly.jp.kappa.assign(poly.jp.d + 1, 1);
  const JacobiParams& jp = poly.jp;
  const int m = jp.d + 1;

  Eigen::VectorXd diag(m), sub(std::max(m - 1, 0));
  for (int i = 0; i < m; ++i) diag[i] = jp.alpha[i];
  for (int i = 1; i < m; ++i) sub[i - 1] = jp.beta[i];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigen_solve: tridiagonal eigensolver did not converge");

  Spectrum s;
  s.poly = std::move(poly);
  s.eigenvalues.resize(m);
  for (int k = 0; k < m; ++k) s.eigenvalues[k] = es.eigenvalues()[m - 1 - k]; // descending

  double scale = 1.0;
  for (double x : s.eigenvalues) scale = std::max(scale, std::abs(x));
  for (int k = 0; k + 1 < m; ++k) {
    const double gap = s.eigenvalues[k] - s.eigenvalues[k + 1];
    if (gap <= 1e-12 * scale)
      throw DegenerateJacobi("eigen_solve: eigenvalues " + std::to_string(k) + " and " +
                             std::to_string(k + 1) + " coincide within tolerance (gap " +
                             std::to_string(gap) + ")");
  }

  s.weights.resize(m);
  s.paper_weights.resize(m);
  s.p.assign(m, std::vector<double>(m));
  double total = 0.0;
  for (int k = 0; k < m; ++k) {
    const std::vector<double> pk = s.poly.orthonormal_at(s.eigenvalues[k]);
    double norm2 = 0.0, scaled2 = 0.0;
    for (int l = 0; l < m; ++l) {
      s.p[l][k] = pk[l];
      norm2 += pk[l] * pk[l];
      scaled2 += static_cast<double>(s.poly.jp.kappa[l]) * pk[l] * pk[l];
    }
    s.weights[k] = 1.0 / norm2;
    s.paper_weights[k] = 1.0 / scaled2;
    total += s.weights[k];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw NumericalError("eigen_solve: spectral weights sum to " + std::to_string(total) +
                         ", expected 1");
  return s;
}

inline Spectrum spectrum_of(const JacobiParams& jp) { return eigen_solve(polynomials(jp)); }

// Roots of Q_{d+1} from its coefficients alone: scan a Gershgorin interval
// for sign changes, then bisect. Independent of the tridiagonal eigensolver
// by construction, which is the point (cross-check route).
inline std::vector<double> roots_of_characteristic(const PolynomialTable& t) {
  const JacobiParams& jp = t.jp;
  const int m = jp.d + 1;
  double radius = 0.0;
  for (int i = 0; i <= jp.d; ++i) {
    double row = std::abs(jp.alpha[i]);
    if (i >= 1) row += jp.beta[i];
    if (i + 1 <= jp.d) row += jp.beta[i + 1];
    radius = std::max(radius, row);
  }
  const double bound = radius + 1.0;
  const auto f = [&](double x) { return t.eval(m, x); };

  std::vector<double> roots;
  for (int grid = std::max(2048, 128 * m); grid <= (1 << 20); grid *= 4) {
    roots.clear();
    const double h = 2.0 * bound / grid;
    double xa = -bound, fa = f(xa);
    for (int i = 1; i <= grid; ++i) {
      const double xb = -bound + i * h;
      const double fb = f(xb);
      if (fa == 0.0) {
        roots.push_back(xa);
      } else if (fb != 0.0 && ((fa < 0.0) != (fb < 0.0))) {
        double a = xa, b = xb, va = fa;
        for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
          const double mid = 0.5 * (a + b);
          const double vm = f(mid);
          if (vm == 0.0) { a = b = mid; break; }
          if ((va < 0.0) == (vm < 0.0)) { a = mid; va = vm; }
          else b = mid;
        }
        roots.push_back(0.5 * (a + b));
      }
      xa = xb;
      fa = fb;
    }
    if (static_cast<int>(roots.size()) == m) break;
  }
  if (static_cast<int>(roots.size()) != m)
    throw NumericalError("roots_of_characteristic: found " + std::to_string(roots.size()) +
                         " of " + std::to_string(m) + " roots");
  std::sort(roots.rbegin(), roots.rend());
  return roots;
}

// Spectral moments against closed-walk counts from the reference vertex:
// sum_k mu_k x_k^m must equal (A^m)_{ref,ref}, computed here by repeated
// sparse application of the adjacency.
struct MomentsReport {
  bool ok = true;
  int worst_m = 0;
  double worst_rel_err = 0.0;
  int first_bad_m = -1;
  double tol = 0.0;
};

inline MomentsReport moments_check(const Spectrum& s, const FullGraph& g, int m_max,
                                   double tol = 1e-9) {
  if (m_max < 0) throw InvalidParameter("moments_check: negative moment order");
  MomentsReport rep;
  rep.tol = tol;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(g.n);
  v[g.reference] = 1.0;
  std::vector<double> xpow(s.size(), 1.0);
  for (int m = 0; m <= m_max; ++m) {
    const double walks = v[g.reference];
    double moment = 0.0;
    double magnitude = 0.0; // scale of the summands, the denominator for cancelling moments
    for (int k = 0; k < s.size(); ++k) {
      moment += s.weights[k] * xpow[k];
      magnitude += s.weights[k] * std::abs(xpow[k]);
    }
    const double rel = std::abs(moment - walks) / std::max({1.0, std::abs(walks), magnitude});
    if (rel > rep.worst_rel_err) {
      rep.worst_rel_err = rel;
      rep.worst_m = m;
    }
    if (rel > tol && rep.first_bad_m < 0) {
      rep.ok = false;
      rep.first_bad_m = m;
    }
    if (m == m_max) break;
    v = apply_adjacency(g, v);
    for (int k = 0; k < s.size(); ++k) xpow[k] *= s.eigenvalues[k];
  }
  return rep;
}

} // namespace drsn
