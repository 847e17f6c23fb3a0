#pragma once

// Harmonic dimensions, Legendre polynomials for S^m and Gauss-Jacobi rules
// for the zonal weight (1 - t^2)^((m-2)/2).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "spherespec/errors.hpp"
#include "spherespec/real.hpp"

namespace spherespec {

/// Dimension m >= 2 of the sphere S^m embedded in R^(m+1).
class SphereDim {
 public:
  explicit SphereDim(int m) : m_(m) {
    if (m < 2) throw DomainError("sphere dimension m must be >= 2, got " + std::to_string(m));
  }

  [[nodiscard]] int value() const { return m_; }
  /// 2 on S^2, 1 otherwise; the denominator split in the decay exponent.
  [[nodiscard]] int delta() const { return m_ == 2 ? 2 : 1; }

  friend bool operator==(SphereDim, SphereDim) = default;

 private:
  int m_;
};

inline void require_sphere_dim(int m) { (void)SphereDim(m); }

/// d_n^m, the dimension of degree-n spherical harmonics on S^m:
/// (2n+m-1)(n+m-2)! / (n! (m-1)!).
inline BigInt dim_harmonic(unsigned long n, int m) {
  require_sphere_dim(m);
  // (n+m-2)!/(n!(m-2)!) = binom(n+m-2, n); the remaining 1/(m-1) divides exactly.
  BigInt b;
  mpz_bin_uiui(b.get_mpz_t(), n + static_cast<unsigned long>(m) - 2, n);
  BigInt d = b * (2 * n + static_cast<unsigned long>(m) - 1);
  mpz_divexact_ui(d.get_mpz_t(), d.get_mpz_t(), static_cast<unsigned long>(m) - 1);
  return d;
}

/// d_n^(m+1) = sum_{k<=n} d_k^m: the flat index of the last eigenvalue of
/// level n in block order.
inline BigInt cum_dim(unsigned long n, int m) {
  require_sphere_dim(m);
  return dim_harmonic(n, m + 1);
}

/// omega_m / omega_(m-1) = integral of (1-t^2)^((m-2)/2) over [-1,1].
inline Real zonal_weight_total(int m, Precision p) {
  require_sphere_dim(m);
  const Real half_m = Real(static_cast<long>(m), p) / 2L;
  const Real half_m1 = Real(static_cast<long>(m + 1), p) / 2L;
  return sqrt(pi(p)) * gamma(half_m) / gamma(half_m1);
}

/// omega_m, the surface area of S^m.
inline Real sphere_area(int m, Precision p) {
  require_sphere_dim(m);
  const Real s = Real(static_cast<long>(m + 1), p) / 2L;
  return 2L * pow(pi(p), s) / gamma(s);
}

/// P_n^m(t), the Legendre polynomial for S^m normalized to P_n^m(1) = 1.
/// For m = 2 this is the classical Legendre polynomial.
inline Real legendre_eval(unsigned long n, int m, const Real& t) {
  require_sphere_dim(m);
  if (abs(t) > 1L) throw DomainError("legendre_eval: |t| > 1 (t = " + t.to_decimal(20) + ")");
  const Precision p = t.precision();
  Real prev(1L, p);
  if (n == 0) return prev;
  Real cur = t;
  for (unsigned long k = 1; k < n; ++k) {
    // (k+m-1) P_{k+1} = (2k+m-1) t P_k - k P_{k-1}
    Real next = (t * cur) * static_cast<long>(2 * k + m - 1) - prev * static_cast<long>(k);
    next /= static_cast<long>(k + m - 1);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// P_0^m(t) .. P_N^m(t) in one recurrence pass.
inline std::vector<Real> legendre_table(unsigned long N, int m, const Real& t) {
  require_sphere_dim(m);
  std::vector<Real> out;
  out.reserve(N + 1);
  out.emplace_back(1L, t.precision());
  if (N == 0) return out;
  out.push_back(t);
  for (unsigned long k = 1; k < N; ++k) {
    Real next = (t * out[k]) * static_cast<long>(2 * k + m - 1) - out[k - 1] * static_cast<long>(k);
    next /= static_cast<long>(k + m - 1);
    out.push_back(std::move(next));
  }
  return out;
}

/// Gauss rule on [-1,1] for the weight (1 - t^2)^((m-2)/2).
struct QuadratureRule {
  std::vector<Real> nodes;    // strictly increasing
  std::vector<Real> weights;  // positive
  int m = 2;
  unsigned order = 0;

  [[nodiscard]] Precision precision() const { return nodes.empty() ? kDefaultPrecision : nodes.front().precision(); }

  template <typename F>
  [[nodiscard]] Real integrate(F&& f) const {
    Real acc(precision());
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

namespace detail {

// (P_n, P_{n-1}) at t, binary64.
inline std::pair<double, double> legendre_pair(unsigned n, int m, double t) {
  double prev = 1.0, cur = t;
  for (unsigned k = 1; k < n; ++k) {
    const double next = ((2.0 * k + m - 1) * t * cur - k * prev) / (k + m - 1.0);
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

inline std::pair<Real, Real> legendre_pair(unsigned n, int m, const Real& t) {
  Real prev(1L, t.precision());
  Real cur = t;
  for (unsigned k = 1; k < n; ++k) {
    Real next = (t * cur) * static_cast<long>(2 * k + m - 1) - prev * static_cast<long>(k);
    next /= static_cast<long>(k + m - 1);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return {std::move(cur), std::move(prev)};
}

// Newton step P_n / P_n' using (1-t^2) P_n' = n (P_{n-1} - t P_n).
inline double newton_step(unsigned n, int m, double t) {
  const auto [pn, pn1] = legendre_pair(n, m, t);
  return pn * (1.0 - t * t) / (n * (pn1 - t * pn));
}

// Roots of P_n^m in binary64, ascending. Newton from asymptotic guesses,
// falling back to sign-change bracketing plus bisection.
inline std::vector<double> double_roots(unsigned n, int m) {
  const double a = (m - 2) / 2.0;
  std::vector<double> roots;
  roots.reserve(n);
  bool ok = true;
  for (unsigned k = 1; k <= n && ok; ++k) {
    const double theta = (k + a / 2.0 - 0.25) * std::numbers::pi / (n + a + 0.5);
    double x = std::cos(theta);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const double dx = newton_step(n, m, x);
      x -= dx;
      if (!(std::abs(x) < 1.0)) break;
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) {
        converged = true;
        break;
      }
    }
    ok = converged;
    roots.push_back(x);
  }
  if (ok) {
    std::sort(roots.begin(), roots.end());
    for (std::size_t i = 1; i < roots.size() && ok; ++i) ok = roots[i] - roots[i - 1] > 1e-13;
  }
  if (ok) return roots;

  roots.clear();
  const unsigned samples = 40 * n + 40;
  double lo = -1.0, plo = legendre_pair(n, m, lo).first;
  for (unsigned s = 1; s <= samples; ++s) {
    const double hi = -std::cos(std::numbers::pi * s / samples);
    const double phi = legendre_pair(n, m, hi).first;
    if (plo == 0.0) {
      roots.push_back(lo);
    } else if ((plo < 0) != (phi < 0) && phi != 0.0) {
      double l = lo, h = hi, pl = plo;
      for (int it = 0; it < 200 && h - l > 1e-16; ++it) {
        const double mid = 0.5 * (l + h);
        const double pm = legendre_pair(n, m, mid).first;
        if ((pm < 0) == (pl < 0)) {
          l = mid;
          pl = pm;
        } else {
          h = mid;
        }
      }
      roots.push_back(0.5 * (l + h));
    }
    lo = hi;
    plo = phi;
  }
  if (roots.size() != n) {
    throw ConvergenceError("quadrature_rule: bracketing found " + std::to_string(roots.size()) + " of " +
                               std::to_string(n) + " nodes",
                           static_cast<long>(roots.size()));
  }
  return roots;
}

}  // namespace detail

/// Gauss-Jacobi rule with alpha = beta = (m-2)/2 and `order` nodes, exact for
/// polynomials of degree <= 2*order - 1 against (1 - t^2)^((m-2)/2).
///
/// Nodes are located in binary64 and polished by Newton iteration at the
/// requested precision (plus guard bits) until the step falls below
/// 2^-(bits-10); a bisection on a small bracket takes over if Newton stalls.
/// Weights come from the Christoffel function
///   w_i = W / sum_{k<order} d_k^m P_k^m(t_i)^2,  W = omega_m / omega_(m-1).
inline QuadratureRule quadrature_rule(int m, unsigned order, Precision p = kDefaultPrecision) {
  require_sphere_dim(m);
  if (order < 1) throw DomainError("quadrature_rule: order must be >= 1");
  const Precision work{p.bits + 32};
  const std::vector<double> seeds = detail::double_roots(order, m);
  const Real tol = pow2(-static_cast<long>(p.bits) + 10, work);

  std::vector<Real> dims;
  dims.reserve(order);
  for (unsigned k = 0; k < order; ++k) dims.emplace_back(dim_harmonic(k, m), work);
  const Real total = zonal_weight_total(m, work);

  QuadratureRule rule;
  rule.m = m;
  rule.order = order;
  rule.nodes.reserve(order);
  rule.weights.reserve(order);
  for (unsigned i = 0; i < order; ++i) {
    Real x(seeds[i], work);
    bool converged = false;
    for (int it = 0; it < 64; ++it) {
      auto [pn, pn1] = detail::legendre_pair(order, m, x);
      const Real one_minus = Real(1L, work) - x * x;
      const Real denom = (pn1 - x * pn) * static_cast<long>(order);
      if (denom.is_zero()) break;
      const Real dx = pn * one_minus / denom;
      x -= dx;
      if (abs(dx) <= tol) {
        converged = true;
        break;
      }
    }
    if (!converged || abs(x - Real(seeds[i], work)) > Real(1e-10, work)) {
      // Bisection on a bracket around the binary64 seed.
      Real lo(seeds[i] - 1e-10, work), hi(seeds[i] + 1e-10, work);
      Real plo = detail::legendre_pair(order, m, lo).first;
      const Real phi = detail::legendre_pair(order, m, hi).first;
      if (plo.sign() == phi.sign()) {
        throw ConvergenceError("quadrature_rule: node refinement failed", static_cast<long>(i));
      }
      while (abs(hi - lo) > tol) {
        Real mid = (lo + hi) / 2L;
        const Real pm = detail::legendre_pair(order, m, mid).first;
        if (pm.sign() == plo.sign()) {
          lo = std::move(mid);
          plo = pm;
        } else {
          hi = std::move(mid);
        }
      }
      x = (lo + hi) / 2L;
    }
    const std::vector<Real> ps = legendre_table(order - 1, m, x);
    Real christoffel(work);
    for (unsigned k = 0; k < order; ++k) christoffel += dims[k] * ps[k] * ps[k];
    Real w = total / christoffel;

    Real node(p), weight(p);
    mpfr_set(node.get(), x.get(), MPFR_RNDN);
    mpfr_set(weight.get(), w.get(), MPFR_RNDN);
    rule.nodes.push_back(std::move(node));
    rule.weights.push_back(std::move(weight));
  }
  return rule;
}

}  // namespace spherespec
