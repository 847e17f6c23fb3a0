#pragma once

// Zonal kernel catalog and condensed Legendre expansions
//   K(x, y) = sum_n c_n P_n^m(x . y).
// The level-n eigenvalue of the normalized integral operator is c_n / d_n^m
// with multiplicity d_n^m (see spectra.hpp).

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "spherespec/errors.hpp"
#include "spherespec/harmonics.hpp"
#include "spherespec/real.hpp"

namespace spherespec {

/// e^(2/r) exp(-|x-y|^2 / r) = exp(2 x.y / r), power coefficients 2^n / (n! r^n).
struct Gaussian {
  Real r;
};
/// sigma^2 (1-delta)^(m-1) / (1 + delta^2 - 2 delta x.y)^((m-1)/2).
struct Multiquadric {
  Real sigma;
  Real delta;
};
/// Spectral model: c_n = sigma^2 / (1 + beta exp((n/alpha)^tau)).
struct Moller {
  Real alpha;
  Real beta;
  Real tau;
  Real sigma;
};
/// c_0 = 1, c_n = d_n^m / n^(2n+m-1): eigenvalues n^(-2n-m+1).
struct Optimality {};
/// sum_n b_n (x.y)^n with b_n > 0, generated on demand. A set degree makes
/// it a polynomial: b_n = 0 beyond it and the generator is not consulted.
struct DotProduct {
  std::function<Real(unsigned long, Precision)> b;
  std::string label = "dotproduct";
  std::optional<unsigned long> degree;
};
/// Condensed coefficients given directly.
struct ExplicitCoefficients {
  std::vector<Real> c;
};
/// A zonal function f(x.y) evaluated pointwise on [-1, 1].
struct PointwiseZonal {
  std::function<Real(const Real&)> f;
  std::string label = "zonal";
};

using KernelSpec =
    std::variant<Gaussian, Multiquadric, Moller, Optimality, DotProduct, ExplicitCoefficients, PointwiseZonal>;

enum class Provenance { closed_form, projected, converted };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::closed_form: return "closed-form";
    case Provenance::projected: return "projected";
    case Provenance::converted: return "converted";
  }
  return "unknown";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "closed-form") return Provenance::closed_form;
  if (s == "projected") return Provenance::projected;
  if (s == "converted") return Provenance::converted;
  throw ParseError("unknown provenance '" + s + "'", 0);
}

/// Condensed coefficients c_0..c_N of a zonal kernel on S^m.
///
/// Each coefficient is stored as an extended-precision base value times an
/// exact rational scale. Spectral multipliers (Laplace-Beltrami derivative and
/// its inverse) act on the scale only, so composing inverse multipliers
/// restores the original coefficients bit for bit.
class LegendreExpansion {
 public:
  LegendreExpansion(int m, std::vector<Real> coeffs, Provenance provenance)
      : m_(m), base_(std::move(coeffs)), scale_(base_.size(), Rational(1)), provenance_(provenance) {
    require_sphere_dim(m);
    if (base_.empty()) throw DomainError("expansion needs at least the level-0 coefficient");
    for (std::size_t n = 0; n < base_.size(); ++n) {
      if (!base_[n].is_finite()) throw DomainError("non-finite coefficient at level " + std::to_string(n));
    }
    precision_ = base_.front().precision();
  }

  [[nodiscard]] int m() const { return m_; }
  [[nodiscard]] unsigned long truncation_level() const { return base_.size() - 1; }
  [[nodiscard]] std::size_t size() const { return base_.size(); }
  [[nodiscard]] Precision precision() const { return precision_; }
  [[nodiscard]] Provenance provenance() const { return provenance_; }

  [[nodiscard]] Real coefficient(unsigned long n) const {
    if (scale_[n] == 1) return base_[n];
    return base_[n] * scale_[n];
  }
  [[nodiscard]] std::vector<Real> coefficients() const {
    std::vector<Real> out;
    out.reserve(base_.size());
    for (std::size_t n = 0; n < base_.size(); ++n) out.push_back(coefficient(n));
    return out;
  }
  [[nodiscard]] const Real& base(unsigned long n) const { return base_[n]; }
  [[nodiscard]] const Rational& scale(unsigned long n) const { return scale_[n]; }

  /// Copy with each level's exact scale multiplied by factor(n).
  template <typename F>
  [[nodiscard]] LegendreExpansion with_multiplier(F&& factor) const {
    LegendreExpansion out(*this);
    for (unsigned long n = 0; n < out.scale_.size(); ++n) {
      out.scale_[n] *= factor(n);
      out.scale_[n].canonicalize();
    }
    return out;
  }

  /// Copy truncated to levels 0..N.
  [[nodiscard]] LegendreExpansion truncated(unsigned long N) const {
    if (N > truncation_level()) throw DomainError("truncation beyond available levels");
    LegendreExpansion out(*this);
    out.base_.resize(N + 1, Real(precision_));
    out.scale_.resize(N + 1);
    return out;
  }

 private:
  int m_;
  std::vector<Real> base_;
  std::vector<Rational> scale_;
  Provenance provenance_;
  Precision precision_{};
};

/// sum_n c_n P_n^m(t).
inline Real evaluate(const LegendreExpansion& e, const Real& t) {
  const auto ps = legendre_table(e.truncation_level(), e.m(), t);
  Real acc(t.precision());
  for (unsigned long n = 0; n < e.size(); ++n) acc += e.coefficient(n) * ps[n];
  return acc;
}

namespace detail {

inline void require_positive(const Real& v, const char* family, const char* name) {
  if (!(v > 0L)) {
    throw DomainError(std::string(family) + ": parameter '" + name + "' must be > 0, got " + v.to_decimal(20));
  }
}

inline Real with_precision(const Real& v, Precision p) {
  Real r(p);
  mpfr_set(r.get(), v.get(), MPFR_RNDN);
  return r;
}

}  // namespace detail

/// Throws DomainError naming the offending parameter.
inline void validate(const KernelSpec& spec) {
  std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          detail::require_positive(k.r, "gaussian", "r");
        } else if constexpr (std::is_same_v<T, Multiquadric>) {
          detail::require_positive(k.sigma, "multiquadric", "sigma");
          if (!(k.delta > 0L) || !(k.delta < 1L)) {
            throw DomainError("multiquadric: parameter 'delta' must lie in (0,1), got " + k.delta.to_decimal(20));
          }
        } else if constexpr (std::is_same_v<T, Moller>) {
          detail::require_positive(k.alpha, "moller", "alpha");
          detail::require_positive(k.beta, "moller", "beta");
          detail::require_positive(k.tau, "moller", "tau");
          detail::require_positive(k.sigma, "moller", "sigma");
        } else if constexpr (std::is_same_v<T, DotProduct>) {
          if (!k.b) throw DomainError("dotproduct: missing coefficient generator");
        } else if constexpr (std::is_same_v<T, ExplicitCoefficients>) {
          if (k.c.empty()) throw DomainError("explicit: at least one coefficient required");
        } else if constexpr (std::is_same_v<T, PointwiseZonal>) {
          if (!k.f) throw DomainError("zonal: missing function");
        }
      },
      spec);
}

/// Closed-form condensed coefficients for Multiquadric, Moller, Optimality and
/// ExplicitCoefficients (the latter padded with zeros or truncated to N).
inline LegendreExpansion catalog_coefficients(const KernelSpec& spec, int m, unsigned long N,
                                              Precision p = kDefaultPrecision) {
  require_sphere_dim(m);
  validate(spec);
  std::vector<Real> c;
  c.reserve(N + 1);
  if (const auto* mq = std::get_if<Multiquadric>(&spec)) {
    const Real sigma = detail::with_precision(mq->sigma, p);
    const Real delta = detail::with_precision(mq->delta, p);
    const Real lead = sigma * sigma * pow(Real(1L, p) - delta, static_cast<long>(m - 1));
    Real delta_pow(1L, p);
    for (unsigned long n = 0; n <= N; ++n) {
      BigInt binom;
      mpz_bin_uiui(binom.get_mpz_t(), n + static_cast<unsigned long>(m) - 2, n);
      c.push_back(lead * binom * delta_pow);
      delta_pow *= delta;
    }
  } else if (const auto* mo = std::get_if<Moller>(&spec)) {
    const Real sigma2 = detail::with_precision(mo->sigma, p) * detail::with_precision(mo->sigma, p);
    const Real alpha = detail::with_precision(mo->alpha, p);
    const Real beta = detail::with_precision(mo->beta, p);
    const Real tau = detail::with_precision(mo->tau, p);
    for (unsigned long n = 0; n <= N; ++n) {
      // (0/alpha)^tau = 0 for tau > 0, so the exponential is 1 at n = 0.
      const Real ex = n == 0 ? Real(1L, p) : exp(pow(Real(n, p) / alpha, tau));
      c.push_back(sigma2 / (Real(1L, p) + beta * ex));
    }
  } else if (std::holds_alternative<Optimality>(spec)) {
    // Base n^-(2n+m-1) with the multiplicity d_n kept as an exact scale, so the
    // condensed eigenvalue c_n / d_n is the correctly rounded power itself.
    c.emplace_back(1L, p);
    for (unsigned long n = 1; n <= N; ++n) {
      BigInt denom;
      mpz_ui_pow_ui(denom.get_mpz_t(), n, 2 * n + static_cast<unsigned long>(m) - 1);
      c.push_back(Real(1L, p) / denom);
    }
    return LegendreExpansion(m, std::move(c), Provenance::closed_form).with_multiplier([m](unsigned long n) {
      return Rational(dim_harmonic(n, m));
    });
  } else if (const auto* ex = std::get_if<ExplicitCoefficients>(&spec)) {
    for (unsigned long n = 0; n <= N; ++n) {
      c.push_back(n < ex->c.size() ? detail::with_precision(ex->c[n], p) : Real(p));
    }
  } else {
    throw DomainError("catalog_coefficients: no closed form for this kernel family");
  }
  return LegendreExpansion(m, std::move(c), Provenance::closed_form);
}

/// Projection of a zonal function onto P_0^m..P_N^m with a given rule:
///   c_n = d_n^m (omega_(m-1)/omega_m) sum_i w_i f(t_i) P_n^m(t_i).
inline LegendreExpansion project_zonal(const std::function<Real(const Real&)>& f, int m, unsigned long N,
                                       const QuadratureRule& rule) {
  require_sphere_dim(m);
  if (rule.m != m) throw DomainError("project_zonal: rule built for a different m");
  if (rule.order <= N) {
    throw DomainError("project_zonal: rule order " + std::to_string(rule.order) + " must exceed level count N = " +
                      std::to_string(N) + " (aliasing)");
  }
  const Precision p = rule.precision();
  std::vector<Real> acc(N + 1, Real(p));
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Real wf = rule.weights[i] * f(rule.nodes[i]);
    const auto ps = legendre_table(N, m, rule.nodes[i]);
    for (unsigned long n = 0; n <= N; ++n) acc[n] += wf * ps[n];
  }
  const Real total = zonal_weight_total(m, p);
  for (unsigned long n = 0; n <= N; ++n) {
    acc[n] *= dim_harmonic(n, m);
    acc[n] /= total;
  }
  return LegendreExpansion(m, std::move(acc), Provenance::projected);
}

inline LegendreExpansion project_zonal(const PointwiseZonal& spec, int m, unsigned long N, Precision p,
                                       unsigned rule_order) {
  if (!spec.f) throw DomainError("zonal: missing function");
  if (rule_order <= N) {
    throw DomainError("project_zonal: rule order " + std::to_string(rule_order) + " must exceed level count N = " +
                      std::to_string(N) + " (aliasing)");
  }
  return project_zonal(spec.f, m, N, quadrature_rule(m, rule_order, p));
}

/// Condensed coefficients of the polynomial sum_n b_n t^n, n = 0..len-1.
///
/// Horner's scheme in the Legendre basis using
///   t P_n = ((n+m-1) P_{n+1} + n P_{n-1}) / (2n+m-1),
/// which is exact algebra (no quadrature) and only adds nonnegative terms
/// for nonnegative input.
inline LegendreExpansion power_to_condensed(std::span<const Real> b, int m, Precision p = kDefaultPrecision) {
  require_sphere_dim(m);
  if (b.empty()) throw DomainError("power_to_condensed: empty coefficient list");
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!b[i].is_finite()) throw DomainError("power_to_condensed: non-finite b_" + std::to_string(i));
  }
  const std::size_t deg = b.size() - 1;
  std::vector<Real> a;
  a.reserve(deg + 1);
  a.push_back(detail::with_precision(b[deg], p));
  for (std::size_t j = deg; j-- > 0;) {
    std::vector<Real> next(a.size() + 1, Real(p));
    for (std::size_t n = 0; n < a.size(); ++n) {
      const long denom = static_cast<long>(2 * n) + m - 1;
      next[n + 1] += a[n] * static_cast<long>(n + m - 1) / denom;
      if (n > 0) next[n - 1] += a[n] * static_cast<long>(n) / denom;
    }
    next[0] += detail::with_precision(b[j], p);
    a = std::move(next);
  }
  return LegendreExpansion(m, std::move(a), Provenance::converted);
}

/// b_n of the Gaussian's dot-product series: 2^n / (n! r^n).
inline DotProduct gaussian_power_series(const Gaussian& g) {
  Real r = g.r;
  return DotProduct{[r](unsigned long n, Precision p) {
                      Real rp = detail::with_precision(r, p);
                      // log-free: 2^n / (n! r^n) accumulated as a product
                      Real v(1L, p);
                      for (unsigned long k = 1; k <= n; ++k) {
                        v *= 2L;
                        v /= static_cast<long>(k);
                        v /= rp;
                      }
                      return v;
                    },
                    "gaussian", std::nullopt};
}

/// Pointwise form of the Gaussian as a function of t = x.y:
///   e^(2/r) exp(-(2 - 2t)/r).
inline PointwiseZonal gaussian_pointwise(const Gaussian& g) {
  Real r = g.r;
  return PointwiseZonal{[r](const Real& t) {
                          const Precision p = t.precision();
                          const Real rp = detail::with_precision(r, p);
                          const Real dist2 = Real(2L, p) - 2L * t;
                          return exp(Real(2L, p) / rp) * exp(-dist2 / rp);
                        },
                        "gaussian"};
}

/// Pointwise multiquadric in t = x.y for S^m.
inline PointwiseZonal multiquadric_pointwise(const Multiquadric& mq, int m) {
  Real sigma = mq.sigma, delta = mq.delta;
  return PointwiseZonal{[sigma, delta, m](const Real& t) {
                          const Precision p = t.precision();
                          const Real s = detail::with_precision(sigma, p);
                          const Real d = detail::with_precision(delta, p);
                          const Real base = Real(1L, p) + d * d - 2L * d * t;
                          const Real num = s * s * pow(Real(1L, p) - d, static_cast<long>(m - 1));
                          return num / pow(base, Real(static_cast<long>(m - 1), p) / 2L);
                        },
                        "multiquadric"};
}

/// Pointwise zonal form where one exists in closed form.
inline std::optional<PointwiseZonal> pointwise_form(const KernelSpec& spec, int m) {
  if (const auto* g = std::get_if<Gaussian>(&spec)) return gaussian_pointwise(*g);
  if (const auto* mq = std::get_if<Multiquadric>(&spec)) return multiquadric_pointwise(*mq, m);
  if (const auto* z = std::get_if<PointwiseZonal>(&spec)) return *z;
  return std::nullopt;
}

namespace detail {

// Power-series degree K >= N beyond which sum_{k>K} b_k is below
// 2^-(bits+16) times a lower bound on c_N. Every coefficient of t^k in the
// P^m basis lies in [0, 1] (they are nonnegative and sum to 1 at t = 1), so
// the neglected tail perturbs each c_n by at most that sum.
inline std::vector<Real> power_series_for_levels(const DotProduct& dp, int m, unsigned long N, Precision p) {
  std::vector<Real> b;
  if (dp.degree) {
    for (unsigned long n = 0; n <= std::max(N, *dp.degree); ++n) {
      if (n > *dp.degree) {
        b.emplace_back(p);
        continue;
      }
      b.push_back(dp.b(n, p));
      if (!(b.back() > 0L)) {
        throw DomainError(dp.label + ": coefficient b_" + std::to_string(n) + " must be > 0");
      }
    }
    return b;
  }
  for (unsigned long n = 0; n <= N; ++n) {
    b.push_back(dp.b(n, p));
    if (!(b.back() > 0L)) {
      throw DomainError(dp.label + ": coefficient b_" + std::to_string(n) + " must be > 0");
    }
  }
  // Leading coefficient of P_N^m: prod (2k+m-1)/(k+m-1).
  Rational lead(1);
  for (unsigned long k = 0; k < N; ++k) lead *= Rational(2 * k + m - 1, k + m - 1);
  lead.canonicalize();
  const Real floor_cn = b[N] / lead;
  const Real target = floor_cn * pow2(-static_cast<long>(p.bits) - 16, p);
  const unsigned long cap = 4 * N + 4000;
  std::optional<Real> prev_q;
  for (unsigned long k = N + 1;; ++k) {
    if (k > cap) {
      throw ConvergenceError(dp.label + ": power series did not reach working precision", static_cast<long>(cap));
    }
    b.push_back(dp.b(k, p));
    if (!(b.back() > 0L)) throw DomainError(dp.label + ": coefficient b_" + std::to_string(k) + " must be > 0");
    Real q = b[k] / b[k - 1];
    // With non-increasing ratios q < 1 the geometric bound b_k q/(1-q) covers the tail.
    if (q < 1L && prev_q && q <= *prev_q) {
      const Real tail = b[k] * q / (Real(1L, p) - q);
      if (tail <= target) break;
    }
    prev_q = std::move(q);
  }
  return b;
}

}  // namespace detail

/// Default rule order used when projecting pointwise kernels to N levels.
inline unsigned default_rule_order(unsigned long N) {
  return static_cast<unsigned>(std::max<unsigned long>(2 * (N + 1), N + 64));
}

/// Expansion of any kernel family to levels 0..N at precision p.
///
/// Closed-form families use catalog_coefficients; Gaussian and DotProduct go
/// through their power series (extended until the neglected tail is below
/// working precision); PointwiseZonal is projected with default_rule_order(N).
inline LegendreExpansion expand(const KernelSpec& spec, int m, unsigned long N, Precision p = kDefaultPrecision) {
  require_sphere_dim(m);
  validate(spec);
  if (const auto* g = std::get_if<Gaussian>(&spec)) {
    const auto b = detail::power_series_for_levels(gaussian_power_series(*g), m, N, p);
    return power_to_condensed(b, m, p).truncated(N);
  }
  if (const auto* dp = std::get_if<DotProduct>(&spec)) {
    const auto b = detail::power_series_for_levels(*dp, m, N, p);
    return power_to_condensed(b, m, p).truncated(N);
  }
  if (const auto* z = std::get_if<PointwiseZonal>(&spec)) {
    return project_zonal(*z, m, N, p, default_rule_order(N));
  }
  return catalog_coefficients(spec, m, N, p);
}

struct RatioTest {
  Real last_ratio;
  Real extrapolated;
  /// extrapolated < 1 - 1/n_max.
  bool below_one = false;
};

/// Limit estimate of b_{n+1}/b_n from b_0..b_{n_max}: the last ratio and a
/// first-order Richardson extrapolation between indices n_max-1 and (n_max-1)/2.
inline RatioTest ratio_test(std::span<const Real> b) {
  if (b.size() < 5) throw DomainError("ratio_test: need n_max >= 4");
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!(b[i] > 0L)) throw DomainError("ratio_test: b_" + std::to_string(i) + " must be > 0");
  }
  const std::size_t K = b.size() - 2;
  const std::size_t H = K / 2;
  const Real rk = b[K + 1] / b[K];
  const Real rh = b[H + 1] / b[H];
  Real ext = (rk * static_cast<long>(K) - rh * static_cast<long>(H)) / static_cast<long>(K - H);
  if (ext < 0L) ext = Real(rk.precision());
  const Precision p = rk.precision();
  const Real threshold = Real(1L, p) - Real(1L, p) / static_cast<long>(b.size() - 1);
  const bool below = ext < threshold;
  return RatioTest{rk, std::move(ext), below};
}

inline RatioTest ratio_test(const KernelSpec& spec, unsigned long n_max, Precision p = kDefaultPrecision) {
  validate(spec);
  DotProduct dp;
  if (const auto* g = std::get_if<Gaussian>(&spec)) {
    dp = gaussian_power_series(*g);
  } else if (const auto* d = std::get_if<DotProduct>(&spec)) {
    dp = *d;
  } else {
    throw DomainError("ratio_test: requires a gaussian or dotproduct kernel");
  }
  if (dp.degree && n_max > *dp.degree) {
    throw DomainError("ratio_test: b_" + std::to_string(*dp.degree + 1) + " of a polynomial kernel is 0");
  }
  std::vector<Real> b;
  for (unsigned long n = 0; n <= n_max; ++n) b.push_back(dp.b(n, p));
  return ratio_test(b);
}

struct SchoenbergResult {
  bool positive_definite = true;
  std::optional<unsigned long> first_violation;
};

/// Nonnegativity of all condensed coefficients, tolerating
/// 2^-(bits-20) * max |c_n| of rounding noise.
inline SchoenbergResult schoenberg_check(const LegendreExpansion& e) {
  const auto c = e.coefficients();
  Real maxabs(e.precision());
  for (const auto& v : c) maxabs = max(maxabs, abs(v));
  const Real tol = maxabs * pow2(-static_cast<long>(e.precision().bits) + 20, e.precision());
  for (unsigned long n = 0; n < c.size(); ++n) {
    if (c[n] < -tol) return SchoenbergResult{false, n};
  }
  return {};
}

}  // namespace spherespec
