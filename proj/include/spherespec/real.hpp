#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "spherespec/errors.hpp"

namespace spherespec {

/// Exact integers (harmonic dimensions, flat indices).
using BigInt = mpz_class;
/// Exact rationals (multiplier products, Laplace-Beltrami factors).
using Rational = mpq_class;

/// Working precision of an extended-precision value, in bits of mantissa.
struct Precision {
  unsigned bits = 512;

  /// Decimal digits carried by the mantissa, rounded down.
  [[nodiscard]] unsigned decimal_digits() const {
    return static_cast<unsigned>(std::floor(bits * 0.30102999566398120));
  }
  /// 2^-(bits - slack), the tolerance idiom used throughout the library.
  [[nodiscard]] double tolerance_exponent(unsigned slack) const {
    return -static_cast<double>(bits) + static_cast<double>(slack);
  }
  friend bool operator==(Precision, Precision) = default;
};

inline constexpr Precision kDefaultPrecision{512};

/// Extended-precision real backed by an MPFR value.
///
/// Each value owns its precision; binary operations round to the larger of the
/// operand precisions. Nothing here touches MPFR's process-wide default
/// precision, so independent values may be used from different threads.
class Real {
 public:
  explicit Real(Precision p = kDefaultPrecision) {
    mpfr_init2(v_, static_cast<mpfr_prec_t>(p.bits));
    mpfr_set_zero(v_, 1);
  }
  Real(long x, Precision p) : Real(p) { mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(int x, Precision p) : Real(static_cast<long>(x), p) {}
  Real(unsigned long x, Precision p) : Real(p) { mpfr_set_ui(v_, x, MPFR_RNDN); }
  Real(double x, Precision p) : Real(p) { mpfr_set_d(v_, x, MPFR_RNDN); }
  Real(const BigInt& x, Precision p) : Real(p) { mpfr_set_z(v_, x.get_mpz_t(), MPFR_RNDN); }
  Real(const Rational& x, Precision p) : Real(p) { mpfr_set_q(v_, x.get_mpq_t(), MPFR_RNDN); }

  /// Parses a decimal (or "inf"/"nan") string; throws ParseError on junk.
  static Real from_string(std::string_view text, Precision p) {
    Real r(p);
    std::string s(text);
    if (s.empty()) throw ParseError("empty number", 0);
    char* end = nullptr;
    mpfr_strtofr(r.v_, s.c_str(), &end, 10, MPFR_RNDN);
    if (end == s.c_str() || *end != '\0') {
      throw ParseError("not a decimal number: '" + s + "'", static_cast<std::size_t>(end - s.c_str()));
    }
    return r;
  }

  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  [[nodiscard]] Precision precision() const { return Precision{static_cast<unsigned>(mpfr_get_prec(v_))}; }

  [[nodiscard]] mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  [[nodiscard]] double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  [[nodiscard]] bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  [[nodiscard]] bool is_finite() const { return mpfr_number_p(v_) != 0; }
  [[nodiscard]] int sign() const { return mpfr_sgn(v_); }
  /// Binary exponent e with 0.5 <= |x| / 2^e < 1; meaningless for zero.
  [[nodiscard]] long exponent2() const { return mpfr_get_exp(v_); }

  /// Scientific decimal string that reads back to the same value: enough
  /// digits for any value at this precision, trailing mantissa zeros dropped.
  [[nodiscard]] std::string to_decimal() const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
    if (mpfr_zero_p(v_)) return "0";
    const auto digits = mpfr_get_str_ndigits(10, mpfr_get_prec(v_));
    std::string s = format_digits(static_cast<int>(digits));
    const auto e = s.find('e');
    std::size_t cut = e;
    while (cut > 0 && s[cut - 1] == '0') --cut;
    if (cut > 0 && s[cut - 1] == '.') --cut;
    return s.substr(0, cut) + s.substr(e);
  }
  /// Scientific decimal string with the given number of significant digits.
  [[nodiscard]] std::string to_decimal(int digits) const {
    if (!is_finite() || is_zero()) return to_decimal();
    return format_digits(digits);
  }

  Real& operator+=(const Real& o) { widen(o); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { widen(o); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { widen(o); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { widen(o); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(long k) { mpfr_mul_si(v_, v_, k, MPFR_RNDN); return *this; }
  Real& operator/=(long k) { mpfr_div_si(v_, v_, k, MPFR_RNDN); return *this; }
  Real& operator+=(long k) { mpfr_add_si(v_, v_, k, MPFR_RNDN); return *this; }
  Real& operator-=(long k) { mpfr_sub_si(v_, v_, k, MPFR_RNDN); return *this; }
  template <std::floating_point D> Real& operator*=(D) = delete;
  template <std::floating_point D> Real& operator/=(D) = delete;
  template <std::floating_point D> Real& operator+=(D) = delete;
  template <std::floating_point D> Real& operator-=(D) = delete;

  Real& operator*=(const BigInt& k) { mpfr_mul_z(v_, v_, k.get_mpz_t(), MPFR_RNDN); return *this; }
  Real& operator/=(const BigInt& k) { mpfr_div_z(v_, v_, k.get_mpz_t(), MPFR_RNDN); return *this; }
  Real& operator*=(const Rational& q) { mpfr_mul_q(v_, v_, q.get_mpq_t(), MPFR_RNDN); return *this; }
  Real& operator/=(const Rational& q) { mpfr_div_q(v_, v_, q.get_mpq_t(), MPFR_RNDN); return *this; }

  Real operator-() const {
    Real r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

  friend Real operator+(Real a, const Real& b) { return a += b; }
  friend Real operator-(Real a, const Real& b) { return a -= b; }
  friend Real operator*(Real a, const Real& b) { return a *= b; }
  friend Real operator/(Real a, const Real& b) { return a /= b; }
  friend Real operator*(Real a, long k) { return a *= k; }
  friend Real operator*(long k, Real a) { return a *= k; }
  friend Real operator/(Real a, long k) { return a /= k; }
  friend Real operator+(Real a, long k) { return a += k; }
  friend Real operator-(Real a, long k) { return a -= k; }
  friend Real operator*(Real a, const BigInt& k) { return a *= k; }
  friend Real operator/(Real a, const BigInt& k) { return a /= k; }
  friend Real operator*(Real a, const Rational& q) { return a *= q; }
  friend Real operator/(Real a, const Rational& q) { return a /= q; }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b) {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }
  friend bool operator==(const Real& a, long k) { return mpfr_cmp_si(a.v_, k) == 0 && !mpfr_nan_p(a.v_); }
  friend std::partial_ordering operator<=>(const Real& a, long k) {
    if (mpfr_nan_p(a.v_)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp_si(a.v_, k);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }

  /// Exact comparison against a double (no silent conversion to long).
  template <std::floating_point D>
  friend bool operator==(const Real& a, D d) {
    return !mpfr_nan_p(a.v_) && !std::isnan(d) && mpfr_cmp_d(a.v_, static_cast<double>(d)) == 0;
  }
  template <std::floating_point D>
  friend std::partial_ordering operator<=>(const Real& a, D d) {
    if (mpfr_nan_p(a.v_) || std::isnan(d)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp_d(a.v_, static_cast<double>(d));
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }
  /// Mixing with doubles would truncate through the long overloads; build a Real instead.
  template <std::floating_point D> friend Real operator+(Real, D) = delete;
  template <std::floating_point D> friend Real operator-(Real, D) = delete;
  template <std::floating_point D> friend Real operator*(Real, D) = delete;
  template <std::floating_point D> friend Real operator/(Real, D) = delete;
  template <std::floating_point D> friend Real operator+(D, Real) = delete;
  template <std::floating_point D> friend Real operator-(D, Real) = delete;
  template <std::floating_point D> friend Real operator*(D, Real) = delete;
  template <std::floating_point D> friend Real operator/(D, Real) = delete;

  friend std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.to_decimal(30); }

 private:
  void widen(const Real& o) {
    const auto po = mpfr_get_prec(o.v_);
    if (po > mpfr_get_prec(v_)) mpfr_prec_round(v_, po, MPFR_RNDN);
  }

  [[nodiscard]] std::string format_digits(int digits) const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", digits > 1 ? digits - 1 : 0, v_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }

  mpfr_t v_;
};

namespace detail {
template <typename F>
Real unary(const Real& x, F&& f) {
  Real r(x.precision());
  f(r.get(), x.get(), MPFR_RNDN);
  return r;
}
}  // namespace detail

inline Real abs(const Real& x) { return detail::unary(x, mpfr_abs); }
inline Real sqrt(const Real& x) { return detail::unary(x, mpfr_sqrt); }
inline Real exp(const Real& x) { return detail::unary(x, mpfr_exp); }
inline Real log(const Real& x) { return detail::unary(x, mpfr_log); }
inline Real gamma(const Real& x) { return detail::unary(x, mpfr_gamma); }
inline Real lgamma_abs(const Real& x) {
  Real r(x.precision());
  int sign = 0;
  mpfr_lgamma(r.get(), &sign, x.get(), MPFR_RNDN);
  return r;
}

inline Real pow(const Real& base, const Real& e) {
  Real r(Precision{std::max(base.precision().bits, e.precision().bits)});
  mpfr_pow(r.get(), base.get(), e.get(), MPFR_RNDN);
  return r;
}
inline Real pow(const Real& base, long e) {
  Real r(base.precision());
  mpfr_pow_si(r.get(), base.get(), e, MPFR_RNDN);
  return r;
}
/// k-th root, k >= 1.
inline Real root(const Real& x, unsigned long k) {
  Real r(x.precision());
  mpfr_rootn_ui(r.get(), x.get(), k, MPFR_RNDN);
  return r;
}
inline Real max(const Real& a, const Real& b) { return a < b ? b : a; }
inline Real min(const Real& a, const Real& b) { return b < a ? b : a; }

inline Real pi(Precision p) {
  Real r(p);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}
inline Real euler_e(Precision p) { return exp(Real(1L, p)); }

/// 2^e at precision p.
inline Real pow2(long e, Precision p) {
  Real r(1L, p);
  mpfr_mul_2si(r.get(), r.get(), e, MPFR_RNDN);
  return r;
}

/// Relative difference |a-b| / max(|a|,|b|); zero when both vanish.
inline Real relative_difference(const Real& a, const Real& b) {
  const Real scale = max(abs(a), abs(b));
  if (scale.is_zero()) return Real(scale.precision());
  return abs(a - b) / scale;
}

inline std::string to_string(const BigInt& z) { return z.get_str(); }

}  // namespace spherespec
