#pragma once

// Eigenvalue blocks of zonal integral operators, the two flat orderings
// (level-by-level block order and non-increasing |value|), and spectral
// multipliers for Laplace-Beltrami derivatives.

#include <algorithm>
#include <optional>
#include <vector>

#include "spherespec/errors.hpp"
#include "spherespec/harmonics.hpp"
#include "spherespec/kernels.hpp"
#include "spherespec/real.hpp"

namespace spherespec {

/// One eigenvalue level: value c_n/d_n^m repeated d_n^m times.
struct Block {
  unsigned long level = 0;
  Real value;
  BigInt multiplicity;
};

/// A maximal stretch of equal values in a flat ordering. Flat indices are
/// 1-based: the run covers [first_index, first_index + count - 1].
struct Run {
  unsigned long level = 0;
  Real value;
  BigInt first_index;
  BigInt count;

  [[nodiscard]] BigInt last_index() const { return first_index + count - 1; }
};

struct FlatEntry {
  BigInt index;
  unsigned long level = 0;
  Real value;
};

enum class Ordering { block, sorted };

/// Eigenvalue spectrum of a zonal operator on S^m, truncated at some level.
///
/// Both flat orderings are kept as runs (one per block); entries are only
/// materialized on request via flatten().
class Spectrum {
 public:
  Spectrum(int m, std::vector<Block> blocks) : m_(m), blocks_(std::move(blocks)) {
    require_sphere_dim(m);
    BigInt next = 1;
    block_runs_.reserve(blocks_.size());
    for (const auto& b : blocks_) {
      if (b.multiplicity != dim_harmonic(b.level, m)) {
        throw DomainError("block multiplicity at level " + std::to_string(b.level) + " differs from d_n^m");
      }
      block_runs_.push_back(Run{b.level, b.value, next, b.multiplicity});
      next += b.multiplicity;
    }
    size_ = next - 1;

    std::vector<std::size_t> order(blocks_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Stable: equal magnitudes keep the lower level first.
    std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
      return abs(blocks_[a].value) > abs(blocks_[b].value);
    });
    next = 1;
    sorted_runs_.reserve(order.size());
    for (const auto i : order) {
      const auto& b = blocks_[i];
      sorted_runs_.push_back(Run{b.level, b.value, next, b.multiplicity});
      next += b.multiplicity;
    }
  }

  [[nodiscard]] int m() const { return m_; }
  [[nodiscard]] const std::vector<Block>& blocks() const { return blocks_; }
  [[nodiscard]] const std::vector<Run>& runs(Ordering o) const {
    return o == Ordering::block ? block_runs_ : sorted_runs_;
  }
  /// Total number of eigenvalues counted with multiplicity.
  [[nodiscard]] const BigInt& size() const { return size_; }
  [[nodiscard]] Precision precision() const {
    return blocks_.empty() ? kDefaultPrecision : blocks_.front().value.precision();
  }

  /// Run containing flat index k (1-based).
  [[nodiscard]] const Run& run_at(const BigInt& k, Ordering o) const {
    if (k < 1 || k > size_) {
      throw DomainError("flat index " + k.get_str() + " outside spectrum of size " + size_.get_str());
    }
    const auto& rs = runs(o);
    auto it = std::upper_bound(rs.begin(), rs.end(), k,
                               [](const BigInt& key, const Run& r) { return key < r.first_index; });
    return *std::prev(it);
  }
  /// k-th entry of the ordering, 1-based.
  [[nodiscard]] const Real& at(const BigInt& k, Ordering o) const { return run_at(k, o).value; }
  /// s_k: k-th largest |eigenvalue|.
  [[nodiscard]] Real singular_value(const BigInt& k) const { return abs(at(k, Ordering::sorted)); }

  /// Materialize entries 1..min(limit, size) of an ordering.
  [[nodiscard]] std::vector<FlatEntry> flatten(Ordering o, unsigned long limit) const {
    std::vector<FlatEntry> out;
    BigInt index = 1;
    for (const auto& r : runs(o)) {
      for (BigInt j = 0; j < r.count; ++j) {
        if (index > limit) return out;
        out.push_back(FlatEntry{index, r.level, r.value});
        ++index;
      }
    }
    return out;
  }

 private:
  int m_;
  std::vector<Block> blocks_;
  std::vector<Run> block_runs_;
  std::vector<Run> sorted_runs_;
  BigInt size_;
};

/// Blocks (n, c_n / d_n^m, d_n^m) for n = 0..N.
inline Spectrum eigenvalue_blocks(const LegendreExpansion& e) {
  std::vector<Block> blocks;
  blocks.reserve(e.size());
  for (unsigned long n = 0; n < e.size(); ++n) {
    BigInt d = dim_harmonic(n, e.m());
    // Fold 1/d_n into the exact scale first: a single rounding.
    Rational q = e.scale(n) / d;
    q.canonicalize();
    Real v = q == 1 ? e.base(n) : e.base(n) * q;
    blocks.push_back(Block{n, std::move(v), std::move(d)});
  }
  return Spectrum(e.m(), std::move(blocks));
}

namespace detail {

inline Rational rational_pow(const Rational& q, unsigned long r) {
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), r);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), r);
  Rational out(num, den);
  out.canonicalize();
  return out;
}

/// n(n+m-1)/m, the Laplace-Beltrami eigenvalue on degree-n harmonics.
inline Rational lb_eigenvalue(unsigned long n, int m) {
  Rational q(BigInt(n) * (n + static_cast<unsigned long>(m) - 1), BigInt(m));
  q.canonicalize();
  return q;
}

}  // namespace detail

/// Coefficients of D_y^r K: c_n (n(n+m-1)/m)^r, with level 0 sent to 0.
inline LegendreExpansion lb_derivative(const LegendreExpansion& e, unsigned long r) {
  if (r < 1) throw DomainError("lb_derivative: r must be >= 1");
  const int m = e.m();
  return e.with_multiplier([m, r](unsigned long n) {
    return n == 0 ? Rational(0) : detail::rational_pow(detail::lb_eigenvalue(n, m), r);
  });
}

/// Coefficients of J^r K: c_0 unchanged, c_n (m/(n(n+m-1)))^r for n >= 1.
inline LegendreExpansion j_operator(const LegendreExpansion& e, unsigned long r) {
  if (r < 1) throw DomainError("j_operator: r must be >= 1");
  const int m = e.m();
  return e.with_multiplier([m, r](unsigned long n) {
    if (n == 0) return Rational(1);
    Rational inv = 1 / detail::lb_eigenvalue(n, m);
    inv.canonicalize();
    return detail::rational_pow(inv, r);
  });
}

/// ||K||_2 = sqrt(sum_n c_n^2 / d_n^m), the Hilbert-Schmidt norm under the
/// normalized measure.
inline Real hs_norm(const LegendreExpansion& e) {
  Real acc(e.precision());
  for (unsigned long n = 0; n < e.size(); ++n) {
    const Real c = e.coefficient(n);
    acc += c * c / dim_harmonic(n, e.m());
  }
  return sqrt(acc);
}

struct GrowthReport {
  unsigned long r_max = 0;
  /// norms[r] = ||K_{0,r}||_2 for r = 0..r_max (r = 0 is ||K||_2).
  std::vector<Real> norms;
  Real m_hat;
  Real r_hat;
  bool satisfied = false;
  bool r_hat_above_one = false;
};

/// Empirical constants for ||K_{0,r}||_2 <= M R^r on a truncated expansion.
///
/// R_hat is the largest ratio norms[r+1]/norms[r] over r in [r_max/2, r_max)
/// (1 when every such norm vanishes), and M_hat = max_r norms[r] / R_hat^r, so
/// the bound holds on all computed r by construction.
inline GrowthReport growth_rate(const LegendreExpansion& e, unsigned long r_max) {
  if (r_max < 2) throw DomainError("growth_rate: r_max must be >= 2");
  const Precision p = e.precision();
  GrowthReport rep;
  rep.r_max = r_max;
  rep.norms.push_back(hs_norm(e));
  for (unsigned long r = 1; r <= r_max; ++r) rep.norms.push_back(hs_norm(lb_derivative(e, r)));

  std::optional<Real> r_hat;
  for (unsigned long r = r_max / 2; r < r_max; ++r) {
    if (rep.norms[r].is_zero()) continue;
    Real ratio = rep.norms[r + 1] / rep.norms[r];
    if (!r_hat || ratio > *r_hat) r_hat = std::move(ratio);
  }
  rep.r_hat = r_hat ? *r_hat : Real(1L, p);
  rep.m_hat = Real(p);
  Real rpow(1L, p);
  for (unsigned long r = 0; r <= r_max; ++r) {
    rep.m_hat = max(rep.m_hat, rep.norms[r] / rpow);
    rpow *= rep.r_hat;
  }
  bool finite = rep.r_hat.is_finite() && rep.m_hat.is_finite();
  for (const auto& v : rep.norms) finite = finite && v.is_finite();
  rep.satisfied = finite;
  rep.r_hat_above_one = rep.r_hat > 1L;
  return rep;
}

struct LeadingSingularValue {
  Real value;
  unsigned long level_attained = 1;
  /// The maximum is attained (possibly with ties) at level 1.
  bool matches_level1 = true;
};

/// s_1 of the operator generated by D_y^r K for an L2-PD expansion: the
/// largest level value (c_n/d_n^m)(n(n+m-1)/m)^r over the available levels
/// (n >= 1, or n >= 0 when r = 0).
inline LeadingSingularValue s1_of_derivative(const LegendreExpansion& e, unsigned long r) {
  if (const auto pd = schoenberg_check(e); !pd.positive_definite) {
    throw DomainError("s1_of_derivative: expansion is not positive definite (level " +
                      std::to_string(*pd.first_violation) + ")");
  }
  const Precision p = e.precision();
  const int m = e.m();
  const unsigned long start = r == 0 ? 0 : 1;
  LeadingSingularValue out{Real(p), start, true};
  std::optional<Real> level1;
  bool have = false;
  for (unsigned long n = start; n < e.size(); ++n) {
    Rational f = e.scale(n) / Rational(dim_harmonic(n, m));
    if (n > 0) f *= detail::rational_pow(detail::lb_eigenvalue(n, m), r);
    f.canonicalize();
    Real v = abs(e.base(n) * f);
    if (n == 1) level1 = v;
    if (!have || v > out.value) {
      out.value = v;
      out.level_attained = n;
      have = true;
    }
  }
  if (level1) out.matches_level1 = !(out.value > *level1);
  return out;
}

}  // namespace spherespec
