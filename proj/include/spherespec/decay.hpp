#pragma once

// Decay bounds s_n = o(n^(-n^(1/m)/(delta m))), the singular-value chain
//   s_{d_n^(m+1)}(K) <= [prod_{i<=n} m/(i(i+m-1))] s_1(K_{0,n}),
// and the series engine for sum_n n^(n^(1/m)/(delta m) + alpha_n) s_n.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spherespec/errors.hpp"
#include "spherespec/harmonics.hpp"
#include "spherespec/kernels.hpp"
#include "spherespec/real.hpp"
#include "spherespec/spectra.hpp"

namespace spherespec {

/// n^(1/m) / (delta m).
inline Real decay_exponent(const BigInt& n, int m, Precision p) {
  const SphereDim dim(m);
  return root(Real(n, p), static_cast<unsigned long>(m)) / static_cast<long>(dim.delta() * m);
}

/// n^(-n^(1/m)/(delta m)), evaluated as exp(-exponent * log n).
inline Real decay_bound(const BigInt& n, int m, Precision p = kDefaultPrecision) {
  if (n < 1) throw DomainError("decay_bound: flat index must be >= 1");
  return exp(-decay_exponent(n, m, p) * log(Real(n, p)));
}

/// prod_{i=1}^n m / (i (i+m-1)), the product of the n largest J multipliers
/// below 1.
inline Rational exact_j_product(unsigned long n, int m) {
  require_sphere_dim(m);
  if (n < 1) throw DomainError("exact_j_product: n must be >= 1");
  BigInt num = 1, den = 1;
  for (unsigned long i = 1; i <= n; ++i) {
    num *= static_cast<unsigned long>(m);
    den *= BigInt(i) * (i + static_cast<unsigned long>(m) - 1);
  }
  Rational q(num, den);
  q.canonicalize();
  return q;
}

struct DecayRow {
  unsigned long n = 0;
  BigInt flat_index;  // d_n^(m+1)
  Real lhs;           // s_{d_n^(m+1)}(K)
  Real rhs;           // exact product * s_1(K_{0,n})
  Real ratio;         // lhs / rhs (0 when lhs = 0)
  Real envelope;      // decay_bound(flat_index)
  Real stirling_rhs;  // c e^(2n) m^n / n^(2n+m) * s_1(K_{0,n})
  unsigned long s1_level = 0;
  bool holds = false;
};

struct DecayReport {
  int m = 2;
  int delta = 2;
  std::vector<DecayRow> rows;
  /// Smallest c with exact product <= c e^(2n) m^n / n^(2n+m) on the checked n.
  Real stirling_c;

  [[nodiscard]] bool all_hold() const {
    for (const auto& r : rows) {
      if (!r.holds) return false;
    }
    return true;
  }
};

/// Checks s_{d_n^(m+1)}(K) <= prod_{i<=n} s_{d_i^m}(J) * s_1(K_{0,n}) for
/// n = 1..n_max against the sorted spectrum, and certifies a Stirling-form
/// constant empirically.
inline DecayReport verify_lemma42(const Spectrum& spectrum, const LegendreExpansion& e, unsigned long n_max) {
  if (spectrum.m() != e.m()) throw DomainError("verify_lemma42: spectrum and expansion disagree on m");
  if (n_max < 1) throw DomainError("verify_lemma42: n_max must be >= 1");
  if (n_max > e.truncation_level()) {
    throw DomainError("verify_lemma42: n_max = " + std::to_string(n_max) + " beyond truncation level " +
                      std::to_string(e.truncation_level()));
  }
  if (const auto pd = schoenberg_check(e); !pd.positive_definite) {
    throw DomainError("verify_lemma42: expansion is not positive definite (level " +
                      std::to_string(*pd.first_violation) + ")");
  }
  const int m = e.m();
  const Precision p = e.precision();
  DecayReport rep;
  rep.m = m;
  rep.delta = SphereDim(m).delta();
  rep.stirling_c = Real(p);

  const Real e1 = euler_e(p);
  std::vector<Real> stirling_shape;  // e^(2n) m^n / n^(2n+m)
  for (unsigned long n = 1; n <= n_max; ++n) {
    DecayRow row;
    row.n = n;
    row.flat_index = cum_dim(n, m);
    row.lhs = spectrum.singular_value(row.flat_index);
    const Rational prod = exact_j_product(n, m);
    const auto s1 = s1_of_derivative(e, n);
    row.s1_level = s1.level_attained;
    row.rhs = s1.value * prod;
    if (row.lhs.is_zero()) {
      row.ratio = Real(p);
    } else {
      row.ratio = row.lhs / row.rhs;
    }
    row.holds = row.lhs <= row.rhs;
    row.envelope = decay_bound(row.flat_index, m, p);

    Real shape = pow(e1, static_cast<long>(2 * n)) * pow(Real(static_cast<long>(m), p), static_cast<long>(n)) /
                 pow(Real(n, p), static_cast<long>(2 * n) + m);
    rep.stirling_c = max(rep.stirling_c, Real(prod, p) / shape);
    stirling_shape.push_back(std::move(shape));
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto s1 = s1_of_derivative(e, rep.rows[i].n);
    rep.rows[i].stirling_rhs = rep.stirling_c * stirling_shape[i] * s1.value;
  }
  return rep;
}

/// alpha_n families for the series engine.
struct ExponentZero {};
/// alpha_n = n^p, p < 1/m.
struct ExponentPower {
  Real p;
};
/// alpha_n = kappa n^(1/m).
struct ExponentScaledRoot {
  Real kappa;
};
/// alpha_n = table[n-1].
struct ExponentTable {
  std::vector<Real> values;
};
using ExponentSpec = std::variant<ExponentZero, ExponentPower, ExponentScaledRoot, ExponentTable>;

inline std::string describe(const ExponentSpec& spec) {
  if (std::holds_alternative<ExponentZero>(spec)) return "zero";
  if (const auto* pw = std::get_if<ExponentPower>(&spec)) return "power:" + pw->p.to_decimal(17);
  if (const auto* sr = std::get_if<ExponentScaledRoot>(&spec)) return "root:" + sr->kappa.to_decimal(17);
  return "table:" + std::to_string(std::get<ExponentTable>(spec).values.size());
}

inline void validate(const ExponentSpec& spec, int m) {
  if (const auto* pw = std::get_if<ExponentPower>(&spec)) {
    if (!(pw->p * static_cast<long>(m) < 1L)) {
      throw DomainError("exponent power:p requires p < 1/m, got p = " + pw->p.to_decimal(17));
    }
  }
}

/// alpha_k at flat index k >= 1.
inline Real exponent_at(const ExponentSpec& spec, const BigInt& k, int m, Precision p) {
  if (std::holds_alternative<ExponentZero>(spec)) return Real(p);
  if (const auto* pw = std::get_if<ExponentPower>(&spec)) return pow(Real(k, p), detail::with_precision(pw->p, p));
  if (const auto* sr = std::get_if<ExponentScaledRoot>(&spec)) {
    return detail::with_precision(sr->kappa, p) * root(Real(k, p), static_cast<unsigned long>(m));
  }
  const auto& t = std::get<ExponentTable>(spec).values;
  if (k > t.size()) throw DomainError("exponent table has no entry for index " + k.get_str());
  return detail::with_precision(t[k.get_ui() - 1], p);
}

enum class Verdict { converging, diverging, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::converging: return "converging";
    case Verdict::diverging: return "diverging";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct SeriesEvaluation {
  std::string exponent;
  std::vector<unsigned long> checkpoints;
  std::vector<Real> partial_sums;  // at checkpoints
  std::vector<Real> term_values;   // at checkpoints
  Verdict verdict = Verdict::inconclusive;
  std::string reason;
  /// Geometric continuation of the last two complete run sums past the final checkpoint.
  std::optional<Real> tail_estimate;
  /// First flat index of the run where the run maxima start decreasing.
  std::optional<unsigned long> window_start;
  /// First index k > 10 with term > 1.
  std::optional<unsigned long> first_term_above_one;
  /// All terms 1..last checkpoint, for CSV output.
  std::vector<Real> terms;
};

/// Partial sums of sum_k k^(k^(1/m)/(delta m) + alpha_k) s_k over the sorted
/// spectrum, with a deterministic verdict.
///
/// Terms are computed in the log domain. Within one eigenvalue run the terms
/// grow with k, so monotonicity is judged on run maxima. Rules, in order:
///  - diverging: some term with k > 10 exceeds 1, or the run maximum at the
///    last checkpoint exceeds the one at the previous checkpoint;
///  - converging: all terms past the final checkpoint are known to be zero, or run
///    maxima decrease strictly from a window starting no later than the
///    previous checkpoint and the geometric tail S_J q/(1-q), q = S_J/S_(J-1)
///    over the last two complete runs, is below 10^(-digits/2) of the sum;
///  - inconclusive otherwise.
inline SeriesEvaluation series_eval(const Spectrum& spectrum, const ExponentSpec& exponent,
                                    std::vector<unsigned long> checkpoints, Precision p = kDefaultPrecision) {
  const int m = spectrum.m();
  validate(exponent, m);
  if (checkpoints.empty()) throw DomainError("series_eval: at least one checkpoint required");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      throw DomainError("series_eval: checkpoints must be positive and strictly increasing");
    }
  }
  const unsigned long K = checkpoints.back();
  if (spectrum.size() < K) {
    throw DomainError("series_eval: checkpoint " + std::to_string(K) + " beyond spectrum size " +
                      spectrum.size().get_str());
  }
  for (const auto& b : spectrum.blocks()) {
    if (b.value.sign() < 0) {
      throw DomainError("series_eval: negative eigenvalue at level " + std::to_string(b.level) +
                        " (pass |lambda| for singular values)");
    }
  }

  SeriesEvaluation out;
  out.exponent = describe(exponent);
  out.checkpoints = checkpoints;
  out.terms.reserve(K);

  struct RunStat {
    unsigned long first = 0;
    unsigned long last = 0;
    Real max;
    Real sum;
    bool complete = false;
  };
  std::vector<RunStat> stats;

  Real partial(p);
  std::size_t next_cp = 0;
  unsigned long k = 1;
  for (const auto& run : spectrum.runs(Ordering::sorted)) {
    if (k > K) break;
    const unsigned long run_last = run.last_index().fits_ulong_p() ? run.last_index().get_ui() : ~0UL;
    RunStat st{k, std::min(run_last, K), Real(p), Real(p), run_last <= K};
    const bool zero = run.value.is_zero();
    const Real log_s = zero ? Real(p) : log(detail::with_precision(run.value, p));
    for (; k <= st.last; ++k) {
      Real term(p);
      if (!zero) {
        const BigInt kk(k);
        const Real power = decay_exponent(kk, m, p) + exponent_at(exponent, kk, m, p);
        term = exp(power * log(Real(k, p)) + log_s);
      }
      partial += term;
      if (k > 10 && term > 1L && !out.first_term_above_one) out.first_term_above_one = k;
      st.max = max(st.max, term);
      st.sum += term;
      if (next_cp < checkpoints.size() && checkpoints[next_cp] == k) {
        out.partial_sums.push_back(partial);
        out.term_values.push_back(term);
        ++next_cp;
      }
      out.terms.push_back(std::move(term));
    }
    stats.push_back(std::move(st));
  }

  auto run_of = [&](unsigned long idx) -> std::size_t {
    for (std::size_t j = 0; j < stats.size(); ++j) {
      if (idx >= stats[j].first && idx <= stats[j].last) return j;
    }
    return stats.size() - 1;
  };

  if (out.first_term_above_one) {
    out.verdict = Verdict::diverging;
    out.reason = "term exceeds 1 at index " + std::to_string(*out.first_term_above_one);
    return out;
  }
  if (checkpoints.size() >= 2) {
    const auto& a = stats[run_of(checkpoints[checkpoints.size() - 2])];
    const auto& b = stats[run_of(checkpoints.back())];
    if (b.max > a.max) {
      out.verdict = Verdict::diverging;
      out.reason = "run maxima increase between the last two checkpoints";
      return out;
    }
  }

  // Remaining spectrum past K is exactly zero: the series is a finite sum.
  // A truncation that simply ends at K says nothing about the rest, so this
  // needs explicit zero runs past K or a vanishing final run.
  bool rest_zero = true, beyond = false;
  for (const auto& run : spectrum.runs(Ordering::sorted)) {
    if (run.last_index() <= K) continue;
    beyond = true;
    if (!run.value.is_zero()) rest_zero = false;
  }
  if (!beyond) rest_zero = stats.back().complete && stats.back().sum.is_zero();
  if (rest_zero) {
    out.tail_estimate = Real(p);
    out.verdict = Verdict::converging;
    out.reason = "spectrum vanishes beyond the last checkpoint";
    return out;
  }

  // Smallest run j0 with strictly decreasing maxima from j0 to the end.
  std::size_t j0 = stats.size() - 1;
  while (j0 > 0 && stats[j0 - 1].max > stats[j0].max) --j0;
  out.window_start = stats[j0].first;
  const unsigned long window_limit = checkpoints.size() >= 2 ? checkpoints[checkpoints.size() - 2] : K / 2;

  std::size_t J = stats.size();
  while (J > 0 && !stats[J - 1].complete) --J;
  if (J < 2 || J - 2 < j0) {
    out.verdict = Verdict::inconclusive;
    out.reason = "fewer than two complete runs in the decreasing window";
    return out;
  }
  const auto& last = stats[J - 1];
  const auto& prev = stats[J - 2];
  if (prev.sum.is_zero() || !(last.sum < prev.sum)) {
    out.verdict = Verdict::inconclusive;
    out.reason = "run sums not geometrically decreasing";
    return out;
  }
  const Real q = last.sum / prev.sum;
  out.tail_estimate = last.sum * q / (Real(1L, p) - q);
  const Real threshold = partial * pow(Real(10L, p), -static_cast<long>(p.decimal_digits() / 2));
  if (*out.window_start <= window_limit && *out.tail_estimate < threshold) {
    out.verdict = Verdict::converging;
    out.reason = "run maxima decrease and the geometric tail is below 10^-" + std::to_string(p.decimal_digits() / 2) +
                 " of the sum";
  } else {
    out.verdict = Verdict::inconclusive;
    out.reason = *out.window_start > window_limit ? "decreasing window starts after the previous checkpoint"
                                                   : "geometric tail not yet negligible";
  }
  return out;
}

struct EnvelopeCheck {
  /// (n, s_n n^(n^(1/m)/(delta m))) for each requested index.
  std::vector<std::pair<BigInt, Real>> values;
  /// Position (into values) from which the sequence strictly decreases.
  std::optional<std::size_t> window;
  bool monotone_beyond_window = false;
};

/// The normalized sequence s_n n^(n^(1/m)/(delta m)) at the requested flat
/// indices; its decrease to 0 witnesses the o(.) decay.
inline EnvelopeCheck decay_envelope_check(const Spectrum& spectrum, const std::vector<BigInt>& n_values,
                                          Precision p = kDefaultPrecision) {
  const int m = spectrum.m();
  EnvelopeCheck out;
  for (const auto& n : n_values) {
    const Real s = spectrum.singular_value(n);
    Real v = s.is_zero() ? Real(p) : exp(decay_exponent(n, m, p) * log(Real(n, p)) + log(detail::with_precision(s, p)));
    out.values.emplace_back(n, std::move(v));
  }
  if (out.values.size() >= 2) {
    std::size_t w = out.values.size() - 1;
    auto decreasing = [](const Real& a, const Real& b) { return b < a || (a.is_zero() && b.is_zero()); };
    while (w > 0 && decreasing(out.values[w - 1].second, out.values[w].second)) --w;
    if (w + 1 < out.values.size()) {
      out.window = w;
      out.monotone_beyond_window = true;
    }
  }
  return out;
}

/// Last flat index of every sorted run up to `limit` (the within-run maxima of
/// the normalized sequence sit there).
inline std::vector<BigInt> run_end_indices(const Spectrum& spectrum, const BigInt& limit) {
  std::vector<BigInt> out;
  for (const auto& run : spectrum.runs(Ordering::sorted)) {
    const BigInt last = run.last_index();
    if (last > limit) break;
    out.push_back(last);
  }
  return out;
}

struct IndexInequality {
  int m = 2;
  int delta = 2;
  /// cum_dim(n, m) <= (delta n)^m for all n0 <= n <= n_limit.
  unsigned long n0 = 1;
  unsigned long n_limit = 0;
};

/// Threshold from which d_n^(m+1) <= (delta n)^m, verified exhaustively up to n_limit.
inline IndexInequality index_inequality(int m, unsigned long n_limit) {
  const SphereDim dim(m);
  IndexInequality out{m, dim.delta(), n_limit + 1, n_limit};
  for (unsigned long n = n_limit; n >= 1; --n) {
    BigInt rhs;
    mpz_ui_pow_ui(rhs.get_mpz_t(), static_cast<unsigned long>(dim.delta()) * n, static_cast<unsigned long>(m));
    if (cum_dim(n, m) > rhs) break;
    out.n0 = n;
  }
  return out;
}

struct DimensionLimit {
  Real printed;   // 2 / m!
  Real computed;  // extrapolated from d_n^(m+1) / n^m
};

/// lim d_n^(m+1) / n^m, from the implemented dimension formula by Richardson
/// extrapolation of the ratio at n and 2n (error O(1/n)), alongside 2/m!.
inline DimensionLimit dimension_limit(int m, Precision p = kDefaultPrecision, unsigned long n = 1000000) {
  require_sphere_dim(m);
  BigInt fact = 1;
  for (int i = 2; i <= m; ++i) fact *= i;
  auto ratio = [&](unsigned long k) {
    BigInt km;
    mpz_ui_pow_ui(km.get_mpz_t(), k, static_cast<unsigned long>(m));
    return Real(cum_dim(k, m), p) / km;
  };
  return DimensionLimit{Real(2L, p) / fact, 2L * ratio(2 * n) - ratio(n)};
}

struct DivergenceParameters {
  Real ell;
  unsigned long n_ell = 1;
  /// (2 delta m - ell) / (ell delta m), so beta_n = kappa n^(1/m).
  Real kappa;
  DimensionLimit limit;
};

/// A valid (ell, n_ell) pair for the divergent exponent beta_n = kappa n^(1/m):
/// ell (n-1)^m < d_(n-1)^(m+1) and ell n^(m-1) < d_n^m for all n_ell <= n <= search_limit.
/// ell defaults to `preferred` and is shrunk to 0.9 * lim d_n^(m+1)/n^m when
/// that limit is not above it.
inline DivergenceParameters divergence_parameters(int m, double preferred = 0.9, Precision p = kDefaultPrecision,
                                                  unsigned long search_limit = 2000) {
  const SphereDim dim(m);
  const DimensionLimit lim = dimension_limit(m, p);
  Real ell(preferred, p);
  if (!(ell < lim.computed)) ell = lim.computed * Real(0.9, p);
  // Keep ell a short decimal so the kappa it induces is reproducible.
  ell = Real::from_string(ell.to_decimal(6), p);

  auto holds = [&](unsigned long n) {
    BigInt nm1;
    mpz_ui_pow_ui(nm1.get_mpz_t(), n - 1, static_cast<unsigned long>(m));
    BigInt nmm;
    mpz_ui_pow_ui(nmm.get_mpz_t(), n, static_cast<unsigned long>(m - 1));
    const bool a = ell * nm1 < Real(cum_dim(n - 1, m), p);
    const bool b = ell * nmm < Real(dim_harmonic(n, m), p);
    return a && b;
  };
  unsigned long n_ell = search_limit + 1;
  for (unsigned long n = search_limit; n >= 1; --n) {
    if (!holds(n)) break;
    n_ell = n;
  }
  if (n_ell > search_limit) throw ConvergenceError("divergence_parameters: no valid n_ell", static_cast<long>(search_limit));
  const long dm = static_cast<long>(dim.delta() * m);
  Real kappa = (Real(2L * dm, p) - ell) / (ell * dm);
  return DivergenceParameters{std::move(ell), n_ell, std::move(kappa), lim};
}

}  // namespace spherespec
