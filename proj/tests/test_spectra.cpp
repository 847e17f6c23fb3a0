#include <gtest/gtest.h>

#include <algorithm>

#include "spherespec/spectra.hpp"
#include "test_util.hpp"

using namespace spherespec;

namespace {

const Precision kP{256};

Real R(double v) { return Real(v, kP); }

LegendreExpansion single_level(int m, unsigned long n, const Real& c) {
  std::vector<Real> cs(n + 1, Real(kP));
  cs[n] = c;
  return LegendreExpansion(m, std::move(cs), Provenance::closed_form);
}

}  // namespace

TEST(Blocks, Examples) {
  const auto opt = eigenvalue_blocks(expand(Optimality{}, 2, 10, kP));
  EXPECT_EQ(opt.blocks()[2].value.to_double(), 0.03125);
  EXPECT_EQ(opt.blocks()[2].multiplicity, 5);

  const auto one = eigenvalue_blocks(LegendreExpansion(2, {R(1)}, Provenance::closed_form));
  ASSERT_EQ(one.blocks().size(), 1U);
  EXPECT_EQ(one.blocks()[0].level, 0UL);
  EXPECT_EQ(one.blocks()[0].value.to_double(), 1.0);
  EXPECT_EQ(one.blocks()[0].multiplicity, 1);

  const auto mq = eigenvalue_blocks(expand(Multiquadric{R(1), R(0.5)}, 2, 5, kP));
  EXPECT_LT(tu::rel(mq.blocks()[1].value, Real(0.25, kP) / 3L), 1e-70);
  EXPECT_EQ(mq.blocks()[1].multiplicity, 3);
}

TEST(Blocks, FlatIndexBookkeeping) {
  for (int m = 2; m <= 5; ++m) {
    const auto s = eigenvalue_blocks(expand(Moller{R(2), R(1), R(1), R(1)}, m, 50, kP));
    const auto& runs = s.runs(Ordering::block);
    for (unsigned long n = 0; n <= 50; ++n) {
      const BigInt first = n == 0 ? BigInt(1) : cum_dim(n - 1, m) + 1;
      EXPECT_EQ(runs[n].first_index, first);
      EXPECT_EQ(runs[n].last_index(), cum_dim(n, m));
    }
    EXPECT_EQ(s.size(), cum_dim(50, m));
  }
}

TEST(Blocks, SortedOrderingIsNonIncreasingAndStable) {
  tu::Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(4));
    auto c = tu::random_coeffs(rng, 12, kP, true);
    const auto s = eigenvalue_blocks(LegendreExpansion(m, c, Provenance::closed_form));
    const auto flat = s.flatten(Ordering::sorted, 100000);
    for (std::size_t i = 1; i < flat.size(); ++i) EXPECT_GE(abs(flat[i - 1].value), abs(flat[i].value));
    // Same multiset as the block ordering.
    auto a = s.flatten(Ordering::block, 100000);
    std::vector<double> x, y;
    for (const auto& e : a) x.push_back(e.value.to_double());
    for (const auto& e : flat) y.push_back(e.value.to_double());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    EXPECT_EQ(x, y);
  }
  // Equal values: the lower level comes first.
  const auto tie = eigenvalue_blocks(LegendreExpansion(2, {R(1), R(3)}, Provenance::closed_form));
  EXPECT_EQ(tie.runs(Ordering::sorted)[0].level, 0UL);
  EXPECT_EQ(tie.runs(Ordering::sorted)[1].level, 1UL);
}

TEST(Blocks, RunLookup) {
  const auto s = eigenvalue_blocks(expand(Optimality{}, 2, 10, kP));
  EXPECT_EQ(s.run_at(BigInt(1), Ordering::block).level, 0UL);
  EXPECT_EQ(s.run_at(BigInt(4), Ordering::block).level, 1UL);
  EXPECT_EQ(s.run_at(BigInt(5), Ordering::block).level, 2UL);
  EXPECT_EQ(s.run_at(BigInt(121), Ordering::block).level, 10UL);
  EXPECT_THROW((void)s.run_at(BigInt(0), Ordering::sorted), DomainError);
  EXPECT_THROW((void)s.run_at(BigInt(122), Ordering::sorted), DomainError);
  EXPECT_THROW(Spectrum(2, {Block{1, R(1), BigInt(4)}}), DomainError);
}

TEST(Derivative, Multipliers) {
  const auto e = LegendreExpansion(3, {R(2), R(1), R(1)}, Provenance::closed_form);
  const auto d = lb_derivative(e, 2);
  EXPECT_TRUE(d.coefficient(0).is_zero());
  EXPECT_EQ(d.scale(2), Rational(64, 9));
  const auto d2 = lb_derivative(LegendreExpansion(2, {R(1), R(5)}, Provenance::closed_form), 1);
  EXPECT_EQ(d2.coefficient(1).to_double(), 5.0);
  EXPECT_THROW(lb_derivative(e, 0), DomainError);

  const auto j = j_operator(e, 1);
  EXPECT_EQ(j.coefficient(0).to_double(), 2.0);
  EXPECT_EQ(j_operator(LegendreExpansion(2, {R(1), R(7)}, Provenance::closed_form), 1).coefficient(1).to_double(), 7.0);
  EXPECT_EQ(j.scale(2), Rational(3, 8));
  EXPECT_THROW(j_operator(e, 0), DomainError);
}

TEST(Derivative, InverseCompositionIsExact) {
  tu::Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const auto c = tu::random_coeffs(rng, 1 + rng.below(30), kP, true);
    const LegendreExpansion e(m, c, Provenance::closed_form);
    const unsigned long r = 1 + rng.below(6);
    const auto a = j_operator(lb_derivative(e, r), r);
    const auto b = lb_derivative(j_operator(e, r), r);
    for (unsigned long n = 1; n < e.size(); ++n) {
      EXPECT_EQ(mpfr_cmp(a.coefficient(n).get(), c[n].get()), 0);
      EXPECT_EQ(mpfr_cmp(b.coefficient(n).get(), c[n].get()), 0);
    }
  }
}

TEST(Derivative, JMultipliersStrictlyDecrease) {
  for (int m = 2; m <= 6; ++m) {
    Rational prev(2);
    for (unsigned long n = 1; n <= 1000; ++n) {
      const Rational q = Rational(m) / (BigInt(n) * (n + m - 1));
      EXPECT_LT(q, prev);
      prev = q;
    }
  }
}

TEST(HsNorm, Examples) {
  EXPECT_EQ(hs_norm(LegendreExpansion(2, {R(1)}, Provenance::closed_form)).to_double(), 1.0);
  const Real a = R(0.7);
  EXPECT_LT(tu::rel(hs_norm(single_level(2, 1, 3L * a)), sqrt(Real(3L, kP)) * a), 1e-70);
  // Optimality: 1 + sum (2n+1) n^(-4n-2), summed independently.
  const auto e = expand(Optimality{}, 2, 40, kP);
  Real acc(1L, kP);
  for (unsigned long n = 1; n <= 40; ++n) acc += Real(2 * n + 1, kP) / pow(Real(n, kP), static_cast<long>(4 * n + 2));
  EXPECT_LT(tu::rel(hs_norm(e), sqrt(acc)), 1e-70);
}

TEST(HsNorm, ParsevalOverFlattenedSpectrum) {
  tu::Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(4));
    const LegendreExpansion e(m, tu::random_coeffs(rng, 10, kP, true), Provenance::closed_form);
    const auto s = eigenvalue_blocks(e);
    Real acc(kP);
    for (const auto& f : s.flatten(Ordering::block, 1000000)) acc += f.value * f.value;
    EXPECT_LT(tu::rel(acc, pow(hs_norm(e), 2L)), 1e-70);
  }
}

TEST(Growth, Examples) {
  const auto one = growth_rate(LegendreExpansion(2, {R(1)}, Provenance::closed_form), 4);
  EXPECT_EQ(one.r_hat.to_double(), 1.0);
  EXPECT_EQ(one.m_hat.to_double(), 1.0);
  EXPECT_TRUE(one.satisfied);

  const auto lvl = growth_rate(single_level(2, 3, R(2)), 6);
  for (unsigned long r = 0; r < 6; ++r) {
    EXPECT_LT(tu::rel(lvl.norms[r + 1] / lvl.norms[r], Real(6L, kP)), 1e-70);
  }

  const auto opt = growth_rate(expand(Optimality{}, 2, 40, kP), 10);
  EXPECT_TRUE(opt.satisfied);
  EXPECT_TRUE(opt.r_hat.is_finite());
  for (unsigned long r = 0; r <= 10; ++r) {
    EXPECT_LE(opt.norms[r], opt.m_hat * pow(opt.r_hat, static_cast<long>(r)) * Real(1.0 + 1e-60, kP));
  }
  EXPECT_THROW(growth_rate(expand(Optimality{}, 2, 4, kP), 1), DomainError);
}

TEST(LeadingSingularValue, Examples) {
  for (int m = 2; m <= 5; ++m) {
    const auto e = single_level(m, 1, R(3));
    for (unsigned long r = 1; r <= 4; ++r) {
      const auto s1 = s1_of_derivative(e, r);
      EXPECT_LT(tu::rel(s1.value, Real(3L, kP) / static_cast<long>(m + 1)), 1e-70);
      EXPECT_EQ(s1.level_attained, 1UL);
    }
  }
  const auto opt = s1_of_derivative(expand(Optimality{}, 2, 30, kP), 1);
  EXPECT_EQ(opt.value.to_double(), 1.0);
  EXPECT_EQ(opt.level_attained, 1UL);
  EXPECT_TRUE(opt.matches_level1);

  // Slowly decaying coefficients: the maximum may move off level 1 (recorded only).
  const auto mq = expand(Multiquadric{R(1), R(0.9)}, 2, 60, kP);
  const auto s = s1_of_derivative(mq, 1);
  Real brute(kP);
  unsigned long at = 0;
  for (unsigned long n = 1; n <= 60; ++n) {
    const Real v = mq.coefficient(n) / dim_harmonic(n, 2) * Real(n * (n + 1), kP) / 2L;
    if (v > brute) {
      brute = v;
      at = n;
    }
  }
  EXPECT_LT(tu::rel(s.value, brute), 1e-70);
  EXPECT_EQ(s.level_attained, at);
  EXPECT_EQ(s.matches_level1, at == 1);

  EXPECT_THROW(s1_of_derivative(LegendreExpansion(2, {R(1), R(-1)}, Provenance::closed_form), 1), DomainError);
}
