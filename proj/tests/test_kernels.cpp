#include <gtest/gtest.h>

#include "spherespec/kernels.hpp"
#include "test_util.hpp"

using namespace spherespec;

namespace {

const Precision kP{256};

Real R(double v) { return Real(v, kP); }

}  // namespace

TEST(Catalog, Examples) {
  const auto mq = catalog_coefficients(Multiquadric{R(1), R(0.5)}, 2, 10, kP);
  EXPECT_EQ(mq.coefficient(0).to_double(), 0.5);
  EXPECT_EQ(mq.provenance(), Provenance::closed_form);
  const auto opt = catalog_coefficients(Optimality{}, 2, 10, kP);
  EXPECT_LT(tu::rel(opt.coefficient(2), Real(5L, kP) / 32L), 1e-70);
  EXPECT_EQ(opt.coefficient(0).to_double(), 1.0);

  const auto mo = catalog_coefficients(Moller{R(3), R(0.5), R(1.5), R(2)}, 3, 40, kP);
  for (unsigned long n = 1; n <= 40; ++n) EXPECT_LT(mo.coefficient(n), mo.coefficient(n - 1));
  EXPECT_LT(mo.coefficient(40).to_double(), 1e-20);
  EXPECT_LT(tu::rel(mo.coefficient(0), Real(4L, kP) / Real(1.5, kP)), 1e-70);
}

TEST(Catalog, ExplicitPadsAndTruncates) {
  const auto e = catalog_coefficients(ExplicitCoefficients{{R(1), R(2), R(3)}}, 2, 4, kP);
  ASSERT_EQ(e.size(), 5U);
  EXPECT_TRUE(e.coefficient(4).is_zero());
  EXPECT_EQ(catalog_coefficients(ExplicitCoefficients{{R(1), R(2), R(3)}}, 2, 1, kP).size(), 2U);
}

TEST(Catalog, NamedParameterErrors) {
  try {
    catalog_coefficients(Multiquadric{R(1), R(1)}, 2, 5, kP);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("delta"), std::string::npos);
  }
  EXPECT_THROW(validate(Gaussian{R(0)}), DomainError);
  EXPECT_THROW(validate(Moller{R(1), R(-1), R(1), R(1)}), DomainError);
  EXPECT_THROW(catalog_coefficients(Gaussian{R(1)}, 2, 5, kP), DomainError);
}

TEST(Multiquadric, GeneratingFunctionOracle) {
  // sum_n c_n P_n^m(t) must reproduce the pointwise multiquadric.
  tu::Rng rng(3);
  for (int m = 2; m <= 5; ++m) {
    const Multiquadric mq{R(1.3), R(0.4)};
    const auto e = catalog_coefficients(mq, m, 160, kP);
    const auto f = multiquadric_pointwise(mq, m);
    for (int i = 0; i < 6; ++i) {
      const Real t(rng.uniform(-1, 1), kP);
      EXPECT_LT(tu::rel(evaluate(e, t), f.f(t)), 1e-50) << "m=" << m;
    }
  }
}

TEST(Projection, TrivialFunctions) {
  for (int m = 2; m <= 5; ++m) {
    const auto one = project_zonal(PointwiseZonal{[](const Real& t) { return Real(1L, t.precision()); }}, m, 6, kP, 10);
    EXPECT_LT(abs(one.coefficient(0) - 1L).to_double(), 1e-70);
    for (unsigned long n = 1; n <= 6; ++n) EXPECT_LT(abs(one.coefficient(n)).to_double(), 1e-70);
    const auto lin = project_zonal(PointwiseZonal{[](const Real& t) { return t; }}, m, 6, kP, 10);
    EXPECT_LT(abs(lin.coefficient(1) - 1L).to_double(), 1e-70);
    EXPECT_LT(abs(lin.coefficient(0)).to_double(), 1e-70);
    EXPECT_EQ(lin.provenance(), Provenance::projected);
  }
}

TEST(Projection, MatchesMultiquadricClosedForm) {
  const Multiquadric mq{R(1), R(0.5)};
  const auto closed = catalog_coefficients(mq, 2, 30, kP);
  const auto proj = project_zonal(multiquadric_pointwise(mq, 2), 2, 30, kP, 128);
  for (unsigned long n = 0; n <= 30; ++n) EXPECT_LT(tu::rel(proj.coefficient(n), closed.coefficient(n)), 1e-25);
}

TEST(Projection, RecoversExpansionRoundTrip) {
  // project_zonal(sum c_n P_n) = c for random c, every m.
  tu::Rng rng(21);
  for (int m = 2; m <= 6; ++m) {
    const auto c = tu::random_coeffs(rng, 9, kP, true);
    const LegendreExpansion e(m, c, Provenance::closed_form);
    const auto back = project_zonal([&](const Real& t) { return evaluate(e, t); }, m, 8, quadrature_rule(m, 12, kP));
    for (unsigned long n = 0; n <= 8; ++n) EXPECT_LT(abs(back.coefficient(n) - c[n]).to_double(), 1e-65);
  }
}

TEST(Projection, RejectsAliasing) {
  const PointwiseZonal f{[](const Real& t) { return t; }};
  EXPECT_THROW(project_zonal(f, 2, 10, kP, 10), DomainError);
  EXPECT_THROW(project_zonal(f.f, 2, 10, quadrature_rule(2, 5, kP)), DomainError);
}

TEST(PowerToCondensed, Examples) {
  const std::vector<Real> one{R(1)};
  EXPECT_EQ(power_to_condensed(one, 3, kP).coefficient(0).to_double(), 1.0);
  const std::vector<Real> lin{R(0), R(1)};
  const auto l = power_to_condensed(lin, 4, kP);
  EXPECT_TRUE(l.coefficient(0).is_zero());
  EXPECT_EQ(l.coefficient(1).to_double(), 1.0);
  const std::vector<Real> sq{R(0), R(0), R(1)};
  const auto s = power_to_condensed(sq, 2, kP);
  EXPECT_LT(tu::rel(s.coefficient(0), Real(1L, kP) / 3L), 1e-70);
  EXPECT_TRUE(s.coefficient(1).is_zero());
  EXPECT_LT(tu::rel(s.coefficient(2), Real(2L, kP) / 3L), 1e-70);
  EXPECT_EQ(s.provenance(), Provenance::converted);
}

TEST(PowerToCondensed, AgreesWithDirectPolynomial) {
  tu::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const std::size_t deg = 1 + rng.below(15);
    const auto b = tu::random_coeffs(rng, deg + 1, kP, true);
    const auto e = power_to_condensed(b, m, kP);
    for (int i = 0; i < 4; ++i) {
      const Real t(rng.uniform(-1, 1), kP);
      Real direct(kP);
      for (std::size_t n = b.size(); n-- > 0;) direct = direct * t + b[n];
      EXPECT_LT(abs(evaluate(e, t) - direct).to_double(), 1e-65);
    }
  }
}

TEST(Gaussian, PowerSeriesMatchesPointwise) {
  const Gaussian g{R(1.5)};
  const auto dp = gaussian_power_series(g);
  const auto f = gaussian_pointwise(g);
  for (double td : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    const Real t(td, kP);
    Real acc(kP);
    Real tn(1L, kP);
    for (unsigned long n = 0; n < 200; ++n) {
      acc += dp.b(n, kP) * tn;
      tn *= t;
    }
    EXPECT_LT(tu::rel(acc, f.f(t)), 1e-70);
  }
}

TEST(Gaussian, DualPathAgreement) {
  for (int m = 2; m <= 4; ++m) {
    const Gaussian g{R(1)};
    const auto series = expand(g, m, 20, kP);
    const auto proj = project_zonal(gaussian_pointwise(g), m, 20, kP, 64);
    for (unsigned long n = 0; n <= 20; ++n) EXPECT_LT(tu::rel(series.coefficient(n), proj.coefficient(n)), 1e-40);
  }
}

TEST(Gaussian, ExpandIsPositiveAndDecreasing) {
  // Condensed values c_n / d_n fall with n; the c_n themselves need not.
  const auto e = expand(Gaussian{R(0.5)}, 3, 40, kP);
  for (unsigned long n = 1; n <= 40; ++n) {
    EXPECT_GT(e.coefficient(n), 0L);
    EXPECT_LT(e.coefficient(n) / dim_harmonic(n, 3), e.coefficient(n - 1) / dim_harmonic(n - 1, 3));
  }
}

TEST(DotProduct, PolynomialDegree) {
  const DotProduct dp{[](unsigned long n, Precision p) { return n <= 2 ? Real(1L, p) : Real(p); }, "poly", 2UL};
  const auto e = expand(dp, 2, 5, kP);
  ASSERT_EQ(e.size(), 6U);
  // 1 + t + t^2 = (4/3) P_0 + P_1 + (2/3) P_2.
  EXPECT_LT(tu::rel(e.coefficient(0), Real(4L, kP) / 3L), 1e-70);
  EXPECT_EQ(e.coefficient(1).to_double(), 1.0);
  EXPECT_LT(tu::rel(e.coefficient(2), Real(2L, kP) / 3L), 1e-70);
  EXPECT_TRUE(e.coefficient(5).is_zero());
}

TEST(DotProduct, GeometricSeriesNeedsNoTailCap) {
  // b_n = 0.8^n: K(t) = 1/(1 - 0.8 t), checked pointwise.
  const DotProduct dp{[](unsigned long n, Precision p) { return pow(Real(0.8, p), static_cast<long>(n)); }, "geo", std::nullopt};
  const auto e = expand(dp, 2, 30, Precision{128});
  EXPECT_GT(e.coefficient(30), 0L);
  const Real t(0.25, Precision{128});
  const Real want = Real(1L, Precision{128}) / (Real(1L, Precision{128}) - Real(0.8, Precision{128}) * t);
  // Truncation at N = 30 leaves roughly 0.8^30 relative.
  EXPECT_LT(tu::rel(evaluate(e, t), want), 1e-2);
}

TEST(RatioTest, Examples) {
  const auto g = ratio_test(Gaussian{R(1)}, 60, kP);
  EXPECT_TRUE(g.below_one);
  EXPECT_LT(g.extrapolated.to_double(), 2e-3);
  const DotProduct half{[](unsigned long n, Precision p) { return pow(Real(0.5, p), static_cast<long>(n)); }, "half", std::nullopt};
  const auto h = ratio_test(half, 40, kP);
  EXPECT_LT(abs(h.extrapolated - Real(0.5, kP)).to_double(), 1e-60);
  EXPECT_TRUE(h.below_one);
  const DotProduct ones{[](unsigned long, Precision p) { return Real(1L, p); }, "ones", std::nullopt};
  const auto o = ratio_test(ones, 40, kP);
  EXPECT_EQ(o.extrapolated.to_double(), 1.0);
  EXPECT_FALSE(o.below_one);
  const DotProduct bad{[](unsigned long n, Precision p) { return Real(n == 3 ? 0L : 1L, p); }, "bad", std::nullopt};
  EXPECT_THROW(ratio_test(bad, 10, kP), DomainError);
  EXPECT_THROW(ratio_test(Optimality{}, 10, kP), DomainError);
}

TEST(Schoenberg, Examples) {
  EXPECT_TRUE(schoenberg_check(catalog_coefficients(Optimality{}, 2, 50, kP)).positive_definite);
  const auto bad = schoenberg_check(LegendreExpansion(2, {R(1), R(-1)}, Provenance::closed_form));
  EXPECT_FALSE(bad.positive_definite);
  EXPECT_EQ(*bad.first_violation, 1UL);
  EXPECT_TRUE(schoenberg_check(expand(Gaussian{R(1)}, 2, 30, kP)).positive_definite);
}

TEST(Schoenberg, CatalogFamiliesAcrossParameters) {
  tu::Rng rng(99);
  for (int i = 0; i < 30; ++i) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const Precision p{128};
    EXPECT_TRUE(schoenberg_check(expand(Gaussian{Real(rng.uniform(0.2, 5), p)}, m, 25, p)).positive_definite);
    EXPECT_TRUE(schoenberg_check(expand(Multiquadric{Real(rng.uniform(0.1, 3), p), Real(rng.uniform(0.01, 0.99), p)},
                                        m, 25, p))
                    .positive_definite);
    EXPECT_TRUE(schoenberg_check(expand(Moller{Real(rng.uniform(0.5, 5), p), Real(rng.uniform(0.1, 3), p),
                                               Real(rng.uniform(0.5, 2), p), Real(rng.uniform(0.1, 3), p)},
                                        m, 25, p))
                    .positive_definite);
    EXPECT_TRUE(schoenberg_check(expand(Optimality{}, m, 25, p)).positive_definite);
  }
}

TEST(Reconstruction, ErrorShrinksWithTruncation) {
  const Multiquadric mq{R(1), R(0.6)};
  const auto f = multiquadric_pointwise(mq, 3);
  const auto full = catalog_coefficients(mq, 3, 80, kP);
  Real prev_err(kP);
  bool first = true;
  for (unsigned long N : {5UL, 10UL, 20UL, 40UL, 80UL}) {
    const auto e = full.truncated(N);
    Real err(kP);
    for (double td : {-1.0, -0.5, 0.0, 0.5, 0.9, 1.0}) err = max(err, abs(f.f(Real(td, kP)) - evaluate(e, Real(td, kP))));
    Real tail(kP);
    for (unsigned long n = N + 1; n <= 80; ++n) tail += abs(full.coefficient(n));
    // |P_n| <= 1, so the coefficient tail bounds the pointwise error.
    if (N <= 40) {
      EXPECT_LE(err, tail * Real(1.0001, kP));
    }
    if (!first) {
      EXPECT_LT(err, prev_err);
    }
    first = false;
    prev_err = err;
  }
}

TEST(Expansion, TruncationBeyondLevelsRejected) {
  const auto e = catalog_coefficients(Optimality{}, 2, 5, kP);
  EXPECT_THROW((void)e.truncated(6), DomainError);
  EXPECT_THROW(LegendreExpansion(2, {}, Provenance::closed_form), DomainError);
}
