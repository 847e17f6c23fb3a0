#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spherespec/harmonics.hpp"
#include "test_util.hpp"

using namespace spherespec;

namespace {

// (2n+m-1)(n+m-2)! / (n!(m-1)!) from factorials.
BigInt dim_by_factorials(unsigned long n, int m) {
  BigInt a, b, c;
  mpz_fac_ui(a.get_mpz_t(), n + m - 2);
  mpz_fac_ui(b.get_mpz_t(), n);
  mpz_fac_ui(c.get_mpz_t(), m - 1);
  BigInt num = a * (2 * n + m - 1);
  return num / (b * c);
}

}  // namespace

TEST(Dimensions, Examples) {
  for (int m = 2; m <= 7; ++m) EXPECT_EQ(dim_harmonic(0, m), 1);
  EXPECT_EQ(dim_harmonic(3, 2), 7);
  EXPECT_EQ(dim_harmonic(2, 3), 9);
  for (int m = 2; m <= 7; ++m) EXPECT_EQ(cum_dim(0, m), 1);
  EXPECT_EQ(cum_dim(3, 2), 16);
  // d_0^3 + d_1^3 + d_2^3 = 1 + 4 + 9.
  EXPECT_EQ(cum_dim(2, 3), 14);
}

TEST(Dimensions, RecurrenceAndClosedForms) {
  for (int m = 2; m <= 6; ++m) {
    BigInt running = 0;
    for (unsigned long n = 0; n <= 50; ++n) {
      running += dim_harmonic(n, m);
      EXPECT_EQ(cum_dim(n, m), running);
      EXPECT_EQ(dim_harmonic(n, m), dim_by_factorials(n, m));
      const BigInt prev = n == 0 ? BigInt(0) : cum_dim(n - 1, m);
      EXPECT_EQ(cum_dim(n, m) - prev, dim_harmonic(n, m));
    }
  }
  for (unsigned long n = 0; n <= 1000; ++n) {
    EXPECT_EQ(dim_harmonic(n, 2), 2 * n + 1);
    EXPECT_EQ(cum_dim(n, 2), (n + 1) * (n + 1));
    EXPECT_EQ(dim_harmonic(n, 3), (n + 1) * (n + 1));
  }
}

TEST(Dimensions, RejectsSmallM) {
  EXPECT_THROW(dim_harmonic(1, 1), DomainError);
  EXPECT_THROW(SphereDim(0), DomainError);
  EXPECT_EQ(SphereDim(2).delta(), 2);
  EXPECT_EQ(SphereDim(3).delta(), 1);
  EXPECT_EQ(SphereDim(6).delta(), 1);
}

TEST(Legendre, Examples) {
  const Precision p{256};
  for (int m = 2; m <= 6; ++m) {
    for (unsigned long n = 0; n <= 30; ++n) EXPECT_EQ(legendre_eval(n, m, Real(1L, p)).to_double(), 1.0);
    EXPECT_EQ(legendre_eval(1, m, Real(0.375, p)).to_double(), 0.375);
  }
  EXPECT_EQ(legendre_eval(2, 2, Real(p)).to_double(), -0.5);
  EXPECT_THROW(legendre_eval(2, 2, Real(1.0000001, p)), DomainError);
}

TEST(Legendre, ClassicalAndChebyshevOracles) {
  const Precision p{256};
  tu::Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    const double td = rng.uniform(-1, 1);
    const Real t(td, p);
    // m = 2: P_3 = (5t^3 - 3t)/2, P_4 = (35t^4 - 30t^2 + 3)/8.
    const Real p3 = (5L * t * t * t - 3L * t) / 2L;
    const Real p4 = (35L * pow(t, 4L) - 30L * t * t + Real(3L, p)) / 8L;
    EXPECT_LT(tu::rel(legendre_eval(3, 2, t), p3), 1e-70);
    EXPECT_LT(abs(legendre_eval(4, 2, t) - p4).to_double(), 1e-70);
    // m = 3: P_n(cos th) = sin((n+1) th) / ((n+1) sin th).
    const double th = std::acos(td);
    for (unsigned long n : {2UL, 5UL, 9UL}) {
      const double expect = std::sin((n + 1) * th) / ((n + 1) * std::sin(th));
      EXPECT_NEAR(legendre_eval(n, 3, t).to_double(), expect, 1e-12);
    }
  }
}

TEST(Legendre, BoundedByOne) {
  const Precision p{192};
  tu::Rng rng(5);
  const Real bound = Real(1L, p) + pow2(-172, p);
  for (int i = 0; i < 200; ++i) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const Real t(rng.uniform(-1, 1), p);
    const auto tab = legendre_table(60, m, t);
    for (const auto& v : tab) EXPECT_LE(abs(v), bound);
  }
}

TEST(Quadrature, WeightSums) {
  const Precision p{256};
  for (unsigned order : {1U, 2U, 7U, 30U}) {
    EXPECT_LT(tu::rel(quadrature_rule(2, order, p).integrate([&](const Real&) { return Real(1L, p); }),
                           Real(2L, p)),
              1e-70);
  }
  // m = 3: integral of sqrt(1-t^2); oracle is a composite Simpson rule in theta.
  const int panels = 4000;
  double simpson = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double th = std::numbers::pi * i / panels;
    const double f = std::sin(th) * std::sin(th);
    simpson += f * (i == 0 || i == panels ? 1 : (i % 2 ? 4 : 2));
  }
  simpson *= std::numbers::pi / panels / 3.0;
  for (unsigned order : {3U, 10U, 25U}) {
    const auto rule = quadrature_rule(3, order, p);
    Real s(p);
    for (const auto& w : rule.weights) s += w;
    EXPECT_NEAR(s.to_double(), simpson, 1e-12);
    EXPECT_LT(tu::rel(s, pi(p) / 2L), 1e-70);
  }
}

TEST(Quadrature, ExactOnMonomials) {
  const Precision p{256};
  for (int m = 2; m <= 6; ++m) {
    const unsigned order = 12;
    const auto rule = quadrature_rule(m, order, p);
    for (unsigned long j = 0; j <= order - 1; ++j) {
      // integral of t^(2j) (1-t^2)^a = B(j + 1/2, a + 1), a = (m-2)/2.
      const Real a = Real(static_cast<long>(m - 2), p) / 2L;
      const Real half(0.5, p);
      const Real exact = gamma(Real(j, p) + half) * gamma(a + 1L) / gamma(Real(j, p) + a + Real(1.5, p));
      const Real got = rule.integrate([&](const Real& t) { return pow(t, static_cast<long>(2 * j)); });
      EXPECT_LT(tu::rel(got, exact), 1e-60) << "m=" << m << " j=" << j;
      const Real odd = rule.integrate([&](const Real& t) { return pow(t, static_cast<long>(2 * j + 1)); });
      EXPECT_LT(abs(odd).to_double(), 1e-60);
    }
  }
  EXPECT_LT(tu::rel(quadrature_rule(2, 2, p).integrate([](const Real& t) { return t * t; }),
                         Real(2L, p) / 3L),
            1e-70);
}

TEST(Quadrature, StructureOrthogonalityAndNorms) {
  const Precision p{256};
  for (int m = 2; m <= 6; ++m) {
    const unsigned order = 16;
    const auto rule = quadrature_rule(m, order, p);
    ASSERT_EQ(rule.nodes.size(), order);
    for (unsigned i = 0; i < order; ++i) {
      EXPECT_GT(rule.weights[i], 0L);
      EXPECT_LT(abs(rule.nodes[i]), 1L);
      if (i > 0) {
        EXPECT_LT(rule.nodes[i - 1], rule.nodes[i]);
      }
    }
    const Real W = zonal_weight_total(m, p);
    const Real tol = pow2(-236, p);
    for (unsigned long n = 0; n < order; ++n) {
      const Real nn = rule.integrate([&](const Real& t) { return pow(legendre_eval(n, m, t), 2L); });
      EXPECT_LT(tu::rel(nn / W, Real(1L, p) / dim_harmonic(n, m)), 1e-65) << "m=" << m << " n=" << n;
      for (unsigned long k = 0; k < n; ++k) {
        const Real nk = rule.integrate([&](const Real& t) { return legendre_eval(n, m, t) * legendre_eval(k, m, t); });
        EXPECT_LE(abs(nk), tol * nn);
      }
    }
  }
}

TEST(Quadrature, HighOrder) {
  const auto rule = quadrature_rule(4, 200, Precision{128});
  Real s(Precision{128});
  for (const auto& w : rule.weights) s += w;
  EXPECT_LT(tu::rel(s, zonal_weight_total(4, Precision{128})), 1e-30);
}

TEST(Quadrature, RejectsOrderZero) { EXPECT_THROW(quadrature_rule(2, 0), DomainError); }

TEST(Sphere, AreaAndWeightTotal) {
  const Precision p{128};
  EXPECT_LT(tu::rel(sphere_area(2, p), 4L * pi(p)), 1e-35);
  EXPECT_LT(tu::rel(zonal_weight_total(2, p), Real(2L, p)), 1e-35);
  // omega_m / omega_(m-1) for m = 4.
  EXPECT_LT(tu::rel(zonal_weight_total(4, p), sphere_area(4, p) / sphere_area(3, p)), 1e-35);
}
