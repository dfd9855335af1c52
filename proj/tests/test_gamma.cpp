#include <gtest/gtest.h>

#include <cmath>

#include "gammak/gamma.hpp"

using namespace gammak;

namespace {

GammaFunction default_gamma() { return build_gamma(default_gamma_spec()); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(BuildGamma, DefaultConstants) {
  const auto g = default_gamma();
  EXPECT_NEAR(g.c1(), 0.25, 1e-15);
  EXPECT_NEAR(g.c2(), 1.5, 1e-15);
  EXPECT_DOUBLE_EQ(g.x_lin(), 2.0);
}

TEST(BuildGamma, RejectsBadSpecs) {
  EXPECT_THROW(build_gamma({{1.0, 0.5}, {0.2, 0.2}, 2}), std::invalid_argument);
  EXPECT_THROW(build_gamma({{1.0}, {0.4}, 3}), std::invalid_argument);
  EXPECT_THROW(build_gamma({{1.0}, {0.0}, 1}), std::invalid_argument);
  EXPECT_THROW(build_gamma({{-1.0}, {0.2}, 1}), std::invalid_argument);
  EXPECT_THROW(build_gamma({{1.0, 2.0}, {0.2}, 1}), std::invalid_argument);
  EXPECT_THROW(build_gamma({{}, {}, 1}), std::invalid_argument);
}

TEST(Eval, Examples) {
  const auto g = default_gamma();
  EXPECT_EQ(g(0.0), 0.0);
  EXPECT_NEAR(g(2.0), 2.0, 1e-14);
  EXPECT_NEAR(g(std::nextafter(2.0, 0.0)), 2.0, 1e-14);
  EXPECT_NEAR(g(std::nextafter(2.0, 3.0)), 2.0, 1e-14);
  EXPECT_DOUBLE_EQ(GammaFunction::affine(2.0, 1.0)(3.0), 7.0);
  EXPECT_THROW(g(-0.1), std::domain_error);
}

TEST(Eval, ZeroForEverySpec) {
  for (const GammaSpec& s : {GammaSpec{{0.5, 2.0}, {0.3, 0.2}, 2}, GammaSpec{{3.0}, {0.1}, 3}})
    EXPECT_NEAR(build_gamma(s)(0.0), 0.0, 1e-15);
}

TEST(Eval, StrictlyIncreasing) {
  for (const GammaSpec& s : {default_gamma_spec(), GammaSpec{{0.5, 2.0}, {0.3, 0.2}, 2}}) {
    const auto g = build_gamma(s);
    double prev = g(0.0);
    for (int i = 1; i <= 4000; ++i) {
      const double v = g(i * 0.0025);
      ASSERT_GT(v, prev) << "x = " << i * 0.0025;
      prev = v;
    }
  }
}

TEST(Inverse, RoundTrip) {
  const auto g = default_gamma();
  for (double x : {1e-6, 0.01, 0.3, 0.999, 1.0, 1.001, 1.7, 2.0, 2.5, 40.0}) {
    const double back = g.inverse(g(x));
    EXPECT_LE(std::abs(back - x), 1e-10 * std::max(1.0, x)) << x;
  }
  EXPECT_NEAR(g.inverse(2.0), 2.0, 1e-14);
  EXPECT_THROW(g.inverse(-1.0), std::domain_error);
}

TEST(Inverse, Sandwich) {
  const auto g = default_gamma();
  const double a1 = 1.0, ga = g(a1), slope = g.slope_at_zero();
  for (int i = 0; i <= 200; ++i) {
    const double y = ga * i / 200.0;
    const double x = g.inverse(y);
    EXPECT_LE(a1 / ga * y, x + 1e-12);
    EXPECT_LE(x, y / slope + 1e-12);
  }
}

TEST(TangentSecant, Sandwich) {
  const auto g = default_gamma();
  const double slope = g.slope_at_zero(), ga = g(1.0);
  for (int i = 0; i <= 200; ++i) {
    const double x = i / 200.0;
    EXPECT_LE(slope * x, g(x) + 1e-12);
    EXPECT_LE(g(x), ga * x + 1e-12);
  }
}

TEST(Derivative, Examples) {
  const auto g = default_gamma();
  EXPECT_DOUBLE_EQ(GammaFunction::affine(2.0, 1.0).derivative(5.0, 1), 2.0);
  EXPECT_NEAR(g.derivative(0.5, 1), 0.25 * std::pow(0.5, -0.75), 1e-14);
  EXPECT_DOUBLE_EQ(g.derivative(3.0, 1), 0.25);
  EXPECT_DOUBLE_EQ(g.derivative(3.0, 2), 0.0);
  EXPECT_THROW(g.derivative(1.0, 1), SingularPointError);
}

TEST(Derivative, MatchesCentralDifferences) {
  const auto g = default_gamma();
  for (int i = 1; i < 100; ++i) {
    const double x = 0.02 * i + 0.005;
    if (std::abs(x - 1.0) < 0.02 || std::abs(x - 2.0) < 0.02) continue;
    const double e = 1e-6 * std::max(x, 0.01);
    const double fd = (g(x + e) - g(x - e)) / (2 * e);
    EXPECT_LE(rel(g.derivative(x, 1), fd), 1e-6) << x;
  }
}

TEST(Derivative, C1Join) {
  const auto g = default_gamma();
  EXPECT_NEAR(g.derivative(2.0 - 1e-9, 1), g.c1(), 1e-9);
}

TEST(InverseDerivative, Affine) {
  const auto g = GammaFunction::affine(2.0, 1.0);
  EXPECT_DOUBLE_EQ(g.inverse_derivative(4.0, 1).value, 0.5);
  EXPECT_DOUBLE_EQ(g.inverse_derivative(4.0, 2).value, 0.0);
}

TEST(InverseDerivative, VanishesAtSingularImage) {
  const auto g = default_gamma();
  const double y = g(1.0);
  for (int r = 2; r <= 3; ++r) {
    EXPECT_EQ(g.inverse_derivative(y, r).value, 0.0);
    EXPECT_LE(std::abs(g.inverse_derivative(y + 1e-6, r).value), 1e-3);
    EXPECT_LE(std::abs(g.inverse_derivative(y - 1e-6, r).value), 1e-3);
  }
}

TEST(InverseDerivative, MatchesFiniteDifferences) {
  const auto g = default_gamma();
  for (double y : {0.3, 0.7, 1.25, 1.6, 1.9}) {
    const double e = 1e-3;
    const double fd2 = (g.inverse(y + e) - 2 * g.inverse(y) + g.inverse(y - e)) / (e * e);
    EXPECT_LE(rel(g.inverse_derivative(y, 2).value, fd2), 1e-4) << y;
    const double e1 = 1e-6;
    const double fd1 = (g.inverse(y + e1) - g.inverse(y - e1)) / (2 * e1);
    EXPECT_LE(rel(g.inverse_derivative(y, 1).value, fd1), 1e-6) << y;
  }
}

TEST(InverseDerivative, BreakpointFlag) {
  const auto g = default_gamma();
  const auto d = g.inverse_derivative(g(2.0), 2);
  EXPECT_TRUE(d.breakpoint);
  EXPECT_DOUBLE_EQ(d.value, 0.0);
  EXPECT_FALSE(g.inverse_derivative(1.5, 2).breakpoint);
  EXPECT_THROW(g.inverse_derivative(1.5, 4), std::invalid_argument);
}

TEST(InverseDerivative, CramerFirstOrders) {
  // (g^{-1})'' = -g''/g'^3, (g^{-1})''' = (3 g''^2 - g' g''') / g'^5.
  const double d[3] = {2.0, 0.5, -0.25};
  EXPECT_NEAR(cramer_inverse_derivative(d, 1), 0.5, 1e-15);
  EXPECT_NEAR(cramer_inverse_derivative(d, 2), -0.5 / 8.0, 1e-15);
  EXPECT_NEAR(cramer_inverse_derivative(d, 3), (3 * 0.25 + 0.5) / 32.0, 1e-14);
}
