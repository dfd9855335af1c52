#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gammak/weights.hpp"

using namespace gammak;

namespace {

const GammaFunction& G() {
  static const GammaFunction g = build_gamma(default_gamma_spec());
  return g;
}

RealFunction constant(double c) { return constant_function(c); }

}  // namespace

TEST(Weight, Examples) {
  EXPECT_DOUBLE_EQ(weight_eval({0.0}, 0.7), std::exp(-0.7));
  EXPECT_DOUBLE_EQ(weight_eval({1.0}, 1.0), std::exp(-1.0));
  EXPECT_LE(weight_eval({2.0}, 1e-12), 1e-23);
  EXPECT_EQ(weight_eval({2.0}, 0.0), 0.0);
  EXPECT_THROW(weight_eval({0.0}, -1.0), std::domain_error);
}

TEST(LpExponentTest, Parse) {
  EXPECT_TRUE(LpExponent::parse("inf").is_infinite());
  EXPECT_DOUBLE_EQ(LpExponent::parse("2").value(), 2.0);
  EXPECT_THROW(LpExponent::parse("0.5"), std::invalid_argument);
  EXPECT_THROW(LpExponent::finite(0.9), std::invalid_argument);
}

TEST(Norm, ClosedForms) {
  const auto one = constant(1.0);
  EXPECT_NEAR(weighted_lp_norm(one, {0.0}, {LpExponent::finite(2.0)}) * std::sqrt(2.0), 1.0, 1e-8);
  EXPECT_NEAR(weighted_lp_norm(one, {1.0}, {LpExponent::finite(1.0)}), 1.0, 1e-8);
  EXPECT_EQ(weighted_lp_norm(constant(0.0), {1.0}, {LpExponent::finite(3.0)}), 0.0);
  EXPECT_NEAR(weighted_lp_norm(one, {1.0}, {LpExponent::infinity()}), std::exp(-1.0), 1e-10);
  // int_0^inf x^2 e^{-2x} = 1/4.
  EXPECT_NEAR(weighted_lp_norm(one, {1.0}, {LpExponent::finite(2.0)}), 0.5, 1e-8);
}

TEST(Norm, DomainMonotone) {
  const auto f = make_function("s", [](double x) { return std::sin(3 * x) + 0.2; });
  for (auto p : {LpExponent::finite(1.0), LpExponent::finite(2.0), LpExponent::infinity()}) {
    const double inner = weighted_lp_norm(f, {1.0}, {p, 0.5, 2.0});
    const double outer = weighted_lp_norm(f, {1.0}, {p, 0.2, 6.0});
    EXPECT_LE(inner, outer * (1 + 1e-12));
  }
}

TEST(Norm, HomogeneityAndTriangle) {
  const auto f = make_function("f", [](double x) { return std::cos(x); });
  const auto h = make_function("h", [](double x) { return x - 1.0; });
  const auto sum = make_function("f+h", [](double x) { return std::cos(x) + x - 1.0; });
  const auto scaled = make_function("-3f", [](double x) { return -3 * std::cos(x); });
  for (auto p : {LpExponent::finite(1.0), LpExponent::finite(2.0), LpExponent::finite(3.5),
                 LpExponent::infinity()}) {
    const NormSpec s{p, 0.0, std::numeric_limits<double>::infinity()};
    const double nf = weighted_lp_norm(f, {0.5}, s), nh = weighted_lp_norm(h, {0.5}, s);
    EXPECT_NEAR(weighted_lp_norm(scaled, {0.5}, s), 3 * nf, 1e-8 * nf);
    EXPECT_LE(weighted_lp_norm(sum, {0.5}, s), (nf + nh) * (1 + 1e-10));
  }
}

TEST(Norm, RejectsAlphaBelowMinusOneOverP) {
  EXPECT_THROW(weighted_lp_norm(constant(1.0), {-0.6}, {LpExponent::finite(2.0)}),
               std::invalid_argument);
}

TEST(Norm, NonFiniteSampleReported) {
  const auto bad = make_function("bad", [](double x) { return 1.0 / (x - 1.0); });
  EXPECT_THROW(weighted_lp_norm(bad, {0.0}, {LpExponent::infinity(), 0.5, 1.0}), NonFiniteError);
}

TEST(Norm, QuadratureConvergence) {
  const auto f = make_function("r", [](double x) { return std::pow(std::abs(x - 1.0), 0.3); });
  QuadratureConfig loose, tight;
  loose.rel_tol = 1e-6;
  tight.rel_tol = 5e-7;
  const NormSpec s{LpExponent::finite(2.0)};
  auto res = integrate_decaying([&](double x) { double v = f(x) * std::exp(-x); return v * v; },
                                0.0, std::numeric_limits<double>::infinity(), loose, {1.0});
  const double a = weighted_lp_norm(f, {0.0}, s, loose);
  const double b = weighted_lp_norm(f, {0.0}, s, tight);
  EXPECT_LE(std::abs(a * a - b * b), std::max(res.error, 1e-15));
}

TEST(Window, Example) {
  const double h = G()(0.1);
  const auto w = window_interval(G(), 1, h, 1.0, 0.125);
  EXPECT_NEAR(w.lo, 0.04, 1e-12);
  EXPECT_NEAR(w.hi, 12.5, 1e-9);
}

TEST(Window, AtAdmissibilityBound) {
  for (int r = 1; r <= 3; ++r) {
    const double hb = admissibility_bound(G(), r, 1.0, 0.125);
    const auto w = window_interval(G(), r, hb, 1.0, 0.125);
    EXPECT_LE(w.lo, w.hi * (1 + 1e-12));
    EXPECT_NEAR(w.lo / w.hi, 1.0, 1e-9);
    EXPECT_THROW(window_interval(G(), r, hb * 1.01, 1.0, 0.125), std::domain_error);
  }
}

TEST(Window, ExhaustsAsHShrinks) {
  const auto w = window_interval(G(), 2, 1e-6, 1.0, 0.125);
  EXPECT_LT(w.lo, 1e-9);
  EXPECT_GT(w.hi, 1e9);
}

TEST(WeightBounds, Examples) {
  auto b = weight_equivalence_bounds(1, 1.0, 0.25, 0.0);
  EXPECT_NEAR(b.c_low, std::exp(-0.5), 1e-15);
  EXPECT_NEAR(b.c_high, std::exp(0.5), 1e-15);
  b = weight_equivalence_bounds(1, 1.0, 0.25, 1.0);
  EXPECT_NEAR(b.c_low, std::exp(-0.5) * 0.5, 1e-15);
  EXPECT_NEAR(b.c_high, std::exp(0.5) * 1.5, 1e-15);
  b = weight_equivalence_bounds(3, 1.0, 1e-30, 0.0);
  EXPECT_NEAR(b.c_low, 1.0, 1e-12);
  EXPECT_NEAR(b.c_high, 1.0, 1e-12);
  EXPECT_THROW(weight_equivalence_bounds(1, 0.2, 0.1, 0.0), std::invalid_argument);
}

TEST(WeightBounds, Sampling) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double alpha : {0.0, 1.0})
    for (int r = 1; r <= 2; ++r) {
      const auto b = weight_equivalence_bounds(r, 1.0, 0.125, alpha);
      const double hb = admissibility_bound(G(), r, 1.0, 0.125);
      const LaguerreWeight w{alpha};
      for (int i = 0; i < 1000; ++i) {
        const auto win = window_interval(G(), r, hb * (0.01 + 0.99 * U(rng)), 1.0, 0.125);
        // Beyond a few hundred the weights underflow and the ratio is 0/0.
        const double x = win.lo + (std::min(win.hi, 500.0) - win.lo) * U(rng);
        const double y = x + (2 * U(rng) - 1) * r * win.s * std::sqrt(x);
        const double q = w(y) / w(x);
        EXPECT_LE(b.c_low, q);
        EXPECT_LE(q, b.c_high);
      }
    }
}

TEST(Horizon, Properties) {
  for (int r = 1; r <= 3; ++r) {
    const double up = max_time_horizon(G(), r, 1.0, 0.125, HorizonVariant::upper_construction);
    const double lo = max_time_horizon(G(), r, 1.0, 0.125, HorizonVariant::lower_bound);
    EXPECT_LE(up, 0.5);
    EXPECT_LE(up, admissibility_bound(G(), r, 1.0, 0.125));
    EXPECT_LE(lo, admissibility_bound(G(), r, 1.0, 0.125));
  }
  const double lb = max_time_horizon(G(), 1, 1.0, 0.125, HorizonVariant::lower_bound);
  EXPECT_NEAR(lb, std::min(G()(std::pow(0.125, 0.25) / std::sqrt(2.0)), G()(1.0)), 1e-14);
  EXPECT_NEAR(max_time_horizon(G(), 1, 1.0, 0.125, HorizonVariant::upper_construction), 0.0445572,
              1e-6);
}

TEST(Constants, DefaultsAndPrimed) {
  const auto c = default_constants(G());
  EXPECT_DOUBLE_EQ(c.A1, 1.0);
  EXPECT_DOUBLE_EQ(c.A2, 0.125);
  const auto p = primed_constants(c);
  EXPECT_DOUBLE_EQ(p.A1, 1.5);
  EXPECT_NEAR(p.A2, 2 * 0.125 / 3, 1e-16);
}
