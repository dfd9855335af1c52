#include <gtest/gtest.h>

#include <cmath>

#include "gammak/catalog.hpp"
#include "gammak/kfunctional.hpp"

using namespace gammak;

namespace {

const GammaFunction& G() {
  static const GammaFunction g = build_gamma(default_gamma_spec());
  return g;
}

AnalysisConfig cfg() {
  AnalysisConfig c;
  c.constants = default_constants(G());
  return c;
}

const LpExponent P2 = LpExponent::finite(2.0);
const LpExponent PI = LpExponent::infinity();

double horizon(int r) {
  return max_time_horizon(G(), r, 1.0, 0.125, HorizonVariant::upper_construction);
}

RealFunction fn(const std::string& id) { return catalog_function(id, G()).fn; }

}  // namespace

TEST(RestrictedK, ZeroForLowDegreeGammaPolynomials) {
  for (int r = 1; r <= 2; ++r)
    for (int m = 0; m < r; ++m)
      for (auto p : {P2, PI}) {
        const auto k = restricted_k_upper(fn("gamma_poly_" + std::to_string(m)), G(), r, horizon(r) / 2, p,
                                          0.0, cfg());
        EXPECT_LE(k.value, 1e-10) << r << " " << m;
      }
}

TEST(RestrictedK, BoundedByZeroCandidate) {
  const auto f = fn("abs_pow_2beta");
  const auto c = cfg();
  const double t = horizon(1) / 3;
  const auto k = restricted_k_upper(f, G(), 1, t, P2, 0.0, c);
  double zero = 0.0;
  for (double h : c.h_grid(t)) {
    const auto w = window_interval(G(), 1, h, 1.0, 0.125);
    zero = std::max(zero, weighted_norm([&](double x) { return f(x); }, 0.0,
                                        NormSpec{P2, w.lo, std::min(w.hi, c.x_cut(0.0))}, c.quad, f.kinks));
  }
  EXPECT_LE(k.value, zero * (1 + 1e-10));
  EXPECT_NEAR(k.value, k.approx_error_term + k.seminorm_term, 1e-15 * k.value);
}

TEST(RestrictedK, BoundedBySeminormCandidate) {
  const auto f = fn("exp");
  const auto c = cfg();
  const double t = horizon(1) / 3;
  const auto k = restricted_k_upper(f, G(), 1, t, P2, 1.0, c);
  double semi = 0.0;
  for (double h : c.h_grid(t)) {
    const auto w = window_interval(G(), 1, h, 1.0, 0.125);
    semi = std::max(semi, gamma_seminorm(f, G(), 1, P2, 1.0, w.lo, std::min(w.hi, c.x_cut(1.0)), c.quad));
  }
  EXPECT_LE(k.value, t * semi * (1 + 1e-10));
}

TEST(RestrictedK, CandidateRemovalNeverHelps) {
  const auto f = fn("abs_pow_beta");
  const double t = horizon(2) / 2;
  KOptions all, fewer;
  fewer.candidates.steklov = false;
  fewer.candidates.steklov_local = false;
  for (auto p : {P2, PI}) {
    const double a = restricted_k_upper(f, G(), 2, t, p, 0.0, cfg(), all).value;
    const double b = restricted_k_upper(f, G(), 2, t, p, 0.0, cfg(), fewer).value;
    EXPECT_LE(a, b * (1 + 1e-12));
  }
}

TEST(RestrictedK, RejectsTBeyondHorizon) {
  EXPECT_THROW(restricted_k_upper(fn("exp"), G(), 1, 2 * horizon(1), P2, 0.0, cfg()), std::domain_error);
  EXPECT_THROW(full_k_upper(fn("exp"), G(), 1, -1.0, P2, 0.0, cfg()), std::invalid_argument);
}

TEST(RestrictedK, BatchMatchesSingleCalls) {
  const auto f = fn("xexp");
  const double t = horizon(1) / 2;
  SteklovCache cache;
  const auto batch = restricted_k_upper_batch(f, G(), 1, t, {{P2, 0.0}, {PI, 1.0}}, cfg(), {}, &cache);
  ASSERT_EQ(batch.size(), 2u);
  EXPECT_NEAR(batch[0].value, restricted_k_upper(f, G(), 1, t, P2, 0.0, cfg()).value, 1e-9 * batch[0].value);
  EXPECT_NEAR(batch[1].value, restricted_k_upper(f, G(), 1, t, PI, 1.0, cfg()).value, 1e-9 * batch[1].value);
}

TEST(FullK, ZeroCases) {
  for (int r = 1; r <= 2; ++r) {
    EXPECT_LE(full_k_upper(fn("zero"), G(), r, horizon(r) / 2, P2, 0.0, cfg()).value, 1e-10);
    for (int m = 0; m < r; ++m)
      EXPECT_LE(full_k_upper(fn("gamma_poly_" + std::to_string(m)), G(), r, horizon(r) / 2, PI, 1.0, cfg()).value,
                1e-10);
  }
}

TEST(FullK, BoundedByWeightedNorm) {
  for (const char* id : {"exp", "abs_pow_2beta", "xexp"}) {
    const auto f = fn(id);
    const auto k = full_k_upper(f, G(), 1, horizon(1) / 2, P2, 0.0, cfg());
    const double n = weighted_lp_norm(f, {0.0}, {P2});
    EXPECT_LE(k.value, n * (1 + 1e-8)) << id;
    EXPECT_GT(k.value, 0.0);
  }
}

TEST(FullK, GluedCandidateIsEvaluated) {
  const auto f = fn("abs_pow_beta");
  KOptions only;
  only.candidates = CandidateSet{false, false, false, false, false, true};
  const auto k = full_k_upper(f, G(), 1, horizon(1) / 2, P2, 0.0, cfg(), only);
  EXPECT_EQ(k.candidate_id, "glued");
  EXPECT_TRUE(std::isfinite(k.value));
  EXPECT_GT(k.value, 0.0);
}

TEST(Seminorm, ClosedFormForExp) {
  // e^{-x} on the linear branch: f_gamma' = -e^{-x} / c1, phi = sqrt(x), alpha = 0, p = 1.
  const double lo = 3.0, hi = 5.0;
  const double v = gamma_seminorm(fn("exp"), G(), 1, LpExponent::finite(1.0), 0.0, lo, hi, {});
  auto F = [](double x) { return -0.5 * std::sqrt(x) * std::exp(-2 * x) - std::sqrt(M_PI / 2) / 4 * std::erfc(std::sqrt(2 * x)); };
  // int sqrt(x) e^{-2x} dx = -sqrt(x) e^{-2x}/2 - sqrt(pi/2)/4 erfc(sqrt(2x)) (up to a constant).
  const double want = 4.0 * (F(hi) - F(lo));
  EXPECT_NEAR(v / want, 1.0, 1e-9);
}

TEST(Identity, OrderOne) {
  const double h = 0.02;
  for (double x : {0.3, 0.8, 1.5, 4.0}) {
    const double s = G().inverse(h) * std::sqrt(x);
    const auto lin = make_function("x", [](double y) { return y; }, [](double, int k) { return k == 1 ? 1.0 : 0.0; }, 4);
    auto id = difference_integral_identity_check(lin, G(), 1, h, x);
    EXPECT_NEAR(id.lhs, s, 1e-14);
    EXPECT_NEAR(id.rhs / id.lhs, 1.0, 1e-6);
    for (const char* name : {"exp"}) {
      id = difference_integral_identity_check(fn(name), G(), 1, h, x);
      EXPECT_NEAR(id.rhs / id.lhs, 1.0, 1e-6) << name << " " << x;
    }
  }
  const auto c = difference_integral_identity_check(constant_function(2.0), G(), 1, h, 0.5);
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_NEAR(c.rhs, 0.0, 1e-15);
}

TEST(Identity, OrderTwoSquare) {
  const auto sq = make_function("x2", [](double y) { return y * y; },
                                [](double y, int k) { return k == 1 ? 2 * y : k == 2 ? 2.0 : 0.0; }, 4);
  for (double x : {0.4, 1.2, 3.0}) {
    const auto id = difference_integral_identity_check(sq, G(), 2, 0.03, x);
    const double s = G().inverse(0.03) * std::sqrt(x);
    EXPECT_NEAR(id.lhs, 2 * s * s, 1e-13);
    EXPECT_NEAR(id.rhs / id.lhs, 1.0, 1e-6);
  }
  EXPECT_THROW(difference_integral_identity_check(sq, G(), 3, 0.03, 1.0), std::invalid_argument);
}

TEST(Cache, SharedAcrossCalls) {
  SteklovCache cache;
  const auto f = fn("abs_pow_beta");
  const double t = horizon(1) / 2;
  restricted_k_upper(f, G(), 1, t, P2, 0.0, cfg(), {}, &cache);
  const auto n = cache.size();
  EXPECT_GT(n, 0u);
  restricted_k_upper(f, G(), 1, t, P2, 0.0, cfg(), {}, &cache);
  EXPECT_EQ(cache.size(), n);
}
