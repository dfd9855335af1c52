#include "gammak/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "gammak/catalog.hpp"
#include "gammak/kfunctional.hpp"

namespace gammak {

namespace {

// A check body returns (measured, detail); it passes when measured <= limit.
using Body = std::function<std::pair<double, std::string>()>;

struct Runner {
  std::string suite;
  std::vector<CheckResult>* out;

  void run(const std::string& name, double limit, const Body& body) {
    CheckResult c;
    c.suite = suite;
    c.name = name;
    c.limit = limit;
    try {
      auto [m, d] = body();
      c.measured = m;
      c.detail = d;
      c.passed = std::isfinite(m) && m <= limit;
    } catch (const std::exception& e) {
      c.measured = std::numeric_limits<double>::infinity();
      c.detail = std::string("exception: ") + e.what();
      c.passed = false;
    }
    out->push_back(c);
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
double relf(double a, double b, double floor) { return std::abs(a - b) / std::max(std::abs(b), floor); }

GammaFunction make_gamma(const VerifyOptions& opt) {
  GammaFunction g = build_gamma(opt.spec);
  if (opt.flip_c1) return GammaFunction::with_constants(opt.spec, -g.c1(), g.c2());
  return g;
}

double bell_recurrence(int n, int k, const std::vector<double>& x) {
  if (n == 0 && k == 0) return 1.0;
  if (n == 0 || k == 0) return 0.0;
  double s = 0.0;
  for (int i = 1; i <= n - k + 1; ++i) s += binomial(n - 1, i - 1) * x[i - 1] * bell_recurrence(n - i, k - 1, x);
  return s;
}

// Points of [lo, hi] at least `gap` away from every entry of `avoid`.
std::vector<double> grid_avoiding(double lo, double hi, int n, const std::vector<double>& avoid, double gap) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) {
    double x = lo + (hi - lo) * (i + 0.5) / n;
    for (double a : avoid)
      if (std::abs(x - a) < gap) x = a + (x < a ? -gap : gap);
    xs.push_back(x);
  }
  return xs;
}

void calculus_suite(const VerifyOptions& opt, std::vector<CheckResult>& out) {
  Runner R{"calculus", &out};
  const GammaFunction g = make_gamma(opt);
  const auto avoid = g.breakpoints();

  R.run("bell_enumeration_vs_recurrence", 1e-12, [] {
    std::vector<double> x;
    for (int i = 0; i < 8; ++i) x.push_back(0.3 + 0.17 * i);
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n)
      for (int l = 1; l <= n; ++l)
        worst = std::max(worst, relf(bell_polynomial(n, l, std::vector<double>(x.begin(), x.begin() + (n - l + 1))),
                                     bell_recurrence(n, l, x), 1.0));
    return std::make_pair(worst, std::string("n <= 8, all l"));
  });

  R.run("faa_di_bruno_closed_forms", 1e-8, [] {
    double worst = rel(faa_di_bruno({2.0, 2.0}, {3.0, 6.0}), 30.0);
    const double x = 0.7, e = std::exp(x * x);
    const double ref[4] = {2 * x * e, (2 + 4 * x * x) * e, (12 * x + 8 * x * x * x) * e,
                           (12 + 48 * x * x + 16 * x * x * x * x) * e};
    for (int r = 1; r <= 4; ++r) {
      std::vector<double> outer(r, e), inner(r, 0.0);
      inner[0] = 2 * x;
      if (r >= 2) inner[1] = 2.0;
      worst = std::max(worst, rel(faa_di_bruno(outer, inner), ref[r - 1]));
    }
    return std::make_pair(worst, std::string("y^2 o x^3 and e^y o x^2, orders 1..4"));
  });

  R.run("method_agreement", 1e-4, [&] {
    const auto f = catalog_function("xexp", g).fn;
    double worst = 0.0;
    for (double x : grid_avoiding(0.2, 6.0, 9, avoid, 0.05))
      for (int r = 1; r <= 3; ++r) {
        const double ref = gamma_derivative(f, g, x, r, GammaDerivativeMethod::via_faa_di_bruno);
        for (auto m : {GammaDerivativeMethod::difference_quotient, GammaDerivativeMethod::via_inverse_composition})
          worst = std::max(worst, relf(gamma_derivative(f, g, x, r, m), ref, 1e-3));
      }
    return std::make_pair(worst, std::string("x e^{-x/2}, orders 1..3"));
  });

  R.run("annihilation", 1e-6, [&] {
    double worst = 0.0;
    const std::vector<double> coef{0.7, -1.3, 0.4};
    for (int m = 0; m <= 2; ++m) {
      std::vector<double> c(coef.begin(), coef.begin() + m + 1);
      const auto f = as_function(GammaPolynomial(c, g));
      for (double x : grid_avoiding(0.05, 6.0, 40, avoid, 1e-3))
        worst = std::max(worst, std::abs(gamma_derivative(f, g, x, m + 1, GammaDerivativeMethod::via_faa_di_bruno)));
    }
    return std::make_pair(worst, std::string("degrees 0..2"));
  });

  R.run("affine_reduction", 1e-6, [] {
    const GammaFunction ga = GammaFunction::affine(2.0, 1.0);
    const auto f = make_function(
        "x3", [](double x) { return x * x * x; },
        [](double x, int k) { return k == 1 ? 3 * x * x : (k == 2 ? 6 * x : (k == 3 ? 6.0 : 0.0)); }, 4);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double x = 0.1 + 0.1 * i;
      for (int r = 1; r <= 3; ++r) {
        const double ref = f.classical(x, r) / std::pow(2.0, r);
        for (auto m : {GammaDerivativeMethod::difference_quotient, GammaDerivativeMethod::via_inverse_composition,
                       GammaDerivativeMethod::via_faa_di_bruno})
          worst = std::max(worst, relf(gamma_derivative(f, ga, x, r, m), ref, 1e-2));
      }
    }
    return std::make_pair(worst, std::string("gamma = 2x + 1, f = x^3"));
  });

  R.run("composition_law", 1e-4, [&] {
    const GammaPolynomial q({0.5, -1.0, 0.4, 0.2}, g);
    const auto f = as_function(q);
    double worst = 0.0;
    for (double x : grid_avoiding(0.1, 5.0, 12, avoid, 0.05))
      for (int r = 1; r <= 3; ++r)
        worst = std::max(worst, relf(gamma_derivative(f, g, x, r, GammaDerivativeMethod::via_inverse_composition),
                                     q.derivative_y(g(x), r), 1e-2));
    return std::make_pair(worst, std::string("(q o gamma)_gamma^(r) = q^(r) o gamma"));
  });

  R.run("partial_integration", 1e-8, [&] {
    const auto f = catalog_function("exp", g).fn;
    const auto h = catalog_function("xexp", g).fn;
    const double a = 1.2, b = 1.8;
    auto integrand = [&](double y) {
      const double x = g.inverse(y);
      const double fd = gamma_derivative(f, g, x, 1, GammaDerivativeMethod::via_faa_di_bruno);
      const double hd = gamma_derivative(h, g, x, 1, GammaDerivativeMethod::via_faa_di_bruno);
      return fd * h(x) + f(x) * hd;
    };
    const auto res = integrate(integrand, g(a), g(b), opt.quad);
    const double rhs = f(b) * h(b) - f(a) * h(a);
    return std::make_pair(rel(res.value, rhs), std::string("f = e^{-x}, g = x e^{-x/2} on [1.2, 1.8]"));
  });

  R.run("taylor_consistency", 1e-7, [&] {
    const auto f = catalog_function("xexp", g).fn;
    double worst = 0.0;
    for (auto [x0, x] : {std::pair{0.4, 0.9}, std::pair{1.3, 1.9}, std::pair{2.5, 4.0}, std::pair{0.6, 1.6}}) {
      for (int r = 1; r <= 3; ++r) {
        GammaJet jet{x0, std::vector<double>(r, 0.0)};
        jet.d[0] = f(x0);
        double d[8];
        if (r > 1) gamma_derivatives_closed(f, g, x0, r - 1, d);
        for (int k = 1; k < r; ++k) jet.d[k] = d[k - 1];
        const double direct = f(x) - taylor_gamma(jet, g)(x);
        worst = std::max(worst, std::abs(taylor_remainder(f, g, x0, x, r, opt.quad) - direct));
      }
    }
    return std::make_pair(worst, std::string("absolute error, orders 1..3, one interval crossing a_1"));
  });

  R.run("inverse_derivative_vs_finite_differences", 1e-4, [&] {
    double worst = 0.0;
    for (double x : {0.2, 0.45, 0.7, 0.85, 1.2, 1.4, 1.7, 1.9}) {
      const double y = g(x);
      for (int r = 2; r <= 3; ++r) {
        const double h = 1e-3 * std::max(1.0, y) * (r == 2 ? 1.0 : 2.0);
        double fd = 0.0;
        if (r == 2) fd = (g.inverse(y + h) - 2 * g.inverse(y) + g.inverse(y - h)) / (h * h);
        else fd = (g.inverse(y + 2 * h) - 2 * g.inverse(y + h) + 2 * g.inverse(y - h) - g.inverse(y - 2 * h)) / (2 * h * h * h);
        worst = std::max(worst, relf(g.inverse_derivative(y, r).value, fd, 1e-2));
      }
    }
    return std::make_pair(worst, std::string("orders 2, 3"));
  });

  R.run("inverse_derivative_vanishes_at_singular_points", 1e-3, [&] {
    double worst = 0.0;
    for (double a : g.singular_points())
      for (double d : {-1e-6, 1e-6})
        for (int r = 2; r <= std::min(3, g.r_max()); ++r)
          worst = std::max(worst, std::abs(g.inverse_derivative(g(a) + d, r).value));
    return std::make_pair(worst, std::string("|y - gamma(a_k)| = 1e-6"));
  });
}

void weights_suite(const VerifyOptions& opt, std::vector<CheckResult>& out) {
  Runner R{"weights", &out};
  const GammaFunction g = make_gamma(opt);
  const double a1 = g.singular_points().front();
  const double slope0 = g.slope_at_zero();

  R.run("gamma_monotone", 0.0, [&] {
    int bad = 0;
    double prev = g(0.0);
    for (int i = 1; i <= 4000; ++i) {
      const double v = g(i * 0.0025);
      if (!(v > prev)) ++bad;
      prev = v;
    }
    return std::make_pair(static_cast<double>(bad), std::string("violations on [0, 10]"));
  });

  R.run("gamma_c1_join", 1e-9, [&] {
    const double xl = g.x_lin();
    const double eps = 1e-10;
    const double dv = std::abs(g(xl - eps) - (g.c1() * (xl - eps) + g.c2()));
    const double dd = std::abs(g.derivative(xl - eps, 1) - g.c1());
    std::ostringstream os;
    os << "value gap " << dv << ", slope gap " << dd;
    return std::make_pair(std::max(dv, dd), os.str());
  });

  R.run("gamma_vanishes_at_zero", 1e-14, [&] { return std::make_pair(std::abs(g(0.0)), std::string()); });

  R.run("tangent_secant_sandwich", 0.0, [&] {
    int bad = 0;
    const double sec = g(a1) / a1;
    for (int i = 0; i <= 1000; ++i) {
      const double x = a1 * i / 1000.0;
      const double v = g(x);
      if (v < slope0 * x * (1 - 1e-12) || v > sec * x * (1 + 1e-12) + 1e-15) ++bad;
    }
    return std::make_pair(static_cast<double>(bad), std::string("violations on [0, a_1]"));
  });

  R.run("inverse_sandwich", 0.0, [&] {
    int bad = 0;
    const double ya = g(a1);
    for (int i = 0; i <= 1000; ++i) {
      const double y = ya * i / 1000.0;
      const double x = g.inverse(y);
      if (x < a1 / ya * y * (1 - 1e-10) - 1e-15 || x > y / slope0 * (1 + 1e-10) + 1e-15) ++bad;
    }
    return std::make_pair(static_cast<double>(bad), std::string("violations on [0, gamma(a_1)]"));
  });

  R.run("inverse_roundtrip", 1e-10, [&] {
    double worst = 0.0;
    for (int i = 1; i <= 400; ++i) {
      const double x = 0.02 * i;
      worst = std::max(worst, rel(g.inverse(g(x)), x));
    }
    return std::make_pair(worst, std::string("x in (0, 8]"));
  });

  R.run("closed_form_norms", 1e-8, [&] {
    const auto one = constant_function(1.0);
    const double n2 = weighted_lp_norm(one, LaguerreWeight{0.0}, NormSpec{LpExponent::finite(2.0)}, opt.quad);
    const double n1 = weighted_lp_norm(one, LaguerreWeight{1.0}, NormSpec{LpExponent::finite(1.0)}, opt.quad);
    return std::make_pair(std::max(rel(n2, 1.0 / std::sqrt(2.0)), rel(n1, 1.0)), std::string("||w_0||_2, ||w_1||_1"));
  });

  const auto fa = catalog_function("abs_pow_beta", g).fn;
  const auto fb = catalog_function("xexp", g).fn;
  R.run("norm_domain_monotonicity", 0.0, [&] {
    int bad = 0;
    for (auto p : {LpExponent::finite(1.0), LpExponent::finite(2.0), LpExponent::infinity()}) {
      const double inner = weighted_lp_norm(fa, LaguerreWeight{1.0}, NormSpec{p, 0.5, 2.0}, opt.quad);
      const double outer = weighted_lp_norm(fa, LaguerreWeight{1.0}, NormSpec{p, 0.2, 3.0}, opt.quad);
      if (inner > outer * (1 + 1e-12)) ++bad;
    }
    return std::make_pair(static_cast<double>(bad), std::string("violations"));
  });

  R.run("norm_homogeneity", 1e-9, [&] {
    double worst = 0.0;
    for (double c : {-3.0, 0.5, 7.0}) {
      auto fc = make_function("cf", [&, c](double x) { return c * fa(x); });
      fc.kinks = fa.kinks;
      for (auto p : {LpExponent::finite(2.0), LpExponent::infinity()}) {
        const NormSpec sp{p, 0.1, 4.0};
        worst = std::max(worst, rel(weighted_lp_norm(fc, LaguerreWeight{0.0}, sp, opt.quad),
                                    std::abs(c) * weighted_lp_norm(fa, LaguerreWeight{0.0}, sp, opt.quad)));
      }
    }
    return std::make_pair(worst, std::string("c in {-3, 0.5, 7}"));
  });

  R.run("norm_triangle", 0.0, [&] {
    int bad = 0;
    auto sum = make_function("sum", [&](double x) { return fa(x) - 2.0 * fb(x); });
    sum.kinks = fa.kinks;
    auto fb2 = make_function("2fb", [&](double x) { return 2.0 * fb(x); });
    for (auto p : {LpExponent::finite(1.0), LpExponent::finite(2.0), LpExponent::infinity()}) {
      const NormSpec sp{p, 0.0, std::numeric_limits<double>::infinity()};
      const double l = weighted_lp_norm(sum, LaguerreWeight{0.5}, sp, opt.quad);
      const double r = weighted_lp_norm(fa, LaguerreWeight{0.5}, sp, opt.quad) +
                       weighted_lp_norm(fb2, LaguerreWeight{0.5}, sp, opt.quad);
      if (l > r * (1 + 1e-9)) ++bad;
    }
    return std::make_pair(static_cast<double>(bad), std::string("violations"));
  });

  R.run("weight_equivalence_sampling", 0.0, [&] {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int bad = 0, total = 0;
    const WindowConstants c{1.0, a1 * a1 / 8.0};
    for (double alpha : {0.0, 1.0})
      for (int r : {1, 2}) {
        const auto b = weight_equivalence_bounds(r, c.A1, c.A2, alpha);
        const double hmax = admissibility_bound(g, r, c.A1, c.A2);
        const LaguerreWeight w{alpha};
        for (int i = 0; i < 1000; ++i, ++total) {
          const double h = hmax * std::pow(10.0, -3.0 * U(rng));
          const auto win = window_interval(g, r, h, c.A1, c.A2);
          const double x = win.lo + (win.hi - win.lo) * U(rng);
          const double y = std::max(1e-300, x + (2.0 * U(rng) - 1.0) * r * win.s * std::sqrt(x));
          const double q = w(y) / w(x);
          if (q < b.c_low * (1 - 1e-12) || q > b.c_high * (1 + 1e-12)) ++bad;
        }
      }
    return std::make_pair(static_cast<double>(bad), std::to_string(total) + " sampled pairs");
  });

  R.run("quadrature_convergence", 0.0, [&] {
    auto integrand = [&](double x) {
      const double v = fa(x) * std::exp(-x);
      return v * v;
    };
    QuadratureConfig q1 = opt.quad, q2 = opt.quad;
    q1.rel_tol = 1e-6;
    q2.rel_tol = 5e-7;
    const auto r1 = integrate(integrand, 0.1, 5.0, q1, fa.kinks);
    const auto r2 = integrate(integrand, 0.1, 5.0, q2, fa.kinks);
    const double excess = std::abs(r1.value - r2.value) - r1.error;
    std::ostringstream os;
    os << "change " << std::abs(r1.value - r2.value) << " vs estimate " << r1.error;
    return std::make_pair(std::max(0.0, excess), os.str());
  });

  R.run("horizon_at_most_one_half", 0.5, [&] {
    double worst = 0.0;
    for (int r = 1; r <= 3; ++r)
      worst = std::max(worst, max_time_horizon(g, r, 1.0, a1 * a1 / 8.0, HorizonVariant::upper_construction));
    return std::make_pair(worst, std::string("r = 1..3"));
  });
}

void modulus_suite(const VerifyOptions& opt, std::vector<CheckResult>& out) {
  Runner R{"modulus", &out};
  const GammaFunction g = make_gamma(opt);
  AnalysisConfig cfg;
  cfg.quad = opt.quad;
  const double A2 = cfg.constants.A2;
  const auto fe = catalog_function("exp", g).fn;
  const auto fk = catalog_function("abs_pow_2beta", g).fn;

  R.run("difference_annihilates_low_degree", 1e-9, [&] {
    double worst = 0.0;
    for (int r = 1; r <= 3; ++r)
      for (int k = 0; k < r; ++k) {
        auto f = make_function("mono", [k](double x) { return std::pow(x, k); });
        for (double x : {0.3, 1.0, 2.5, 7.0})
          for (double s : {0.01, 0.1})
            worst = std::max(worst, std::abs(forward_difference_step(f, r, s * std::sqrt(x), x)) / std::pow(1 + x, k));
      }
    return std::make_pair(worst, std::string("x^k, k < r <= 3"));
  });

  R.run("difference_recursion", 1e-12, [&] {
    double worst = 0.0;
    for (int r = 2; r <= 3; ++r)
      for (double x : {0.4, 1.3, 3.0}) {
        const double step = 0.07 * std::sqrt(x);
        auto d1 = make_function("d1", [&](double y) { return forward_difference_step(fe, 1, step, y); });
        worst = std::max(worst, std::abs(forward_difference_step(fe, r, step, x) -
                                         forward_difference_step(d1, r - 1, step, x)));
      }
    return std::make_pair(worst, std::string("fixed step"));
  });

  R.run("omega_monotone_in_t", 0.0, [&] {
    int bad = 0;
    for (const auto* f : {&fe, &fk})
      for (int r : {1, 2}) {
        const double T = max_time_horizon(g, r, 1.0, A2, HorizonVariant::upper_construction);
        const double big = main_modulus(*f, g, r, T, LpExponent::finite(2.0), 0.0, cfg).omega;
        const double small = main_modulus(*f, g, r, T * cfg.rho, LpExponent::finite(2.0), 0.0, cfg).omega;
        if (small > big * (1 + 1e-12)) ++bad;
        const auto cb = complete_modulus(*f, g, r, T, LpExponent::finite(2.0), 0.0, cfg);
        const auto cs = complete_modulus(*f, g, r, T * cfg.rho, LpExponent::finite(2.0), 0.0, cfg);
        if (cs.omega_main > cb.omega_main * (1 + 1e-12)) ++bad;
      }
    return std::make_pair(static_cast<double>(bad), std::string("violations on nested grids"));
  });

  R.run("omega_subadditive", 0.0, [&] {
    int bad = 0;
    auto sum = make_function("sum", [&](double x) { return fe(x) + fk(x); });
    sum.kinks = fk.kinks;
    for (int r : {1, 2})
      for (auto p : {LpExponent::finite(2.0), LpExponent::infinity()}) {
        const double t = 0.5 * max_time_horizon(g, r, 1.0, A2, HorizonVariant::upper_construction);
        const double l = main_modulus(sum, g, r, t, p, 0.0, cfg).omega;
        const double rr = main_modulus(fe, g, r, t, p, 0.0, cfg).omega + main_modulus(fk, g, r, t, p, 0.0, cfg).omega;
        if (l > rr * (1 + 1e-6)) ++bad;
      }
    return std::make_pair(static_cast<double>(bad), std::string("violations"));
  });

  R.run("best_poly_nonincreasing_in_degree", 0.0, [&] {
    int bad = 0;
    for (auto p : {LpExponent::finite(1.0), LpExponent::finite(2.0), LpExponent::infinity()}) {
      double prev = std::numeric_limits<double>::infinity();
      for (int d = 0; d <= 3; ++d) {
        const double e = best_gamma_poly_error(fk, g, d, p, 0.0, 0.3, 3.0, cfg).error;
        if (e > prev * (1 + 1e-6) + 1e-12) ++bad;
        prev = e;
      }
    }
    return std::make_pair(static_cast<double>(bad), std::string("violations, degrees 0..3"));
  });

  R.run("grid_refinement_stability", 0.02, [&] {
    double worst = 0.0;
    AnalysisConfig fine = cfg;
    fine.n_h = 2 * cfg.n_h - 1;
    fine.rho = std::sqrt(cfg.rho);
    for (const auto* f : {&fe, &fk})
      for (int r : {1, 2}) {
        const double t = max_time_horizon(g, r, 1.0, A2, HorizonVariant::upper_construction);
        const double c = main_modulus(*f, g, r, t, LpExponent::finite(2.0), 0.0, cfg).omega;
        const double d = main_modulus(*f, g, r, t, LpExponent::finite(2.0), 0.0, fine).omega;
        if (d < c * (1 - 1e-12)) return std::make_pair(std::numeric_limits<double>::infinity(), std::string("refined grid decreased Omega"));
        worst = std::max(worst, (d - c) / c);
      }
    return std::make_pair(worst, std::string("relative change when the h-grid is doubled"));
  });

  R.run("complete_equals_sum_of_parts", 1e-12, [&] {
    const double t = max_time_horizon(g, 1, 1.0, A2, HorizonVariant::upper_construction);
    const auto m = complete_modulus(fe, g, 1, t, LpExponent::finite(2.0), 0.0, cfg);
    const double parts = main_modulus(fe, g, 1, t, LpExponent::finite(2.0), 0.0, cfg).omega + m.tail_zero + m.tail_infinity;
    return std::make_pair(rel(m.omega_complete, parts), std::string("e^{-x}, r = 1, p = 2"));
  });

  R.run("jackson_direction", 1.5, [&] {
    double worst = 0.0;
    for (int r : {1, 2}) {
      const double T = max_time_horizon(g, r, 1.0, A2, HorizonVariant::upper_construction);
      const double C = main_modulus(fe, g, r, T, LpExponent::finite(2.0), 0.0, cfg).omega / std::pow(T, r);
      for (int i = 1; i <= 7; ++i) {
        const double t = T * std::pow(10.0, -i / 7.0);
        worst = std::max(worst, main_modulus(fe, g, r, t, LpExponent::finite(2.0), 0.0, cfg).omega / (C * std::pow(t, r)));
      }
    }
    return std::make_pair(worst, std::string("Omega(t) / (C t^r), C fitted at the horizon"));
  });

  R.run("tails_vanish_for_gamma_polynomials", 1e-10, [&] {
    double worst = 0.0;
    for (int r = 1; r <= 2; ++r)
      for (int m = 0; m < r; ++m) {
        const auto f = catalog_function("gamma_poly_" + std::to_string(m), g).fn;
        const double t = max_time_horizon(g, r, 1.0, A2, HorizonVariant::upper_construction);
        for (auto p : {LpExponent::finite(2.0), LpExponent::infinity()}) {
          const auto res = complete_modulus(f, g, r, t, p, 0.0, cfg);
          worst = std::max({worst, res.tail_zero, res.tail_infinity});
        }
      }
    return std::make_pair(worst, std::string("degrees below r"));
  });
}

void kfunctional_suite(const VerifyOptions& opt, std::vector<CheckResult>& out) {
  Runner R{"kfunctional", &out};
  const GammaFunction g = make_gamma(opt);
  AnalysisConfig cfg;
  cfg.quad = opt.quad;
  const auto& C = cfg.constants;

  R.run("partition_laws", 0.0, [&] {
    int bad = 0, n = 0;
    for (int r = 1; r <= 3; ++r) {
      const double hb = admissibility_bound(g, r, C.A1, C.A2);
      for (double f : {0.7, 0.5, 0.3, 0.1, 0.02}) {
        const auto p = build_partition(g, r, f * hb, C.A1, C.A2);
        if (check_partition(p) >= 0) ++bad;
        ++n;
      }
    }
    return std::make_pair(static_cast<double>(bad), std::to_string(n) + " partitions");
  });

  const auto fe = catalog_function("exp", g).fn;
  const int r = 2;
  const double h = 0.5 * admissibility_bound(g, r, C.A1, C.A2);
  const Partition part = build_partition(g, r, h, C.A1, C.A2);
  const SteklovApproximant G(fe, g, r, h, part, default_steklov_parameter(g, r));

  R.run("bump_partition_of_unity", 1e-12, [&] {
    double worst = 0.0;
    for (int i = 1; i + 1 < part.j && i < 12; ++i)
      for (int q = 1; q < 8; ++q) {
        const double x = part.t[i] + (part.t[i + 1] - part.t[i]) * q / 8.0;
        const double a = G.value_sum_form(x), b = G.value_convex_form(x);
        const double lo = std::min(G.F(i, x), G.F(i + 1, x)), hi = std::max(G.F(i, x), G.F(i + 1, x));
        worst = std::max(worst, rel(a, b));
        if (b < lo - 1e-12 * std::abs(lo) || b > hi + 1e-12 * std::abs(hi)) worst = std::max(worst, 1.0);
      }
    return std::make_pair(worst, std::string("sum form vs convex form, convexity"));
  });

  R.run("bump_derivative_bound", 0.0, [&] {
    const BumpFamily& B = G.bumps();
    const double S = psi_sup_bound(r);
    int bad = 0;
    for (int k = 1; k < std::min(B.size(), 20); ++k)
      for (int nu = 1; nu <= r; ++nu)
        for (int q = 0; q <= 10; ++q) {
          const double x = part.t[k] + (part.t[k + 1] - part.t[k]) * q / 10.0;
          const double v = std::abs(psi_k_gamma_derivative(B, k, x, nu));
          if (v > S * std::pow(2.0, nu) / std::pow(B.gt[k + 1] - B.gt[k], nu) * (1 + 1e-9)) ++bad;
        }
    return std::make_pair(static_cast<double>(bad), std::string("violations"));
  });

  R.run("steklov_contraction", 0.0, [&] {
    int bad = 0;
    const auto fk = catalog_function("abs_pow_beta", g).fn;
    for (int rr = 1; rr <= 3; ++rr)
      for (double x : {0.5, 0.95, 1.5, 3.0}) {
        const double s = 0.2, tau = 0.01;
        const double S = g.inverse(tau) * s;
        double B = 0.0;
        for (int i = 0; i <= 400; ++i) B = std::max(B, std::abs(fk(x + rr * S * i / 400.0)));
        if (std::abs(steklov_value(fk, g, rr, tau, s, x, opt.quad)) > (std::pow(2.0, rr) - 1) * B * (1 + 1e-9)) ++bad;
      }
    return std::make_pair(static_cast<double>(bad), std::string("violations"));
  });

  R.run("steklov_top_derivative_of_monomial", 1e-6, [&] {
    double worst = 0.0;
    for (int rr = 1; rr <= 2; ++rr) {
      auto f = make_function("mono", [rr](double x) { return std::pow(x, rr); });
      for (double x : {0.3, 1.7, 4.0})
        worst = std::max(worst, rel(steklov_classical_derivative(f, g, rr, 0.02, 0.4, x, rr, opt.quad), factorial(rr)));
    }
    return std::make_pair(worst, std::string("x^r, r = 1, 2"));
  });

  R.run("difference_integral_identity", 1e-6, [&] {
    double worst = 0.0;
    const auto x2 = make_function(
        "x2", [](double x) { return x * x; }, [](double x, int k) { return k == 1 ? 2 * x : (k == 2 ? 2.0 : 0.0); }, 4);
    const auto x1 = make_function(
        "x", [](double x) { return x; }, [](double, int k) { return k == 1 ? 1.0 : 0.0; }, 4);
    for (double x : {0.4, 1.5, 3.0, 6.0}) {
      for (const auto* f : {&x1, &x2, &fe}) {
        const auto c = difference_integral_identity_check(*f, g, 1, 0.01, x, opt.quad);
        worst = std::max(worst, relf(c.lhs, c.rhs, 1e-12));
      }
      const auto c = difference_integral_identity_check(x2, g, 2, 0.01, x, opt.quad);
      worst = std::max(worst, rel(c.lhs, c.rhs));
    }
    return std::make_pair(worst, std::string("r = 1 (x, x^2, e^{-x}), r = 2 (x^2)"));
  });

  R.run("constant_reproduced_by_G", 1e-10, [&] {
    const auto c = constant_function(2.5);
    const SteklovApproximant Gc(c, g, 1, 0.01, build_partition(g, 1, 0.01, C.A1, C.A2),
                                default_steklov_parameter(g, 1));
    double worst = 0.0;
    const auto& P = Gc.partition();
    for (int i = 0; i < P.cells(); i += std::max(1, P.cells() / 40))
      worst = std::max(worst, std::abs(Gc.value(0.5 * (P.t[i] + P.t[i + 1])) - 2.5));
    return std::make_pair(worst, std::string("f = 2.5"));
  });

  R.run("candidate_removal_never_helps", 0.0, [&] {
    int bad = 0;
    const auto fk = catalog_function("abs_pow_beta", g).fn;
    for (int rr : {1, 2}) {
      const double t = 0.5 * max_time_horizon(g, rr, C.A1, C.A2, HorizonVariant::upper_construction);
      for (const auto* f : {&fe, &fk}) {
        const double all = restricted_k_upper(*f, g, rr, t, LpExponent::finite(2.0), 0.0, cfg).value;
        KOptions fewer;
        fewer.candidates.f_itself = false;
        fewer.candidates.steklov_local = false;
        const double less = restricted_k_upper(*f, g, rr, t, LpExponent::finite(2.0), 0.0, cfg, fewer).value;
        if (all > less * (1 + 1e-12)) ++bad;
        const double full_all = full_k_upper(*f, g, rr, t, LpExponent::finite(2.0), 0.0, cfg).value;
        KOptions nog;
        nog.candidates.glued = false;
        const double full_less = full_k_upper(*f, g, rr, t, LpExponent::finite(2.0), 0.0, cfg, nog).value;
        if (full_all > full_less * (1 + 1e-12)) ++bad;
      }
    }
    return std::make_pair(static_cast<double>(bad), std::string("violations"));
  });

  R.run("degenerate_k_zero", 1e-10, [&] {
    double worst = 0.0;
    for (int rr = 1; rr <= 2; ++rr)
      for (int m = 0; m < rr; ++m) {
        const auto f = catalog_function("gamma_poly_" + std::to_string(m), g).fn;
        const double t = max_time_horizon(g, rr, C.A1, C.A2, HorizonVariant::upper_construction);
        for (auto p : {LpExponent::finite(2.0), LpExponent::infinity()}) {
          worst = std::max(worst, restricted_k_upper(f, g, rr, t, p, 0.0, cfg).value);
          worst = std::max(worst, full_k_upper(f, g, rr, t, p, 0.0, cfg).value);
        }
      }
    return std::make_pair(worst, std::string("gamma-polynomials of degree below r"));
  });
}

}  // namespace

std::vector<std::string> verify_suite_names() { return {"calculus", "weights", "modulus", "kfunctional"}; }

std::vector<CheckResult> verify(const std::string& suite, const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "calculus") known = true, calculus_suite(opt, out);
  if (all || suite == "weights") known = true, weights_suite(opt, out);
  if (all || suite == "modulus") known = true, modulus_suite(opt, out);
  if (all || suite == "kfunctional") known = true, kfunctional_suite(opt, out);
  if (!known) throw std::invalid_argument("unknown verify suite '" + suite + "'");
  return out;
}

std::string format_check(const CheckResult& c) {
  std::ostringstream os;
  os << (c.passed ? "PASS  " : "FAIL  ") << c.suite << '/' << c.name << "  measured "
     << c.measured << (c.passed ? " <= " : " > ") << c.limit;
  if (!c.detail.empty()) os << "  (" << c.detail << ')';
  return os.str();
}

}  // namespace gammak
