// Acceptance run: one PASS/FAIL line per criterion, followed by the measured
// details. Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gammak/catalog.hpp"
#include "gammak/experiment.hpp"
#include "gammak/kfunctional.hpp"
#include "gammak/modulus.hpp"
#include "gammak/steklov.hpp"
#include "gammak/weights.hpp"

using namespace gammak;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back(what);
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const GammaFunction& G() {
  static const GammaFunction g = build_gamma(default_gamma_spec());
  return g;
}

const LpExponent P2 = LpExponent::finite(2.0);
const LpExponent PI = LpExponent::infinity();

RealFunction monomial(int d) {
  return make_function("x^" + std::to_string(d), [d](double x) { return std::pow(x, d); },
                       [d](double x, int k) {
                         if (k > d) return 0.0;
                         double c = 1.0;
                         for (int i = 0; i < k; ++i) c *= d - i;
                         return c * std::pow(x, d - k);
                       },
                       8);
}

constexpr GammaDerivativeMethod kMethods[] = {GammaDerivativeMethod::difference_quotient,
                                              GammaDerivativeMethod::via_inverse_composition,
                                              GammaDerivativeMethod::via_faa_di_bruno};
const char* method_name(GammaDerivativeMethod m) {
  switch (m) {
    case GammaDerivativeMethod::difference_quotient: return "difference_quotient";
    case GammaDerivativeMethod::via_inverse_composition: return "via_inverse_composition";
    default: return "via_faa_di_bruno";
  }
}

Outcome check_affine_exactness() {
  Outcome o;
  const auto g = GammaFunction::affine(2.0, 1.0);
  const auto f = monomial(3);
  double worst = 0.0;
  for (int r = 1; r <= 3; ++r)
    for (auto m : kMethods)
      for (int i = 0; i < 50; ++i) {
        const double x = 0.1 + 0.1 * i;
        const double e = rel(gamma_derivative(f, g, x, r, m), f.classical(x, r) / std::pow(2.0, r));
        if (e > worst) worst = e;
        if (e > 1e-6)
          o.require(false, std::string(method_name(m)) + " r=" + std::to_string(r) + " x=" + fmt("%g", x) +
                               " rel err " + fmt("%.3g", e));
      }
  o.summary = "worst rel err " + fmt("%.2e", worst) + " <= 1e-6 (3 methods, r = 1..3, 50 points)";
  return o;
}

Outcome check_annihilation() {
  Outcome o;
  std::vector<double> xs;
  for (int i = 1; i <= 120; ++i) {
    const double x = 0.05 * i - 0.013;
    if (std::abs(x - 1.0) >= 1e-3) xs.push_back(x);
  }
  xs.push_back(1.0 - 1e-3);
  xs.push_back(1.0 + 1e-3);
  double worst = 0.0;
  for (int m = 0; m <= 2; ++m) {
    std::vector<double> c(m + 1, 0.0);
    for (int k = 0; k <= m; ++k) c[k] = 1.0 + 0.5 * k;
    const auto f = as_function(GammaPolynomial(c, G()));
    for (auto meth : kMethods)
      for (double x : xs) {
        const double v = std::abs(gamma_derivative(f, G(), x, m + 1, meth));
        worst = std::max(worst, v);
        if (v > 1e-6)
          o.require(false, std::string(method_name(meth)) + " degree " + std::to_string(m) + " x=" + fmt("%g", x) +
                               " |D| = " + fmt("%.3g", v));
      }
  }
  o.summary = "max |f_gamma^(m+1)| " + fmt("%.2e", worst) + " <= 1e-6 (degrees 0..2, 3 methods, " +
              std::to_string(xs.size()) + " points)";
  return o;
}

Outcome check_inverse_derivative() {
  Outcome o;
  // 20 generic points on the nonlinear branch, away from gamma(a_1) = 1 and gamma(x_lin) = 2.
  std::vector<double> ys;
  for (int i = 0; i < 10; ++i) ys.push_back(0.08 + 0.08 * i);
  for (int i = 0; i < 10; ++i) ys.push_back(1.06 + 0.085 * i);
  double worst = 0.0;
  for (double y : ys)
    for (int r = 2; r <= 3; ++r) {
      // Richardson-extrapolated central differences of the numerical inverse.
      auto fd = [&](double h) {
        auto I = [&](double v) { return G().inverse(v); };
        if (r == 2) return (I(y + h) - 2 * I(y) + I(y - h)) / (h * h);
        return (I(y + 2 * h) - 2 * I(y + h) + 2 * I(y - h) - I(y - 2 * h)) / (2 * h * h * h);
      };
      const double h = r == 2 ? 1e-3 : 4e-3;
      const double ref = (4 * fd(h / 2) - fd(h)) / 3;
      const double e = rel(G().inverse_derivative(y, r).value, ref);
      worst = std::max(worst, e);
      if (e > 1e-4) o.require(false, "r=" + std::to_string(r) + " y=" + fmt("%g", y) + " rel err " + fmt("%.3g", e));
    }
  double near = 0.0;
  for (double d : {-1e-6, -3e-7, 3e-7, 1e-6})
    for (int r = 2; r <= 3; ++r) near = std::max(near, std::abs(G().inverse_derivative(G()(1.0) + d, r).value));
  o.require(near <= 1e-3, "|(gamma^-1)^(r)| near gamma(a_1) = " + fmt("%.3g", near));
  o.summary = "worst rel err " + fmt("%.2e", worst) + " <= 1e-4 at 20 points (r = 2, 3); max near gamma(a_1) " +
              fmt("%.2e", near) + " <= 1e-3";
  return o;
}

double bell_recurrence(int n, int k, const std::vector<double>& x) {
  if (n == 0 && k == 0) return 1.0;
  if (n == 0 || k == 0) return 0.0;
  double s = 0.0;
  for (int i = 1; i <= n - k + 1; ++i) s += binomial(n - 1, i - 1) * x[i - 1] * bell_recurrence(n - i, k - 1, x);
  return s;
}

Outcome check_bell_faa() {
  Outcome o;
  std::vector<double> x;
  for (int i = 0; i < 8; ++i) x.push_back(0.4 + 0.3 * i - 0.05 * i * i);
  double wb = 0.0;
  for (int n = 1; n <= 8; ++n)
    for (int l = 1; l <= n; ++l) {
      const double a = bell_polynomial(n, l, std::vector<double>(x.begin(), x.begin() + (n - l + 1)));
      const double b = bell_recurrence(n, l, x);
      wb = std::max(wb, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
  o.require(wb <= 1e-12, "Bell enumeration vs recurrence " + fmt("%.3g", wb));

  double wf = 0.0;
  for (double t : {0.6, 1.0, 1.3}) {
    // y^2 o x^3 = x^6.
    const double y = t * t * t;
    const double outer[4] = {2 * y, 2.0, 0.0, 0.0};
    const double inner[4] = {3 * t * t, 6 * t, 6.0, 0.0};
    const double x6[4] = {6 * std::pow(t, 5), 30 * std::pow(t, 4), 120 * std::pow(t, 3), 360 * t * t};
    // e^y o x^2.
    const double e = std::exp(t * t);
    const double ex[4] = {2 * t * e, (2 + 4 * t * t) * e, (12 * t + 8 * t * t * t) * e,
                          (12 + 48 * t * t + 16 * std::pow(t, 4)) * e};
    const double inner2[4] = {2 * t, 2.0, 0.0, 0.0};
    for (int r = 1; r <= 4; ++r) {
      const double a = faa_di_bruno(std::vector<double>(outer, outer + r), std::vector<double>(inner, inner + r));
      const double b = faa_di_bruno(std::vector<double>(r, e), std::vector<double>(inner2, inner2 + r));
      wf = std::max({wf, rel(a, x6[r - 1]), rel(b, ex[r - 1])});
    }
  }
  o.require(wf <= 1e-8, "Faa di Bruno rel err " + fmt("%.3g", wf));
  o.summary = "Bell n<=8 max diff " + fmt("%.2e", wb) + "; Faa di Bruno orders 1..4 rel err " + fmt("%.2e", wf) +
              " <= 1e-8";
  return o;
}

Outcome check_closed_norms() {
  Outcome o;
  const auto one = constant_function(1.0);
  const double a = rel(weighted_lp_norm(one, {0.0}, {P2}), 1.0 / std::sqrt(2.0));
  const double b = rel(weighted_lp_norm(one, {1.0}, {LpExponent::finite(1.0)}), 1.0);
  o.require(a <= 1e-8, "||w_0||_2 rel err " + fmt("%.3g", a));
  o.require(b <= 1e-8, "||w_1||_1 rel err " + fmt("%.3g", b));
  o.summary = "rel errs " + fmt("%.2e", a) + ", " + fmt("%.2e", b) + " <= 1e-8";
  return o;
}

Outcome check_weight_bounds() {
  Outcome o;
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double A1 = 1.0, A2 = 1.0 / 8.0;
  int violations = 0, samples = 0;
  for (double alpha : {0.0, 1.0})
    for (int r = 1; r <= 2; ++r) {
      const auto b = weight_equivalence_bounds(r, A1, A2, alpha);
      const double hb = admissibility_bound(G(), r, A1, A2);
      const LaguerreWeight w{alpha};
      for (int i = 0; i < 1000; ++i) {
        const auto win = window_interval(G(), r, hb * std::pow(10.0, -3.0 * U(rng)), A1, A2);
        // Log-uniform x over the window; the weights underflow past ~700.
        const double hi = std::min(win.hi, 600.0);
        const double x = win.lo * std::pow(hi / win.lo, U(rng));
        const double y = x + (2 * U(rng) - 1) * r * win.s * std::sqrt(x);
        const double q = w(y) / w(x);
        ++samples;
        if (!(b.c_low <= q && q <= b.c_high)) {
          ++violations;
          if (violations <= 5)
            o.details.push_back("alpha=" + fmt("%g", alpha) + " r=" + std::to_string(r) + " x=" + fmt("%g", x) +
                                " y=" + fmt("%g", y));
        }
      }
    }
  o.pass = violations == 0;
  o.summary = std::to_string(violations) + " violations in " + std::to_string(samples) +
              " pairs (alpha in {0,1}, r in {1,2}, A1 = 1, A2 = 1/8)";
  return o;
}

Outcome check_partition_laws() {
  Outcome o;
  const double A1 = 1.0, A2 = 0.125;
  const double q = (1 + 2 * std::sqrt(A1)) / (2 * std::sqrt(A1));
  int bad = 0, built = 0;
  for (int r = 1; r <= 3; ++r) {
    const double hb = admissibility_bound(G(), r, A1, A2);
    for (double f : {0.7, 0.5, 0.3, 0.1, 0.02}) {
      const auto p = build_partition(G(), r, f * hb, A1, A2);
      ++built;
      for (int i = 0; i < p.cells(); ++i) {
        const double step = (p.t[i + 1] - p.t[i]) / (p.s * std::sqrt(p.t[i]));
        const double ratio = p.t[i + 1] / p.t[i];
        if (!(step >= 1.0 / (2 * r) && step <= r) || !(ratio >= 1.0 && ratio <= q)) {
          ++bad;
          o.details.push_back("r=" + std::to_string(r) + " h=" + fmt("%g", f) + "*bound index " + std::to_string(i));
        }
      }
      if (!(p.A >= 1.0 && p.A < q) || !(p.t[p.j] < p.E && p.E <= p.t[p.j + 1])) {
        ++bad;
        o.details.push_back("closing point r=" + std::to_string(r));
      }
    }
  }
  o.pass = bad == 0;
  o.summary = std::to_string(built) + " partitions, " + std::to_string(bad) + " violations of the step and ratio laws";
  return o;
}

Outcome check_steklov_identities() {
  Outcome o;
  const auto f = catalog_function("xexp", G()).fn;
  const double tau = 0.03, s = 1.4, S = G().inverse(tau) * s;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double x = 0.15 + 0.41 * i;
    auto inner = [&](double u) {
      return integrate([&](double v) { return 2 * f(x + S * (u + v) / 2) - f(x + S * (u + v)); }, 0.0, 1.0, 1e-13,
                       1e-16, 400)
          .value;
    };
    const double tensor = integrate(inner, 0.0, 1.0, 1e-12, 1e-16, 400).value;
    worst = std::max(worst, rel(steklov_value(f, G(), 2, tau, s, x), tensor));
  }
  o.require(worst <= 1e-6, "steklov_value r=2 vs tensor rel err " + fmt("%.3g", worst));
  double wd = 0.0;
  for (int r = 1; r <= 2; ++r)
    for (double x : {0.2, 0.9, 2.5})
      wd = std::max(wd, rel(steklov_classical_derivative(monomial(r), G(), r, tau, s, x, r), factorial(r)));
  o.require(wd <= 1e-6, "top derivative of x^r rel err " + fmt("%.3g", wd));
  o.summary = "tensor quadrature rel err " + fmt("%.2e", worst) + " (10 points); x^r top derivative rel err " +
              fmt("%.2e", wd) + " <= 1e-6";
  return o;
}

Outcome check_difference_identity() {
  Outcome o;
  double worst = 0.0;
  std::vector<RealFunction> fs{monomial(1), monomial(2), catalog_function("exp", G()).fn};
  for (const auto& f : fs)
    for (double h : {0.005, 0.02, 0.04})
      for (double x : {0.3, 0.95, 1.6, 3.5}) {
        const auto id = difference_integral_identity_check(f, G(), 1, h, x);
        const double e = rel(id.rhs, id.lhs);
        worst = std::max(worst, e);
        if (e > 1e-6) o.require(false, "r=1 " + f.id + " h=" + fmt("%g", h) + " x=" + fmt("%g", x));
      }
  for (double h : {0.005, 0.02, 0.04})
    for (double x : {0.3, 0.95, 1.6, 3.5}) {
      const auto id = difference_integral_identity_check(monomial(2), G(), 2, h, x);
      const double e = rel(id.rhs, id.lhs);
      worst = std::max(worst, e);
      if (e > 1e-6) o.require(false, "r=2 x^2 h=" + fmt("%g", h) + " x=" + fmt("%g", x));
    }
  o.summary = "worst rel err " + fmt("%.2e", worst) + " <= 1e-6 (r = 1: x, x^2, e^-x; r = 2: x^2)";
  return o;
}

ExperimentConfig grid_config(std::vector<std::string> functions, std::vector<int> r, std::vector<double> alpha) {
  ExperimentConfig cfg;
  cfg.gamma = default_gamma_spec();
  cfg.functions = std::move(functions);
  cfg.r = std::move(r);
  cfg.p = {P2, PI};
  cfg.alpha = std::move(alpha);
  cfg.t_decades = {1.0};
  cfg.t_per_decade = 7;
  cfg.compute_full = false;
  cfg.analysis.constants = default_constants(build_gamma(cfg.gamma));
  validate(cfg);
  return cfg;
}

std::string group_name(const RatioSummary& s) {
  return s.function_id + " r=" + std::to_string(s.r) + " p=" + s.p.str() + " alpha=" + fmt("%g", s.alpha);
}

Outcome check_theorem_direction() {
  Outcome o;
  const auto cfg = grid_config({}, {1, 2}, {0.0, 1.0});
  const auto rep = run_experiment(cfg);
  int groups = 0, failing = 0;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& row : rep.rows)
    if (row.status != "ok") o.require(false, row.function_id + " t=" + fmt("%g", row.t) + ": " + row.status);
  for (const auto& s : rep.summary) {
    if (s.ratio != "ratio14") continue;
    ++groups;
    const bool ok = (s.kind == "ok" || s.kind == "zero") && s.spread <= 10.0 && s.growth <= 10.0;
    if (s.kind == "ok" && s.spread > worst) {
      worst = s.spread;
      worst_name = group_name(s);
    }
    if (!ok) {
      ++failing;
      o.require(false, group_name(s) + ": kind " + s.kind + ", spread " + fmt("%.3g", s.spread) + ", growth " +
                           fmt("%.3g", s.growth));
    }
  }
  o.summary = std::to_string(groups - failing) + "/" + std::to_string(groups) +
              " groups with spread <= 10 over one decade (8 t values); worst spread " + fmt("%.3g", worst) + " (" +
              worst_name + ")";
  return o;
}

Outcome check_theorem_equivalence() {
  Outcome o;
  const auto cfg = grid_config({"exp", "abs_pow_2beta", "xexp"}, {1}, {0.0});
  const auto rep = run_experiment(cfg);
  std::ostringstream rec;
  double cmax = 0.0;
  for (std::size_t i = 0; i < rep.rows.size();) {
    std::size_t j = i;
    std::vector<double> v;
    bool ok = true;
    while (j < rep.rows.size() && rep.rows[j].function_id == rep.rows[i].function_id &&
           rep.rows[j].p == rep.rows[i].p) {
      ok = ok && rep.rows[j].status == "ok" && rep.rows[j].ratio_equiv_defined;
      v.push_back(rep.rows[j].ratio_equiv);
      ++j;
    }
    const std::string name = rep.rows[i].function_id + " p=" + rep.rows[i].p.str();
    if (!ok) {
      o.require(false, name + ": undefined ratio or failed cell");
      i = j;
      continue;
    }
    double lo = v[0], hi = v[0];
    for (double x : v) lo = std::min(lo, x), hi = std::max(hi, x);
    // Two-sided: 1/C <= K/Omega <= C.
    const double C = std::max(hi, 1.0 / lo);
    cmax = std::max(cmax, C);
    // Upper direction: C' fitted at the largest t, rechecked at the smallest.
    const double Cp = v.front();
    const bool recheck = v.back() <= 1.5 * Cp;
    rec << (rec.tellp() ? "; " : "") << name << " C=" << fmt("%.3g", C);
    o.require(C <= 20.0, name + ": C = " + fmt("%.3g", C) + " > 20");
    o.require(recheck, name + ": K/Omega at smallest t = " + fmt("%.3g", v.back()) + " exceeds 1.5 C' = " +
                           fmt("%.3g", 1.5 * Cp));
    i = j;
  }
  o.summary = "max C " + fmt("%.3g", cmax) + " <= 20 (" + rec.str() + ")";
  return o;
}

Outcome check_degenerate() {
  Outcome o;
  AnalysisConfig acfg;
  acfg.constants = default_constants(G());
  double worst_tail = 0.0, worst_k = 0.0;
  int cells = 0;
  for (int r = 1; r <= 3; ++r) {
    const double T = max_time_horizon(G(), r, 1.0, 0.125, HorizonVariant::upper_construction);
    for (int m = 0; m < r; ++m) {
      const auto f = catalog_function("gamma_poly_" + std::to_string(m), G()).fn;
      for (auto p : {P2, PI})
        for (double alpha : {0.0, 1.0})
          for (double t : {T, T / 10}) {
            SteklovCache cache;
            const auto mod = complete_modulus(f, G(), r, t, p, alpha, acfg);
            const auto kr = restricted_k_upper(f, G(), r, t, p, alpha, acfg, {}, &cache);
            const auto kf = full_k_upper(f, G(), r, t, p, alpha, acfg, {}, &cache);
            worst_tail = std::max({worst_tail, mod.tail_zero, mod.tail_infinity});
            worst_k = std::max({worst_k, kr.value, kf.value});
            ++cells;
          }
    }
  }
  o.require(worst_tail <= 1e-10, "tail " + fmt("%.3g", worst_tail));
  o.require(worst_k <= 1e-10, "K " + fmt("%.3g", worst_k));
  o.summary = std::to_string(cells) + " cells (deg q <= r-1, r = 1..3): max tail " + fmt("%.2e", worst_tail) +
              ", max K " + fmt("%.2e", worst_k) + " <= 1e-10";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "affine gamma exactness", 1.0, check_affine_exactness},
      {2, "annihilation of gamma-polynomials", 5.0, check_annihilation},
      {3, "inverse-derivative formula", 5.0, check_inverse_derivative},
      {4, "Bell polynomials and Faa di Bruno", 1.0, check_bell_faa},
      {5, "closed-form weighted norms", 1.0, check_closed_norms},
      {6, "weight equivalence bounds", 2.0, check_weight_bounds},
      {7, "partition laws", 1.0, check_partition_laws},
      {8, "Steklov identities", 10.0, check_steklov_identities},
      {9, "difference-integral identity", 2.0, check_difference_identity},
      {10, "K upper bound vs sum of moduli, ratio spread", 600.0, check_theorem_direction},
      {11, "K vs first-order modulus equivalence (r = 1)", 300.0, check_theorem_equivalence},
      {12, "degenerate exactness for gamma-polynomials", 30.0, check_degenerate},
  };
  struct Line {
    int id;
    Outcome o;
  };
  std::vector<Line> lines;
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.time_limit) {
      o.pass = false;
      o.details.push_back("runtime " + fmt("%.2f", secs) + " s exceeds " + fmt("%g", c.time_limit) + " s");
    }
    failed += !o.pass;
    std::printf("%s  criterion %2d  %s: %s [%.2f s <= %g s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.summary.c_str(), secs, c.time_limit);
    std::fflush(stdout);
    lines.push_back({c.id, std::move(o)});
  }
  bool header = false;
  for (const auto& l : lines)
    for (const auto& d : l.o.details) {
      if (!header) std::printf("\ndetails:\n"), header = true;
      std::printf("  criterion %2d: %s\n", l.id, d.c_str());
    }
  std::printf("\n%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
