#include "gammak/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gammak {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return std::round(b);
}

int RealFunction::gamma_derivative_order() const {
  int o = 0;
  if (gamma_derivs) o = std::max(o, gamma_order);
  if (classical) o = std::max(o, classical_order);
  return o;
}

bool RealFunction::in_sobolev(int r) const {
  if (sobolev_order >= 0) return r <= sobolev_order && r <= gamma_derivative_order();
  return r <= gamma_derivative_order();
}

RealFunction make_function(std::string id, std::function<double(double)> value) {
  RealFunction f;
  f.id = std::move(id);
  f.value = std::move(value);
  return f;
}

RealFunction make_function(std::string id, std::function<double(double)> value,
                           std::function<double(double, int)> classical, int order) {
  RealFunction f = make_function(std::move(id), std::move(value));
  f.classical = std::move(classical);
  f.classical_order = order;
  return f;
}

RealFunction constant_function(double c) {
  RealFunction f = make_function(
      "const", [c](double) { return c; }, [](double, int) { return 0.0; }, 64);
  f.gamma_derivs = [](double, int) { return 0.0; };
  f.gamma_order = 64;
  return f;
}

// ---------------------------------------------------------------- polynomials

GammaPolynomial::GammaPolynomial(std::vector<double> coefficients, GammaFunction gamma,
                                 double center)
    : c_(std::move(coefficients)), gamma_(std::move(gamma)), center_(center) {
  if (c_.empty()) c_.push_back(0.0);
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
}

double GammaPolynomial::eval_y(double y) const {
  const double u = y - center_;
  double v = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * u + *it;
  return v;
}

double GammaPolynomial::derivative_y(double y, int k) const {
  if (k == 0) return eval_y(y);
  const double u = y - center_;
  double v = 0.0;
  for (int i = degree(); i >= k; --i) {
    double coef = c_[i];
    for (int q = 0; q < k; ++q) coef *= i - q;
    v = v * u + coef;
  }
  return v;
}

RealFunction as_function(const GammaPolynomial& p, std::string id) {
  RealFunction f;
  f.id = std::move(id);
  f.value = [p](double x) { return p(x); };
  f.gamma_derivs = [p](double x, int k) { return p.derivative_y(p.gamma()(x), k); };
  f.gamma_order = 64;
  const int cmax = p.gamma().r_max() + 1;
  f.classical = [p, cmax](double x, int k) {
    if (k > cmax) throw std::invalid_argument("classical derivative order too high");
    const auto& g = p.gamma();
    const double y = g(x);
    std::vector<double> outer(k), inner(k);
    for (int l = 1; l <= k; ++l) {
      outer[l - 1] = p.derivative_y(y, l);
      inner[l - 1] = g.derivative(x, l);
    }
    return faa_di_bruno(outer, inner);
  };
  f.classical_order = cmax;
  f.kinks = p.gamma().breakpoints();
  return f;
}

GammaPolynomial gamma_poly_derivative(const GammaPolynomial& p, int r) {
  if (r < 0) throw std::invalid_argument("derivative order must be nonnegative");
  const auto& c = p.coefficients();
  if (r > p.degree()) return GammaPolynomial({0.0}, p.gamma(), p.center());
  std::vector<double> d(c.size() - r);
  for (std::size_t k = 0; k < d.size(); ++k) {
    double coef = c[k + r];
    for (int q = 1; q <= r; ++q) coef *= static_cast<double>(k + q);
    d[k] = coef;
  }
  return GammaPolynomial(std::move(d), p.gamma(), p.center());
}

// ------------------------------------------------------------ Bell / Faa di Bruno

double bell_polynomial(int n, int l, const double* xs) {
  if (n < 1 || l < 1) throw std::invalid_argument("Bell polynomial needs n, l >= 1");
  if (l > n) throw std::invalid_argument("Bell polynomial B_{n,l} needs l <= n");
  const int m = n - l + 1;
  double total = 0.0;
  // Depth-first over j_i, i = 1..m, with sum j_i = l and sum i j_i = n.
  auto rec = [&](auto&& self, int i, int rl, int rn, double term) -> void {
    if (rl == 0 || rn == 0) {
      if (rl == 0 && rn == 0) total += term;
      return;
    }
    if (i > m) return;
    const double xi = xs[i - 1] / factorial(i);
    double t = term;
    for (int j = 0; j <= rl && i * j <= rn; ++j) {
      self(self, i + 1, rl - j, rn - i * j, t);
      t *= xi / (j + 1);
    }
  };
  rec(rec, 1, l, n, 1.0);
  return total * factorial(n);
}

double bell_polynomial(int n, int l, const std::vector<double>& xs) {
  if (l >= 1 && l <= n && static_cast<int>(xs.size()) != n - l + 1) {
    std::ostringstream os;
    os << "B_{" << n << "," << l << "} takes " << n - l + 1 << " arguments, got " << xs.size();
    throw std::invalid_argument(os.str());
  }
  return bell_polynomial(n, l, xs.data());
}

double faa_di_bruno(const std::vector<double>& outer, const std::vector<double>& inner) {
  if (outer.size() != inner.size() || outer.empty())
    throw std::invalid_argument("faa_di_bruno needs derivative sequences of equal length >= 1");
  const int r = static_cast<int>(outer.size());
  double s = 0.0;
  for (int l = 1; l <= r; ++l) s += outer[l - 1] * bell_polynomial(r, l, inner.data());
  return s;
}

void classical_to_gamma(const double* classical, const double* inverse_derivs, int r,
                        double* out) {
  for (int k = 1; k <= r; ++k) {
    double s = 0.0;
    for (int m = 1; m <= k; ++m) s += classical[m - 1] * bell_polynomial(k, m, inverse_derivs);
    out[k - 1] = s;
  }
}

bool gamma_derivatives_closed(const RealFunction& f, const GammaFunction& g, double x, int r,
                              double* out) {
  if (f.gamma_derivs && f.gamma_order >= r) {
    for (int k = 1; k <= r; ++k) out[k - 1] = f.gamma_derivs(x, k);
    return true;
  }
  if (f.classical && f.classical_order >= r && r <= g.r_max()) {
    if (g.is_singular(x)) {
      std::ostringstream os;
      os << "gamma-derivative requested at the singular point x = " << x;
      throw SingularPointError(os.str(), x);
    }
    double cl[8], inv[8];
    for (int m = 1; m <= r; ++m) cl[m - 1] = f.classical(x, m);
    g.inverse_derivatives_at(x, r, inv);
    classical_to_gamma(cl, inv, r, out);
    return true;
  }
  return false;
}

// ------------------------------------------------------- numeric differentiation

namespace {

struct FreeRoom {
  double left;
  double right;
};

// Distance from y0 to the nearest point in gamma-coordinates where f o gamma^{-1}
// loses smoothness or leaves its domain.
FreeRoom free_room(const RealFunction& f, const GammaFunction& g, double y0) {
  std::vector<double> ys;
  for (double b : g.breakpoints()) ys.push_back(g(b));
  for (double k : f.kinks)
    if (k >= 0.0 || g.is_affine()) ys.push_back(g(k));
  if (!g.is_affine()) ys.push_back(g(std::max(f.lo, 0.0)));
  else if (std::isfinite(f.lo)) ys.push_back(g(f.lo));
  if (std::isfinite(f.hi)) ys.push_back(g(f.hi));
  FreeRoom fr{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (double b : ys) {
    if (b < y0) fr.left = std::min(fr.left, y0 - b);
    if (b > y0) fr.right = std::min(fr.right, b - y0);
  }
  return fr;
}

double richardson(std::vector<double> t, double factor) {
  const int n = static_cast<int>(t.size());
  double pow_m = 1.0;
  for (int m = 1; m < n; ++m) {
    pow_m *= factor;
    for (int i = n - 1; i >= m; --i) t[i] = t[i] + (t[i] - t[i - 1]) / (pow_m - 1.0);
  }
  return t[n - 1];
}

constexpr int kLevels = 4;
constexpr int kQuotientLevels = 6;  // one-sided nodes need a longer extrapolation

double central_or_one_sided(const RealFunction& f, const GammaFunction& g, double x, int r) {
  const double y0 = g(x);
  const auto room = free_room(f, g, y0);
  const double kdef = 0.1 * std::max(1.0, std::abs(y0));
  auto F = [&](double y) { return f(g.inverse(y)); };
  const double kc = std::min(kdef, 1.9 * std::min(room.left, room.right) / r);
  std::vector<double> t(kLevels);
  if (kc >= kdef / 4.0) {
    for (int lv = 0; lv < kLevels; ++lv) {
      const double k = kc / std::pow(2.0, lv);
      double s = 0.0;
      for (int i = 0; i <= r; ++i)
        s += ((r - i) % 2 == 0 ? 1.0 : -1.0) * binomial(r, i) * F(y0 + (i - 0.5 * r) * k);
      t[lv] = s / std::pow(k, r);
    }
    return richardson(t, 4.0);
  }
  const double dir = room.right >= room.left ? 1.0 : -1.0;
  const double side = std::max(room.left, room.right);
  const double k0 = std::min(kdef, 0.95 * side / r);
  t.resize(kQuotientLevels);
  for (int lv = 0; lv < kQuotientLevels; ++lv) {
    const double k = k0 / std::pow(2.0, lv);
    double s = 0.0;
    for (int i = 0; i <= r; ++i)
      s += ((r - i) % 2 == 0 ? 1.0 : -1.0) * binomial(r, i) * F(y0 + dir * i * k);
    t[lv] = s / std::pow(dir * k, r);
  }
  return richardson(t, 2.0);
}

// r! times the r-th divided difference of f with respect to gamma, on nodes
// equally spaced in gamma-coordinates on one side of x.
double nested_quotient(const RealFunction& f, const GammaFunction& g, double x, int r) {
  const double y0 = g(x);
  const auto room = free_room(f, g, y0);
  const double kdef = 0.1 * std::max(1.0, std::abs(y0));
  const double dir = room.right >= room.left ? 1.0 : -1.0;
  const double side = dir > 0 ? room.right : room.left;
  const double k0 = std::min(kdef, 0.95 * side / r);
  std::vector<double> t(kQuotientLevels);
  std::vector<double> xs(r + 1), gs(r + 1), q(r + 1);
  for (int lv = 0; lv < kQuotientLevels; ++lv) {
    const double k = k0 / std::pow(2.0, lv);
    for (int i = 0; i <= r; ++i) {
      xs[i] = i == 0 ? x : g.inverse(y0 + dir * i * k);
      gs[i] = g(xs[i]);
      q[i] = f(xs[i]);
    }
    for (int m = 1; m <= r; ++m)
      for (int i = 0; i + m <= r; ++i) q[i] = (q[i + 1] - q[i]) / (gs[i + m] - gs[i]);
    t[lv] = q[0] * factorial(r);
  }
  return richardson(t, 2.0);
}

}  // namespace

double gamma_derivative(const RealFunction& f, const GammaFunction& g, double x, int r,
                        GammaDerivativeMethod method) {
  if (r < 1) throw std::invalid_argument("gamma_derivative order must be >= 1");
  if (!f.in_domain(x)) {
    std::ostringstream os;
    os << "gamma_derivative: x = " << x << " outside the function's domain";
    throw std::domain_error(os.str());
  }
  if (g.is_singular(x)) {
    std::ostringstream os;
    os << "gamma_derivative requested at the singular point x = " << x;
    throw SingularPointError(os.str(), x);
  }
  switch (method) {
    case GammaDerivativeMethod::via_faa_di_bruno: {
      if (!f.classical || f.classical_order < r)
        throw std::invalid_argument("via_faa_di_bruno needs classical derivatives up to order r");
      if (r > g.r_max()) throw std::invalid_argument("via_faa_di_bruno needs r <= r_max");
      double cl[8], inv[8], out[8];
      for (int m = 1; m <= r; ++m) cl[m - 1] = f.classical(x, m);
      g.inverse_derivatives_at(x, r, inv);
      classical_to_gamma(cl, inv, r, out);
      return out[r - 1];
    }
    case GammaDerivativeMethod::via_inverse_composition:
      return central_or_one_sided(f, g, x, r);
    case GammaDerivativeMethod::difference_quotient:
      return nested_quotient(f, g, x, r);
  }
  throw std::invalid_argument("unknown gamma derivative method");
}

// ------------------------------------------------------------------ Leibniz/Taylor

GammaJet leibniz_gamma(const GammaJet& jf, const GammaJet& jg) {
  if (jf.x0 != jg.x0) throw std::invalid_argument("leibniz_gamma: base points differ");
  if (jf.d.size() != jg.d.size() || jf.d.empty())
    throw std::invalid_argument("leibniz_gamma: jets must have the same nonzero length");
  GammaJet out{jf.x0, std::vector<double>(jf.d.size(), 0.0)};
  for (std::size_t n = 0; n < jf.d.size(); ++n)
    for (std::size_t k = 0; k <= n; ++k)
      out.d[n] += binomial(static_cast<int>(n), static_cast<int>(k)) * jf.d[k] * jg.d[n - k];
  return out;
}

GammaPolynomial taylor_gamma(const GammaJet& jet, const GammaFunction& g) {
  if (jet.d.empty()) throw std::invalid_argument("taylor_gamma: empty jet");
  std::vector<double> c(jet.d.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = jet.d[k] / factorial(static_cast<int>(k));
  return GammaPolynomial(std::move(c), g, g(jet.x0));
}

double taylor_remainder(const RealFunction& f, const GammaFunction& g, double x0, double x, int r,
                        const QuadratureConfig& cfg) {
  if (r < 1) throw std::invalid_argument("taylor_remainder order must be >= 1");
  if (x == x0) return 0.0;
  const double y0 = g(x0), y1 = g(x);
  auto fr = [&](double s) {
    const double t = g.inverse(s);
    double out[8];
    if (!g.is_singular(t) && gamma_derivatives_closed(f, g, t, r, out)) return out[r - 1];
    if (g.is_singular(t)) return 0.0;
    return gamma_derivative(f, g, t, r, GammaDerivativeMethod::via_inverse_composition);
  };
  auto integrand = [&](double s) {
    return fr(s) * std::pow(y1 - s, r - 1) / factorial(r - 1);
  };
  std::vector<double> bp;
  for (double b : g.breakpoints()) bp.push_back(g(b));
  for (double k : f.kinks) bp.push_back(g(k));
  const double lo = std::min(y0, y1), hi = std::max(y0, y1);
  const auto res = integrate(integrand, lo, hi, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions, bp);
  return y1 >= y0 ? res.value : -res.value;
}

}  // namespace gammak
