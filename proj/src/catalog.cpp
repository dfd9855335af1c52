#include "gammak/catalog.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gammak {

std::string to_string(CatalogKind k) {
  switch (k) {
    case CatalogKind::gamma_poly: return "gamma_poly";
    case CatalogKind::piecewise_power: return "piecewise_power";
    case CatalogKind::exp_decay: return "exp_decay";
    case CatalogKind::smooth_classical: return "smooth_classical";
    case CatalogKind::custom_sum: return "custom_sum";
  }
  return "unknown";
}

namespace {

double falling(double m, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v *= m - i;
  return v;
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// d^k/du^k |u|^m.
double abs_pow_derivative(double u, double m, int k) {
  if (k == 0) return std::pow(std::abs(u), m);
  const double c = falling(m, k);
  if (c == 0.0) return 0.0;
  const double s = (k % 2) ? sgn(u) : 1.0;
  return c * std::pow(std::abs(u), m - k) * s;
}

// Largest r with f_gamma^{(r)} in L^p_loc as a weak derivative. Pointwise the
// order-r derivative exists for all r; the jump structure decides.
int abs_power_sobolev_order(const GammaFunction& g, double d) {
  const auto* pr = g.piecewise();
  if (pr && pr->spec.a.size() == 1) {
    const double m = d / pr->spec.beta[0];
    const double mi = std::round(m);
    // |u|^m near the kink in the gamma variable; the join with the linear
    // branch is C^1 with a jump in the second derivative.
    int order;
    if (std::abs(m - mi) < 1e-12) {
      const int k = static_cast<int>(mi);
      order = (k % 2 == 0) ? 64 : k;
    } else {
      order = static_cast<int>(std::ceil(m)) - 1;
    }
    return std::min(order, 2);
  }
  // Classical picture: |x - a|^d has a weak derivative of order k iff d > k - 1
  // (for non-integer d), but the gamma-derivatives blow up like the
  // composition dictates; stay conservative.
  return std::max(0, static_cast<int>(std::ceil(d)) - 1);
}

}  // namespace

CatalogFunction abs_power(const GammaFunction& g, double d, const std::string& id) {
  if (!(d > 0.0)) throw std::invalid_argument("abs_power exponent must be positive");
  const double a = g.is_affine() ? 1.0 : g.piecewise()->spec.a.front();
  CatalogFunction c;
  c.id = id;
  c.kind = CatalogKind::piecewise_power;
  c.parameters = {{"a", a}, {"delta", d}};
  c.has_classical = true;
  RealFunction f = make_function(
      id, [a, d](double x) { return std::pow(std::abs(x - a), d); },
      [a, d](double x, int k) { return abs_pow_derivative(x - a, d, k); }, 8);
  f.kinks = {a};
  f.sobolev_order = abs_power_sobolev_order(g, d);

  const auto* pr = g.piecewise();
  if (pr && pr->spec.a.size() == 1) {
    const double m = d / pr->spec.beta[0];
    const double ya = g(a);
    const double xl = pr->x_lin, c1 = pr->c1;
    f.gamma_derivs = [g, a, d, m, ya, xl, c1](double x, int k) {
      if (x < xl) return abs_pow_derivative(g(x) - ya, m, k);
      return abs_pow_derivative(x - a, d, k) / std::pow(c1, k);
    };
    f.gamma_order = 8;
    c.has_gamma_derivatives = true;
    f.kinks.push_back(xl);
  }
  c.fn = std::move(f);
  return c;
}

CatalogFunction catalog_function(const std::string& id, const GammaFunction& g) {
  CatalogFunction c;
  c.id = id;
  if (id == "zero") {
    c.kind = CatalogKind::gamma_poly;
    c.parameters = {{"degree", 0}, {"coefficient", 0}};
    c.has_classical = c.has_gamma_derivatives = true;
    c.fn = constant_function(0.0);
    c.fn.id = id;
    return c;
  }
  if (id.rfind("gamma_poly_", 0) == 0) {
    const int m = std::stoi(id.substr(11));
    if (m < 0 || m > 8) throw std::invalid_argument("gamma_poly degree must lie in 0..8");
    std::vector<double> coef(m + 1, 0.0);
    coef[m] = 1.0;
    c.kind = CatalogKind::gamma_poly;
    c.parameters = {{"degree", m}};
    c.has_classical = c.has_gamma_derivatives = true;
    c.fn = as_function(GammaPolynomial(coef, g), id);
    return c;
  }
  if (id.rfind("abs_pow_", 0) == 0) {
    const std::string tail = id.substr(8);
    const double beta = g.is_affine() ? 0.25 : g.piecewise()->spec.beta.front();
    double d;
    if (tail == "beta") d = beta;
    else if (tail == "2beta") d = 2.0 * beta;
    else d = std::stod(tail);
    return abs_power(g, d, id);
  }
  if (id == "exp") {
    c.kind = CatalogKind::exp_decay;
    c.parameters = {{"rate", 1.0}};
    c.has_classical = true;
    c.fn = make_function(
        id, [](double x) { return std::exp(-x); },
        [](double x, int k) { return ((k % 2) ? -1.0 : 1.0) * std::exp(-x); }, 16);
    return c;
  }
  if (id == "xexp") {
    c.kind = CatalogKind::smooth_classical;
    c.parameters = {{"rate", 0.5}};
    c.has_classical = true;
    // (x e^{bx})^{(k)} = e^{bx} (b^k x + k b^{k-1}), b = -1/2.
    c.fn = make_function(
        id, [](double x) { return x * std::exp(-0.5 * x); },
        [](double x, int k) {
          const double b = -0.5;
          return std::exp(b * x) * (std::pow(b, k) * x + k * std::pow(b, k - 1));
        },
        16);
    return c;
  }
  std::ostringstream os;
  os << "unknown catalog function '" << id << "'";
  throw std::invalid_argument(os.str());
}

std::vector<CatalogFunction> default_catalog(const GammaFunction& g, int max_degree) {
  std::vector<CatalogFunction> out;
  for (int m = 0; m <= max_degree; ++m) out.push_back(catalog_function("gamma_poly_" + std::to_string(m), g));
  for (const char* id : {"abs_pow_beta", "abs_pow_2beta", "abs_pow_1", "exp", "xexp"})
    out.push_back(catalog_function(id, g));
  return out;
}

}  // namespace gammak
