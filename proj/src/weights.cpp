#include "gammak/weights.hpp"

#include <algorithm>

namespace gammak {

LpExponent LpExponent::finite(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    std::ostringstream os;
    os << "Lebesgue exponent must be a finite number >= 1 (got " << p << ")";
    throw std::invalid_argument(os.str());
  }
  return LpExponent(Kind::finite, p);
}

LpExponent LpExponent::parse(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse Lebesgue exponent '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("cannot parse Lebesgue exponent '" + s + "'");
  return finite(v);
}

std::string LpExponent::str() const {
  if (is_infinite()) return "inf";
  std::ostringstream os;
  os << p_;
  return os.str();
}

double LaguerreWeight::operator()(double x) const {
  if (x == 0.0) {
    if (alpha > 0.0) return 0.0;
    if (alpha == 0.0) return 1.0;
  }
  if (!(x > 0.0)) {
    std::ostringstream os;
    os << "Laguerre weight evaluated at x = " << x;
    throw std::domain_error(os.str());
  }
  return alpha == 0.0 ? std::exp(-x) : std::pow(x, alpha) * std::exp(-x);
}

double weight_eval(const LaguerreWeight& w, double x) {
  if (!(x > 0.0) && !(x == 0.0 && w.alpha > 0.0)) {
    std::ostringstream os;
    os << "weight_eval needs x > 0 (got " << x << ")";
    throw std::domain_error(os.str());
  }
  return w(x);
}

double weighted_lp_norm(const RealFunction& f, const LaguerreWeight& w, const NormSpec& spec,
                        const QuadratureConfig& cfg) {
  if (!(spec.lo >= 0.0) || !(spec.hi > spec.lo))
    throw std::invalid_argument("norm interval must satisfy 0 <= lo < hi");
  return weighted_norm([&](double x) { return f(x); }, w.alpha, spec, cfg, f.kinks);
}

double admissibility_bound(const GammaFunction& g, int r, double A1, double A2) {
  return g(std::pow(A2 / A1, 0.25) / std::sqrt(2.0 * r));
}

WindowInterval window_interval(const GammaFunction& g, int r, double h, double A1, double A2) {
  if (r < 1) throw std::invalid_argument("window order r must be >= 1");
  if (!(A1 > 0.0) || !(A2 > 0.0)) throw std::invalid_argument("A1 and A2 must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("window step h must be positive");
  const double bound = admissibility_bound(g, r, A1, A2);
  if (h > bound * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "h = " << h << " is not admissible: the window needs h <= " << bound;
    throw std::domain_error(os.str());
  }
  WindowInterval w;
  w.r = r;
  w.h = h;
  w.A1 = A1;
  w.A2 = A2;
  w.s = g.inverse(h);
  w.lo = 4.0 * A1 * r * r * w.s * w.s;
  w.hi = A2 / (w.s * w.s);
  // At the bound itself the window collapses to the single point 2 r sqrt(A1 A2).
  if (w.lo > w.hi) w.lo = w.hi;
  return w;
}

WeightBounds weight_equivalence_bounds(int r, double A1, double A2, double alpha) {
  if (A1 < 0.25) throw std::invalid_argument("weight equivalence needs A1 >= 1/4");
  if (alpha < 0.0) throw std::invalid_argument("weight equivalence needs alpha >= 0");
  const double q = 2.0 * std::sqrt(A1);
  const double e = r * std::sqrt(A2);
  return {std::exp(-e) * std::pow((q - 1.0) / q, alpha), std::exp(e) * std::pow((q + 1.0) / q, alpha)};
}

double max_time_horizon(const GammaFunction& g, int r, double A1, double A2,
                        HorizonVariant variant) {
  const double a1 = g.is_affine() ? 1.0 : g.singular_points().front();
  const double admiss = admissibility_bound(g, r, A1, A2);
  if (variant == HorizonVariant::lower_bound) return std::min(admiss, g(a1));

  const double xl = g.is_affine() ? 2.0 : g.x_lin();
  const double sA = std::sqrt(A1);
  const double q = 2.0 * sA / (1.0 + 2.0 * sA);
  const double entries[] = {
      0.5,
      a1,
      g(1.0),
      admiss,
      g(a1 * sA / (r * (1.0 + 2.0 * sA)) * std::sqrt(q)),
      g(std::sqrt(q / xl)),
      g(std::sqrt(xl) / (4.0 * A1 * r)),
      g(q * std::sqrt(A2 / xl)),
  };
  return *std::min_element(std::begin(entries), std::end(entries));
}

double complete_time_horizon(const GammaFunction& g, int r, double A1, double A2, double alpha) {
  const double a1 = g.is_affine() ? 1.0 : g.singular_points().front();
  const double xl = g.is_affine() ? 2.0 : g.x_lin();
  const double sA = std::sqrt(A1);
  double t = std::min(max_time_horizon(g, r, A1, A2, HorizonVariant::upper_construction),
                      max_time_horizon(g, r, A1, A2, HorizonVariant::lower_bound));
  t = std::min(t, g(std::sqrt(a1 / (4.0 * r * r * sA * (1.0 + 2.0 * sA)))));
  t = std::min(t, g(std::sqrt(a1 / (8.0 * A1 * r * r))));
  t = std::min(t, g(std::sqrt(A2 / xl)));
  if (alpha > 0.0) t = std::min(t, g(std::sqrt(A2 / (2.0 * alpha))));
  return t;
}

WindowConstants default_constants(const GammaFunction& g) {
  const double a1 = g.is_affine() ? 1.0 : g.singular_points().front();
  return {1.0, a1 * a1 / 8.0};
}

WindowConstants primed_constants(const WindowConstants& c) {
  const double sA = std::sqrt(c.A1);
  return {0.5 * sA * (1.0 + 2.0 * sA), 2.0 * sA * c.A2 / (1.0 + 2.0 * sA)};
}

}  // namespace gammak
