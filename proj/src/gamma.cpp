#include "gammak/gamma.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

#include "gammak/calculus.hpp"

namespace gammak {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// beta (beta-1) ... (beta-j+1)
double falling(double beta, int j) {
  double p = 1.0;
  for (int i = 0; i < j; ++i) p *= beta - i;
  return p;
}

}  // namespace

void validate(const GammaSpec& spec) {
  if (spec.a.empty()) throw std::invalid_argument("gamma spec needs at least one singular point");
  if (spec.a.size() != spec.beta.size())
    throw std::invalid_argument("gamma spec: a and beta must have the same length");
  if (spec.r_max < 1 || spec.r_max > 6)
    throw std::invalid_argument("gamma spec: r_max must lie in 1..6");
  for (std::size_t k = 0; k < spec.a.size(); ++k) {
    if (!(spec.a[k] > 0.0) || !std::isfinite(spec.a[k]))
      throw std::invalid_argument("gamma spec: singular points must be positive and finite");
    if (k > 0 && !(spec.a[k] > spec.a[k - 1]))
      throw std::invalid_argument("gamma spec: singular points must be strictly increasing");
    const double b = spec.beta[k];
    if (!(b > 0.0) || !(b * spec.r_max < 1.0)) {
      std::ostringstream os;
      os << "gamma spec: beta[" << k << "] = " << b << " must lie in (0, 1/" << spec.r_max
         << ") so that the inverse has " << spec.r_max << " vanishing derivatives at a_k";
      throw std::invalid_argument(os.str());
    }
  }
}

GammaSpec default_gamma_spec() { return GammaSpec{{1.0}, {0.25}, 3}; }

GammaFunction build_gamma(const GammaSpec& spec) {
  validate(spec);
  const double xl = spec.a.back() + 1.0;
  double c1 = 0.0, c2 = 0.0;
  for (std::size_t k = 0; k < spec.a.size(); ++k) {
    const double d = xl - spec.a[k];
    c1 += spec.beta[k] * std::pow(d, spec.beta[k] - 1.0);
    c2 += std::pow(d, spec.beta[k]) + std::pow(spec.a[k], spec.beta[k]);
  }
  c2 -= c1 * xl;
  return GammaFunction::with_constants(spec, c1, c2);
}

GammaFunction GammaFunction::with_constants(const GammaSpec& spec, double c1, double c2) {
  validate(spec);
  PiecewiseRoot p{spec, c1, c2, spec.a.back() + 1.0};
  return GammaFunction(p, spec.r_max);
}

GammaFunction GammaFunction::affine(double a, double b, int r_max) {
  if (a == 0.0 || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("affine gamma needs a finite nonzero slope");
  return GammaFunction(Affine{a, b}, r_max);
}

double GammaFunction::x_lin() const {
  if (auto p = piecewise()) return p->x_lin;
  return std::numeric_limits<double>::infinity();
}

double GammaFunction::c1() const {
  if (auto p = piecewise()) return p->c1;
  return affine_params()->a;
}

double GammaFunction::c2() const {
  if (auto p = piecewise()) return p->c2;
  return affine_params()->b;
}

std::vector<double> GammaFunction::singular_points() const {
  if (auto p = piecewise()) return p->spec.a;
  return {};
}

std::vector<double> GammaFunction::breakpoints() const {
  auto v = singular_points();
  if (auto p = piecewise()) v.push_back(p->x_lin);
  return v;
}

double GammaFunction::slope_at_zero() const {
  if (auto p = piecewise()) {
    double s = 0.0;
    for (std::size_t k = 0; k < p->spec.a.size(); ++k)
      s += p->spec.beta[k] * std::pow(p->spec.a[k], p->spec.beta[k] - 1.0);
    return s;
  }
  return affine_params()->a;
}

bool GammaFunction::is_singular(double x) const {
  if (auto p = piecewise())
    for (double a : p->spec.a)
      if (x == a) return true;
  return false;
}

double GammaFunction::root_part(double x) const {
  const auto& s = piecewise()->spec;
  double v = 0.0;
  for (std::size_t k = 0; k < s.a.size(); ++k) {
    const double d = x - s.a[k];
    v += sgn(d) * std::pow(std::abs(d), s.beta[k]) + std::pow(s.a[k], s.beta[k]);
  }
  return v;
}

double GammaFunction::root_derivative(double x, int j) const {
  const auto& s = piecewise()->spec;
  double v = 0.0;
  for (std::size_t k = 0; k < s.a.size(); ++k) {
    const double d = x - s.a[k];
    const double sg = (j + 1) % 2 == 0 ? 1.0 : sgn(d);
    v += falling(s.beta[k], j) * std::pow(std::abs(d), s.beta[k] - j) * sg;
  }
  return v;
}

double GammaFunction::eval(double x) const {
  if (auto af = affine_params()) return af->a * x + af->b;
  if (!(x >= 0.0)) {
    std::ostringstream os;
    os << "gamma evaluated at negative x = " << x;
    throw std::domain_error(os.str());
  }
  const auto* p = piecewise();
  if (x >= p->x_lin) return p->c1 * x + p->c2;
  return root_part(x);
}

double GammaFunction::inverse(double y) const {
  if (auto af = affine_params()) return (y - af->b) / af->a;
  const auto* p = piecewise();
  if (!(y >= 0.0)) {
    std::ostringstream os;
    os << "gamma inverse evaluated at negative y = " << y;
    throw std::domain_error(os.str());
  }
  if (y == 0.0) return 0.0;
  const double y_lin = eval(p->x_lin);
  if (y == y_lin) return p->x_lin;
  if (y > y_lin) return (y - p->c2) / p->c1;

  double lo = 0.0, hi = p->x_lin;
  // Narrow the bracket to the stretch between consecutive singular points.
  for (double a : p->spec.a) {
    const double ya = root_part(a);
    if (y == ya) return a;
    if (ya < y) lo = std::max(lo, a);
    else hi = std::min(hi, a);
  }
  while (hi - lo > 1e-8 * std::max(1.0, hi)) {
    const double m = 0.5 * (lo + hi);
    if (root_part(m) < y) lo = m;
    else hi = m;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double fx = root_part(x) - y;
    if (fx == 0.0) return x;
    if (fx < 0.0) lo = x;
    else hi = x;
    const double d = root_derivative(x, 1);
    double xn = x - fx / d;
    if (!(xn > lo && xn < hi) || !std::isfinite(xn)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      x = xn;
      break;
    }
    x = xn;
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) break;
  }
  return x;
}

double GammaFunction::derivative(double x, int j) const {
  if (j < 1) throw std::invalid_argument("derivative order must be >= 1");
  if (j > r_max_ + 1) {
    std::ostringstream os;
    os << "derivative order " << j << " exceeds r_max + 1 = " << r_max_ + 1;
    throw std::invalid_argument(os.str());
  }
  if (auto af = affine_params()) return j == 1 ? af->a : 0.0;
  if (!(x >= 0.0)) throw std::domain_error("gamma derivative at negative x");
  const auto* p = piecewise();
  if (x >= p->x_lin) return j == 1 ? p->c1 : 0.0;
  if (is_singular(x)) {
    std::ostringstream os;
    os << "gamma is not differentiable at the singular point x = " << x;
    throw SingularPointError(os.str(), x);
  }
  return root_derivative(x, j);
}

double cramer_inverse_derivative(const double* gd, int r) {
  const double g1 = gd[0];
  if (r == 1) return 1.0 / g1;
  // Row i of B is homogeneous of weight i in (gamma', gamma'', ...), so with
  // mu_j = gamma^{(j)} / gamma'^j the formula becomes (-1)^{r+1} det(B(mu)) / gamma'.
  // This keeps every entry moderate even right next to a singular point.
  double mu[8];
  for (int j = 1; j <= r; ++j) mu[j - 1] = gd[j - 1] / std::pow(g1, j);
  const int m = r - 1;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
  for (int i = 2; i <= r; ++i)
    for (int j = 1; j <= std::min(i, r - 1); ++j) B(i - 2, j - 1) = bell_polynomial(i, j, mu);
  const double sign = (r + 1) % 2 == 0 ? 1.0 : -1.0;
  return sign * B.determinant() / g1;
}

void GammaFunction::inverse_derivatives_at(double x, int r, double* out) const {
  if (r < 1) throw std::invalid_argument("inverse derivative order must be >= 1");
  if (r > r_max_) {
    std::ostringstream os;
    os << "inverse derivative order " << r << " exceeds r_max = " << r_max_;
    throw std::invalid_argument(os.str());
  }
  if (auto af = affine_params()) {
    out[0] = 1.0 / af->a;
    for (int k = 1; k < r; ++k) out[k] = 0.0;
    return;
  }
  const auto* p = piecewise();
  if (x >= p->x_lin) {
    out[0] = 1.0 / p->c1;
    for (int k = 1; k < r; ++k) out[k] = 0.0;
    return;
  }
  if (is_singular(x)) {
    for (int k = 0; k < r; ++k) out[k] = 0.0;
    return;
  }
  double gd[8];
  for (int j = 1; j <= r; ++j) gd[j - 1] = root_derivative(x, j);
  for (int k = 1; k <= r; ++k) out[k - 1] = cramer_inverse_derivative(gd, k);
}

double GammaFunction::inverse_derivative_at(double x, int r) const {
  double out[8];
  inverse_derivatives_at(x, r, out);
  return out[r - 1];
}

bool GammaFunction::local_offset(double y, std::size_t& k, double& d) const {
  const auto* p = piecewise();
  if (!p) return false;
  const auto& s = p->spec;
  const double x = inverse(y);
  for (k = 0; k < s.a.size(); ++k) {
    if (std::abs(x - s.a[k]) > 1e-6 * std::max(1.0, s.a[k])) continue;
    const double dy = y - root_part(s.a[k]);
    if (dy == 0.0) {
      d = 0.0;
      return true;
    }
    // The other terms are smooth at a_k; their increment over [a_k, a_k + d]
    // is taken from the slope at the midpoint.
    const double bk = s.beta[k];
    auto others_slope = [&](double xm) {
      double c = 0.0;
      for (std::size_t i = 0; i < s.a.size(); ++i)
        if (i != k) c += s.beta[i] * std::pow(std::abs(xm - s.a[i]), s.beta[i] - 1.0);
      return c;
    };
    const double c = others_slope(s.a[k]);
    // Solve u + c sgn(u)|u|^{1/bk} = dy for u = sgn(d)|d|^{bk}.
    double u = dy;
    for (int it = 0; it < 100; ++it) {
      const double au = std::abs(u);
      const double F = u + c * sgn(u) * std::pow(au, 1.0 / bk) - dy;
      const double dF = 1.0 + c / bk * std::pow(au, 1.0 / bk - 1.0);
      const double un = u - F / dF;
      if (std::abs(un - u) <= 1e-16 * std::abs(u)) {
        u = un;
        break;
      }
      u = un;
    }
    d = sgn(u) * std::pow(std::abs(u), 1.0 / bk);
    return true;
  }
  return false;
}

InverseDerivative GammaFunction::inverse_derivative(double y, int r) const {
  if (r < 1) throw std::invalid_argument("inverse derivative order must be >= 1");
  if (r > r_max_) {
    std::ostringstream os;
    os << "inverse derivative order " << r << " exceeds r_max = " << r_max_;
    throw std::invalid_argument(os.str());
  }
  InverseDerivative res;
  std::size_t k = 0;
  double d = 0.0;
  if (local_offset(y, k, d)) {
    // x = a_k + d with d far below the spacing of doubles near a_k.
    if (d == 0.0) return res;
    const auto& s = piecewise()->spec;
    double gd[8];
    for (int j = 1; j <= r; ++j) {
      const double sg = (j + 1) % 2 == 0 ? 1.0 : sgn(d);
      double v = falling(s.beta[k], j) * std::pow(std::abs(d), s.beta[k] - j) * sg;
      for (std::size_t i = 0; i < s.a.size(); ++i) {
        if (i == k) continue;
        const double e = s.a[k] + d - s.a[i];
        const double si = (j + 1) % 2 == 0 ? 1.0 : sgn(e);
        v += falling(s.beta[i], j) * std::pow(std::abs(e), s.beta[i] - j) * si;
      }
      gd[j - 1] = v;
    }
    res.value = cramer_inverse_derivative(gd, r);
    return res;
  }
  const double x = inverse(y);
  if (auto p = piecewise()) res.breakpoint = (x == p->x_lin);
  res.value = inverse_derivative_at(x, r);
  return res;
}

}  // namespace gammak
