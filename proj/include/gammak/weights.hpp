#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gammak/calculus.hpp"
#include "gammak/gamma.hpp"
#include "gammak/quadrature.hpp"

namespace gammak {

/// Lebesgue exponent; infinity is a separate kind so it never enters 1/p.
class LpExponent {
 public:
  enum class Kind { finite, infinite };

  static LpExponent finite(double p);
  static LpExponent infinity() { return LpExponent(Kind::infinite, 0.0); }
  /// Accepts a number >= 1 or "inf".
  static LpExponent parse(const std::string& s);

  bool is_infinite() const { return kind_ == Kind::infinite; }
  /// Only meaningful for finite exponents.
  double value() const { return p_; }
  std::string str() const;
  bool operator==(const LpExponent& o) const { return kind_ == o.kind_ && p_ == o.p_; }

 private:
  LpExponent(Kind k, double p) : kind_(k), p_(p) {}
  Kind kind_;
  double p_;
};

/// w_alpha(x) = x^alpha e^{-x}.
struct LaguerreWeight {
  double alpha = 0.0;
  /// -1/p < alpha < 0 is accepted but lies outside the main theorems.
  bool negative_regime() const { return alpha < 0.0; }
  double operator()(double x) const;
};

double weight_eval(const LaguerreWeight& w, double x);

struct NormSpec {
  LpExponent p = LpExponent::finite(2.0);
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// ||F w_alpha||_{L^p(lo, hi)} for an arbitrary callable F.
template <class F>
double weighted_norm(F&& f, double alpha, const NormSpec& spec, const QuadratureConfig& cfg,
                     const std::vector<double>& breakpoints = {}) {
  if (!(spec.hi > spec.lo)) return 0.0;
  const LaguerreWeight w{alpha};
  if (spec.p.is_infinite()) {
    auto g = [&](double x) { return f(x) * w(x); };
    return sup_abs(g, spec.lo, spec.hi, cfg, breakpoints);
  }
  const double p = spec.p.value();
  if (!(alpha > -1.0 / p)) throw std::invalid_argument("weight exponent must exceed -1/p");
  auto g = [&](double x) {
    const double v = std::abs(f(x)) * w(x);
    return p == 1.0 ? v : (p == 2.0 ? v * v : std::pow(v, p));
  };
  const auto res = integrate_decaying(g, spec.lo, spec.hi, cfg, breakpoints);
  if (!res.converged) {
    std::ostringstream os;
    os << "weighted norm did not reach rel_tol " << cfg.rel_tol << " within "
       << cfg.max_subdivisions << " subdivisions; estimate " << res.value << ", error "
       << res.error;
    throw QuadratureError(os.str(), res.value, res.error);
  }
  const double v = std::max(res.value, 0.0);
  return p == 1.0 ? v : (p == 2.0 ? std::sqrt(v) : std::pow(v, 1.0 / p));
}

double weighted_lp_norm(const RealFunction& f, const LaguerreWeight& w, const NormSpec& spec,
                        const QuadratureConfig& cfg = {});

/// I_{rh} = [4 A1 r^2 s^2, A2 / s^2] with s = gamma^{-1}(h).
struct WindowInterval {
  int r = 1;
  double h = 0.0;
  double A1 = 1.0;
  double A2 = 0.125;
  double s = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Largest admissible h: gamma((A2/A1)^{1/4} / sqrt(2r)).
double admissibility_bound(const GammaFunction& g, int r, double A1, double A2);

WindowInterval window_interval(const GammaFunction& g, int r, double h, double A1, double A2);

struct WeightBounds {
  double c_low = 1.0;
  double c_high = 1.0;
};

WeightBounds weight_equivalence_bounds(int r, double A1, double A2, double alpha);

enum class HorizonVariant { upper_construction, lower_bound };

double max_time_horizon(const GammaFunction& g, int r, double A1, double A2,
                        HorizonVariant variant);

/// Horizon for the two-sided comparison with the complete modulus: both
/// variants above together with the additional restrictions used when the
/// full K-functional is bounded from above and below. The restriction that
/// involves alpha only applies for alpha > 0.
double complete_time_horizon(const GammaFunction& g, int r, double A1, double A2, double alpha);

/// Default constants A1 = 1 and A2 = a_1^2 / 8.
struct WindowConstants {
  double A1 = 1.0;
  double A2 = 0.125;
};
WindowConstants default_constants(const GammaFunction& g);

/// The primed constants A1' = sqrt(A1)(1 + 2 sqrt(A1))/2 and
/// A2' = 2 sqrt(A1) A2 / (1 + 2 sqrt(A1)).
WindowConstants primed_constants(const WindowConstants& c);

}  // namespace gammak
