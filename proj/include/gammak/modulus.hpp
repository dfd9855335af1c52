#pragma once

#include <string>
#include <vector>

#include "gammak/calculus.hpp"
#include "gammak/gamma.hpp"
#include "gammak/quadrature.hpp"
#include "gammak/weights.hpp"

namespace gammak {

/// Settings shared by the modulus and K-functional computations.
struct AnalysisConfig {
  QuadratureConfig quad;
  WindowConstants constants;
  /// Geometric h-grid h_i = t rho^i, i = 0..n_h-1.
  int n_h = 24;
  double rho = 0.75;
  /// Windows and tails are cut at x_cut = cut_base + cut_per_alpha * max(alpha, 0);
  /// the Laguerre weight there is below 1e-26 for every catalog function.
  double cut_base = 60.0;
  double cut_per_alpha = 10.0;

  double x_cut(double alpha) const { return cut_base + cut_per_alpha * std::max(alpha, 0.0); }
  std::vector<double> h_grid(double t) const;
};

/// sum_k (-1)^{r-k} C(r,k) f(x + k s), s = gamma^{-1}(h) sqrt(x).
double forward_difference(const RealFunction& f, const GammaFunction& g, int r, double h, double x);
/// Same difference with the step s given directly.
double forward_difference_step(const RealFunction& f, int r, double s, double x);

/// Points x at which some node x + k s sqrt(x) (k = 0..r) hits one of `kinks`.
std::vector<double> difference_breakpoints(const std::vector<double>& kinks, int r, double step);

struct MainModulus {
  double omega = 0.0;
  std::vector<double> h_grid;
  std::vector<double> per_h_norms;
};

MainModulus main_modulus(const RealFunction& f, const GammaFunction& g, int r, double t,
                         const LpExponent& p, double alpha, const AnalysisConfig& cfg);

/// Weighted norm of the r-th difference over the window of one h.
double window_difference_norm(const RealFunction& f, const GammaFunction& g, int r, double h,
                              const LpExponent& p, double alpha, const AnalysisConfig& cfg);

class IllConditionedError : public std::runtime_error {
 public:
  IllConditionedError(const std::string& what, double cond)
      : std::runtime_error(what), cond_(cond) {}
  double condition() const { return cond_; }

 private:
  double cond_;
};

struct BestPolynomial {
  double error = 0.0;
  GammaPolynomial poly;
  double condition = 1.0;
  bool orthogonal_retry = false;
};

/// inf over gamma-polynomials of degree <= deg of ||w_alpha (f - q o gamma)||_{L^p(lo, hi)}.
/// hi may be infinite; the interval is cut at cfg.x_cut(alpha).
BestPolynomial best_gamma_poly_error(const RealFunction& f, const GammaFunction& g, int deg,
                                     const LpExponent& p, double alpha, double lo, double hi,
                                     const AnalysisConfig& cfg);

struct ModulusResult {
  double t = 0.0;
  double omega_main = 0.0;
  double tail_zero = 0.0;
  double tail_infinity = 0.0;
  double omega_complete = 0.0;
  std::vector<double> h_grid;
  std::vector<double> per_h_norms;
  std::vector<GammaPolynomial> achieving_polys;
};

ModulusResult complete_modulus(const RealFunction& f, const GammaFunction& g, int r, double t,
                               const LpExponent& p, double alpha, const AnalysisConfig& cfg);

}  // namespace gammak
