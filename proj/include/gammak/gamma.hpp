#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gammak {

/// Singular abscissae a_k, exponents beta_k and the highest derivative order
/// the construction has to support.
struct GammaSpec {
  std::vector<double> a;
  std::vector<double> beta;
  int r_max = 1;
};

/// Throws std::invalid_argument unless a is positive and strictly increasing,
/// sizes match and every exponent lies in (0, 1/r_max).
void validate(const GammaSpec& spec);

/// Raised when a derivative of gamma is requested exactly at some a_k.
class SingularPointError : public std::domain_error {
 public:
  SingularPointError(const std::string& what, double x)
      : std::domain_error(what), x_(x) {}
  double x() const { return x_; }

 private:
  double x_;
};

struct InverseDerivative {
  double value = 0.0;
  /// Set when y coincides with gamma(x_lin); value is then the right-hand one.
  bool breakpoint = false;
};

/// The strictly increasing change of variable on [0, inf).
///
/// PiecewiseRoot is the fractional-power construction
///   gamma(x) = sum_k |x-a_k|^{b_k} sgn(x-a_k) + sum_k a_k^{b_k}   (x <= x_lin)
///   gamma(x) = c1 x + c2                                          (x >= x_lin)
/// with x_lin = a_N + 1. Affine is x -> a x + b.
class GammaFunction {
 public:
  struct PiecewiseRoot {
    GammaSpec spec;
    double c1 = 0.0;
    double c2 = 0.0;
    double x_lin = 0.0;
  };
  struct Affine {
    double a = 1.0;
    double b = 0.0;
  };

  /// Uses the supplied constants verbatim (no consistency check). Only meant
  /// for fault injection; build_gamma is the normal entry point.
  static GammaFunction with_constants(const GammaSpec& spec, double c1, double c2);
  static GammaFunction affine(double a, double b, int r_max = 8);

  bool is_affine() const { return std::holds_alternative<Affine>(rep_); }
  const PiecewiseRoot* piecewise() const { return std::get_if<PiecewiseRoot>(&rep_); }
  const Affine* affine_params() const { return std::get_if<Affine>(&rep_); }

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;
  double inverse(double y) const;

  /// j-th classical derivative, j <= r_max + 1.
  double derivative(double x, int j) const;

  /// r-th derivative of the inverse function at y (Cramer's rule form).
  InverseDerivative inverse_derivative(double y, int r) const;

  /// Same quantity parametrized by x = gamma^{-1}(y), which skips root finding.
  /// Fills out[0..r-1] with the orders 1..r. At x = a_k all orders are 0; at
  /// x = x_lin the right-hand (linear branch) values are returned.
  void inverse_derivatives_at(double x, int r, double* out) const;
  double inverse_derivative_at(double x, int r) const;

  int r_max() const { return r_max_; }
  double x_lin() const;
  double c1() const;
  double c2() const;
  /// a_1, ..., a_N (empty for the affine variant).
  std::vector<double> singular_points() const;
  /// Singular points followed by x_lin.
  std::vector<double> breakpoints() const;
  /// Slope of the tangent at 0, sum_k beta_k a_k^{beta_k - 1}.
  double slope_at_zero() const;
  /// True when x is exactly one of the a_k.
  bool is_singular(double x) const;

 private:
  explicit GammaFunction(std::variant<PiecewiseRoot, Affine> rep, int r_max)
      : rep_(std::move(rep)), r_max_(r_max) {}
  double root_part(double x) const;
  double root_derivative(double x, int j) const;
  // For y within a relative 1e-6 of some gamma(a_k) in x, writes k and the
  // offset d with gamma(a_k + d) = y, resolved beyond double spacing at a_k.
  bool local_offset(double y, std::size_t& k, double& d) const;

  std::variant<PiecewiseRoot, Affine> rep_;
  int r_max_ = 1;
};

GammaFunction build_gamma(const GammaSpec& spec);

/// The default construction used throughout the tests and the CLI:
/// a = [1], beta = [1/4], r_max = 3.
GammaSpec default_gamma_spec();

inline double eval(const GammaFunction& g, double x) { return g.eval(x); }
inline double eval_inverse(const GammaFunction& g, double y) { return g.inverse(y); }
inline double derivative(const GammaFunction& g, double x, int j) {
  return g.derivative(x, j);
}
inline InverseDerivative inverse_derivative(const GammaFunction& g, double y, int r) {
  return g.inverse_derivative(y, r);
}

/// (gamma^{-1})^{(r)} from the derivatives gamma', ..., gamma^{(r)} given in
/// gd[0..r-1]: (-1)^{r+1} det(B) / gamma'^{r(r+1)/2}, B_{i,j} = B_{i,j}(gamma',...)
/// for i = 2..r, j = 1..r-1.
double cramer_inverse_derivative(const double* gd, int r);

}  // namespace gammak
