#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gammak/gamma.hpp"
#include "gammak/quadrature.hpp"

namespace gammak {

/// A scalar function on an open subinterval of (0, inf).
///
/// `classical(x, k)` (k >= 1) and `gamma_derivs(x, k)` (k >= 1, closed-form
/// gamma-relative derivatives) are optional. `kinks` lists points where f is
/// not smooth; `sobolev_order` is the largest r for which the pointwise
/// gamma-derivative of order r is also the weak one (f in W^r); -1 means
/// "as high as the available derivatives go".
struct RealFunction {
  std::string id;
  std::function<double(double)> value;
  std::function<double(double, int)> classical;
  int classical_order = 0;
  std::function<double(double, int)> gamma_derivs;
  int gamma_order = 0;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  std::vector<double> kinks;
  int sobolev_order = -1;

  double operator()(double x) const { return value(x); }
  bool in_domain(double x) const { return x > lo && x < hi; }
  /// Highest order r for which f_gamma^{(r)} is available in closed form
  /// (directly or through Faa di Bruno).
  int gamma_derivative_order() const;
  /// Whether f belongs to the gamma-Sobolev class of order r.
  bool in_sobolev(int r) const;
};

RealFunction make_function(std::string id, std::function<double(double)> value);
RealFunction make_function(std::string id, std::function<double(double)> value,
                           std::function<double(double, int)> classical, int order);
RealFunction constant_function(double c);

/// Values f_gamma^{(0)}, ..., f_gamma^{(n)} at a common base point.
struct GammaJet {
  double x0 = 0.0;
  std::vector<double> d;
};

/// x -> sum_k c_k (gamma(x) - center)^k.
class GammaPolynomial {
 public:
  GammaPolynomial(std::vector<double> coefficients, GammaFunction gamma, double center = 0.0);

  double operator()(double x) const { return eval_y(gamma_(x)); }
  /// The algebraic polynomial q(y - center).
  double eval_y(double y) const;
  /// k-th derivative of the algebraic polynomial at y.
  double derivative_y(double y, int k) const;

  const std::vector<double>& coefficients() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const GammaFunction& gamma() const { return gamma_; }
  double center() const { return center_; }
  bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }

 private:
  std::vector<double> c_;
  GammaFunction gamma_;
  double center_;
};

/// Wraps p as a RealFunction with closed-form gamma-derivatives and classical
/// derivatives obtained through Faa di Bruno.
RealFunction as_function(const GammaPolynomial& p, std::string id = "gamma_poly");

/// Partial exponential Bell polynomial B_{n,l}(x_1, ..., x_{n-l+1}), by
/// exhaustive enumeration of the index tuples.
double bell_polynomial(int n, int l, const std::vector<double>& xs);
double bell_polynomial(int n, int l, const double* xs);

/// (f o g)^{(r)} = sum_l f^{(l)}(g) B_{r,l}(g', ..., g^{(r-l+1)}).
double faa_di_bruno(const std::vector<double>& outer_derivs,
                    const std::vector<double>& inner_derivs);

enum class GammaDerivativeMethod { difference_quotient, via_inverse_composition, via_faa_di_bruno };

/// f_gamma^{(r)}(x).
double gamma_derivative(const RealFunction& f, const GammaFunction& g, double x, int r,
                        GammaDerivativeMethod method);

/// f_gamma^{(k)}(x) for k = 1..r using the closed forms when available
/// (gamma_derivs, else classical derivatives with Faa di Bruno). Returns false
/// when f carries neither.
bool gamma_derivatives_closed(const RealFunction& f, const GammaFunction& g, double x, int r,
                              double* out);

/// gamma-derivatives of order 1..r from classical derivatives f^{(1..r)}(x)
/// and the inverse derivatives at gamma(x).
void classical_to_gamma(const double* classical, const double* inverse_derivs, int r,
                        double* out);

GammaPolynomial gamma_poly_derivative(const GammaPolynomial& p, int r);

GammaJet leibniz_gamma(const GammaJet& jf, const GammaJet& jg);

/// sum_k d_k/k! (gamma(x) - gamma(x0))^k.
GammaPolynomial taylor_gamma(const GammaJet& jet, const GammaFunction& g);

/// The integral remainder of order r between x0 and x, computed in the
/// variable y = gamma(t).
double taylor_remainder(const RealFunction& f, const GammaFunction& g, double x0, double x, int r,
                        const QuadratureConfig& cfg = {});

double binomial(int n, int k);
double factorial(int n);

}  // namespace gammak
