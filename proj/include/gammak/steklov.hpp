#pragma once

#include <limits>
#include <vector>

#include "gammak/calculus.hpp"
#include "gammak/gamma.hpp"
#include "gammak/quadrature.hpp"

namespace gammak {

/// Covering t_0 < t_1 < ... of the window for one step h, built greedily by
/// t_{i+1} = t_i + gamma^{-1}(h) sqrt(t_i).
struct Partition {
  std::vector<double> t;
  int j = 0;   ///< index of the last point below E = A2 / s^2
  int M = -1;  ///< t_M < a_N + 1 <= t_{M+1}, or -1 when no such index exists
  double A = 1.0;
  double h = 0.0;
  int r = 1;
  double s = 0.0;  ///< gamma^{-1}(h)
  double E = 0.0;  ///< A2 / s^2
  double A1 = 1.0;
  /// The construction stopped at x_stop before reaching E; j, A and the
  /// closing point then refer to the materialized prefix only.
  bool truncated = false;

  int cells() const { return static_cast<int>(t.size()) - 1; }
};

/// Builds the partition; with a finite x_stop only the prefix up to the first
/// point >= x_stop (followed by extra_points further steps) is materialized. Throws std::domain_error for inadmissible
/// h or fewer than four points below E, std::logic_error on an invariant
/// violation.
Partition build_partition(const GammaFunction& g, int r, double h, double A1, double A2,
                          double x_stop = std::numeric_limits<double>::infinity(),
                          int extra_points = 0);

/// Index of the first point that breaks one of the ratio laws, or -1.
int check_partition(const Partition& p);

/// The C-infinity step psi(s) = e(s) / (e(s) + e(1 - s)), e(u) = exp(-1/u), and
/// its derivatives (order <= 4).
double psi_eval(double s, int order);
/// max over orders nu <= r of sup |psi^{(nu)}|.
double psi_sup_bound(int r);

/// psi_k(x) = psi((gamma(x) - gamma(y_k)) / (gamma(t_{k+1}) - gamma(y_k))).
struct BumpFamily {
  Partition part;
  GammaFunction gamma;
  std::vector<double> gt;  ///< gamma(t_k)
  std::vector<double> y;   ///< midpoints y_k, k = 0..cells-1
  std::vector<double> gy;  ///< gamma(y_k)

  BumpFamily(Partition p, const GammaFunction& g);
  /// Number of bumps with a right neighbour (k = 0..cells-1).
  int size() const { return static_cast<int>(y.size()); }
};

/// Order-th gamma-derivative of psi_k at x.
double psi_k_gamma_derivative(const BumpFamily& b, int k, double x, int order);

/// Density of the sum of n independent uniforms on (0, 1).
double irwin_hall_pdf(int n, double x);

/// f_{gamma,tau,s}(x) = int_0^1 sum_l (-1)^{l+1} C(r,l) f(x + l gamma^{-1}(tau) s u) d_r(u) du.
double steklov_value(const RealFunction& f, const GammaFunction& g, int r, double tau, double s,
                     double x, const QuadratureConfig& cfg = {});

/// m-th classical derivative (1 <= m <= r) of the Steklov function through
/// the difference identities.
double steklov_classical_derivative(const RealFunction& f, const GammaFunction& g, int r,
                                    double tau, double s, double x, int m,
                                    const QuadratureConfig& cfg = {});

/// 2 max{1, 2 r^2 gamma(a_1) / (a_1 sum_k beta_k a_k^{beta_k - 1})}.
double default_steklov_parameter(const GammaFunction& g, int r);
/// The strict lower bound the parameter has to exceed.
double steklov_parameter_bound(const GammaFunction& g, int r);

struct SteklovSettings {
  int tau_nodes = 6;  ///< Gauss-Legendre nodes for the average over tau
  int u_order = 8;    ///< Gauss-Legendre order per smooth piece of the u-integral
};

/// G_{gamma,h} = sum_k F_k psi_{k-1} (1 - psi_k). The optional mask replaces
/// selected F_k by f itself; with every entry false except near the kinks of f
/// this gives the kink-local variant (f away from its kinks, Steklov averages
/// around them).
class SteklovApproximant {
 public:
  SteklovApproximant(RealFunction f, const GammaFunction& g, int r, double h, Partition part,
                     double a, SteklovSettings settings = {}, std::vector<char> steklov_mask = {});

  const Partition& partition() const { return bumps_.part; }
  const BumpFamily& bumps() const { return bumps_; }
  double parameter() const { return a_; }
  int r() const { return r_; }

  /// Cell index i with t_i <= x < t_{i+1} (clamped to the materialized range).
  int cell_of(double x) const;

  double value(double x) const;
  /// Sum form over all k.
  double value_sum_form(double x) const;
  /// (1 - psi_i) F_i + psi_i F_{i+1} on interior cells.
  double value_convex_form(double x) const;

  /// gamma-derivatives of G of orders 0..r at x, into out[0..r].
  void gamma_jet(double x, double* out) const;

  /// F_{gamma,h,k}(x) and its classical derivatives of orders 0..r.
  void F_classical(int k, double x, double* out) const;
  double F(int k, double x) const;
  /// gamma-derivatives of orders 0..r of the k-th piece (F_k or f).
  void piece_gamma_jet(int k, double x, double* out) const;
  bool is_steklov_piece(int k) const;
  /// The range [lo, hi] outside which G coincides with f (kink-local variant),
  /// as a list of closed intervals.
  std::vector<std::pair<double, double>> steklov_support() const;

 private:
  RealFunction f_;
  GammaFunction g_;
  int r_;
  double h_;
  double a_;
  SteklovSettings settings_;
  BumpFamily bumps_;
  std::vector<char> mask_;
  std::vector<double> sigma_;   // gamma^{-1}(tau_q)
  std::vector<double> tau_w_;   // normalized tau weights
  std::vector<double> kinks_;

  // First two pieces of cell i and whether a blend is needed.
  void cell_pieces(int i, int& left, int& right) const;
};

/// Marks the pieces k that have to be Steklov averages so that every kink of
/// f lies in a cell without raw f pieces (plus one cell of margin each side).
std::vector<char> local_steklov_mask(const Partition& p, const std::vector<double>& kinks);

/// Classical derivatives 0..upto of the Steklov function with step S =
/// gamma^{-1}(tau) s, using fixed Gauss-Legendre pieces split at the
/// Irwin-Hall knots and at kink pre-images.
void steklov_jet_fixed(const RealFunction& f, int r, double S, double x,
                       const std::vector<double>& kinks, int u_order, int upto, double* out);

}  // namespace gammak
