#pragma once

#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "gammak/modulus.hpp"
#include "gammak/steklov.hpp"

namespace gammak {

enum class KVariant { restricted, full };
std::string to_string(KVariant v);

/// A constructive upper bound of a K-functional. For the restricted variant
/// the terms are those of the achieving h (the sup over the grid).
struct KEstimate {
  double t = 0.0;
  double value = 0.0;
  double approx_error_term = 0.0;
  double seminorm_term = 0.0;
  std::string candidate_id;
  KVariant variant = KVariant::restricted;
  double h_star = 0.0;
  std::vector<double> h_grid;
  std::vector<double> per_h_values;
  std::vector<std::string> per_h_candidates;
  /// Notes on skipped candidates ("steklov_G over budget at h = ...").
  std::string notes;
};

struct CandidateSet {
  bool zero = true;
  bool window_poly = true;  ///< best gamma-polynomial of degree r-1 (global one for the full variant)
  bool f_itself = true;     ///< only used when f lies in the gamma-Sobolev class of order r
  bool steklov = true;      ///< G assembled on the whole partition
  bool steklov_local = true;
  bool glued = true;        ///< full variant only
};

struct KOptions {
  CandidateSet candidates;
  SteklovSettings steklov;
  double steklov_parameter = 0.0;  ///< 0 selects the default
  /// G is skipped for partitions with more cells than this below the cut.
  int cell_budget = 1500;
  int nodes_per_half_cell = 8;
};

/// Evaluated G on a fixed node set: node x, weight, f - G and the
/// gamma-derivatives of G of orders 0..r. Independent of p and alpha.
struct SteklovNodes {
  bool available = false;
  std::string status;
  int r = 1;
  double h = 0.0;
  std::shared_ptr<const SteklovApproximant> approx;
  std::vector<double> x, w, diff, jet;
  std::vector<int> cell;
  /// Intervals where G differs from f (the whole covered range for full G).
  std::vector<std::pair<double, double>> support;
};

/// Shares assembled G data across (p, alpha) and between the restricted and
/// full variants.
class SteklovCache {
 public:
  std::shared_ptr<const SteklovNodes> get(const RealFunction& f, const GammaFunction& g, int r,
                                          double h, double x_stop, bool local,
                                          const AnalysisConfig& cfg, const KOptions& opt);
  std::size_t size() const { return map_.size(); }

 private:
  std::map<std::tuple<std::string, int, double, double, bool>, std::shared_ptr<const SteklovNodes>>
      map_;
};

/// sup over the h-grid of min over candidates of
/// ||(f - g) w_alpha||_{L^p(I)} + h^r ||g_gamma^{(r)} phi^r w_alpha||_{L^p(I)}, I = I_{rh}.
KEstimate restricted_k_upper(const RealFunction& f, const GammaFunction& g, int r, double t,
                             const LpExponent& p, double alpha, const AnalysisConfig& cfg,
                             const KOptions& opt = {}, SteklovCache* cache = nullptr);

/// Same for several (p, alpha) pairs, sharing the assembled G.
std::vector<KEstimate> restricted_k_upper_batch(
    const RealFunction& f, const GammaFunction& g, int r, double t,
    const std::vector<std::pair<LpExponent, double>>& p_alpha, const AnalysisConfig& cfg,
    const KOptions& opt = {}, SteklovCache* cache = nullptr);

/// min over candidates of ||(f - g) w_alpha||_{L^p(0,inf)} + t^r ||g_gamma^{(r)} phi^r w_alpha||.
KEstimate full_k_upper(const RealFunction& f, const GammaFunction& g, int r, double t,
                       const LpExponent& p, double alpha, const AnalysisConfig& cfg,
                       const KOptions& opt = {}, SteklovCache* cache = nullptr);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs: the r-th forward difference with step gamma^{-1}(h) sqrt(x). rhs for
/// r = 1: int_0^s f_gamma'(x+u) gamma'(x+u) du; for r = 2: the nested
/// integral of f'' over (0, s)^2.
IdentityCheck difference_integral_identity_check(const RealFunction& f, const GammaFunction& g,
                                                 int r, double h, double x,
                                                 const QuadratureConfig& cfg = {});

/// ||f_gamma^{(r)} phi^r w_alpha||_{L^p(lo, hi)} from the closed-form derivatives.
double gamma_seminorm(const RealFunction& f, const GammaFunction& g, int r, const LpExponent& p,
                      double alpha, double lo, double hi, const QuadratureConfig& cfg);

}  // namespace gammak
