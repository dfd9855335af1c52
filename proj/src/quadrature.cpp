#include "gammak/quadrature.hpp"

#include <array>
#include <numbers>

namespace gammak {

void validate(const QuadratureConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
    throw std::invalid_argument("quadrature tolerances must be positive");
  if (cfg.max_subdivisions < 1) throw std::invalid_argument("max_subdivisions must be >= 1");
  if (cfg.sup_grid_density < 1) throw std::invalid_argument("sup_grid_density must be >= 1");
}

namespace {

GaussRule make_rule(int n) {
  GaussRule g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = w;
    g.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return g;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  constexpr int kMax = 64;
  static const std::array<GaussRule, kMax + 1> rules = [] {
    std::array<GaussRule, kMax + 1> r;
    for (int i = 1; i <= kMax; ++i) r[i] = make_rule(i);
    return r;
  }();
  if (n < 1 || n > kMax) throw std::invalid_argument("Gauss-Legendre order must be in [1, 64]");
  return rules[n];
}

NodeSet composite_nodes(double lo, double hi, const std::vector<double>& breakpoints,
                        double max_panel, int order, int grading) {
  NodeSet ns;
  if (!(hi > lo)) return ns;
  std::vector<double> cuts{lo};
  for (double b : breakpoints)
    if (b > lo && b < hi) cuts.push_back(b);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const GaussRule& rule = gauss_legendre(order);
  auto add_panel = [&](double a, double b) {
    if (!(b > a)) return;
    const int m = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
    const double len = (b - a) / m;
    for (int q = 0; q < m; ++q) {
      const double pa = a + q * len;
      const double half = 0.5 * len, mid = pa + half;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        ns.x.push_back(mid + half * rule.nodes[k]);
        ns.w.push_back(half * rule.weights[k]);
      }
    }
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1], L = b - a;
    std::vector<double> pts{a, b, a + 0.5 * L};
    double d = 0.5 * L;
    for (int k = 0; k < grading; ++k) {
      d *= 0.5;
      pts.push_back(a + d);
      pts.push_back(b - d);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) add_panel(pts[k], pts[k + 1]);
  }
  return ns;
}

}  // namespace gammak
