#include "gammak/modulus.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace gammak {

std::vector<double> AnalysisConfig::h_grid(double t) const {
  if (n_h < 1 || !(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("h-grid needs n_h >= 1 and 0 < rho < 1");
  std::vector<double> hs(n_h);
  double h = t;
  for (int i = 0; i < n_h; ++i, h *= rho) hs[i] = h;
  return hs;
}

double forward_difference_step(const RealFunction& f, int r, double s, double x) {
  double acc = 0.0;
  for (int k = 0; k <= r; ++k) {
    const double xk = x + k * s;
    if (!f.in_domain(xk) && !(xk == f.lo && xk >= 0.0)) {
      std::ostringstream os;
      os << "difference node k = " << k << " at x = " << xk << " lies outside the domain of "
         << f.id;
      throw std::domain_error(os.str());
    }
    const double c = binomial(r, k) * ((r - k) % 2 == 0 ? 1.0 : -1.0);
    acc += c * f(xk);
  }
  return acc;
}

double forward_difference(const RealFunction& f, const GammaFunction& g, int r, double h, double x) {
  if (r < 1) throw std::invalid_argument("difference order must be >= 1");
  if (!(x > 0.0)) throw std::domain_error("forward difference needs x > 0");
  return forward_difference_step(f, r, g.inverse(h) * std::sqrt(x), x);
}

std::vector<double> difference_breakpoints(const std::vector<double>& kinks, int r, double step) {
  std::vector<double> out;
  for (double kappa : kinks) {
    if (!(kappa > 0.0)) continue;
    for (int k = 0; k <= r; ++k) {
      const double b = k * step;
      const double u = 0.5 * (-b + std::sqrt(b * b + 4.0 * kappa));
      out.push_back(u * u);
    }
  }
  return out;
}

namespace {

std::vector<double> kinks_of(const RealFunction& f, const GammaFunction& g) {
  std::vector<double> k = f.kinks;
  for (double b : g.breakpoints()) k.push_back(b);
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

}  // namespace

double window_difference_norm(const RealFunction& f, const GammaFunction& g, int r, double h,
                              const LpExponent& p, double alpha, const AnalysisConfig& cfg) {
  const auto& c = cfg.constants;
  const WindowInterval w = window_interval(g, r, h, c.A1, c.A2);
  const double hi = std::min(w.hi, cfg.x_cut(alpha));
  if (!(hi > w.lo)) return 0.0;
  const auto bps = difference_breakpoints(kinks_of(f, g), r, w.s);
  auto d = [&](double x) { return forward_difference_step(f, r, w.s * std::sqrt(x), x); };
  return weighted_norm(d, alpha, NormSpec{p, w.lo, hi}, cfg.quad, bps);
}

MainModulus main_modulus(const RealFunction& f, const GammaFunction& g, int r, double t,
                         const LpExponent& p, double alpha, const AnalysisConfig& cfg) {
  if (!(t > 0.0)) throw std::invalid_argument("modulus needs t > 0");
  const auto& c = cfg.constants;
  const double bound = admissibility_bound(g, r, c.A1, c.A2);
  if (t > bound * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "t = " << t << " exceeds the admissible range h <= " << bound << " for r = " << r;
    throw std::domain_error(os.str());
  }
  MainModulus m;
  m.h_grid = cfg.h_grid(t);
  for (double h : m.h_grid) {
    const double v = window_difference_norm(f, g, r, h, p, alpha, cfg);
    m.per_h_norms.push_back(v);
    m.omega = std::max(m.omega, v);
  }
  return m;
}

namespace {

// Samples for the discrete fits: basis values in the scaled variable
// u = (gamma(x) - center) / scale, weighted targets and quadrature weights.
struct FitData {
  std::vector<double> x, u, wq, wa, fv;
  double center = 0.0, scale = 1.0;
};

FitData fit_data(const RealFunction& f, const GammaFunction& g, double alpha, double lo, double hi,
                 const std::vector<double>& bps) {
  FitData d;
  const double panel = std::max(0.25, (hi - lo) / 64.0);
  const NodeSet ns = composite_nodes(lo, hi, bps, panel, 12, 16);
  const LaguerreWeight w{alpha};
  const double ylo = g(lo), yhi = g(hi);
  d.center = 0.5 * (ylo + yhi);
  d.scale = std::max(0.5 * (yhi - ylo), 1e-300);
  for (std::size_t i = 0; i < ns.x.size(); ++i) {
    const double x = ns.x[i];
    const double wa = w(x);
    if (!(wa > 0.0)) continue;
    d.x.push_back(x);
    d.u.push_back((g(x) - d.center) / d.scale);
    d.wq.push_back(ns.w[i]);
    d.wa.push_back(wa);
    d.fv.push_back(f(x));
  }
  return d;
}

Eigen::MatrixXd monomial_basis(const FitData& d, int n) {
  Eigen::MatrixXd B(d.x.size(), n);
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    double v = 1.0;
    for (int k = 0; k < n; ++k, v *= d.u[i]) B(i, k) = v;
  }
  return B;
}

Eigen::MatrixXd legendre_basis(const FitData& d, int n) {
  Eigen::MatrixXd B(d.x.size(), n);
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    double p0 = 1.0, p1 = d.u[i];
    for (int k = 0; k < n; ++k) {
      if (k == 0) B(i, k) = p0;
      else if (k == 1) B(i, k) = p1;
      else {
        const double p2 = ((2.0 * k - 1.0) * d.u[i] * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
        B(i, k) = p2;
      }
    }
  }
  return B;
}

// Monomial coefficients of P_0..P_{n-1}: row k holds P_k.
Eigen::MatrixXd legendre_to_monomial(int n) {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  C(0, 0) = 1.0;
  if (n > 1) C(1, 1) = 1.0;
  for (int k = 2; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double v = -(k - 1.0) * C(k - 2, j);
      if (j > 0) v += (2.0 * k - 1.0) * C(k - 1, j - 1);
      C(k, j) = v / k;
    }
  return C;
}

double condition_number(const Eigen::MatrixXd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 1.0;
  const double smin = sv(sv.size() - 1);
  return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

// Least squares in the scaled monomial basis, with a Legendre retry.
Eigen::VectorXd weighted_ls(const FitData& d, int n, double& cond, bool& retried) {
  const int m = static_cast<int>(d.x.size());
  Eigen::VectorXd rw(m), rhs(m);
  for (int i = 0; i < m; ++i) {
    rw(i) = std::sqrt(d.wq[i]) * d.wa[i];
    rhs(i) = rw(i) * d.fv[i];
  }
  Eigen::MatrixXd A = rw.asDiagonal() * monomial_basis(d, n);
  cond = condition_number(A);
  retried = false;
  if (cond < 1e10) return A.colPivHouseholderQr().solve(rhs);
  retried = true;
  Eigen::MatrixXd L = rw.asDiagonal() * legendre_basis(d, n);
  const double lc = condition_number(L);
  if (!(lc < 1e12)) {
    std::ostringstream os;
    os << "best approximation basis is ill-conditioned (condition estimate " << lc << ")";
    throw IllConditionedError(os.str(), lc);
  }
  cond = lc;
  const Eigen::VectorXd a = L.colPivHouseholderQr().solve(rhs);
  return legendre_to_monomial(n).transpose() * a;
}

double eval_u(const Eigen::VectorXd& c, double u) {
  double v = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) v = v * u + c(k);
  return v;
}

// Discrete weighted minimax by single-point Remez exchange. The scaled gamma
// powers form a Chebyshev system on any set of distinct x, because gamma is
// strictly increasing.
Eigen::VectorXd discrete_minimax(const FitData& d, int n, Eigen::VectorXd c) {
  const int m = static_cast<int>(d.x.size());
  if (m < n + 1) return c;
  auto err = [&](const Eigen::VectorXd& cc, int i) { return d.wa[i] * (d.fv[i] - eval_u(cc, d.u[i])); };
  std::vector<int> ref(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double th = M_PI * (n - i) / n;
    const double target = n == 0 ? 0.0 : std::cos(th);
    const auto it = std::lower_bound(d.u.begin(), d.u.end(), target);
    ref[i] = std::clamp(static_cast<int>(it - d.u.begin()), 0, m - 1);
  }
  for (int i = 1; i <= n; ++i)
    if (ref[i] <= ref[i - 1]) ref[i] = ref[i - 1] + 1;
  for (int i = n; i >= 0; --i)
    if (ref[i] > m - 1 - (n - i)) ref[i] = m - 1 - (n - i);
  for (int i = 1; i <= n; ++i)
    if (ref[i] <= ref[i - 1]) return c;

  Eigen::VectorXd best = c;
  double best_max = 0.0;
  for (int i = 0; i < m; ++i) best_max = std::max(best_max, std::abs(err(c, i)));
  for (int it = 0; it < 200; ++it) {
    Eigen::MatrixXd A(n + 1, n + 1);
    Eigen::VectorXd b(n + 1);
    for (int i = 0; i <= n; ++i) {
      const int j = ref[i];
      double v = 1.0;
      for (int k = 0; k < n; ++k, v *= d.u[j]) A(i, k) = d.wa[j] * v;
      A(i, n) = (i % 2 == 0) ? 1.0 : -1.0;
      b(i) = d.wa[j] * d.fv[j];
    }
    const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
    if (!sol.allFinite()) break;
    Eigen::VectorXd cc = sol.head(n);
    const double E = std::abs(sol(n));
    int jmax = 0;
    double emax = 0.0;
    for (int i = 0; i < m; ++i) {
      const double e = std::abs(err(cc, i));
      if (e > emax) {
        emax = e;
        jmax = i;
      }
    }
    if (emax < best_max) {
      best_max = emax;
      best = cc;
    }
    if (emax <= E * (1.0 + 1e-9) + 1e-300) break;
    if (std::find(ref.begin(), ref.end(), jmax) != ref.end()) break;
    const double sj = err(cc, jmax) >= 0.0 ? 1.0 : -1.0;
    auto sgn_at = [&](int q) { return err(cc, ref[q]) >= 0.0 ? 1.0 : -1.0; };
    if (jmax < ref.front()) {
      if (sj == sgn_at(0)) ref.front() = jmax;
      else {
        ref.insert(ref.begin(), jmax);
        ref.pop_back();
      }
    } else if (jmax > ref.back()) {
      if (sj == sgn_at(n)) ref.back() = jmax;
      else {
        ref.push_back(jmax);
        ref.erase(ref.begin());
      }
    } else {
      for (int q = 0; q < n; ++q) {
        if (ref[q] < jmax && jmax < ref[q + 1]) {
          if (sj == sgn_at(q)) ref[q] = jmax;
          else ref[q + 1] = jmax;
          break;
        }
      }
    }
  }
  return best;
}

// Discrete weighted L^p objective (finite p != 2): iteratively reweighted
// least squares from the p = 2 solution, then coordinate descent with
// golden-section line searches. The lowest objective seen is returned.
Eigen::VectorXd discrete_lp(const FitData& d, int n, Eigen::VectorXd c, double p) {
  const int m = static_cast<int>(d.x.size());
  auto obj = [&](const Eigen::VectorXd& cc) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double e = d.wa[i] * std::abs(d.fv[i] - eval_u(cc, d.u[i]));
      s += d.wq[i] * (p == 1.0 ? e : std::pow(e, p));
    }
    return s;
  };
  double scale = 0.0;
  for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(d.wa[i] * d.fv[i]));
  scale = std::max(scale, 1e-300);

  double cur = obj(c);
  const Eigen::MatrixXd B = monomial_basis(d, n);
  for (int it = 0; it < 60; ++it) {
    Eigen::VectorXd rw(m), rhs(m);
    for (int i = 0; i < m; ++i) {
      const double e = d.wa[i] * std::abs(d.fv[i] - eval_u(c, d.u[i]));
      const double w = d.wq[i] * std::pow(d.wa[i], 2.0) * std::pow(std::max(e, 1e-12 * scale), p - 2.0);
      rw(i) = std::sqrt(w);
      rhs(i) = rw(i) * d.fv[i];
    }
    const Eigen::VectorXd next = (rw.asDiagonal() * B).colPivHouseholderQr().solve(rhs);
    if (!next.allFinite()) break;
    const double v = obj(next);
    if (!(v < cur)) break;
    const bool small = cur - v <= 1e-12 * cur;
    c = next;
    cur = v;
    if (small) break;
  }

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double before = cur;
    for (int k = 0; k < n; ++k) {
      auto along = [&](double v) {
        Eigen::VectorXd t = c;
        t(k) = v;
        return obj(t);
      };
      double delta = std::max(std::abs(c(k)), scale) * 0.5;
      double a = c(k) - delta, b = c(k) + delta;
      // Widen until the bracket holds an interior minimum.
      for (int e = 0; e < 40 && along(a) < cur; ++e) a -= (delta *= 2.0);
      for (int e = 0; e < 40 && along(b) < cur; ++e) b += (delta *= 2.0);
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = along(x1), f2 = along(x2);
      for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = along(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = along(x2);
        }
      }
      const double v = f1 < f2 ? x1 : x2;
      const double fv = std::min(f1, f2);
      if (fv < cur) {
        c(k) = v;
        cur = fv;
      }
    }
    if (before - cur <= 1e-13 * std::max(before, 1e-300)) break;
  }
  return c;
}

}  // namespace

BestPolynomial best_gamma_poly_error(const RealFunction& f, const GammaFunction& g, int deg,
                                     const LpExponent& p, double alpha, double lo, double hi,
                                     const AnalysisConfig& cfg) {
  if (deg < 0) throw std::invalid_argument("polynomial degree must be >= 0");
  if (!(lo >= 0.0) || !(hi > lo)) throw std::invalid_argument("best approximation needs 0 <= lo < hi");
  const double top = std::min(hi, cfg.x_cut(alpha));
  BestPolynomial out{0.0, GammaPolynomial({0.0}, g), 1.0, false};
  if (!(top > lo)) return out;

  const auto bps = kinks_of(f, g);
  const FitData d = fit_data(f, g, alpha, lo, top, bps);
  const int n = deg + 1;
  if (d.x.empty()) return out;
  Eigen::VectorXd c = weighted_ls(d, n, out.condition, out.orthogonal_retry);
  if (p.is_infinite()) c = discrete_minimax(d, n, c);
  else if (p.value() != 2.0) c = discrete_lp(d, n, c, p.value());

  // Back to powers of (gamma - center).
  std::vector<double> coeffs(n);
  double sk = 1.0;
  for (int k = 0; k < n; ++k, sk *= d.scale) coeffs[k] = c(k) / sk;
  out.poly = GammaPolynomial(coeffs, g, d.center);
  const GammaPolynomial& q = out.poly;
  auto resid = [&](double x) { return f(x) - q(x); };
  out.error = weighted_norm(resid, alpha, NormSpec{p, lo, top}, cfg.quad, bps);
  return out;
}

ModulusResult complete_modulus(const RealFunction& f, const GammaFunction& g, int r, double t,
                               const LpExponent& p, double alpha, const AnalysisConfig& cfg) {
  ModulusResult res;
  res.t = t;
  const MainModulus m = main_modulus(f, g, r, t, p, alpha, cfg);
  res.omega_main = m.omega;
  res.h_grid = m.h_grid;
  res.per_h_norms = m.per_h_norms;
  const double s = g.inverse(t);
  const auto& c = cfg.constants;
  const double z = 4.0 * c.A1 * r * r * s * s;
  const double inf_lo = c.A2 / (s * s);
  const auto b0 = best_gamma_poly_error(f, g, r - 1, p, alpha, 0.0, z, cfg);
  const auto b1 = best_gamma_poly_error(f, g, r - 1, p, alpha, inf_lo,
                                        std::numeric_limits<double>::infinity(), cfg);
  res.tail_zero = b0.error;
  res.tail_infinity = b1.error;
  res.achieving_polys = {b0.poly, b1.poly};
  res.omega_complete = res.omega_main + res.tail_zero + res.tail_infinity;
  return res;
}

}  // namespace gammak
