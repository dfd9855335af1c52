#include "gammak/steklov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "gammak/weights.hpp"

namespace gammak {

// Slightly below 1 so that both ratio laws hold in floating point even where
// the unit step would land one ulp past a bound (t_1 / t_0 for r = 1, and the
// rounded differences of large neighbouring points).
constexpr double kStepFactor = 1.0 - 1e-8;

Partition build_partition(const GammaFunction& g, int r, double h, double A1, double A2,
                          double x_stop, int extra_points) {
  const WindowInterval w = window_interval(g, r, h, A1, A2);
  Partition p;
  p.h = h;
  p.r = r;
  p.s = w.s;
  p.E = w.hi;
  p.A1 = A1;
  const double stop = std::min(p.E, x_stop);
  const double estimate = 2.0 * (std::sqrt(stop) - std::sqrt(w.lo)) / w.s;
  if (estimate > 2e7) {
    std::ostringstream os;
    os << "partition for h = " << h << " would need about " << estimate << " points";
    throw std::length_error(os.str());
  }
  p.t.reserve(static_cast<std::size_t>(estimate) + 4);
  p.t.push_back(w.lo);
  int extra = 0;
  while (p.t.back() < p.E) {
    if (p.t.back() >= x_stop && extra++ >= extra_points) {
      p.truncated = true;
      break;
    }
    const double ti = p.t.back();
    p.t.push_back(ti + kStepFactor * w.s * std::sqrt(ti));
  }
  const int n = static_cast<int>(p.t.size()) - 1;
  p.j = n - 1;
  p.A = p.t.back() / p.E;
  const double xl = g.is_affine() ? std::numeric_limits<double>::infinity() : g.x_lin();
  p.M = -1;
  for (int i = 0; i < n; ++i)
    if (p.t[i] < xl && xl <= p.t[i + 1]) {
      p.M = i;
      break;
    }
  if (!p.truncated && p.j < 3) {
    std::ostringstream os;
    os << "partition for h = " << h << " has j = " << p.j
       << " < 3; h is too close to the admissibility bound";
    throw std::domain_error(os.str());
  }
  const int bad = check_partition(p);
  if (bad >= 0) {
    std::ostringstream os;
    os << "partition invariant violated at index " << bad;
    throw std::logic_error(os.str());
  }
  return p;
}

int check_partition(const Partition& p) {
  const double q = (1.0 + 2.0 * std::sqrt(p.A1)) / (2.0 * std::sqrt(p.A1));
  for (std::size_t i = 0; i + 1 < p.t.size(); ++i) {
    const double step = (p.t[i + 1] - p.t[i]) / (p.s * std::sqrt(p.t[i]));
    if (!(step >= 1.0 / (2.0 * p.r) && step <= p.r)) return static_cast<int>(i);
    const double ratio = p.t[i + 1] / p.t[i];
    if (!(ratio >= 1.0 && ratio <= q)) return static_cast<int>(i);
  }
  if (!p.truncated) {
    if (!(p.A >= 1.0 && p.A < q)) return p.j + 1;
    if (!(p.t[p.j] < p.E && p.E <= p.t[p.j + 1])) return p.j;
  }
  return -1;
}

namespace {

using Jet = std::array<double, 5>;

Jet jmul(const Jet& a, const Jet& b) {
  Jet c{};
  for (int k = 0; k < 5; ++k)
    for (int i = 0; i <= k; ++i) c[k] += a[i] * b[k - i];
  return c;
}

Jet jrecip(const Jet& a) {
  Jet r{};
  r[0] = 1.0 / a[0];
  for (int k = 1; k < 5; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += a[i] * r[k - i];
    r[k] = -s / a[0];
  }
  return r;
}

Jet jexp(const Jet& a) {
  Jet e{};
  e[0] = std::exp(a[0]);
  for (int k = 1; k < 5; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += i * a[i] * e[k - i];
    e[k] = s / k;
  }
  return e;
}

// exp(-1/u) as a Taylor jet in s, where u = u0 + du * (s - s0).
Jet bump_jet(double u0, double du) {
  Jet u{u0, du, 0.0, 0.0, 0.0};
  Jet inv = jrecip(u);
  for (double& v : inv) v = -v;
  return jexp(inv);
}

}  // namespace

double psi_eval(double s, int order) {
  if (order < 0 || order > 4) throw std::invalid_argument("psi derivatives are available up to order 4");
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return order == 0 ? 1.0 : 0.0;
  // Every operation here rounds monotonically, so the values stay monotone.
  if (order == 0) return 1.0 / (1.0 + std::exp(1.0 / s - 1.0 / (1.0 - s)));
  const Jet e1 = bump_jet(s, 1.0);
  const Jet e2 = bump_jet(1.0 - s, -1.0);
  Jet den{};
  for (int k = 0; k < 5; ++k) den[k] = e1[k] + e2[k];
  const Jet q = jmul(e1, jrecip(den));
  return q[order] * factorial(order);
}

double psi_sup_bound(int r) {
  static std::mutex mu;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(r); it != cache.end()) return it->second;
  double best = 1.0;
  for (int nu = 1; nu <= std::min(r, 4); ++nu)
    for (int i = 1; i < 20000; ++i) best = std::max(best, std::abs(psi_eval(i / 20000.0, nu)));
  cache[r] = best;
  return best;
}

BumpFamily::BumpFamily(Partition p, const GammaFunction& g) : part(std::move(p)), gamma(g) {
  gt.reserve(part.t.size());
  for (double t : part.t) gt.push_back(gamma(t));
  const int n = part.cells();
  y.resize(n);
  gy.resize(n);
  for (int k = 0; k < n; ++k) {
    gy[k] = 0.5 * (gt[k] + gt[k + 1]);
    y[k] = gamma.inverse(gy[k]);
  }
}

double psi_k_gamma_derivative(const BumpFamily& b, int k, double x, int order) {
  if (order < 0 || order > 4) throw std::invalid_argument("psi derivatives are available up to order 4");
  if (k <= 0) return order == 0 ? 1.0 : 0.0;
  if ((!b.part.truncated && k >= b.part.j) || k >= b.size()) return 0.0;
  const double D = b.gt[k + 1] - b.gy[k];
  const double arg = (b.gamma(x) - b.gy[k]) / D;
  return psi_eval(arg, order) / std::pow(D, order);
}

double irwin_hall_pdf(int n, double x) {
  if (n < 1) throw std::invalid_argument("Irwin-Hall order must be >= 1");
  if (!(x > 0.0) || !(x < n)) return 0.0;
  double s = 0.0;
  const int top = static_cast<int>(std::floor(x));
  for (int k = 0; k <= top; ++k)
    s += ((k % 2) ? -1.0 : 1.0) * binomial(n, k) * std::pow(x - k, n - 1);
  return s / factorial(n - 1);
}

namespace {

double delta_step(const RealFunction& f, int m, double step, double y) {
  double acc = 0.0;
  for (int q = 0; q <= m; ++q)
    acc += (((m - q) % 2) ? -1.0 : 1.0) * binomial(m, q) * f(y + q * step);
  return acc;
}

double coeff(int r, int l) { return ((l + 1) % 2 ? -1.0 : 1.0) * binomial(r, l); }

double check_step(const GammaFunction& g, double tau, double s) {
  if (!(tau > 0.0) || !(s > 0.0)) throw std::invalid_argument("Steklov step needs tau > 0 and s > 0");
  return g.inverse(tau) * s;
}

}  // namespace

double steklov_value(const RealFunction& f, const GammaFunction& g, int r, double tau, double s,
                     double x, const QuadratureConfig& cfg) {
  if (r < 1) throw std::invalid_argument("Steklov order must be >= 1");
  const double S = check_step(g, tau, s);
  std::vector<double> bps;
  for (int k = 1; k < r; ++k) bps.push_back(static_cast<double>(k) / r);
  for (double kappa : f.kinks)
    for (int l = 1; l <= r; ++l) bps.push_back((kappa - x) / (l * S));
  auto integrand = [&](double u) {
    double acc = 0.0;
    for (int l = 1; l <= r; ++l) acc += coeff(r, l) * f(x + l * S * u);
    return acc * r * irwin_hall_pdf(r, r * u);
  };
  const auto res = integrate(integrand, 0.0, 1.0, cfg, bps);
  if (!res.converged) throw QuadratureError("Steklov integral did not converge", res.value, res.error);
  return res.value;
}

double steklov_classical_derivative(const RealFunction& f, const GammaFunction& g, int r,
                                    double tau, double s, double x, int m,
                                    const QuadratureConfig& cfg) {
  if (m < 1 || m > r) throw std::invalid_argument("Steklov derivative order must lie in 1..r");
  const double S = check_step(g, tau, s);
  const int n = r - m;
  double total = 0.0;
  for (int l = 1; l <= r; ++l) {
    const double L = l * S;
    const double step = L / r;
    double part;
    if (n == 0) {
      part = delta_step(f, m, step, x);
    } else {
      std::vector<double> bps;
      for (int k = 1; k < n; ++k) bps.push_back(static_cast<double>(k) / r);
      for (double kappa : f.kinks)
        for (int q = 0; q <= m; ++q) bps.push_back((kappa - x - q * step) / L);
      auto integrand = [&](double v) {
        return delta_step(f, m, step, x + L * v) * r * irwin_hall_pdf(n, r * v);
      };
      const auto res = integrate(integrand, 0.0, static_cast<double>(n) / r, cfg, bps);
      if (!res.converged)
        throw QuadratureError("Steklov derivative integral did not converge", res.value, res.error);
      part = res.value;
    }
    total += coeff(r, l) * std::pow(r / L, m) * part;
  }
  return total;
}

void steklov_jet_fixed(const RealFunction& f, int r, double S, double x,
                       const std::vector<double>& kinks, int u_order, int upto, double* out) {
  const GaussRule& rule = gauss_legendre(u_order);
  for (int m = 0; m <= upto; ++m) out[m] = 0.0;
  std::vector<double> cuts;
  for (int l = 1; l <= r; ++l) {
    const double L = l * S;
    const double step = L / r;
    const double cl = coeff(r, l);
    for (int m = 0; m <= upto; ++m) {
      const int n = r - m;
      double part = 0.0;
      if (n == 0) {
        part = delta_step(f, m, step, x);
      } else {
        const double vmax = static_cast<double>(n) / r;
        cuts.clear();
        for (int k = 0; k <= n; ++k) cuts.push_back(static_cast<double>(k) / r);
        for (double kappa : kinks)
          for (int q = 0; q <= m; ++q) {
            const double v = (kappa - x - q * step) / L;
            if (v > 0.0 && v < vmax) cuts.push_back(v);
          }
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
          const double a = cuts[c], b = cuts[c + 1];
          if (!(b > a)) continue;
          const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
          for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double v = mid + half * rule.nodes[k];
            const double dens = n == 1 ? r : r * irwin_hall_pdf(n, r * v);
            part += half * rule.weights[k] * dens * delta_step(f, m, step, x + L * v);
          }
        }
      }
      out[m] += cl * std::pow(r / L, m) * part;
    }
  }
}

double steklov_parameter_bound(const GammaFunction& g, int r) {
  if (g.is_affine()) return 1.0;
  const double a1 = g.singular_points().front();
  return std::max(1.0, 2.0 * r * r * g(a1) / (a1 * g.slope_at_zero()));
}

double default_steklov_parameter(const GammaFunction& g, int r) {
  return 2.0 * steklov_parameter_bound(g, r);
}

std::vector<char> local_steklov_mask(const Partition& p, const std::vector<double>& kinks) {
  const int n = p.cells();
  std::vector<char> mask(n + 1, 0);
  for (double kappa : kinks) {
    if (!(kappa >= p.t.front() && kappa < p.t.back())) continue;
    const int i = static_cast<int>(std::upper_bound(p.t.begin(), p.t.end(), kappa) - p.t.begin()) - 1;
    for (int k = std::max(1, i - 1); k <= std::min(n, i + 2); ++k) mask[k] = 1;
  }
  return mask;
}

SteklovApproximant::SteklovApproximant(RealFunction f, const GammaFunction& g, int r, double h,
                                       Partition part, double a, SteklovSettings settings,
                                       std::vector<char> steklov_mask)
    : f_(std::move(f)),
      g_(g),
      r_(r),
      h_(h),
      a_(a),
      settings_(settings),
      bumps_(std::move(part), g),
      mask_(std::move(steklov_mask)) {
  if (r < 1 || r > 4) throw std::invalid_argument("Steklov assembly supports 1 <= r <= 4");
  const double bound = steklov_parameter_bound(g, r);
  if (!(a > bound)) {
    std::ostringstream os;
    os << "Steklov parameter a = " << a << " must exceed " << bound;
    throw std::invalid_argument(os.str());
  }
  const int n = bumps_.part.cells();
  if (mask_.empty()) mask_.assign(n + 1, 1);
  if (static_cast<int>(mask_.size()) != n + 1)
    throw std::invalid_argument("Steklov mask needs one entry per piece index 0..cells");
  const GaussRule& rule = gauss_legendre(settings_.tau_nodes);
  const double lo = h / (2.0 * a), hi = h / a;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double tau = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[q];
    sigma_.push_back(g.inverse(tau));
    tau_w_.push_back(0.5 * rule.weights[q]);
  }
  kinks_ = f_.kinks;
}

int SteklovApproximant::cell_of(double x) const {
  const auto& t = bumps_.part.t;
  int i = static_cast<int>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
  return std::clamp(i, 0, bumps_.part.cells() - 1);
}

void SteklovApproximant::cell_pieces(int i, int& left, int& right) const {
  const auto& p = bumps_.part;
  if (i <= 0) {
    left = right = 1;
  } else if (!p.truncated && i >= p.j) {
    left = right = p.j;
  } else {
    left = i;
    right = i + 1;
  }
}

bool SteklovApproximant::is_steklov_piece(int k) const {
  return k >= 0 && k < static_cast<int>(mask_.size()) && mask_[k];
}

void SteklovApproximant::F_classical(int k, double x, double* out) const {
  const auto& t = bumps_.part.t;
  if (k < 1 || k > bumps_.part.cells())
    throw std::out_of_range("Steklov piece index outside 1..cells");
  const double phi = std::sqrt(t[k - 1]);
  double buf[8];
  for (int m = 0; m <= r_; ++m) out[m] = 0.0;
  for (std::size_t q = 0; q < sigma_.size(); ++q) {
    steklov_jet_fixed(f_, r_, sigma_[q] * phi, x, kinks_, settings_.u_order, r_, buf);
    for (int m = 0; m <= r_; ++m) out[m] += tau_w_[q] * buf[m];
  }
}

double SteklovApproximant::F(int k, double x) const {
  const auto& t = bumps_.part.t;
  if (k < 1 || k > bumps_.part.cells())
    throw std::out_of_range("Steklov piece index outside 1..cells");
  const double phi = std::sqrt(t[k - 1]);
  double acc = 0.0, buf[8];
  for (std::size_t q = 0; q < sigma_.size(); ++q) {
    steklov_jet_fixed(f_, r_, sigma_[q] * phi, x, kinks_, settings_.u_order, 0, buf);
    acc += tau_w_[q] * buf[0];
  }
  return acc;
}

void SteklovApproximant::piece_gamma_jet(int k, double x, double* out) const {
  if (is_steklov_piece(k)) {
    double cl[8], inv[8];
    F_classical(k, x, cl);
    out[0] = cl[0];
    g_.inverse_derivatives_at(x, r_, inv);
    classical_to_gamma(cl + 1, inv, r_, out + 1);
    return;
  }
  out[0] = f_(x);
  if (!gamma_derivatives_closed(f_, g_, x, r_, out + 1))
    throw std::invalid_argument("raw pieces need closed-form derivatives of " + f_.id);
}

void SteklovApproximant::gamma_jet(double x, double* out) const {
  const int i = cell_of(x);
  int left, right;
  cell_pieces(i, left, right);
  double P[8];
  piece_gamma_jet(left, x, P);
  if (left == right || x <= bumps_.y[i]) {
    for (int n = 0; n <= r_; ++n) out[n] = P[n];
    return;
  }
  double Q[8], psi[8];
  piece_gamma_jet(right, x, Q);
  for (int k = 0; k <= r_; ++k) psi[k] = psi_k_gamma_derivative(bumps_, i, x, k);
  for (int n = 0; n <= r_; ++n) {
    double v = P[n];
    for (int k = 0; k <= n; ++k) v += binomial(n, k) * psi[k] * (Q[n - k] - P[n - k]);
    out[n] = v;
  }
}

double SteklovApproximant::value(double x) const {
  const int i = cell_of(x);
  int left, right;
  cell_pieces(i, left, right);
  auto piece = [&](int k) { return is_steklov_piece(k) ? F(k, x) : f_(x); };
  const double P = piece(left);
  if (left == right || x <= bumps_.y[i]) return P;
  const double psi = psi_k_gamma_derivative(bumps_, i, x, 0);
  return P + psi * (piece(right) - P);
}

double SteklovApproximant::value_convex_form(double x) const {
  const int i = cell_of(x);
  int left, right;
  cell_pieces(i, left, right);
  auto piece = [&](int k) { return is_steklov_piece(k) ? F(k, x) : f_(x); };
  if (left == right) return piece(left);
  const double psi = psi_k_gamma_derivative(bumps_, i, x, 0);
  return (1.0 - psi) * piece(left) + psi * piece(right);
}

double SteklovApproximant::value_sum_form(double x) const {
  const auto& p = bumps_.part;
  const int top = p.truncated ? p.cells() : p.j;
  auto psi = [&](int k) { return psi_k_gamma_derivative(bumps_, k, x, 0); };
  double acc = 0.0;
  for (int k = 1; k <= top; ++k) {
    const double wgt = psi(k - 1) * (1.0 - psi(k));
    if (wgt == 0.0) continue;
    acc += wgt * (is_steklov_piece(k) ? F(k, x) : f_(x));
  }
  return acc;
}

std::vector<std::pair<double, double>> SteklovApproximant::steklov_support() const {
  std::vector<std::pair<double, double>> out;
  const auto& t = bumps_.part.t;
  for (int i = 0; i < bumps_.part.cells(); ++i) {
    int left, right;
    cell_pieces(i, left, right);
    if (!is_steklov_piece(left) && !is_steklov_piece(right)) continue;
    if (!out.empty() && out.back().second == t[i]) out.back().second = t[i + 1];
    else out.emplace_back(t[i], t[i + 1]);
  }
  return out;
}

}  // namespace gammak
