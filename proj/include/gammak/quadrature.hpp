#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gammak {

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 4000;
  std::vector<double> singular_points;
  int sup_grid_density = 200;
};

void validate(const QuadratureConfig& cfg);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = true;
};

/// Tolerance not met within the subdivision budget.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error)
      : std::runtime_error(what), estimate_(estimate), error_(error) {}
  double estimate() const { return estimate_; }
  double error() const { return error_; }

 private:
  double estimate_;
  double error_;
};

/// Integrand or function sample that is NaN or infinite.
class NonFiniteError : public std::domain_error {
 public:
  NonFiniteError(const std::string& what, double x) : std::domain_error(what), x_(x) {}
  double x() const { return x_; }

 private:
  double x_;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

[[noreturn]] inline void throw_non_finite(double x, double v) {
  std::ostringstream os;
  os << "non-finite integrand value " << v << " at x = " << x;
  throw NonFiniteError(os.str(), x);
}

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double hl = 0.5 * (b - a);
  const double fc = f(c);
  if (!std::isfinite(fc)) throw_non_finite(c, fc);
  double kr = fc * kWgk[7];
  double ga = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = hl * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    if (!std::isfinite(f1)) throw_non_finite(c - dx, f1);
    if (!std::isfinite(f2)) throw_non_finite(c + dx, f2);
    kr += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) ga += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, kr * hl, std::abs((kr - ga) * hl)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b]; the interval is first
/// split at every breakpoint lying strictly inside it.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double rel_tol, double abs_tol,
                           int max_subdivisions, const std::vector<double>& breakpoints = {}) {
  QuadratureResult res;
  if (!(b > a)) return res;
  std::vector<double> cuts{a};
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Segment> heap;
  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto s = detail::gk15(f, cuts[i], cuts[i + 1]);
    total += s.value;
    err += s.error;
    heap.push(s);
  }
  int n = static_cast<int>(heap.size());
  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (n >= max_subdivisions) {
      res.converged = false;
      break;
    }
    auto s = heap.top();
    const double m = 0.5 * (s.a + s.b);
    if (!(m > s.a && m < s.b)) {
      res.converged = false;
      break;
    }
    heap.pop();
    auto l = detail::gk15(f, s.a, m);
    auto r = detail::gk15(f, m, s.b);
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
    ++n;
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  total = 0.0;
  err = 0.0;
  std::vector<detail::Segment> segs;
  segs.reserve(heap.size());
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(), [](auto& x, auto& y) { return x.a < y.a; });
  for (auto& s : segs) {
    total += s.value;
    err += s.error;
  }
  res.value = total;
  res.error = err;
  res.intervals = n;
  return res;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureConfig& cfg,
                           const std::vector<double>& breakpoints = {}) {
  std::vector<double> bp = breakpoints;
  bp.insert(bp.end(), cfg.singular_points.begin(), cfg.singular_points.end());
  return integrate(f, a, b, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions, bp);
}

/// Integral over [lo, hi) with hi possibly infinite. The range is walked in
/// chunks of doubling length; the walk stops once a chunk contributes at most
/// abs_tol times the running total (or hi is reached).
template <class F>
QuadratureResult integrate_decaying(F&& f, double lo, double hi, const QuadratureConfig& cfg,
                                    const std::vector<double>& breakpoints = {}) {
  QuadratureResult res;
  if (!(hi > lo)) return res;
  double a = lo;
  double len = std::max(8.0, lo);
  double running = 0.0;
  int chunks = 0;
  while (a < hi) {
    const double b = std::min(hi, a + len);
    auto part = integrate(f, a, b, cfg, breakpoints);
    res.value += part.value;
    res.error += part.error;
    res.intervals += part.intervals;
    res.converged = res.converged && part.converged;
    running += std::abs(part.value);
    ++chunks;
    a = b;
    len *= 2.0;
    if (chunks >= 2 && std::abs(part.value) <= cfg.abs_tol * running) break;
    if (chunks >= 2 && running == 0.0 && a > lo + 64.0) break;
    if (a > 1e300) break;
  }
  return res;
}

/// Approximates sup |f| over [lo, hi] (hi possibly infinite): a uniform grid of
/// sup_grid_density points per unit length (capped per chunk), geometric
/// clustering toward lo and every breakpoint, then golden-section refinement
/// around the best samples.
template <class F>
double sup_abs(F&& f, double lo, double hi, const QuadratureConfig& cfg,
               const std::vector<double>& breakpoints = {}) {
  if (!(hi >= lo)) return 0.0;
  auto sample = [&](double x) {
    const double v = std::abs(f(x));
    if (!std::isfinite(v)) detail::throw_non_finite(x, v);
    return v;
  };
  std::vector<double> bp = breakpoints;
  bp.insert(bp.end(), cfg.singular_points.begin(), cfg.singular_points.end());

  double best = 0.0;
  std::vector<std::pair<double, double>> xs;  // (x, |f|)
  auto scan_chunk = [&](double a, double b) {
    std::vector<double> pts;
    const int n = std::clamp(static_cast<int>(cfg.sup_grid_density * (b - a)), 64, 4096);
    for (int i = 0; i <= n; ++i) pts.push_back(a + (b - a) * i / n);
    auto cluster = [&](double p, double dir) {
      double d = std::min(0.5, 0.5 * (b - a));
      for (int k = 0; k < 40 && d > 1e-14 * std::max(1.0, std::abs(p)); ++k, d *= 0.5) {
        const double x = p + dir * d;
        if (x > a && x < b) pts.push_back(x);
      }
    };
    cluster(a, 1.0);
    cluster(b, -1.0);
    for (double p : bp) {
      if (p >= a - 1.0 && p <= b + 1.0) {
        cluster(p, 1.0);
        cluster(p, -1.0);
        if (p > a && p < b) pts.push_back(p);
      }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double chunk_best = 0.0;
    for (double x : pts) {
      const double v = sample(x);
      xs.emplace_back(x, v);
      chunk_best = std::max(chunk_best, v);
    }
    return chunk_best;
  };

  if (std::isfinite(hi) && hi - lo <= 64.0) {
    best = scan_chunk(lo, hi);
  } else {
    double a = lo;
    double len = std::max(8.0, lo);
    int chunks = 0;
    while (a < hi) {
      const double b = std::min(hi, a + len);
      const double cb = scan_chunk(a, b);
      best = std::max(best, cb);
      ++chunks;
      a = b;
      len *= 2.0;
      if (chunks >= 2 && cb <= cfg.abs_tol * best) break;
      if (chunks >= 2 && best == 0.0 && a > lo + 64.0) break;
      if (a > 1e300) break;
    }
  }
  if (xs.empty()) return best;

  // Refine around the largest samples.
  std::sort(xs.begin(), xs.end());
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) order[i] = i;
  const std::size_t top = std::min<std::size_t>(8, xs.size());
  std::partial_sort(order.begin(), order.begin() + top, order.end(),
                    [&](std::size_t i, std::size_t j) { return xs[i].second > xs[j].second; });
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t q = 0; q < top; ++q) {
    const std::size_t i = order[q];
    double a = i > 0 ? xs[i - 1].first : xs[i].first;
    double b = i + 1 < xs.size() ? xs[i + 1].first : xs[i].first;
    if (!(b > a)) continue;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = sample(c), fd = sample(d);
    for (int it = 0; it < 60 && (b - a) > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = sample(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = sample(d);
      }
    }
    best = std::max({best, fc, fd});
  }
  return best;
}

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// Nodes and weights of a composite rule.
struct NodeSet {
  std::vector<double> x;
  std::vector<double> w;
};

/// Composite Gauss-Legendre rule of the given order on [lo, hi] (finite). The
/// range is split at every breakpoint; each piece is graded geometrically
/// (halving `grading` times) toward both of its ends, and panels longer than
/// max_panel are subdivided uniformly.
NodeSet composite_nodes(double lo, double hi, const std::vector<double>& breakpoints,
                        double max_panel, int order, int grading = 12);

}  // namespace gammak
