#include "gammak/kfunctional.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gammak {

std::string to_string(KVariant v) { return v == KVariant::restricted ? "restricted" : "full"; }

namespace {

std::vector<double> all_breakpoints(const RealFunction& f, const GammaFunction& g) {
  std::vector<double> b = f.kinks;
  for (double x : g.breakpoints()) b.push_back(x);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

// p-th power accumulation, or max for p = infinity.
struct Acc {
  bool inf = false;
  double p = 2.0;
  double v = 0.0;
  void add(double weight, double a) {
    if (inf) v = std::max(v, a);
    else v += weight * (p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p)));
  }
  void add_norm(double n) {
    if (inf) v = std::max(v, n);
    else v += (p == 1.0 ? n : (p == 2.0 ? n * n : std::pow(n, p)));
  }
  double norm() const {
    if (inf || p == 1.0) return v;
    return p == 2.0 ? std::sqrt(v) : std::pow(v, 1.0 / p);
  }
};

Acc make_acc(const LpExponent& p) {
  Acc a;
  a.inf = p.is_infinite();
  if (!a.inf) a.p = p.value();
  return a;
}

// Closed intervals of [lo, hi] not covered by `cover` (sorted, disjoint).
std::vector<std::pair<double, double>> complement(double lo, double hi,
                                                  const std::vector<std::pair<double, double>>& cover) {
  std::vector<std::pair<double, double>> out;
  double a = lo;
  for (const auto& [u, v] : cover) {
    if (v <= a) continue;
    if (u >= hi) break;
    if (u > a) out.emplace_back(a, u);
    a = std::max(a, v);
  }
  if (a < hi) out.emplace_back(a, hi);
  return out;
}

}  // namespace

double gamma_seminorm(const RealFunction& f, const GammaFunction& g, int r, const LpExponent& p,
                      double alpha, double lo, double hi, const QuadratureConfig& cfg) {
  if (!(hi > lo)) return 0.0;
  auto d = [&](double x) {
    double out[8];
    double xe = x;
    if (g.is_singular(xe)) xe = std::nextafter(xe, std::numeric_limits<double>::infinity());
    if (!gamma_derivatives_closed(f, g, xe, r, out))
      throw std::invalid_argument("no closed-form gamma-derivatives of order " + std::to_string(r) +
                                  " for " + f.id);
    return out[r - 1] * std::pow(x, 0.5 * r);
  };
  return weighted_norm(d, alpha, NormSpec{p, lo, hi}, cfg, all_breakpoints(f, g));
}

std::shared_ptr<const SteklovNodes> SteklovCache::get(const RealFunction& f, const GammaFunction& g,
                                                      int r, double h, double x_stop, bool local,
                                                      const AnalysisConfig& cfg,
                                                      const KOptions& opt) {
  const auto key = std::make_tuple(f.id, r, h, x_stop, local);
  if (auto it = map_.find(key); it != map_.end()) return it->second;

  auto nodes = std::make_shared<SteklovNodes>();
  nodes->r = r;
  nodes->h = h;
  try {
    const auto& c = cfg.constants;
    double stop = x_stop;
    int extra = 0;
    if (local) {
      // Cells beyond the last kink carry f itself.
      double km = 0.0;
      for (double k : f.kinks) km = std::max(km, k);
      stop = std::min(stop, km);
      extra = 4;
    }
    Partition part = build_partition(g, r, h, c.A1, c.A2, stop, extra);
    if (!local && part.cells() > opt.cell_budget) {
      std::ostringstream os;
      os << "over budget (" << part.cells() << " cells)";
      nodes->status = os.str();
      map_[key] = nodes;
      return nodes;
    }
    const double a = opt.steklov_parameter > 0.0 ? opt.steklov_parameter
                                                 : default_steklov_parameter(g, r);
    std::vector<char> mask;
    if (local) mask = local_steklov_mask(part, f.kinks);
    auto approx = std::make_shared<SteklovApproximant>(f, g, r, h, part, a, opt.steklov, mask);
    const Partition& P = approx->partition();
    const BumpFamily& B = approx->bumps();
    const double top = std::min(P.t.back(), x_stop);
    if (local) {
      for (auto [u, v] : approx->steklov_support())
        if (u < top) nodes->support.emplace_back(u, std::min(v, top));
    } else {
      nodes->support.emplace_back(P.t.front(), top);
    }

    std::vector<double> bps = all_breakpoints(f, g);
    bps.push_back(P.E);
    const GaussRule& rule = gauss_legendre(opt.nodes_per_half_cell);
    double jet[8];
    for (auto [u, v] : nodes->support) {
      std::vector<double> cuts{u, v};
      const int i0 = approx->cell_of(u), i1 = approx->cell_of(v);
      for (int i = i0; i <= i1 + 1 && i <= P.cells(); ++i) {
        if (P.t[i] > u && P.t[i] < v) cuts.push_back(P.t[i]);
        if (i < B.size() && B.y[i] > u && B.y[i] < v) cuts.push_back(B.y[i]);
      }
      for (double e : bps)
        if (e > u && e < v) cuts.push_back(e);
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      for (std::size_t q = 0; q + 1 < cuts.size(); ++q) {
        const double lo = cuts[q], hi = cuts[q + 1];
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
          const double x = mid + half * rule.nodes[k];
          approx->gamma_jet(x, jet);
          nodes->x.push_back(x);
          nodes->w.push_back(half * rule.weights[k]);
          nodes->cell.push_back(approx->cell_of(x));
          nodes->diff.push_back(f(x) - jet[0]);
          for (int m = 0; m <= r; ++m) nodes->jet.push_back(jet[m]);
        }
      }
    }
    nodes->approx = approx;
    nodes->available = true;
    nodes->status = "ok";
  } catch (const std::exception& e) {
    nodes->available = false;
    nodes->status = e.what();
  }
  map_[key] = nodes;
  return nodes;
}

namespace {

struct Candidate {
  std::string id;
  double approx = 0.0;
  double semi = 0.0;  // already multiplied by the t^r or h^r factor
  double value() const { return approx + semi; }
};

// Restricted objective of an assembled G (full or kink-local) over [lo, hi].
Candidate steklov_candidate(const SteklovNodes& n, const RealFunction& f, const GammaFunction& g,
                            int r, double h, double lo, double hi, const LpExponent& p,
                            double alpha, const AnalysisConfig& cfg, const std::string& id) {
  Acc ea = make_acc(p), es = make_acc(p);
  const LaguerreWeight w{alpha};
  for (std::size_t i = 0; i < n.x.size(); ++i) {
    const double x = n.x[i];
    if (x < lo || x > hi) continue;
    const double W = w(x);
    ea.add(n.w[i], std::abs(n.diff[i]) * W);
    es.add(n.w[i], std::abs(n.jet[i * (r + 1) + r]) * std::pow(x, 0.5 * r) * W);
  }
  for (auto [u, v] : complement(lo, hi, n.support))
    es.add_norm(gamma_seminorm(f, g, r, p, alpha, u, v, cfg.quad));
  return {id, ea.norm(), std::pow(h, r) * es.norm()};
}

bool has_kink_in(const RealFunction& f, double lo, double hi) {
  for (double k : f.kinks)
    if (k >= lo && k <= hi) return true;
  return false;
}

KEstimate restricted_core(const RealFunction& f, const GammaFunction& g, int r, double t,
                          const LpExponent& p, double alpha, const AnalysisConfig& cfg,
                          const KOptions& opt, SteklovCache& cache, double x_stop) {
  KEstimate est;
  est.t = t;
  est.variant = KVariant::restricted;
  est.h_grid = cfg.h_grid(t);
  const int nh = static_cast<int>(est.h_grid.size());
  const auto& c = cfg.constants;
  const double cut = cfg.x_cut(alpha);
  const bool sob = f.in_sobolev(r);
  const bool local_ok = !sob && f.gamma_derivative_order() >= r && !f.kinks.empty();

  std::vector<Candidate> best(nh);
  std::vector<WindowInterval> wins(nh);
  std::ostringstream notes;
  for (int i = 0; i < nh; ++i) {
    const double h = est.h_grid[i];
    wins[i] = window_interval(g, r, h, c.A1, c.A2);
    const double lo = wins[i].lo, hi = std::min(wins[i].hi, cut);
    std::vector<Candidate> cs;
    if (opt.candidates.zero) {
      const double z = hi > lo ? weighted_norm([&](double x) { return f(x); }, alpha,
                                               NormSpec{p, lo, hi}, cfg.quad, f.kinks)
                               : 0.0;
      cs.push_back({"zero", z, 0.0});
    }
    if (opt.candidates.window_poly) {
      const auto bp = best_gamma_poly_error(f, g, r - 1, p, alpha, lo, wins[i].hi, cfg);
      cs.push_back({"window_poly", bp.error, 0.0});
    }
    if (opt.candidates.f_itself && sob)
      cs.push_back({"f", 0.0, std::pow(h, r) * gamma_seminorm(f, g, r, p, alpha, lo, hi, cfg.quad)});
    if (opt.candidates.steklov_local && local_ok && has_kink_in(f, lo, hi)) {
      auto n = cache.get(f, g, r, h, x_stop, true, cfg, opt);
      if (n->available)
        cs.push_back(steklov_candidate(*n, f, g, r, h, lo, hi, p, alpha, cfg, "steklov_local"));
      else
        notes << "steklov_local unavailable at h=" << h << ": " << n->status << "; ";
    }
    if (cs.empty()) throw std::invalid_argument("restricted K-functional needs at least one candidate");
    best[i] = *std::min_element(cs.begin(), cs.end(),
                                [](const Candidate& a, const Candidate& b) { return a.value() < b.value(); });
  }

  if (opt.candidates.steklov) {
    std::vector<int> order(nh);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return best[a].value() > best[b].value(); });
    double lb = -1.0;
    for (int i : order) {
      // A candidate can only lower this h's value, so it matters only while
      // the value still exceeds the best completed one.
      if (best[i].value() > lb && best[i].value() > 0.0) {
        const double h = est.h_grid[i];
        auto n = cache.get(f, g, r, h, x_stop, false, cfg, opt);
        if (n->available) {
          const double hi = std::min(wins[i].hi, cut);
          auto cand = steklov_candidate(*n, f, g, r, h, wins[i].lo, hi, p, alpha, cfg, "steklov_G");
          if (cand.value() < best[i].value()) best[i] = cand;
        } else {
          notes << "steklov_G skipped at h=" << h << ": " << n->status << "; ";
        }
      }
      lb = std::max(lb, best[i].value());
    }
  }

  int istar = 0;
  for (int i = 0; i < nh; ++i) {
    est.per_h_values.push_back(best[i].value());
    est.per_h_candidates.push_back(best[i].id);
    if (best[i].value() > best[istar].value()) istar = i;
  }
  est.value = best[istar].value();
  est.approx_error_term = best[istar].approx;
  est.seminorm_term = best[istar].semi;
  est.candidate_id = best[istar].id;
  est.h_star = est.h_grid[istar];
  est.notes = notes.str();
  return est;
}

KEstimate full_core(const RealFunction& f, const GammaFunction& g, int r, double t,
                    const LpExponent& p, double alpha, const AnalysisConfig& cfg,
                    const KOptions& opt, SteklovCache& cache, double x_stop) {
  KEstimate est;
  est.t = t;
  est.variant = KVariant::full;
  est.h_grid = {t};
  const double cut = cfg.x_cut(alpha);
  const double tr = std::pow(t, r);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Candidate> cs;
  std::ostringstream notes;

  if (opt.candidates.zero)
    cs.push_back({"zero",
                  weighted_norm([&](double x) { return f(x); }, alpha, NormSpec{p, 0.0, cut},
                                cfg.quad, f.kinks),
                  0.0});
  if (opt.candidates.f_itself && f.in_sobolev(r))
    cs.push_back({"f", 0.0, tr * gamma_seminorm(f, g, r, p, alpha, 0.0, cut, cfg.quad)});
  if (opt.candidates.window_poly)
    cs.push_back({"global_poly", best_gamma_poly_error(f, g, r - 1, p, alpha, 0.0, inf, cfg).error, 0.0});

  if (opt.candidates.glued) {
    auto n = cache.get(f, g, r, t, x_stop, false, cfg, opt);
    if (!n->available) {
      notes << "glued skipped: " << n->status << "; ";
    } else {
      const Partition& P = n->approx->partition();
      const double t0 = P.t[0], t1 = P.t[1];
      const bool closed = !P.truncated && P.t[P.j + 1] < cut;
      const double tj = closed ? P.t[P.j] : inf, tj1 = closed ? P.t[P.j + 1] : inf;
      const auto b1 = best_gamma_poly_error(f, g, r - 1, p, alpha, 0.0, t1, cfg);
      const GammaPolynomial& q1 = b1.poly;
      GammaPolynomial q3({0.0}, g);
      if (closed) q3 = best_gamma_poly_error(f, g, r - 1, p, alpha, tj, inf, cfg).poly;

      Acc ea = make_acc(p), es = make_acc(p);
      const auto bps = all_breakpoints(f, g);
      ea.add_norm(weighted_norm([&](double x) { return f(x) - q1(x); }, alpha, NormSpec{p, 0.0, t0},
                                cfg.quad, bps));
      if (closed && tj1 < cut)
        ea.add_norm(weighted_norm([&](double x) { return f(x) - q3(x); }, alpha,
                                  NormSpec{p, tj1, cut}, cfg.quad, bps));
      const LaguerreWeight w{alpha};
      const double D0 = g(t1) - g(t0);
      const double Dj = closed ? g(tj1) - g(tj) : 1.0;
      for (std::size_t i = 0; i < n->x.size(); ++i) {
        const double x = n->x[i];
        if (x > cut) continue;
        const double* G = &n->jet[i * (r + 1)];
        const double fx = n->diff[i] + G[0];
        double out[8];
        for (int m = 0; m <= r; ++m) out[m] = G[m];
        auto blend = [&](const GammaPolynomial& q, double arg, double D, bool toward_q) {
          // toward_q: G + psi (q - G); otherwise q + psi (G - q).
          const double y = g(x);
          double Q[8], ps[8];
          for (int m = 0; m <= r; ++m) {
            Q[m] = q.derivative_y(y, m);
            ps[m] = psi_eval(arg, m) / std::pow(D, m);
          }
          const double* A = toward_q ? G : Q;
          const double* Bv = toward_q ? Q : G;
          for (int m = 0; m <= r; ++m) {
            double v = A[m];
            for (int k = 0; k <= m; ++k) v += binomial(m, k) * ps[k] * (Bv[m - k] - A[m - k]);
            out[m] = v;
          }
        };
        if (x < t1) blend(q1, (g(x) - g(t0)) / D0, D0, false);
        else if (closed && x > tj) blend(q3, (g(x) - g(tj)) / Dj, Dj, true);
        const double W = w(x);
        ea.add(n->w[i], std::abs(fx - out[0]) * W);
        es.add(n->w[i], std::abs(out[r]) * std::pow(x, 0.5 * r) * W);
      }
      cs.push_back({"glued", ea.norm(), tr * es.norm()});
    }
  }
  if (cs.empty()) throw std::invalid_argument("full K-functional needs at least one candidate");
  const auto& b = *std::min_element(cs.begin(), cs.end(),
                                    [](const Candidate& a, const Candidate& c) { return a.value() < c.value(); });
  est.value = b.value();
  est.approx_error_term = b.approx;
  est.seminorm_term = b.semi;
  est.candidate_id = b.id;
  est.h_star = t;
  est.per_h_values = {b.value()};
  est.per_h_candidates = {b.id};
  est.notes = notes.str();
  return est;
}

void check_horizon(const GammaFunction& g, int r, double t, const AnalysisConfig& cfg) {
  if (!(t > 0.0)) throw std::invalid_argument("K-functional needs t > 0");
  const auto& c = cfg.constants;
  const double T = max_time_horizon(g, r, c.A1, c.A2, HorizonVariant::upper_construction);
  if (t > T * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "t = " << t << " exceeds the construction horizon T = " << T << " for r = " << r;
    throw std::domain_error(os.str());
  }
}

}  // namespace

KEstimate restricted_k_upper(const RealFunction& f, const GammaFunction& g, int r, double t,
                             const LpExponent& p, double alpha, const AnalysisConfig& cfg,
                             const KOptions& opt, SteklovCache* cache) {
  check_horizon(g, r, t, cfg);
  SteklovCache local;
  return restricted_core(f, g, r, t, p, alpha, cfg, opt, cache ? *cache : local, cfg.x_cut(alpha));
}

std::vector<KEstimate> restricted_k_upper_batch(
    const RealFunction& f, const GammaFunction& g, int r, double t,
    const std::vector<std::pair<LpExponent, double>>& p_alpha, const AnalysisConfig& cfg,
    const KOptions& opt, SteklovCache* cache) {
  check_horizon(g, r, t, cfg);
  SteklovCache local;
  SteklovCache& c = cache ? *cache : local;
  double stop = 0.0;
  for (const auto& pa : p_alpha) stop = std::max(stop, cfg.x_cut(pa.second));
  std::vector<KEstimate> out;
  for (const auto& [p, alpha] : p_alpha)
    out.push_back(restricted_core(f, g, r, t, p, alpha, cfg, opt, c, stop));
  return out;
}

KEstimate full_k_upper(const RealFunction& f, const GammaFunction& g, int r, double t,
                       const LpExponent& p, double alpha, const AnalysisConfig& cfg,
                       const KOptions& opt, SteklovCache* cache) {
  check_horizon(g, r, t, cfg);
  SteklovCache local;
  return full_core(f, g, r, t, p, alpha, cfg, opt, cache ? *cache : local, cfg.x_cut(alpha));
}

IdentityCheck difference_integral_identity_check(const RealFunction& f, const GammaFunction& g,
                                                 int r, double h, double x,
                                                 const QuadratureConfig& cfg) {
  if (r != 1 && r != 2) throw std::invalid_argument("the identity check covers r = 1 and r = 2");
  IdentityCheck res;
  res.lhs = forward_difference(f, g, r, h, x);
  const double s = g.inverse(h) * std::sqrt(x);
  std::vector<double> bps;
  for (double b : all_breakpoints(f, g)) bps.push_back(b - x);
  if (r == 1) {
    auto integrand = [&](double u) {
      double d[8];
      double xe = x + u;
      if (g.is_singular(xe)) xe = std::nextafter(xe, 0.0);
      if (!gamma_derivatives_closed(f, g, xe, 1, d))
        throw std::invalid_argument("identity check needs closed-form derivatives of " + f.id);
      return d[0] * g.derivative(xe, 1);
    };
    res.rhs = integrate(integrand, 0.0, s, cfg, bps).value;
  } else {
    if (!f.classical || f.classical_order < 2)
      throw std::invalid_argument("identity check for r = 2 needs f''");
    bps.push_back(s);
    auto integrand = [&](double v) { return f.classical(x + v, 2) * std::min(v, 2.0 * s - v); };
    res.rhs = integrate(integrand, 0.0, 2.0 * s, cfg, bps).value;
  }
  return res;
}

}  // namespace gammak
