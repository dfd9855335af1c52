#include "gammak/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace gammak {

using nlohmann::json;

std::vector<double> ExperimentConfig::t_values(int rr) const {
  const double step = 1.0 / t_per_decade;
  std::vector<double> out;
  if (t_decades.size() == 1) {
    const double top = horizons.at(rr);
    const int n = static_cast<int>(std::lround(t_decades[0] * t_per_decade));
    for (int i = 0; i <= n; ++i) out.push_back(top * std::pow(10.0, -i * step));
  } else {
    const int n = static_cast<int>(std::lround((t_decades[1] - t_decades[0]) * t_per_decade));
    for (int i = 0; i <= n; ++i) out.push_back(std::pow(10.0, t_decades[1] - i * step));
  }
  return out;
}

void validate(ExperimentConfig& cfg) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (cfg.r.empty()) fail("grid.r: list must not be empty");
  if (cfg.p.empty()) fail("grid.p: list must not be empty");
  if (cfg.alpha.empty()) fail("grid.alpha: list must not be empty");
  for (std::size_t i = 0; i < cfg.r.size(); ++i)
    if (cfg.r[i] < 1 || cfg.r[i] > 3)
      fail("grid.r[" + std::to_string(i) + "]: orders 1..3 are supported");
  const int rmax = *std::max_element(cfg.r.begin(), cfg.r.end());
  for (std::size_t k = 0; k < cfg.gamma.beta.size(); ++k) {
    if (!(cfg.gamma.beta[k] < 1.0 / rmax)) {
      std::ostringstream os;
      os << "gamma.beta[" << k << "] = " << cfg.gamma.beta[k] << ": gamma-derivatives of order "
         << rmax << " need every exponent below 1/r = " << 1.0 / rmax;
      fail(os.str());
    }
  }
  if (cfg.gamma.r_max < rmax) {
    std::ostringstream os;
    os << "gamma.r_max = " << cfg.gamma.r_max << " is below the largest grid.r = " << rmax;
    fail(os.str());
  }
  for (std::size_t i = 0; i < cfg.alpha.size(); ++i) {
    for (const auto& p : cfg.p) {
      if (!p.is_infinite() && !(cfg.alpha[i] > -1.0 / p.value())) {
        std::ostringstream os;
        os << "grid.alpha[" << i << "] = " << cfg.alpha[i] << " must exceed -1/p for p = " << p.str();
        fail(os.str());
      }
    }
  }
  if (cfg.t_per_decade < 1) fail("grid.t_per_decade: must be a positive integer");
  if (cfg.t_decades.empty() || cfg.t_decades.size() > 2)
    fail("grid.t_decades: expected a number of decades or a pair [lo, hi] of exponents");
  if (cfg.t_decades.size() == 1 && !(cfg.t_decades[0] > 0.0))
    fail("grid.t_decades: the number of decades must be positive");
  if (cfg.t_decades.size() == 2 && !(cfg.t_decades[1] > cfg.t_decades[0]))
    fail("grid.t_decades: expected lo < hi");
  if (cfg.analysis.n_h < 1) fail("grid.n_h: must be a positive integer");
  if (!(cfg.analysis.rho > 0.0 && cfg.analysis.rho < 1.0)) fail("grid.rho: must lie in (0, 1)");
  const auto& c = cfg.analysis.constants;
  if (!(c.A1 > 0.25)) fail("constants.A1: must exceed 1/4");
  if (!(c.A2 > 0.0)) fail("constants.A2: must be positive");
  try {
    validate(cfg.gamma);
    validate(cfg.analysis.quad);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }

  const GammaFunction g = build_gamma(cfg.gamma);
  if (!cfg.functions.empty()) {
    for (std::size_t i = 0; i < cfg.functions.size(); ++i) {
      try {
        catalog_function(cfg.functions[i], g);
      } catch (const std::exception& e) {
        fail("functions[" + std::to_string(i) + "]: " + e.what());
      }
    }
  }
  cfg.horizons.clear();
  for (int rr : cfg.r)
    cfg.horizons[rr] = max_time_horizon(g, rr, c.A1, c.A2, HorizonVariant::upper_construction);
  for (int rr : cfg.r) {
    const double T = cfg.horizons[rr];
    std::ostringstream bad;
    int nbad = 0;
    for (double t : cfg.t_values(rr))
      if (t > T * (1.0 + 1e-12)) {
        bad << (nbad++ ? ", " : "") << t;
      }
    if (nbad) {
      std::ostringstream os;
      os << "grid.t_decades: t values above the horizon " << T << " for r = " << rr << ": "
         << bad.str();
      fail(os.str());
    }
  }
}

namespace {

template <class T>
T get_or(const json& j, const char* key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + "." + key + ": wrong type");
  }
}

std::vector<double> number_list(const json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw ConfigError(path + ": expected a number or an array of numbers");
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ConfigError(path + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  if (!root.contains(key)) return empty;
  const json& s = root.at(key);
  if (!s.is_object()) throw ConfigError(std::string(key) + ": expected an object");
  return s;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config does not parse: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: expected an object at the top level");
  ExperimentConfig cfg;

  const json& gj = section(root, "gamma");
  if (!gj.contains("a")) throw ConfigError("gamma.a: missing");
  if (!gj.contains("beta")) throw ConfigError("gamma.beta: missing");
  cfg.gamma.a = number_list(gj.at("a"), "gamma.a");
  cfg.gamma.beta = number_list(gj.at("beta"), "gamma.beta");
  cfg.gamma.r_max = get_or<int>(gj, "r_max", "gamma", 3);

  const json& grid = section(root, "grid");
  if (!grid.contains("r")) throw ConfigError("grid.r: missing");
  for (double v : number_list(grid.at("r"), "grid.r")) {
    if (v != std::floor(v)) throw ConfigError("grid.r: orders must be integers");
    cfg.r.push_back(static_cast<int>(v));
  }
  if (!grid.contains("p")) throw ConfigError("grid.p: missing");
  const json& pj = grid.at("p");
  const json parr = pj.is_array() ? pj : json::array({pj});
  for (std::size_t i = 0; i < parr.size(); ++i) {
    const std::string path = "grid.p[" + std::to_string(i) + "]";
    try {
      if (parr[i].is_string()) cfg.p.push_back(LpExponent::parse(parr[i].get<std::string>()));
      else if (parr[i].is_number()) cfg.p.push_back(LpExponent::finite(parr[i].get<double>()));
      else throw ConfigError(path + ": expected a number >= 1 or \"inf\"");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  if (!grid.contains("alpha")) throw ConfigError("grid.alpha: missing");
  cfg.alpha = number_list(grid.at("alpha"), "grid.alpha");
  if (grid.contains("t_decades")) cfg.t_decades = number_list(grid.at("t_decades"), "grid.t_decades");
  cfg.t_per_decade = get_or<int>(grid, "t_per_decade", "grid", cfg.t_per_decade);
  cfg.analysis.n_h = get_or<int>(grid, "n_h", "grid", cfg.analysis.n_h);
  cfg.analysis.rho = get_or<double>(grid, "rho", "grid", cfg.analysis.rho);

  const json& cj = section(root, "constants");
  cfg.analysis.constants.A2 = cfg.gamma.a.empty() ? 0.125 : cfg.gamma.a.front() * cfg.gamma.a.front() / 8.0;
  cfg.analysis.constants.A1 = get_or<double>(cj, "A1", "constants", cfg.analysis.constants.A1);
  cfg.analysis.constants.A2 = get_or<double>(cj, "A2", "constants", cfg.analysis.constants.A2);

  const json& qj = section(root, "quad");
  auto& q = cfg.analysis.quad;
  q.rel_tol = get_or<double>(qj, "rel_tol", "quad", q.rel_tol);
  q.abs_tol = get_or<double>(qj, "abs_tol", "quad", q.abs_tol);
  q.max_subdivisions = get_or<int>(qj, "max_subdiv", "quad", q.max_subdivisions);
  q.sup_grid_density = get_or<int>(qj, "sup_grid", "quad", q.sup_grid_density);

  const json& oj = section(root, "out");
  cfg.out_csv = get_or<std::string>(oj, "csv", "out", "");
  cfg.out_svg = get_or<std::string>(oj, "svg", "out", "");

  const json& rj = section(root, "run");
  cfg.threads = get_or<int>(rj, "threads", "run", 0);
  cfg.compute_full = get_or<bool>(rj, "full", "run", true);

  if (root.contains("functions")) {
    const json& fj = root.at("functions");
    if (!fj.is_array()) throw ConfigError("functions: expected an array of catalog ids");
    for (std::size_t i = 0; i < fj.size(); ++i) {
      if (!fj[i].is_string())
        throw ConfigError("functions[" + std::to_string(i) + "]: expected a string");
      cfg.functions.push_back(fj[i].get<std::string>());
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

constexpr double kZero = 1e-10;

void set_ratio(double num, double den, double& out, bool& defined) {
  defined = den > 0.0 && std::isfinite(num) && std::isfinite(den);
  out = defined ? num / den : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::vector<ExperimentRow> run_block(const CatalogFunction& f, const GammaFunction& g, int r,
                                     const ExperimentConfig& cfg) {
  std::vector<std::pair<LpExponent, double>> pa;
  for (const auto& p : cfg.p)
    for (double a : cfg.alpha) pa.emplace_back(p, a);
  const std::vector<double> ts = cfg.t_values(r);
  // rows[q][i]: pair q, t index i
  std::vector<std::vector<ExperimentRow>> rows(pa.size(), std::vector<ExperimentRow>(ts.size()));
  SteklovCache cache;
  const AnalysisConfig& acfg = cfg.analysis;

  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    for (std::size_t q = 0; q < pa.size(); ++q) {
      auto& row = rows[q][i];
      row.function_id = f.id;
      row.r = r;
      row.p = pa[q].first;
      row.alpha = pa[q].second;
      row.t = t;
    }
    std::vector<KEstimate> kr;
    std::string block_error;
    try {
      kr = restricted_k_upper_batch(f.fn, g, r, t, pa, acfg, {}, &cache);
    } catch (const std::exception& e) {
      block_error = std::string("restricted K: ") + e.what();
    }
    for (std::size_t q = 0; q < pa.size(); ++q) {
      auto& row = rows[q][i];
      const auto& [p, alpha] = pa[q];
      std::vector<std::string> errs;
      if (!block_error.empty()) errs.push_back(block_error);
      else row.k_restricted = kr[q];
      try {
        row.modulus = complete_modulus(f.fn, g, r, t, p, alpha, acfg);
        row.omega_n.assign(r, 0.0);
        row.omega_n[r - 1] = row.modulus.omega_main;
        for (int n = 1; n < r; ++n) row.omega_n[n - 1] = main_modulus(f.fn, g, n, t, p, alpha, acfg).omega;
      } catch (const std::exception& e) {
        errs.push_back(std::string("modulus: ") + e.what());
      }
      if (cfg.compute_full) {
        try {
          row.k_full = full_k_upper(f.fn, g, r, t, p, alpha, acfg, {}, &cache);
        } catch (const std::exception& e) {
          errs.push_back(std::string("full K: ") + e.what());
        }
      }
      if (errs.empty()) {
        double den = 0.0;
        for (int n = 1; n <= r; ++n) den += std::pow(t, r - n) * row.omega_n[n - 1];
        set_ratio(row.k_restricted.value, den, row.ratio14, row.ratio14_defined);
        if (r == 1) set_ratio(row.k_restricted.value, row.omega_n[0], row.ratio_equiv, row.ratio_equiv_defined);
        if (cfg.compute_full)
          set_ratio(row.k_full.value, row.modulus.omega_complete, row.ratio_full, row.ratio_full_defined);
      } else {
        std::string s = "error: ";
        for (std::size_t k = 0; k < errs.size(); ++k) s += (k ? "; " : "") + errs[k];
        row.status = s;
      }
    }
  }
  std::vector<ExperimentRow> out;
  for (auto& v : rows)
    for (auto& row : v) out.push_back(std::move(row));
  return out;
}

RatioSummary summarize(const std::vector<const ExperimentRow*>& group, const std::string& ratio) {
  RatioSummary s;
  if (group.empty()) return s;
  s.function_id = group.front()->function_id;
  s.r = group.front()->r;
  s.p = group.front()->p;
  s.alpha = group.front()->alpha;
  s.ratio = ratio;
  std::vector<double> vals;
  bool all_zero = true;
  for (const auto* row : group) {
    double v, num;
    bool def;
    if (ratio == "ratio14") {
      v = row->ratio14, def = row->ratio14_defined, num = row->k_restricted.value;
    } else if (ratio == "ratio_equiv") {
      v = row->ratio_equiv, def = row->ratio_equiv_defined, num = row->k_restricted.value;
    } else if (ratio == "ratio_full") {
      v = row->ratio_full, def = row->ratio_full_defined, num = row->k_full.value;
    } else {
      throw std::invalid_argument("unknown ratio " + ratio);
    }
    if (row->status != "ok") all_zero = false;
    else if (std::abs(num) > kZero) all_zero = false;
    if (def) vals.push_back(v);
  }
  s.defined = static_cast<int>(vals.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (all_zero) {
    s.kind = "zero";
    s.min = s.max = 0.0;
    s.spread = 1.0;
    s.growth = 1.0;
    return s;
  }
  if (vals.empty()) {
    s.kind = "undefined";
    s.min = s.max = s.spread = s.growth = nan;
    return s;
  }
  s.min = *std::min_element(vals.begin(), vals.end());
  s.max = *std::max_element(vals.begin(), vals.end());
  s.spread = s.min > 0.0 ? s.max / s.min : std::numeric_limits<double>::infinity();
  s.growth = vals.front() > 0.0 ? s.max / vals.front() : std::numeric_limits<double>::infinity();
  s.kind = static_cast<int>(vals.size()) == static_cast<int>(group.size()) ? "ok" : "partial";
  return s;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (cfg.horizons.empty()) validate(cfg);
  const GammaFunction g = build_gamma(cfg.gamma);
  std::vector<CatalogFunction> funcs;
  if (cfg.functions.empty()) {
    funcs = default_catalog(g, *std::max_element(cfg.r.begin(), cfg.r.end()));
  } else {
    for (const auto& id : cfg.functions) funcs.push_back(catalog_function(id, g));
  }

  struct Job {
    std::size_t f;
    int r;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < funcs.size(); ++i)
    for (int r : cfg.r) jobs.push_back({i, r});
  std::vector<std::vector<ExperimentRow>> results(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();)
      results[k] = run_block(funcs[jobs[k].f], g, jobs[k].r, cfg);
  };
  unsigned n = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  n = std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(jobs.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ExperimentReport rep;
  for (auto& block : results)
    for (auto& row : block) rep.rows.push_back(std::move(row));
  // Order-stable: function (catalog order), r, p, alpha, decreasing t.
  std::map<std::string, std::size_t> forder;
  for (std::size_t i = 0; i < funcs.size(); ++i) forder[funcs[i].id] = i;
  auto pkey = [](const LpExponent& p) { return p.is_infinite() ? 1e300 : p.value(); };
  std::stable_sort(rep.rows.begin(), rep.rows.end(), [&](const auto& a, const auto& b) {
    if (a.function_id != b.function_id) return forder[a.function_id] < forder[b.function_id];
    if (a.r != b.r) return a.r < b.r;
    if (pkey(a.p) != pkey(b.p)) return pkey(a.p) < pkey(b.p);
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    return a.t > b.t;
  });

  for (std::size_t i = 0; i < rep.rows.size();) {
    std::size_t j = i;
    std::vector<const ExperimentRow*> group;
    while (j < rep.rows.size() && rep.rows[j].function_id == rep.rows[i].function_id &&
           rep.rows[j].r == rep.rows[i].r && rep.rows[j].p == rep.rows[i].p &&
           rep.rows[j].alpha == rep.rows[i].alpha)
      group.push_back(&rep.rows[j++]);
    rep.summary.push_back(summarize(group, "ratio14"));
    if (rep.rows[i].r == 1) rep.summary.push_back(summarize(group, "ratio_equiv"));
    if (cfg.compute_full) rep.summary.push_back(summarize(group, "ratio_full"));
    i = j;
  }
  return rep;
}

}  // namespace gammak
