#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gammak/catalog.hpp"
#include "gammak/experiment.hpp"
#include "gammak/kfunctional.hpp"
#include "gammak/report.hpp"
#include "gammak/verify.hpp"

using namespace gammak;

namespace {

struct GammaArgs {
  std::vector<double> a{1.0};
  std::vector<double> beta{0.25};
  int r_max = 3;
  std::vector<double> affine;  // {slope, intercept}

  void add(CLI::App* app) {
    app->add_option("--a", a, "singular points a_1 < ... < a_N")->delimiter(',');
    app->add_option("--beta", beta, "exponents beta_k")->delimiter(',');
    app->add_option("--r-max", r_max, "largest supported derivative order");
    app->add_option("--affine", affine, "use gamma(x) = A x + B instead, given as A,B")
        ->delimiter(',')
        ->expected(2);
  }
  GammaFunction build() const {
    if (affine.size() == 2) return GammaFunction::affine(affine[0], affine[1]);
    return build_gamma(GammaSpec{a, beta, r_max});
  }
};

struct PointArgs {
  std::string function = "exp";
  int r = 1;
  std::string p = "2";
  double alpha = 0.0;
  std::vector<double> t;
  void add(CLI::App* app) {
    app->add_option("-f,--function", function, "catalog id (zero, gamma_poly_<m>, abs_pow_beta, "
                                               "abs_pow_2beta, abs_pow_<d>, exp, xexp)");
    app->add_option("-r,--order", r, "order r");
    app->add_option("-p,--p", p, "Lebesgue exponent (number >= 1 or inf)");
    app->add_option("--alpha", alpha, "Laguerre weight exponent");
    app->add_option("-t,--t", t, "t values (default: the horizon)")->delimiter(',');
  }
};

void print_list(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) std::cout << (i ? ";" : "") << format_number(v[i]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gamma-relative moduli of smoothness and K-functional bounds"};
  app.require_subcommand(1);

  QuadratureConfig quad;
  app.add_option("--rel-tol", quad.rel_tol, "relative quadrature tolerance");
  app.add_option("--abs-tol", quad.abs_tol, "absolute quadrature tolerance");
  app.add_option("--max-subdiv", quad.max_subdivisions, "subdivision budget of the adaptive rule");
  app.add_option("--sup-grid", quad.sup_grid_density, "sup grid points per unit length");

  // gamma eval | inverse
  auto* gamma_cmd = app.add_subcommand("gamma", "evaluate gamma or its inverse");
  gamma_cmd->require_subcommand(1);
  GammaArgs gargs;
  std::vector<double> points;
  int deriv = 0;
  auto* geval = gamma_cmd->add_subcommand("eval", "gamma(x) or its j-th derivative");
  gargs.add(geval);
  geval->add_option("x", points, "abscissae")->required();
  geval->add_option("--derivative", deriv, "derivative order j (0 for the value)");
  auto* ginv = gamma_cmd->add_subcommand("inverse", "gamma^{-1}(y) or its r-th derivative");
  GammaArgs iargs;
  iargs.add(ginv);
  ginv->add_option("y", points, "values")->required();
  ginv->add_option("--derivative", deriv, "derivative order r of the inverse (0 for the value)");

  // modulus
  auto* mod_cmd = app.add_subcommand("modulus", "main-part and complete modulus");
  GammaArgs margs;
  PointArgs mpt;
  margs.add(mod_cmd);
  mpt.add(mod_cmd);
  bool per_h = false;
  mod_cmd->add_flag("--per-h", per_h, "also print the h-grid and per-h norms");

  // kfunc
  auto* k_cmd = app.add_subcommand("kfunc", "constructive K-functional upper bounds");
  GammaArgs kargs;
  PointArgs kpt;
  kargs.add(k_cmd);
  kpt.add(k_cmd);
  std::string variant = "restricted";
  k_cmd->add_option("--variant", variant, "restricted or full")->check(CLI::IsMember({"restricted", "full"}));

  // run
  auto* run_cmd = app.add_subcommand("run", "batch experiment from a JSON config");
  std::string config_path, csv_override, svg_override;
  int threads = -1;
  run_cmd->add_option("config", config_path, "config file")->required();
  run_cmd->add_option("--csv", csv_override, "override out.csv");
  run_cmd->add_option("--svg", svg_override, "override out.svg");
  run_cmd->add_option("--threads", threads, "worker threads (0: hardware concurrency)");

  // verify
  auto* ver_cmd = app.add_subcommand("verify", "run the invariant suites");
  std::string suite = "all";
  std::string fault;
  ver_cmd->add_option("suite", suite, "calculus, weights, modulus, kfunctional or all")
      ->check(CLI::IsMember({"calculus", "weights", "modulus", "kfunctional", "all"}));
  ver_cmd->add_option("--inject-fault", fault, "mutation check: c1-sign flips the sign of c1")
      ->check(CLI::IsMember({"c1-sign"}));

  CLI11_PARSE(app, argc, argv);

  try {
    validate(quad);
    if (gamma_cmd->parsed()) {
      const bool inv = ginv->parsed();
      const GammaFunction g = inv ? iargs.build() : gargs.build();
      std::cout << (inv ? "y,value,breakpoint\n" : "x,value\n");
      for (double v : points) {
        if (inv) {
          if (deriv == 0) {
            std::cout << format_number(v) << ',' << format_number(g.inverse(v)) << ",0\n";
          } else {
            const auto d = g.inverse_derivative(v, deriv);
            std::cout << format_number(v) << ',' << format_number(d.value) << ',' << (d.breakpoint ? 1 : 0) << '\n';
          }
        } else {
          std::cout << format_number(v) << ',' << format_number(deriv == 0 ? g(v) : g.derivative(v, deriv)) << '\n';
        }
      }
      return 0;
    }

    if (mod_cmd->parsed() || k_cmd->parsed()) {
      const bool is_mod = mod_cmd->parsed();
      const GammaFunction g = (is_mod ? margs : kargs).build();
      const PointArgs& pt = is_mod ? mpt : kpt;
      const auto f = catalog_function(pt.function, g);
      const LpExponent p = LpExponent::parse(pt.p);
      AnalysisConfig cfg;
      cfg.quad = quad;
      cfg.constants = default_constants(g);
      std::vector<double> ts = pt.t;
      if (ts.empty())
        ts.push_back(max_time_horizon(g, pt.r, cfg.constants.A1, cfg.constants.A2, HorizonVariant::upper_construction));
      if (is_mod) {
        std::cout << "function_id,r,p,alpha,t,omega_main,tail_zero,tail_infinity,omega_complete"
                  << (per_h ? ",h_grid,per_h_norms" : "") << '\n';
        for (double t : ts) {
          const auto m = complete_modulus(f.fn, g, pt.r, t, p, pt.alpha, cfg);
          std::cout << f.id << ',' << pt.r << ',' << p.str() << ',' << format_number(pt.alpha) << ','
                    << format_number(t) << ',' << format_number(m.omega_main) << ','
                    << format_number(m.tail_zero) << ',' << format_number(m.tail_infinity) << ','
                    << format_number(m.omega_complete);
          if (per_h) {
            std::cout << ',';
            print_list(m.h_grid);
            std::cout << ',';
            print_list(m.per_h_norms);
          }
          std::cout << '\n';
        }
      } else {
        SteklovCache cache;
        std::cout << k_csv_header();
        for (double t : ts) {
          const auto k = variant == "full" ? full_k_upper(f.fn, g, pt.r, t, p, pt.alpha, cfg, {}, &cache)
                                           : restricted_k_upper(f.fn, g, pt.r, t, p, pt.alpha, cfg, {}, &cache);
          std::cout << f.id << ',' << variant << ',' << pt.r << ',' << p.str() << ','
                    << format_number(pt.alpha) << ',' << format_number(t) << ',' << format_number(k.value)
                    << ',' << format_number(k.approx_error_term) << ',' << format_number(k.seminorm_term)
                    << ',' << k.candidate_id << ",ok\n";
          if (!k.notes.empty()) std::cerr << "note: " << k.notes << '\n';
        }
      }
      return 0;
    }

    if (run_cmd->parsed()) {
      ExperimentConfig cfg = load_config(config_path);
      if (app.get_option("--rel-tol")->count()) cfg.analysis.quad.rel_tol = quad.rel_tol;
      if (app.get_option("--abs-tol")->count()) cfg.analysis.quad.abs_tol = quad.abs_tol;
      if (app.get_option("--max-subdiv")->count()) cfg.analysis.quad.max_subdivisions = quad.max_subdivisions;
      if (app.get_option("--sup-grid")->count()) cfg.analysis.quad.sup_grid_density = quad.sup_grid_density;
      if (!csv_override.empty()) cfg.out_csv = csv_override;
      if (!svg_override.empty()) cfg.out_svg = svg_override;
      if (threads >= 0) cfg.threads = threads;
      for (const auto& [r, T] : cfg.horizons) std::cerr << "horizon r=" << r << ": " << T << '\n';
      const auto t0 = std::chrono::steady_clock::now();
      const auto rep = run_experiment(cfg);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (cfg.out_csv.empty()) std::cout << main_csv(rep);
      emit_reports(rep, {cfg.out_csv, cfg.out_svg});
      std::cerr << rep.rows.size() << " rows in " << secs << " s\n" << summary_csv(rep);
      int failed = 0;
      for (const auto& row : rep.rows) failed += row.status != "ok";
      if (failed) std::cerr << failed << " rows carry an error status\n";
      return 0;
    }

    if (ver_cmd->parsed()) {
      VerifyOptions opt;
      opt.quad = quad;
      opt.flip_c1 = fault == "c1-sign";
      int failed = 0;
      const auto results = verify(suite, opt);
      for (const auto& c : results) {
        std::cout << format_check(c) << '\n';
        failed += !c.passed;
      }
      std::cout << (results.size() - failed) << '/' << results.size() << " invariants hold\n";
      return failed ? 1 : 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
