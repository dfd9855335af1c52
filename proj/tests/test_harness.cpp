#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gammak/catalog.hpp"
#include "gammak/experiment.hpp"
#include "gammak/report.hpp"
#include "gammak/verify.hpp"

using namespace gammak;

namespace {

const GammaFunction& G() {
  static const GammaFunction g = build_gamma(default_gamma_spec());
  return g;
}

const char* kSmallConfig = R"({
  "gamma": {"a": [1.0], "beta": [0.25], "r_max": 3},
  "grid": {"r": [1], "p": [2, "inf"], "alpha": [0], "t_decades": [-2.5, -2], "t_per_decade": 2},
  "functions": ["exp", "zero", "gamma_poly_0"]
})";

std::string with_grid(const std::string& grid) {
  return R"({"gamma": {"a": [1.0], "beta": [0.25], "r_max": 3}, "grid": )" + grid + "}";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Catalog, DefaultEntries) {
  const auto cat = default_catalog(G(), 2);
  std::vector<std::string> ids;
  for (const auto& c : cat) ids.push_back(c.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"gamma_poly_0", "gamma_poly_1", "gamma_poly_2", "abs_pow_beta",
                                           "abs_pow_2beta", "abs_pow_1", "exp", "xexp"}));
  for (const auto& c : cat)
    for (double alpha : {0.0, 1.0})
      for (auto p : {LpExponent::finite(2.0), LpExponent::infinity()}) {
        const double n = weighted_lp_norm(c.fn, {alpha}, {p});
        EXPECT_TRUE(std::isfinite(n)) << c.id;
      }
}

TEST(Catalog, Lookup) {
  EXPECT_EQ(catalog_function("abs_pow_beta", G()).kind, CatalogKind::piecewise_power);
  EXPECT_NEAR(catalog_function("abs_pow_0.6", G()).fn(2.0), 1.0, 1e-15);
  EXPECT_NEAR(catalog_function("xexp", G()).fn(2.0), 2 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(catalog_function("gamma_poly_2", G()).fn(3.0), std::pow(G()(3.0), 2), 1e-14);
  EXPECT_EQ(catalog_function("zero", G()).fn(1.3), 0.0);
  EXPECT_THROW(catalog_function("nope", G()), std::invalid_argument);
}

TEST(Config, MinimalIsValid) {
  const auto cfg = parse_config(with_grid(R"({"r": [1], "p": [2], "alpha": [0]})"));
  EXPECT_EQ(cfg.r, std::vector<int>{1});
  EXPECT_DOUBLE_EQ(cfg.analysis.constants.A2, 0.125);
  ASSERT_EQ(cfg.horizons.count(1), 1u);
  const auto t = cfg.t_values(1);
  EXPECT_EQ(t.size(), 8u);
  EXPECT_DOUBLE_EQ(t.front(), cfg.horizons.at(1));
  EXPECT_NEAR(t.back(), cfg.horizons.at(1) / 10, 1e-15);
}

TEST(Config, InfinityAndExtras) {
  const auto cfg = parse_config(R"({
    "gamma": {"a": [1.0], "beta": [0.25], "r_max": 3},
    "grid": {"r": [1, 2], "p": [1, "inf"], "alpha": [0, 1], "n_h": 12, "rho": 0.8},
    "constants": {"A1": 2.0, "A2": 0.1},
    "quad": {"rel_tol": 1e-9, "abs_tol": 1e-13},
    "out": {"csv": "x.csv", "svg": "x.svg"},
    "run": {"threads": 1, "full": false}})");
  EXPECT_TRUE(cfg.p[1].is_infinite());
  EXPECT_EQ(cfg.analysis.n_h, 12);
  EXPECT_DOUBLE_EQ(cfg.analysis.constants.A1, 2.0);
  EXPECT_DOUBLE_EQ(cfg.analysis.quad.rel_tol, 1e-9);
  EXPECT_EQ(cfg.out_svg, "x.svg");
  EXPECT_FALSE(cfg.compute_full);
}

TEST(Config, Rejections) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(with_grid(R"({"r": [1], "p": [2], "alpha": [0], "t_decades": [-1, 0]})"))
                .find("above the horizon"),
            std::string::npos);
  EXPECT_NE(message(R"({"gamma": {"a": [1.0], "beta": [0.4], "r_max": 3},
                       "grid": {"r": [3], "p": [2], "alpha": [0]}})")
                .find("below 1/r"),
            std::string::npos);
  EXPECT_NE(message(with_grid(R"({"r": [1], "p": [0.5], "alpha": [0]})")).find("grid.p[0]"), std::string::npos);
  EXPECT_NE(message(with_grid(R"({"r": [1], "p": [2]})")).find("grid.alpha: missing"), std::string::npos);
  EXPECT_NE(message(with_grid(R"({"r": [], "p": [2], "alpha": [0]})")).find("grid.r"), std::string::npos);
  EXPECT_NE(message(with_grid(R"({"r": [1], "p": [2], "alpha": [-0.7]})")).find("-1/p"), std::string::npos);
  EXPECT_NE(message("{not json").find("does not parse"), std::string::npos);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Experiment, RowsAndRatios) {
  auto cfg = parse_config(kSmallConfig);
  cfg.threads = 1;
  const auto rep = run_experiment(cfg);
  ASSERT_EQ(rep.rows.size(), 3u * 2u * 2u);
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.status, "ok") << row.function_id;
    EXPECT_NEAR(row.modulus.omega_complete,
                row.modulus.omega_main + row.modulus.tail_zero + row.modulus.tail_infinity, 1e-15);
    if (row.function_id == "exp") {
      EXPECT_TRUE(row.ratio14_defined);
      EXPECT_TRUE(row.ratio_equiv_defined);
      EXPECT_GT(row.ratio14, 0.0);
    } else {
      EXPECT_LE(row.k_restricted.value, 1e-10);
      EXPECT_LE(row.k_full.value, 1e-10);
      EXPECT_FALSE(row.ratio14_defined);
    }
  }
  bool saw_zero = false;
  for (const auto& s : rep.summary)
    if (s.function_id == "zero" && s.ratio == "ratio14") {
      EXPECT_EQ(s.kind, "zero");
      saw_zero = true;
    }
  EXPECT_TRUE(saw_zero);
}

TEST(Experiment, Deterministic) {
  auto cfg = parse_config(kSmallConfig);
  cfg.compute_full = false;
  cfg.threads = 2;
  const auto a = main_csv(run_experiment(cfg));
  cfg.threads = 1;
  EXPECT_EQ(a, main_csv(run_experiment(cfg)));
}

TEST(Report, EmptyIsHeaderOnly) {
  const ExperimentReport empty;
  EXPECT_EQ(main_csv(empty), main_csv_header());
  EXPECT_EQ(k_csv(empty), k_csv_header());
  EXPECT_EQ(main_csv_header(),
            "function_id,r,p,alpha,t,omega_main,tail_zero,tail_infinity,omega_complete,k_restricted,k_full,"
            "ratio14,ratio_equiv,ratio_full,status\n");
  EXPECT_EQ(k_csv_header(),
            "function_id,variant,r,p,alpha,t,value,approx_error_term,seminorm_term,candidate_id,status\n");
}

TEST(Report, RoundTripAndSvg) {
  auto cfg = parse_config(kSmallConfig);
  cfg.functions = {"exp"};
  cfg.p = {LpExponent::finite(2.0)};
  cfg.t_decades = {-2.5, -2.0};
  cfg.t_per_decade = 1;
  validate(cfg);
  const auto rep = run_experiment(cfg);
  ASSERT_EQ(rep.rows.size(), 2u);
  const auto rows = parse_csv(main_csv(rep));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "exp");
  EXPECT_EQ(std::stod(rows[1][4]), rep.rows[0].t);
  EXPECT_EQ(std::stod(rows[1][5]), rep.rows[0].modulus.omega_main);
  EXPECT_EQ(std::stod(rows[1][9]), rep.rows[0].k_restricted.value);

  std::string err;
  const auto svg = svg_from_csv(main_csv(rep));
  EXPECT_TRUE(well_formed_xml(svg, &err)) << err;
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_FALSE(well_formed_xml("<svg><g></svg>"));

  const auto dir = std::filesystem::temp_directory_path() / "gammak_report_test";
  std::filesystem::create_directories(dir);
  const std::string csv = (dir / "out.csv").string(), svgp = (dir / "out.svg").string();
  emit_reports(rep, {csv, svgp});
  EXPECT_EQ(slurp(csv), main_csv(rep));
  EXPECT_EQ(slurp(sibling_path(csv, "_k")), k_csv(rep));
  EXPECT_TRUE(std::filesystem::exists(sibling_path(csv, "_summary")));
  EXPECT_TRUE(well_formed_xml(slurp(svgp)));
  EXPECT_THROW(emit_reports(rep, {"/nonexistent/dir/out.csv", ""}), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(FormatNumber, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678})
    EXPECT_EQ(std::stod(format_number(v)), v);
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Verify, SuitesPass) {
  for (const auto& suite : {"calculus", "weights"}) {
    for (const auto& c : verify(suite)) EXPECT_TRUE(c.passed) << format_check(c);
  }
  EXPECT_THROW(verify("bogus"), std::invalid_argument);
}

TEST(Verify, FaultInjectionBreaksC1Join) {
  VerifyOptions opt;
  opt.flip_c1 = true;
  bool join_failed = false;
  for (const auto& c : verify("weights", opt))
    if (c.name == "gamma_c1_join") join_failed = !c.passed;
  EXPECT_TRUE(join_failed);
}
