#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gammak/catalog.hpp"
#include "gammak/kfunctional.hpp"
#include "gammak/modulus.hpp"

namespace gammak {

/// Schema violation or inadmissible value in an experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  GammaSpec gamma;
  std::vector<std::string> functions;  ///< catalog ids; empty selects the default catalog
  std::vector<int> r;
  std::vector<LpExponent> p;
  std::vector<double> alpha;
  /// Either one entry n (the n decades ending at the horizon of each r) or two
  /// entries [lo, hi] (t from 10^lo to 10^hi).
  std::vector<double> t_decades{1.0};
  /// t values are spaced by a factor 10^{1/t_per_decade}, endpoints included.
  int t_per_decade = 7;
  AnalysisConfig analysis;
  bool compute_full = true;
  int threads = 0;  ///< 0 selects the hardware concurrency
  std::string out_csv;
  std::string out_svg;

  /// Upper-construction horizon per r, filled by validate().
  std::map<int, double> horizons;

  /// The t-grid for one r, largest t first.
  std::vector<double> t_values(int r) const;
};

/// Checks the configuration and precomputes the horizons. Throws ConfigError.
void validate(ExperimentConfig& cfg);

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct ExperimentRow {
  std::string function_id;
  int r = 1;
  LpExponent p = LpExponent::finite(2.0);
  double alpha = 0.0;
  double t = 0.0;
  ModulusResult modulus;
  std::vector<double> omega_n;  ///< main-part moduli of orders 1..r
  KEstimate k_restricted;
  KEstimate k_full;
  double ratio14 = 0.0;       ///< K restricted / sum_n t^{r-n} Omega^n
  double ratio_equiv = 0.0;   ///< K restricted / Omega^1 (r = 1 only)
  double ratio_full = 0.0;    ///< K full / omega complete
  bool ratio14_defined = false;
  bool ratio_equiv_defined = false;
  bool ratio_full_defined = false;
  std::string status = "ok";
};

/// min / max / spread of one ratio over the t-grid of a (function, r, p, alpha)
/// group. `growth` is the largest ratio relative to the one at the largest t.
struct RatioSummary {
  std::string function_id;
  int r = 1;
  LpExponent p = LpExponent::finite(2.0);
  double alpha = 0.0;
  std::string ratio;
  int defined = 0;
  double min = 0.0;
  double max = 0.0;
  double spread = 0.0;
  double growth = 0.0;
  /// "ok", "zero" (numerator <= 1e-10 for every t: spread 1) or "undefined".
  std::string kind = "ok";
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  std::vector<RatioSummary> summary;
};

/// Evaluates one (function, r) block for every (p, alpha, t). Per-cell
/// failures are recorded in the status column.
std::vector<ExperimentRow> run_block(const CatalogFunction& f, const GammaFunction& g, int r,
                                     const ExperimentConfig& cfg);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Summary of the given ratio ("ratio14", "ratio_equiv" or "ratio_full") for
/// rows of one group, ordered by decreasing t.
RatioSummary summarize(const std::vector<const ExperimentRow*>& group, const std::string& ratio);

}  // namespace gammak
