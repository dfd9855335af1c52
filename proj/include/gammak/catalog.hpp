#pragma once

#include <map>
#include <string>
#include <vector>

#include "gammak/calculus.hpp"
#include "gammak/gamma.hpp"

namespace gammak {

enum class CatalogKind { gamma_poly, piecewise_power, exp_decay, smooth_classical, custom_sum };
std::string to_string(CatalogKind k);

struct CatalogFunction {
  std::string id;
  CatalogKind kind = CatalogKind::smooth_classical;
  std::map<std::string, double> parameters;
  bool has_classical = false;
  bool has_gamma_derivatives = false;
  RealFunction fn;
};

/// Builds one entry from its id:
///   zero, gamma_poly_<m> (gamma^m), abs_pow_<d> (|x - a_1|^d, d given as a
///   decimal), abs_pow_beta, abs_pow_2beta, abs_pow_1, exp (e^{-x}),
///   xexp (x e^{-x/2}).
/// Throws std::invalid_argument for unknown ids.
CatalogFunction catalog_function(const std::string& id, const GammaFunction& g);

/// gamma-polynomials of degree 0..max_degree, |x - a_1|^d for d in
/// {beta_1, 2 beta_1, 1}, e^{-x} and x e^{-x/2}.
std::vector<CatalogFunction> default_catalog(const GammaFunction& g, int max_degree);

/// |x - a|^d. With a single singular point the gamma-derivatives below the
/// linear branch come from |gamma(x) - gamma(a)|^{d / beta}; otherwise only
/// classical derivatives are attached.
CatalogFunction abs_power(const GammaFunction& g, double d, const std::string& id);

}  // namespace gammak
