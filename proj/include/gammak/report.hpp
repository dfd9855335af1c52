#pragma once

#include <string>
#include <vector>

#include "gammak/experiment.hpp"

namespace gammak {

/// Main table: one line per grid cell.
std::string main_csv_header();
std::string main_csv(const ExperimentReport& rep);
/// K-functional table: two lines per cell (restricted, full).
std::string k_csv_header();
std::string k_csv(const ExperimentReport& rep);
std::string summary_csv(const ExperimentReport& rep);

std::string format_number(double v);

/// Splits CSV text into rows of fields (no quoting is ever emitted).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

/// Log-log panels of omega_main, omega_complete and the restricted K bound
/// against t, one panel per (function, r, p, alpha) group, read back from the
/// main CSV text.
std::string svg_from_csv(const std::string& main_csv_text);

/// Tag balance and attribute quoting check for the markup we emit.
bool well_formed_xml(const std::string& text, std::string* error = nullptr);

struct ReportPaths {
  std::string csv;  ///< main table; the K and summary tables go next to it
  std::string svg;
};

/// Writes the tables (and the chart when svg is set). Throws std::runtime_error
/// for unwritable paths.
void emit_reports(const ExperimentReport& rep, const ReportPaths& paths);

/// path with ".csv" replaced by suffix + ".csv".
std::string sibling_path(const std::string& path, const std::string& suffix);

}  // namespace gammak
