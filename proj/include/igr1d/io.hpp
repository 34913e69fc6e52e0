#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "igr1d/dynamics.hpp"
#include "igr1d/eulerian.hpp"
#include "igr1d/studies.hpp"

namespace igr1d {

/// Numeric table with unit-annotated column headers such as "x [L]".
/// Undefined entries (NaN) print as "undefined".
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of the column whose header is name or starts with "name [".
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

/// 17 significant digits: every finite double survives a write/read cycle.
std::string format_double(double value);
double parse_double(const std::string& text);

enum class TableFormat { csv, json };
TableFormat table_format_from_string(const std::string& name);
const char* extension(TableFormat format);

void write_table(const std::filesystem::path& path, const Table& table, TableFormat format);
Table read_table(const std::filesystem::path& path);

std::string to_csv(const Table& table);
Table parse_csv(const std::string& text);

nlohmann::json to_json(const SolveReport& report);
SolveReport report_from_json(const nlohmann::json& j);

/// Writes JSON text with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// x, phi, dphi_dx (slope of the cell right of the node; the last node uses
/// the last cell), phi_dot, phi_ddot.
Table frame_table(const LagrangianFrame& frame, const Grid& grid);
/// Rebuilds phi, phi_dot and phi_ddot; t and the report are not stored in the table.
LagrangianFrame frame_from_table(const Table& table, double t);

/// x, u, rho, sigma.
Table eulerian_table(const EulerianState& state);

/// t, mass, mass_drift, momentum, sigma_a, sigma_b, budget_residual.
Table conservation_table(const std::vector<ConservationRow>& rows);
std::vector<ConservationRow> conservation_from_table(const Table& table);

/// alpha, sup_distance, l2mu_distance, energy_gap, min_derivative, raw_sup_distance.
Table gamma_table(const std::vector<GammaStudyRow>& rows);
std::vector<GammaStudyRow> gamma_from_table(const Table& table);

/// pair, ratio.
Table stability_table(const StabilityStudy& study);

/// N, delta, then each error followed by its order, then mass_drift.
Table refinement_table(const std::vector<RefinementRow>& rows);
std::vector<RefinementRow> refinement_from_table(const Table& table);

}  // namespace igr1d
