#include "igr1d/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace igr1d {

namespace {

constexpr const char* kUndefined = "undefined";

double or_nan(const std::optional<double>& v) { return v ? *v : std::numeric_limits<double>::quiet_NaN(); }

std::optional<double> from_nan(double v) { return std::isnan(v) ? std::nullopt : std::optional<double>(v); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Header name without its unit annotation.
std::string bare(const std::string& header) {
  const auto pos = header.find(" [");
  return pos == std::string::npos ? header : header.substr(0, pos);
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double number_from_json(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] == name || bare(columns[k]) == name) return k;
  }
  throw std::invalid_argument("table has no column " + name);
}

std::vector<double> Table::values(const std::string& name) const {
  const std::size_t k = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(k));
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) return kUndefined;
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t == kUndefined || t.empty() || t == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  // Subnormals report out-of-range but still carry the exact value.
  if ((ec != std::errc() && ec != std::errc::result_out_of_range) || end != t.data() + t.size()) {
    throw std::invalid_argument("not a number: " + t);
  }
  return v;
}

TableFormat table_format_from_string(const std::string& name) {
  if (name == "csv") return TableFormat::csv;
  if (name == "json") return TableFormat::json;
  throw std::invalid_argument("unknown format: " + name + " (expected csv or json)");
}

const char* extension(TableFormat format) { return format == TableFormat::csv ? ".csv" : ".json"; }

std::string to_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t k = 0; k < table.columns.size(); ++k) out << (k ? "," : "") << table.columns[k];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
    out << '\n';
  }
  return out.str();
}

Table parse_csv(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
    if (header) {
      table.columns = cells;
      header = false;
      continue;
    }
    if (cells.size() != table.columns.size()) throw std::invalid_argument("csv row has wrong number of cells");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c));
    table.rows.push_back(std::move(row));
  }
  if (header) throw std::invalid_argument("csv has no header");
  return table;
}

void write_table(const std::filesystem::path& path, const Table& table, TableFormat format) {
  if (format == TableFormat::csv) {
    write_file(path, to_csv(table));
    return;
  }
  nlohmann::json j;
  j["columns"] = table.columns;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (double v : row) r.push_back(json_number(v));
    j["rows"].push_back(r);
  }
  write_json(path, j);
}

Table read_table(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    const auto j = read_json(path);
    Table table;
    table.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
      std::vector<double> row;
      for (const auto& v : r) row.push_back(number_from_json(v));
      table.rows.push_back(std::move(row));
    }
    return table;
  }
  return parse_csv(read_file(path));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_file(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const std::filesystem::path& path) { return nlohmann::json::parse(read_file(path)); }

nlohmann::json to_json(const SolveReport& report) {
  nlohmann::json j;
  j["method"] = to_string(report.method);
  j["iterations"] = report.iterations;
  j["final_grad_norm"] = json_number(report.final_grad_norm);
  j["gradient_floor"] = json_number(report.gradient_floor);
  j["objective"] = json_number(report.objective);
  j["min_cell_derivative"] = json_number(report.min_cell_derivative);
  j["max_cell_derivative"] = json_number(report.max_cell_derivative);
  j["derivative_lower_bound"] = json_number(report.derivative_lower_bound);
  j["density_floor"] = json_number(report.density_floor);
  j["shooting_constant"] = json_number(report.shooting_constant);
  nlohmann::json history = nlohmann::json::array();
  for (double v : report.objective_history) history.push_back(json_number(v));
  j["objective_history"] = history;
  return j;
}

SolveReport report_from_json(const nlohmann::json& j) {
  SolveReport r;
  r.method = j.at("method").get<std::string>() == "shooting" ? SolveMethod::shooting : SolveMethod::newton;
  r.iterations = j.at("iterations").get<int>();
  r.final_grad_norm = number_from_json(j.at("final_grad_norm"));
  r.gradient_floor = number_from_json(j.at("gradient_floor"));
  r.objective = number_from_json(j.at("objective"));
  r.min_cell_derivative = number_from_json(j.at("min_cell_derivative"));
  r.max_cell_derivative = number_from_json(j.at("max_cell_derivative"));
  r.derivative_lower_bound = number_from_json(j.at("derivative_lower_bound"));
  r.density_floor = number_from_json(j.at("density_floor"));
  r.shooting_constant = number_from_json(j.at("shooting_constant"));
  for (const auto& v : j.at("objective_history")) r.objective_history.push_back(number_from_json(v));
  return r;
}

Table frame_table(const LagrangianFrame& frame, const Grid& grid) {
  Table t;
  t.columns = {"x [L]", "phi [L]", "dphi_dx [1]", "phi_dot [L/T]", "phi_ddot [L/T^2]"};
  const auto slopes = cell_derivative(grid, frame.phi.values);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double slope = slopes[std::min(i, slopes.size() - 1)];
    t.rows.push_back({grid.node(i), frame.phi.values[i], slope, frame.phi_dot[i], frame.phi_ddot[i]});
  }
  return t;
}

LagrangianFrame frame_from_table(const Table& table, double t) {
  LagrangianFrame f;
  f.t = t;
  f.phi.values = table.values("phi");
  f.phi_dot = table.values("phi_dot");
  f.phi_ddot = table.values("phi_ddot");
  return f;
}

Table eulerian_table(const EulerianState& state) {
  Table t;
  t.columns = {"x [L]", "u [L/T]", "rho [M/L]", "sigma [M L/T^2]"};
  for (std::size_t j = 0; j < state.x.size(); ++j) {
    const double sigma = state.sigma.empty() ? std::numeric_limits<double>::quiet_NaN() : state.sigma[j];
    t.rows.push_back({state.x[j], state.u[j], state.rho[j], sigma});
  }
  return t;
}

Table conservation_table(const std::vector<ConservationRow>& rows) {
  Table t;
  t.columns = {"t [T]",           "mass [M]",          "mass_drift [M]",         "momentum [M L/T]",
               "sigma_a [M L/T^2]", "sigma_b [M L/T^2]", "budget_residual [M L/T^2]"};
  for (const auto& r : rows) {
    t.rows.push_back({r.t, r.mass, r.mass_drift, r.momentum, r.sigma_a, r.sigma_b, or_nan(r.budget_residual)});
  }
  return t;
}

std::vector<ConservationRow> conservation_from_table(const Table& table) {
  std::vector<ConservationRow> rows;
  for (const auto& r : table.rows) {
    ConservationRow c;
    c.t = r.at(table.column("t"));
    c.mass = r.at(table.column("mass"));
    c.mass_drift = r.at(table.column("mass_drift"));
    c.momentum = r.at(table.column("momentum"));
    c.sigma_a = r.at(table.column("sigma_a"));
    c.sigma_b = r.at(table.column("sigma_b"));
    c.budget_residual = from_nan(r.at(table.column("budget_residual")));
    rows.push_back(c);
  }
  return rows;
}

Table gamma_table(const std::vector<GammaStudyRow>& rows) {
  Table t;
  t.columns = {"alpha [L^2]",   "sup_distance [L]",  "l2mu_distance [L]",
               "energy_gap [M L^2]", "min_derivative [1]", "raw_sup_distance [L]"};
  for (const auto& r : rows) {
    t.rows.push_back({r.alpha, r.sup_distance, r.l2mu_distance, r.energy_gap, r.min_derivative, r.raw_sup_distance});
  }
  return t;
}

std::vector<GammaStudyRow> gamma_from_table(const Table& table) {
  std::vector<GammaStudyRow> rows;
  for (const auto& r : table.rows) {
    GammaStudyRow g;
    g.alpha = r.at(table.column("alpha"));
    g.sup_distance = r.at(table.column("sup_distance"));
    g.l2mu_distance = r.at(table.column("l2mu_distance"));
    g.energy_gap = r.at(table.column("energy_gap"));
    g.min_derivative = r.at(table.column("min_derivative"));
    g.raw_sup_distance = r.at(table.column("raw_sup_distance"));
    rows.push_back(g);
  }
  return rows;
}

Table stability_table(const StabilityStudy& study) {
  Table t;
  t.columns = {"pair [1]", "ratio [1]"};
  for (std::size_t k = 0; k < study.ratios.size(); ++k) {
    t.rows.push_back({static_cast<double>(k), study.ratios[k]});
  }
  return t;
}

Table refinement_table(const std::vector<RefinementRow>& rows) {
  Table t;
  t.columns = {"N [1]",
               "delta [T]",
               "phi_dot_error [L/T]",
               "phi_dot_order [1]",
               "phi_ddot_error [L/T^2]",
               "phi_ddot_order [1]",
               "mass_residual [M/(L T)]",
               "mass_order [1]",
               "momentum_residual [M/T^2]",
               "momentum_order [1]",
               "budget_residual [M L/T^2]",
               "budget_order [1]",
               "mass_drift [M]"};
  for (const auto& r : rows) {
    t.rows.push_back({static_cast<double>(r.cells), r.delta, r.phi_dot_error, or_nan(r.phi_dot_order),
                      r.phi_ddot_error, or_nan(r.phi_ddot_order), r.mass_residual, or_nan(r.mass_order),
                      r.momentum_residual, or_nan(r.momentum_order), r.budget_residual, or_nan(r.budget_order),
                      r.mass_drift});
  }
  return t;
}

std::vector<RefinementRow> refinement_from_table(const Table& table) {
  std::vector<RefinementRow> rows;
  for (const auto& r : table.rows) {
    RefinementRow x;
    x.cells = static_cast<std::size_t>(r.at(table.column("N")));
    x.delta = r.at(table.column("delta"));
    x.phi_dot_error = r.at(table.column("phi_dot_error"));
    x.phi_dot_order = from_nan(r.at(table.column("phi_dot_order")));
    x.phi_ddot_error = r.at(table.column("phi_ddot_error"));
    x.phi_ddot_order = from_nan(r.at(table.column("phi_ddot_order")));
    x.mass_residual = r.at(table.column("mass_residual"));
    x.mass_order = from_nan(r.at(table.column("mass_order")));
    x.momentum_residual = r.at(table.column("momentum_residual"));
    x.momentum_order = from_nan(r.at(table.column("momentum_order")));
    x.budget_residual = r.at(table.column("budget_residual"));
    x.budget_order = from_nan(r.at(table.column("budget_order")));
    x.mass_drift = r.at(table.column("mass_drift"));
    rows.push_back(x);
  }
  return rows;
}

}  // namespace igr1d
