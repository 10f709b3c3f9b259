#include "pacrnn/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pacrnn/errors.hpp"
#include "pacrnn/format.hpp"

namespace pacrnn {

namespace {

using json = nlohmann::json;

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string(what) + ": malformed JSON: " + e.what());
  }
}

double as_double(const json& j, const std::string& key) {
  if (!j.is_number()) throw InvalidInput("'" + key + "' must be a number");
  return j.get<double>();
}

std::size_t as_size(const json& j, const std::string& key) {
  if (!j.is_number_unsigned()) throw InvalidInput("'" + key + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

const json& require(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InvalidInput("missing key '" + key + "'");
  return *it;
}

Vector vector_from(const json& j, const std::string& key, std::size_t n) {
  if (!j.is_array() || j.size() != n) {
    throw InvalidInput("'" + key + "' must be an array of length " + std::to_string(n));
  }
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = as_double(j[i], key);
  return v;
}

Matrix matrix_from(const json& j, const std::string& key, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows) {
    throw InvalidInput("'" + key + "' must have " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Vector row = vector_from(j[r], key, cols);
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

json matrix_to(const Matrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first < last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InvalidInput("CSV line " + std::to_string(line_no) + ": cannot parse '" + cell + "'");
  }
  return v;
}

bool has_prefix(const std::string& s, std::string_view p) { return s.rfind(p, 0) == 0; }

}  // namespace

std::string model_to_json(const RnnSystem& sys) {
  sys.validate();
  json j;
  j["n_s"] = sys.n_s();
  j["n_v"] = sys.n_v();
  j["n_y"] = sys.n_y();
  j["sigma_f"] = std::string(sys.sigma_f.name());
  j["sigma_g"] = std::string(sys.sigma_g.name());
  j["A"] = matrix_to(sys.a);
  j["B"] = matrix_to(sys.b);
  j["b_s"] = sys.b_s;
  j["C"] = matrix_to(sys.c);
  j["D"] = matrix_to(sys.d);
  j["b_y"] = sys.b_y;
  return dump(j);
}

RnnSystem model_from_json(std::string_view text) {
  const json j = parse_json(text, "model");
  if (!j.is_object()) throw InvalidInput("model: top level must be an object");
  const std::size_t n_s = as_size(require(j, "n_s"), "n_s");
  const std::size_t n_v = as_size(require(j, "n_v"), "n_v");
  const std::size_t n_y = as_size(require(j, "n_y"), "n_y");
  if (n_s == 0 || n_v == 0 || n_y == 0) throw InvalidInput("model: dimensions must be positive");
  RnnSystem s;
  s.a = matrix_from(require(j, "A"), "A", n_s, n_s);
  s.b = matrix_from(require(j, "B"), "B", n_s, n_v);
  s.b_s = vector_from(require(j, "b_s"), "b_s", n_s);
  s.c = matrix_from(require(j, "C"), "C", n_y, n_s);
  s.d = matrix_from(require(j, "D"), "D", n_y, n_v);
  s.b_y = vector_from(require(j, "b_y"), "b_y", n_y);
  const json& sf = require(j, "sigma_f");
  const json& sg = require(j, "sigma_g");
  if (!sf.is_string() || !sg.is_string()) throw InvalidInput("model: activations must be strings");
  s.sigma_f = Activation::parse(sf.get<std::string>());
  s.sigma_g = Activation::parse(sg.get<std::string>());
  s.validate();
  return s;
}

RnnSystem read_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_file(path));
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void write_model(const std::filesystem::path& path, const RnnSystem& sys) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << model_to_json(sys);
  f.close();
  if (!f) throw Error("write failed for " + path.string());
}

std::string constants_to_json(const ClassSConstants& c) {
  json j;
  j["c"] = c.c;
  j["tau"] = c.tau;
  j["l_v"] = c.l_v;
  j["l_gs"] = c.l_gs;
  j["l_gv"] = c.l_gv;
  return dump(j);
}

std::string data_constants_to_json(const DataConstants& d) {
  json j;
  j["b_q"] = d.b_q;
  j["theta_bar"] = d.theta_bar;
  j["e_inf"] = d.e_inf;
  return dump(j);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  traj.validate();
  const std::size_t m = traj.size() ? traj.inputs[0].size() : 0;
  const std::size_t p = traj.size() ? traj.outputs[0].size() : 0;
  out << 't';
  for (std::size_t i = 0; i < m; ++i) out << ",x_" << i;
  for (std::size_t i = 0; i < p; ++i) out << ",y_" << i;
  out << '\n';
  for (std::size_t t = 0; t < traj.size(); ++t) {
    out << t;
    for (double x : traj.inputs[t]) out << ',' << format_double(x);
    for (double y : traj.outputs[t]) out << ',' << format_double(y);
    out << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("trajectory CSV is empty");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "t") throw InvalidInput("trajectory CSV: first column must be t");
  std::size_t m = 0, p = 0;
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (has_prefix(header[i], "x_") && p == 0) {
      ++m;
    } else if (has_prefix(header[i], "y_")) {
      ++p;
    } else {
      throw InvalidInput("trajectory CSV: unexpected column '" + header[i] + "'");
    }
  }
  if (m == 0 || p == 0) throw InvalidInput("trajectory CSV needs x_* and y_* columns");
  Trajectory traj;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InvalidInput("trajectory CSV line " + std::to_string(line_no) + ": expected " +
                         std::to_string(header.size()) + " columns");
    }
    Vector x(m), y(p);
    for (std::size_t i = 0; i < m; ++i) x[i] = parse_cell(cells[1 + i], line_no);
    for (std::size_t i = 0; i < p; ++i) y[i] = parse_cell(cells[1 + m + i], line_no);
    traj.inputs.push_back(std::move(x));
    traj.outputs.push_back(std::move(y));
  }
  traj.validate();
  return traj;
}

std::vector<Vector> read_inputs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("input CSV is empty");
  const auto header = split_csv_line(line);
  const std::size_t skip = (!header.empty() && header[0] == "t") ? 1 : 0;
  for (std::size_t i = skip; i < header.size(); ++i) {
    if (!has_prefix(header[i], "v_")) {
      throw InvalidInput("input CSV: unexpected column '" + header[i] + "'");
    }
  }
  if (header.size() == skip) throw InvalidInput("input CSV has no v_* columns");
  std::vector<Vector> inputs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InvalidInput("input CSV line " + std::to_string(line_no) + ": wrong column count");
    }
    Vector v(header.size() - skip);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = parse_cell(cells[skip + i], line_no);
    inputs.push_back(std::move(v));
  }
  return inputs;
}

void write_simulation_csv(std::ostream& out, std::span<const Vector> inputs,
                          const SimulationResult& sim) {
  if (inputs.size() != sim.states.size() || inputs.size() != sim.outputs.size()) {
    throw InvalidInput("write_simulation_csv: length mismatch");
  }
  if (inputs.empty()) throw InvalidInput("write_simulation_csv: empty simulation");
  out << 't';
  for (std::size_t i = 0; i < inputs[0].size(); ++i) out << ",v_" << i;
  for (std::size_t i = 0; i < sim.states[0].size(); ++i) out << ",s_" << i;
  for (std::size_t i = 0; i < sim.outputs[0].size(); ++i) out << ",y_" << i;
  out << '\n';
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    out << t;
    for (double x : inputs[t]) out << ',' << format_double(x);
    for (double x : sim.states[t]) out << ',' << format_double(x);
    for (double x : sim.outputs[t]) out << ',' << format_double(x);
    out << '\n';
  }
}

ExperimentConfig config_from_json(std::string_view text) {
  const json j = parse_json(text, "config");
  if (!j.is_object()) throw InvalidInput("config: top level must be an object");
  static const std::set<std::string> known{
      "n_grid", "n_seeds", "seed",  "prior_sigma2", "lambda_rule", "delta",      "n_f",
      "chain",  "loss",    "e_inf", "e_std",        "tau_max",     "burn_in_tol", "conservative_lipschitz",
      "threads"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw InvalidInput("config: unknown key '" + key + "'");
  }
  ExperimentConfig cfg;
  if (j.contains("n_grid")) {
    const json& g = j["n_grid"];
    if (!g.is_array()) throw InvalidInput("'n_grid' must be an array");
    cfg.n_grid.clear();
    for (const auto& v : g) cfg.n_grid.push_back(as_size(v, "n_grid"));
  }
  if (j.contains("n_seeds")) cfg.n_seeds = as_size(j["n_seeds"], "n_seeds");
  if (j.contains("seed")) cfg.seed = as_size(j["seed"], "seed");
  if (j.contains("prior_sigma2")) cfg.prior_sigma2 = as_double(j["prior_sigma2"], "prior_sigma2");
  if (j.contains("lambda_rule")) {
    const json& l = j["lambda_rule"];
    if (l.is_string()) {
      if (l.get<std::string>() != "sqrt_n") {
        throw InvalidInput("'lambda_rule' must be \"sqrt_n\" or a positive number");
      }
      cfg.lambda_rule.fixed.reset();
    } else {
      cfg.lambda_rule.fixed = as_double(l, "lambda_rule");
    }
  }
  if (j.contains("delta")) cfg.delta = as_double(j["delta"], "delta");
  if (j.contains("n_f")) cfg.n_f = as_size(j["n_f"], "n_f");
  if (j.contains("chain")) {
    const json& c = j["chain"];
    if (!c.is_object()) throw InvalidInput("'chain' must be an object");
    for (const auto& [key, _] : c.items()) {
      if (key != "burn_in" && key != "thin" && key != "proposal_std") {
        throw InvalidInput("config: unknown chain key '" + key + "'");
      }
    }
    if (c.contains("burn_in")) cfg.chain.burn_in = as_size(c["burn_in"], "chain.burn_in");
    if (c.contains("thin")) cfg.chain.thin = as_size(c["thin"], "chain.thin");
    if (c.contains("proposal_std")) {
      cfg.chain.proposal_std = as_double(c["proposal_std"], "chain.proposal_std");
    }
  }
  if (j.contains("loss")) {
    const json& l = j["loss"];
    if (l.is_string()) {
      const auto kind = l.get<std::string>();
      if (kind == "square") {
        cfg.loss.kind = LossKind::square;
      } else if (kind == "softmax_xent") {
        cfg.loss.kind = LossKind::softmax_xent;
      } else {
        throw InvalidInput("'loss' must be \"square\" or \"softmax_xent\"");
      }
    } else {
      throw InvalidInput("'loss' must be a string");
    }
  }
  if (j.contains("e_inf")) cfg.e_inf = as_double(j["e_inf"], "e_inf");
  if (j.contains("e_std")) cfg.e_std = as_double(j["e_std"], "e_std");
  if (j.contains("tau_max")) cfg.tau_max = as_double(j["tau_max"], "tau_max");
  if (j.contains("burn_in_tol")) cfg.burn_in_tol = as_double(j["burn_in_tol"], "burn_in_tol");
  if (j.contains("conservative_lipschitz")) {
    if (!j["conservative_lipschitz"].is_boolean()) {
      throw InvalidInput("'conservative_lipschitz' must be a boolean");
    }
    cfg.loss_lipschitz.conservative = j["conservative_lipschitz"].get<bool>();
  }
  if (j.contains("threads")) cfg.threads = as_size(j["threads"], "threads");
  cfg.validate();
  return cfg;
}

ExperimentConfig read_config(const std::filesystem::path& path) {
  try {
    return config_from_json(read_file(path));
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["n_grid"] = cfg.n_grid;
  j["n_seeds"] = cfg.n_seeds;
  j["seed"] = cfg.seed;
  j["prior_sigma2"] = cfg.prior_sigma2;
  if (cfg.lambda_rule.fixed) {
    j["lambda_rule"] = *cfg.lambda_rule.fixed;
  } else {
    j["lambda_rule"] = "sqrt_n";
  }
  j["delta"] = cfg.delta;
  j["n_f"] = cfg.n_f;
  j["chain"] = {{"burn_in", cfg.chain.burn_in},
                {"thin", cfg.chain.thin},
                {"proposal_std", cfg.chain.proposal_std}};
  j["loss"] = cfg.loss.kind == LossKind::square ? "square" : "softmax_xent";
  j["e_inf"] = cfg.e_inf;
  j["e_std"] = cfg.e_std;
  j["tau_max"] = cfg.tau_max;
  j["burn_in_tol"] = cfg.burn_in_tol;
  j["conservative_lipschitz"] = cfg.loss_lipschitz.conservative;
  j["threads"] = cfg.threads;
  return dump(j);
}

void write_reports_csv(std::ostream& out, std::span<const BoundReport> reports) {
  out << kReportHeader << '\n';
  for (const auto& r : reports) {
    out << r.n << ',' << r.seed << ',' << format_double(r.lambda) << ','
        << format_double(r.delta) << ',' << format_double(r.kl) << ','
        << format_double(r.psi_hat) << ',' << format_double(r.r_n) << ','
        << format_double(r.post_emp_loss) << ',' << format_double(r.total) << ','
        << format_double(r.z_hat) << ',' << r.n_samples << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << r.n_seeds << ',' << format_double(r.total_median) << ','
        << format_double(r.total_min) << ',' << format_double(r.total_max) << ','
        << format_double(r.emp_median) << ',' << format_double(r.emp_min) << ','
        << format_double(r.emp_max) << ',' << format_double(kVacuityLevel) << ','
        << (r.total_median < kVacuityLevel ? 1 : 0) << '\n';
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace pacrnn
