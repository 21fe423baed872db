#include "hmwm/serialization.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hmwm {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array())
    throw std::runtime_error("json: " + field + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array())
    throw std::runtime_error("json: " + field + " rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols)
      throw std::runtime_error("json: " + field + " is ragged");
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!j[i][c].is_number())
        throw std::runtime_error("json: " + field + " has a non-numeric entry");
      M(i, c) = j[i][c].get<double>();
    }
  }
  return M;
}

Vector vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array())
    throw std::runtime_error("json: " + field + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!j[i].is_number())
      throw std::runtime_error("json: " + field + " has a non-numeric entry");
    v(i) = j[i].get<double>();
  }
  return v;
}

const json& require(const json& j, const std::string& field) {
  const auto it = j.find(field);
  if (it == j.end()) throw std::runtime_error("json: missing field " + field);
  return *it;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("json: parse failed: ") + e.what());
  }
}

json partition_to_json(const Partition& part) {
  json j;
  j["dim"] = part.dim;
  j["mean"] = vector_to_json(part.mean);
  j["whitener"] = matrix_to_json(part.whitener);
  json cells = json::array();
  for (const auto& cell : part.cells) {
    json c;
    c["H"] = matrix_to_json(cell.H);
    c["h"] = vector_to_json(cell.h);
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  return j;
}

Partition partition_from_json(const json& j) {
  Partition part;
  part.dim = require(j, "dim").get<int>();
  part.mean = vector_from_json(require(j, "mean"), "partition.mean");
  part.whitener = matrix_from_json(require(j, "whitener"), "partition.whitener");
  for (const auto& c : require(j, "cells")) {
    PolyhedralCell cell;
    cell.H = matrix_from_json(require(c, "H"), "cell.H");
    cell.h = vector_from_json(require(c, "h"), "cell.h");
    // an unconstrained cell serializes as an empty array, which loses the
    // column count; restore it from the partition dimension
    if (cell.H.rows() == 0) cell.H = Matrix(0, part.dim);
    part.cells.push_back(std::move(cell));
  }
  return part;
}

}  // namespace

std::string bank_to_json(const WatermarkBank& bank, int indent) {
  json j;
  j["n_w"] = bank.n_w;
  j["n_u"] = bank.n_u;
  j["p"] = bank.p;
  j["A_u"] = matrix_to_json(bank.A_u);
  j["B_u"] = matrix_to_json(bank.B_u);
  json modes = json::array();
  for (const auto& md : bank.modes) {
    json m;
    m["index"] = md.index;
    m["A_w"] = matrix_to_json(md.A_w);
    m["B_w"] = matrix_to_json(md.B_w);
    m["C_w"] = matrix_to_json(md.C_w);
    m["D_w"] = matrix_to_json(md.D_w);
    m["A_q"] = matrix_to_json(md.A_q);
    m["B_q"] = matrix_to_json(md.B_q);
    m["C_q"] = matrix_to_json(md.C_q);
    m["D_q"] = matrix_to_json(md.D_q);
    modes.push_back(std::move(m));
  }
  j["modes"] = std::move(modes);
  j["partition"] = partition_to_json(bank.partition);
  return j.dump(indent);
}

WatermarkBank bank_from_json(const std::string& text) {
  const json j = parse(text);
  WatermarkBank bank;
  bank.n_w = require(j, "n_w").get<int>();
  bank.n_u = require(j, "n_u").get<int>();
  bank.p = require(j, "p").get<int>();
  bank.A_u = matrix_from_json(require(j, "A_u"), "A_u");
  bank.B_u = matrix_from_json(require(j, "B_u"), "B_u");
  for (const auto& m : require(j, "modes")) {
    WatermarkMode md;
    md.index = require(m, "index").get<int>();
    md.A_w = matrix_from_json(require(m, "A_w"), "A_w");
    md.B_w = matrix_from_json(require(m, "B_w"), "B_w");
    md.C_w = matrix_from_json(require(m, "C_w"), "C_w");
    md.D_w = matrix_from_json(require(m, "D_w"), "D_w");
    md.A_q = matrix_from_json(require(m, "A_q"), "A_q");
    md.B_q = matrix_from_json(require(m, "B_q"), "B_q");
    md.C_q = matrix_from_json(require(m, "C_q"), "C_q");
    md.D_q = matrix_from_json(require(m, "D_q"), "D_q");
    bank.modes.push_back(std::move(md));
  }
  bank.partition = partition_from_json(require(j, "partition"));
  return bank;
}

std::string certificate_to_json(const StabilityCertificate& cert, int indent) {
  json j;
  j["P_w"] = matrix_to_json(cert.P_w);
  j["P_q"] = matrix_to_json(cert.P_q);
  j["tail_weights"] = vector_to_json(cert.tail_weights);
  j["margins_w"] = vector_to_json(cert.margins_w);
  j["margins_q"] = vector_to_json(cert.margins_q);
  j["ok"] = cert.ok;
  j["detail"] = cert.detail;
  return j.dump(indent);
}

StabilityCertificate certificate_from_json(const std::string& text) {
  const json j = parse(text);
  StabilityCertificate cert;
  cert.P_w = matrix_from_json(require(j, "P_w"), "P_w");
  cert.P_q = matrix_from_json(require(j, "P_q"), "P_q");
  cert.tail_weights = vector_from_json(require(j, "tail_weights"), "tail_weights");
  cert.margins_w = vector_from_json(require(j, "margins_w"), "margins_w");
  cert.margins_q = vector_from_json(require(j, "margins_q"), "margins_q");
  cert.ok = require(j, "ok").get<bool>();
  cert.detail = require(j, "detail").get<std::string>();
  return cert;
}

std::string metrics_to_json(const RunMetrics& metrics, int indent) {
  json j;
  j["mode_frequency"] = vector_to_json(metrics.mode_frequency);
  j["switch_events"] = metrics.switch_events;
  j["median_dwell"] = metrics.median_dwell;
  j["max_dwell"] = metrics.max_dwell;
  j["max_recovery_error"] = metrics.max_recovery_error;
  j["max_state_divergence"] = metrics.max_state_divergence;
  j["mode_mismatches"] = metrics.mode_mismatches;
  j["alarm_rate"] = metrics.alarm_rate;
  j["tail_cov_gap"] = metrics.tail_cov_gap;
  return j.dump(indent);
}

RunMetrics metrics_from_json(const std::string& text) {
  const json j = parse(text);
  RunMetrics m;
  m.mode_frequency = vector_from_json(require(j, "mode_frequency"), "mode_frequency");
  m.switch_events = require(j, "switch_events").get<int>();
  m.median_dwell = require(j, "median_dwell").get<double>();
  m.max_dwell = require(j, "max_dwell").get<int>();
  m.max_recovery_error = require(j, "max_recovery_error").get<double>();
  m.max_state_divergence = require(j, "max_state_divergence").get<double>();
  m.mode_mismatches = require(j, "mode_mismatches").get<int>();
  m.alarm_rate = require(j, "alarm_rate").get<double>();
  m.tail_cov_gap = require(j, "tail_cov_gap").get<double>();
  return m;
}

std::string stats_to_json(const SteadyStats& stats, int indent) {
  json j;
  j["mean_xp"] = vector_to_json(stats.mean_xp);
  j["mean_yp"] = vector_to_json(stats.mean_yp);
  j["mean_xu"] = vector_to_json(stats.mean_xu);
  j["cov_xp"] = matrix_to_json(stats.cov_xp);
  j["cov_yp"] = matrix_to_json(stats.cov_yp);
  j["cov_xu"] = matrix_to_json(stats.cov_xu);
  j["cov_e"] = matrix_to_json(stats.cov_e);
  return j.dump(indent);
}

SteadyStats stats_from_json(const std::string& text) {
  const json j = parse(text);
  SteadyStats s;
  s.mean_xp = vector_from_json(require(j, "mean_xp"), "mean_xp");
  s.mean_yp = vector_from_json(require(j, "mean_yp"), "mean_yp");
  s.mean_xu = vector_from_json(require(j, "mean_xu"), "mean_xu");
  s.cov_xp = matrix_from_json(require(j, "cov_xp"), "cov_xp");
  s.cov_yp = matrix_from_json(require(j, "cov_yp"), "cov_yp");
  s.cov_xu = matrix_from_json(require(j, "cov_xu"), "cov_xu");
  s.cov_e = matrix_from_json(require(j, "cov_e"), "cov_e");
  return s;
}

std::string scenario_to_json(const ScenarioConfig& cfg, int indent) {
  json j;
  json plant;
  plant["A"] = matrix_to_json(cfg.A);
  plant["B"] = matrix_to_json(cfg.B);
  plant["C"] = matrix_to_json(cfg.C);
  plant["process_cov"] = matrix_to_json(cfg.process_cov);
  plant["measurement_cov"] = matrix_to_json(cfg.measurement_cov);
  j["plant"] = std::move(plant);

  json ctrl;
  ctrl["K"] = matrix_to_json(cfg.K);
  if (cfg.L)
    ctrl["L"] = matrix_to_json(*cfg.L);
  else
    ctrl["L"] = nullptr;
  ctrl["x_ref"] = vector_to_json(cfg.x_ref);
  ctrl["u_ref"] = vector_to_json(cfg.u_ref);
  ctrl["detector_alpha"] = cfg.detector_alpha;
  j["controller"] = std::move(ctrl);

  json design;
  design["n_w"] = cfg.design.n_w;
  design["n_u"] = cfg.design.n_u;
  design["p"] = cfg.design.p;
  design["modes"] = cfg.design.modes;
  design["rho_bar"] = cfg.design.rho_bar;
  design["diag_floor"] = cfg.design.diag_floor;
  design["margin"] = cfg.design.margin;
  design["cond_cap"] = cfg.design.cond_cap;
  design["max_attempts"] = cfg.design.max_attempts;
  j["design"] = std::move(design);
  j["design_seed"] = cfg.design_seed;

  json run;
  run["steps"] = cfg.steps;
  run["noise_seed"] = cfg.noise_seed;
  if (cfg.x0)
    run["x0"] = vector_to_json(*cfg.x0);
  else
    run["x0"] = nullptr;
  run["watermark_enabled"] = cfg.watermark_enabled;
  run["recompute_partition"] = cfg.recompute_partition;
  if (cfg.remover_x0)
    run["remover_x0"] = vector_to_json(*cfg.remover_x0);
  else
    run["remover_x0"] = nullptr;
  j["run"] = std::move(run);
  return j.dump(indent);
}

ScenarioConfig scenario_from_json(const std::string& text) {
  const json j = parse(text);
  ScenarioConfig cfg;
  const json& plant = require(j, "plant");
  cfg.A = matrix_from_json(require(plant, "A"), "plant.A");
  cfg.B = matrix_from_json(require(plant, "B"), "plant.B");
  cfg.C = matrix_from_json(require(plant, "C"), "plant.C");
  cfg.process_cov = matrix_from_json(require(plant, "process_cov"), "plant.process_cov");
  cfg.measurement_cov =
      matrix_from_json(require(plant, "measurement_cov"), "plant.measurement_cov");

  const json& ctrl = require(j, "controller");
  cfg.K = matrix_from_json(require(ctrl, "K"), "controller.K");
  const json& L = require(ctrl, "L");
  if (!L.is_null()) cfg.L = matrix_from_json(L, "controller.L");
  cfg.x_ref = vector_from_json(require(ctrl, "x_ref"), "controller.x_ref");
  cfg.u_ref = vector_from_json(require(ctrl, "u_ref"), "controller.u_ref");
  cfg.detector_alpha = require(ctrl, "detector_alpha").get<double>();

  const json& design = require(j, "design");
  cfg.design.n_w = require(design, "n_w").get<int>();
  cfg.design.n_u = require(design, "n_u").get<int>();
  cfg.design.p = require(design, "p").get<int>();
  cfg.design.modes = require(design, "modes").get<int>();
  cfg.design.rho_bar = require(design, "rho_bar").get<double>();
  cfg.design.diag_floor = require(design, "diag_floor").get<double>();
  cfg.design.margin = require(design, "margin").get<double>();
  cfg.design.cond_cap = require(design, "cond_cap").get<double>();
  cfg.design.max_attempts = require(design, "max_attempts").get<int>();
  cfg.design_seed = require(j, "design_seed").get<std::uint64_t>();

  const json& run = require(j, "run");
  cfg.steps = require(run, "steps").get<int>();
  cfg.noise_seed = require(run, "noise_seed").get<std::uint64_t>();
  const json& x0 = require(run, "x0");
  if (!x0.is_null()) cfg.x0 = vector_from_json(x0, "run.x0");
  cfg.watermark_enabled = require(run, "watermark_enabled").get<bool>();
  cfg.recompute_partition = require(run, "recompute_partition").get<bool>();
  const json& rx0 = require(run, "remover_x0");
  if (!rx0.is_null()) cfg.remover_x0 = vector_from_json(rx0, "run.remover_x0");
  return cfg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path);
}

}  // namespace hmwm
