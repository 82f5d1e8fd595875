#include "ocflow/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "ocflow/errors.hpp"

namespace ocflow {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json record_to_json(const IterationRecord& r) {
  return json{{"iter", r.iter},
              {"J", r.objective},
              {"terminal_reward", r.terminal_reward},
              {"running_cost", r.running_cost},
              {"control_change_norm", r.control_change_norm},
              {"eps_k", r.eps_k}};
}

template <class Report>
json base_report_json(const Report& rep, double alpha,
                      const std::map<std::string, std::string>& config_echo) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["status"] = rep.status;
  if (!rep.detail.empty()) doc["detail"] = rep.detail;
  doc["alpha"] = alpha;
  doc["config"] = config_echo;
  doc["records"] = json::array();
  for (const IterationRecord& r : rep.records) {
    doc["records"].push_back(record_to_json(r));
  }
  doc["summary"] = json{{"best_J", rep.best_objective},
                        {"plateau_iteration", rep.plateau_iteration}};
  return doc;
}

void dump(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw invalid_input_error("report: cannot open '" + path + "'");
  out << doc.dump(2) << "\n";
  if (!out) throw invalid_input_error("report: write to '" + path + "' failed");
}

}  // namespace

void write_curves_csv(const std::string& path,
                      const std::vector<IterationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw invalid_input_error("curves: cannot open '" + path + "'");
  out << "iter,J,terminal_reward,running_cost,eps_k\n";
  for (const IterationRecord& r : records) {
    out << r.iter << "," << fmt17(r.objective) << "," << fmt17(r.terminal_reward)
        << "," << fmt17(r.running_cost) << "," << fmt17(r.eps_k) << "\n";
  }
  if (!out) throw invalid_input_error("curves: write to '" + path + "' failed");
}

void write_report_json(const std::string& path, const GuidanceReport& rep,
                       double alpha,
                       const std::map<std::string, std::string>& config_echo) {
  json doc = base_report_json(rep, alpha, config_echo);
  if (rep.final_trajectory) {
    const VectorXd& x = rep.final_trajectory->states.back();
    doc["terminal_state"] = std::vector<double>(x.data(), x.data() + x.size());
  }
  dump(path, doc);
}

void write_report_json(const std::string& path, const So3GuidanceReport& rep,
                       double alpha,
                       const std::map<std::string, std::string>& config_echo) {
  json doc = base_report_json(rep, alpha, config_echo);
  doc["diagnostics"] =
      json{{"costate_bound_ok", rep.costate_bound_ok},
           {"max_orthogonality_residual", rep.max_orthogonality_residual},
           {"max_update_residual", rep.max_update_residual}};
  if (rep.final_trajectory) {
    const so3::Mat3& x = rep.final_trajectory->states.back();
    std::vector<double> flat;
    flat.reserve(9);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) flat.push_back(x(r, c));
    doc["terminal_state"] = flat;
  }
  dump(path, doc);
}

ParsedReport read_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input_error("report: cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw invalid_input_error("report: '" + path + "' is not valid: " + e.what());
  }
  ParsedReport rep;
  rep.schema_version = doc.at("schema_version").get<int>();
  rep.status = doc.at("status").get<std::string>();
  rep.alpha = doc.at("alpha").get<double>();
  for (const json& r : doc.at("records")) {
    IterationRecord rec;
    rec.iter = r.at("iter").get<int>();
    rec.objective = r.at("J").get<double>();
    rec.terminal_reward = r.at("terminal_reward").get<double>();
    rec.running_cost = r.at("running_cost").get<double>();
    rec.control_change_norm = r.at("control_change_norm").get<double>();
    rec.eps_k = r.at("eps_k").get<double>();
    rep.records.push_back(rec);
  }
  rep.best_objective = doc.at("summary").at("best_J").get<double>();
  rep.plateau_iteration = doc.at("summary").at("plateau_iteration").get<int>();
  return rep;
}

bool report_self_consistent(const ParsedReport& rep, double tol) {
  double best = -std::numeric_limits<double>::infinity();
  for (const IterationRecord& r : rep.records) {
    const double recomputed = rep.alpha * r.terminal_reward - r.running_cost;
    if (std::abs(recomputed - r.objective) > tol) return false;
    best = std::max(best, r.objective);
  }
  return rep.records.empty() || std::abs(best - rep.best_objective) <= tol;
}

}  // namespace ocflow
