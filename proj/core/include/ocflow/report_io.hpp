#pragma once

#include <map>
#include <string>
#include <vector>

#include "ocflow/guidance.hpp"

namespace ocflow {

inline constexpr int kReportSchemaVersion = 1;

/// Fixed-header CSV (iter,J,terminal_reward,running_cost,eps_k) with 17
/// significant digits, so identical runs produce byte-identical files.
void write_curves_csv(const std::string& path,
                      const std::vector<IterationRecord>& records);

/// Structured run report. alpha is stored alongside the records so a reader
/// can recompute J = alpha * terminal_reward - running_cost from the file
/// alone; config_echo preserves the originating key-value pairs verbatim.
void write_report_json(const std::string& path, const GuidanceReport& rep,
                       double alpha,
                       const std::map<std::string, std::string>& config_echo);
void write_report_json(const std::string& path, const So3GuidanceReport& rep,
                       double alpha,
                       const std::map<std::string, std::string>& config_echo);

struct ParsedReport {
  int schema_version = 0;
  std::string status;
  double alpha = 0.0;
  std::vector<IterationRecord> records;
  double best_objective = 0.0;
  int plateau_iteration = -1;
};

ParsedReport read_report_json(const std::string& path);

/// Every stored J must match alpha * Phi - running_cost, and the summary must
/// match the records.
bool report_self_consistent(const ParsedReport& rep, double tol = 1e-12);

}  // namespace ocflow
