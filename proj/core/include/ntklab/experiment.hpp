#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ntklab/report.hpp"

namespace ntk {

enum class ExperimentKind {
  width_sweep_logistic,
  width_sweep_squared,
  convergence_curve,
  concentration_sweep,
  margin_table,
  lowerbound_suite,
  conjecture_sweep,
  acceptance,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::margin_table;
  /// Experiment-specific parameters; missing keys take documented defaults.
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "results";
  std::size_t jobs = 1;
  bool charts = true;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& c);

struct ExperimentResult {
  Report report;
  /// Set for experiments that carry a pass/fail verdict.
  std::optional<bool> passed;
  nlohmann::json summary = nlohmann::json::object();
};

/// Runs the experiment in memory. Rows are evaluated on up to cfg.jobs
/// threads and merged in configuration order.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// run_experiment followed by emit_report into cfg.out_dir; also writes
/// <name>_summary.json. Returns the written paths.
std::vector<std::filesystem::path> run_and_emit(const ExperimentConfig& cfg, ExperimentResult* out = nullptr);

}  // namespace ntk
