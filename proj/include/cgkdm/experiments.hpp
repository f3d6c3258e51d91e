#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cgkdm {

// Configuration for the scripted reproductions. Zero / empty fields fall
// back to per-experiment desk-scale defaults; full_scale restores the
// replicate counts used for the published tables.
struct ExperimentConfig {
  std::string id;  // table1|table2|table4|fig1|fig2|size-sweep|power-sweep|variability
  int reps = 0;
  int n = 0;
  int d = 0;
  std::vector<double> sigmas;
  std::vector<int> n_list;
  double level = 0.05;
  double rho = 0.2;
  std::string scenario;
  std::uint64_t seed = 1;
  bool full_scale = false;
  std::filesystem::path output;
  std::string format = "csv";  // csv|json
  std::filesystem::path cache_dir;
};

struct ResultRow {
  std::string scenario;
  std::string params;   // "k=v;k=v" detail string
  std::string metric;
  double value = 0.0;
  std::optional<double> std_error;
  int replicates = 1;
  std::optional<double> reference;  // published value where implemented
  std::string note;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// Stable, versioned output schema. CSV carries the run metadata in leading
// '#' comment lines (timestamp on its own line so reruns are byte-identical
// apart from it); JSON nests rows under a config object.
void write_result(const ExperimentResult& result,
                  const std::filesystem::path& path, const std::string& format);

}  // namespace cgkdm
