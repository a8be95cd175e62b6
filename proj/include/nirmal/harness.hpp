#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nirmal/metrics.hpp"
#include "nirmal/optimizers.hpp"

namespace nirmal {

// Training targets the CLI knows about. The first two are analytic test
// functions driven for a fixed number of full-gradient steps; the last two
// train on an IDX image dataset with mini-batches.
enum class TaskKind { Quadratic, Rosenbrock, Logreg, Mlp };

inline constexpr TaskKind kAllTasks[] = {TaskKind::Quadratic, TaskKind::Rosenbrock,
                                         TaskKind::Logreg, TaskKind::Mlp};

std::string to_string(TaskKind task);
TaskKind task_from_string(const std::string& name);  // throws std::invalid_argument

inline bool is_model_task(TaskKind task) {
  return task == TaskKind::Logreg || task == TaskKind::Mlp;
}

// One benchmark run, fully specified. Fields that do not apply to the chosen
// task are ignored but still serialized so records stay comparable.
struct RunConfig {
  OptimizerKind optimizer = OptimizerKind::EnhancedNirmal;
  TaskKind task = TaskKind::Quadratic;
  std::map<std::string, double> hp_overrides;  // by hyperparameter name

  int epochs = 10;
  Index batch_size = 64;

  int steps = 1000;  // analytic tasks only
  Index dim = 10;
  double condition_number = 10.0;
  Index hidden_dim = 64;  // mlp only

  std::uint64_t seed = 42;
  std::string data_dir;   // directory holding the four IDX files
  Index subset = 1000;    // train subset size; test split is half of this
  double weight_decay = 0.0;
  std::string out;  // base path for artifacts; empty writes nothing

  void validate() const;  // throws std::invalid_argument
};

bool operator==(const RunConfig& a, const RunConfig& b);

// Defaults for the optimizer, then named overrides, then the run-level weight
// decay. Unknown names throw. "lambda" addresses HyperParams::lam.
void apply_hyperparam(HyperParams& hp, const std::string& name, double value);
HyperParams resolve_hyperparams(const RunConfig& config);

struct EpochMetrics {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
  double test_f1 = 0.0;
};

bool operator==(const EpochMetrics& a, const EpochMetrics& b);

// Everything a run produces. For analytic tasks the accuracy/F1 fields stay
// 0 and the epoch list is empty; step_loss holds the objective value before
// each step plus the final value. A diverged run keeps whatever was recorded
// up to the non-finite loss.
struct RunRecord {
  RunConfig config;
  std::vector<double> step_loss;
  std::vector<EpochMetrics> epochs;
  double final_loss = 0.0;
  double final_accuracy = 0.0;
  double final_f1 = 0.0;
  double final_param_norm = 0.0;
  bool diverged = false;
  double wall_seconds = 0.0;
};

// Equality of results, ignoring wall-clock time.
bool same_results(const RunRecord& a, const RunRecord& b);

RunRecord run(const RunConfig& config);

// One Table-style comparison row. Divergence is visible on the underlying
// RunRecord; the row keeps exactly the four CSV columns.
struct CompareRow {
  OptimizerKind optimizer = OptimizerKind::EnhancedNirmal;
  double accuracy = 0.0;
  double loss = 0.0;
  double f1 = 0.0;
};

inline bool operator==(const CompareRow& a, const CompareRow& b) {
  return a.optimizer == b.optimizer && a.accuracy == b.accuracy && a.loss == b.loss &&
         a.f1 == b.f1;
}

struct CompareResult {
  std::vector<RunRecord> runs;  // canonical optimizer order
  std::vector<CompareRow> rows;
};

// Runs every config (concurrently; each run is internally serial) and builds
// one row per optimizer. Configs must differ only in optimizer and
// hyperparameter overrides; at least two are required.
CompareResult compare(const std::vector<RunConfig>& configs);

// JSON round-trip for records and configs.
std::string to_json_string(const RunConfig& config);
std::string to_json_string(const RunRecord& record);
RunConfig run_config_from_json(const std::string& text);
RunRecord run_record_from_json(const std::string& text);

// Declarative compare file: {"runs": [ <RunConfig>, ... ]}.
std::vector<RunConfig> load_compare_file(const std::string& path);

// Trajectory CSV, header "step,loss". Losses are printed with %.17g so the
// file is byte-stable across runs and parses back to the same doubles.
void write_trajectory_csv(const std::string& path, const std::vector<double>& step_loss);
std::vector<double> read_trajectory_csv(const std::string& path);
std::string trajectory_csv_text(const std::vector<double>& step_loss);

// Comparison CSV, header "optimizer,accuracy,loss,f1".
void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows);
std::vector<CompareRow> read_compare_csv(const std::string& path);
std::string compare_csv_text(const std::vector<CompareRow>& rows);

// Writes <base>.json and <base>.csv for a run record.
void write_run_artifacts(const RunRecord& record, const std::string& base);

}  // namespace nirmal
