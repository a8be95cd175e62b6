#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "nirmal/harness.hpp"

namespace {

std::pair<std::string, double> parse_override(const std::string& text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("--hp expects name=value, got '" + text + "'");
  }
  const std::string name = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size()) {
    throw std::invalid_argument("--hp '" + name + "': bad numeric value '" + value + "'");
  }
  return {name, v};
}

void print_run_summary(const nirmal::RunRecord& rec) {
  std::printf("optimizer: %s  task: %s  seed: %llu\n",
              std::string(nirmal::to_string(rec.config.optimizer)).c_str(),
              nirmal::to_string(rec.config.task).c_str(),
              static_cast<unsigned long long>(rec.config.seed));
  std::printf("recorded steps: %zu\n", rec.step_loss.size());
  if (!rec.step_loss.empty()) {
    std::printf("loss: first %.6g, last %.6g\n", rec.step_loss.front(), rec.step_loss.back());
  }
  if (nirmal::is_model_task(rec.config.task) && !rec.epochs.empty()) {
    std::printf("final test: loss %.6g, accuracy %.4f, weighted F1 %.4f\n", rec.final_loss,
                rec.final_accuracy, rec.final_f1);
  }
  std::printf("final parameter norm: %.6g\n", rec.final_param_norm);
  std::printf("wall seconds: %.3f\n", rec.wall_seconds);
  std::printf("status: %s\n", rec.diverged ? "diverged" : "ok");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark harness for the NIRMAL optimizer family and its baselines"};
  app.require_subcommand(1);

  nirmal::RunConfig config;
  std::string optimizer_name{nirmal::to_string(config.optimizer)};
  std::string task_name = nirmal::to_string(config.task);
  std::vector<std::string> overrides;

  CLI::App* run_cmd = app.add_subcommand("run", "Execute one optimization or training run");
  run_cmd->add_option("--optimizer", optimizer_name,
                      "enhanced-nirmal, nirmal, adam, sgd-momentum, or nesterov");
  run_cmd->add_option("--task", task_name, "quadratic, rosenbrock, logreg, or mlp");
  run_cmd->add_option("--epochs", config.epochs, "training epochs (model tasks)");
  run_cmd->add_option("--batch", config.batch_size, "mini-batch size (model tasks)");
  run_cmd->add_option("--steps", config.steps, "step count (analytic tasks)");
  run_cmd->add_option("--dim", config.dim, "dimension (analytic tasks)");
  run_cmd->add_option("--cond", config.condition_number, "quadratic condition number");
  run_cmd->add_option("--hidden", config.hidden_dim, "hidden width (mlp)");
  run_cmd->add_option("--seed", config.seed, "run seed");
  run_cmd->add_option("--data-dir", config.data_dir, "directory holding the four IDX files");
  run_cmd->add_option("--subset", config.subset,
                      "class-balanced train subset size, test gets half (0 = full files)");
  run_cmd->add_option("--weight-decay", config.weight_decay, "L2 gradient coupling strength");
  run_cmd->add_option("--out", config.out, "artifact base path; writes <out>.json and <out>.csv");
  run_cmd->add_option("--hp", overrides, "hyperparameter override name=value (repeatable)")
      ->type_size(1);

  std::string compare_path;
  std::string compare_out;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "Run several optimizers on the same task");
  cmp_cmd->add_option("--config", compare_path, "JSON file with the run list")->required();
  cmp_cmd->add_option("--out", compare_out, "comparison CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      config.optimizer = nirmal::optimizer_from_string(optimizer_name);
      config.task = nirmal::task_from_string(task_name);
      for (const std::string& text : overrides) {
        const auto [name, value] = parse_override(text);
        config.hp_overrides[name] = value;
      }
      const nirmal::RunRecord rec = nirmal::run(config);
      print_run_summary(rec);
      if (!config.out.empty()) {
        std::printf("wrote %s.json and %s.csv\n", config.out.c_str(), config.out.c_str());
      }
    } else {
      const std::vector<nirmal::RunConfig> configs = nirmal::load_compare_file(compare_path);
      const nirmal::CompareResult result = nirmal::compare(configs);
      std::printf("%-18s %10s %12s %10s\n", "optimizer", "accuracy", "loss", "f1");
      for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const nirmal::CompareRow& row = result.rows[i];
        std::printf("%-18s %10.4f %12.6g %10.4f%s\n",
                    std::string(nirmal::to_string(row.optimizer)).c_str(), row.accuracy, row.loss,
                    row.f1, result.runs[i].diverged ? "  (diverged)" : "");
      }
      if (!compare_out.empty()) {
        nirmal::write_compare_csv(compare_out, result.rows);
        std::printf("wrote %s\n", compare_out.c_str());
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
