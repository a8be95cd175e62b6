#include "nirmal/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "nirmal/data.hpp"
#include "nirmal/models.hpp"
#include "nirmal/objectives.hpp"

namespace nirmal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fixed per-purpose RNG stream tags, mixed with the run seed. Changing these
// changes every recorded trajectory, so they are part of the format.
constexpr std::uint64_t kStreamOptimizer = 1;
constexpr std::uint64_t kStreamInit = 2;
constexpr std::uint64_t kStreamShuffle = 3;
constexpr std::uint64_t kStreamTrainSubset = 4;
constexpr std::uint64_t kStreamTestSubset = 5;

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string to_string(TaskKind task) {
  switch (task) {
    case TaskKind::Quadratic: return "quadratic";
    case TaskKind::Rosenbrock: return "rosenbrock";
    case TaskKind::Logreg: return "logreg";
    case TaskKind::Mlp: return "mlp";
  }
  throw std::invalid_argument("unknown TaskKind value");
}

TaskKind task_from_string(const std::string& name) {
  for (TaskKind task : kAllTasks) {
    if (name == to_string(task)) return task;
  }
  throw std::invalid_argument("unknown task '" + name +
                              "' (expected quadratic, rosenbrock, logreg, or mlp)");
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("RunConfig: " + msg); };
  if (epochs < 1) fail("epochs must be >= 1");
  if (batch_size < 1) fail("batch size must be >= 1");
  if (steps < 1) fail("steps must be >= 1");
  if (dim < 1) fail("dim must be >= 1");
  if (task == TaskKind::Rosenbrock && dim < 2) fail("rosenbrock needs dim >= 2");
  if (!(condition_number >= 1.0)) fail("condition number must be >= 1");
  if (task == TaskKind::Mlp && hidden_dim < 1) fail("hidden_dim must be >= 1 for mlp");
  if (is_model_task(task) && data_dir.empty()) fail("data_dir is required for model tasks");
  if (subset < 0) fail("subset must be >= 0 (0 uses the full train/test files)");
  if (!(weight_decay >= 0.0)) fail("weight decay must be >= 0");
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.optimizer == b.optimizer && a.task == b.task && a.hp_overrides == b.hp_overrides &&
         a.epochs == b.epochs && a.batch_size == b.batch_size && a.steps == b.steps &&
         a.dim == b.dim && a.condition_number == b.condition_number &&
         a.hidden_dim == b.hidden_dim && a.seed == b.seed && a.data_dir == b.data_dir &&
         a.subset == b.subset && a.weight_decay == b.weight_decay && a.out == b.out;
}

bool operator==(const EpochMetrics& a, const EpochMetrics& b) {
  return a.epoch == b.epoch && a.train_loss == b.train_loss && a.test_loss == b.test_loss &&
         a.test_accuracy == b.test_accuracy && a.test_f1 == b.test_f1;
}

bool same_results(const RunRecord& a, const RunRecord& b) {
  return a.config == b.config && a.step_loss == b.step_loss && a.epochs == b.epochs &&
         a.final_loss == b.final_loss && a.final_accuracy == b.final_accuracy &&
         a.final_f1 == b.final_f1 && a.final_param_norm == b.final_param_norm &&
         a.diverged == b.diverged;
}

void apply_hyperparam(HyperParams& hp, const std::string& name, double value) {
  static const std::map<std::string, double HyperParams::*> table = {
      {"eta", &HyperParams::eta},
      {"mu", &HyperParams::mu},
      {"beta", &HyperParams::beta},
      {"beta1", &HyperParams::beta1},
      {"beta2", &HyperParams::beta2},
      {"epsilon", &HyperParams::epsilon},
      {"kappa", &HyperParams::kappa},
      {"gamma", &HyperParams::gamma},
      {"lambda", &HyperParams::lam},
      {"lam", &HyperParams::lam},
      {"alpha_damp", &HyperParams::alpha_damp},
      {"r_damp", &HyperParams::r_damp},
      {"weight_decay", &HyperParams::weight_decay},
      {"w_wazir", &HyperParams::w_wazir},
      {"w_elephant", &HyperParams::w_elephant},
      {"w_knight", &HyperParams::w_knight},
      {"w_camel", &HyperParams::w_camel},
      {"w_horse", &HyperParams::w_horse},
  };
  auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown hyperparameter '" + name + "'");
  hp.*(it->second) = value;
}

HyperParams resolve_hyperparams(const RunConfig& config) {
  HyperParams hp = default_hyperparams(config.optimizer);
  hp.weight_decay = config.weight_decay;
  for (const auto& [name, value] : config.hp_overrides) apply_hyperparam(hp, name, value);
  hp.validate();
  return hp;
}

namespace {

void shuffle_indices(std::vector<Index>& order, RngEngine& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(order[i - 1], order[j]);
  }
}

void finish_param_stats(const ParamVector& params, RunRecord& rec) {
  const double norm = params.norm();
  rec.final_param_norm = std::isfinite(norm) ? norm : 0.0;
}

void run_analytic(const RunConfig& config, const HyperParams& hp, RunRecord& rec) {
  const Objective obj = config.task == TaskKind::Quadratic
                            ? quadratic(config.dim, config.condition_number)
                            : rosenbrock(config.dim);
  // Unit-norm start so convergence thresholds are comparable across dims.
  ParamVector theta =
      ParamVector::Constant(obj.dim, 1.0 / std::sqrt(static_cast<double>(obj.dim)));
  OptimizerState state(mix_seed(config.seed, kStreamOptimizer));
  Gradient grad(obj.dim);
  rec.step_loss.reserve(static_cast<std::size_t>(config.steps) + 1);

  for (int s = 0; s < config.steps; ++s) {
    const double f = obj.eval(theta, grad);
    if (!std::isfinite(f) || !grad.allFinite()) {
      rec.diverged = true;
      break;
    }
    rec.step_loss.push_back(f);
    try {
      step(config.optimizer, state, theta, grad, hp);
    } catch (const std::runtime_error&) {
      // Non-finite intermediate inside the update: contained as divergence.
      rec.diverged = true;
      break;
    }
  }
  if (!rec.diverged) {
    const double f = obj.value(theta);
    if (std::isfinite(f)) {
      rec.step_loss.push_back(f);
    } else {
      rec.diverged = true;
    }
  }
  rec.final_loss = rec.step_loss.empty() ? 0.0 : rec.step_loss.back();
  finish_param_stats(theta, rec);
}

void run_model(const RunConfig& config, const HyperParams& hp, RunRecord& rec) {
  const fs::path dir(config.data_dir);
  const IdxImages train_images = load_idx_images(dir / "train-images-idx3-ubyte");
  const IdxLabels train_labels = load_idx_labels(dir / "train-labels-idx1-ubyte");
  const IdxImages test_images = load_idx_images(dir / "t10k-images-idx3-ubyte");
  const IdxLabels test_labels = load_idx_labels(dir / "t10k-labels-idx1-ubyte");

  int num_classes = 0;
  for (std::uint8_t v : train_labels.values) num_classes = std::max(num_classes, int(v) + 1);
  for (std::uint8_t v : test_labels.values) num_classes = std::max(num_classes, int(v) + 1);
  if (num_classes < 2) throw std::invalid_argument("dataset has fewer than 2 classes");

  Dataset train = make_dataset(train_images, train_labels, num_classes);
  Dataset test = make_dataset(test_images, test_labels, num_classes);
  if (config.subset > 0) {
    if (config.subset % (2 * num_classes) != 0) {
      throw std::invalid_argument("subset must be a multiple of 2*num_classes (" +
                                  std::to_string(2 * num_classes) + "), got " +
                                  std::to_string(config.subset));
    }
    train = subset(train, config.subset / num_classes,
                   mix_seed(config.seed, kStreamTrainSubset));
    test = subset(test, config.subset / (2 * num_classes),
                  mix_seed(config.seed, kStreamTestSubset));
  }

  const Arch arch{train.dim(), config.task == TaskKind::Mlp ? config.hidden_dim : 0,
                  num_classes};
  Model model = make_model(arch, mix_seed(config.seed, kStreamInit));
  OptimizerState state(mix_seed(config.seed, kStreamOptimizer));
  RngEngine shuffle_rng(mix_seed(config.seed, kStreamShuffle));

  const Index n = train.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const std::size_t steps_per_epoch =
      static_cast<std::size_t>((n + config.batch_size - 1) / config.batch_size);
  rec.step_loss.reserve(steps_per_epoch * static_cast<std::size_t>(config.epochs));

  for (int epoch = 1; epoch <= config.epochs && !rec.diverged; ++epoch) {
    shuffle_indices(order, shuffle_rng);
    for (Index off = 0; off < n; off += config.batch_size) {
      const Index count = std::min(config.batch_size, n - off);
      const Batch batch(order.begin() + off, order.begin() + off + count);
      const double loss = forward_loss(model, train, batch).loss;
      if (!std::isfinite(loss)) {
        rec.diverged = true;
        break;
      }
      rec.step_loss.push_back(loss);
      const Gradient grad = backward(model, train, batch);
      if (!grad.allFinite()) {
        rec.diverged = true;
        break;
      }
      try {
        step(config.optimizer, state, model.params, grad, hp);
      } catch (const std::runtime_error&) {
        rec.diverged = true;
        break;
      }
    }
    if (rec.diverged) break;
    const double train_loss = mean_loss(model, train);
    const EvalResult test_eval = evaluate(model, test);
    if (!std::isfinite(train_loss) || !std::isfinite(test_eval.loss) ||
        !std::isfinite(test_eval.accuracy) || !std::isfinite(test_eval.f1)) {
      rec.diverged = true;
      break;
    }
    rec.epochs.push_back(
        EpochMetrics{epoch, train_loss, test_eval.loss, test_eval.accuracy, test_eval.f1});
  }

  if (!rec.epochs.empty()) {
    const EpochMetrics& last = rec.epochs.back();
    rec.final_loss = last.test_loss;
    rec.final_accuracy = last.test_accuracy;
    rec.final_f1 = last.test_f1;
  }
  finish_param_stats(model.params, rec);
}

}  // namespace

RunRecord run(const RunConfig& config) {
  config.validate();
  const HyperParams hp = resolve_hyperparams(config);
  RunRecord rec;
  rec.config = config;
  const auto start = std::chrono::steady_clock::now();
  if (is_model_task(config.task)) {
    run_model(config, hp, rec);
  } else {
    run_analytic(config, hp, rec);
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!config.out.empty()) write_run_artifacts(rec, config.out);
  return rec;
}

CompareResult compare(const std::vector<RunConfig>& configs) {
  if (configs.size() < 2) {
    throw std::invalid_argument("compare: need at least two run configs");
  }
  std::set<OptimizerKind> seen;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (!seen.insert(configs[i].optimizer).second) {
      throw std::invalid_argument("compare: duplicate optimizer '" +
                                  std::string(to_string(configs[i].optimizer)) + "'");
    }
    RunConfig masked = configs[i];
    masked.optimizer = configs[0].optimizer;
    masked.hp_overrides = configs[0].hp_overrides;
    if (!(masked == configs[0])) {
      throw std::invalid_argument(
          "compare: configs may differ only in optimizer and hyperparameters (config " +
          std::to_string(i) + " differs elsewhere)");
    }
  }

  std::vector<std::future<RunRecord>> futures;
  futures.reserve(configs.size());
  for (const RunConfig& config : configs) {
    RunConfig exec = config;
    if (!exec.out.empty()) exec.out += "_" + std::string(to_string(config.optimizer));
    futures.push_back(std::async(std::launch::async, [exec] { return run(exec); }));
  }

  CompareResult result;
  result.runs.reserve(configs.size());
  for (auto& fut : futures) result.runs.push_back(fut.get());
  std::sort(result.runs.begin(), result.runs.end(), [](const RunRecord& a, const RunRecord& b) {
    return static_cast<int>(a.config.optimizer) < static_cast<int>(b.config.optimizer);
  });
  for (const RunRecord& rec : result.runs) {
    result.rows.push_back(
        CompareRow{rec.config.optimizer, rec.final_accuracy, rec.final_loss, rec.final_f1});
  }
  return result;
}

namespace {

json config_to_json(const RunConfig& c) {
  return json{{"optimizer", std::string(to_string(c.optimizer))},
              {"task", to_string(c.task)},
              {"hyperparams", c.hp_overrides},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"steps", c.steps},
              {"dim", c.dim},
              {"condition_number", c.condition_number},
              {"hidden_dim", c.hidden_dim},
              {"seed", c.seed},
              {"data_dir", c.data_dir},
              {"subset", c.subset},
              {"weight_decay", c.weight_decay},
              {"out", c.out}};
}

RunConfig config_from_json(const json& j) {
  static const std::set<std::string> known = {
      "optimizer", "task",   "hyperparams", "epochs", "batch_size",   "steps",  "dim",
      "condition_number",    "hidden_dim",  "seed",   "data_dir",     "subset", "weight_decay",
      "out"};
  if (!j.is_object()) throw std::invalid_argument("run config must be a JSON object");
  for (const auto& item : j.items()) {
    if (known.find(item.key()) == known.end()) {
      throw std::invalid_argument("unknown config key '" + item.key() + "'");
    }
  }
  RunConfig c;
  if (j.contains("optimizer")) c.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
  if (j.contains("task")) c.task = task_from_string(j.at("task").get<std::string>());
  if (j.contains("hyperparams")) {
    c.hp_overrides = j.at("hyperparams").get<std::map<std::string, double>>();
  }
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.steps = j.value("steps", c.steps);
  c.dim = j.value("dim", c.dim);
  c.condition_number = j.value("condition_number", c.condition_number);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.seed = j.value("seed", c.seed);
  c.data_dir = j.value("data_dir", c.data_dir);
  c.subset = j.value("subset", c.subset);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.out = j.value("out", c.out);
  return c;
}

json record_to_json(const RunRecord& r) {
  json epochs = json::array();
  for (const EpochMetrics& e : r.epochs) {
    epochs.push_back(json{{"epoch", e.epoch},
                          {"train_loss", e.train_loss},
                          {"test_loss", e.test_loss},
                          {"test_accuracy", e.test_accuracy},
                          {"test_f1", e.test_f1}});
  }
  return json{{"config", config_to_json(r.config)},
              {"step_loss", r.step_loss},
              {"epochs", epochs},
              {"final_loss", r.final_loss},
              {"final_accuracy", r.final_accuracy},
              {"final_f1", r.final_f1},
              {"final_param_norm", r.final_param_norm},
              {"diverged", r.diverged},
              {"wall_seconds", r.wall_seconds}};
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.config = config_from_json(j.at("config"));
  r.step_loss = j.at("step_loss").get<std::vector<double>>();
  for (const json& e : j.at("epochs")) {
    r.epochs.push_back(EpochMetrics{e.at("epoch").get<int>(), e.at("train_loss").get<double>(),
                                    e.at("test_loss").get<double>(),
                                    e.at("test_accuracy").get<double>(),
                                    e.at("test_f1").get<double>()});
  }
  r.final_loss = j.at("final_loss").get<double>();
  r.final_accuracy = j.at("final_accuracy").get<double>();
  r.final_f1 = j.at("final_f1").get<double>();
  r.final_param_norm = j.at("final_param_norm").get<double>();
  r.diverged = j.at("diverged").get<bool>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  return r;
}

}  // namespace

std::string to_json_string(const RunConfig& config) { return config_to_json(config).dump(2) + "\n"; }

std::string to_json_string(const RunRecord& record) { return record_to_json(record).dump(2) + "\n"; }

RunConfig run_config_from_json(const std::string& text) {
  return config_from_json(json::parse(text));
}

RunRecord run_record_from_json(const std::string& text) {
  return record_from_json(json::parse(text));
}

std::vector<RunConfig> load_compare_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open compare config '" + path + "'");
  json j = json::parse(in);
  const json* runs = nullptr;
  if (j.is_array()) {
    runs = &j;
  } else if (j.is_object() && j.contains("runs")) {
    runs = &j.at("runs");
  } else {
    throw std::invalid_argument("compare config must be a JSON array of runs or {\"runs\": [...]}");
  }
  std::vector<RunConfig> configs;
  for (const json& item : *runs) configs.push_back(config_from_json(item));
  return configs;
}

namespace {

std::vector<std::string> split_fields(const std::string& line, std::size_t expected,
                                      const std::string& context) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  if (out.size() != expected) {
    throw std::runtime_error(context + ": expected " + std::to_string(expected) +
                             " fields, got " + std::to_string(out.size()));
  }
  return out;
}

double parse_double_field(const std::string& s, const std::string& context) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty()) {
    throw std::runtime_error(context + ": bad numeric field '" + s + "'");
  }
  return v;
}

void write_text_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

}  // namespace

std::string trajectory_csv_text(const std::vector<double>& step_loss) {
  std::string text = "step,loss\n";
  for (std::size_t i = 0; i < step_loss.size(); ++i) {
    text += std::to_string(i);
    text += ',';
    text += fmt_double(step_loss[i]);
    text += '\n';
  }
  return text;
}

void write_trajectory_csv(const std::string& path, const std::vector<double>& step_loss) {
  write_text_file(path, trajectory_csv_text(step_loss));
}

std::vector<double> read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "step,loss") {
    throw std::runtime_error("trajectory CSV '" + path + "': bad header");
  }
  std::vector<double> losses;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line, 2, "trajectory CSV '" + path + "'");
    const double idx = parse_double_field(fields[0], "trajectory CSV '" + path + "'");
    if (idx != static_cast<double>(losses.size())) {
      throw std::runtime_error("trajectory CSV '" + path + "': step indices out of order");
    }
    losses.push_back(parse_double_field(fields[1], "trajectory CSV '" + path + "'"));
  }
  return losses;
}

std::string compare_csv_text(const std::vector<CompareRow>& rows) {
  std::string text = "optimizer,accuracy,loss,f1\n";
  for (const CompareRow& row : rows) {
    text += std::string(to_string(row.optimizer));
    text += ',';
    text += fmt_double(row.accuracy);
    text += ',';
    text += fmt_double(row.loss);
    text += ',';
    text += fmt_double(row.f1);
    text += '\n';
  }
  return text;
}

void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows) {
  write_text_file(path, compare_csv_text(rows));
}

std::vector<CompareRow> read_compare_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open comparison CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "optimizer,accuracy,loss,f1") {
    throw std::runtime_error("comparison CSV '" + path + "': bad header");
  }
  std::vector<CompareRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line, 4, "comparison CSV '" + path + "'");
    CompareRow row;
    row.optimizer = optimizer_from_string(fields[0]);
    row.accuracy = parse_double_field(fields[1], "comparison CSV '" + path + "'");
    row.loss = parse_double_field(fields[2], "comparison CSV '" + path + "'");
    row.f1 = parse_double_field(fields[3], "comparison CSV '" + path + "'");
    rows.push_back(row);
  }
  return rows;
}

void write_run_artifacts(const RunRecord& record, const std::string& base) {
  write_text_file(base + ".json", to_json_string(record));
  write_trajectory_csv(base + ".csv", record.step_loss);
}

}  // namespace nirmal
