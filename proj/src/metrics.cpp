#include "nirmal/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace nirmal {

ConfusionMatrix confusion_matrix(const Eigen::Ref<const Eigen::VectorXi>& truth,
                                 const Eigen::Ref<const Eigen::VectorXi>& predicted,
                                 int num_classes) {
  require_same_dim(truth.size(), predicted.size(), "confusion_matrix");
  ConfusionMatrix cm = ConfusionMatrix::Zero(num_classes, num_classes);
  for (Index i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= num_classes || predicted[i] < 0 ||
        predicted[i] >= num_classes) {
      throw std::invalid_argument("confusion_matrix: class index out of range at sample " +
                                  std::to_string(i));
    }
    cm(truth[i], predicted[i]) += 1;
  }
  return cm;
}

namespace {

std::int64_t total_count(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.sum();
  if (cm.rows() != cm.cols()) throw std::invalid_argument("confusion matrix must be square");
  if (total <= 0) throw std::invalid_argument("confusion matrix is empty");
  if (cm.minCoeff() < 0) throw std::invalid_argument("confusion matrix has negative counts");
  return total;
}

}  // namespace

double accuracy(const ConfusionMatrix& cm) {
  const std::int64_t total = total_count(cm);
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

double weighted_f1(const ConfusionMatrix& cm) {
  const std::int64_t total = total_count(cm);
  double weighted = 0.0;
  for (Index k = 0; k < cm.rows(); ++k) {
    const std::int64_t tp = cm(k, k);
    const std::int64_t support = cm.row(k).sum();
    const std::int64_t predicted = cm.col(k).sum();
    if (support == 0) continue;  // weight 0
    const double precision = predicted == 0 ? 0.0 : double(tp) / double(predicted);
    const double recall = double(tp) / double(support);
    const double f1 =
        precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
    weighted += (double(support) / double(total)) * f1;
  }
  return weighted;
}

Eigen::VectorXi predict(const Model& model, const Dataset& data) {
  data.validate();
  Eigen::VectorXi out(data.size());
  constexpr Index kBatch = 256;
  for (Index start = 0; start < data.size(); start += kBatch) {
    const Index count = std::min(kBatch, data.size() - start);
    const Eigen::MatrixXd logits = model_logits(model, data.features.middleRows(start, count));
    for (Index r = 0; r < count; ++r) {
      Index best = 0;
      logits.row(r).maxCoeff(&best);
      out[start + r] = static_cast<int>(best);
    }
  }
  return out;
}

double mean_loss(const Model& model, const Dataset& data) {
  data.validate();
  constexpr Index kBatch = 256;
  double sum = 0.0;
  for (Index start = 0; start < data.size(); start += kBatch) {
    const Index count = std::min(kBatch, data.size() - start);
    Batch batch(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) batch[std::size_t(i)] = start + i;
    sum += forward_loss(model, data, batch).loss * static_cast<double>(count);
  }
  return sum / static_cast<double>(data.size());
}

EvalResult evaluate(const Model& model, const Dataset& data) {
  const ConfusionMatrix cm = confusion_matrix(data.labels, predict(model, data), data.num_classes);
  return EvalResult{mean_loss(model, data), accuracy(cm), weighted_f1(cm)};
}

}  // namespace nirmal
