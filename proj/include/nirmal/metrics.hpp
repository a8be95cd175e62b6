#pragma once

#include "nirmal/models.hpp"

namespace nirmal {

// Entry (i, j) counts samples of true class i predicted as class j.
using ConfusionMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

ConfusionMatrix confusion_matrix(const Eigen::Ref<const Eigen::VectorXi>& truth,
                                 const Eigen::Ref<const Eigen::VectorXi>& predicted,
                                 int num_classes);

// trace / total. Throws on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

// Support-weighted mean of per-class F1 = 2PR/(P+R). Precision (recall) is 0
// when its denominator is 0, and F1 is 0 when P + R = 0; a class with zero
// support contributes weight 0.
double weighted_f1(const ConfusionMatrix& cm);

// Argmax class per sample (lowest index wins ties).
Eigen::VectorXi predict(const Model& model, const Dataset& data);

// Mean cross-entropy over the whole dataset, evaluated in internal batches;
// agrees with the single full-batch computation to ~1e-12.
double mean_loss(const Model& model, const Dataset& data);

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
};

EvalResult evaluate(const Model& model, const Dataset& data);

}  // namespace nirmal
