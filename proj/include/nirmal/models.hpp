#pragma once

#include <cstdint>
#include <vector>

#include "nirmal/types.hpp"

namespace nirmal {

// In-memory classification dataset. Feature rows are samples; pixel data is
// pre-scaled to [0, 1]. Immutable once built.
struct Dataset {
  Eigen::MatrixXd features;  // n x d
  Eigen::VectorXi labels;    // n, values in [0, num_classes)
  int num_classes = 0;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
  void validate() const;  // throws std::invalid_argument
};

// Architecture descriptor. hidden_dim == 0 selects multinomial logistic
// regression; hidden_dim > 0 a one-hidden-layer tanh MLP.
//
// Parameter layout (column-major matrices, flattened in order):
//   logreg: [W (d x K), b (K)]
//   mlp:    [W1 (d x H), b1 (H), W2 (H x K), b2 (K)]
struct Arch {
  Index input_dim = 0;
  Index hidden_dim = 0;
  int num_classes = 0;

  Index param_count() const {
    const Index k = num_classes;
    if (hidden_dim == 0) return input_dim * k + k;
    return input_dim * hidden_dim + hidden_dim + hidden_dim * k + k;
  }
  void validate() const;
};

struct Model {
  Arch arch;
  ParamVector params;
};

// Indices into a Dataset; must be valid and unique.
using Batch = std::vector<Index>;

// Glorot-uniform weights (U(-s, s), s = sqrt(6 / (fan_in + fan_out)) per
// layer), zero biases. Deterministic in the seed.
ParamVector init_params(const Arch& arch, std::uint64_t seed);

inline Model make_model(const Arch& arch, std::uint64_t seed) {
  return Model{arch, init_params(arch, seed)};
}

// Logits for an explicit feature block (rows are samples).
Eigen::MatrixXd model_logits(const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& X);

struct ForwardResult {
  double loss = 0.0;         // mean cross-entropy over the batch
  Eigen::MatrixXd logits;    // b x K
};

// Mean cross-entropy over the batch; softmax uses max-subtraction so huge
// logits cannot overflow.
ForwardResult forward_loss(const Model& model, const Dataset& data, const Batch& batch);

// Exact gradient of forward_loss with respect to the flat parameter vector.
Gradient backward(const Model& model, const Dataset& data, const Batch& batch);

// All-sample batch helper.
Batch full_batch(const Dataset& data);

}  // namespace nirmal
