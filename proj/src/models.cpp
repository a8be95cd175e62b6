#include "nirmal/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nirmal {

void Dataset::validate() const {
  if (features.rows() < 1) throw std::invalid_argument("Dataset: needs at least one sample");
  if (labels.size() != features.rows()) {
    throw std::invalid_argument("Dataset: label count does not match sample count");
  }
  if (num_classes < 1) throw std::invalid_argument("Dataset: num_classes must be >= 1");
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw std::invalid_argument("Dataset: label out of range at sample " + std::to_string(i));
    }
  }
}

void Arch::validate() const {
  if (input_dim < 1) throw std::invalid_argument("Arch: input_dim must be >= 1");
  if (hidden_dim < 0) throw std::invalid_argument("Arch: hidden_dim must be >= 0");
  if (num_classes < 2) throw std::invalid_argument("Arch: num_classes must be >= 2");
}

namespace {

void check_model(const Model& model) {
  model.arch.validate();
  if (model.params.size() != model.arch.param_count()) {
    throw std::invalid_argument("Model: params length " + std::to_string(model.params.size()) +
                                " does not match architecture count " +
                                std::to_string(model.arch.param_count()));
  }
}

void check_batch(const Dataset& data, const Batch& batch) {
  if (batch.empty()) throw std::invalid_argument("batch must be non-empty");
  Batch sorted = batch;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= data.size()) {
      throw std::invalid_argument("batch index out of range: " + std::to_string(sorted[i]));
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw std::invalid_argument("batch contains duplicate index " + std::to_string(sorted[i]));
    }
  }
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& features, const Batch& batch) {
  Eigen::MatrixXd out(static_cast<Index>(batch.size()), features.cols());
  for (std::size_t r = 0; r < batch.size(); ++r) out.row(static_cast<Index>(r)) = features.row(batch[r]);
  return out;
}

Eigen::MatrixXd tanh_elem(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double x) { return std::tanh(x); });
}

// Row-wise softmax with the true label subtracted: returns
// (softmax(logits) - onehot) / batch and accumulates the mean cross-entropy.
Eigen::MatrixXd softmax_grad_and_loss(const Eigen::MatrixXd& logits,
                                      const std::vector<int>& labels, double* loss_out) {
  const Index b = logits.rows();
  Eigen::MatrixXd g(b, logits.cols());
  double loss = 0.0;
  for (Index r = 0; r < b; ++r) {
    const double m = logits.row(r).maxCoeff();
    Eigen::ArrayXd e = (logits.row(r).array() - m).exp();
    const double z = e.sum();
    loss += std::log(z) + m - logits(r, labels[static_cast<std::size_t>(r)]);
    g.row(r) = (e / z).matrix();
    g(r, labels[static_cast<std::size_t>(r)]) -= 1.0;
  }
  g /= static_cast<double>(b);
  if (loss_out != nullptr) *loss_out = loss / static_cast<double>(b);
  return g;
}

}  // namespace

ParamVector init_params(const Arch& arch, std::uint64_t seed) {
  arch.validate();
  ParamVector p = ParamVector::Zero(arch.param_count());
  RngEngine rng(seed);
  auto glorot_fill = [&rng, &p](Index offset, Index fan_in, Index fan_out) {
    const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (Index i = 0; i < fan_in * fan_out; ++i) {
      p[offset + i] = s * (2.0 * uniform01(rng) - 1.0);
    }
  };
  const Index d = arch.input_dim;
  const Index h = arch.hidden_dim;
  const Index k = arch.num_classes;
  if (h == 0) {
    glorot_fill(0, d, k);  // bias segment stays zero
  } else {
    glorot_fill(0, d, h);
    glorot_fill(d * h + h, h, k);
  }
  return p;
}

Eigen::MatrixXd model_logits(const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& X) {
  check_model(model);
  const Index d = model.arch.input_dim;
  const Index h = model.arch.hidden_dim;
  const Index k = model.arch.num_classes;
  require_same_dim(X.cols(), d, "model_logits");
  const double* p = model.params.data();
  if (h == 0) {
    Eigen::Map<const Eigen::MatrixXd> W(p, d, k);
    Eigen::Map<const Eigen::VectorXd> b(p + d * k, k);
    return (X * W).rowwise() + b.transpose();
  }
  Eigen::Map<const Eigen::MatrixXd> W1(p, d, h);
  Eigen::Map<const Eigen::VectorXd> b1(p + d * h, h);
  Eigen::Map<const Eigen::MatrixXd> W2(p + d * h + h, h, k);
  Eigen::Map<const Eigen::VectorXd> b2(p + d * h + h + h * k, k);
  const Eigen::MatrixXd hidden = tanh_elem((X * W1).rowwise() + b1.transpose());
  return (hidden * W2).rowwise() + b2.transpose();
}

ForwardResult forward_loss(const Model& model, const Dataset& data, const Batch& batch) {
  check_model(model);
  check_batch(data, batch);
  require_same_dim(data.dim(), model.arch.input_dim, "forward_loss");

  ForwardResult result;
  result.logits = model_logits(model, gather_rows(data.features, batch));
  double loss = 0.0;
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const auto row = result.logits.row(static_cast<Index>(r));
    const double m = row.maxCoeff();
    const double lse = m + std::log((row.array() - m).exp().sum());
    loss += lse - row[data.labels[batch[r]]];
  }
  result.loss = loss / static_cast<double>(batch.size());
  return result;
}

Gradient backward(const Model& model, const Dataset& data, const Batch& batch) {
  check_model(model);
  check_batch(data, batch);
  require_same_dim(data.dim(), model.arch.input_dim, "backward");

  const Index d = model.arch.input_dim;
  const Index h = model.arch.hidden_dim;
  const Index k = model.arch.num_classes;
  const Eigen::MatrixXd X = gather_rows(data.features, batch);
  std::vector<int> y(batch.size());
  for (std::size_t r = 0; r < batch.size(); ++r) y[r] = data.labels[batch[r]];

  Gradient grad = Gradient::Zero(model.params.size());
  const double* p = model.params.data();
  double* gp = grad.data();

  if (h == 0) {
    Eigen::Map<const Eigen::MatrixXd> W(p, d, k);
    Eigen::Map<const Eigen::VectorXd> b(p + d * k, k);
    const Eigen::MatrixXd logits = (X * W).rowwise() + b.transpose();
    const Eigen::MatrixXd g = softmax_grad_and_loss(logits, y, nullptr);
    Eigen::Map<Eigen::MatrixXd>(gp, d, k) = X.transpose() * g;
    Eigen::Map<Eigen::VectorXd>(gp + d * k, k) = g.colwise().sum().transpose();
    return grad;
  }

  Eigen::Map<const Eigen::MatrixXd> W1(p, d, h);
  Eigen::Map<const Eigen::VectorXd> b1(p + d * h, h);
  Eigen::Map<const Eigen::MatrixXd> W2(p + d * h + h, h, k);
  Eigen::Map<const Eigen::VectorXd> b2(p + d * h + h + h * k, k);
  const Eigen::MatrixXd hidden = tanh_elem((X * W1).rowwise() + b1.transpose());
  const Eigen::MatrixXd logits = (hidden * W2).rowwise() + b2.transpose();
  const Eigen::MatrixXd g = softmax_grad_and_loss(logits, y, nullptr);
  const Eigen::MatrixXd dhidden =
      (g * W2.transpose()).cwiseProduct((1.0 - hidden.array().square()).matrix());
  Eigen::Map<Eigen::MatrixXd>(gp, d, h) = X.transpose() * dhidden;
  Eigen::Map<Eigen::VectorXd>(gp + d * h, h) = dhidden.colwise().sum().transpose();
  Eigen::Map<Eigen::MatrixXd>(gp + d * h + h, h, k) = hidden.transpose() * g;
  Eigen::Map<Eigen::VectorXd>(gp + d * h + h + h * k, k) = g.colwise().sum().transpose();
  return grad;
}

Batch full_batch(const Dataset& data) {
  Batch batch(static_cast<std::size_t>(data.size()));
  for (Index i = 0; i < data.size(); ++i) batch[static_cast<std::size_t>(i)] = i;
  return batch;
}

}  // namespace nirmal
