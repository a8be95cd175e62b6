#pragma once

#include <functional>
#include <string_view>

#include "nirmal/types.hpp"

namespace nirmal {

enum class OptimizerKind { EnhancedNirmal, Nirmal, Adam, SgdMomentum, Nesterov };

inline constexpr OptimizerKind kAllOptimizers[] = {
    OptimizerKind::EnhancedNirmal, OptimizerKind::Nirmal, OptimizerKind::Adam,
    OptimizerKind::SgdMomentum, OptimizerKind::Nesterov};

std::string_view to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(std::string_view name);  // throws on unknown name

// Family defaults; SGD with momentum runs at eta = 1e-2, everything else 1e-3.
HyperParams default_hyperparams(OptimizerKind kind);

// The five update rules. Parameters are updated in place; state buffers are
// sized lazily on first use. All rules first apply the weight-decay coupling
// g <- g + weight_decay * theta, then their published recurrences.
//
// The NIRMAL rules optionally emit the per-component deltas through `diag`.
// The damped variant subtracts xi_t * m_{t-1} from the momentum update with
// xi_t = r_damp / t^alpha_damp. Note that with the default (alpha, r) this
// makes the effective momentum coefficient mu - xi_t negative for t <= 4;
// the rule is applied verbatim, no clamping.
void enhanced_nirmal_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
                          const Eigen::Ref<const Gradient>& grad, const HyperParams& hp,
                          StepBreakdown* diag = nullptr);

// Undamped variant: identical except xi_t == 0.
void nirmal_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
                 const Eigen::Ref<const Gradient>& grad, const HyperParams& hp,
                 StepBreakdown* diag = nullptr);

// Adam with bias correction; update denominator is sqrt(v_hat) + epsilon.
void adam_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
               const Eigen::Ref<const Gradient>& grad, const HyperParams& hp);

// v_t = mu v_{t-1} + eta g_t; theta -= v_t.
void sgd_momentum_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
                       const Eigen::Ref<const Gradient>& grad, const HyperParams& hp);

// Equivalent-iterate reformulation of Nesterov's look-ahead rule so that the
// caller evaluates one gradient per step at the current parameters:
//   v_t = mu v_{t-1} + eta g_t;  theta -= mu v_t + eta g_t.
// The iterate corresponds to theta_t - mu v_t of the literal look-ahead form
// (see nesterov_lookahead_step).
void nesterov_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
                   const Eigen::Ref<const Gradient>& grad, const HyperParams& hp);

// Literal look-ahead form, usable when the gradient can be re-evaluated at an
// arbitrary point (analytic objectives):
//   v_t = mu v_{t-1} + eta g(theta - mu v_{t-1});  theta -= v_t.
// Test support for checking the reformulation above; the harness always uses
// nesterov_step.
using GradFn = std::function<void(const ParamVector& point, Gradient& grad_out)>;
void nesterov_lookahead_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
                             const GradFn& grad_at, const HyperParams& hp);

// Uniform dispatch over the five rules. `diag` is filled for the NIRMAL
// family only and cleared otherwise.
void step(OptimizerKind kind, OptimizerState& state, Eigen::Ref<ParamVector> params,
          const Eigen::Ref<const Gradient>& grad, const HyperParams& hp,
          StepBreakdown* diag = nullptr);

// Convenience wrapper owning state + hyperparameters.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, HyperParams hp, std::uint64_t seed = 0)
      : kind_(kind), hp_(hp), state_(seed) {
    hp_.validate();
  }
  explicit Optimizer(OptimizerKind kind, std::uint64_t seed = 0)
      : Optimizer(kind, default_hyperparams(kind), seed) {}

  void step(Eigen::Ref<ParamVector> params, const Eigen::Ref<const Gradient>& grad,
            StepBreakdown* diag = nullptr) {
    nirmal::step(kind_, state_, params, grad, hp_, diag);
  }

  OptimizerKind kind() const { return kind_; }
  const HyperParams& hyperparams() const { return hp_; }
  HyperParams& hyperparams() { return hp_; }
  const OptimizerState& state() const { return state_; }
  OptimizerState& state() { return state_; }

 private:
  OptimizerKind kind_;
  HyperParams hp_;
  OptimizerState state_;
};

}  // namespace nirmal
