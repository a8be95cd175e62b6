#include "nirmal/optimizers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nirmal {

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::EnhancedNirmal: return "enhanced-nirmal";
    case OptimizerKind::Nirmal: return "nirmal";
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::SgdMomentum: return "sgd-momentum";
    case OptimizerKind::Nesterov: return "nesterov";
  }
  throw std::logic_error("unreachable optimizer kind");
}

OptimizerKind optimizer_from_string(std::string_view name) {
  for (OptimizerKind kind : kAllOptimizers) {
    if (name == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown optimizer '" + std::string(name) +
                              "' (expected one of enhanced-nirmal, nirmal, adam, "
                              "sgd-momentum, nesterov)");
}

HyperParams default_hyperparams(OptimizerKind kind) {
  HyperParams hp;
  if (kind == OptimizerKind::SgdMomentum) hp.eta = 1e-2;
  return hp;
}

namespace {

// Shared entry checks; returns the effective gradient g + weight_decay*theta.
ParamVector effective_gradient(OptimizerState& state, const Eigen::Ref<const ParamVector>& params,
                               const Eigen::Ref<const Gradient>& grad, const HyperParams& hp) {
  require_same_dim(params.size(), grad.size(), "step");
  require_finite(grad, "gradient input");
  state.ensure_dim(params.size());
  state.t += 1;
  ParamVector g = grad;
  if (hp.weight_decay != 0.0) {
    g += hp.weight_decay * params;
    require_finite(g, "weight-decay coupling");
  }
  return g;
}

void nirmal_family_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
                        const Eigen::Ref<const Gradient>& grad, const HyperParams& hp,
                        bool damped, StepBreakdown* diag) {
  const ParamVector g = effective_gradient(state, params, grad, hp);
  const Index d = params.size();

  const double xi =
      damped ? hp.r_damp / std::pow(static_cast<double>(state.t), hp.alpha_damp) : 0.0;
  state.m = hp.mu * state.m + (1.0 - hp.mu) * g - xi * state.m;
  require_finite(state.m, "first-moment update");
  state.v = hp.beta * state.v + (1.0 - hp.beta) * g.cwiseProduct(g);
  require_finite(state.v, "second-moment update");

  // Noise is drawn per coordinate in ascending index order so a d-dimensional
  // step consumes exactly d draws.
  ParamVector knight = ParamVector::Zero(d);
  if (hp.kappa != 0.0) {
    for (Index i = 0; i < d; ++i) knight[i] = hp.eta * hp.kappa * standard_normal(state.rng);
  }

  // tanh goes through std::tanh per element; Eigen's vectorized path could
  // otherwise produce last-ulp differences between scalar and packet code.
  const auto wazir = (-hp.eta) * g.array();
  const auto elephant = (-hp.eta) * state.m.array();
  const auto camel =
      (-hp.eta * hp.gamma) * (state.m.array() / (state.v.array() + hp.epsilon).sqrt());
  const auto horse =
      (-hp.eta * hp.lam) * state.m.unaryExpr([](double x) { return std::tanh(x); }).array();

  if (diag != nullptr) {
    diag->wazir = wazir.matrix();
    diag->elephant = elephant.matrix();
    diag->knight = knight;
    diag->camel = camel.matrix();
    diag->horse = horse.matrix();
    diag->total = (hp.w_wazir * diag->wazir.array() + hp.w_elephant * diag->elephant.array() +
                   hp.w_knight * diag->knight.array() + hp.w_camel * diag->camel.array() +
                   hp.w_horse * diag->horse.array())
                      .matrix();
    params += diag->total;
  } else {
    params.array() += hp.w_wazir * wazir + hp.w_elephant * elephant +
                      hp.w_knight * knight.array() + hp.w_camel * camel + hp.w_horse * horse;
  }
  require_finite(params, "parameter update");
}

}  // namespace

void enhanced_nirmal_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
                          const Eigen::Ref<const Gradient>& grad, const HyperParams& hp,
                          StepBreakdown* diag) {
  nirmal_family_step(state, params, grad, hp, /*damped=*/true, diag);
}

void nirmal_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
                 const Eigen::Ref<const Gradient>& grad, const HyperParams& hp,
                 StepBreakdown* diag) {
  nirmal_family_step(state, params, grad, hp, /*damped=*/false, diag);
}

void adam_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
               const Eigen::Ref<const Gradient>& grad, const HyperParams& hp) {
  const ParamVector g = effective_gradient(state, params, grad, hp);

  state.m = hp.beta1 * state.m + (1.0 - hp.beta1) * g;
  require_finite(state.m, "first-moment update");
  state.v = hp.beta2 * state.v + (1.0 - hp.beta2) * g.cwiseProduct(g);
  require_finite(state.v, "second-moment update");

  const double t = static_cast<double>(state.t);
  const double bias1 = 1.0 - std::pow(hp.beta1, t);
  const double bias2 = 1.0 - std::pow(hp.beta2, t);
  params.array() -=
      hp.eta * (state.m.array() / bias1) / ((state.v.array() / bias2).sqrt() + hp.epsilon);
  require_finite(params, "parameter update");
}

void sgd_momentum_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
                       const Eigen::Ref<const Gradient>& grad, const HyperParams& hp) {
  const ParamVector g = effective_gradient(state, params, grad, hp);
  state.velocity = hp.mu * state.velocity + hp.eta * g;
  require_finite(state.velocity, "velocity update");
  params -= state.velocity;
  require_finite(params, "parameter update");
}

void nesterov_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
                   const Eigen::Ref<const Gradient>& grad, const HyperParams& hp) {
  const ParamVector g = effective_gradient(state, params, grad, hp);
  state.velocity = hp.mu * state.velocity + hp.eta * g;
  require_finite(state.velocity, "velocity update");
  params -= hp.mu * state.velocity + hp.eta * g;
  require_finite(params, "parameter update");
}

void nesterov_lookahead_step(OptimizerState& state, Eigen::Ref<ParamVector> params,
                             const GradFn& grad_at, const HyperParams& hp) {
  state.ensure_dim(params.size());
  state.t += 1;
  const ParamVector lookahead = params - hp.mu * state.velocity;
  Gradient g(params.size());
  grad_at(lookahead, g);
  require_same_dim(params.size(), g.size(), "nesterov_lookahead_step");
  require_finite(g, "gradient input");
  if (hp.weight_decay != 0.0) {
    g += hp.weight_decay * lookahead;
    require_finite(g, "weight-decay coupling");
  }
  state.velocity = hp.mu * state.velocity + hp.eta * g;
  require_finite(state.velocity, "velocity update");
  params -= state.velocity;
  require_finite(params, "parameter update");
}

void step(OptimizerKind kind, OptimizerState& state, Eigen::Ref<ParamVector> params,
          const Eigen::Ref<const Gradient>& grad, const HyperParams& hp, StepBreakdown* diag) {
  switch (kind) {
    case OptimizerKind::EnhancedNirmal:
      enhanced_nirmal_step(state, params, grad, hp, diag);
      return;
    case OptimizerKind::Nirmal:
      nirmal_step(state, params, grad, hp, diag);
      return;
    case OptimizerKind::Adam:
      adam_step(state, params, grad, hp);
      break;
    case OptimizerKind::SgdMomentum:
      sgd_momentum_step(state, params, grad, hp);
      break;
    case OptimizerKind::Nesterov:
      nesterov_step(state, params, grad, hp);
      break;
  }
  if (diag != nullptr) *diag = StepBreakdown{};  // no breakdown outside the NIRMAL family
}

}  // namespace nirmal
