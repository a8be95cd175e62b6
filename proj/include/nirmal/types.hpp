#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

#include "nirmal/rng.hpp"

namespace nirmal {

using Scalar = double;
using Index = Eigen::Index;

// Flat parameter vector theta and its gradient. Both are plain dense Eigen
// vectors; everything in the library is 64-bit real.
using ParamVector = Eigen::VectorXd;
using Gradient = Eigen::VectorXd;

// Every scalar knob of the five update rules. Defaults are the standard ones
// for the NIRMAL family; Adam shares beta1/beta2/epsilon and SGD with
// momentum conventionally runs at eta = 1e-2 (see default_hyperparams()).
struct HyperParams {
  double eta = 1e-3;      // learning rate
  double mu = 0.9;        // momentum coefficient
  double beta = 0.999;    // second-moment decay (NIRMAL family)
  double beta1 = 0.9;     // Adam first-moment decay
  double beta2 = 0.999;   // Adam second-moment decay
  double epsilon = 1e-8;  // numerical floor
  double kappa = 0.01;    // knight noise scale
  double gamma = 1.5;     // camel scale
  double lam = 0.5;       // horse scale (lambda)
  double alpha_damp = 0.5;  // damping exponent: xi_t = r_damp / t^alpha_damp
  double r_damp = 2.0;      // damping numerator
  // L2-style coupling g <- g + weight_decay * theta, applied before any rule.
  double weight_decay = 0.0;
  // Component weights of the five deltas; must sum to 1.
  double w_wazir = 0.3;
  double w_elephant = 0.25;
  double w_knight = 0.1;
  double w_camel = 0.2;
  double w_horse = 0.15;

  // Throws std::invalid_argument on any out-of-range knob.
  void validate() const;
};

inline void HyperParams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("HyperParams: " + msg); };
  if (!(eta > 0.0)) fail("eta must be > 0");
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (!(mu >= 0.0 && mu < 1.0)) fail("mu must be in [0, 1)");
  if (!(beta >= 0.0 && beta < 1.0)) fail("beta must be in [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("beta2 must be in [0, 1)");
  if (!(alpha_damp > 0.0)) fail("alpha_damp must be > 0");
  if (!(r_damp >= 0.0)) fail("r_damp must be >= 0");
  if (!(weight_decay >= 0.0)) fail("weight_decay must be >= 0");
  if (!(kappa >= 0.0)) fail("kappa must be >= 0");
  const double weights[] = {w_wazir, w_elephant, w_knight, w_camel, w_horse};
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) fail("component weights must be in [0, 1]");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) fail("component weights must sum to 1");
}

// Mutable per-optimizer buffers. All buffers are zero-initialized and sized
// lazily on the first step; afterwards the dimension is pinned. t counts
// completed steps, so the first step computes with t = 1.
struct OptimizerState {
  ParamVector m;         // first moment (NIRMAL family, Adam)
  ParamVector v;         // second moment (NIRMAL family, Adam)
  ParamVector velocity;  // SGD-with-momentum / Nesterov buffer
  std::uint64_t t = 0;
  std::uint64_t seed = 0;
  RngEngine rng;  // knight noise stream

  OptimizerState() : rng(0) {}
  explicit OptimizerState(std::uint64_t s) : seed(s), rng(s) {}

  Index dim() const { return m.size(); }

  void ensure_dim(Index d) {
    if (m.size() == 0 && t == 0) {
      m = ParamVector::Zero(d);
      v = ParamVector::Zero(d);
      velocity = ParamVector::Zero(d);
      return;
    }
    if (m.size() != d) {
      throw std::invalid_argument("OptimizerState: dimension mismatch: state has " +
                                  std::to_string(m.size()) + ", step got " + std::to_string(d));
    }
  }
};

// Per-component deltas of one NIRMAL-family step. `total` is the
// w_*-weighted sum and equals the applied parameter update.
struct StepBreakdown {
  ParamVector wazir;
  ParamVector elephant;
  ParamVector knight;
  ParamVector camel;
  ParamVector horse;
  ParamVector total;

  bool empty() const { return total.size() == 0; }
};

inline void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

// Throws naming the first offending index.
inline void require_finite(const Eigen::Ref<const ParamVector>& x, const char* what) {
  if (x.allFinite()) return;
  for (Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw std::runtime_error(std::string(what) + ": non-finite value at index " +
                               std::to_string(i));
    }
  }
}

}  // namespace nirmal
