#pragma once

#include <functional>
#include <optional>
#include <string>

#include "nirmal/types.hpp"

namespace nirmal {

// A differentiable test function: value plus analytic gradient at a point.
// Objectives are immutable after construction and safe to evaluate
// concurrently.
struct Objective {
  std::string name;
  Index dim = 0;
  // Returns f(x) and writes the gradient into grad_out (pre-sized to dim).
  std::function<double(const Eigen::Ref<const ParamVector>&, Eigen::Ref<Gradient>)> eval;
  std::optional<ParamVector> optimum;  // known minimizer, when one exists
  double optimum_value = 0.0;

  double value(const Eigen::Ref<const ParamVector>& x) const {
    Gradient g(dim);
    return eval(x, g);
  }
  double gradient(const Eigen::Ref<const ParamVector>& x, Eigen::Ref<Gradient> g) const {
    return eval(x, g);
  }
};

// f(x) = 1/2 sum c_i x_i^2 with c_i log-spaced in [1, condition_number]
// (c_0 = 1 when dim == 1). Optimum 0 at the origin.
Objective quadratic(Index dim, double condition_number);

// Chained Rosenbrock, optimum 0 at all-ones. Requires dim >= 2.
Objective rosenbrock(Index dim);

// Central-difference gradient check: compares (f(x+h e_i) - f(x-h e_i)) / 2h
// against the analytic gradient per coordinate and returns the worst relative
// error, with denominator max(1, |analytic_i|).
double fd_check(const Objective& obj, const Eigen::Ref<const ParamVector>& point, double h);

}  // namespace nirmal
