#include "nirmal/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nirmal {

Objective quadratic(Index dim, double condition_number) {
  if (dim < 1) throw std::invalid_argument("quadratic: dim must be >= 1");
  if (!(condition_number >= 1.0)) {
    throw std::invalid_argument("quadratic: condition_number must be >= 1");
  }
  ParamVector coeffs(dim);
  for (Index i = 0; i < dim; ++i) {
    coeffs[i] = dim == 1 ? 1.0
                         : std::pow(condition_number,
                                    static_cast<double>(i) / static_cast<double>(dim - 1));
  }
  Objective obj;
  obj.name = "quadratic";
  obj.dim = dim;
  obj.optimum = ParamVector::Zero(dim);
  obj.optimum_value = 0.0;
  obj.eval = [coeffs](const Eigen::Ref<const ParamVector>& x, Eigen::Ref<Gradient> grad) {
    grad = coeffs.cwiseProduct(x);
    return 0.5 * x.dot(grad);
  };
  return obj;
}

Objective rosenbrock(Index dim) {
  if (dim < 2) throw std::invalid_argument("rosenbrock: dim must be >= 2");
  Objective obj;
  obj.name = "rosenbrock";
  obj.dim = dim;
  obj.optimum = ParamVector::Ones(dim);
  obj.optimum_value = 0.0;
  obj.eval = [dim](const Eigen::Ref<const ParamVector>& x, Eigen::Ref<Gradient> grad) {
    double f = 0.0;
    grad.setZero();
    for (Index i = 0; i + 1 < dim; ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double b = 1.0 - x[i];
      f += 100.0 * a * a + b * b;
      grad[i] += -400.0 * x[i] * a - 2.0 * b;
      grad[i + 1] += 200.0 * a;
    }
    return f;
  };
  return obj;
}

double fd_check(const Objective& obj, const Eigen::Ref<const ParamVector>& point, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_check: step h must be > 0");
  require_same_dim(obj.dim, point.size(), "fd_check");

  Gradient analytic(obj.dim);
  const double f0 = obj.eval(point, analytic);
  if (!std::isfinite(f0)) throw std::runtime_error("fd_check: non-finite value at base point");
  require_finite(analytic, "fd_check analytic gradient");

  ParamVector probe = point;
  Gradient scratch(obj.dim);
  double worst = 0.0;
  for (Index i = 0; i < obj.dim; ++i) {
    probe[i] = point[i] + h;
    const double fp = obj.eval(probe, scratch);
    probe[i] = point[i] - h;
    const double fm = obj.eval(probe, scratch);
    probe[i] = point[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw std::runtime_error("fd_check: non-finite evaluation at coordinate " +
                               std::to_string(i));
    }
    const double fd = (fp - fm) / (2.0 * h);
    const double err = std::abs(fd - analytic[i]) / std::max(1.0, std::abs(analytic[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace nirmal
