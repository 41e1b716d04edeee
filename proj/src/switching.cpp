#include "fedswitch/switching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedswitch {

SwitchMode SwitchMode::hard(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("SwitchMode::hard: epsilon must be finite and >= 0");
  SwitchMode m;
  m.kind = Kind::hard;
  m.epsilon = epsilon;
  return m;
}

SwitchMode SwitchMode::soft(double epsilon, double beta) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("SwitchMode::soft: epsilon must be finite and >= 0");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("SwitchMode::soft: beta must be finite and positive");
  SwitchMode m;
  m.kind = Kind::soft;
  m.epsilon = epsilon;
  m.beta = beta;
  return m;
}

double sigma_beta(double x, double beta) {
  if (!(beta > 0.0))
    throw std::invalid_argument("sigma_beta: beta must be positive");
  return std::clamp(1.0 + beta * x, 0.0, 1.0);
}

double switch_weight(const SwitchMode& mode, double g_hat) {
  if (mode.kind == SwitchMode::Kind::hard)
    return g_hat > mode.epsilon ? 1.0 : 0.0;
  return sigma_beta(g_hat - mode.epsilon, mode.beta);
}

ModelVector blended_subgrad(double weight, const ModelVector& grad_f,
                            const ModelVector& grad_g) {
  if (!(weight >= 0.0 && weight <= 1.0))
    throw std::invalid_argument("blended_subgrad: weight must lie in [0,1]");
  if (grad_f.dim() != grad_g.dim())
    throw std::invalid_argument("blended_subgrad: dimension mismatch");
  if (weight == 0.0) return grad_f;
  if (weight == 1.0) return grad_g;
  ModelVector out(grad_f.dim());
  for (std::size_t i = 0; i < out.dim(); ++i)
    out[i] = (1.0 - weight) * grad_f[i] + weight * grad_g[i];
  return out;
}

}  // namespace fedswitch
