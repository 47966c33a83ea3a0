#include "pm25/nn/optimizer.hpp"

#include <cmath>
#include <string>

namespace pm25::nn {

std::string_view to_string(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::Sgd:
      return "sgd";
    case UpdateRule::Momentum:
      return "momentum";
    case UpdateRule::Adam:
      return "adam";
  }
  return "?";
}

UpdateRule update_rule_from_string(std::string_view name) {
  if (name == "sgd") return UpdateRule::Sgd;
  if (name == "momentum") return UpdateRule::Momentum;
  if (name == "adam") return UpdateRule::Adam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected sgd, momentum or adam)");
}

template <typename T>
Optimizer<T>::Optimizer(OptimizerConfig cfg) : cfg_(cfg) {
  if (!(cfg_.learning_rate > 0.0) || !std::isfinite(cfg_.learning_rate)) {
    throw ConfigError("learning rate must be positive and finite");
  }
}

template <typename T>
void Optimizer<T>::step(std::span<const NamedParam<T>> params) {
  for (const auto& p : params) {
    if (!p.ref.trainable()) throw UsageError("optimizer received non-trainable parameter '" + p.ref.name + "'");
    if (!(p.ref.value->shape() == p.ref.grad->shape())) {
      throw ShapeError("parameter '" + p.ref.name + "' " + p.ref.value->shape().to_string() + " vs gradient " +
                       p.ref.grad->shape().to_string());
    }
  }

  const bool needs_m = cfg_.rule != UpdateRule::Sgd;
  const bool needs_v = cfg_.rule == UpdateRule::Adam;
  if (steps_ == 0) {
    m_.clear();
    v_.clear();
    for (const auto& p : params) {
      if (needs_m) m_.emplace_back(p.ref.value->shape());
      if (needs_v) v_.emplace_back(p.ref.value->shape());
    }
  }
  if ((needs_m && m_.size() != params.size()) || (needs_v && v_.size() != params.size())) {
    throw ShapeError("optimizer state holds a different number of parameters than this step");
  }
  ++steps_;

  const T lr = static_cast<T>(cfg_.learning_rate);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = *params[i].ref.value;
    const auto& grad = *params[i].ref.grad;
    if ((needs_m && !(m_[i].shape() == value.shape())) || (needs_v && !(v_[i].shape() == value.shape()))) {
      throw ShapeError("optimizer buffer shape no longer matches parameter '" + params[i].ref.name + "'");
    }
    switch (cfg_.rule) {
      case UpdateRule::Sgd:
        for (std::size_t j = 0; j < value.size(); ++j) value[j] -= lr * grad[j];
        break;
      case UpdateRule::Momentum: {
        const T mu = static_cast<T>(cfg_.momentum);
        auto& vel = m_[i];
        for (std::size_t j = 0; j < value.size(); ++j) {
          vel[j] = mu * vel[j] - lr * grad[j];
          value[j] += vel[j];
        }
        break;
      }
      case UpdateRule::Adam: {
        const double b1 = cfg_.beta1, b2 = cfg_.beta2;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t j = 0; j < value.size(); ++j) {
          m[j] = static_cast<T>(b1 * m[j] + (1.0 - b1) * grad[j]);
          v[j] = static_cast<T>(b2 * v[j] + (1.0 - b2) * grad[j] * grad[j]);
          const double mhat = m[j] / c1, vhat = v[j] / c2;
          value[j] -= static_cast<T>(cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon));
        }
        break;
      }
    }
  }
}

template <typename T>
void Optimizer<T>::step(Network<T>& net) {
  const auto params = net.trainable_parameters();
  step(std::span<const NamedParam<T>>(params));
}

template class Optimizer<float>;
template class Optimizer<double>;

}  // namespace pm25::nn
