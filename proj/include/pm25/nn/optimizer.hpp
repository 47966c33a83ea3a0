#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pm25/nn/network.hpp"

namespace pm25::nn {

enum class UpdateRule { Sgd, Momentum, Adam };

std::string_view to_string(UpdateRule rule);
UpdateRule update_rule_from_string(std::string_view name);

struct OptimizerConfig {
  UpdateRule rule = UpdateRule::Sgd;
  double learning_rate = 1e-6;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

// Applies one update per step() to the trainable parameters handed in. The
// auxiliary buffers are allocated on the first step and must keep matching
// the parameter shapes afterwards.
template <typename T>
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg = {});

  const OptimizerConfig& config() const { return cfg_; }
  std::uint64_t steps() const { return steps_; }

  void step(std::span<const NamedParam<T>> params);
  void step(Network<T>& net);

  // First/second-moment buffers, one per parameter (empty for plain SGD).
  const std::vector<BasicTensor<T>>& first_moments() const { return m_; }
  const std::vector<BasicTensor<T>>& second_moments() const { return v_; }

 private:
  OptimizerConfig cfg_;
  std::uint64_t steps_ = 0;
  std::vector<BasicTensor<T>> m_;
  std::vector<BasicTensor<T>> v_;
};

extern template class Optimizer<float>;
extern template class Optimizer<double>;

}  // namespace pm25::nn
