#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "pm25/nn/network.hpp"

namespace pm25::nn {

struct GradCheckOptions {
  // Central-difference step. BatchNorm curvature makes 1e-3 too coarse;
  // much below 1e-5 rounding dominates.
  double epsilon = 1e-4;
  Mode mode = Mode::Train;
  // Also compare dLoss/dInput.
  bool include_input = true;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  // Location of the worst element; layer == network size means the input.
  std::size_t worst_layer = 0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  // Distance of the unperturbed pass from a ReLU hinge or pool tie. When this
  // is below epsilon the finite difference may straddle a kink.
  double kink_margin = 0.0;
};

// |a - n| / max(|a|, |n|, 1e-12)
double relative_error(double analytic, double numeric);

// Compares backprop gradients of the MSE loss against central differences,
// perturbing every trainable parameter (and optionally every input value).
// Works on a private copy; `model` is left untouched. Dropout must be inactive
// (rate 0 or Infer mode), otherwise UsageError.
GradCheckReport grad_check(const Network<double>& model, const TensorD& input, std::span<const double> targets,
                           const GradCheckOptions& options = {});

}  // namespace pm25::nn
