#include "pm25/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace pm25::nn {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const Network<double>& model, const TensorD& input, std::span<const double> targets,
                           const GradCheckOptions& options) {
  Network<double> net = model;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (auto* d = dynamic_cast<DropoutLayer<double>*>(&net.layer(i)); d && d->active_in(options.mode)) {
      throw UsageError("grad_check: dropout layer " + std::to_string(i) + " is active; use rate 0 or Infer mode");
    }
  }

  const auto loss_at = [&](const TensorD& x) {
    const TensorD out = options.mode == Mode::Train ? net.forward(x, Mode::Train) : net.infer(x);
    return mse_loss(out, targets).value;
  };

  GradCheckReport report;
  net.zero_grad();
  const TensorD out = net.forward(input, options.mode);
  report.kink_margin = net.kink_margin();
  const auto loss = mse_loss(out, targets);
  const TensorD input_grad = net.backward(loss.grad);

  const auto record = [&](double analytic, double numeric, std::size_t layer, const std::string& name,
                          std::size_t index) {
    const double err = relative_error(analytic, numeric);
    ++report.checked;
    if (err > report.max_relative_error || report.checked == 1) {
      report.max_relative_error = std::max(report.max_relative_error, err);
      report.worst_layer = layer;
      report.worst_param = name;
      report.worst_index = index;
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
  };

  const double eps = options.epsilon;
  auto params = net.trainable_parameters();
  for (auto& p : params) {
    const TensorD analytic = *p.ref.grad;
    auto& values = *p.ref.value;
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double saved = values[j];
      values[j] = saved + eps;
      const double plus = loss_at(input);
      values[j] = saved - eps;
      const double minus = loss_at(input);
      values[j] = saved;
      record(analytic[j], (plus - minus) / (2.0 * eps), p.layer, p.ref.name, j);
    }
  }

  if (options.include_input) {
    TensorD x = input;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double saved = x[j];
      x[j] = saved + eps;
      const double plus = loss_at(x);
      x[j] = saved - eps;
      const double minus = loss_at(x);
      x[j] = saved;
      record(input_grad[j], (plus - minus) / (2.0 * eps), net.size(), "input", j);
    }
  }
  return report;
}

}  // namespace pm25::nn
