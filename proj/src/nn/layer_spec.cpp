#include "pm25/nn/layer_spec.hpp"

#include <array>
#include <sstream>
#include <utility>

#include "pm25/errors.hpp"

namespace pm25::nn {

namespace {

constexpr std::array<std::pair<LayerKind, std::string_view>, 9> kKindNames{{
    {LayerKind::ZeroPad2D, "ZeroPad2D"},
    {LayerKind::Conv2D, "Conv2D"},
    {LayerKind::BatchNorm, "BatchNorm"},
    {LayerKind::MaxPool2D, "MaxPool2D"},
    {LayerKind::ReLU, "ReLU"},
    {LayerKind::Flatten, "Flatten"},
    {LayerKind::Dense, "Dense"},
    {LayerKind::Dropout, "Dropout"},
    {LayerKind::LinearOutput, "LinearOutput"},
}};

void require_spatial(const Shape& in, std::string_view what) {
  if (in.rank() != 4) {
    throw ShapeError(std::string(what) + " expects an NHWC input, got " + in.to_string());
  }
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

LayerKind layer_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown layer kind '" + std::string(name) + "'");
}

std::string_view to_string(Activation act) { return act == Activation::ReLU ? "relu" : "linear"; }

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "linear") return Activation::Linear;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

LayerSpec LayerSpec::zero_pad(std::size_t pad_h, std::size_t pad_w) {
  LayerSpec s;
  s.kind = LayerKind::ZeroPad2D;
  s.pad_h = pad_h;
  s.pad_w = pad_w;
  return s;
}

LayerSpec LayerSpec::conv2d(std::size_t filters, Activation act) {
  LayerSpec s;
  s.kind = LayerKind::Conv2D;
  s.filters = filters;
  s.activation = act;
  return s;
}

LayerSpec LayerSpec::batch_norm() {
  LayerSpec s;
  s.kind = LayerKind::BatchNorm;
  return s;
}

LayerSpec LayerSpec::max_pool() {
  LayerSpec s;
  s.kind = LayerKind::MaxPool2D;
  return s;
}

LayerSpec LayerSpec::relu() {
  LayerSpec s;
  s.kind = LayerKind::ReLU;
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::Flatten;
  return s;
}

LayerSpec LayerSpec::dense(std::size_t units, Activation act) {
  LayerSpec s;
  s.kind = LayerKind::Dense;
  s.units = units;
  s.activation = act;
  return s;
}

LayerSpec LayerSpec::dropout(double rate) {
  LayerSpec s;
  s.kind = LayerKind::Dropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::linear_output() {
  LayerSpec s;
  s.kind = LayerKind::LinearOutput;
  return s;
}

Shape LayerSpec::output_shape(const Shape& in) const {
  switch (kind) {
    case LayerKind::ZeroPad2D:
      require_spatial(in, "ZeroPad2D");
      return Shape::nhwc(in.batch(), in.height() + 2 * pad_h, in.width() + 2 * pad_w, in.channels());
    case LayerKind::Conv2D:
      require_spatial(in, "Conv2D");
      if (kernel != 3 || stride != 1) throw ShapeError("Conv2D supports only a 3x3 kernel with stride 1");
      if (filters == 0) throw ShapeError("Conv2D needs at least one filter");
      if (in.height() < 3 || in.width() < 3) {
        throw ShapeError("Conv2D input " + in.to_string() + " is smaller than the 3x3 kernel");
      }
      if (in.channels() == 0) throw ShapeError("Conv2D input has zero channels");
      return Shape::nhwc(in.batch(), in.height() - 2, in.width() - 2, filters);
    case LayerKind::BatchNorm:
      if (in.channels() == 0) throw ShapeError("BatchNorm input has zero channels");
      return in;
    case LayerKind::MaxPool2D:
      require_spatial(in, "MaxPool2D");
      if (pool != 2) throw ShapeError("MaxPool2D supports only a 2x2 pool");
      if (in.height() < 2 || in.width() < 2) {
        throw ShapeError("MaxPool2D input " + in.to_string() + " is smaller than the 2x2 pool");
      }
      return Shape::nhwc(in.batch(), in.height() / 2, in.width() / 2, in.channels());
    case LayerKind::ReLU:
    case LayerKind::LinearOutput:
      return in;
    case LayerKind::Dropout:
      if (!(rate >= 0.0 && rate < 1.0)) throw ShapeError("Dropout rate must lie in [0, 1)");
      return in;
    case LayerKind::Flatten:
      return Shape::flat(in.batch(), in.count() / (in.batch() == 0 ? 1 : in.batch()));
    case LayerKind::Dense:
      if (in.rank() != 2) throw ShapeError("Dense expects a flattened input, got " + in.to_string());
      if (units == 0) throw ShapeError("Dense needs at least one unit");
      if (in.channels() == 0) throw ShapeError("Dense input has zero features");
      return Shape::flat(in.batch(), units);
  }
  throw ShapeError("unknown layer kind");
}

std::size_t LayerSpec::parameter_count(const Shape& in) const {
  switch (kind) {
    case LayerKind::Conv2D:
      return kernel * kernel * in.channels() * filters + filters;
    case LayerKind::BatchNorm:
      return 4 * in.channels();
    case LayerKind::Dense:
      return in.channels() * units + units;
    default:
      return 0;
  }
}

std::string describe(const LayerSpec& s) {
  std::ostringstream os;
  os << to_string(s.kind);
  switch (s.kind) {
    case LayerKind::ZeroPad2D:
      os << '(' << s.pad_h << ',' << s.pad_w << ')';
      break;
    case LayerKind::Conv2D:
      os << '(' << s.filters << ", " << s.kernel << 'x' << s.kernel << ", " << to_string(s.activation) << ')';
      break;
    case LayerKind::Dense:
      os << '(' << s.units << ", " << to_string(s.activation) << ')';
      break;
    case LayerKind::Dropout:
      os << '(' << s.rate << ')';
      break;
    default:
      break;
  }
  return os.str();
}

}  // namespace pm25::nn
