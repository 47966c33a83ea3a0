#include "pm25/model/train.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include "pm25/errors.hpp"
#include "pm25/metrics/metrics.hpp"
#include "pm25/random.hpp"

namespace pm25::model {

namespace {

void check_set(const Model& model, const ImageSet& set, const char* name) {
  const auto& in = model.network().input_shape();
  const auto& s = set.images.shape();
  if (set.empty() && set.images.size() == 0) return;
  if (s.rank() != 4 || s.height() != in.height() || s.width() != in.width() || s.channels() != in.channels()) {
    throw ShapeError(std::string(name) + " images must be " + in.to_string(true) + ", got " + s.to_string());
  }
  if (s.batch() != set.labels.size()) {
    throw DataError(std::string(name) + " set has " + std::to_string(s.batch()) + " images but " +
                    std::to_string(set.labels.size()) + " labels");
  }
}

}  // namespace

void write_train_log_csv(const TrainLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(10);
  out << "epoch,train_mse,val_mse,train_rmse,val_rmse,train_mae,val_mae\n";
  for (std::size_t e = 0; e < log.epochs(); ++e) {
    out << e + 1 << ',' << log.train_mse[e] << ',' << log.val_mse[e] << ',' << log.train_rmse[e] << ','
        << log.val_rmse[e] << ',' << log.train_mae[e] << ',' << log.val_mae[e] << '\n';
  }
}

TrainLog fit(Model& model, const ImageSet& train, const ImageSet& val, const TrainConfig& cfg, const FitHooks& hooks) {
  if (train.empty()) throw DataError("training set is empty");
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be positive");
  check_set(model, train, "training");
  check_set(model, val, "validation");

  TrainLog log;
  if (cfg.epochs == 0) return log;

  auto& net = model.network();
  net.set_dropout(cfg.dropout_rate, cfg.seed ^ 0x9E3779B97F4A7C15ull);
  nn::OptimizerConfig ocfg;
  ocfg.rule = cfg.optimizer;
  ocfg.learning_rate = cfg.learning_rate;
  nn::Optimizer<float> opt(ocfg);
  std::mt19937_64 rng(cfg.seed);

  const std::size_t n = train.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<float> batch_labels;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto order = permutation(n, rng);
    double sq = 0.0, ab = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t first = 0; first < n; first += cfg.batch_size, ++batch_no) {
      const std::size_t count = std::min(cfg.batch_size, n - first);
      const std::span<const std::size_t> idx(order.data() + first, count);
      const nn::Tensor x = nn::gather_batch(train.images, idx);
      batch_labels.resize(count);
      for (std::size_t i = 0; i < count; ++i) batch_labels[i] = train.labels[idx[i]];

      const std::string where = "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_no + 1);
      net.zero_grad();
      nn::Tensor y;
      try {
        y = net.forward(x, nn::Mode::Train);
      } catch (const NumericError& e) {
        throw NumericError(where + ": " + e.what());
      }
      const auto loss = nn::mse_loss<float>(y, batch_labels);
      if (!std::isfinite(loss.value)) throw NumericError(where + ": loss is not finite");
      for (std::size_t i = 0; i < count; ++i) {
        const double d = static_cast<double>(y[i]) - batch_labels[i];
        sq += d * d;
        ab += std::abs(d);
      }
      try {
        net.backward(loss.grad);
      } catch (const NumericError& e) {
        throw NumericError(where + ": " + e.what());
      }
      opt.step(net);
    }

    const double train_mse = sq / static_cast<double>(n);
    log.train_mse.push_back(train_mse);
    log.train_rmse.push_back(std::sqrt(train_mse));
    log.train_mae.push_back(ab / static_cast<double>(n));

    double score = train_mse;
    if (!val.empty()) {
      const auto preds = predict(model, val.images);
      const auto pairs = metrics::make_pairs(std::span<const float>(preds), std::span<const float>(val.labels));
      const double v_mse = metrics::mse(pairs);
      log.val_mse.push_back(v_mse);
      log.val_rmse.push_back(metrics::rmse(pairs));
      log.val_mae.push_back(metrics::mae(pairs));
      score = v_mse;
    } else {
      constexpr double nan = std::numeric_limits<double>::quiet_NaN();
      log.val_mse.push_back(nan);
      log.val_rmse.push_back(nan);
      log.val_mae.push_back(nan);
    }

    if (hooks.on_epoch) hooks.on_epoch(epoch, log);
    if (score < best) {
      best = score;
      since_best = 0;
      if (hooks.on_snapshot) hooks.on_snapshot(SnapshotReason::Best, epoch, model);
    } else {
      ++since_best;
    }
    if (cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0 && hooks.on_snapshot) {
      hooks.on_snapshot(SnapshotReason::Periodic, epoch, model);
    }
    if (cfg.early_stopping_patience > 0 && since_best >= cfg.early_stopping_patience) break;
  }
  if (hooks.on_snapshot) hooks.on_snapshot(SnapshotReason::Final, log.epochs(), model);
  return log;
}

}  // namespace pm25::model
