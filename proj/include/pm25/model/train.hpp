#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "pm25/model/dcnn.hpp"
#include "pm25/nn/optimizer.hpp"

namespace pm25::model {

// Images (n, h, w, 3) with one PM2.5 label each.
struct ImageSet {
  nn::Tensor images;
  std::vector<float> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
};

struct TrainConfig {
  std::size_t epochs = 350;
  std::size_t batch_size = 8;
  double learning_rate = 1e-6;
  double dropout_rate = 0.10;
  std::uint64_t seed = 0;
  nn::UpdateRule optimizer = nn::UpdateRule::Sgd;
  // Extra snapshot every N epochs; 0 keeps only best-validation and final.
  std::size_t checkpoint_every = 0;
  // Stop after this many epochs without a new best validation MSE; 0 = off.
  std::size_t early_stopping_patience = 0;
};

struct TrainLog {
  std::vector<double> train_mse, val_mse;
  std::vector<double> train_rmse, val_rmse;
  std::vector<double> train_mae, val_mae;

  std::size_t epochs() const { return train_mse.size(); }
};

void write_train_log_csv(const TrainLog& log, const std::filesystem::path& path);

enum class SnapshotReason { Best, Periodic, Final };

struct FitHooks {
  // Called with the model state worth keeping; `epoch` is 1-based.
  std::function<void(SnapshotReason, std::size_t epoch, const Model&)> on_snapshot;
  std::function<void(std::size_t epoch, const TrainLog&)> on_epoch;
};

// Mini-batch training with MSE loss. Training metrics come from the
// train-mode forward passes of the epoch; validation metrics from predict().
// With an empty validation set the val series hold NaN and "best" tracks the
// training MSE instead.
TrainLog fit(Model& model, const ImageSet& train, const ImageSet& val, const TrainConfig& cfg,
             const FitHooks& hooks = {});

}  // namespace pm25::model
