#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "pm25/errors.hpp"
#include "pm25/metrics/metrics.hpp"
#include "pm25/model/dcnn.hpp"
#include "pm25/model/train.hpp"

using namespace pm25;
using model::ImageSet;
using model::TrainConfig;

namespace {

constexpr std::size_t kH = 40, kW = 48;

model::ModelSpec small_spec() {
  auto spec = model::compact_model_spec();
  spec.input = nn::Shape::nhwc(1, kH, kW, 3);
  return spec;
}

TrainConfig quick(std::size_t epochs, std::uint64_t seed = 0) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 4;
  cfg.learning_rate = 1e-4;
  cfg.seed = seed;
  return cfg;
}

std::vector<float> flat_params(model::Model& m) {
  std::vector<float> out;
  for (auto& p : m.network().parameters()) out.insert(out.end(), p.ref.value->values().begin(), p.ref.value->values().end());
  return out;
}

}  // namespace

TEST_CASE("model specs by name") {
  CHECK(model::build_model(model::dcnn_model_spec(), 0).parameter_count() == 4849601);
  const auto compact = model::build_model(model::compact_model_spec(), 0);
  CHECK(compact.parameter_count() < 5000);
  CHECK(model::model_spec_by_name("dcnn").layers.size() == 19);
  CHECK(model::model_spec_by_name("dcnn", 0.3).layers[17].rate == 0.3);
  CHECK_THROWS_AS(model::model_spec_by_name("resnet"), ConfigError);
  auto bad = model::compact_model_spec();
  bad.input = nn::Shape::nhwc(1, 8, 8, 3);
  CHECK_THROWS_AS(model::build_model(bad, 0), nn::BuildError);
}

TEST_CASE("predict checks shapes and does not depend on chunking") {
  const auto m = model::build_model(small_spec(), 5);
  const auto set = test::brightness_set(7, kH, kW, 1);
  const auto a = model::predict(m, set.images, 1);
  const auto b = model::predict(m, set.images, 3);
  const auto c = model::predict(m, set.images, 100);
  REQUIRE(a.size() == 7);
  CHECK(a == b);
  CHECK(a == c);
  CHECK_THROWS_AS(model::predict(m, test::brightness_set(2, kH, kW + 1, 1).images), ShapeError);
  CHECK_THROWS_AS(model::predict(m, set.images, 0), UsageError);
  CHECK(model::predict(m, nn::Tensor(nn::Shape::nhwc(0, kH, kW, 3))).empty());
}

TEST_CASE("fit argument handling") {
  auto m = model::build_model(small_spec(), 1);
  const auto set = test::brightness_set(4, kH, kW, 2);
  CHECK(model::fit(m, set, {}, quick(0)).epochs() == 0);
  CHECK_THROWS_AS(model::fit(m, ImageSet{}, {}, quick(1)), DataError);
  auto cfg = quick(1);
  cfg.batch_size = 0;
  CHECK_THROWS_AS(model::fit(m, set, {}, cfg), ConfigError);
  auto mismatched = set;
  mismatched.labels.pop_back();
  CHECK_THROWS_AS(model::fit(m, mismatched, {}, quick(1)), DataError);
  CHECK_THROWS_AS(model::fit(m, test::brightness_set(2, kH + 2, kW, 1), {}, quick(1)), ShapeError);
}

TEST_CASE("training is deterministic for a seed") {
  const auto set = test::brightness_set(6, kH, kW, 3);
  auto a = model::build_model(small_spec(), 9);
  auto b = model::build_model(small_spec(), 9);
  auto c = model::build_model(small_spec(), 9);
  const auto la = model::fit(a, set, {}, quick(3, 1));
  const auto lb = model::fit(b, set, {}, quick(3, 1));
  model::fit(c, set, {}, quick(3, 2));
  CHECK(la.train_mse == lb.train_mse);
  CHECK(flat_params(a) == flat_params(b));
  CHECK(flat_params(a) != flat_params(c));
}

TEST_CASE("validation metrics agree with predict and the metrics module") {
  const auto train = test::brightness_set(6, kH, kW, 4);
  const auto val = test::brightness_set(3, kH, kW, 5);
  auto m = model::build_model(small_spec(), 2);
  const auto log = model::fit(m, train, val, quick(2));
  const auto preds = model::predict(m, val.images);
  const auto pairs = metrics::make_pairs(std::span<const float>(preds), std::span<const float>(val.labels));
  CHECK(log.val_mse.back() == metrics::mse(pairs));
  CHECK(log.val_mae.back() == metrics::mae(pairs));
  CHECK(log.val_rmse.back() == metrics::rmse(pairs));
  CHECK(std::isnan(model::fit(m, train, {}, quick(1)).val_mse[0]));
}

TEST_CASE("a single image is fitted to its label") {
  auto one = test::brightness_set(1, kH, kW, 6);
  one.labels[0] = 200.0f;
  auto m = model::build_model(small_spec(), 3);
  auto cfg = quick(300);
  cfg.batch_size = 1;
  const auto log = model::fit(m, one, {}, cfg);
  CHECK(std::sqrt(log.train_mse.back()) < 5.0);
}

TEST_CASE("loss falls on a learnable set") {
  const auto set = test::brightness_set(8, kH, kW, 7);
  auto m = model::build_model(small_spec(), 4);
  const auto log = model::fit(m, set, {}, quick(60));
  double early = 0.0, late = 0.0;
  for (std::size_t e = 0; e < 10; ++e) {
    early += log.train_mse[e];
    late += log.train_mse[50 + e];
  }
  CHECK(late < 0.1 * early);
}

TEST_CASE("snapshots and early stopping") {
  const auto train = test::brightness_set(4, kH, kW, 8);
  const auto val = test::brightness_set(2, kH, kW, 9);
  auto m = model::build_model(small_spec(), 1);
  std::vector<std::pair<model::SnapshotReason, std::size_t>> seen;
  std::size_t epochs_seen = 0;
  model::FitHooks hooks;
  hooks.on_snapshot = [&](model::SnapshotReason r, std::size_t e, const model::Model&) { seen.emplace_back(r, e); };
  hooks.on_epoch = [&](std::size_t e, const model::TrainLog& log) {
    epochs_seen = e;
    CHECK(log.epochs() == e);
  };
  auto cfg = quick(6);
  cfg.checkpoint_every = 2;
  const auto log = model::fit(m, train, val, cfg, hooks);
  CHECK(epochs_seen == 6);
  REQUIRE(!seen.empty());
  CHECK(seen.front() == std::pair{model::SnapshotReason::Best, std::size_t{1}});
  CHECK(seen.back() == std::pair{model::SnapshotReason::Final, std::size_t{6}});
  std::size_t periodic = 0;
  for (const auto& [r, e] : seen) {
    if (r == model::SnapshotReason::Periodic) {
      CHECK(e % 2 == 0);
      ++periodic;
    }
  }
  CHECK(periodic == 3);

  // A learning rate this small cannot improve a fitted model, so patience runs out.
  auto frozen = quick(50);
  frozen.learning_rate = 1e-30;
  frozen.early_stopping_patience = 3;
  const auto stopped = model::fit(m, train, val, frozen);
  CHECK(stopped.epochs() < 50);
  CHECK(stopped.epochs() >= 4);
}

TEST_CASE("divergence reports where it happened") {
  auto m = model::build_model(small_spec(), 1);
  const auto set = test::brightness_set(4, kH, kW, 2);
  auto cfg = quick(20);
  cfg.learning_rate = 1e30;
  try {
    model::fit(m, set, {}, cfg);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    const std::string what = e.what();
    CHECK(what.rfind("epoch ", 0) == 0);
    CHECK(what.find(", batch 1: ") != std::string::npos);
  }
}

TEST_CASE("train log csv") {
  const auto dir = test::temp_dir("train_log");
  model::TrainLog log;
  log.train_mse = {4.0};
  log.val_mse = {9.0};
  log.train_rmse = {2.0};
  log.val_rmse = {3.0};
  log.train_mae = {1.5};
  log.val_mae = {2.5};
  model::write_train_log_csv(log, dir / "log.csv");
  std::ifstream in(dir / "log.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "epoch,train_mse,val_mse,train_rmse,val_rmse,train_mae,val_mae");
  CHECK(row == "1,4,9,2,3,1.5,2.5");
}
