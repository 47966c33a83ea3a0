#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pm25/dataset/labeling.hpp"
#include "pm25/dataset/manifest.hpp"
#include "pm25/errors.hpp"
#include "pm25/haze/features.hpp"
#include "pm25/metrics/metrics.hpp"
#include "pm25/model/dcnn.hpp"
#include "pm25/nn/checkpoint.hpp"
#include "pm25/preprocess/image.hpp"

namespace pm25::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string(what) + " is required");
  if (!fs::is_regular_file(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(10);
  return out;
}

struct LoadedData {
  std::vector<dataset::ImageRecord> records;
  model::ImageSet set;
};

LoadedData load_data(const RunConfig& cfg) {
  std::optional<dataset::HourlyReadings> readings;
  if (!cfg.readings.empty()) readings = dataset::load_readings_csv(cfg.readings);
  dataset::ManifestOptions opt;
  opt.fail_fast = cfg.fail_fast;
  opt.readings = readings ? &*readings : nullptr;
  dataset::Manifest m = dataset::parse_manifest(cfg.manifest, opt);
  for (const auto& i : m.issues) warn(cfg.manifest.string() + ":" + std::to_string(i.line) + ": " + i.message);

  std::vector<fs::path> paths;
  for (const auto& r : m.records) paths.push_back(r.image_path);
  auto batch = preprocess::batch(paths, cfg.fail_fast);
  for (const auto& e : batch.errors) warn(e);

  LoadedData d;
  for (std::size_t i : batch.kept) {
    d.records.push_back(m.records[i]);
    d.set.labels.push_back(static_cast<float>(m.records[i].pm25_label));
  }
  d.set.images = std::move(batch.images);
  return d;
}

model::ImageSet subset(const model::ImageSet& all, const std::vector<std::size_t>& idx) {
  model::ImageSet s;
  s.images = nn::gather_batch(all.images, std::span<const std::size_t>(idx));
  for (std::size_t i : idx) s.labels.push_back(all.labels[i]);
  return s;
}

metrics::EvalReport evaluate_on(const model::Model& m, const model::ImageSet& set) {
  const auto preds = model::predict(m, set.images);
  const auto pairs = metrics::make_pairs(std::span<const float>(preds), std::span<const float>(set.labels));
  return metrics::evaluate(pairs);
}

model::Model fresh_model(const RunConfig& cfg) {
  return model::build_model(model::model_spec_by_name(cfg.arch, cfg.train.dropout_rate), cfg.seed);
}

model::TrainConfig train_config(const RunConfig& cfg) {
  model::TrainConfig t = cfg.train;
  t.seed = cfg.seed;
  return t;
}

void progress(std::size_t epoch, std::size_t total, const model::TrainLog& log) {
  std::cerr << "epoch " << epoch << "/" << total << " train_mse " << log.train_mse.back() << " val_mse "
            << log.val_mse.back() << '\n';
}

void cmd_train(const RunConfig& cfg) {
  require_file(cfg.manifest, "manifest");
  if (!cfg.readings.empty()) require_file(cfg.readings, "readings");
  model::Model m = fresh_model(cfg);
  const LoadedData d = load_data(cfg);
  const auto plan = dataset::split(d.records, cfg.seed, cfg.split_order);
  fs::create_directories(cfg.output_dir);

  auto split_out = open_out(cfg.output_dir / "split.csv");
  split_out << "subset,record,image_path,pm25\n";
  const auto write_subset = [&](const char* name, const std::vector<std::size_t>& idx) {
    for (std::size_t i : idx) {
      split_out << name << ',' << i << ',' << d.records[i].image_path.string() << ',' << d.records[i].pm25_label << '\n';
    }
  };
  write_subset("train", plan.train);
  write_subset("val", plan.val);
  write_subset("test", plan.test);
  split_out.close();

  const auto tcfg = train_config(cfg);
  model::FitHooks hooks;
  hooks.on_epoch = [&](std::size_t e, const model::TrainLog& log) { progress(e, tcfg.epochs, log); };
  hooks.on_snapshot = [&](model::SnapshotReason why, std::size_t epoch, const model::Model& snap) {
    switch (why) {
      case model::SnapshotReason::Best: model::save(snap, cfg.output_dir / "model_best.ckpt"); break;
      case model::SnapshotReason::Periodic:
        model::save(snap, cfg.output_dir / ("model_epoch_" + std::to_string(epoch) + ".ckpt"));
        break;
      case model::SnapshotReason::Final: model::save(snap, cfg.output_dir / "model_final.ckpt"); break;
    }
  };
  const auto log = model::fit(m, subset(d.set, plan.train), subset(d.set, plan.val), tcfg, hooks);
  model::write_train_log_csv(log, cfg.output_dir / "train_log.csv");

  const auto test = evaluate_on(m, subset(d.set, plan.test));
  metrics::write_report_csv(test, cfg.output_dir / "test_report.csv");
  std::cout << "trained " << log.epochs() << " epochs on " << plan.train.size() << " images; test mse " << test.mse
            << " rmse " << test.rmse << " mae " << test.mae << '\n';
}

void cmd_evaluate(const RunConfig& cfg) {
  require_file(cfg.checkpoint, "checkpoint");
  require_file(cfg.manifest, "manifest");
  if (!cfg.readings.empty()) require_file(cfg.readings, "readings");
  const model::Model m = model::load(cfg.checkpoint);
  const LoadedData d = load_data(cfg);
  if (d.records.empty()) throw DataError("no usable records in " + cfg.manifest.string());
  const auto preds = model::predict(m, d.set.images);
  const auto pairs = metrics::make_pairs(std::span<const float>(preds), std::span<const float>(d.set.labels));
  const auto report = metrics::evaluate(pairs);

  fs::create_directories(cfg.output_dir);
  metrics::write_report_csv(report, cfg.output_dir / "report.csv");
  std::vector<metrics::ScatterRow> rows;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    rows.push_back({d.records[i].image_path.string(), preds[i], d.set.labels[i]});
  }
  metrics::write_scatter_csv(rows, cfg.output_dir / "scatter.csv");
  std::cout << "n " << report.count << " mse " << report.mse << " rmse " << report.rmse << " mae " << report.mae
            << " r2 " << report.r2 << " pearson " << report.pearson_r << " within50 " << report.within_rate << '\n';
}

void cmd_predict(const RunConfig& cfg) {
  require_file(cfg.checkpoint, "checkpoint");
  const model::Model m = model::load(cfg.checkpoint);
  auto batch = preprocess::batch(cfg.images, cfg.fail_fast);
  for (const auto& e : batch.errors) warn(e);
  const auto preds = model::predict(m, batch.images);

  fs::create_directories(cfg.output_dir);
  auto out = open_out(cfg.output_dir / "predictions.csv");
  const std::string header = "image_path,pm25,category,color";
  out << header << '\n';
  std::cout << header << '\n';
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& cat = dataset::aqi_category(std::clamp<double>(preds[i], 0.0, dataset::kAqiMax));
    std::ostringstream line;
    line.precision(6);
    line << cfg.images[batch.kept[i]].string() << ',' << preds[i] << ',' << cat.name << ',' << cat.color;
    out << line.str() << '\n';
    std::cout << line.str() << '\n';
  }
}

void cmd_features(const RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  auto out = open_out(cfg.output_dir / "features.csv");
  out << "path,transmission_stat,blue_mean,sky_gradient,rms_contrast,entropy,humidity\n";
  for (const auto& p : cfg.images) {
    preprocess::RawImage raw;
    try {
      raw = preprocess::load_image(p);
    } catch (const DataError& e) {
      if (cfg.fail_fast) throw;
      warn(e.what());
      continue;
    }
    std::vector<float> v(raw.rgb.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(raw.rgb[i] / 255.0);
    const haze::RgbImage img(raw.width, raw.height, std::move(v));
    const auto f = haze::feature_vector(img, cfg.humidity, cfg.patch);
    out << p.string() << ',' << f.transmission_stat << ',' << f.blue_mean << ',' << f.sky_gradient << ','
        << f.rms_contrast << ',' << f.entropy << ',';
    if (f.humidity) out << *f.humidity;
    out << '\n';
  }
}

void cmd_preprocess(const RunConfig& cfg) {
  std::vector<fs::path> paths = cfg.images;
  if (!cfg.manifest.empty()) {
    require_file(cfg.manifest, "manifest");
    // Labels are not needed to preprocess.
    dataset::ManifestOptions opt;
    opt.fail_fast = false;
    opt.require_label = false;
    const auto m = dataset::parse_manifest(cfg.manifest, opt);
    for (const auto& r : m.records) paths.push_back(r.image_path);
    for (const auto& i : m.issues) {
      if (cfg.fail_fast) throw DataError(cfg.manifest.string() + ":" + std::to_string(i.line) + ": " + i.message);
      warn(cfg.manifest.string() + ":" + std::to_string(i.line) + ": " + i.message);
    }
  }
  auto batch = preprocess::batch(paths, cfg.fail_fast);
  for (const auto& e : batch.errors) warn(e);

  fs::create_directories(cfg.output_dir / "previews");
  preprocess::write_batch_file(batch.images, cfg.output_dir / "batch.bin");
  auto index = open_out(cfg.output_dir / "batch_index.csv");
  index << "row,image_path,preview\n";
  constexpr std::size_t kPix = preprocess::ProcessedImage::kHeight * preprocess::ProcessedImage::kWidth * 3;
  for (std::size_t row = 0; row < batch.kept.size(); ++row) {
    std::vector<float> v(batch.images.data() + row * kPix, batch.images.data() + (row + 1) * kPix);
    char name[32];
    std::snprintf(name, sizeof(name), "%05zu.png", row);
    preprocess::save_preview(preprocess::ProcessedImage(std::move(v)), cfg.output_dir / "previews" / name);
    index << row << ',' << paths[batch.kept[row]].string() << ",previews/" << name << '\n';
  }
  std::cout << "preprocessed " << batch.kept.size() << " of " << paths.size() << " images\n";
}

void cmd_audit(const RunConfig& cfg) {
  require_file(cfg.manifest, "manifest");
  std::optional<dataset::HourlyReadings> readings;
  if (!cfg.readings.empty()) {
    require_file(cfg.readings, "readings");
    readings = dataset::load_readings_csv(cfg.readings);
  }
  const auto report = dataset::audit_manifest(cfg.manifest, readings ? &*readings : nullptr);
  dataset::ManifestOptions opt;
  opt.fail_fast = false;
  opt.readings = readings ? &*readings : nullptr;
  const auto m = dataset::parse_manifest(cfg.manifest, opt);

  fs::create_directories(cfg.output_dir);
  dataset::write_audit_csv(report, cfg.output_dir / "audit.csv");
  dataset::write_histogram_csv(dataset::histogram(std::span<const dataset::ImageRecord>(m.records)),
                               cfg.output_dir / "histogram.csv");
  std::cout << "rows " << report.rows << " usable " << report.usable << " issues " << report.issues.size() << '\n';
  for (const auto& i : report.issues) {
    std::cout << "line " << i.line << " " << dataset::to_string(i.kind) << ": " << i.message << '\n';
  }
}

void cmd_kfold(const RunConfig& cfg) {
  require_file(cfg.manifest, "manifest");
  if (!cfg.readings.empty()) require_file(cfg.readings, "readings");
  const LoadedData d = load_data(cfg);
  const auto folds = dataset::kfold(d.records.size(), cfg.k, cfg.seed);
  fs::create_directories(cfg.output_dir);

  auto assign = open_out(cfg.output_dir / "kfold_assignment.csv");
  assign << "fold,record,image_path\n";
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (std::size_t i : folds[f]) assign << f << ',' << i << ',' << d.records[i].image_path.string() << '\n';
  }
  assign.close();

  auto rows = open_out(cfg.output_dir / "kfold_metrics.csv");
  rows << "fold,n,mse,rmse,mae,r2,within_rate\n";
  std::vector<double> mses;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> train_idx;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
    }
    model::Model m = fresh_model(cfg);
    auto tcfg = train_config(cfg);
    model::fit(m, subset(d.set, train_idx), {}, tcfg);
    const auto r = evaluate_on(m, subset(d.set, folds[f]));
    rows << f << ',' << r.count << ',' << r.mse << ',' << r.rmse << ',' << r.mae << ',' << r.r2 << ','
         << r.within_rate << '\n';
    mses.push_back(r.mse);
    std::cerr << "fold " << f + 1 << "/" << folds.size() << " mse " << r.mse << '\n';
  }
  rows.close();

  const auto [lo, hi] = std::minmax_element(mses.begin(), mses.end());
  double mean = 0.0;
  for (double v : mses) mean += v;
  mean /= static_cast<double>(mses.size());
  const double spread = *lo > 0.0 ? (*hi - *lo) / *lo : 0.0;
  auto summary = open_out(cfg.output_dir / "kfold_summary.csv");
  summary << "k,mean_mse,min_mse,max_mse,relative_spread\n";
  summary << folds.size() << ',' << mean << ',' << *lo << ',' << *hi << ',' << spread << '\n';
  std::cout << "k " << folds.size() << " mean_mse " << mean << " min " << *lo << " max " << *hi
            << " relative_spread " << spread << '\n';
}

}  // namespace

Settings read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  Settings s;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(path.string() + ":" + std::to_string(n) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError(path.string() + ":" + std::to_string(n) + ": empty key");
    s[key] = trim(t.substr(eq + 1));
  }
  return s;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "manifest") cfg.manifest = value;
  else if (key == "readings") cfg.readings = value;
  else if (key == "output_dir") cfg.output_dir = value;
  else if (key == "checkpoint") cfg.checkpoint = value;
  else if (key == "epochs") cfg.train.epochs = parse_integer<std::size_t>(key, value);
  else if (key == "batch_size") {
    cfg.train.batch_size = parse_integer<std::size_t>(key, value);
    if (cfg.train.batch_size == 0) throw ConfigError("batch_size must be positive");
  } else if (key == "learning_rate") {
    cfg.train.learning_rate = parse_real(key, value);
    if (!(cfg.train.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  } else if (key == "dropout_rate") {
    cfg.train.dropout_rate = parse_real(key, value);
    if (!(cfg.train.dropout_rate >= 0.0 && cfg.train.dropout_rate < 1.0)) {
      throw ConfigError("dropout_rate must lie in [0, 1)");
    }
  } else if (key == "seed") cfg.seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "optimizer") {
    try {
      cfg.train.optimizer = nn::update_rule_from_string(value);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("optimizer: ") + e.what());
    }
  } else if (key == "arch") {
    if (value != "dcnn" && value != "compact") throw ConfigError("arch must be dcnn or compact, got '" + value + "'");
    cfg.arch = value;
  } else if (key == "checkpoint_every") cfg.train.checkpoint_every = parse_integer<std::size_t>(key, value);
  else if (key == "early_stopping_patience") cfg.train.early_stopping_patience = parse_integer<std::size_t>(key, value);
  else if (key == "fail_fast") cfg.fail_fast = parse_bool(key, value);
  else if (key == "k") cfg.k = parse_integer<std::size_t>(key, value);
  else if (key == "split_order") {
    if (value == "random") cfg.split_order = dataset::SplitOrder::Random;
    else if (value == "chronological") cfg.split_order = dataset::SplitOrder::Chronological;
    else throw ConfigError("split_order must be random or chronological, got '" + value + "'");
  } else if (key == "patch") {
    cfg.patch = parse_integer<std::size_t>(key, value);
    if (cfg.patch == 0 || cfg.patch % 2 == 0) throw ConfigError("patch must be odd and positive");
  } else if (key == "humidity") {
    const double h = parse_real(key, value);
    if (!(h >= 0.0 && h <= 100.0)) throw ConfigError("humidity must lie in [0, 100]");
    cfg.humidity = h;
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

RunConfig resolve(const std::string& subcommand, const Settings& file, const Settings& flags,
                  std::vector<fs::path> images) {
  RunConfig cfg;
  cfg.subcommand = subcommand;
  for (const auto& [k, v] : file) apply_setting(cfg, k, v);
  if (const char* env = std::getenv("PM25_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  for (const auto& [k, v] : flags) apply_setting(cfg, k, v);
  cfg.images = std::move(images);
  return cfg;
}

void run(const RunConfig& cfg) {
  const std::string& s = cfg.subcommand;
  if (s == "train") cmd_train(cfg);
  else if (s == "evaluate") cmd_evaluate(cfg);
  else if (s == "predict") cmd_predict(cfg);
  else if (s == "features") cmd_features(cfg);
  else if (s == "preprocess") cmd_preprocess(cfg);
  else if (s == "audit") cmd_audit(cfg);
  else if (s == "kfold") cmd_kfold(cfg);
  else throw ConfigError("unknown subcommand '" + s + "'");
}

int report_failure(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const nn::CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << '\n';
    return kData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const DomainError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const ShapeError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace pm25::cli
