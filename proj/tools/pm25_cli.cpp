#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using pm25::cli::Settings;

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

constexpr Flag kData[] = {
    {"--manifest", "manifest", "image manifest CSV"},
    {"--readings", "readings", "hourly readings CSV (hour_iso,pm25)"},
};
constexpr Flag kTrain[] = {
    {"--epochs", "epochs", "training epochs (350)"},
    {"--batch-size", "batch_size", "mini-batch size (8)"},
    {"--lr", "learning_rate", "learning rate (1e-6)"},
    {"--dropout", "dropout_rate", "dropout rate (0.1)"},
    {"--optimizer", "optimizer", "sgd, momentum or adam (sgd)"},
    {"--arch", "arch", "dcnn or compact (dcnn)"},
    {"--checkpoint-every", "checkpoint_every", "extra checkpoint every N epochs (0 = off)"},
    {"--patience", "early_stopping_patience", "early stopping patience in epochs (0 = off)"},
};

void add_flags(CLI::App* app, std::span<const Flag> flags, Settings& out) {
  for (const auto& f : flags) {
    app->add_option_function<std::string>(f.name, [&out, key = std::string(f.key)](const std::string& v) { out[key] = v; },
                                          f.help);
  }
}

void add_common(CLI::App* app, Settings& out) {
  app->add_option_function<std::string>("--output-dir,-o", [&out](const std::string& v) { out["output_dir"] = v; },
                                        "output directory (default pm25_out, or $PM25_OUTPUT_DIR)");
  app->add_option_function<std::string>("--seed", [&out](const std::string& v) { out["seed"] = v; }, "random seed (0)");
  app->add_flag_function("--fail-fast", [&out](std::int64_t) { out["fail_fast"] = "true"; },
                         "stop at the first bad row or image instead of skipping it");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PM2.5 estimation from sky photos"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config,-c", config_path, "flat key = value settings file")->check(CLI::ExistingFile);

  Settings flags;
  std::vector<std::string> images;

  auto* train = app.add_subcommand("train", "split a labelled manifest, train, write checkpoints and loss log");
  add_flags(train, kData, flags);
  add_flags(train, kTrain, flags);
  train->add_option_function<std::string>("--split-order", [&](const std::string& v) { flags["split_order"] = v; },
                                          "random or chronological (random)");

  auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint on a labelled manifest");
  add_flags(evaluate, kData, flags);

  auto* predict = app.add_subcommand("predict", "predict PM2.5 and AQI category for images");
  predict->add_option("images", images, "image files");

  auto* features = app.add_subcommand("features", "physics-based haze features per image");
  features->add_option("images", images, "image files");
  features->add_option_function<std::string>("--humidity", [&](const std::string& v) { flags["humidity"] = v; },
                                             "relative humidity %, copied into the output");
  features->add_option_function<std::string>("--patch", [&](const std::string& v) { flags["patch"] = v; },
                                             "dark-channel patch size (15)");

  auto* prep = app.add_subcommand("preprocess", "run the image pipeline, write batch file and previews");
  prep->add_option("images", images, "image files");
  prep->add_option_function<std::string>("--manifest", [&](const std::string& v) { flags["manifest"] = v; },
                                         "take image paths from a manifest");

  auto* audit = app.add_subcommand("audit", "check a manifest and write the label histogram");
  add_flags(audit, kData, flags);

  auto* kfold = app.add_subcommand("kfold", "k-fold cross-validation");
  add_flags(kfold, kData, flags);
  add_flags(kfold, kTrain, flags);
  kfold->add_option_function<std::string>("--k", [&](const std::string& v) { flags["k"] = v; }, "fold count (10)");

  for (auto* sub : {evaluate, predict}) {
    sub->add_option_function<std::string>("--checkpoint", [&](const std::string& v) { flags["checkpoint"] = v; },
                                          "model checkpoint")
        ->required();
  }
  for (auto* sub : app.get_subcommands({})) add_common(sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pm25::cli::kConfig;
  }

  try {
    const Settings file = config_path.empty() ? Settings{} : pm25::cli::read_config_file(config_path);
    const std::string name = app.get_subcommands().front()->get_name();
    const auto cfg = pm25::cli::resolve(name, file, flags, {images.begin(), images.end()});
    pm25::cli::run(cfg);
  } catch (...) {
    return pm25::cli::report_failure(std::current_exception());
  }
  return pm25::cli::kOk;
}
