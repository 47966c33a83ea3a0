#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace pm25::metrics {

// PM2.5 values on the AQI scale.
struct PredictionPair {
  double predicted = 0.0;
  double observed = 0.0;
};

std::vector<PredictionPair> make_pairs(std::span<const double> predicted, std::span<const double> observed);
std::vector<PredictionPair> make_pairs(std::span<const float> predicted, std::span<const float> observed);

// Mean |predicted - observed|.
double mae(std::span<const PredictionPair> pairs);
// Mean (predicted - observed)^2.
double mse(std::span<const PredictionPair> pairs);
double rmse(std::span<const PredictionPair> pairs);

// 1 - SS_res / SS_tot, with SS_tot taken about the observed mean. Negative
// when the predictor does worse than the constant observed mean.
double r_squared(std::span<const PredictionPair> pairs);

// Sample Pearson correlation between predicted and observed.
double pearson_r(std::span<const PredictionPair> pairs);

// Fraction of pairs with |predicted - observed| <= threshold.
double within_rate(std::span<const PredictionPair> pairs, double threshold = 50.0);

struct EvalReport {
  std::size_t count = 0;
  double mae = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;        // NaN when the observed values are constant
  double pearson_r = 0.0;  // NaN when either side is constant
  double within_threshold = 50.0;
  double within_rate = 0.0;
};

// All metrics at once. Degenerate R^2 / correlation are reported as NaN
// instead of throwing so a report can always be written.
EvalReport evaluate(std::span<const PredictionPair> pairs, double within_threshold = 50.0);

void write_report_csv(const EvalReport& report, const std::filesystem::path& path);

struct ScatterRow {
  std::string id;
  double predicted = 0.0;
  double observed = 0.0;
};
void write_scatter_csv(std::span<const ScatterRow> rows, const std::filesystem::path& path);

}  // namespace pm25::metrics
