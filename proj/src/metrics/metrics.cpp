#include "pm25/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "pm25/errors.hpp"

namespace pm25::metrics {

namespace {

void require(std::span<const PredictionPair> pairs, std::size_t minimum, const char* what) {
  if (pairs.size() < minimum) {
    throw DomainError(std::string(what) + " needs at least " + std::to_string(minimum) + " prediction pair" +
                      (minimum == 1 ? "" : "s"));
  }
  for (const auto& p : pairs) {
    if (!std::isfinite(p.predicted) || !std::isfinite(p.observed)) {
      throw DomainError(std::string(what) + ": non-finite prediction pair");
    }
  }
}

double observed_mean(std::span<const PredictionPair> pairs) {
  double s = 0.0;
  for (const auto& p : pairs) s += p.observed;
  return s / static_cast<double>(pairs.size());
}

template <typename T>
std::vector<PredictionPair> pairs_from(std::span<const T> predicted, std::span<const T> observed) {
  if (predicted.size() != observed.size()) {
    throw DomainError("predicted and observed lengths differ (" + std::to_string(predicted.size()) + " vs " +
                      std::to_string(observed.size()) + ")");
  }
  std::vector<PredictionPair> out(predicted.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {predicted[i], observed[i]};
  return out;
}

}  // namespace

std::vector<PredictionPair> make_pairs(std::span<const double> predicted, std::span<const double> observed) {
  return pairs_from(predicted, observed);
}

std::vector<PredictionPair> make_pairs(std::span<const float> predicted, std::span<const float> observed) {
  return pairs_from(predicted, observed);
}

double mae(std::span<const PredictionPair> pairs) {
  require(pairs, 1, "mae");
  double s = 0.0;
  for (const auto& p : pairs) s += std::abs(p.predicted - p.observed);
  return s / static_cast<double>(pairs.size());
}

double mse(std::span<const PredictionPair> pairs) {
  require(pairs, 1, "mse");
  double s = 0.0;
  for (const auto& p : pairs) {
    const double d = p.predicted - p.observed;
    s += d * d;
  }
  return s / static_cast<double>(pairs.size());
}

double rmse(std::span<const PredictionPair> pairs) { return std::sqrt(mse(pairs)); }

double r_squared(std::span<const PredictionPair> pairs) {
  require(pairs, 2, "r_squared");
  const double mean = observed_mean(pairs);
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : pairs) {
    ss_res += (p.observed - p.predicted) * (p.observed - p.predicted);
    ss_tot += (p.observed - mean) * (p.observed - mean);
  }
  if (ss_tot == 0.0) throw DomainError("r_squared: observed values have zero variance");
  return 1.0 - ss_res / ss_tot;
}

double pearson_r(std::span<const PredictionPair> pairs) {
  require(pairs, 2, "pearson_r");
  const double n = static_cast<double>(pairs.size());
  double mp = 0.0, mo = 0.0;
  for (const auto& p : pairs) {
    mp += p.predicted;
    mo += p.observed;
  }
  mp /= n;
  mo /= n;
  double cov = 0.0, vp = 0.0, vo = 0.0;
  for (const auto& p : pairs) {
    cov += (p.predicted - mp) * (p.observed - mo);
    vp += (p.predicted - mp) * (p.predicted - mp);
    vo += (p.observed - mo) * (p.observed - mo);
  }
  if (vp == 0.0 || vo == 0.0) throw DomainError("pearson_r: zero variance in predicted or observed values");
  const double r = cov / std::sqrt(vp * vo);
  return std::clamp(r, -1.0, 1.0);
}

double within_rate(std::span<const PredictionPair> pairs, double threshold) {
  if (!(threshold >= 0.0)) throw DomainError("within_rate: threshold must be non-negative");
  require(pairs, 1, "within_rate");
  std::size_t hits = 0;
  for (const auto& p : pairs) {
    if (std::abs(p.predicted - p.observed) <= threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

EvalReport evaluate(std::span<const PredictionPair> pairs, double within_threshold) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  EvalReport r;
  r.count = pairs.size();
  r.mae = mae(pairs);
  r.mse = mse(pairs);
  r.rmse = std::sqrt(r.mse);
  try {
    r.r2 = r_squared(pairs);
  } catch (const DomainError&) {
    r.r2 = nan;
  }
  try {
    r.pearson_r = pearson_r(pairs);
  } catch (const DomainError&) {
    r.pearson_r = nan;
  }
  r.within_threshold = within_threshold;
  r.within_rate = within_rate(pairs, within_threshold);
  return r;
}

void write_report_csv(const EvalReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  out << "count,mae,mse,rmse,r2,pearson_r,within_threshold,within_rate\n";
  out << r.count << ',' << r.mae << ',' << r.mse << ',' << r.rmse << ',' << r.r2 << ',' << r.pearson_r << ','
      << r.within_threshold << ',' << r.within_rate << '\n';
}

void write_scatter_csv(std::span<const ScatterRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(9);
  out << "id,predicted,observed\n";
  for (const auto& row : rows) out << row.id << ',' << row.predicted << ',' << row.observed << '\n';
}

}  // namespace pm25::metrics
