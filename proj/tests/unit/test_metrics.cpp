#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "pm25/errors.hpp"
#include "pm25/metrics/metrics.hpp"

using namespace pm25;
using namespace pm25::metrics;

namespace {

std::vector<PredictionPair> pairs_of(const std::vector<double>& p, const std::vector<double>& o) {
  return make_pairs(std::span<const double>(p), std::span<const double>(o));
}

}  // namespace

TEST_CASE("hand-computed values") {
  const auto ps = pairs_of({2, 4, 6}, {1, 4, 8});
  CHECK(mae(ps) == doctest::Approx(1.0));
  CHECK(mse(ps) == doctest::Approx(5.0 / 3.0));
  CHECK(rmse(ps) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  // observed mean 13/3; SS_tot = 100/9 + 1/9 + 121/9 = 222/9
  CHECK(r_squared(ps) == doctest::Approx(1.0 - 5.0 / (222.0 / 9.0)));
  const auto perfect = pairs_of({1, 2, 3}, {1, 2, 3});
  CHECK(mse(perfect) == 0.0);
  CHECK(r_squared(perfect) == 1.0);
  CHECK(pearson_r(perfect) == doctest::Approx(1.0));
  CHECK(pearson_r(pairs_of({3, 2, 1}, {1, 2, 3})) == doctest::Approx(-1.0));
  // Predicting the mean gives zero; worse than the mean goes negative.
  CHECK(r_squared(pairs_of({2, 2, 2}, {1, 2, 3})) == doctest::Approx(0.0));
  CHECK(r_squared(pairs_of({3, 2, 1}, {1, 2, 3})) < 0.0);
}

TEST_CASE("metrics agree with a naive oracle") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng() % 200;
    std::vector<double> p(n), o(n);
    for (std::size_t i = 0; i < n; ++i) {
      o[i] = test::uniform(rng, 0, 500);
      p[i] = o[i] + test::uniform(rng, -80, 80);
    }
    const auto ps = pairs_of(p, o);
    const auto want = test::naive_metrics(p, o);
    CHECK(std::abs(mae(ps) - want.mae) <= 1e-12 * std::max(1.0, want.mae));
    CHECK(std::abs(mse(ps) - want.mse) <= 1e-12 * std::max(1.0, want.mse));
    CHECK(std::abs(rmse(ps) - want.rmse) <= 1e-12 * std::max(1.0, want.rmse));
    CHECK(std::abs(r_squared(ps) - want.r2) <= 1e-12);
  }
}

TEST_CASE("within rate") {
  const auto ps = pairs_of({0, 50, 100, 200}, {0, 0, 0, 0});
  CHECK(within_rate(ps) == 0.5);
  CHECK(within_rate(ps, 100) == 0.75);
  CHECK(within_rate(ps, 0) == 0.25);
  CHECK_THROWS_AS(within_rate(ps, -1), DomainError);
}

TEST_CASE("degenerate inputs") {
  CHECK_THROWS_AS(mae(std::vector<PredictionPair>{}), DomainError);
  CHECK_THROWS_AS(r_squared(pairs_of({1}, {1})), DomainError);
  CHECK_THROWS_AS(r_squared(pairs_of({1, 2}, {3, 3})), DomainError);
  CHECK_THROWS_AS(pearson_r(pairs_of({1, 1}, {2, 3})), DomainError);
  CHECK_THROWS_AS(mse(pairs_of({NAN}, {1})), DomainError);
  CHECK_THROWS_AS(pairs_of({1, 2}, {1}), DomainError);
  const auto rep = evaluate(pairs_of({1, 2}, {3, 3}));
  CHECK(rep.count == 2);
  CHECK(std::isnan(rep.r2));
  CHECK(std::isnan(rep.pearson_r));
  CHECK(rep.mae == doctest::Approx(1.5));
}

TEST_CASE("report and scatter files") {
  const auto dir = test::temp_dir("metrics");
  const auto rep = evaluate(pairs_of({2, 4, 6}, {1, 4, 8}));
  write_report_csv(rep, dir / "r.csv");
  std::ifstream in(dir / "r.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "count,mae,mse,rmse,r2,pearson_r,within_threshold,within_rate");
  CHECK(row.rfind("3,1,", 0) == 0);
  const std::vector<ScatterRow> rows = {{"a.png", 1.5, 2.0}};
  write_scatter_csv(rows, dir / "s.csv");
  std::ifstream sin(dir / "s.csv");
  std::getline(sin, header);
  std::getline(sin, row);
  CHECK(header == "id,predicted,observed");
  CHECK(row == "a.png,1.5,2");
}
