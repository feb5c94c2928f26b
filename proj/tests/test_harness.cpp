#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lrp/harness.hpp"
#include "oracles.hpp"

using namespace lrp;

namespace {

ExperimentPlan basic_plan(double s, double beta, bool force_nn) {
  ExperimentPlan plan;
  plan.params = Params{1, s, beta, Norm::euclidean, Boundary::free, force_nn};
  plan.distances = {8, 16, 32, 64};
  plan.direction = {1.0};
  plan.trials = 20;
  plan.seed = 42;
  return plan;
}

}  // namespace

TEST_CASE("plan validation rejects malformed inputs") {
  auto plan = basic_plan(3.0, 1.0, true);
  CHECK_NOTHROW(plan.validate());
  auto p1 = plan;
  p1.distances = {16, 8};
  CHECK_THROWS_AS(p1.validate(), std::invalid_argument);
  auto p2 = plan;
  p2.distances = {8, 8};
  CHECK_THROWS_AS(p2.validate(), std::invalid_argument);
  auto p3 = plan;
  p3.direction = {0.5};
  CHECK_THROWS_AS(p3.validate(), std::invalid_argument);
  auto p4 = plan;
  p4.trials = 0;
  CHECK_THROWS_AS(p4.validate(), std::invalid_argument);
  auto p5 = plan;
  p5.direction = {1.0, 0.0};
  CHECK_THROWS_AS(p5.validate(), std::invalid_argument);
}

TEST_CASE("targets round toward the nearest lattice point") {
  ExperimentPlan plan;
  plan.params.d = 2;
  plan.direction = {0.6, 0.8};
  CHECK(plan.target(5) == Point{3, 4});
  CHECK(plan.target(10) == Point{6, 8});
  plan.direction = {1.0, 0.0};
  CHECK(plan.target(7) == Point{7, 0});
}

TEST_CASE("nearest-neighbour only: ratio is identically one") {
  const auto result = run_ratio_experiment(basic_plan(3.0, 0.0, true));
  REQUIRE(result.records.size() == 4);
  for (const auto& rec : result.records) {
    CHECK(rec.n_finite == 20);
    CHECK(rec.n_unreachable == 0);
    CHECK(rec.d_mean == rec.x_norm);
    CHECK(rec.d_median == rec.x_norm);
    CHECK(rec.d_q05 == rec.x_norm);
    CHECK(rec.d_q95 == rec.x_norm);
    CHECK(rec.ratio_mean == 1.0);
    CHECK(rec.ratio_q95 == 1.0);
  }
}

TEST_CASE("forced nn bonds bound the distance by the l1 norm of the target") {
  auto plan = basic_plan(2.0, 1.0, true);
  const auto result = run_ratio_experiment(plan);
  for (size_t i = 0; i < result.records.size(); ++i) {
    const auto& rec = result.records[i];
    CHECK(rec.n_unreachable == 0);
    CHECK(rec.d_q95 <= double(l1_norm(plan.target(plan.distances[i]))));
    CHECK(rec.ratio_q05 > 0.0);
  }
}

TEST_CASE("identical plans produce byte-identical CSV") {
  const auto a = result_to_csv(run_ratio_experiment(basic_plan(2.5, 0.8, true)));
  const auto b = result_to_csv(run_ratio_experiment(basic_plan(2.5, 0.8, true)));
  CHECK(a == b);
  const auto c = result_to_csv(run_ratio_experiment([] {
    auto p = basic_plan(2.5, 0.8, true);
    p.seed += 1;
    return p;
  }()));
  CHECK(a != c);
}

TEST_CASE("csv layout: fixed header, integer counts, 9 significant digits") {
  const auto result = run_ratio_experiment(basic_plan(3.0, 0.0, true));
  const auto csv = result_to_csv(result);
  CHECK(csv.rfind("x_norm,n_finite,n_unreachable,d_mean,d_median,d_q05,d_q95,"
                  "ratio_mean,ratio_median,ratio_q05,ratio_q95\n", 0) == 0);
  // 4 records + header, trailing newline.
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 5);
  CHECK(csv.find("\n8,20,0,8,8,8,8,1,1,1,1\n") != std::string::npos);
}

TEST_CASE("quantiles are type-1 lower order statistics") {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(double(i));
  CHECK(quantile_type1(v, 0.05) == 5.0);
  CHECK(quantile_type1(v, 0.5) == 50.0);
  CHECK(quantile_type1(v, 0.95) == 95.0);
  CHECK(quantile_type1(v, 1.0) == 100.0);
  std::vector<double> odd{1.0, 2.0, 3.0};
  CHECK(quantile_type1(odd, 0.5) == 2.0);
  CHECK(quantile_type1(odd, 0.34) == 2.0);
  CHECK(quantile_type1(odd, 0.33) == 1.0);
}

TEST_CASE("regime fits recover synthetic laws") {
  ExperimentResult synthetic;
  synthetic.plan = basic_plan(3.0, 1.0, true);
  auto add = [&](double x, double median) {
    DistanceRecord rec;
    rec.x_norm = x;
    rec.n_finite = 10;
    rec.d_median = median;
    synthetic.records.push_back(rec);
  };
  SUBCASE("linear law fits with slope one and zero residual") {
    for (double x : {512.0, 1024.0, 2048.0, 4096.0, 8192.0}) add(x, x);
    const auto diag = regime_diagnostics(synthetic, RegimeHint::above_2d);
    CHECK(diag.coefficients[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(diag.coefficients[1] == doctest::Approx(0.0).epsilon(1e-6));
    for (double r : diag.residuals) CHECK(std::abs(r) < 1e-6);
    CHECK(diag.r_squared == doctest::Approx(1.0));
  }
  SUBCASE("polylog law recovers the exponent") {
    for (double x : {512.0, 1024.0, 2048.0, 4096.0, 8192.0}) {
      add(x, std::pow(std::log(x), 2.0));
    }
    const auto diag = regime_diagnostics(synthetic, RegimeHint::between_d_2d);
    CHECK(diag.coefficients[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(diag.r_squared > 1.0 - 1e-12);
  }
  SUBCASE("constant law reports the level") {
    for (double x : {512.0, 1024.0, 2048.0, 4096.0}) add(x, 2.0);
    const auto diag = regime_diagnostics(synthetic, RegimeHint::below_d);
    CHECK(diag.coefficients[0] == doctest::Approx(2.0));
    for (double r : diag.residuals) CHECK(r == 0.0);
    CHECK(diag.r_squared == 1.0);
  }
  SUBCASE("log over loglog fit returns finite parameters") {
    for (double x : {512.0, 1024.0, 2048.0, 4096.0}) {
      add(x, std::log(x) / std::log(std::log(x)));
    }
    const auto diag = regime_diagnostics(synthetic, RegimeHint::at_d);
    CHECK(diag.coefficients[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(diag.r_squared == doctest::Approx(1.0));
  }
  SUBCASE("too few records is an error") {
    for (double x : {512.0, 1024.0, 2048.0}) add(x, x);
    CHECK_THROWS_AS(regime_diagnostics(synthetic, RegimeHint::above_2d), std::invalid_argument);
  }
}

TEST_CASE("two-dimensional experiment runs along a tilted direction") {
  ExperimentPlan plan;
  plan.params = Params{2, 5.0, 1.0, Norm::euclidean, Boundary::free, true};
  plan.distances = {5, 10, 20, 40};
  plan.direction = {0.6, 0.8};
  plan.trials = 8;
  plan.seed = 12;
  const auto result = run_ratio_experiment(plan);
  REQUIRE(result.records.size() == 4);
  for (size_t i = 0; i < result.records.size(); ++i) {
    const auto& rec = result.records[i];
    CHECK(rec.n_unreachable == 0);
    CHECK(rec.n_finite == 8);
    // Forced nn bonds give the l1 upper bound; the ratio can exceed 1 in d=2.
    CHECK(rec.d_q95 <= double(l1_norm(plan.target(plan.distances[i]))));
    CHECK(rec.ratio_q05 > 0.0);
  }
  CHECK(result_to_csv(result) == result_to_csv(run_ratio_experiment(plan)));
}

TEST_CASE("budget refusal precedes sampling") {
  auto plan = basic_plan(3.0, 1.0, true);
  SampleOptions opts;
  opts.max_edges = 5;
  CHECK_THROWS_AS(run_ratio_experiment(plan, opts), BudgetError);
}

TEST_CASE("block goodness table: zero at beta 0 and exact match at level 0") {
  const Params empty{1, 3.0, 0.0, Norm::euclidean, Boundary::free, false};
  const auto rows = estimate_block_goodness(empty, 20, 1, 25, 7);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.bad == 0);
    CHECK(row.p_hat == 0.0);
  }
  REQUIRE(rows[0].exact.has_value());
  CHECK(*rows[0].exact == 0.0);

  const Params params{1, 3.0, 0.1, Norm::euclidean, Boundary::free, false};
  const auto est = estimate_block_goodness(params, 100, 0, 1500, 20260810);
  REQUIRE(est.size() == 1);
  REQUIRE(est[0].exact.has_value());
  const double se = std::sqrt(*est[0].exact * (1 - *est[0].exact) / 1500.0);
  CHECK(std::abs(est[0].p_hat - *est[0].exact) < 4.0 * se);
}

TEST_CASE("block goodness is monotone in beta up to noise") {
  const Params lo{1, 3.0, 0.05, Norm::euclidean, Boundary::free, false};
  const Params hi{1, 3.0, 0.2, Norm::euclidean, Boundary::free, false};
  const auto a = estimate_block_goodness(lo, 100, 0, 3000, 5);
  const auto b = estimate_block_goodness(hi, 100, 0, 3000, 5);
  CHECK(a[0].p_hat <= b[0].p_hat + 2.0 * (a[0].std_error + b[0].std_error));
}

TEST_CASE("goodness csv has one row per level") {
  const Params params{1, 3.0, 0.02, Norm::euclidean, Boundary::free, false};
  const auto rows = estimate_block_goodness(params, 20, 1, 10, 3);
  const auto csv = goodness_to_csv(rows);
  CHECK(csv.rfind("level,trials,bad,p_hat,std_error,exact\n", 0) == 0);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 3);
}
