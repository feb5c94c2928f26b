#include "lrp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "lrp/metric.hpp"
#include "lrp/renorm.hpp"
#include "lrp/rng.hpp"

namespace lrp {

void ExperimentPlan::validate() const {
  params.validate();
  if (trials < 1) throw std::invalid_argument("ExperimentPlan: trials must be >= 1");
  if (distances.empty()) throw std::invalid_argument("ExperimentPlan: no distances");
  for (size_t i = 0; i < distances.size(); ++i) {
    if (distances[i] < 1) throw std::invalid_argument("ExperimentPlan: distances must be >= 1");
    if (i > 0 && distances[i] <= distances[i - 1]) {
      throw std::invalid_argument("ExperimentPlan: distances must be strictly ascending");
    }
  }
  if (static_cast<int>(direction.size()) != params.d) {
    throw std::invalid_argument("ExperimentPlan: direction dimension mismatch");
  }
  double sq = 0;
  for (double v : direction) sq += v * v;
  if (std::abs(std::sqrt(sq) - 1.0) > 1e-12) {
    throw std::invalid_argument("ExperimentPlan: direction must be a unit vector");
  }
  if (margin < 2) throw std::invalid_argument("ExperimentPlan: margin must be >= 2");
}

Box ExperimentPlan::box() const {
  const Coord side = 2 * distances.back() + margin;
  return make_box(Point(params.d, -(side / 2)), side);
}

Point ExperimentPlan::target(Coord n) const {
  Point t(params.d);
  for (int i = 0; i < params.d; ++i) t[i] = std::llround(double(n) * direction[i]);
  return t;
}

double quantile_type1(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = sorted.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(p * double(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

namespace {

DistanceRecord summarize(double x_norm, std::vector<double> finite, std::int64_t unreachable) {
  DistanceRecord rec;
  rec.x_norm = x_norm;
  rec.n_finite = static_cast<std::int64_t>(finite.size());
  rec.n_unreachable = unreachable;
  std::sort(finite.begin(), finite.end());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (finite.empty()) {
    rec.d_mean = rec.d_median = rec.d_q05 = rec.d_q95 = nan;
    rec.ratio_mean = rec.ratio_median = rec.ratio_q05 = rec.ratio_q95 = nan;
    return rec;
  }
  double sum = 0;
  for (double v : finite) sum += v;
  rec.d_mean = sum / double(finite.size());
  rec.d_median = quantile_type1(finite, 0.5);
  rec.d_q05 = quantile_type1(finite, 0.05);
  rec.d_q95 = quantile_type1(finite, 0.95);
  rec.ratio_mean = rec.d_mean / x_norm;
  rec.ratio_median = rec.d_median / x_norm;
  rec.ratio_q05 = rec.d_q05 / x_norm;
  rec.ratio_q95 = rec.d_q95 / x_norm;
  return rec;
}

}  // namespace

ExperimentResult run_ratio_experiment(const ExperimentPlan& plan, const SampleOptions& options) {
  plan.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Box box = plan.box();
  const Rect brect = rect_of(box);
  for (Coord n : plan.distances) {
    if (!brect.contains(plan.target(n))) {
      throw std::invalid_argument("run_ratio_experiment: target outside the box; increase margin");
    }
  }
  const double estimate = expected_edge_count(plan.params, box, 0);
  if (estimate > double(options.max_edges)) throw BudgetError(estimate, options.max_edges);

  std::vector<std::vector<double>> finite(plan.distances.size());
  std::vector<std::int64_t> unreachable(plan.distances.size(), 0);
  const Point origin(plan.params.d, 0);

  for (std::int64_t trial = 0; trial < plan.trials; ++trial) {
    const Configuration config = sample_configuration(
        plan.params, box, 0, derive_seed(plan.seed, std::uint64_t(trial)), SamplerBackend::skip,
        options);
    const Graph graph(config);
    const auto dist = graph.bfs_distances(config.id_of(origin));
    for (size_t i = 0; i < plan.distances.size(); ++i) {
      const auto d = dist[static_cast<size_t>(config.id_of(plan.target(plan.distances[i])))];
      if (d >= 0) {
        finite[i].push_back(double(d));
      } else {
        ++unreachable[i];
      }
    }
  }

  ExperimentResult result;
  result.plan = plan;
  for (size_t i = 0; i < plan.distances.size(); ++i) {
    // ||n v|| = n for a unit direction.
    result.records.push_back(summarize(double(plan.distances[i]), std::move(finite[i]), unreachable[i]));
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

namespace {

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string result_to_csv(const ExperimentResult& result) {
  std::string out =
      "x_norm,n_finite,n_unreachable,d_mean,d_median,d_q05,d_q95,"
      "ratio_mean,ratio_median,ratio_q05,ratio_q95\n";
  for (const DistanceRecord& r : result.records) {
    out += fmt9(r.x_norm);
    out += ',' + std::to_string(r.n_finite) + ',' + std::to_string(r.n_unreachable);
    for (double v : {r.d_mean, r.d_median, r.d_q05, r.d_q95, r.ratio_mean, r.ratio_median,
                     r.ratio_q05, r.ratio_q95}) {
      out += ',';
      out += fmt9(v);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json result_metadata(const ExperimentResult& result) {
  const ExperimentPlan& p = result.plan;
  return nlohmann::json{{"params", params_to_json(p.params)},
                        {"distances", p.distances},
                        {"direction", p.direction},
                        {"trials", p.trials},
                        {"seed", p.seed},
                        {"margin", p.margin},
                        {"box_side", p.box().side},
                        {"wall_seconds", result.wall_seconds}};
}

RegimeHint regime_hint_from_string(const std::string& s) {
  if (s == "below_d") return RegimeHint::below_d;
  if (s == "at_d") return RegimeHint::at_d;
  if (s == "between") return RegimeHint::between_d_2d;
  if (s == "above_2d") return RegimeHint::above_2d;
  throw std::invalid_argument("unknown regime hint: " + s);
}

std::string to_string(RegimeHint h) {
  switch (h) {
    case RegimeHint::below_d: return "below_d";
    case RegimeHint::at_d: return "at_d";
    case RegimeHint::between_d_2d: return "between";
    case RegimeHint::above_2d: return "above_2d";
  }
  throw std::logic_error("bad regime hint");
}

namespace {

struct LinearFit {
  double slope = 0.0, intercept = 0.0, r_squared = 0.0;
  std::vector<double> residuals;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.slope * x[i] + fit.intercept;
    fit.residuals.push_back(y[i] - pred);
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  fit.r_squared = ss_tot > 1e-24 ? 1.0 - ss_res / ss_tot : (ss_res < 1e-24 ? 1.0 : 0.0);
  return fit;
}

}  // namespace

RegimeDiagnostics regime_diagnostics(const ExperimentResult& result, RegimeHint hint) {
  std::vector<double> xs, medians;
  for (const DistanceRecord& r : result.records) {
    if (r.n_finite > 0 && std::isfinite(r.d_median)) {
      xs.push_back(r.x_norm);
      medians.push_back(r.d_median);
    }
  }
  if (xs.size() < 4) {
    throw std::invalid_argument("regime_diagnostics: need at least 4 distances with finite medians");
  }
  RegimeDiagnostics diag;
  diag.hint = hint;
  switch (hint) {
    case RegimeHint::below_d: {
      double mean = 0;
      for (double m : medians) mean += m;
      mean /= double(medians.size());
      double ss_res = 0;
      for (double m : medians) {
        diag.residuals.push_back(m - mean);
        ss_res += (m - mean) * (m - mean);
      }
      diag.coefficients = {mean};
      diag.r_squared = ss_res < 1e-24 ? 1.0 : 0.0;
      return diag;
    }
    case RegimeHint::at_d: {
      std::vector<double> t;
      for (double x : xs) t.push_back(std::log(x) / std::log(std::log(x)));
      const LinearFit fit = fit_line(t, medians);
      diag.coefficients = {fit.slope, fit.intercept};
      diag.r_squared = fit.r_squared;
      diag.residuals = fit.residuals;
      return diag;
    }
    case RegimeHint::between_d_2d: {
      std::vector<double> t, y;
      for (size_t i = 0; i < xs.size(); ++i) {
        if (!(medians[i] > 0.0)) {
          throw std::invalid_argument("regime_diagnostics: nonpositive median in polylog fit");
        }
        t.push_back(std::log(std::log(xs[i])));
        y.push_back(std::log(medians[i]));
      }
      const LinearFit fit = fit_line(t, y);
      diag.coefficients = {fit.slope, fit.intercept};  // slope = fitted exponent
      diag.r_squared = fit.r_squared;
      diag.residuals = fit.residuals;
      return diag;
    }
    case RegimeHint::above_2d: {
      const LinearFit fit = fit_line(xs, medians);
      diag.coefficients = {fit.slope, fit.intercept};
      diag.r_squared = fit.r_squared;
      diag.residuals = fit.residuals;
      return diag;
    }
  }
  throw std::logic_error("bad regime hint");
}

std::vector<GoodnessRow> estimate_block_goodness(const Params& params, Coord M, int level,
                                                 std::int64_t trials, std::uint64_t seed,
                                                 const SampleOptions& options) {
  params.validate();
  if (level < 0) throw std::invalid_argument("estimate_block_goodness: negative level");
  if (trials < 1) throw std::invalid_argument("estimate_block_goodness: trials must be >= 1");
  const BlockHierarchy hier(M);
  if (level > hier.levels()) {
    throw std::invalid_argument("estimate_block_goodness: level not representable for this M");
  }
  std::vector<GoodnessRow> rows;
  for (int k = 0; k <= level; ++k) {
    const Coord side = hier.block_side(k);
    Coord margin = 0;
    for (int i = 0; i < k; ++i) margin += hier.half_side(i);
    const Box box = make_box(Point(params.d, 0), side);
    const double est = expected_edge_count(params, box, margin);
    if (est > double(options.max_edges)) throw BudgetError(est, options.max_edges);
    GoodnessRow row;
    row.level = k;
    row.trials = trials;
    const Block block{k, Point(params.d, 0)};
    for (std::int64_t t = 0; t < trials; ++t) {
      const std::uint64_t trial_seed = derive_seed(derive_seed(seed, std::uint64_t(k)), std::uint64_t(t));
      const Configuration config =
          sample_configuration(params, box, margin, trial_seed, SamplerBackend::skip, options);
      BlockClassifier cls(config, hier);
      if (!cls.classify(block).good()) ++row.bad;
    }
    row.p_hat = double(row.bad) / double(trials);
    row.std_error = std::sqrt(std::max(row.p_hat * (1.0 - row.p_hat), 0.0) / double(trials));
    if (k == 0) row.exact = exact_p0(params, M);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string goodness_to_csv(const std::vector<GoodnessRow>& rows) {
  std::string out = "level,trials,bad,p_hat,std_error,exact\n";
  for (const GoodnessRow& r : rows) {
    out += std::to_string(r.level) + ',' + std::to_string(r.trials) + ',' + std::to_string(r.bad);
    out += ',' + fmt9(r.p_hat) + ',' + fmt9(r.std_error) + ',';
    out += r.exact ? fmt9(*r.exact) : std::string("");
    out += '\n';
  }
  return out;
}

}  // namespace lrp
