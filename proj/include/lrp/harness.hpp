// Monte Carlo experiments: chemical distance along a direction at a ladder of
// scales, regime fits, and empirical block-goodness tables.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrp/certificates.hpp"
#include "lrp/sampler.hpp"

namespace lrp {

struct ExperimentPlan {
  Params params;
  std::vector<Coord> distances;   // strictly ascending
  std::vector<double> direction;  // unit vector, d entries
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  Coord margin = 16;  // box side = 2 * max distance + margin, origin centered

  void validate() const;
  Box box() const;
  Point target(Coord n) const;  // [n * direction], nearest lattice point
};

struct DistanceRecord {
  double x_norm = 0.0;
  std::int64_t n_finite = 0;
  std::int64_t n_unreachable = 0;
  double d_mean = 0.0, d_median = 0.0, d_q05 = 0.0, d_q95 = 0.0;
  double ratio_mean = 0.0, ratio_median = 0.0, ratio_q05 = 0.0, ratio_q95 = 0.0;
};

struct ExperimentResult {
  ExperimentPlan plan;
  std::vector<DistanceRecord> records;
  double wall_seconds = 0.0;  // metadata only; never part of the CSV
};

/// One fresh configuration per trial (seed derived from plan.seed and the
/// trial index), a single BFS from the origin serving every planned distance.
ExperimentResult run_ratio_experiment(const ExperimentPlan& plan, const SampleOptions& options = {});

/// Header plus one row per distance, floats at 9 significant digits; byte
/// stable for identical plans.
std::string result_to_csv(const ExperimentResult& result);

nlohmann::json result_metadata(const ExperimentResult& result);

/// Type-1 (lower) quantile of a sorted sample.
double quantile_type1(const std::vector<double>& sorted, double p);

enum class RegimeHint { below_d, at_d, between_d_2d, above_2d };

RegimeHint regime_hint_from_string(const std::string& s);
std::string to_string(RegimeHint h);

struct RegimeDiagnostics {
  RegimeHint hint{};
  std::vector<double> coefficients;  // fitted parameters of the regime's form
  double r_squared = 0.0;
  std::vector<double> residuals;
};

/// Least-squares fit of median D against the hinted regime's functional form:
/// constant (s<d), log x / loglog x (s=d), log D linear in loglog x (d<s<2d),
/// linear in x (s>2d). Descriptive only.
RegimeDiagnostics regime_diagnostics(const ExperimentResult& result, RegimeHint hint);

struct GoodnessRow {
  int level = 0;
  std::int64_t trials = 0;
  std::int64_t bad = 0;
  double p_hat = 0.0;
  double std_error = 0.0;
  std::optional<double> exact;  // closed form, level 0 only
};

/// Empirical bad-block frequency for levels 0..level, each trial sampling a
/// fresh block-sized box with the halo classification needs.
std::vector<GoodnessRow> estimate_block_goodness(const Params& params, Coord M, int level,
                                                 std::int64_t trials, std::uint64_t seed,
                                                 const SampleOptions& options = {});

std::string goodness_to_csv(const std::vector<GoodnessRow>& rows);

}  // namespace lrp
