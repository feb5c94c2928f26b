// Log-space verification of the constant inequalities the renormalization
// needs, the good-block probability recursion, and the exact level-0 check.
// M enters only through lnM here: the inequalities push M far beyond any
// native integer, while the simulation modules use separate small scales.
#pragma once

#include <cstdint>
#include <vector>

#include "lrp/sampler.hpp"

namespace lrp {

struct ConstantsSpec {
  int d = 1;
  double s = 3.0;
  double s_prime = 2.5;
  double beta = 1.0;
  double lnM = 1.0;

  void validate() const;  // requires 2d < s' < s, beta > 0, lnM > 0
};

struct InequalityResult {
  bool ok = false;
  double log_margin = 0.0;  // inequality slack in log space; >= 0 passes
  double witness = 0.0;     // the minimizing n or k
};

struct Certificate {
  InequalityResult ineq3, ineq4, ineq5;
  double slack = 0.0;
  double lnM = 0.0;

  bool all_ok() const { return ineq3.ok && ineq4.ok && ineq5.ok; }
};

nlohmann::json certificate_to_json(const Certificate& c, const ConstantsSpec& spec);

/// Log-space comparison slack applied to every certificate decision.
inline constexpr double kLogSlack = 1e-9;

/// Checks the three defining inequalities of the base scale at every integer
/// up to the bounds and at the analytic extremum of the two n/k-indexed
/// families (critical points located through the digamma function).
Certificate check_inequalities(const ConstantsSpec& spec, std::int64_t n_max, std::int64_t k_max);

/// Smallest lnM passing check_inequalities, by bisection to 6 significant
/// figures. Margins are monotone in lnM, which makes the bracketing sound.
double find_min_lnM(int d, double s, double s_prime, double beta, std::int64_t k_max);

struct RecursionRow {
  std::int64_t k = 0;
  double ln_pk = 0.0;       // iterated upper bound on ln P_k
  double ln_bound = 0.0;    // inductive target: -d ln2 - 4d ln(k+1) - 2k
  bool ok = false;
};

struct RecursionTable {
  int d = 1;
  std::vector<RecursionRow> rows;  // k = 0 .. k_max
  bool inductive_ok = false;
  double sum_pk = 0.0;  // Borel-Cantelli summability check
};

/// ln P_0 = ln(2^-d/1000), then ln P_k = logsumexp(-30dk, d ln2 + 4d ln k +
/// 2 ln P_{k-1}), verified against the inductive bound at every step.
RecursionTable iterate_recursion(int d, std::int64_t k_max);

struct P0Estimate {
  double empirical = 0.0;
  double exact = 0.0;
  std::int64_t trials = 0;
  std::int64_t bad = 0;
};

/// Empirical bad fraction of level-0 blocks [0,M)^d against the closed-form
/// product over in-block pairs longer than M/100, evaluated in log space.
P0Estimate empirical_p0(const Params& params, Coord M, std::int64_t trials, std::uint64_t seed,
                        const SampleOptions& options = {});

double exact_p0(const Params& params, Coord M);

double digamma(double x);
double inverse_digamma(double target);  // solves digamma(x) = target, x >= 1
double logsumexp2(double a, double b);

}  // namespace lrp
