#include "lrp/certificates.hpp"

#include <algorithm>
#include <cmath>

#include "lrp/renorm.hpp"
#include "lrp/rng.hpp"

namespace lrp {

namespace {

const double kLn2 = std::log(2.0);
const double kLn100 = std::log(100.0);
const double kLn1000 = std::log(1000.0);

}  // namespace

void ConstantsSpec::validate() const {
  if (d < 1) throw std::invalid_argument("ConstantsSpec: d must be >= 1");
  if (!(2.0 * d < s_prime && s_prime < s)) {
    throw std::invalid_argument("ConstantsSpec: need 2d < s' < s");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("ConstantsSpec: beta must be > 0");
  if (!(lnM > 0.0)) throw std::invalid_argument("ConstantsSpec: lnM must be > 0");
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: requires x > 0");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Asymptotic series with Bernoulli terms through B_12; ~1e-15 for x >= 10.
  const double series =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * 691.0 / 32760)))));
  return acc + std::log(x) - 0.5 * inv - series;
}

double inverse_digamma(double target) {
  if (!(target > -0.6)) throw std::domain_error("inverse_digamma: target too small");
  if (target > 690.0) throw std::overflow_error("inverse_digamma: root exceeds double range");
  // Bisect in u = ln(x); digamma(e^u) is increasing in u.
  double u_lo = 0.0, u_hi = std::max(2.0, target + 2.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (u_lo + u_hi);
    (digamma(std::exp(mid)) < target ? u_lo : u_hi) = mid;
  }
  return std::exp(0.5 * (u_lo + u_hi));
}

double logsumexp2(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(a) && a < 0) return a;
  return a + std::log1p(std::exp(b - a));
}

namespace {

// ineq4 family: g(n) = (s-s')(lnM + lnGamma(n+1)) - 2s ln n, needed > 0.
double ineq4_value(const ConstantsSpec& c, double n) {
  return (c.s - c.s_prime) * (c.lnM + std::lgamma(n + 1.0)) - 2.0 * c.s * std::log(n);
}

double ineq4_derivative(const ConstantsSpec& c, double n) {
  return (c.s - c.s_prime) * digamma(n + 1.0) - 2.0 * c.s / n;
}

// ineq5 family: h(k) = s ln100 + ln beta + (2d-s') lnM + (4d-2s') lnGamma(k+1)
// + 30dk, needed < 0. Concave in k with a unique interior maximum.
double ineq5_value(const ConstantsSpec& c, double k) {
  return c.s * kLn100 + std::log(c.beta) + (2.0 * c.d - c.s_prime) * c.lnM +
         (4.0 * c.d - 2.0 * c.s_prime) * std::lgamma(k + 1.0) + 30.0 * c.d * k;
}

double ineq4_critical(const ConstantsSpec& c) {
  if (ineq4_derivative(c, 1.0) >= 0.0) return 1.0;
  double hi = 2.0;
  while (ineq4_derivative(c, hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw std::overflow_error("eq4 critical point out of range");
  }
  double lo = hi / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ineq4_derivative(c, mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ineq5_critical(const ConstantsSpec& c) {
  const double target = 30.0 * c.d / (2.0 * c.s_prime - 4.0 * c.d);
  const double x = inverse_digamma(target);  // solves psi(k+1) = target
  return std::max(1.0, x - 1.0);
}

}  // namespace

Certificate check_inequalities(const ConstantsSpec& spec, std::int64_t n_max, std::int64_t k_max) {
  spec.validate();
  if (n_max < 1 || k_max < 1) throw std::invalid_argument("check_inequalities: bounds must be >= 1");
  Certificate cert;
  cert.slack = kLogSlack;
  cert.lnM = spec.lnM;

  // ineq3: a single inequality in lnM.
  {
    const double lhs = spec.s * kLn100 + std::log(spec.beta) + (2.0 * spec.d - spec.s) * spec.lnM;
    const double rhs = -kLn1000 - spec.d * kLn2;
    cert.ineq3 = {rhs - lhs >= kLogSlack, rhs - lhs, 0.0};
  }

  // ineq4: minimize g over the integers and its real critical point.
  {
    std::vector<double> candidates;
    for (std::int64_t n = 1; n <= n_max; ++n) candidates.push_back(double(n));
    const double n_star = ineq4_critical(spec);
    candidates.push_back(std::max(1.0, std::floor(n_star)));
    candidates.push_back(std::ceil(n_star));
    double worst = std::numeric_limits<double>::infinity();
    double at = 1.0;
    for (double n : candidates) {
      const double v = ineq4_value(spec, n);
      if (v < worst) {
        worst = v;
        at = n;
      }
    }
    cert.ineq4 = {worst >= kLogSlack, worst, at};
  }

  // ineq5: maximize h over the integers and the digamma critical point;
  // h is concave so the integer maximum sits next to the real one.
  {
    std::vector<double> candidates;
    for (std::int64_t k = 1; k <= k_max; ++k) candidates.push_back(double(k));
    const double k_star = ineq5_critical(spec);
    candidates.push_back(std::max(1.0, std::floor(k_star)));
    candidates.push_back(std::ceil(k_star));
    double worst = std::numeric_limits<double>::infinity();
    double at = 1.0;
    for (double k : candidates) {
      const double margin = -ineq5_value(spec, k);
      if (margin < worst) {
        worst = margin;
        at = k;
      }
    }
    cert.ineq5 = {worst >= kLogSlack, worst, at};
  }
  return cert;
}

double find_min_lnM(int d, double s, double s_prime, double beta, std::int64_t k_max) {
  if (!(2.0 * d < s_prime && s_prime < s)) throw std::invalid_argument("find_min_lnM: need 2d < s' < s");
  if (!(beta > 0.0)) throw std::invalid_argument("find_min_lnM: beta must be > 0");
  auto passes = [&](double lnM) {
    ConstantsSpec c{d, s, s_prime, beta, lnM};
    return check_inequalities(c, std::max<std::int64_t>(k_max, 1), k_max).all_ok();
  };
  // ineq3 rearranged gives a necessary lower bound, which always fails by
  // having zero margin; bracket upward from there.
  const double necessary = (kLn1000 + d * kLn2 + s * kLn100 + std::log(beta)) / (s - 2.0 * d);
  double lo = std::max(necessary, 1e-6);
  double hi = std::max(2.0 * lo, lo + 1.0);
  int guard = 0;
  while (!passes(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 1000 || hi > 1e300) {
      throw std::runtime_error("find_min_lnM: no passing lnM found in bracket [" +
                               std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-6 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

RecursionTable iterate_recursion(int d, std::int64_t k_max) {
  if (d < 1) throw std::invalid_argument("iterate_recursion: d must be >= 1");
  if (k_max < 1) throw std::invalid_argument("iterate_recursion: k_max must be >= 1");
  RecursionTable table;
  table.d = d;
  table.inductive_ok = true;
  double ln_p = -d * kLn2 - kLn1000;  // P_0 = 2^-d / 1000
  double sum = std::exp(ln_p);
  auto bound_at = [&](std::int64_t k) { return -d * kLn2 - 4.0 * d * std::log(double(k + 1)) - 2.0 * double(k); };
  table.rows.push_back({0, ln_p, bound_at(0), ln_p < bound_at(0) - kLogSlack});
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const double squared = d * kLn2 + 4.0 * d * std::log(double(k)) + 2.0 * ln_p;
    ln_p = logsumexp2(-30.0 * d * double(k), squared);
    const double bound = bound_at(k);
    const bool ok = ln_p < bound - kLogSlack;
    table.rows.push_back({k, ln_p, bound, ok});
    table.inductive_ok = table.inductive_ok && ok;
    sum += std::exp(ln_p);
  }
  table.inductive_ok = table.inductive_ok && table.rows.front().ok;
  table.sum_pk = sum;
  return table;
}

double exact_p0(const Params& params, Coord M) {
  params.validate();
  if (M < 1) throw std::invalid_argument("exact_p0: M must be >= 1");
  const int d = params.d;
  double log_none = 0.0;  // ln P(no long edge in the block)
  Point k(d, -(M - 1));
  while (true) {
    int nz = 0;
    while (nz < d && k[nz] == 0) ++nz;
    if (nz < d && k[nz] > 0 && compare_norm_to_fraction(k, params.norm, M, 100) > 0) {
      double count = 1.0;
      for (int i = 0; i < d; ++i) count *= double(M - std::abs(k[i]));
      const double p = connection_probability(params, k);
      if (p >= 1.0) return 1.0;
      if (p > 0.0) log_none += count * std::log1p(-p);
    }
    int axis = d - 1;
    while (axis >= 0 && ++k[axis] > M - 1) k[axis--] = -(M - 1);
    if (axis < 0) break;
  }
  return -std::expm1(log_none);
}

P0Estimate empirical_p0(const Params& params, Coord M, std::int64_t trials, std::uint64_t seed,
                        const SampleOptions& options) {
  params.validate();
  if (trials < 1) throw std::invalid_argument("empirical_p0: trials must be >= 1");
  if (params.boundary != Boundary::free) {
    throw std::invalid_argument("empirical_p0: block statistics use the free boundary");
  }
  P0Estimate est;
  est.trials = trials;
  est.exact = exact_p0(params, M);
  const Box box = make_box(Point(params.d, 0), M);
  const BlockHierarchy hier(M);
  const Block block{0, Point(params.d, 0)};
  for (std::int64_t t = 0; t < trials; ++t) {
    const Configuration config =
        sample_configuration(params, box, 0, derive_seed(seed, std::uint64_t(t)),
                             SamplerBackend::skip, options);
    BlockClassifier cls(config, hier);
    if (!cls.classify(block).good()) ++est.bad;
  }
  est.empirical = double(est.bad) / double(trials);
  return est;
}

nlohmann::json certificate_to_json(const Certificate& c, const ConstantsSpec& spec) {
  auto ineq = [](const InequalityResult& r) {
    return nlohmann::json{{"ok", r.ok}, {"log_margin", r.log_margin}, {"witness", r.witness}};
  };
  return nlohmann::json{{"d", spec.d},
                        {"s", spec.s},
                        {"s_prime", spec.s_prime},
                        {"beta", spec.beta},
                        {"lnM", c.lnM},
                        {"slack", c.slack},
                        {"ineq3", ineq(c.ineq3)},
                        {"ineq4", ineq(c.ineq4)},
                        {"ineq5", ineq(c.ineq5)},
                        {"all_ok", c.all_ok()}};
}

}  // namespace lrp
