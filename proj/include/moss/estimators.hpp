#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "moss/error.hpp"
#include "moss/method.hpp"
#include "moss/motif_catalog.hpp"
#include "moss/samplers.hpp"
#include "moss/weight_index.hpp"

namespace moss {

using Matrix = std::vector<std::vector<double>>;

/// Global constants of a graph, as recorded in every report.
struct GraphConstants {
  std::uint64_t gamma = 0;
  std::uint64_t gamma_check = 0;
  std::uint64_t gamma1 = 0;
  std::uint64_t gamma2 = 0;
  std::uint64_t lambda3 = 0;
  std::uint64_t lambda4 = 0;

  static GraphConstants of(const WeightIndex& index) {
    return {index.gamma(), index.gamma_check(), index.gamma1(), index.gamma2(), index.lambda3(), index.lambda4()};
  }
};

/// Frequency estimates with analytic (co)variances. Vectors are indexed by
/// motif ID with entry 0 unused; `ids` lists the motifs the report covers.
struct EstimateReport {
  std::string method;
  int motif_size = 4;
  std::vector<int> ids;
  std::vector<double> estimate;
  Matrix covariance;
  GraphConstants constants;
  std::vector<std::uint64_t> budgets;
  // Two-source (T-5 + Path-5) reports only.
  std::vector<double> estimate1, estimate2, lambda1, lambda2;

  double variance(int id) const { return covariance[idx(id)][idx(id)]; }
  double cov(int i, int j) const { return covariance[idx(i)][idx(j)]; }
  double value(int id) const { return estimate[idx(id)]; }

 private:
  static std::size_t idx(int id) { return static_cast<std::size_t>(id); }
};

namespace detail {

inline Matrix zero_matrix(int count) {
  return Matrix(static_cast<std::size_t>(count) + 1, std::vector<double>(static_cast<std::size_t>(count) + 1, 0.0));
}

inline std::size_t at(int id) { return static_cast<std::size_t>(id); }

/// n (1/p - n) / K with the plug-in guard: a negative bracket drops the
/// subtracted term.
inline double variance_term(double n, double p, double budget) {
  if (n == 0.0 || p == 0.0) return 0.0;
  double bracket = 1.0 / p - n;
  if (bracket < 0.0) bracket = 1.0 / p;
  return n * bracket / budget;
}

/// Adds motif `derived` = constant + sum_j coef[j] * motif_j to a covariance
/// matrix over the base motifs.
inline void add_linear_motif(Matrix& c, int derived, const std::vector<std::pair<int, double>>& coef) {
  const std::size_t d = at(derived);
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (j == d) continue;
    double s = 0.0;
    for (const auto& [k, a] : coef) s += a * c[at(k)][j];
    c[d][j] = c[j][d] = s;
  }
  double var = 0.0;
  for (const auto& [k, a] : coef) var += a * c[d][at(k)];
  c[d][d] = std::max(var, 0.0);
}

inline void check_tally(const Tally& t, Method m) {
  if (t.method != m) throw ConfigError(std::string("expected a ") + to_string(m) + " tally");
  if (t.budget == 0) throw ConfigError("tally has zero budget");
}

}  // namespace detail

/// Per-trial probability p_i of sampling one fixed CIS of class i, indexed
/// by motif ID; zero for classes the method cannot estimate directly.
inline std::vector<double> inclusion_probabilities(Method m, const WeightIndex& index) {
  const auto& cat = catalog();
  std::vector<double> p(static_cast<std::size_t>(motif_count(m)) + 1, 0.0);
  switch (m) {
    case Method::kMoss4:
      if (index.gamma() == 0) break;
      for (int i = 1; i <= kMotifs4; ++i)
        p[detail::at(i)] = 2.0 * cat.phi4(1, i) / static_cast<double>(index.gamma());
      break;
    case Method::kMoss4Min:
      if (index.gamma_check() == 0) break;
      p[3] = 2.0 / static_cast<double>(index.gamma_check());
      p[5] = 2.0 / static_cast<double>(index.gamma_check());
      p[6] = 6.0 / static_cast<double>(index.gamma_check());
      break;
    case Method::kT5:
      if (index.gamma1() == 0) break;
      for (int i = 1; i <= kMotifs5; ++i)
        p[detail::at(i)] = 2.0 * cat.phi5(1, i) / static_cast<double>(index.gamma1());
      break;
    case Method::kPath5:
      if (index.gamma2() == 0) break;
      for (int i = 1; i <= kMotifs5; ++i)
        p[detail::at(i)] = 2.0 * cat.phi5(2, i) / static_cast<double>(index.gamma2());
      break;
  }
  return p;
}

/// IDs estimated directly from hits (p_i > 0 by the coefficient tables).
inline std::vector<int> direct_motifs(Method m) {
  switch (m) {
    case Method::kMoss4: return {1, 3, 4, 5, 6};
    case Method::kMoss4Min: return {3, 5, 6};
    case Method::kT5: return catalog().omega(1);
    case Method::kPath5: return catalog().omega(2);
  }
  return {};
}

/// Covariance of single-source estimators m_i / (K p_i): diagonal
/// n_i (1/p_i - n_i) / K, off-diagonal -n_i n_j / K. `n` holds either the
/// true counts or plug-in estimates.
inline Matrix single_source_covariance(Method m, const std::vector<double>& p, const std::vector<double>& n,
                                       double budget) {
  Matrix c = detail::zero_matrix(motif_count(m));
  const auto ids = direct_motifs(m);
  for (const int i : ids)
    for (const int j : ids)
      c[detail::at(i)][detail::at(j)] = i == j ? detail::variance_term(n[detail::at(i)], p[detail::at(i)], budget)
                                               : -n[detail::at(i)] * n[detail::at(j)] / budget;
  return c;
}

/// Coefficients of the 3-star identity: n_2 = Lambda_3 - n_4 - 2 n_5 - 4 n_6.
inline std::vector<std::pair<int, double>> star3_coefficients() { return {{4, -1.0}, {5, -2.0}, {6, -4.0}}; }

/// Coefficients of the 4-star identity over Omega_3*.
inline std::vector<std::pair<int, double>> star4_coefficients() {
  std::vector<std::pair<int, double>> out;
  for (const int i : catalog().omega3_star()) out.emplace_back(i, -static_cast<double>(catalog().phi5(3, i)));
  return out;
}

/// Analytic covariance of the MOSS-4 estimators (including the derived n_2)
/// for true counts `n` indexed by ID.
inline Matrix moss4_covariance(const WeightIndex& index, std::uint64_t budget, const std::vector<double>& n) {
  Matrix c = single_source_covariance(Method::kMoss4, inclusion_probabilities(Method::kMoss4, index), n,
                                      static_cast<double>(budget));
  detail::add_linear_motif(c, 2, star3_coefficients());
  return c;
}

/// Analytic covariance of the MOSS-4Min estimators for true counts `n`.
inline Matrix moss4min_covariance(const WeightIndex& index, std::uint64_t budget, const std::vector<double>& n) {
  return single_source_covariance(Method::kMoss4Min, inclusion_probabilities(Method::kMoss4Min, index), n,
                                  static_cast<double>(budget));
}

/// Mixing weights and covariance of the combined 5-node estimators, all
/// evaluated at the counts `n`.
struct Mix5 {
  std::vector<double> lambda1, lambda2;
  Matrix covariance;
};

inline Mix5 moss5_mix(const WeightIndex& index, std::uint64_t k1, std::uint64_t k2, const std::vector<double>& n) {
  const auto& cat = catalog();
  const auto p1 = inclusion_probabilities(Method::kT5, index);
  const auto p2 = inclusion_probabilities(Method::kPath5, index);
  const double b1 = static_cast<double>(k1), b2 = static_cast<double>(k2);
  Mix5 mix;
  mix.lambda1.assign(kMotifs5 + 1, 0.0);
  mix.lambda2.assign(kMotifs5 + 1, 0.0);
  std::vector<int> ids;
  for (int i = 1; i <= kMotifs5; ++i) {
    const bool in1 = cat.phi5(1, i) > 0, in2 = cat.phi5(2, i) > 0;
    if (!in1 && !in2) continue;
    ids.push_back(i);
    const auto a = detail::at(i);
    if (in1 && !in2) {
      mix.lambda1[a] = 1.0;
    } else if (!in1 && in2) {
      mix.lambda2[a] = 1.0;
    } else {
      // lambda1 = V2 / (V1 + V2); the common factor n_i cancels.
      double w1 = (1.0 / p2[a] - n[a]) / b2;
      double w2 = (1.0 / p1[a] - n[a]) / b1;
      if (w1 < 0.0 || w2 < 0.0) {
        w1 = 1.0 / p2[a] / b2;
        w2 = 1.0 / p1[a] / b1;
      }
      mix.lambda1[a] = w1 + w2 > 0.0 ? w1 / (w1 + w2) : 0.5;
      mix.lambda2[a] = 1.0 - mix.lambda1[a];
    }
  }
  mix.covariance = detail::zero_matrix(kMotifs5);
  for (const int i : ids) {
    const auto a = detail::at(i);
    const double v1 = mix.lambda1[a] > 0.0 ? detail::variance_term(n[a], p1[a], b1) : 0.0;
    const double v2 = mix.lambda2[a] > 0.0 ? detail::variance_term(n[a], p2[a], b2) : 0.0;
    mix.covariance[a][a] = mix.lambda1[a] * mix.lambda1[a] * v1 + mix.lambda2[a] * mix.lambda2[a] * v2;
    for (const int j : ids) {
      if (j == i) continue;
      const auto b = detail::at(j);
      mix.covariance[a][b] =
          -(mix.lambda1[a] * mix.lambda1[b] / b1 + mix.lambda2[a] * mix.lambda2[b] / b2) * n[a] * n[b];
    }
  }
  detail::add_linear_motif(mix.covariance, 2, star4_coefficients());
  return mix;
}

/// Analytic covariance of the combined 5-node estimators for true counts `n`.
inline Matrix moss5_covariance(const WeightIndex& index, std::uint64_t k1, std::uint64_t k2,
                               const std::vector<double>& n) {
  return moss5_mix(index, k1, k2, n).covariance;
}

namespace detail {

inline std::vector<double> raw_estimates(const Tally& t, const std::vector<double>& p) {
  std::vector<double> est(t.hits.size(), 0.0);
  for (const int i : direct_motifs(t.method)) {
    const auto a = at(i);
    if (t.hits[a] > 0) est[a] = static_cast<double>(t.hits[a]) / (static_cast<double>(t.budget) * p[a]);
  }
  return est;
}

}  // namespace detail

/// Estimates from a single-method tally. MOSS-4 reports also carry n_2 from
/// the 3-star identity; T-5 and Path-5 reports cover only their own motifs.
inline EstimateReport estimate_single(const Tally& tally, const WeightIndex& index) {
  if (tally.budget == 0) throw ConfigError("tally has zero budget");
  const Method m = tally.method;
  const auto p = inclusion_probabilities(m, index);
  EstimateReport rep;
  rep.method = to_string(m);
  rep.motif_size = motif_size(m);
  rep.constants = GraphConstants::of(index);
  rep.budgets = {tally.budget};
  rep.ids = direct_motifs(m);
  rep.estimate = detail::raw_estimates(tally, p);
  rep.covariance = single_source_covariance(m, p, rep.estimate, static_cast<double>(tally.budget));
  if (m == Method::kMoss4) {
    double n2 = static_cast<double>(index.lambda3());
    for (const auto& [k, a] : star3_coefficients()) n2 += a * rep.estimate[detail::at(k)];
    rep.estimate[2] = n2;
    detail::add_linear_motif(rep.covariance, 2, star3_coefficients());
    rep.ids = {1, 2, 3, 4, 5, 6};
  }
  return rep;
}

inline EstimateReport estimate_moss4(const Tally& tally, const WeightIndex& index) {
  detail::check_tally(tally, Method::kMoss4);
  return estimate_single(tally, index);
}

inline EstimateReport estimate_moss4min(const Tally& tally, const WeightIndex& index) {
  detail::check_tally(tally, Method::kMoss4Min);
  return estimate_single(tally, index);
}

/// Combined 5-node estimates from a T-5 tally and a Path-5 tally.
inline EstimateReport estimate_moss5(const Tally& t5, const Tally& path5, const WeightIndex& index) {
  detail::check_tally(t5, Method::kT5);
  detail::check_tally(path5, Method::kPath5);
  const auto& cat = catalog();
  const double b1 = static_cast<double>(t5.budget), b2 = static_cast<double>(path5.budget);
  EstimateReport rep;
  rep.method = "moss5";
  rep.motif_size = 5;
  rep.constants = GraphConstants::of(index);
  rep.budgets = {t5.budget, path5.budget};
  rep.estimate1 = detail::raw_estimates(t5, inclusion_probabilities(Method::kT5, index));
  rep.estimate2 = detail::raw_estimates(path5, inclusion_probabilities(Method::kPath5, index));

  // Plug-in counts: budget-weighted pool of the sub-estimates available for each motif.
  std::vector<double> plug(kMotifs5 + 1, 0.0);
  for (int i = 1; i <= kMotifs5; ++i) {
    const auto a = detail::at(i);
    const bool in1 = cat.phi5(1, i) > 0, in2 = cat.phi5(2, i) > 0;
    if (in1 && in2)
      plug[a] = (b1 * rep.estimate1[a] + b2 * rep.estimate2[a]) / (b1 + b2);
    else if (in1)
      plug[a] = rep.estimate1[a];
    else if (in2)
      plug[a] = rep.estimate2[a];
  }
  Mix5 mix = moss5_mix(index, t5.budget, path5.budget, plug);
  rep.estimate.assign(kMotifs5 + 1, 0.0);
  for (int i = 1; i <= kMotifs5; ++i) {
    if (i == 2) continue;
    const auto a = detail::at(i);
    rep.estimate[a] = mix.lambda1[a] * rep.estimate1[a] + mix.lambda2[a] * rep.estimate2[a];
  }
  double n2 = static_cast<double>(index.lambda4());
  for (const auto& [k, a] : star4_coefficients()) n2 += a * rep.estimate[detail::at(k)];
  rep.estimate[2] = n2;
  rep.covariance = std::move(mix.covariance);
  rep.lambda1 = std::move(mix.lambda1);
  rep.lambda2 = std::move(mix.lambda2);
  rep.ids.resize(kMotifs5);
  for (int i = 1; i <= kMotifs5; ++i) rep.ids[detail::at(i - 1)] = i;
  return rep;
}

/// An estimate paired with its variance.
struct Estimate {
  double value = 0.0;
  double variance = 0.0;
};

/// Inverse-variance weighted combination of two independent unbiased
/// estimates of the same quantity.
inline Estimate mix_estimates(const Estimate& a, const Estimate& b) {
  if (a.variance < 0.0 || b.variance < 0.0) throw ConfigError("variance must be non-negative");
  if (a.variance == 0.0) return {a.value, 0.0};
  if (b.variance == 0.0) return {b.value, 0.0};
  const double ia = 1.0 / a.variance, ib = 1.0 / b.variance;
  return {(ia * a.value + ib * b.value) / (ia + ib), 1.0 / (ia + ib)};
}

/// MOSS-4 and MOSS-4Min estimates of motifs 3, 5, 6 mixed by inverse variance.
inline std::vector<std::pair<int, Estimate>> combine_moss4(const EstimateReport& moss4, const EstimateReport& min) {
  std::vector<std::pair<int, Estimate>> out;
  for (const int i : {3, 5, 6})
    out.emplace_back(i, mix_estimates({moss4.value(i), moss4.variance(i)}, {min.value(i), min.variance(i)}));
  return out;
}

/// Two-sided standard-normal quantile: z with P(|Z| <= z) = level.
inline double normal_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
}

/// Half-width z * sqrt(variance) of the CLT interval at `level`.
inline double confidence_interval(double variance, double level) {
  if (variance < 0.0) throw ConfigError("variance must be non-negative");
  return normal_quantile(level) * std::sqrt(variance);
}

/// Gaussian tail approximation exp(-eps^2/2) / (sqrt(2 pi) eps) of P(Z > eps).
inline double gaussian_tail_bound(double eps) {
  if (!(eps > 0.0)) throw ConfigError("tail bound needs a positive deviation");
  return std::exp(-eps * eps / 2.0) / (std::sqrt(2.0 * M_PI) * eps);
}

/// Smallest K with z_{1-delta/2} * sqrt((1/(p n) - 1) / K) <= eps, at least 1.
inline std::uint64_t plan_budget(double p, double pilot, double eps, double delta) {
  if (!(p > 0.0)) throw ConfigError("inclusion probability must be positive");
  if (!(pilot > 0.0)) throw ConfigError("pilot produced no hits; increase pilot budget");
  if (!(eps > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  const double z = normal_quantile(1.0 - delta);
  const double rel = 1.0 / (p * pilot) - 1.0;
  if (rel <= 0.0) return 1;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(z * z * rel / (eps * eps))));
}

/// Run-to-run accuracy of one motif.
struct ErrorMetrics {
  double mean = 0.0;
  double empirical_variance = 0.0;
  std::optional<double> nrmse;    // sqrt(mean squared error) / truth
  std::optional<double> std_err;  // sqrt(analytic variance) / truth
};

/// `runs[r]` is the estimate of run r; `analytic_variance` is evaluated at the
/// truth. Undefined metrics (zero truth) are left empty.
inline ErrorMetrics error_metrics(const std::vector<double>& runs, double truth, double analytic_variance) {
  if (runs.size() < 2) throw ConfigError("error metrics need at least two runs");
  ErrorMetrics m;
  const double r = static_cast<double>(runs.size());
  double sum = 0.0, sq = 0.0;
  for (const double x : runs) {
    sum += x;
    sq += (x - truth) * (x - truth);
  }
  m.mean = sum / r;
  double dev = 0.0;
  for (const double x : runs) dev += (x - m.mean) * (x - m.mean);
  m.empirical_variance = dev / (r - 1.0);
  if (truth != 0.0) {
    m.nrmse = std::sqrt(sq / r) / truth;
    m.std_err = std::sqrt(analytic_variance) / truth;
  }
  return m;
}

}  // namespace moss
