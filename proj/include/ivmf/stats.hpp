#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ivmf/core_model.hpp"
#include "ivmf/error.hpp"
#include "ivmf/scoring.hpp"

namespace ivmf {

// Product-moment correlation, computed on centered data.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(Errc::length_mismatch, "pearson: vectors differ in length (" +
                                           std::to_string(x.size()) + " vs " +
                                           std::to_string(y.size()) + ")");
  }
  if (x.size() < 3) throw Error(Errc::invalid_argument, "pearson: need at least 3 observations");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(Errc::non_finite, "pearson: non-finite observation");
    }
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::zero_variance, "pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Spearman's rho with tie correction: Pearson on fractional ranks.
inline double rank_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(Errc::length_mismatch, "rank_correlation: vectors differ in length");
  }
  const auto rx = rank_average(x, Order::ascending);
  const auto ry = rank_average(y, Order::ascending);
  return pearson(rx, ry);
}

inline double t_statistic(double r, int n) {
  if (n < 3) throw Error(Errc::invalid_argument, "t_statistic: need n >= 3");
  if (!std::isfinite(r) || std::abs(r) >= 1.0) {
    throw Error(Errc::degenerate, "t_statistic: |r| = 1 gives an infinite t");
  }
  return r * std::sqrt(static_cast<double>(n - 2) / (1.0 - r * r));
}

namespace detail {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
inline double incomplete_beta_fraction(double a, double b, double x) {
  constexpr int max_iterations = 10000;
  constexpr double epsilon = 1e-14;
  constexpr double tiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < epsilon) return h;
  }
  throw Error(Errc::degenerate, "incomplete beta: continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
inline double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(Errc::invalid_argument, "incomplete beta: shape parameters must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) throw Error(Errc::out_of_range, "incomplete beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges quickly only below the mean; reflect otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::incomplete_beta_fraction(a, b, x) / a;
  return 1.0 - front * detail::incomplete_beta_fraction(b, a, 1.0 - x) / b;
}

// Two-sided tail probability of Student's t with `df` degrees of freedom.
inline double p_two_sided(double t, int df) {
  if (df < 1) throw Error(Errc::invalid_argument, "p_two_sided: df must be >= 1");
  if (std::isnan(t)) throw Error(Errc::non_finite, "p_two_sided: t is NaN");
  if (std::isinf(t)) return 0.0;
  const double dof = df;
  const double x = dof / (dof + t * t);
  return std::clamp(regularized_incomplete_beta(x, dof / 2.0, 0.5), 0.0, 1.0);
}

enum class Level { ivmf, tm };

constexpr std::string_view level_name(Level level) {
  return level == Level::ivmf ? "ivmf" : "tm";
}

inline Level parse_level(std::string_view text) {
  if (text == "ivmf") return Level::ivmf;
  if (text == "tm") return Level::tm;
  throw Error(Errc::invalid_argument, "unknown level '" + std::string(text) + "' (ivmf|tm)");
}

struct SensitivityRow {
  std::string baseline_scheme;
  std::string variant_scheme;
  double r = 0.0;
  double r_squared = 0.0;
  // Absent when |r| = 1 (t is infinite).
  std::optional<double> t;
  double p = 1.0;
  int n = 0;
  int df = 0;
  // "identical ranking" / "reversed ranking" for the degenerate cases.
  std::string note;
};

// Correlation of the average-rank transforms of two score vectors.
inline SensitivityRow compare_rankings(std::span<const double> baseline_scores,
                                       std::span<const double> variant_scores,
                                       std::string baseline_name, std::string variant_name) {
  SensitivityRow row;
  row.baseline_scheme = std::move(baseline_name);
  row.variant_scheme = std::move(variant_name);
  row.n = static_cast<int>(baseline_scores.size());
  row.df = row.n - 2;
  row.r = rank_correlation(baseline_scores, variant_scores);

  constexpr double unit_tolerance = 1e-12;
  if (std::abs(row.r) >= 1.0 - unit_tolerance) {
    row.r = row.r > 0 ? 1.0 : -1.0;
    row.r_squared = 1.0;
    row.p = 0.0;
    row.note = row.r > 0 ? "identical ranking" : "reversed ranking";
    return row;
  }
  row.r_squared = row.r * row.r;
  row.t = t_statistic(row.r, row.n);
  row.p = p_two_sided(*row.t, row.df);
  return row;
}

inline std::vector<double> composite_scores(const Dataset& dataset, const WeightScheme& scheme,
                                            Level level) {
  if (level == Level::tm) return tm_scores(dataset, scheme);
  const auto table = ivmf_scores(dataset, scheme);
  std::vector<double> scores;
  scores.reserve(table.rows.size());
  for (const auto& row : table.rows) scores.push_back(row.ivmf_raw);
  return scores;
}

// One row per variant, in variant order.
inline std::vector<SensitivityRow> sensitivity_table(const Dataset& dataset,
                                                     const WeightScheme& baseline,
                                                     std::span<const WeightScheme> variants,
                                                     Level level) {
  if (dataset.protocols.size() < 3) {
    throw Error(Errc::too_few_protocols, "sensitivity analysis needs at least 3 protocols");
  }
  auto check = [](const WeightScheme& s) {
    if (!s.valid_for_ranking()) {
      throw Error(Errc::invalid_argument,
                  "weight scheme '" + s.name + "' is not valid for ranking");
    }
  };
  check(baseline);
  const auto base_scores = composite_scores(dataset, baseline, level);
  std::vector<SensitivityRow> rows;
  rows.reserve(variants.size());
  for (const auto& variant : variants) {
    check(variant);
    const auto scores = composite_scores(dataset, variant, level);
    rows.push_back(compare_rankings(base_scores, scores, baseline.name, variant.name));
  }
  return rows;
}

// Named alternative scenarios for sensitivity runs. No canonical weights exist
// for them; the values are illustrative and meant to be replaced by user files.
inline std::vector<WeightScheme> placeholder_scenarios(Level level) {
  constexpr std::string_view note = "illustrative placeholder weights, not a published scheme";
  const WeightScheme base = default_scheme();
  std::vector<WeightScheme> out;
  auto add = [&](std::string name, auto&& adjust) {
    WeightScheme s = base;
    s.name = std::move(name);
    s.description = std::string(note);
    adjust(s);
    out.push_back(std::move(s));
  };
  if (level == Level::ivmf) {
    add("ivmf-tm-weighted", [](WeightScheme& s) { s.w_tm = 3.0; s.w_pu = 1.0; });
    add("ivmf-cmpx-weighted", [](WeightScheme& s) { s.w_cmpx = -3.0; s.w_pu = 1.0; });
    add("ivmf-pu-weighted", [](WeightScheme& s) { s.w_pu = 5.0; });
    add("ivmf-equal", [](WeightScheme& s) {
      s.w_cmpx = -1.0;
      s.w_pu = 1.0;
      s.w_tm = 1.0;
    });
  } else {
    add("tm-anonymity-secrecy-weighted", [](WeightScheme& s) {
      s.w_property = {3.0, 3.0, 1.0, 1.0, 1.0, 1.0};
    });
    add("tm-verifiability-weighted", [](WeightScheme& s) {
      s.w_property = {1.0, 1.0, 3.0, 3.0, 3.0, 1.0};
    });
    add("tm-equal", [](WeightScheme& s) { s.w_property.fill(1.0); });
  }
  return out;
}

struct HistogramSpec {
  std::size_t bin_count = 0;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;

  [[nodiscard]] double bin_width() const { return (hi - lo) / static_cast<double>(bin_count); }
  [[nodiscard]] double bin_lower(std::size_t i) const { return lo + bin_width() * i; }
  [[nodiscard]] double bin_upper(std::size_t i) const {
    return i + 1 == bin_count ? hi : lo + bin_width() * (i + 1);
  }
  [[nodiscard]] std::size_t total() const {
    std::size_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
  }
};

// Bins are [lower, upper) except the last, which is closed.
inline HistogramSpec histogram(std::span<const double> values, std::size_t bin_count, double lo,
                               double hi) {
  if (bin_count == 0) throw Error(Errc::invalid_argument, "histogram: bin_count must be >= 1");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(Errc::invalid_argument, "histogram: range must satisfy lo < hi");
  }
  HistogramSpec spec{bin_count, lo, hi, std::vector<std::size_t>(bin_count, 0)};
  for (double v : values) {
    if (!(v >= lo && v <= hi)) {
      throw Error(Errc::out_of_range, "histogram: value " + std::to_string(v) +
                                          " outside [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "]");
    }
    auto bin = static_cast<std::size_t>(std::floor((v - lo) / (hi - lo) * bin_count));
    spec.counts[std::min(bin, bin_count - 1)]++;
  }
  return spec;
}

}  // namespace ivmf
