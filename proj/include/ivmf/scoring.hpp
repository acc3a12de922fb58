#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ivmf/core_model.hpp"
#include "ivmf/error.hpp"

namespace ivmf {

inline int complexity_score(std::span<const ComponentSpec> components) {
  if (components.empty()) throw Error(Errc::no_components, "protocol has no components");
  int total = 0;
  for (const auto& c : components) total += static_cast<int>(c.complexity_class);
  return total;
}

struct NormalizedColumn {
  std::vector<double> values;
  // Set when max == min; every value is then 0.
  bool degenerate = false;
};

// Min-max onto [0, 1] using the observed bounds of the column.
inline NormalizedColumn minmax_normalize(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::empty_input, "cannot normalize an empty column");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::non_finite, "cannot normalize a non-finite value");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo;
  const double range = *hi - min;

  NormalizedColumn out;
  out.values.resize(values.size(), 0.0);
  if (range == 0.0) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t i = 0; i < values.size(); ++i) out.values[i] = (values[i] - min) / range;
  return out;
}

// Two composite scores closer than this (relative to their magnitude) are a
// tie. Sums of weighted normalized scores pick up rounding noise, and the
// published tables contain exact ties that must survive it.
inline constexpr double tie_tolerance = 1e-9;

inline bool scores_tie(double a, double b) {
  return std::abs(a - b) <= tie_tolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

enum class Order { descending, ascending };

namespace detail {

// Calls visit(first, last) for each run [first, last) of tied values in
// `order`, where `order` is the index permutation sorted best-first.
template <typename Visit>
void for_each_tie_group(std::span<const double> values, const std::vector<std::size_t>& order,
                        Visit visit) {
  std::size_t first = 0;
  while (first < order.size()) {
    std::size_t last = first + 1;
    while (last < order.size() && scores_tie(values[order[first]], values[order[last]])) ++last;
    visit(first, last);
    first = last;
  }
}

inline std::vector<std::size_t> sorted_order(std::span<const double> values, Order direction) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::non_finite, "cannot rank a non-finite value");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return direction == Order::descending ? values[a] > values[b] : values[a] < values[b];
  });
  return order;
}

}  // namespace detail

// Competition ("1224") ranking: ties share the best rank of their group.
inline std::vector<int> rank_competition(std::span<const double> values,
                                         Order direction = Order::descending) {
  const auto order = detail::sorted_order(values, direction);
  std::vector<int> ranks(values.size(), 0);
  detail::for_each_tie_group(values, order, [&](std::size_t first, std::size_t last) {
    for (std::size_t k = first; k < last; ++k) ranks[order[k]] = static_cast<int>(first) + 1;
  });
  return ranks;
}

// Fractional ranking: ties get the mean of the positions they span.
inline std::vector<double> rank_average(std::span<const double> values,
                                        Order direction = Order::descending) {
  const auto order = detail::sorted_order(values, direction);
  std::vector<double> ranks(values.size(), 0.0);
  detail::for_each_tie_group(values, order, [&](std::size_t first, std::size_t last) {
    const double mean = (static_cast<double>(first + 1) + static_cast<double>(last)) / 2.0;
    for (std::size_t k = first; k < last; ++k) ranks[order[k]] = mean;
  });
  return ranks;
}

struct ProtocolScore {
  std::string name;
  int cmpx_raw = 0;
  double cmpx_norm = 0.0;
  int pu_raw = 0;
  double pu_norm = 0.0;
  std::array<int, property_count> property_raw{};
  std::array<double, property_count> property_norm{};
  double tm_raw = 0.0;
  double tm_norm = 0.0;
  int tm_rank = 0;
  double ivmf_raw = 0.0;
  double ivmf_norm = 0.0;
  int rank = 0;
};

// Rows are in dataset order.
struct ScoreTable {
  WeightScheme scheme;
  std::vector<ProtocolScore> rows;
  std::vector<std::string> warnings;

  [[nodiscard]] const ProtocolScore* find(std::string_view name) const {
    for (const auto& r : rows) {
      if (r.name == name) return &r;
    }
    return nullptr;
  }
};

struct TrustModelScores {
  std::vector<std::array<double, property_count>> property_norm;
  std::vector<double> raw;
  std::vector<std::string> warnings;
};

inline void require_scorable(const Dataset& dataset) {
  if (dataset.protocols.size() < 2) {
    throw Error(Errc::too_few_protocols,
                "at least 2 protocols are needed to normalize, got " +
                    std::to_string(dataset.protocols.size()));
  }
}

// Weighted sum of min-max normalized property columns.
inline TrustModelScores trust_model_scores(const Dataset& dataset, const WeightScheme& scheme) {
  require_scorable(dataset);
  const std::size_t n = dataset.protocols.size();
  TrustModelScores out;
  out.property_norm.assign(n, {});
  out.raw.assign(n, 0.0);

  for (auto prop : all_properties) {
    std::vector<double> column(n);
    for (std::size_t i = 0; i < n; ++i) column[i] = dataset.protocols[i].score(prop);
    const auto norm = minmax_normalize(column);
    if (norm.degenerate) {
      out.warnings.push_back("degenerate column " + std::string(property_symbol(prop)) +
                             ": all protocols share one value");
    }
    for (std::size_t i = 0; i < n; ++i) {
      out.property_norm[i][index_of(prop)] = norm.values[i];
      out.raw[i] += scheme.weight(prop) * norm.values[i];
    }
  }
  return out;
}

inline std::vector<double> tm_scores(const Dataset& dataset, const WeightScheme& scheme) {
  return trust_model_scores(dataset, scheme).raw;
}

// Complexity enters normalized; its penalty comes from a negative weight.
inline ScoreTable ivmf_scores(const Dataset& dataset, const WeightScheme& scheme) {
  require_scorable(dataset);
  const std::size_t n = dataset.protocols.size();
  auto tm = trust_model_scores(dataset, scheme);

  ScoreTable table;
  table.scheme = scheme;
  table.warnings = std::move(tm.warnings);
  table.rows.resize(n);

  std::vector<double> cmpx(n), pu(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = dataset.protocols[i];
    auto& row = table.rows[i];
    row.name = p.name;
    row.cmpx_raw = complexity_score(p.components);
    row.pu_raw = p.pu;
    for (auto prop : all_properties) row.property_raw[index_of(prop)] = p.score(prop);
    row.property_norm = tm.property_norm[i];
    row.tm_raw = tm.raw[i];
    cmpx[i] = row.cmpx_raw;
    pu[i] = row.pu_raw;
  }

  auto normalized = [&](std::span<const double> column, const char* label) {
    auto norm = minmax_normalize(column);
    if (norm.degenerate) {
      table.warnings.push_back(std::string("degenerate column ") + label +
                               ": all protocols share one value");
    }
    return norm.values;
  };
  const auto cmpx_n = normalized(cmpx, "CMPX");
  const auto pu_n = normalized(pu, "PU");
  const auto tm_n = normalized(tm.raw, "TM");

  std::vector<double> ivmf(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = table.rows[i];
    row.cmpx_norm = cmpx_n[i];
    row.pu_norm = pu_n[i];
    row.tm_norm = tm_n[i];
    row.ivmf_raw = scheme.w_cmpx * cmpx_n[i] + scheme.w_pu * pu_n[i] + scheme.w_tm * tm_n[i];
    ivmf[i] = row.ivmf_raw;
  }
  const auto ivmf_n = normalized(ivmf, "IVMF");
  const auto ranks = rank_competition(ivmf);
  const auto tm_ranks = rank_competition(tm.raw);
  for (std::size_t i = 0; i < n; ++i) {
    table.rows[i].ivmf_norm = ivmf_n[i];
    table.rows[i].rank = ranks[i];
    table.rows[i].tm_rank = tm_ranks[i];
  }
  return table;
}

enum class TableView { ivmf_rank, tm_rank, breakdown };

// Rows in display order: by the view's rank (name breaks ties), or dataset
// order for the breakdown view.
inline std::vector<const ProtocolScore*> ordered_rows(const ScoreTable& table, TableView view) {
  std::vector<const ProtocolScore*> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) rows.push_back(&r);
  if (view == TableView::breakdown) return rows;
  std::stable_sort(rows.begin(), rows.end(), [view](const ProtocolScore* a, const ProtocolScore* b) {
    const int ra = view == TableView::tm_rank ? a->tm_rank : a->rank;
    const int rb = view == TableView::tm_rank ? b->tm_rank : b->rank;
    if (ra != rb) return ra < rb;
    return a->name < b->name;
  });
  return rows;
}

}  // namespace ivmf
