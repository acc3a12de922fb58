#pragma once

// Side-by-side comparison of computed scores and statistics against a file of
// published reference values, with per-check tolerances.

#include <cmath>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "ivmf/core_model.hpp"
#include "ivmf/dataset_io.hpp"
#include "ivmf/error.hpp"
#include "ivmf/report.hpp"
#include "ivmf/scoring.hpp"
#include "ivmf/stats.hpp"
#include "ivmf/trust_expr.hpp"

namespace ivmf {

struct ReferenceScore {
  std::string name;
  double raw = 0.0;
  double norm = 0.0;
  int rank = 0;
};

struct ReferenceSensitivity {
  Level level = Level::ivmf;
  std::string variant;
  double r = 0.0;
  double r_squared = 0.0;
  double t = 0.0;
  double p = 0.0;
  // Decimals the p value was printed with.
  int p_decimals = 3;
};

struct ReferenceValues {
  std::string dataset;
  int n = 0;
  std::vector<ReferenceScore> tm;
  std::vector<ReferenceScore> ivmf;
  std::vector<ReferenceSensitivity> sensitivity;
};

inline ReferenceValues reference_from_json(const json& doc) {
  try {
    ReferenceValues ref;
    ref.dataset = doc.at("dataset").get<std::string>();
    ref.n = doc.at("n").get<int>();
    auto scores = [](const json& list) {
      std::vector<ReferenceScore> out;
      for (const auto& e : list) {
        out.push_back({e.at("name").get<std::string>(), e.at("raw").get<double>(),
                       e.at("norm").get<double>(), e.at("rank").get<int>()});
      }
      return out;
    };
    ref.tm = scores(doc.at("tm"));
    ref.ivmf = scores(doc.at("ivmf"));
    for (const auto& e : doc.at("sensitivity")) {
      ref.sensitivity.push_back({parse_level(e.at("level").get<std::string>()),
                                 e.at("variant").get<std::string>(), e.at("r").get<double>(),
                                 e.at("r_squared").get<double>(), e.at("t").get<double>(),
                                 e.at("p").get<double>(), e.at("p_decimals").get<int>()});
    }
    return ref;
  } catch (const json::exception& e) {
    throw DocumentError(Errc::schema_violation, {{"reference", e.what()}});
  }
}

inline ReferenceValues load_reference(const std::filesystem::path& path) {
  return reference_from_json(
      detail::parse_json_text(detail::read_file(resolve_document_path(path))));
}

struct ReproductionCheck {
  std::string group;
  std::string item;
  std::string quantity;
  double published = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;

  [[nodiscard]] double difference() const { return computed - published; }
};

struct DiscrepancyReport {
  std::vector<ReproductionCheck> checks;

  [[nodiscard]] std::vector<const ReproductionCheck*> failures() const {
    std::vector<const ReproductionCheck*> out;
    for (const auto& c : checks) {
      if (!c.pass) out.push_back(&c);
    }
    return out;
  }
  [[nodiscard]] bool all_pass() const { return failures().empty(); }
};

namespace detail {

inline ReproductionCheck make_check(std::string group, std::string item, std::string quantity,
                                    double published, double computed, double tolerance,
                                    std::string note = {}) {
  ReproductionCheck c{std::move(group), std::move(item), std::move(quantity), published,
                      computed,         tolerance,       false,               std::move(note)};
  c.pass = std::abs(computed - published) <= tolerance + 1e-12;
  return c;
}

inline void compare_scores(DiscrepancyReport& report, const ScoreTable& table,
                           const std::vector<ReferenceScore>& reference, bool tm,
                           double raw_tolerance, double norm_tolerance) {
  const std::string group = tm ? "tm" : "ivmf";
  for (const auto& ref : reference) {
    const auto* row = table.find(ref.name);
    if (row == nullptr) {
      report.checks.push_back({group, ref.name, "present", 1, 0, 0, false, "protocol missing"});
      continue;
    }
    report.checks.push_back(make_check(group, ref.name, "raw", ref.raw,
                                       tm ? row->tm_raw : row->ivmf_raw, raw_tolerance));
    report.checks.push_back(make_check(group, ref.name, "normalized", ref.norm,
                                       tm ? row->tm_norm : row->ivmf_norm, norm_tolerance));
    report.checks.push_back(
        make_check(group, ref.name, "rank", ref.rank, tm ? row->tm_rank : row->rank, 0.0));
  }
}

}  // namespace detail

inline constexpr double tm_raw_tolerance = 0.0005;
inline constexpr double tm_norm_tolerance = 0.001;
inline constexpr double ivmf_raw_tolerance = 0.002;
inline constexpr double ivmf_norm_tolerance = 0.001;
inline constexpr double t_tolerance = 0.005;
inline constexpr double r_squared_tolerance = 0.0015;

inline DiscrepancyReport reproduce(const Dataset& dataset, const WeightScheme& scheme,
                                   const ReferenceValues& ref) {
  DiscrepancyReport report;
  const auto table = ivmf_scores(dataset, scheme);
  detail::compare_scores(report, table, ref.tm, true, tm_raw_tolerance, tm_norm_tolerance);
  detail::compare_scores(report, table, ref.ivmf, false, ivmf_raw_tolerance, ivmf_norm_tolerance);

  // The printed normalized column against min-max of the printed raw column.
  if (ref.ivmf.size() >= 2) {
    std::vector<double> raw;
    for (const auto& r : ref.ivmf) raw.push_back(r.raw);
    const auto norm = minmax_normalize(raw);
    for (std::size_t i = 0; i < ref.ivmf.size(); ++i) {
      report.checks.push_back(detail::make_check("ivmf-consistency", ref.ivmf[i].name,
                                                 "normalized vs min-max of raw", ref.ivmf[i].norm,
                                                 norm.values[i], ivmf_norm_tolerance));
    }
  }

  const int n = ref.n > 0 ? ref.n : static_cast<int>(dataset.size());
  for (const auto& s : ref.sensitivity) {
    const std::string item = std::string(level_name(s.level)) + " " + s.variant;
    const double t = t_statistic(s.r, n);
    const double t_lo = t_statistic(s.r - 0.0005, n);
    const double t_hi = t_statistic(s.r + 0.0005, n);
    std::string t_note = fmt::format("r rounding interval gives t in [{}, {}]", fixed(t_lo, 3),
                                     fixed(t_hi, 3));
    t_note += s.t >= t_lo && s.t <= t_hi ? "; published t inside" : "; published t outside";
    report.checks.push_back(
        detail::make_check("sensitivity", item, "t from printed r", s.t, t, t_tolerance, t_note));

    const double p = p_two_sided(s.t, n - 2);
    const double p_tolerance = std::pow(10.0, -s.p_decimals);
    auto p_check = detail::make_check("sensitivity", item, "p from printed t", s.p, p,
                                      p_tolerance);
    if (!p_check.pass) {
      p_check.note = "published p inconsistent with a two-sided t test at df = " +
                     std::to_string(n - 2);
    }
    report.checks.push_back(std::move(p_check));

    report.checks.push_back(detail::make_check("sensitivity", item, "R2 vs printed r squared",
                                               s.r_squared, s.r * s.r, r_squared_tolerance));
  }

  for (const auto& f : lint_dataset(dataset)) {
    report.checks.push_back({"lint", f.protocol + " " + std::string(property_symbol(f.property)),
                             "stored score vs expression tier", static_cast<double>(f.stored_score),
                             f.expression_tier ? static_cast<double>(*f.expression_tier) : NAN, 0.0,
                             false, f.message});
  }
  return report;
}

inline std::string write_report(const DiscrepancyReport& report, ReportFormat format) {
  if (report.checks.empty()) throw Error(Errc::empty_input, "no reproduction checks to render");
  auto number = [](double v) { return std::isfinite(v) ? fmt::format("{:.6f}", v) : "n/a"; };
  if (format == ReportFormat::json) {
    json out = json::array();
    for (const auto& c : report.checks) {
      out.push_back({{"group", c.group},
                     {"item", c.item},
                     {"quantity", c.quantity},
                     {"published", c.published},
                     {"computed", std::isfinite(c.computed) ? json(c.computed) : json(nullptr)},
                     {"tolerance", c.tolerance},
                     {"pass", c.pass},
                     {"note", c.note}});
    }
    return json{{"checks", std::move(out)},
                {"failures", report.failures().size()}}
               .dump(2) +
           "\n";
  }
  const std::vector<std::string> header{"Group",    "Item", "Quantity",  "Published", "Computed",
                                        "Difference", "Tolerance", "Status",  "Note"};
  std::string out = format == ReportFormat::csv
                        ? detail::csv_line(header)
                        : detail::md_header(header, {false, false, false, true, true, true, true,
                                                     false, false});
  for (const auto& c : report.checks) {
    std::vector<std::string> cells{c.group,
                                   c.item,
                                   c.quantity,
                                   number(c.published),
                                   number(c.computed),
                                   number(c.difference()),
                                   number(c.tolerance),
                                   c.pass ? "ok" : "DISCREPANCY",
                                   c.note};
    out += format == ReportFormat::csv ? detail::csv_line(cells) : detail::md_line(cells);
  }
  return out;
}

}  // namespace ivmf
