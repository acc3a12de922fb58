#pragma once

// Rendering of score tables, sensitivity rows, histograms and lint findings as
// JSON, CSV (RFC 4180) or Markdown. Text formats round to the published table
// precision; JSON keeps full double precision.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "ivmf/core_model.hpp"
#include "ivmf/dataset_io.hpp"
#include "ivmf/error.hpp"
#include "ivmf/scoring.hpp"
#include "ivmf/stats.hpp"
#include "ivmf/trust_expr.hpp"

namespace ivmf {

enum class ReportFormat { json, csv, markdown };

inline ReportFormat parse_report_format(std::string_view token) {
  if (token == "json") return ReportFormat::json;
  if (token == "csv") return ReportFormat::csv;
  if (token == "md" || token == "markdown") return ReportFormat::markdown;
  throw Error(Errc::unsupported_format,
              "unsupported format '" + std::string(token) + "' (json|csv|md)");
}

inline constexpr int raw_decimals = 3;
inline constexpr int tm_raw_decimals = 4;
inline constexpr int norm_decimals = 4;
inline constexpr int stat_decimals = 3;
inline constexpr int p_decimals = 4;

// Fixed-point text without a "-0.000" artifact.
inline std::string fixed(double value, int decimals) {
  std::string text = fmt::format("{:.{}f}", value, decimals);
  if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos) text.erase(0, 1);
  return text;
}

namespace detail {

inline std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += csv_field(fields[i]);
  }
  return line + "\r\n";
}

inline std::string md_cell(std::string_view text) {
  std::string cell;
  for (char c : text) {
    if (c == '|') cell += '\\';
    cell += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return cell;
}

inline std::string md_line(const std::vector<std::string>& cells) {
  std::string line = "|";
  for (const auto& c : cells) line += " " + md_cell(c) + " |";
  return line + "\n";
}

// `right` marks numeric columns.
inline std::string md_header(const std::vector<std::string>& cells, const std::vector<bool>& right) {
  std::string sep = "|";
  for (bool r : right) sep += r ? "---:|" : "---|";
  return md_line(cells) + sep + "\n";
}

inline std::string md_warnings(const std::vector<std::string>& warnings) {
  std::string text;
  if (!warnings.empty()) text += "\n";
  for (const auto& w : warnings) text += "> warning: " + w + "\n";
  return text;
}

inline std::string view_name(TableView view) {
  switch (view) {
    case TableView::ivmf_rank: return "ivmf";
    case TableView::tm_rank: return "tm";
    case TableView::breakdown: return "breakdown";
  }
  return "ivmf";
}

}  // namespace detail

inline json score_table_to_json(const ScoreTable& table, TableView view = TableView::ivmf_rank) {
  json protocols = json::array();
  for (const auto* row : ordered_rows(table, view)) {
    json properties = json::object();
    for (auto p : all_properties) {
      properties[std::string(property_symbol(p))] = {{"raw", row->property_raw[index_of(p)]},
                                                     {"norm", row->property_norm[index_of(p)]}};
    }
    protocols.push_back({{"name", row->name},
                         {"rank", row->rank},
                         {"tm_rank", row->tm_rank},
                         {"cmpx", {{"raw", row->cmpx_raw}, {"norm", row->cmpx_norm}}},
                         {"pu", {{"raw", row->pu_raw}, {"norm", row->pu_norm}}},
                         {"properties", std::move(properties)},
                         {"tm", {{"raw", row->tm_raw}, {"norm", row->tm_norm}}},
                         {"ivmf", {{"raw", row->ivmf_raw}, {"norm", row->ivmf_norm}}}});
  }
  return {{"scheme", weights_to_json(table.scheme)},
          {"view", detail::view_name(view)},
          {"warnings", table.warnings},
          {"protocols", std::move(protocols)}};
}

inline json sensitivity_to_json(std::span<const SensitivityRow> rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"baseline", r.baseline_scheme},
                   {"variant", r.variant_scheme},
                   {"r", r.r},
                   {"r_squared", r.r_squared},
                   {"t", r.t ? json(*r.t) : json(nullptr)},
                   {"p", r.p},
                   {"n", r.n},
                   {"df", r.df},
                   {"note", r.note}});
  }
  return out;
}

inline json histogram_to_json(const HistogramSpec& spec) {
  json edges = json::array();
  for (std::size_t i = 0; i < spec.bin_count; ++i) edges.push_back(spec.bin_lower(i));
  edges.push_back(spec.hi);
  return {{"bin_count", spec.bin_count},
          {"lo", spec.lo},
          {"hi", spec.hi},
          {"edges", std::move(edges)},
          {"counts", spec.counts},
          {"total", spec.total()}};
}

inline json lint_to_json(std::span<const LintFinding> findings) {
  json out = json::array();
  for (const auto& f : findings) {
    out.push_back({{"protocol", f.protocol},
                   {"property", std::string(property_symbol(f.property))},
                   {"stored_score", f.stored_score},
                   {"expression_tier", f.expression_tier ? json(*f.expression_tier) : json(nullptr)},
                   {"message", f.message}});
  }
  return out;
}

inline std::string write_report(const ScoreTable& table, ReportFormat format,
                                TableView view = TableView::ivmf_rank) {
  if (table.rows.empty()) throw Error(Errc::empty_input, "cannot render an empty score table");
  const auto rows = ordered_rows(table, view);
  if (format == ReportFormat::json) return score_table_to_json(table, view).dump(2) + "\n";

  std::vector<std::string> header;
  std::vector<bool> numeric;
  std::vector<std::vector<std::string>> body;
  switch (view) {
    case TableView::ivmf_rank:
      header = {"Protocol", "Rank", "Normalized IVMF", "IVMF", "PU"};
      numeric = {false, true, true, true, true};
      for (const auto* r : rows) {
        body.push_back({r->name, std::to_string(r->rank), fixed(r->ivmf_norm, norm_decimals),
                        fixed(r->ivmf_raw, raw_decimals), std::to_string(r->pu_raw)});
      }
      break;
    case TableView::tm_rank:
      header = {"Protocol", "Rank", "Normalized TM", "TM"};
      numeric = {false, true, true, true};
      for (const auto* r : rows) {
        body.push_back({r->name, std::to_string(r->tm_rank), fixed(r->tm_norm, norm_decimals),
                        fixed(r->tm_raw, tm_raw_decimals)});
      }
      break;
    case TableView::breakdown:
      header = {"Protocol", "CMPX", "PU"};
      for (auto p : all_properties) header.emplace_back(property_symbol(p));
      for (const char* h : {"TM", "Normalized TM", "IVMF", "Normalized IVMF", "Rank"}) {
        header.emplace_back(h);
      }
      numeric.assign(header.size(), true);
      numeric[0] = false;
      for (const auto* r : rows) {
        std::vector<std::string> cells{r->name, std::to_string(r->cmpx_raw),
                                       std::to_string(r->pu_raw)};
        for (int s : r->property_raw) cells.push_back(std::to_string(s));
        cells.push_back(fixed(r->tm_raw, tm_raw_decimals));
        cells.push_back(fixed(r->tm_norm, norm_decimals));
        cells.push_back(fixed(r->ivmf_raw, raw_decimals));
        cells.push_back(fixed(r->ivmf_norm, norm_decimals));
        cells.push_back(std::to_string(r->rank));
        body.push_back(std::move(cells));
      }
      break;
  }

  std::string out;
  if (format == ReportFormat::csv) {
    out += detail::csv_line(header);
    for (const auto& cells : body) out += detail::csv_line(cells);
    return out;
  }
  out += detail::md_header(header, numeric);
  for (const auto& cells : body) out += detail::md_line(cells);
  return out + detail::md_warnings(table.warnings);
}

inline std::string write_report(std::span<const SensitivityRow> rows, ReportFormat format) {
  if (rows.empty()) throw Error(Errc::empty_input, "cannot render an empty sensitivity table");
  if (format == ReportFormat::json) return sensitivity_to_json(rows).dump(2) + "\n";

  const std::vector<std::string> header{"Baseline", "Variant", "r", "R2", "t", "p", "n", "Note"};
  std::string out = format == ReportFormat::csv
                        ? detail::csv_line(header)
                        : detail::md_header(header, {false, false, true, true, true, true, true,
                                                     false});
  for (const auto& r : rows) {
    std::vector<std::string> cells{r.baseline_scheme,
                                   r.variant_scheme,
                                   fixed(r.r, stat_decimals),
                                   fixed(r.r_squared, stat_decimals),
                                   r.t ? fixed(*r.t, stat_decimals) : "n/a",
                                   fixed(r.p, p_decimals),
                                   std::to_string(r.n),
                                   r.note};
    out += format == ReportFormat::csv ? detail::csv_line(cells) : detail::md_line(cells);
  }
  return out;
}

inline std::string write_report(const HistogramSpec& spec, ReportFormat format) {
  if (spec.bin_count == 0) throw Error(Errc::empty_input, "cannot render an empty histogram");
  if (format == ReportFormat::json) return histogram_to_json(spec).dump(2) + "\n";

  std::string out = format == ReportFormat::csv
                        ? detail::csv_line({"lower", "upper", "count"})
                        : detail::md_header({"Bin", "Range", "Count"}, {true, false, true});
  for (std::size_t i = 0; i < spec.bin_count; ++i) {
    const std::string lower = fixed(spec.bin_lower(i), norm_decimals);
    const std::string upper = fixed(spec.bin_upper(i), norm_decimals);
    const std::string count = std::to_string(spec.counts[i]);
    if (format == ReportFormat::csv) {
      out += detail::csv_line({lower, upper, count});
    } else {
      const char close = i + 1 == spec.bin_count ? ']' : ')';
      out += detail::md_line({std::to_string(i + 1), "[" + lower + ", " + upper + close, count});
    }
  }
  return out;
}

// An empty finding list is a valid report.
inline std::string write_report(std::span<const LintFinding> findings, ReportFormat format) {
  if (format == ReportFormat::json) return lint_to_json(findings).dump(2) + "\n";

  const std::vector<std::string> header{"Protocol", "Property", "Stored", "Expression tier",
                                        "Message"};
  std::string out = format == ReportFormat::csv
                        ? detail::csv_line(header)
                        : detail::md_header(header, {false, false, true, true, false});
  for (const auto& f : findings) {
    std::vector<std::string> cells{f.protocol, std::string(property_symbol(f.property)),
                                   std::to_string(f.stored_score),
                                   f.expression_tier ? std::to_string(*f.expression_tier) : "-",
                                   f.message};
    out += format == ReportFormat::csv ? detail::csv_line(cells) : detail::md_line(cells);
  }
  return out;
}

}  // namespace ivmf
