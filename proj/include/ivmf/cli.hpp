#pragma once

// The `ivmf` command line. run() never calls std::exit and writes only to the
// streams it is given, so it can be driven in-process.
//
// Exit status: 0 success, 1 validation or parse error (or lint/report
// findings under --strict), 2 usage error.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "ivmf/core_model.hpp"
#include "ivmf/dataset_io.hpp"
#include "ivmf/error.hpp"
#include "ivmf/report.hpp"
#include "ivmf/reproduction.hpp"
#include "ivmf/scoring.hpp"
#include "ivmf/service.hpp"
#include "ivmf/stats.hpp"
#include "ivmf/trust_expr.hpp"

namespace ivmf::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

struct Options {
  std::string dataset;
  std::string weights;
  std::string format = "md";
  std::string view;
  std::string level = "ivmf";
  std::vector<std::string> variants;
  std::string column = "ivmf";
  std::string reference;
  bool strict = false;
  std::size_t bins = 10;
  std::vector<double> range{0.0, 1.0};
  std::string host = "127.0.0.1";
  int port = default_service_port;
  std::string cors_origin;
};

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Dataset dataset(const Options& o) {
  if (o.dataset.empty()) throw UsageError("--dataset is required (or set IVMF_DATASET)");
  return load_dataset(o.dataset);
}

inline WeightScheme weights(const Options& o) {
  return o.weights.empty() ? default_scheme() : load_weights(o.weights);
}

inline TableView view(const std::string& name) {
  if (name == "tm") return TableView::tm_rank;
  if (name == "breakdown") return TableView::breakdown;
  return TableView::ivmf_rank;
}

// data/ivmf-2024.json -> data/ivmf-2024.reference.json
inline std::filesystem::path default_reference(const Options& o) {
  auto path = resolve_document_path(o.dataset);
  return path.parent_path() / (path.stem().string() + ".reference.json");
}

inline int run_rank(const Options& o, std::ostream& out, const std::string& default_view) {
  const auto table = ivmf_scores(dataset(o), weights(o));
  out << write_report(table, parse_report_format(o.format),
                      view(o.view.empty() ? default_view : o.view));
  return exit_ok;
}

inline int run_sensitivity(const Options& o, std::ostream& out, std::ostream& err) {
  const Level level = parse_level(o.level);
  const auto data = dataset(o);
  std::vector<WeightScheme> variants;
  if (o.variants.empty()) {
    variants = placeholder_scenarios(level);
    err << "note: no --variant given; using illustrative placeholder scenarios\n";
  } else {
    for (const auto& path : o.variants) variants.push_back(load_weights(path));
  }
  const auto rows = sensitivity_table(data, weights(o), variants, level);
  out << write_report(std::span<const SensitivityRow>(rows), parse_report_format(o.format));
  return exit_ok;
}

inline int run_lint(const Options& o, std::ostream& out) {
  const auto findings = lint_dataset(dataset(o));
  out << write_report(std::span<const LintFinding>(findings), parse_report_format(o.format));
  return o.strict && !findings.empty() ? exit_failure : exit_ok;
}

inline int run_hist(const Options& o, std::ostream& out) {
  const auto table = ivmf_scores(dataset(o), weights(o));
  std::vector<double> values;
  for (const auto& row : table.rows) values.push_back(o.column == "tm" ? row.tm_norm : row.ivmf_norm);
  const auto spec = histogram(values, o.bins, o.range.at(0), o.range.at(1));
  out << write_report(spec, parse_report_format(o.format));
  return exit_ok;
}

inline int run_report(const Options& o, std::ostream& out) {
  const auto data = dataset(o);
  const auto reference =
      load_reference(o.reference.empty() ? default_reference(o) : std::filesystem::path(o.reference));
  const auto report = reproduce(data, weights(o), reference);
  out << write_report(report, parse_report_format(o.format));
  return o.strict && !report.all_pass() ? exit_failure : exit_ok;
}

inline int run_serve(const Options& o, std::ostream& out) {
  auto data = dataset(o);
  const auto id = resolve_document_path(o.dataset).stem().string();
  const Service service(std::move(data), id);
  return serve(service, {o.host, o.port, o.cors_origin}, out) ? exit_ok : exit_failure;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Internet voting maturity scoring toolkit", "ivmf"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  const std::vector<std::string> formats{"json", "csv", "md", "markdown"};
  auto add_dataset = [&](CLI::App* sub) {
    sub->add_option("--dataset,-d", o.dataset, "Dataset document")->envname("IVMF_DATASET");
  };
  auto add_weights = [&](CLI::App* sub) {
    sub->add_option("--weights,-w", o.weights, "Weight scheme document (default: built-in scheme)");
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format,-f", o.format, "Output format")
        ->check(CLI::IsMember(formats))
        ->default_str("md");
  };

  auto* rank = app.add_subcommand("rank", "Print the ranked score table");
  add_dataset(rank);
  add_weights(rank);
  add_format(rank);
  rank->add_option("--view", o.view, "Ranking to print")
      ->check(CLI::IsMember({"ivmf", "tm", "breakdown"}))
      ->default_str("ivmf");

  auto* score = app.add_subcommand("score", "Print every raw and normalized score");
  add_dataset(score);
  add_weights(score);
  add_format(score);
  score->add_option("--view", o.view, "Row order")
      ->check(CLI::IsMember({"ivmf", "tm", "breakdown"}))
      ->default_str("breakdown");

  auto* sens = app.add_subcommand("sensitivity", "Rank correlations against weight variants");
  add_dataset(sens);
  add_weights(sens);
  add_format(sens);
  sens->add_option("--variant,-v", o.variants, "Variant weight scheme document (repeatable)");
  sens->add_option("--level", o.level, "Composite to compare")
      ->check(CLI::IsMember({"ivmf", "tm"}))
      ->default_str("ivmf");

  auto* lint = app.add_subcommand("lint", "Cross-check stored scores against collusion expressions");
  add_dataset(lint);
  add_format(lint);
  lint->add_flag("--strict", o.strict, "Exit 1 when there are findings");

  auto* hist = app.add_subcommand("hist", "Histogram of normalized composite scores");
  add_dataset(hist);
  add_weights(hist);
  add_format(hist);
  hist->add_option("--bins,-b", o.bins, "Number of bins")->check(CLI::PositiveNumber)->default_str("10");
  hist->add_option("--range", o.range, "Lower and upper bound")->expected(2)->default_str("0 1");
  hist->add_option("--column", o.column, "Normalized column to bin")
      ->check(CLI::IsMember({"ivmf", "tm"}))
      ->default_str("ivmf");

  auto* report = app.add_subcommand("report", "Compare computed values with published reference values");
  add_dataset(report);
  add_weights(report);
  add_format(report);
  report->add_option("--reference,-r", o.reference,
                     "Reference values document (default: <dataset>.reference.json)");
  report->add_flag("--strict", o.strict, "Exit 1 when any check fails");

  auto* srv = app.add_subcommand("serve", "Serve the HTTP API");
  add_dataset(srv);
  srv->add_option("--host", o.host, "Bind address")->default_str("127.0.0.1");
  srv->add_option("--port,-p", o.port, "TCP port")->check(CLI::Range(0, 65535))->default_str("8642");
  srv->add_option("--cors-origin", o.cors_origin, "Origin allowed to call the API");

  std::vector<const char*> argv{"ivmf"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }
  try {
    if (app.got_subcommand(rank)) return detail::run_rank(o, out, "ivmf");
    if (app.got_subcommand(score)) return detail::run_rank(o, out, "breakdown");
    if (app.got_subcommand(sens)) return detail::run_sensitivity(o, out, err);
    if (app.got_subcommand(lint)) return detail::run_lint(o, out);
    if (app.got_subcommand(hist)) return detail::run_hist(o, out);
    if (app.got_subcommand(report)) return detail::run_report(o, out);
    if (app.got_subcommand(srv)) return detail::run_serve(o, out);
  } catch (const detail::UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_usage;
}

}  // namespace ivmf::cli
