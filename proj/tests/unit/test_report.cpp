#include <gtest/gtest.h>

#include "ivmf/dataset_io.hpp"
#include "ivmf/report.hpp"
#include "ivmf/reproduction.hpp"
#include "../support/paths.hpp"

using namespace ivmf;

namespace {

const Dataset& bundled() {
  static const Dataset d = load_dataset(test::bundled_dataset());
  return d;
}

std::string line(const std::string& text, std::size_t index) {
  std::size_t start = 0;
  for (std::size_t i = 0; i < index; ++i) start = text.find('\n', start) + 1;
  return text.substr(start, text.find('\n', start) - start);
}

}  // namespace

TEST(Report, FormatTokens) {
  EXPECT_EQ(parse_report_format("md"), ReportFormat::markdown);
  EXPECT_EQ(parse_report_format("markdown"), ReportFormat::markdown);
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::csv);
  EXPECT_EQ(parse_report_format("json"), ReportFormat::json);
  try {
    (void)parse_report_format("xml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsupported_format);
  }
}

TEST(Report, FixedNeverPrintsNegativeZero) {
  EXPECT_EQ(fixed(-1e-12, 4), "0.0000");
  EXPECT_EQ(fixed(-0.5, 3), "-0.500");
  EXPECT_EQ(fixed(3.6897, 3), "3.690");
}

TEST(Report, MarkdownScoreTable) {
  const auto text = write_report(ivmf_scores(bundled(), default_scheme()), ReportFormat::markdown);
  EXPECT_EQ(line(text, 0), "| Protocol | Rank | Normalized IVMF | IVMF | PU |");
  EXPECT_EQ(line(text, 2), "| CHVote | 1 | 1.0000 | 3.690 | 3 |");
  EXPECT_EQ(line(text, 18), "| zkSnap | 17 | 0.0000 | 0.408 | 0 |");
}

TEST(Report, TmView) {
  const auto text =
      write_report(ivmf_scores(bundled(), default_scheme()), ReportFormat::markdown, TableView::tm_rank);
  EXPECT_EQ(line(text, 2), "| Snapshot X | 1 | 1.0000 | 5.5000 |");
  EXPECT_EQ(line(text, 3), "| Stellot | 1 | 1.0000 | 5.5000 |");
  EXPECT_EQ(line(text, 8), "| CHVote | 7 | 0.8051 | 4.6250 |");
}

TEST(Report, CsvQuotesAndUsesCrlf) {
  const auto text = write_report(ivmf_scores(bundled(), default_scheme()), ReportFormat::csv);
  EXPECT_EQ(text.substr(0, text.find("\r\n")), "Protocol,Rank,Normalized IVMF,IVMF,PU");
  EXPECT_NE(text.find("\"Votem, Proof of Vote\",13,0.2270,1.153,1\r\n"), std::string::npos);
}

TEST(Report, JsonKeepsFullPrecision) {
  const auto table = ivmf_scores(bundled(), default_scheme());
  const auto doc = json::parse(write_report(table, ReportFormat::json));
  EXPECT_EQ(doc["protocols"][0]["name"], "CHVote");
  EXPECT_EQ(doc["protocols"][0]["ivmf"]["raw"].get<double>(), table.find("CHVote")->ivmf_raw);
  EXPECT_EQ(doc["protocols"][0]["properties"]["UVF"]["raw"], 8);
  EXPECT_EQ(doc["scheme"]["name"], "default");
}

TEST(Report, Deterministic) {
  const auto table = ivmf_scores(bundled(), default_scheme());
  for (auto f : {ReportFormat::json, ReportFormat::csv, ReportFormat::markdown}) {
    EXPECT_EQ(write_report(table, f), write_report(ivmf_scores(bundled(), default_scheme()), f));
  }
}

TEST(Report, EmptyInputsAreErrors) {
  EXPECT_THROW((void)write_report(ScoreTable{}, ReportFormat::markdown), Error);
  EXPECT_THROW((void)write_report(std::span<const SensitivityRow>{}, ReportFormat::csv), Error);
}

TEST(Report, SensitivityRows) {
  const auto rows = sensitivity_table(bundled(), default_scheme(), std::vector{default_scheme()}, Level::tm);
  const auto md = write_report(std::span<const SensitivityRow>(rows), ReportFormat::markdown);
  EXPECT_EQ(line(md, 2), "| default | default | 1.000 | 1.000 | n/a | 0.0000 | 17 | identical ranking |");
  const auto doc = json::parse(write_report(std::span<const SensitivityRow>(rows), ReportFormat::json));
  EXPECT_TRUE(doc[0]["t"].is_null());
  EXPECT_EQ(doc[0]["n"], 17);
}

TEST(Report, Histogram) {
  const auto spec = histogram(std::vector<double>{0.0, 0.6, 1.0}, 2, 0.0, 1.0);
  const auto md = write_report(spec, ReportFormat::markdown);
  EXPECT_EQ(line(md, 2), "| 1 | [0.0000, 0.5000) | 1 |");
  EXPECT_EQ(line(md, 3), "| 2 | [0.5000, 1.0000] | 2 |");
  EXPECT_EQ(json::parse(write_report(spec, ReportFormat::json))["counts"], json({1, 2}));
}

TEST(Report, LintFindings) {
  const auto findings = lint_dataset(bundled());
  const auto csv = write_report(std::span<const LintFinding>(findings), ReportFormat::csv);
  EXPECT_NE(csv.find("Voatz,UVF,4,7,\"stored 4, expression maps to 7\"\r\n"), std::string::npos);
  EXPECT_EQ(write_report(std::span<const LintFinding>{}, ReportFormat::json), "[]\n");
}

TEST(Reproduction, ReferenceFileAndDiscrepancies) {
  const auto ref = load_reference(test::bundled_reference());
  EXPECT_EQ(ref.tm.size(), 17u);
  EXPECT_EQ(ref.ivmf.size(), 17u);
  EXPECT_EQ(ref.sensitivity.size(), 7u);
  const auto report = reproduce(bundled(), default_scheme(), ref);

  std::vector<std::string> failing;
  for (const auto* f : report.failures()) failing.push_back(f->group + "|" + f->item + "|" + f->quantity);
  const std::vector<std::string> expected{
      "sensitivity|ivmf ivmf-pu-weighted|t from printed r",
      "sensitivity|tm tm-anonymity-secrecy-weighted|p from printed t",
      "sensitivity|tm tm-verifiability-weighted|t from printed r",
      "sensitivity|tm tm-equal|t from printed r",
      "lint|Decidim UVF|stored score vs expression tier",
      "lint|Vocdoni IVF|stored score vs expression tier",
      "lint|Vocdoni UVF|stored score vs expression tier",
      "lint|Voatz UVF|stored score vs expression tier",
  };
  EXPECT_EQ(failing, expected);
  for (const auto& c : report.checks) {
    if (c.quantity == "t from printed r") {
      EXPECT_NE(c.note.find("published t inside"), std::string::npos);
    }
  }
  const auto md = write_report(report, ReportFormat::markdown);
  EXPECT_NE(md.find("| DISCREPANCY | published p inconsistent with a two-sided t test at df = 15 |"),
            std::string::npos);
}
