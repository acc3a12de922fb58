#pragma once

// Collusion expressions such as "1/N + 1/n + few/1" and their mapping onto the
// 0-10 trust-tier scale.
//
//   expr   := branch ("OR" branch)*
//   branch := atom ("+" atom)*
//   atom   := ("0" | "1" | "2" | "few") "/" ("1" | "n" | "N")
//
// Atoms in a branch are a conjunction: every listed group must collude.
// OR separates alternative attack paths; the weakest path bounds the tier.

#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivmf/core_model.hpp"
#include "ivmf/error.hpp"

namespace ivmf {

// Ordered so that the defaulted comparison yields the canonical print order:
// open set first, then closed set, then single parties.
enum class Population { open_set, closed_set, single_party };
enum class Quorum { zero, one, few, majority };

struct TrustAtom {
  Population population = Population::single_party;
  Quorum quorum = Quorum::one;

  auto operator<=>(const TrustAtom&) const = default;
};

inline std::string to_string(TrustAtom atom) {
  std::string text;
  switch (atom.quorum) {
    case Quorum::zero: text = "0"; break;
    case Quorum::one: text = "1"; break;
    case Quorum::few: text = "few"; break;
    case Quorum::majority: text = "2"; break;
  }
  text += '/';
  switch (atom.population) {
    case Population::single_party: text += '1'; break;
    case Population::closed_set: text += 'n'; break;
    case Population::open_set: text += 'N'; break;
  }
  return text;
}

inline constexpr std::array<TrustAtom, 8> permitted_atoms{{
    {Population::single_party, Quorum::one},
    {Population::single_party, Quorum::few},
    {Population::closed_set, Quorum::one},
    {Population::closed_set, Quorum::few},
    {Population::closed_set, Quorum::majority},
    {Population::open_set, Quorum::one},
    {Population::open_set, Quorum::majority},
    {Population::open_set, Quorum::zero},
}};

constexpr bool is_permitted(TrustAtom atom) {
  return std::find(permitted_atoms.begin(), permitted_atoms.end(), atom) != permitted_atoms.end();
}

// Either a single conjunctive branch (`atoms`) or a disjunction (`branches`,
// each holding atoms only). Atoms and branches are kept sorted, so two
// expressions compare equal exactly when they denote the same multisets.
struct TrustExpression {
  std::vector<TrustAtom> atoms;
  std::vector<TrustExpression> branches;

  bool operator==(const TrustExpression&) const = default;
};

namespace detail {

class TrustExprParser {
 public:
  explicit TrustExprParser(std::string_view text) : text_(text) {}

  TrustExpression parse() {
    std::vector<TrustExpression> branches;
    branches.push_back(parse_branch());
    skip_space();
    while (consume("OR")) {
      branches.push_back(parse_branch());
      skip_space();
    }
    if (pos_ != text_.size()) fail({"+", "OR", "end of input"});

    if (branches.size() == 1) return std::move(branches.front());
    std::sort(branches.begin(), branches.end(),
              [](const TrustExpression& a, const TrustExpression& b) { return a.atoms < b.atoms; });
    TrustExpression expr;
    expr.branches = std::move(branches);
    return expr;
  }

 private:
  TrustExpression parse_branch() {
    TrustExpression branch;
    branch.atoms.push_back(parse_atom());
    skip_space();
    while (consume("+")) {
      branch.atoms.push_back(parse_atom());
      skip_space();
    }
    std::sort(branch.atoms.begin(), branch.atoms.end());
    return branch;
  }

  TrustAtom parse_atom() {
    skip_space();
    const std::size_t start = pos_;
    TrustAtom atom;
    if (consume("few")) {
      atom.quorum = Quorum::few;
    } else if (consume("0")) {
      atom.quorum = Quorum::zero;
    } else if (consume("1")) {
      atom.quorum = Quorum::one;
    } else if (consume("2")) {
      atom.quorum = Quorum::majority;
    } else {
      fail({"0", "1", "2", "few"});
    }
    skip_space();
    if (!consume("/")) fail({"/"});
    skip_space();
    if (consume("1")) {
      atom.population = Population::single_party;
    } else if (consume("n")) {
      atom.population = Population::closed_set;
    } else if (consume("N")) {
      atom.population = Population::open_set;
    } else {
      fail({"1", "n", "N"});
    }
    if (!is_permitted(atom)) {
      std::vector<std::string> expected;
      for (auto a : permitted_atoms) expected.push_back(to_string(a));
      throw ParseError(start, std::move(expected),
                       "atom '" + to_string(atom) + "' at offset " + std::to_string(start) +
                           " is not in the trust vocabulary");
    }
    return atom;
  }

  bool consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string message = "unexpected ";
    message += pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'" : "end of input";
    message += " at offset " + std::to_string(pos_) + ", expected one of:";
    for (const auto& e : expected) message += " " + e;
    throw ParseError(pos_, std::move(expected), message);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline std::string join_atoms(const std::vector<TrustAtom>& atoms) {
  std::string text;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i > 0) text += " + ";
    text += to_string(atoms[i]);
  }
  return text;
}

inline int branch_tier(const std::vector<TrustAtom>& atoms) {
  if (atoms.empty()) return 0;

  auto count = [&](Population pop, Quorum q) {
    return static_cast<int>(std::count(atoms.begin(), atoms.end(), TrustAtom{pop, q}));
  };
  const int single_one = count(Population::single_party, Quorum::one);
  const int single_few = count(Population::single_party, Quorum::few);
  const int closed_one = count(Population::closed_set, Quorum::one) +
                         count(Population::closed_set, Quorum::few);
  const int closed_majority = count(Population::closed_set, Quorum::majority);
  const int open_one = count(Population::open_set, Quorum::one);
  const int open_majority = count(Population::open_set, Quorum::majority);
  const int open_zero = count(Population::open_set, Quorum::zero);
  const int total = static_cast<int>(atoms.size());

  const bool has_single = single_one + single_few > 0;
  // Several single authorities collude as "a few" of them.
  const bool single_is_few = single_few > 0 || single_one > 1;
  const bool has_closed = closed_one + closed_majority > 0;

  auto unmapped = [&]() -> int {
    throw Error(Errc::unmapped_combination,
                "unmapped combination {" + join_atoms(atoms) + "}");
  };

  if (open_zero > 0) return total == 1 ? 10 : unmapped();
  if (open_majority > 0) return total == 1 ? 9 : unmapped();
  if (open_one > 1 || closed_one > 1 || closed_majority > 1) return unmapped();
  if (open_one == 1) {
    if (!has_closed && has_single && !single_is_few) return 6;
    if (closed_majority == 1 && closed_one == 0 && !has_single) return 7;
    if (closed_one == 1 && closed_majority == 0 && has_single) return 8;
    return unmapped();
  }
  if (closed_majority == 1) return closed_one == 0 && !has_single ? 4 : unmapped();
  if (closed_one == 1) return has_single ? 5 : 3;
  if (has_single) return single_is_few ? 2 : 1;
  return unmapped();
}

}  // namespace detail

// Throws ParseError carrying the byte offset and the expected-token set.
inline TrustExpression parse_trust_expr(std::string_view text) {
  return detail::TrustExprParser(text).parse();
}

// Canonical text form; parse_trust_expr(format_trust_expr(e)) == e.
inline std::string format_trust_expr(const TrustExpression& expr) {
  if (expr.branches.empty()) return detail::join_atoms(expr.atoms);
  std::string text;
  for (std::size_t i = 0; i < expr.branches.size(); ++i) {
    if (i > 0) text += " OR ";
    text += format_trust_expr(expr.branches[i]);
  }
  return text;
}

// Tier 0-10. An empty expression is tier 0 (N/A); disjunctions take the
// minimum over branches. Throws Errc::unmapped_combination otherwise.
inline int tier_of(const TrustExpression& expr) {
  if (expr.branches.empty()) return detail::branch_tier(expr.atoms);
  int tier = 10;
  for (const auto& branch : expr.branches) tier = std::min(tier, tier_of(branch));
  return tier;
}

struct LintFinding {
  std::string protocol;
  SecurityProperty property = SecurityProperty::sec;
  int stored_score = 0;
  // Absent when the expression could not be parsed or mapped.
  std::optional<int> expression_tier;
  std::string message;

  bool operator==(const LintFinding&) const = default;
};

inline std::vector<LintFinding> lint_assignment(const TrustAssignment& assignment) {
  if (!assignment.expression || assignment.property == SecurityProperty::cres) return {};

  LintFinding finding;
  finding.property = assignment.property;
  finding.stored_score = assignment.score;
  try {
    const int tier = tier_of(parse_trust_expr(*assignment.expression));
    if (tier == assignment.score) return {};
    finding.expression_tier = tier;
    finding.message = "stored " + std::to_string(assignment.score) + ", expression maps to " +
                      std::to_string(tier);
  } catch (const Error& e) {
    finding.message = "expression '" + *assignment.expression + "' rejected: " + e.what();
  }
  return {finding};
}

inline std::vector<LintFinding> lint_dataset(const Dataset& dataset) {
  std::vector<LintFinding> findings;
  for (const auto& protocol : dataset.protocols) {
    for (const auto& [property, assignment] : protocol.assignments) {
      for (auto& f : lint_assignment(assignment)) {
        f.protocol = protocol.name;
        findings.push_back(std::move(f));
      }
    }
  }
  return findings;
}

}  // namespace ivmf
