#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ivmf/error.hpp"

namespace ivmf {

// Operational burden a single component places on the deployer.
enum class ComplexityClass : int {
  single_component = 1,
  public_network = 2,
  independent_parties = 3,
  multi_party_computation = 4,
  dedicated_network = 5,
};

constexpr bool is_valid_complexity_class(int value) { return value >= 1 && value <= 5; }

enum class SecurityProperty : int { sec = 0, anon, ivf, uvf, evf, cres };

inline constexpr std::size_t property_count = 6;

inline constexpr std::array<SecurityProperty, property_count> all_properties{
    SecurityProperty::sec, SecurityProperty::anon, SecurityProperty::ivf,
    SecurityProperty::uvf, SecurityProperty::evf,  SecurityProperty::cres,
};

constexpr std::size_t index_of(SecurityProperty p) { return static_cast<std::size_t>(p); }

constexpr std::string_view property_symbol(SecurityProperty p) {
  constexpr std::array<std::string_view, property_count> symbols{"SEC", "ANON", "IVF",
                                                                 "UVF", "EVF",  "CRES"};
  return symbols[index_of(p)];
}

constexpr std::string_view property_title(SecurityProperty p) {
  constexpr std::array<std::string_view, property_count> titles{
      "Voting Secrecy",          "Voter Anonymity",          "Individual Verifiability",
      "Universal Verifiability", "Eligibility Verifiability", "Coercion Resistance"};
  return titles[index_of(p)];
}

constexpr std::optional<SecurityProperty> property_from_symbol(std::string_view symbol) {
  for (auto p : all_properties) {
    if (property_symbol(p) == symbol) return p;
  }
  return std::nullopt;
}

// CRES has its own 0-4 scale; the other five share the 0-10 trust-tier scale.
constexpr int property_max_score(SecurityProperty p) {
  return p == SecurityProperty::cres ? 4 : 10;
}

inline constexpr int max_practical_usage = 3;

struct ComponentSpec {
  std::string name;
  ComplexityClass complexity_class = ComplexityClass::single_component;

  bool operator==(const ComponentSpec&) const = default;
};

struct TrustAssignment {
  SecurityProperty property = SecurityProperty::sec;
  // Authoritative ordinal score. The expression is an annotation and may disagree.
  int score = 0;
  std::optional<std::string> expression;
  std::string justification;

  bool operator==(const TrustAssignment&) const = default;
};

struct ProtocolRecord {
  std::string name;
  std::vector<ComponentSpec> components;
  int pu = 0;
  std::map<SecurityProperty, TrustAssignment> assignments;
  std::vector<std::string> sources;

  [[nodiscard]] const TrustAssignment& assignment(SecurityProperty p) const {
    auto it = assignments.find(p);
    if (it == assignments.end()) {
      throw Error(Errc::invariant_violation, "protocol '" + name + "' has no " +
                                                 std::string(property_symbol(p)) + " assignment");
    }
    return it->second;
  }

  [[nodiscard]] int score(SecurityProperty p) const { return assignment(p).score; }

  bool operator==(const ProtocolRecord&) const = default;
};

using PropertyWeights = std::array<double, property_count>;

// Three composite weights plus one weight per security property.
struct WeightScheme {
  std::string name;
  double w_cmpx = 0.0;
  double w_pu = 0.0;
  double w_tm = 0.0;
  PropertyWeights w_property{};
  // Free-form note, e.g. marking a scenario as illustrative.
  std::string description;

  [[nodiscard]] double weight(SecurityProperty p) const { return w_property[index_of(p)]; }
  double& weight(SecurityProperty p) { return w_property[index_of(p)]; }

  [[nodiscard]] bool all_finite() const {
    return std::isfinite(w_cmpx) && std::isfinite(w_pu) && std::isfinite(w_tm) &&
           std::all_of(w_property.begin(), w_property.end(),
                       [](double w) { return std::isfinite(w); });
  }

  [[nodiscard]] bool valid_for_ranking() const {
    return all_finite() && (w_tm == 0.0 || std::any_of(w_property.begin(), w_property.end(),
                                                       [](double w) { return w != 0.0; }));
  }

  bool operator==(const WeightScheme&) const = default;
};

// The baseline scheme. The six property weights reproduce every published
// trust-model score exactly; tools/derive_tm_weights re-derives them.
inline WeightScheme default_scheme() {
  WeightScheme s;
  s.name = "default";
  s.w_cmpx = -0.5;
  s.w_pu = 3.0;
  s.w_tm = 1.0;
  s.w_property = {1.0, 1.6, 1.8, 2.0, 1.4, 1.2};
  return s;
}

struct Dataset {
  std::string schema_version;
  std::vector<ProtocolRecord> protocols;

  [[nodiscard]] std::size_t size() const { return protocols.size(); }

  [[nodiscard]] const ProtocolRecord* find(std::string_view name) const {
    for (const auto& p : protocols) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }

  bool operator==(const Dataset&) const = default;
};

// A violated invariant. `protocol` is empty for dataset-level rules.
struct Finding {
  std::string protocol;
  std::string field;
  std::string rule;

  [[nodiscard]] std::string to_string() const {
    std::string location = protocol.empty() ? std::string("dataset") : "'" + protocol + "'";
    if (!field.empty()) location += "." + field;
    return location + ": " + rule;
  }
  bool operator==(const Finding&) const = default;
};

inline std::vector<Finding> validate_protocol(const ProtocolRecord& p) {
  std::vector<Finding> findings;
  auto add = [&](std::string field, std::string rule) {
    findings.push_back({p.name, std::move(field), std::move(rule)});
  };

  if (p.name.empty()) add("name", "protocol name is empty");
  if (p.components.empty()) add("components", "protocol has no components");
  for (std::size_t i = 0; i < p.components.size(); ++i) {
    const auto& c = p.components[i];
    const std::string field = "components[" + std::to_string(i) + "]";
    if (c.name.empty()) add(field + ".name", "component name is empty");
    if (!is_valid_complexity_class(static_cast<int>(c.complexity_class))) {
      add(field + ".class", "complexity class out of range 1-5");
    }
  }
  if (p.pu < 0 || p.pu > max_practical_usage) add("pu", "pu out of range 0-3");

  for (auto prop : all_properties) {
    const std::string field = "properties." + std::string(property_symbol(prop));
    auto it = p.assignments.find(prop);
    if (it == p.assignments.end()) {
      add(field, "missing assignment");
      continue;
    }
    const auto& a = it->second;
    if (a.property != prop) add(field, "assignment is keyed under the wrong property");
    if (a.score < 0 || a.score > property_max_score(prop)) {
      add(field + ".score", "score out of range 0-" + std::to_string(property_max_score(prop)));
    }
  }
  return findings;
}

// Deterministic: findings follow dataset order, then field order within a protocol.
inline std::vector<Finding> validate_dataset(const Dataset& dataset) {
  std::vector<Finding> findings;
  if (dataset.protocols.size() < 2) {
    findings.push_back({"", "protocols", "at least 2 protocols are required"});
  }
  std::set<std::string> seen;
  for (const auto& p : dataset.protocols) {
    if (!p.name.empty() && !seen.insert(p.name).second) {
      findings.push_back({p.name, "name", "duplicate protocol name"});
    }
    auto own = validate_protocol(p);
    findings.insert(findings.end(), own.begin(), own.end());
  }
  return findings;
}

}  // namespace ivmf
