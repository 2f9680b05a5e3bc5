#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rouge_we/rouge.hpp"

namespace rouge_we {

enum class ScoreComponent { recall, precision, f1 };

inline std::string_view to_string(MatchKind k) { return k == MatchKind::exact ? "exact" : "we"; }
inline std::string_view to_string(OovPolicy p) { return p == OovPolicy::zero ? "zero" : "exact-fallback"; }
inline std::string_view to_string(MultiRefPolicy p) { return p == MultiRefPolicy::average ? "average" : "jackknife"; }
inline std::string_view to_string(ScoreComponent c) {
  switch (c) {
    case ScoreComponent::recall: return "recall";
    case ScoreComponent::precision: return "precision";
    case ScoreComponent::f1: return "f1";
  }
  return "recall";
}

inline MatchKind parse_match_kind(std::string_view s) {
  if (s == "exact") return MatchKind::exact;
  if (s == "we" || s == "embedding") return MatchKind::embedding;
  throw std::invalid_argument("unknown match kind '" + std::string(s) + "' (expected exact|we)");
}

inline OovPolicy parse_oov_policy(std::string_view s) {
  if (s == "zero") return OovPolicy::zero;
  if (s == "exact-fallback") return OovPolicy::exact_fallback;
  throw std::invalid_argument("unknown OOV policy '" + std::string(s) + "' (expected zero|exact-fallback)");
}

inline MultiRefPolicy parse_multiref(std::string_view s) {
  if (s == "average") return MultiRefPolicy::average;
  if (s == "jackknife") return MultiRefPolicy::jackknife;
  throw std::invalid_argument("unknown multi-reference policy '" + std::string(s) + "' (expected average|jackknife)");
}

inline ScoreComponent parse_component(std::string_view s) {
  if (s == "recall") return ScoreComponent::recall;
  if (s == "precision") return ScoreComponent::precision;
  if (s == "f1") return ScoreComponent::f1;
  throw std::invalid_argument("unknown score component '" + std::string(s) + "' (expected recall|precision|f1)");
}

inline double component(const RougeScore& s, ScoreComponent c) {
  switch (c) {
    case ScoreComponent::recall: return s.recall;
    case ScoreComponent::precision: return s.precision;
    case ScoreComponent::f1: return s.f1;
  }
  return s.recall;
}

/// One configured metric: {variant, match, oov, multiref, report}.
struct MetricConfig {
  RougeVariant variant = RougeVariant::rouge_n(1);
  MatchKind match = MatchKind::exact;
  OovPolicy oov = OovPolicy::zero;
  MultiRefPolicy multiref = MultiRefPolicy::average;
  ScoreComponent report = ScoreComponent::recall;

  /// "rouge-1" for lexical matching, "rouge-we-1" for embedding matching.
  std::string name() const {
    const std::string base = variant.name();
    if (match == MatchKind::exact) return base;
    return "rouge-we-" + base.substr(6);
  }

  MatchFunction match_function(const EmbeddingTable* table) const {
    if (match == MatchKind::exact) return MatchFunction::exact();
    if (!table) throw std::invalid_argument("metric " + name() + " requires embeddings");
    return MatchFunction::embedding(*table, oov);
  }

  bool operator==(const MetricConfig&) const = default;
};

/// Parses a metric token. "rouge-we-<v>" forces embedding matching,
/// "rouge-<v>" uses `default_match`.
inline MetricConfig parse_metric(std::string_view token, MatchKind default_match = MatchKind::exact) {
  MetricConfig cfg;
  cfg.match = default_match;
  std::string variant(token);
  if (token.starts_with("rouge-we-")) {
    cfg.match = MatchKind::embedding;
    variant = "rouge-" + std::string(token.substr(9));
  }
  auto v = RougeVariant::parse(variant);
  if (!v) throw std::invalid_argument("unknown metric '" + std::string(token) + "' (expected rouge-1|rouge-2|rouge-su4)");
  cfg.variant = *v;
  return cfg;
}

inline void to_json(nlohmann::json& j, const MetricConfig& m) {
  j = nlohmann::json{{"name", m.name()},
                     {"variant", m.variant.name()},
                     {"match", to_string(m.match)},
                     {"oov", to_string(m.oov)},
                     {"multiref", to_string(m.multiref)},
                     {"report", to_string(m.report)}};
}

inline void from_json(const nlohmann::json& j, MetricConfig& m) {
  m = parse_metric(j.at("variant").get<std::string>());
  if (j.contains("match")) m.match = parse_match_kind(j.at("match").get<std::string>());
  if (j.contains("oov")) m.oov = parse_oov_policy(j.at("oov").get<std::string>());
  if (j.contains("multiref")) m.multiref = parse_multiref(j.at("multiref").get<std::string>());
  if (j.contains("report")) m.report = parse_component(j.at("report").get<std::string>());
}

}  // namespace rouge_we
