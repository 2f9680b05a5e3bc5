#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "rouge_we/embeddings.hpp"
#include "rouge_we/text.hpp"

namespace rouge_we {

enum class MatchKind { exact, embedding };
enum class OovPolicy { zero, exact_fallback };
enum class MultiRefPolicy { average, jackknife };

/// Word/n-gram similarity used to credit overlaps. `exact` never consults
/// the table. The table must outlive the match function.
struct MatchFunction {
  MatchKind kind = MatchKind::exact;
  const EmbeddingTable* table = nullptr;
  OovPolicy oov_policy = OovPolicy::zero;

  static MatchFunction exact() { return {}; }
  static MatchFunction embedding(const EmbeddingTable& t, OovPolicy oov = OovPolicy::zero) {
    return {MatchKind::embedding, &t, oov};
  }
};

struct RougeVariant {
  enum class Family { n, su };

  Family family = Family::n;
  int n = 1;
  int max_skip = 4;
  bool include_unigrams = true;

  static RougeVariant rouge_n(int n) {
    if (n < 1) throw std::invalid_argument("ROUGE-N requires n >= 1");
    return {Family::n, n, 0, false};
  }
  static RougeVariant rouge_su(int max_skip, bool include_unigrams = true) {
    if (max_skip < 0) throw std::invalid_argument("ROUGE-SU requires max_skip >= 0");
    return {Family::su, 2, max_skip, include_unigrams};
  }

  /// "rouge-2", "rouge-su4", or "rouge-s4" for skip-bigrams without unigrams.
  std::string name() const {
    if (family == Family::n) return "rouge-" + std::to_string(n);
    return std::string(include_unigrams ? "rouge-su" : "rouge-s") + std::to_string(max_skip);
  }

  /// Inverse of name(); nullopt for anything else.
  static std::optional<RougeVariant> parse(std::string_view s) {
    auto number = [](std::string_view digits) -> std::optional<int> {
      if (digits.empty() || digits.size() > 3) return std::nullopt;
      int v = 0;
      for (char c : digits) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
      }
      return v;
    };
    if (!s.starts_with("rouge-")) return std::nullopt;
    s.remove_prefix(6);
    if (s.starts_with("su")) {
      if (auto k = number(s.substr(2))) return rouge_su(*k, true);
      return std::nullopt;
    }
    if (s.starts_with("s")) {
      if (auto k = number(s.substr(1))) return rouge_su(*k, false);
      return std::nullopt;
    }
    if (auto k = number(s); k && *k >= 1) return rouge_n(*k);
    return std::nullopt;
  }

  bool operator==(const RougeVariant&) const = default;
};

struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double soft_match_count = 0.0;
  int ref_total = 0;
  int cand_total = 0;
};

/// Lexical match: 1 when the word lists are equal element-wise. The skip gap
/// is not part of the comparison.
inline double f_exact(const NGram& a, const NGram& b) { return a.words == b.words ? 1.0 : 0.0; }

namespace detail {

// Similarity of two composed units, or of their surface forms when either is
// out of vocabulary. Units of different length never match: under ROUGE-SU a
// unigram and a skip-bigram can compose to parallel vectors.
inline double unit_similarity(const std::vector<std::string>& a, const std::optional<std::vector<double>>& va,
                              const std::vector<std::string>& b, const std::optional<std::vector<double>>& vb,
                              OovPolicy oov) {
  if (a.size() != b.size()) return 0.0;
  if (!va || !vb) {
    if (oov == OovPolicy::exact_fallback) return a == b ? 1.0 : 0.0;
    return 0.0;
  }
  if (a == b) return 1.0;
  return similarity(*va, *vb);
}

}  // namespace detail

/// Embedding similarity of two units: composed-vector cosine clamped to
/// [0, 1], with the OOV rule applied when either side has no vector.
inline double f_we(const NGram& a, const NGram& b, const EmbeddingTable& table,
                   OovPolicy oov = OovPolicy::zero) {
  const auto va = compose_ngram(table, a.words);
  const auto vb = compose_ngram(table, b.words);
  return detail::unit_similarity(a.words, va, b.words, vb, oov);
}

inline double match_similarity(const NGram& a, const NGram& b, const MatchFunction& match) {
  if (match.kind == MatchKind::exact) return f_exact(a, b);
  if (!match.table) throw std::invalid_argument("embedding match function has no table");
  return f_we(a, b, *match.table, match.oov_policy);
}

namespace detail {

// Counts per distinct word list; the skip gap does not affect matching.
inline std::map<std::vector<std::string>, int> group_by_words(const NGramMultiset& ms) {
  std::map<std::vector<std::string>, int> out;
  for (const auto& [gram, count] : ms.entries()) out[gram.words] += count;
  return out;
}

}  // namespace detail

/// Greedy one-to-one soft matching between unit instances.
///
/// All (ref, cand) pairs with positive similarity are visited by descending
/// similarity, ties broken by the reference unit's word list, then the
/// candidate's. Each visit consumes as many unconsumed instances from both
/// sides as possible. Under exact matching this reduces to clipped counting.
inline double soft_overlap(const NGramMultiset& cand, const NGramMultiset& ref, const MatchFunction& match) {
  const auto cand_units = detail::group_by_words(cand);
  const auto ref_units = detail::group_by_words(ref);

  if (match.kind == MatchKind::exact) {
    long long matched = 0;
    for (const auto& [words, rc] : ref_units) {
      auto it = cand_units.find(words);
      if (it != cand_units.end()) matched += std::min(rc, it->second);
    }
    return static_cast<double>(matched);
  }
  if (!match.table) throw std::invalid_argument("embedding match function has no table");

  struct Unit {
    const std::vector<std::string>* words;
    int remaining;
    std::optional<std::vector<double>> vec;
  };
  auto prepare = [&](const std::map<std::vector<std::string>, int>& units) {
    std::vector<Unit> out;
    out.reserve(units.size());
    for (const auto& [words, count] : units) out.push_back({&words, count, compose_ngram(*match.table, words)});
    return out;
  };
  auto refs = prepare(ref_units);
  auto cands = prepare(cand_units);

  struct Pair {
    double sim;
    std::size_t r;
    std::size_t c;
  };
  std::vector<Pair> pairs;
  for (std::size_t r = 0; r < refs.size(); ++r) {
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const double s =
          detail::unit_similarity(*refs[r].words, refs[r].vec, *cands[c].words, cands[c].vec, match.oov_policy);
      if (s > 0.0) pairs.push_back({s, r, c});
    }
  }
  // Unit vectors are built from sorted maps, so index order is word-list order.
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(b.sim, a.r, a.c) < std::tie(a.sim, b.r, b.c);
  });

  double total = 0.0;
  for (const auto& p : pairs) {
    auto& ru = refs[p.r];
    auto& cu = cands[p.c];
    const int take = std::min(ru.remaining, cu.remaining);
    if (take == 0) continue;
    ru.remaining -= take;
    cu.remaining -= take;
    total += p.sim * take;
  }
  return total;
}

/// Units scored by a variant: n-grams for ROUGE-N, skip-bigrams (plus
/// unigrams when requested) for ROUGE-SU.
inline NGramMultiset extract_units(const TokenSequence& seq, const RougeVariant& variant) {
  if (variant.family == RougeVariant::Family::n) return extract_ngrams(seq, variant.n);
  auto units = extract_skip_bigrams(seq, variant.max_skip);
  if (variant.include_unigrams) units.merge(extract_ngrams(seq, 1));
  return units;
}

inline RougeScore score_units(const NGramMultiset& cand, const NGramMultiset& ref, const MatchFunction& match) {
  RougeScore s;
  s.ref_total = ref.total();
  s.cand_total = cand.total();
  s.soft_match_count = soft_overlap(cand, ref, match);
  s.recall = s.ref_total > 0 ? std::min(1.0, s.soft_match_count / s.ref_total) : 0.0;
  s.precision = s.cand_total > 0 ? std::min(1.0, s.soft_match_count / s.cand_total) : 0.0;
  s.f1 = (s.recall + s.precision) > 0.0 ? 2.0 * s.recall * s.precision / (s.recall + s.precision) : 0.0;
  return s;
}

/// Combines per-reference scores.
///
/// `average` takes the mean of each component. `jackknife` forms K
/// leave-one-out subsets of the K references, takes the best value of each
/// component within a subset, and averages over subsets (K == 1 degenerates
/// to the single score). In the combined score, the three counts are the sums
/// over all references.
inline RougeScore combine_references(std::span<const RougeScore> per_ref, MultiRefPolicy policy) {
  if (per_ref.empty()) throw std::invalid_argument("combine_references: no reference scores");
  RougeScore out;
  for (const auto& s : per_ref) {
    out.soft_match_count += s.soft_match_count;
    out.ref_total += s.ref_total;
    out.cand_total += s.cand_total;
  }
  const std::size_t k = per_ref.size();
  if (policy == MultiRefPolicy::average || k == 1) {
    for (const auto& s : per_ref) {
      out.recall += s.recall;
      out.precision += s.precision;
      out.f1 += s.f1;
    }
    out.recall /= static_cast<double>(k);
    out.precision /= static_cast<double>(k);
    out.f1 /= static_cast<double>(k);
    return out;
  }
  for (std::size_t held_out = 0; held_out < k; ++held_out) {
    double r = 0.0;
    double p = 0.0;
    double f = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == held_out) continue;
      r = std::max(r, per_ref[i].recall);
      p = std::max(p, per_ref[i].precision);
      f = std::max(f, per_ref[i].f1);
    }
    out.recall += r;
    out.precision += p;
    out.f1 += f;
  }
  out.recall /= static_cast<double>(k);
  out.precision /= static_cast<double>(k);
  out.f1 /= static_cast<double>(k);
  return out;
}

inline RougeScore rouge_score(const TokenSequence& cand, std::span<const TokenSequence> refs,
                              const RougeVariant& variant, const MatchFunction& match,
                              MultiRefPolicy multiref = MultiRefPolicy::average) {
  if (refs.empty()) throw std::invalid_argument("rouge_score: at least one reference is required");
  if (match.kind == MatchKind::embedding && !match.table)
    throw std::invalid_argument("rouge_score: embedding match requires a table");
  const auto cand_units = extract_units(cand, variant);
  std::vector<RougeScore> per_ref;
  per_ref.reserve(refs.size());
  for (const auto& ref : refs) per_ref.push_back(score_units(cand_units, extract_units(ref, variant), match));
  return combine_references(per_ref, multiref);
}

inline RougeScore rouge_score(const TokenSequence& cand, const TokenSequence& ref, const RougeVariant& variant,
                              const MatchFunction& match) {
  return rouge_score(cand, std::span<const TokenSequence>(&ref, 1), variant, match);
}

/// The variants scored when none are configured: ROUGE-1, ROUGE-2, ROUGE-SU4.
inline std::vector<RougeVariant> default_variants() {
  return {RougeVariant::rouge_n(1), RougeVariant::rouge_n(2), RougeVariant::rouge_su(4)};
}

}  // namespace rouge_we
