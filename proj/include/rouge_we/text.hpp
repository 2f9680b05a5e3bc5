#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rouge_we/porter_stemmer.hpp"

namespace rouge_we {

/// Normalized word tokens of one summary, in original order.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::string source_id;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
};

struct TokenizeConfig {
  bool lowercase = true;
  bool stem = false;
  std::unordered_set<std::string> stopwords;
};

/// Reads a whitespace-separated stopword list. Lines starting with '#' are
/// comments. Words are lowercased when `lowercase` is set so they compare
/// against tokenizer output.
inline std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path,
                                                      bool lowercase = true) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword list: " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '#') continue;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      if (end > pos) {
        std::string w = line.substr(pos, end - pos);
        if (lowercase)
          std::transform(w.begin(), w.end(), w.begin(),
                         [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        words.insert(std::move(w));
      }
      pos = end;
    }
  }
  return words;
}

namespace detail {

inline bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

inline bool is_lower_alpha(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace detail

/// Splits on whitespace, strips leading/trailing ASCII punctuation from each
/// token, then applies lowercasing, stopword removal and stemming in that
/// order. Tokens left empty are dropped.
inline TokenSequence tokenize(std::string_view raw, const TokenizeConfig& config = {},
                              std::string source_id = {}) {
  TokenSequence seq;
  seq.source_id = std::move(source_id);
  const PorterStemmer stemmer;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    while (pos < raw.size() && std::isspace(static_cast<unsigned char>(raw[pos]))) ++pos;
    std::size_t end = pos;
    while (end < raw.size() && !std::isspace(static_cast<unsigned char>(raw[end]))) ++end;
    std::size_t first = pos;
    std::size_t last = end;
    while (first < last && detail::is_ascii_punct(raw[first])) ++first;
    while (last > first && detail::is_ascii_punct(raw[last - 1])) --last;
    pos = end;
    if (first == last) continue;

    std::string token(raw.substr(first, last - first));
    if (config.lowercase)
      std::transform(token.begin(), token.end(), token.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (config.stopwords.contains(token)) continue;
    if (config.stem && detail::is_lower_alpha(token)) token = stemmer(token);
    seq.tokens.push_back(std::move(token));
  }
  return seq;
}

/// An n-gram or skip-bigram. `gap` is the number of skipped tokens between
/// the two words of a skip-bigram and 0 for contiguous units.
struct NGram {
  std::vector<std::string> words;
  int gap = 0;

  NGram() = default;
  NGram(std::vector<std::string> w, int g = 0) : words(std::move(w)), gap(g) {}

  auto operator<=>(const NGram&) const = default;
  bool operator==(const NGram&) const = default;
};

/// Multiset of units with occurrence counts. `total` is the sum of counts.
class NGramMultiset {
public:
  using Map = std::map<NGram, int>;

  void add(NGram gram, int count = 1) {
    if (count <= 0) return;
    entries_[std::move(gram)] += count;
    total_ += count;
  }

  void merge(const NGramMultiset& other) {
    for (const auto& [gram, count] : other.entries_) add(gram, count);
  }

  int count(const NGram& gram) const {
    auto it = entries_.find(gram);
    return it == entries_.end() ? 0 : it->second;
  }

  const Map& entries() const noexcept { return entries_; }
  int total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  std::size_t distinct() const noexcept { return entries_.size(); }

  bool operator==(const NGramMultiset&) const = default;

private:
  Map entries_;
  int total_ = 0;
};

/// Every contiguous window of length n, with multiplicity.
inline NGramMultiset extract_ngrams(const TokenSequence& seq, int n) {
  if (n < 1) throw std::invalid_argument("extract_ngrams: n must be >= 1");
  NGramMultiset out;
  const auto len = static_cast<int>(seq.size());
  for (int i = 0; i + n <= len; ++i) {
    std::vector<std::string> words(seq.tokens.begin() + i, seq.tokens.begin() + i + n);
    out.add(NGram{std::move(words), 0});
  }
  return out;
}

/// Ordered pairs (w_i, w_j), i < j, with at most `max_skip` tokens between
/// them. Unigrams are not included.
inline NGramMultiset extract_skip_bigrams(const TokenSequence& seq, int max_skip) {
  if (max_skip < 0) throw std::invalid_argument("extract_skip_bigrams: max_skip must be >= 0");
  NGramMultiset out;
  const auto len = static_cast<int>(seq.size());
  for (int i = 0; i < len; ++i) {
    for (int j = i + 1; j < len && j - i - 1 <= max_skip; ++j)
      out.add(NGram{{seq.tokens[i], seq.tokens[j]}, j - i - 1});
  }
  return out;
}

inline std::string join(const std::vector<std::string>& words, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += sep;
    out += words[i];
  }
  return out;
}

}  // namespace rouge_we
