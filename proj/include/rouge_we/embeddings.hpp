#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rouge_we {

class EmbeddingError : public std::runtime_error {
public:
  enum class Kind { io, format, truncation, dimension };

  EmbeddingError(Kind kind, const std::string& what, std::size_t offset = 0)
      : std::runtime_error(what), kind_(kind), offset_(offset) {}

  Kind kind() const noexcept { return kind_; }
  /// Byte offset for truncation errors, line number for text format errors.
  std::size_t offset() const noexcept { return offset_; }

private:
  Kind kind_;
  std::size_t offset_;
};

struct LoadOptions {
  /// Fold keys to lowercase so tokenizer output can query the table.
  bool lowercase = true;
  /// Rescale every vector to unit L2 norm.
  bool normalize = true;
};

/// Counters reported by the loaders.
struct LoadSummary {
  std::size_t declared_size = 0;
  std::size_t duplicates = 0;       // identical key seen again, last one kept
  std::size_t case_collisions = 0;  // different source case folded to a stored key, first one kept
  std::size_t zero_vectors = 0;     // rejected, not stored
  std::size_t empty_words = 0;      // rejected, not stored
};

/// Norm below which a vector has no usable direction.
inline constexpr double kZeroNormTolerance = 1e-12;
/// A float vector whose norm is this close to 1 is already unit length and
/// is stored untouched, so that normalized tables survive a write/read cycle.
inline constexpr double kUnitNormTolerance = 1e-6;

/// Immutable word -> vector map with a fixed dimension. Vectors are stored
/// contiguously as float32 in insertion order.
class EmbeddingTable {
public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

  const std::vector<std::string>& words() const noexcept { return words_; }
  const LoadSummary& summary() const noexcept { return summary_; }

  bool contains(std::string_view word) const { return index_.contains(std::string(word)); }

  /// The stored vector for `word`, or nullopt when out of vocabulary.
  std::optional<std::span<const float>> lookup(std::string_view word) const {
    if (word.empty()) return std::nullopt;
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return vector_at(it->second);
  }

  std::span<const float> vector_at(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }

  bool operator==(const EmbeddingTable& o) const {
    return dim_ == o.dim_ && words_ == o.words_ && values_ == o.values_;
  }

  /// Builder used by the loaders and by tests constructing toy tables.
  /// Applies the key folding, duplicate, and normalization rules.
  /// Returns false when the entry was rejected or skipped.
  bool insert(std::string word, std::span<const float> vec, const LoadOptions& opts = {}) {
    if (vec.size() != dim_)
      throw EmbeddingError(EmbeddingError::Kind::dimension,
                           "vector for '" + word + "' has dimension " + std::to_string(vec.size()) +
                               ", table dimension is " + std::to_string(dim_));
    if (word.empty()) {
      ++summary_.empty_words;
      return false;
    }
    std::string key = word;
    if (opts.lowercase)
      std::transform(key.begin(), key.end(), key.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    double sq = 0.0;
    for (float v : vec) sq += static_cast<double>(v) * static_cast<double>(v);
    const double norm = std::sqrt(sq);
    if (!(norm >= kZeroNormTolerance)) {
      ++summary_.zero_vectors;
      return false;
    }

    std::size_t slot;
    if (auto it = index_.find(key); it != index_.end()) {
      if (sources_[it->second] != word) {
        ++summary_.case_collisions;
        return false;
      }
      ++summary_.duplicates;
      slot = it->second;
    } else {
      slot = words_.size();
      index_.emplace(key, slot);
      words_.push_back(key);
      sources_.push_back(word);
      values_.resize(values_.size() + dim_);
    }

    float* out = values_.data() + slot * dim_;
    const bool rescale = opts.normalize && std::abs(norm - 1.0) > kUnitNormTolerance;
    for (std::size_t d = 0; d < dim_; ++d)
      out[d] = rescale ? static_cast<float>(static_cast<double>(vec[d]) / norm) : vec[d];
    return true;
  }

  void set_declared_size(std::size_t n) { summary_.declared_size = n; }

private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<std::string> sources_;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
  LoadSummary summary_;
};

namespace detail {

inline std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EmbeddingError(EmbeddingError::Kind::io, "cannot open embeddings file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline float read_le_float(const char* p) {
  std::uint32_t bits = 0;
  for (int i = 3; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(p[i]);
  return std::bit_cast<float>(bits);
}

inline void write_le_float(std::ostream& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(buf, 4);
}

inline bool parse_size(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  std::size_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  out = v;
  return true;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    if (end > pos) out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

}  // namespace detail

/// Parses the word2vec binary layout from memory:
///   "<vocab_size> <dim>\n" then, per entry, the word terminated by 0x20
///   followed by dim little-endian float32 values and an optional 0x0A.
inline EmbeddingTable parse_binary(std::span<const char> bytes, const LoadOptions& opts = {}) {
  using Kind = EmbeddingError::Kind;
  const std::size_t n = bytes.size();
  std::size_t pos = 0;
  while (pos < n && bytes[pos] != '\n') ++pos;
  if (pos == n) throw EmbeddingError(Kind::format, "malformed header: missing newline");
  const auto header = detail::split_ws(std::string_view(bytes.data(), pos));
  std::size_t vocab = 0;
  std::size_t dim = 0;
  if (header.size() != 2 || !detail::parse_size(header[0], vocab) || !detail::parse_size(header[1], dim))
    throw EmbeddingError(Kind::format, "malformed header: expected '<vocab_size> <dim>'");
  if (dim == 0 && vocab > 0) throw EmbeddingError(Kind::format, "malformed header: dimension is 0");
  ++pos;

  EmbeddingTable table(dim);
  table.set_declared_size(vocab);
  std::vector<float> vec(dim);
  for (std::size_t e = 0; e < vocab; ++e) {
    while (pos < n && bytes[pos] == '\n') ++pos;
    const std::size_t word_start = pos;
    while (pos < n && bytes[pos] != ' ') ++pos;
    if (pos == n)
      throw EmbeddingError(Kind::truncation,
                           "truncated payload: entry " + std::to_string(e) + " word not terminated at byte offset " +
                               std::to_string(pos),
                           pos);
    std::string word(bytes.data() + word_start, pos - word_start);
    ++pos;
    if (n - pos < 4 * dim)
      throw EmbeddingError(Kind::truncation,
                           "truncated payload: vector for '" + word + "' ends at byte offset " + std::to_string(n) +
                               ", expected " + std::to_string(pos + 4 * dim),
                           n);
    for (std::size_t d = 0; d < dim; ++d) vec[d] = detail::read_le_float(bytes.data() + pos + 4 * d);
    pos += 4 * dim;
    if (pos < n && bytes[pos] == '\n') ++pos;
    table.insert(std::move(word), vec, opts);
  }
  return table;
}

inline EmbeddingTable load_binary(const std::filesystem::path& path, const LoadOptions& opts = {}) {
  const auto bytes = detail::read_file(path);
  return parse_binary(bytes, opts);
}

/// Text layout: optional "<vocab> <dim>" header line, then "word v1 ... vd"
/// per line. Blank lines are skipped.
inline EmbeddingTable parse_text(std::string_view text, const LoadOptions& opts = {}) {
  using Kind = EmbeddingError::Kind;
  std::optional<EmbeddingTable> table;
  std::size_t declared = 0;
  std::vector<float> vec;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool first_content_line = true;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;

    if (first_content_line) {
      first_content_line = false;
      std::size_t a = 0;
      std::size_t b = 0;
      if (fields.size() == 2 && detail::parse_size(fields[0], a) && detail::parse_size(fields[1], b)) {
        declared = a;
        table.emplace(b);
        continue;
      }
    }
    if (fields.size() < 2)
      throw EmbeddingError(Kind::format, "line " + std::to_string(line_no) + ": word without vector values", line_no);
    const std::size_t dim = fields.size() - 1;
    if (!table) table.emplace(dim);
    if (dim != table->dim())
      throw EmbeddingError(Kind::format,
                           "line " + std::to_string(line_no) + ": " + std::to_string(dim) + " values, expected " +
                               std::to_string(table->dim()),
                           line_no);
    vec.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      const std::string field(fields[d + 1]);
      char* end = nullptr;
      vec[d] = std::strtof(field.c_str(), &end);
      if (end != field.c_str() + field.size())
        throw EmbeddingError(Kind::format,
                             "line " + std::to_string(line_no) + ": non-numeric value '" + field + "'", line_no);
    }
    table->insert(std::string(fields[0]), vec, opts);
  }
  if (!table) table.emplace(0);
  table->set_declared_size(declared ? declared : table->size());
  return std::move(*table);
}

inline EmbeddingTable load_text(const std::filesystem::path& path, const LoadOptions& opts = {}) {
  const auto bytes = detail::read_file(path);
  return parse_text(std::string_view(bytes.data(), bytes.size()), opts);
}

/// Writes the word2vec binary layout, one trailing newline per entry.
inline void write_binary(std::ostream& out, const EmbeddingTable& table) {
  out << table.size() << ' ' << table.dim() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words()[i] << ' ';
    for (float v : table.vector_at(i)) detail::write_le_float(out, v);
    out << '\n';
  }
}

inline void save_binary(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EmbeddingError(EmbeddingError::Kind::io, "cannot write embeddings file: " + path.string());
  write_binary(out, table);
}

/// Element-wise product of the constituent word vectors, rescaled to unit
/// length. nullopt when any word is out of vocabulary or the product has no
/// direction left.
inline std::optional<std::vector<double>> compose_ngram(const EmbeddingTable& table,
                                                        std::span<const std::string> words) {
  if (words.empty()) return std::nullopt;
  std::vector<double> acc;
  for (const auto& w : words) {
    auto v = table.lookup(w);
    if (!v) return std::nullopt;
    if (acc.empty()) {
      acc.assign(v->begin(), v->end());
    } else {
      for (std::size_t d = 0; d < acc.size(); ++d) acc[d] *= static_cast<double>((*v)[d]);
    }
  }
  if (words.size() == 1) return acc;
  double sq = 0.0;
  for (double x : acc) sq += x * x;
  const double norm = std::sqrt(sq);
  if (!(norm >= kZeroNormTolerance)) return std::nullopt;
  for (double& x : acc) x /= norm;
  return acc;
}

/// Dot product clamped to [0, 1]. For unit vectors this is the cosine with
/// negative values mapped to no credit.
template <typename A, typename B>
double similarity(std::span<const A> v1, std::span<const B> v2) {
  if (v1.size() != v2.size())
    throw std::invalid_argument("similarity: dimension mismatch (" + std::to_string(v1.size()) + " vs " +
                                std::to_string(v2.size()) + ")");
  double dot = 0.0;
  for (std::size_t d = 0; d < v1.size(); ++d) dot += static_cast<double>(v1[d]) * static_cast<double>(v2[d]);
  return std::clamp(dot, 0.0, 1.0);
}

inline double similarity(const std::vector<double>& v1, const std::vector<double>& v2) {
  return similarity(std::span<const double>(v1), std::span<const double>(v2));
}

}  // namespace rouge_we
