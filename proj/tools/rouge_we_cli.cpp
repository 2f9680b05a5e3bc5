// rouge-we command-line tool.
//
//   rouge-we score <candidate> <reference>...   per-metric R/P/F for one summary
//   rouge-we meta-eval --corpus D --judgments F  correlation report over a corpus
//   rouge-we embeddings inspect <path>           table statistics and lookups

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rouge_we/rouge_we.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rouge_we;

/// Thrown for unusable option combinations.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MetricOptions {
  std::vector<std::string> metrics{"rouge-1", "rouge-2", "rouge-su4"};
  std::string match = "exact";
  std::string embeddings;
  std::string embeddings_format = "binary";
  std::string oov = "zero";
  std::string multiref = "average";
  std::string report_component = "recall";
  bool lowercase = true;
  bool stem = false;
  std::string stopwords;
  bool no_normalize = false;
  unsigned threads = 1;
};

void add_metric_options(CLI::App& cmd, MetricOptions& o) {
  cmd.add_option("--metrics", o.metrics, "Metrics to compute: rouge-1, rouge-2, rouge-su4 (rouge-we-* forces we)")
      ->delimiter(',')
      ->capture_default_str();
  cmd.add_option("--match", o.match, "Similarity for rouge-* metrics: exact|we")
      ->check(CLI::IsMember({"exact", "we"}))
      ->capture_default_str();
  cmd.add_option("--embeddings", o.embeddings, "Word vectors, required for we matching");
  cmd.add_option("--embeddings-format", o.embeddings_format, "Embeddings file layout: binary|text")
      ->check(CLI::IsMember({"binary", "text"}))
      ->capture_default_str();
  cmd.add_option("--oov", o.oov, "Out-of-vocabulary rule: zero|exact-fallback")
      ->check(CLI::IsMember({"zero", "exact-fallback"}))
      ->capture_default_str();
  cmd.add_option("--multiref", o.multiref, "Multiple reference aggregation: average|jackknife")
      ->check(CLI::IsMember({"average", "jackknife"}))
      ->capture_default_str();
  cmd.add_option("--report-component", o.report_component, "Score forwarded to meta-evaluation: recall|precision|f1")
      ->check(CLI::IsMember({"recall", "precision", "f1"}))
      ->capture_default_str();
  cmd.add_flag("--lowercase,!--no-lowercase", o.lowercase, "Lowercase tokens (default on)");
  cmd.add_flag("--stem", o.stem, "Apply Porter stemming");
  cmd.add_option("--stopwords", o.stopwords, "Whitespace-separated stopword list to drop")->check(CLI::ExistingFile);
  cmd.add_flag("--no-normalize", o.no_normalize, "Keep raw vector lengths (experimental, unsupported)");
  cmd.add_option("--threads", o.threads, "Worker threads for corpus scoring")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

struct ResolvedMetrics {
  std::vector<MetricConfig> metrics;
  TokenizeConfig tokenize;
  std::optional<EmbeddingTable> table;
};

EmbeddingTable load_embeddings(const std::string& path, const std::string& format, LoadOptions opts) {
  EmbeddingTable table = format == "text" ? load_text(path, opts) : load_binary(path, opts);
  const auto& s = table.summary();
  if (s.duplicates || s.case_collisions || s.zero_vectors || s.empty_words)
    std::cerr << "embeddings: " << s.duplicates << " duplicates (last kept), " << s.case_collisions
              << " case collisions (first kept), " << s.zero_vectors << " zero vectors and " << s.empty_words
              << " empty words rejected\n";
  return table;
}

ResolvedMetrics resolve(const MetricOptions& o) {
  ResolvedMetrics r;
  const MatchKind default_match = parse_match_kind(o.match);
  for (const auto& token : o.metrics) {
    MetricConfig m = parse_metric(token, default_match);
    m.oov = parse_oov_policy(o.oov);
    m.multiref = parse_multiref(o.multiref);
    m.report = parse_component(o.report_component);
    r.metrics.push_back(m);
  }
  if (r.metrics.empty()) throw ConfigError("no metrics configured");
  r.tokenize.lowercase = o.lowercase;
  r.tokenize.stem = o.stem;
  if (!o.stopwords.empty()) r.tokenize.stopwords = load_stopwords(o.stopwords, o.lowercase);

  const bool needs_table =
      std::any_of(r.metrics.begin(), r.metrics.end(), [](const MetricConfig& m) { return m.match == MatchKind::embedding; });
  if (needs_table) {
    if (o.embeddings.empty()) throw ConfigError("embedding-based metrics require --embeddings <path>");
    r.table = load_embeddings(o.embeddings, o.embeddings_format, {o.lowercase, !o.no_normalize});
  }
  return r;
}

nlohmann::json config_json(const std::string& command, const MetricOptions& o, const ResolvedMetrics& r) {
  return nlohmann::json{{"command", command},
                        {"metrics", r.metrics},
                        {"embeddings", o.embeddings.empty() ? nlohmann::json(nullptr) : nlohmann::json(o.embeddings)},
                        {"embeddings_format", o.embeddings_format},
                        {"normalize", !o.no_normalize},
                        {"lowercase", o.lowercase},
                        {"stem", o.stem},
                        {"stopwords", o.stopwords.empty() ? nlohmann::json(nullptr) : nlohmann::json(o.stopwords)},
                        {"threads", o.threads}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string six(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

int run_score(const std::string& cand_path, const std::vector<std::string>& ref_paths, const MetricOptions& o) {
  const auto resolved = resolve(o);
  const TokenSequence cand = tokenize(read_file(cand_path), resolved.tokenize, cand_path);
  std::vector<TokenSequence> refs;
  for (const auto& p : ref_paths) refs.push_back(tokenize(read_file(p), resolved.tokenize, p));
  const EmbeddingTable* table = resolved.table ? &*resolved.table : nullptr;
  for (const auto& m : resolved.metrics) {
    const RougeScore s = rouge_score(cand, refs, m.variant, m.match_function(table), m.multiref);
    std::cout << m.name() << " R=" << six(s.recall) << " P=" << six(s.precision) << " F=" << six(s.f1) << '\n';
  }
  return 0;
}

int run_meta_eval(const std::string& corpus, const std::string& judgments_path, const std::string& out_dir,
                  const MetricOptions& o) {
  const auto resolved = resolve(o);
  const auto topics = load_corpus(corpus);
  if (topics.empty()) throw CorpusError("corpus " + corpus + " contains no topics");
  const auto judgments = load_judgments(judgments_path);

  ScoringOptions opts;
  opts.tokenize = resolved.tokenize;
  opts.table = resolved.table ? &*resolved.table : nullptr;
  opts.threads = o.threads;
  const auto scores = score_corpus(topics, resolved.metrics, opts);
  for (const auto& w : scores.warnings) std::cerr << "warning: " << w << '\n';

  const auto report = meta_evaluate(scores, judgments);
  auto config = config_json("meta-eval", o, resolved);
  config["corpus"] = corpus;
  config["judgments"] = judgments_path;
  config["topics"] = topics.size();
  write_reports(out_dir, report, config);

  print_report_table(std::cout, report);
  std::cout << "wrote " << (fs::path(out_dir) / "report.csv").string() << " and "
            << (fs::path(out_dir) / "report.json").string() << '\n';
  return 0;
}

int run_inspect(const std::string& path, const std::string& format, const std::optional<std::string>& word,
                bool lowercase, bool normalize) {
  const auto table = load_embeddings(path, format, {lowercase, normalize});
  const auto& s = table.summary();
  std::cout << "path: " << path << '\n'
            << "format: " << format << '\n'
            << "declared_size: " << s.declared_size << '\n'
            << "size: " << table.size() << '\n'
            << "dim: " << table.dim() << '\n'
            << "duplicates: " << s.duplicates << '\n'
            << "case_collisions: " << s.case_collisions << '\n'
            << "zero_vectors: " << s.zero_vectors << '\n';
  if (word) {
    std::string key = *word;
    if (lowercase)
      std::transform(key.begin(), key.end(), key.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::cout << "word: " << key << '\n';
    if (auto v = table.lookup(key)) {
      double sq = 0.0;
      std::cout << "vector:";
      for (float x : *v) {
        std::cout << ' ' << six(x);
        sq += static_cast<double>(x) * x;
      }
      std::cout << "\nnorm: " << six(std::sqrt(sq)) << '\n';
    } else {
      std::cout << "vector: OOV\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ROUGE and embedding-augmented ROUGE-WE scoring with correlation-based meta-evaluation"};
  app.set_config("--config", "", "Read options from a TOML/INI file; command-line flags take precedence");
  app.require_subcommand(1);

  MetricOptions score_opts;
  std::string cand_path;
  std::vector<std::string> ref_paths;
  auto* score = app.add_subcommand("score", "Score one candidate summary against reference summaries");
  score->add_option("candidate", cand_path, "Candidate summary text file")->required();
  score->add_option("references", ref_paths, "Reference summary text files")->required();
  add_metric_options(*score, score_opts);

  MetricOptions meta_opts;
  std::string corpus;
  std::string judgments;
  std::string out_dir = ".";
  auto* meta = app.add_subcommand("meta-eval", "Correlate metric scores with human judgments over a corpus");
  meta->add_option("--corpus", corpus, "Corpus root: <topic>/models/*.txt and <topic>/systems/*.txt")->required();
  meta->add_option("--judgments", judgments, "CSV: system_id,pyramid,responsiveness,readability")->required();
  meta->add_option("--out", out_dir, "Directory for report.csv and report.json")->capture_default_str();
  add_metric_options(*meta, meta_opts);

  std::string emb_path;
  std::string emb_format = "binary";
  std::optional<std::string> emb_word;
  bool emb_lowercase = true;
  bool emb_no_normalize = false;
  auto* embeddings = app.add_subcommand("embeddings", "Embedding table utilities");
  embeddings->require_subcommand(1);
  auto* inspect = embeddings->add_subcommand("inspect", "Print table statistics and optionally one vector");
  inspect->add_option("path", emb_path, "Embeddings file")->required();
  inspect->add_option("--format", emb_format, "binary|text")
      ->check(CLI::IsMember({"binary", "text"}))
      ->capture_default_str();
  inspect->add_option("--word", emb_word, "Word to look up");
  inspect->add_flag("--lowercase,!--no-lowercase", emb_lowercase, "Fold keys to lowercase (default on)");
  inspect->add_flag("--no-normalize", emb_no_normalize, "Keep raw vector lengths");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*score) return run_score(cand_path, ref_paths, score_opts);
    if (*meta) return run_meta_eval(corpus, judgments, out_dir, meta_opts);
    if (*inspect) return run_inspect(emb_path, emb_format, emb_word, emb_lowercase, !emb_no_normalize);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
