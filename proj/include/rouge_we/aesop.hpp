#pragma once

// Meta-evaluation over an AESOP-style corpus: score every system summary
// against its topic's model summaries, average per system, and correlate the
// per-system means with human judgments.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rouge_we/correlation.hpp"
#include "rouge_we/metric_config.hpp"
#include "rouge_we/rouge.hpp"
#include "rouge_we/text.hpp"

namespace rouge_we {

class CorpusError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Summary {
  std::string id;
  std::string text;
};

struct Topic {
  std::string topic_id;
  std::vector<Summary> model_summaries;
  std::vector<Summary> system_summaries;
};

namespace detail {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw CorpusError("cannot read " + path.string());
  return ss.str();
}

// *.txt files of a directory, sorted by id.
inline std::vector<Summary> read_summaries(const std::filesystem::path& dir) {
  std::vector<Summary> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    out.push_back({entry.path().stem().string(), read_text_file(entry.path())});
  }
  if (ec) throw CorpusError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end(), [](const Summary& a, const Summary& b) { return a.id < b.id; });
  return out;
}

}  // namespace detail

/// Reads `<root>/<topic>/models/*.txt` and `<root>/<topic>/systems/*.txt`.
/// Topics and summaries come back sorted by id.
inline std::vector<Topic> load_corpus(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw CorpusError("corpus root is not a directory: " + root.string());
  std::vector<fs::path> topic_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) topic_dirs.push_back(entry.path());
  std::sort(topic_dirs.begin(), topic_dirs.end());

  std::vector<Topic> topics;
  for (const auto& dir : topic_dirs) {
    Topic t;
    t.topic_id = dir.filename().string();
    if (!fs::is_directory(dir / "models")) throw CorpusError("topic " + t.topic_id + " has no models/ directory");
    t.model_summaries = detail::read_summaries(dir / "models");
    if (t.model_summaries.empty()) throw CorpusError("topic " + t.topic_id + " has no model summaries");
    if (fs::is_directory(dir / "systems")) t.system_summaries = detail::read_summaries(dir / "systems");
    topics.push_back(std::move(t));
  }
  return topics;
}

enum class JudgmentType { pyramid, responsiveness, readability };

inline constexpr JudgmentType kJudgmentTypes[] = {JudgmentType::pyramid, JudgmentType::responsiveness,
                                                  JudgmentType::readability};

inline std::string_view to_string(JudgmentType t) {
  switch (t) {
    case JudgmentType::pyramid: return "pyramid";
    case JudgmentType::responsiveness: return "responsiveness";
    case JudgmentType::readability: return "readability";
  }
  return "pyramid";
}

struct Judgment {
  double pyramid = 0.0;
  double responsiveness = 0.0;
  double readability = 0.0;

  double get(JudgmentType t) const {
    switch (t) {
      case JudgmentType::pyramid: return pyramid;
      case JudgmentType::responsiveness: return responsiveness;
      case JudgmentType::readability: return readability;
    }
    return pyramid;
  }
};

struct HumanJudgments {
  std::map<std::string, Judgment> by_system;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split_csv_row(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline double parse_score(const std::string& field, std::size_t row, std::string_view column) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size() || !std::isfinite(v))
    throw CorpusError("judgments row " + std::to_string(row) + ": non-numeric " + std::string(column) + " '" +
                      field + "'");
  return v;
}

}  // namespace detail

/// CSV with header `system_id,pyramid,responsiveness,readability`. Row
/// numbers in errors count the header as row 1.
inline HumanJudgments parse_judgments(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  HumanJudgments out;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_row(line);
    if (!header_seen) {
      header_seen = true;
      if (fields != std::vector<std::string>{"system_id", "pyramid", "responsiveness", "readability"})
        throw CorpusError("judgments header must be 'system_id,pyramid,responsiveness,readability'");
      continue;
    }
    if (fields.size() != 4)
      throw CorpusError("judgments row " + std::to_string(row) + ": expected 4 fields, got " +
                        std::to_string(fields.size()));
    if (fields[0].empty()) throw CorpusError("judgments row " + std::to_string(row) + ": empty system_id");
    Judgment j{detail::parse_score(fields[1], row, "pyramid"), detail::parse_score(fields[2], row, "responsiveness"),
               detail::parse_score(fields[3], row, "readability")};
    if (!out.by_system.emplace(fields[0], j).second)
      throw CorpusError("judgments row " + std::to_string(row) + ": duplicate system_id '" + fields[0] + "'");
  }
  if (!header_seen) throw CorpusError("judgments file is empty");
  return out;
}

inline HumanJudgments load_judgments(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot read judgments file " + path.string());
  return parse_judgments(in);
}

struct ScoringOptions {
  TokenizeConfig tokenize;
  const EmbeddingTable* table = nullptr;
  unsigned threads = 1;
  /// Systems that get a row even when they have no summary in any topic.
  std::vector<std::string> expected_systems;
};

/// Per-system mean over topics of each metric's reported component.
struct SystemScores {
  std::vector<MetricConfig> metrics;
  std::vector<std::string> systems;        // sorted
  std::vector<std::vector<double>> means;  // [metric][system]
  std::vector<std::string> warnings;

  std::optional<double> get(std::size_t metric, std::string_view system) const {
    auto it = std::lower_bound(systems.begin(), systems.end(), system);
    if (it == systems.end() || *it != system) return std::nullopt;
    return means[metric][static_cast<std::size_t>(it - systems.begin())];
  }
};

/// Scores every (metric, topic, system) cell, in parallel when
/// `options.threads > 1`, then folds per system in fixed (metric, system,
/// topic) order so the result does not depend on scheduling. A system with no
/// summary for a topic, or whose scoring fails, gets 0 for that topic.
inline SystemScores score_corpus(const std::vector<Topic>& topics, const std::vector<MetricConfig>& metrics,
                                 const ScoringOptions& options = {}) {
  if (topics.empty()) throw CorpusError("score_corpus: no topics");
  for (const auto& m : metrics)
    if (m.match == MatchKind::embedding && !options.table)
      throw std::invalid_argument("metric " + m.name() + " requires an embeddings table");

  SystemScores out;
  out.metrics = metrics;
  std::set<std::string> system_set(options.expected_systems.begin(), options.expected_systems.end());
  for (const auto& t : topics)
    for (const auto& s : t.system_summaries) system_set.insert(s.id);
  out.systems.assign(system_set.begin(), system_set.end());

  const std::size_t n_topics = topics.size();
  const std::size_t n_systems = out.systems.size();
  const std::size_t n_metrics = metrics.size();

  // Tokenize once. Missing summaries stay nullopt.
  std::vector<std::vector<TokenSequence>> models(n_topics);
  std::vector<std::vector<std::optional<TokenSequence>>> candidates(n_topics,
                                                                    std::vector<std::optional<TokenSequence>>(n_systems));
  for (std::size_t t = 0; t < n_topics; ++t) {
    for (const auto& m : topics[t].model_summaries)
      models[t].push_back(tokenize(m.text, options.tokenize, m.id));
    for (const auto& s : topics[t].system_summaries) {
      const auto it = std::lower_bound(out.systems.begin(), out.systems.end(), s.id);
      auto& slot = candidates[t][static_cast<std::size_t>(it - out.systems.begin())];
      if (slot) throw CorpusError("topic " + topics[t].topic_id + " has duplicate system '" + s.id + "'");
      slot = tokenize(s.text, options.tokenize, s.id);
    }
  }

  struct Cell {
    double value = 0.0;
    std::string warning;
  };
  const std::size_t n_cells = n_metrics * n_systems * n_topics;
  std::vector<Cell> cells(n_cells);
  auto cell_index = [&](std::size_t m, std::size_t s, std::size_t t) { return (m * n_systems + s) * n_topics + t; };

  auto work = [&](std::size_t i) {
    const std::size_t t = i % n_topics;
    const std::size_t s = (i / n_topics) % n_systems;
    const std::size_t m = i / (n_topics * n_systems);
    Cell& cell = cells[cell_index(m, s, t)];
    const auto& cand = candidates[t][s];
    if (!cand) {
      if (m == 0)
        cell.warning = "system " + out.systems[s] + " has no summary for topic " + topics[t].topic_id + "; scored 0";
      return;
    }
    try {
      const auto& metric = metrics[m];
      const RougeScore score =
          rouge_score(*cand, models[t], metric.variant, metric.match_function(options.table), metric.multiref);
      cell.value = component(score, metric.report);
    } catch (const std::exception& e) {
      cell.value = 0.0;
      cell.warning = "scoring " + metrics[m].name() + " for system " + out.systems[s] + " on topic " +
                     topics[t].topic_id + " failed: " + e.what() + "; scored 0";
    }
  };

  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1 || n_cells < 2) {
    for (std::size_t i = 0; i < n_cells; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(threads, n_cells); ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n_cells; i = next++) work(i);
      });
  }

  out.means.assign(n_metrics, std::vector<double>(n_systems, 0.0));
  for (std::size_t m = 0; m < n_metrics; ++m) {
    for (std::size_t s = 0; s < n_systems; ++s) {
      double sum = 0.0;
      for (std::size_t t = 0; t < n_topics; ++t) {
        const Cell& c = cells[cell_index(m, s, t)];
        sum += c.value;
        if (!c.warning.empty()) out.warnings.push_back(c.warning);
      }
      out.means[m][s] = sum / static_cast<double>(n_topics);
    }
  }
  for (std::size_t s = 0; s < n_systems; ++s) {
    const bool any = std::any_of(candidates.begin(), candidates.end(), [&](const auto& row) { return row[s].has_value(); });
    if (!any) out.warnings.push_back("system " + out.systems[s] + " has no summaries; all metrics scored 0");
  }
  return out;
}

struct CorrelationRow {
  std::string metric;
  JudgmentType judgment = JudgmentType::pyramid;
  /// nullopt when the coefficients are undefined (a constant side).
  std::optional<CorrelationTriple> coefficients;
  std::string error;
  std::size_t n = 0;
};

struct MetaEvalReport {
  std::vector<std::string> metrics;  // configured order
  std::vector<CorrelationRow> rows;  // metric-major, judgment-minor
  std::vector<std::string> systems;  // correlated systems
  std::size_t n_systems = 0;
};

/// Correlates each metric's per-system means with every judgment type over
/// the systems present in both the scores and the judgments.
inline MetaEvalReport meta_evaluate(const SystemScores& scores, const HumanJudgments& judgments) {
  MetaEvalReport report;
  for (const auto& s : scores.systems)
    if (judgments.by_system.contains(s)) report.systems.push_back(s);
  report.n_systems = report.systems.size();
  if (report.n_systems < 2)
    throw CorpusError("meta-evaluation needs at least 2 systems with both scores and judgments, found " +
                      std::to_string(report.n_systems));

  for (std::size_t m = 0; m < scores.metrics.size(); ++m) {
    const std::string name = scores.metrics[m].name();
    report.metrics.push_back(name);
    std::vector<double> metric_values;
    for (const auto& s : report.systems) metric_values.push_back(*scores.get(m, s));
    for (JudgmentType type : kJudgmentTypes) {
      std::vector<double> human;
      for (const auto& s : report.systems) human.push_back(judgments.by_system.at(s).get(type));
      CorrelationRow row{name, type, std::nullopt, {}, report.n_systems};
      try {
        row.coefficients = correlate(metric_values, human);
      } catch (const UndefinedCorrelation& e) {
        row.error = e.what();
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

namespace detail {

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace detail

/// Columns: metric, judgment, pearson, spearman, kendall, n. Undefined
/// coefficients are written as "nan".
inline void write_report_csv(std::ostream& out, const MetaEvalReport& report) {
  out << "metric,judgment,pearson,spearman,kendall,n\n";
  for (const auto& row : report.rows) {
    out << row.metric << ',' << to_string(row.judgment) << ',';
    if (row.coefficients) {
      out << detail::fixed(row.coefficients->pearson, 4) << ',' << detail::fixed(row.coefficients->spearman, 4)
          << ',' << detail::fixed(row.coefficients->kendall, 4);
    } else {
      out << "nan,nan,nan";
    }
    out << ',' << row.n << '\n';
  }
}

inline nlohmann::json report_to_json(const MetaEvalReport& report, const nlohmann::json& config = nullptr) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r{{"metric", row.metric}, {"judgment", to_string(row.judgment)}, {"n", row.n}};
    if (row.coefficients) {
      r["pearson"] = row.coefficients->pearson;
      r["spearman"] = row.coefficients->spearman;
      r["kendall"] = row.coefficients->kendall;
    } else {
      r["pearson"] = nullptr;
      r["spearman"] = nullptr;
      r["kendall"] = nullptr;
      r["error"] = row.error;
    }
    rows.push_back(std::move(r));
  }
  nlohmann::json j{{"n_systems", report.n_systems}, {"systems", report.systems}, {"rows", rows}};
  if (!config.is_null()) j["config"] = config;
  return j;
}

/// One row per metric, P/S/K columns grouped by judgment type.
inline void print_report_table(std::ostream& out, const MetaEvalReport& report) {
  std::size_t width = 7;
  for (const auto& m : report.metrics) width = std::max(width, m.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  auto emit = [&](std::string line) {
    line.erase(line.find_last_not_of(' ') + 1);
    out << line << '\n';
  };
  auto triple = [&](const std::string& p, const std::string& s, const std::string& k) {
    return pad(p, 7) + ' ' + pad(s, 7) + ' ' + pad(k, 7);
  };

  std::string line = pad("", width);
  for (JudgmentType t : kJudgmentTypes) line += " | " + pad(std::string(to_string(t)), 23);
  emit(line);
  line = pad("Measure", width);
  for (std::size_t i = 0; i < 3; ++i) line += " | " + triple("P", "S", "K");
  emit(line);
  line = std::string(width, '-');
  for (std::size_t i = 0; i < 3; ++i) line += "-+-" + std::string(23, '-');
  emit(line);
  for (const auto& metric : report.metrics) {
    line = pad(metric, width);
    for (JudgmentType t : kJudgmentTypes) {
      const auto it = std::find_if(report.rows.begin(), report.rows.end(),
                                   [&](const CorrelationRow& r) { return r.metric == metric && r.judgment == t; });
      line += " | ";
      if (it != report.rows.end() && it->coefficients) {
        line += triple(detail::fixed(it->coefficients->pearson, 4), detail::fixed(it->coefficients->spearman, 4),
                       detail::fixed(it->coefficients->kendall, 4));
      } else {
        line += triple("nan", "nan", "nan");
      }
    }
    emit(line);
  }
  out << "n = " << report.n_systems << " systems\n";
}

/// Writes report.csv and report.json into `dir`, creating it if needed.
inline void write_reports(const std::filesystem::path& dir, const MetaEvalReport& report,
                          const nlohmann::json& config = nullptr) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "report.csv", std::ios::binary);
    if (!csv) throw CorpusError("cannot write " + (dir / "report.csv").string());
    write_report_csv(csv, report);
  }
  std::ofstream json(dir / "report.json", std::ios::binary);
  if (!json) throw CorpusError("cannot write " + (dir / "report.json").string());
  json << report_to_json(report, config).dump(2) << '\n';
}

}  // namespace rouge_we
