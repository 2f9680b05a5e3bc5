#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

#ifndef ROUGE_WE_CLI
#error "ROUGE_WE_CLI must name the rouge-we executable"
#endif

namespace {

namespace fs = std::filesystem;
using rouge_we::testing::TempDir;

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout when `merge` is set.
Run cli(const std::string& args, bool merge = false) {
  std::string cmd = std::string("'") + ROUGE_WE_CLI + "' " + args + (merge ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    put(dir / "cand.txt", "It is raining heavily");
    put(dir / "ref.txt", "It is pouring");
    put(dir / "same.txt", "It is pouring");
    put(dir / "vec.txt",
        "it 0 0 1 0\nis 0 0 0 1\npouring 1 0 0 0\nraining 0.8 0.6 0 0\nheavily 0 -1 0 0\n");
  }
  std::string p(const char* name) const { return "'" + (dir / name).string() + "'"; }
  TempDir dir;
};

TEST_F(CliTest, ScoreIdentical) {
  const auto r = cli("score " + p("same.txt") + " " + p("ref.txt") + " --metrics rouge-1");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "rouge-1 R=1.000000 P=1.000000 F=1.000000\n");
}

TEST_F(CliTest, ScoreDefaultMetrics) {
  const auto r = cli("score " + p("cand.txt") + " " + p("ref.txt"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out,
            "rouge-1 R=0.666667 P=0.500000 F=0.571429\n"
            "rouge-2 R=0.500000 P=0.333333 F=0.400000\n"
            "rouge-su4 R=0.500000 P=0.300000 F=0.375000\n");
}

TEST_F(CliTest, ScoreWithEmbeddings) {
  const auto r = cli("score " + p("cand.txt") + " " + p("ref.txt") +
                     " --metrics rouge-we-1 --embeddings " + p("vec.txt") + " --embeddings-format text");
  EXPECT_EQ(r.status, 0);
  // it + is + raining~pouring (0.8) over 3 reference unigrams.
  EXPECT_EQ(r.out.rfind("rouge-we-1 R=0.933333 P=0.700000", 0), 0u) << r.out;
}

TEST_F(CliTest, ConfigFile) {
  put(dir / "run.toml", "[score]\nmetrics = [\"rouge-2\"]\n");
  const auto r = cli("--config " + p("run.toml") + " score " + p("cand.txt") + " " + p("ref.txt"));
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out, "rouge-2 R=0.500000 P=0.333333 F=0.400000\n");
}

TEST_F(CliTest, Errors) {
  EXPECT_NE(cli("score " + p("cand.txt") + " " + p("missing.txt")).status, 0);
  const auto no_table = cli("score " + p("cand.txt") + " " + p("ref.txt") + " --match we", true);
  EXPECT_EQ(no_table.status, 2);
  EXPECT_NE(no_table.out.find("--embeddings"), std::string::npos);
  EXPECT_NE(cli("score " + p("cand.txt") + " " + p("ref.txt") + " --oov sometimes").status, 0);
  EXPECT_NE(cli("score " + p("cand.txt") + " " + p("ref.txt") + " --metrics rouge-7x").status, 0);
  EXPECT_NE(cli("").status, 0);
}

TEST_F(CliTest, HelpListsFlags) {
  const auto r = cli("meta-eval --help");
  EXPECT_EQ(r.status, 0);
  for (const char* flag : {"--corpus", "--judgments", "--out", "--metrics", "--match", "--embeddings",
                           "--embeddings-format", "--oov", "--multiref", "--report-component", "--lowercase",
                           "--no-lowercase", "--stem", "--stopwords", "--no-normalize", "--threads"})
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  EXPECT_EQ(cli("--help").status, 0);
}

TEST_F(CliTest, InspectEmbeddings) {
  const auto r = cli("embeddings inspect " + p("vec.txt") + " --format text --word Raining");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("size: 5\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("dim: 4\n"), std::string::npos);
  EXPECT_NE(r.out.find("vector: 0.800000 0.600000 0.000000 0.000000\n"), std::string::npos) << r.out;
  const auto oov = cli("embeddings inspect " + p("vec.txt") + " --format text --word storm");
  EXPECT_NE(oov.out.find("vector: OOV"), std::string::npos);
  EXPECT_NE(cli("embeddings inspect " + p("missing.bin")).status, 0);
}

TEST_F(CliTest, MetaEvalWritesReports) {
  rouge_we::synthetic::write_corpus(dir / "corpus", dir / "judgments.csv");
  const std::string common = "meta-eval --corpus " + p("corpus") + " --judgments " + p("judgments.csv");
  const auto r = cli(common + " --out " + p("out"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("pyramid"), std::string::npos);
  EXPECT_NE(r.out.find("rouge-su4"), std::string::npos);
  EXPECT_NE(r.out.find("n = 10 systems"), std::string::npos);

  const auto csv = slurp(dir / "out" / "report.csv");
  EXPECT_EQ(csv.rfind("metric,judgment,pearson,spearman,kendall,n\n", 0), 0u);
  // Degradation is monotone in the system index, as is the pyramid score.
  EXPECT_NE(csv.find("rouge-1,pyramid,"), std::string::npos);
  EXPECT_NE(csv.find(",1.0000,1.0000,10\n"), std::string::npos) << csv;

  const auto json = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
  EXPECT_EQ(json["n_systems"], 10);
  EXPECT_EQ(json["rows"].size(), 9u);
  EXPECT_EQ(json["config"]["metrics"].size(), 3u);

  EXPECT_NE(cli("meta-eval --corpus " + p("corpus") + " --judgments " + p("absent.csv")).status, 0);
  EXPECT_NE(cli("meta-eval --corpus " + p("nowhere") + " --judgments " + p("judgments.csv")).status, 0);
}

}  // namespace
