#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "rouge_we/text.hpp"
#include "support/temp_dir.hpp"

#include <fstream>

namespace rouge_we {
namespace {

using Words = std::vector<std::string>;

TEST(Tokenize, LowercasesAndStripsTerminalPunctuation) {
  EXPECT_EQ(tokenize("It is raining heavily.").tokens, (Words{"it", "is", "raining", "heavily"}));
  EXPECT_EQ(tokenize("It is pouring").tokens, (Words{"it", "is", "pouring"}));
}

TEST(Tokenize, EmptyAndWhitespaceOnly) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" \t\n  ").empty());
  EXPECT_TRUE(tokenize("-- ... !!").empty());
}

TEST(Tokenize, KeepsInteriorPunctuation) {
  EXPECT_EQ(tokenize("\"U.S.-led\" forces, (reportedly) didn't").tokens,
            (Words{"u.s.-led", "forces", "reportedly", "didn't"}));
}

TEST(Tokenize, ConfigFlags) {
  TokenizeConfig keep_case;
  keep_case.lowercase = false;
  EXPECT_EQ(tokenize("It Is", keep_case).tokens, (Words{"It", "Is"}));

  TokenizeConfig stops;
  stops.stopwords = {"it", "is"};
  EXPECT_EQ(tokenize("It is pouring", stops).tokens, (Words{"pouring"}));

  TokenizeConfig stem;
  stem.stem = true;
  EXPECT_EQ(tokenize("It is raining heavily", stem).tokens, (Words{"it", "is", "rain", "heavili"}));
  EXPECT_EQ(tokenize("Bush's 2008", stem).tokens, (Words{"bush's", "2008"}));
}

TEST(Tokenize, SourceIdCarried) { EXPECT_EQ(tokenize("a", {}, "sys7").source_id, "sys7"); }

TEST(Tokenize, IdempotentOnJoinedOutput) {
  std::mt19937 rng(7);
  const std::string alphabet = "abcXYZ .,;:!?'\"()-\t\n";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 60);
  for (int trial = 0; trial < 500; ++trial) {
    std::string raw;
    for (int i = len(rng); i > 0; --i) raw += alphabet[pick(rng)];
    const auto once = tokenize(raw);
    for (const auto& tok : once.tokens) {
      ASSERT_FALSE(tok.empty());
      ASSERT_EQ(tok.find_first_of(" \t\n"), std::string::npos);
    }
    EXPECT_EQ(tokenize(join(once.tokens)).tokens, once.tokens) << raw;
  }
}

TEST(Stopwords, LoadsAndLowercases) {
  testing::TempDir dir;
  std::ofstream(dir / "stop.txt") << "# comment line\nThe a\n  of\n";
  const auto words = load_stopwords(dir / "stop.txt");
  EXPECT_EQ(words, (std::unordered_set<std::string>{"the", "a", "of"}));
  EXPECT_THROW(load_stopwords(dir / "missing.txt"), std::runtime_error);
}

TEST(PorterStemmer, ReferenceVocabulary) {
  // Expected stems produced by an independent Porter implementation.
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"caresses", "caress"},   {"ponies", "poni"},         {"ties", "ti"},
      {"cats", "cat"},          {"feed", "feed"},           {"agreed", "agre"},
      {"plastered", "plaster"}, {"bled", "bled"},           {"motoring", "motor"},
      {"sing", "sing"},         {"conflated", "conflat"},   {"troubled", "troubl"},
      {"sized", "size"},        {"hopping", "hop"},         {"tanned", "tan"},
      {"falling", "fall"},      {"hissing", "hiss"},        {"fizzed", "fizz"},
      {"failing", "fail"},      {"filing", "file"},         {"happy", "happi"},
      {"sky", "sky"},           {"relational", "relat"},    {"conditional", "condit"},
      {"rational", "ration"},   {"valenci", "valenc"},      {"hesitanci", "hesit"},
      {"digitizer", "digit"},   {"conformabli", "conform"}, {"radicalli", "radic"},
      {"differentli", "differ"}, {"vileli", "vile"},        {"analogousli", "analog"},
      {"vietnamization", "vietnam"}, {"predication", "predic"}, {"operator", "oper"},
      {"feudalism", "feudal"},  {"decisiveness", "decis"},  {"hopefulness", "hope"},
      {"callousness", "callous"}, {"formaliti", "formal"},  {"sensitiviti", "sensit"},
      {"sensibiliti", "sensibl"}, {"triplicate", "triplic"}, {"formative", "form"},
      {"formalize", "formal"},  {"electriciti", "electr"},  {"electrical", "electr"},
      {"hopeful", "hope"},      {"goodness", "good"},       {"revival", "reviv"},
      {"allowance", "allow"},   {"inference", "infer"},     {"airliner", "airlin"},
      {"gyroscopic", "gyroscop"}, {"adjustable", "adjust"}, {"defensible", "defens"},
      {"irritant", "irrit"},    {"replacement", "replac"},  {"adjustment", "adjust"},
      {"dependent", "depend"},  {"adoption", "adopt"},      {"homologou", "homolog"},
      {"communism", "commun"},  {"activate", "activ"},      {"angulariti", "angular"},
      {"homologous", "homolog"}, {"effective", "effect"},   {"bowdlerize", "bowdler"},
      {"probate", "probat"},    {"rate", "rate"},           {"cease", "ceas"},
      {"controll", "control"},  {"roll", "roll"},           {"generalizations", "gener"},
      {"running", "run"},       {"pouring", "pour"},        {"is", "is"},
  };
  const PorterStemmer stem;
  for (const auto& [word, expected] : cases) EXPECT_EQ(stem(word), expected) << word;
}

TEST(ExtractNgrams, Bigrams) {
  const auto ms = extract_ngrams(TokenSequence{{"it", "is", "pouring"}, ""}, 2);
  EXPECT_EQ(ms.total(), 2);
  EXPECT_EQ(ms.count(NGram{{"it", "is"}}), 1);
  EXPECT_EQ(ms.count(NGram{{"is", "pouring"}}), 1);
  EXPECT_EQ(ms.distinct(), 2u);
}

TEST(ExtractNgrams, Multiplicity) {
  const auto ms = extract_ngrams(TokenSequence{{"a", "a", "a"}, ""}, 1);
  EXPECT_EQ(ms.total(), 3);
  EXPECT_EQ(ms.count(NGram{{"a"}}), 3);
}

TEST(ExtractNgrams, HandEnumeratedBigrams) {
  const auto ms = extract_ngrams(TokenSequence{{"police", "killed", "the", "gunman"}, ""}, 2);
  NGramMultiset expected;
  expected.add(NGram{{"police", "killed"}});
  expected.add(NGram{{"killed", "the"}});
  expected.add(NGram{{"the", "gunman"}});
  EXPECT_EQ(ms, expected);
}

TEST(ExtractNgrams, ShortSequenceAndBadN) {
  EXPECT_TRUE(extract_ngrams(TokenSequence{{"a"}, ""}, 2).empty());
  EXPECT_TRUE(extract_ngrams(TokenSequence{}, 1).empty());
  EXPECT_THROW(extract_ngrams(TokenSequence{{"a"}, ""}, 0), std::invalid_argument);
}

TEST(ExtractSkipBigrams, AllPairsWithinWindow) {
  const auto ms = extract_skip_bigrams(TokenSequence{{"police", "killed", "the", "gunman"}, ""}, 4);
  NGramMultiset expected;
  expected.add(NGram{{"police", "killed"}, 0});
  expected.add(NGram{{"police", "the"}, 1});
  expected.add(NGram{{"police", "gunman"}, 2});
  expected.add(NGram{{"killed", "the"}, 0});
  expected.add(NGram{{"killed", "gunman"}, 1});
  expected.add(NGram{{"the", "gunman"}, 0});
  EXPECT_EQ(ms, expected);
  EXPECT_EQ(ms.total(), 6);
}

TEST(ExtractSkipBigrams, EdgeCases) {
  const auto adj = extract_skip_bigrams(TokenSequence{{"a", "b"}, ""}, 0);
  EXPECT_EQ(adj.total(), 1);
  EXPECT_EQ(adj.count(NGram{{"a", "b"}, 0}), 1);
  EXPECT_TRUE(extract_skip_bigrams(TokenSequence{{"a"}, ""}, 4).empty());
  EXPECT_THROW(extract_skip_bigrams(TokenSequence{{"a"}, ""}, -1), std::invalid_argument);
}

TEST(ExtractProperties, CountsOnRandomSequences) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> len_dist(0, 25);
  std::uniform_int_distribution<int> word_dist(0, 5);
  for (int trial = 0; trial < 300; ++trial) {
    TokenSequence seq;
    const int len = len_dist(rng);
    for (int i = 0; i < len; ++i) seq.tokens.push_back(std::string(1, static_cast<char>('a' + word_dist(rng))));

    for (int n = 1; n <= 4; ++n) {
      const auto ms = extract_ngrams(seq, n);
      int sum = 0;
      for (const auto& [g, c] : ms.entries()) {
        EXPECT_GE(c, 1);
        EXPECT_EQ(g.words.size(), static_cast<std::size_t>(n));
        sum += c;
      }
      EXPECT_EQ(ms.total(), sum);
      EXPECT_EQ(ms.total(), std::max(0, len - n + 1));
    }

    const auto all_pairs = extract_skip_bigrams(seq, std::max(0, len - 2));
    EXPECT_EQ(all_pairs.total(), len * (len - 1) / 2);

    // With no skipping, skip-bigrams are the contiguous bigrams.
    const auto skip0 = extract_skip_bigrams(seq, 0);
    EXPECT_EQ(skip0, extract_ngrams(seq, 2));

    for (int k = 0; k <= 5; ++k) {
      const auto skips = extract_skip_bigrams(seq, k);
      for (const auto& [g, c] : skips.entries()) {
        EXPECT_EQ(g.words.size(), 2u);
        EXPECT_LE(g.gap, k);
        EXPECT_GE(g.gap, 0);
      }
    }
  }
}

}  // namespace
}  // namespace rouge_we
