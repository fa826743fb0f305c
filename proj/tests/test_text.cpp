#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "coopnet/rng.hpp"
#include "coopnet/text.hpp"

using namespace coopnet;

namespace {

std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const Token& t : tokens) out.push_back(t.surface);
  return out;
}

std::string random_text(SplitMix64& rng) {
  static const std::string alphabet = "abcXYZ .!?-,\t\ne";
  std::string text;
  std::size_t len = rng.next_below(60);
  for (std::size_t i = 0; i < len; ++i) {
    text.push_back(alphabet[rng.next_below(alphabet.size())]);
  }
  return text;
}

}  // namespace

TEST_CASE("tokenize: empty input yields no tokens") {
  CHECK(tokenize("").empty());
}

TEST_CASE("tokenize: lowercases, splits punctuation, marks stopwords") {
  std::vector<Token> tokens = tokenize("The cat sat.");
  CHECK(surfaces(tokens) == std::vector<std::string>{"the", "cat", "sat", "."});
  CHECK(tokens[0].is_stopword);
  CHECK_FALSE(tokens[1].is_stopword);
  CHECK_FALSE(tokens[3].is_stopword);
}

TEST_CASE("tokenize: internal hyphens stay inside the token") {
  CHECK(surfaces(tokenize("Co-opNet works")) ==
        std::vector<std::string>{"co-opnet", "works"});
  // edge hyphens split off
  CHECK(surfaces(tokenize("-foo a--b")) ==
        std::vector<std::string>{"-", "foo", "a", "-", "-", "b"});
}

TEST_CASE("tokenize: offsets point at the original slices") {
  std::string text = "The cat sat.";
  for (const Token& t : tokenize(text)) {
    CHECK(t.begin < t.end);
    CHECK(t.end <= text.size());
    CHECK(fold_case(text.substr(t.begin, t.end - t.begin)) == t.surface);
  }
}

TEST_CASE("tokenize: spans cover every non-whitespace byte, in order") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text = random_text(rng);
    std::vector<Token> tokens = tokenize(text);
    std::vector<bool> covered(text.size(), false);
    std::size_t last_end = 0;
    for (const Token& t : tokens) {
      CHECK(t.begin >= last_end);
      last_end = t.end;
      for (std::size_t k = t.begin; k < t.end; ++k) covered[k] = true;
    }
    for (std::size_t k = 0; k < text.size(); ++k) {
      bool ws = std::isspace(static_cast<unsigned char>(text[k])) != 0;
      CHECK(covered[k] == !ws);
    }
  }
}

TEST_CASE("tokenize is deterministic") {
  std::string text = "Some Input, with MIXED case e.g. this-one.";
  std::vector<Token> a = tokenize(text);
  std::vector<Token> b = tokenize(text);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].surface == b[i].surface);
    CHECK(a[i].begin == b[i].begin);
    CHECK(a[i].end == b[i].end);
  }
}

TEST_CASE("split_sentences: terminal punctuation before a capital") {
  SentenceSplit split = split_sentences("A b. C d.");
  REQUIRE(split.size() == 2);
  CHECK(surfaces(split.sentences[0]) == std::vector<std::string>{"a", "b", "."});
  CHECK(surfaces(split.sentences[1]) == std::vector<std::string>{"c", "d", "."});
}

TEST_CASE("split_sentences: no terminator keeps one sentence") {
  SentenceSplit split = split_sentences("one sentence only");
  REQUIRE(split.size() == 1);
  CHECK(split.sentences[0].size() == 3);
}

TEST_CASE("split_sentences: abbreviation guard") {
  CHECK(split_sentences("e.g. we test. Done.").size() == 2);
  // guard matters when a capital follows
  CHECK(split_sentences("e.g. We test. Done.").size() == 2);
  CHECK(split_sentences("See Fig. 3 and et al. Results follow.").size() == 1);
  // a word merely ending in a guard suffix is not guarded
  CHECK(split_sentences("We adjust the config. Then we run.").size() == 2);
  // "etc." is not guarded; it commonly closes sentences
  CHECK(split_sentences("We list graphs, trees, etc. Then we stop.").size() == 2);
}

TEST_CASE("split_sentences: lowercase after period does not split") {
  CHECK(split_sentences("a b. c d").size() == 1);
}

TEST_CASE("split_sentences: conservation of tokens") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text = random_text(rng);
    SentenceSplit split = split_sentences(text);
    std::size_t total = 0;
    for (const auto& sentence : split.sentences) {
      CHECK(!sentence.empty());
      total += sentence.size();
    }
    CHECK(total == tokenize(text).size());
    CHECK(split.boundaries.size() == split.sentences.size());
  }
}

TEST_CASE("sentence_text slices the original bytes") {
  std::string text = "The cat sat. The dog ran.";
  SentenceSplit split = split_sentences(text);
  REQUIRE(split.size() == 2);
  CHECK(sentence_text(text, split, 0) == "The cat sat.");
  CHECK(sentence_text(text, split, 1) == "The dog ran.");
  CHECK(sentence_text(text, split, 2) == "");
}

TEST_CASE("ngrams: windows, dedup, degenerate orders") {
  auto toks = [](std::vector<std::string> words) {
    std::vector<Token> tokens;
    for (auto& w : words) tokens.push_back({w, false, 0, 1});
    return tokens;
  };
  NgramSet bi = ngrams(toks({"a", "b", "c"}), 2);
  CHECK(bi.size() == 2);
  CHECK(bi.count({"a", "b"}) == 1);
  CHECK(bi.count({"b", "c"}) == 1);

  CHECK(ngrams(toks({"a", "a", "a"}), 1).size() == 1);

  NgramSet tri = ngrams(toks({"the", "cat", "sat"}), 3);
  CHECK(tri.size() == 1);
  CHECK(tri.count({"the", "cat", "sat"}) == 1);

  CHECK(ngrams(toks({"a", "b"}), 3).empty());
  CHECK_THROWS_AS(ngrams(toks({"a"}), 0), std::invalid_argument);
}

TEST_CASE("ngrams: size bounded by window count") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::string text = random_text(rng);
    std::vector<Token> tokens = tokenize(text);
    for (std::size_t n = 1; n <= 4; ++n) {
      std::size_t bound =
          tokens.size() + 1 > n ? tokens.size() - n + 1 : 0;
      CHECK(ngrams(tokens, n).size() <= bound);
    }
  }
}

TEST_CASE("lexicons: bundled snapshots have the documented sizes") {
  CHECK(Lexicon::bundled_stopwords().size() == 179);
  CHECK(Lexicon::bundled_connectives().size() == 134);
}

TEST_CASE("is_connective") {
  CHECK(is_connective("However"));
  CHECK(is_connective("on the other hand"));
  CHECK_FALSE(is_connective("cat"));
  CHECK_FALSE(is_connective(""));
}

TEST_CASE("lexicon longest match on token sequences") {
  const Lexicon& conn = Lexicon::bundled_connectives();
  std::vector<Token> tokens = tokenize("on the other hand we win");
  CHECK(conn.match_at(tokens, 0) == 4);
  std::vector<Token> tokens2 = tokenize("as a result of this");
  CHECK(conn.match_at(tokens2, 0) == 3);
  std::vector<Token> tokens3 = tokenize("cat sat");
  CHECK(conn.match_at(tokens3, 0) == 0);
}

TEST_CASE("lexicon head queries") {
  const Lexicon& conn = Lexicon::bundled_connectives();
  CHECK(conn.is_head_word("however"));
  CHECK(conn.is_head_word("even"));  // head of "even though"
  CHECK_FALSE(conn.is_head_word("cat"));
  CHECK(conn.is_head_bigram("even", "though"));
  CHECK(conn.is_head_bigram("on", "the"));  // head of "on the other hand"
  CHECK_FALSE(conn.is_head_bigram("the", "cat"));
}
