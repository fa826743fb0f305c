#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace coopnet {

// One word or punctuation unit. surface is the case-folded form; the byte
// span [begin, end) points back into the original text.
struct Token {
  std::string surface;
  bool is_stopword = false;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Tokens partitioned into sentences. boundaries[i] is the byte offset one
// past the last token of sentence i. Every token of the text belongs to
// exactly one sentence.
struct SentenceSplit {
  std::vector<std::vector<Token>> sentences;
  std::vector<std::size_t> boundaries;

  std::size_t size() const { return sentences.size(); }
};

using Ngram = std::vector<std::string>;

struct NgramHash {
  std::size_t operator()(const Ngram& gram) const {
    std::size_t h = 1469598103934665603ULL;  // FNV offset basis
    for (const auto& word : gram) {
      for (char c : word) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
      }
      h ^= 0x1f;  // separator so {"ab","c"} != {"a","bc"}
      h *= 1099511628211ULL;
    }
    return h;
  }
};

using NgramSet = std::unordered_set<Ngram, NgramHash>;
using NgramCounts = std::unordered_map<Ngram, int, NgramHash>;

// A pinned word/phrase list (stopwords or discourse connectives). Entries
// are case-folded; lookups are case-insensitive. Connective lexicons also
// answer head-token queries used by the discourse-overlap analysis.
class Lexicon {
 public:
  enum class Kind { Stopword, Connective };

  static Lexicon from_text(std::string_view text, Kind kind);
  static Lexicon from_file(const std::string& path, Kind kind);

  // Snapshots bundled with the library (see data/). Loaded once.
  static const Lexicon& bundled_stopwords();
  static const Lexicon& bundled_connectives();

  // Active defaults used wherever no lexicon is passed explicitly: the
  // bundled snapshots unless replaced. Replace once at startup, before any
  // scoring; the installed lexicon is read-only afterwards.
  static const Lexicon& default_stopwords();
  static const Lexicon& default_connectives();
  static void set_default_stopwords(Lexicon lexicon);
  static void set_default_connectives(Lexicon lexicon);

  Kind kind() const { return kind_; }
  std::size_t size() const { return entries_.size(); }

  // Whole-phrase membership; multiword entries match with single spaces.
  bool contains(std::string_view phrase) const;

  // Single-token membership (no phrase normalization).
  bool contains_word(std::string_view word) const;

  // Longest entry matching tokens[start..] as a contiguous surface
  // sequence; returns the number of tokens matched, 0 if none.
  std::size_t match_at(const std::vector<Token>& tokens, std::size_t start) const;

  // Unigram representative: single-word entry or head token of a
  // multiword entry.
  bool is_head_word(std::string_view word) const;

  // Bigram representative: first two tokens of a multiword entry.
  bool is_head_bigram(std::string_view first, std::string_view second) const;

 private:
  Kind kind_ = Kind::Stopword;
  std::unordered_set<std::string> entries_;     // space-joined phrases
  std::unordered_set<std::string> words_;       // single-word entries
  std::unordered_set<std::string> head_words_;  // first word of any entry
  std::unordered_set<std::string> head_bigrams_;
  // first word -> multiword entries (token sequences), longest first
  std::unordered_map<std::string, std::vector<std::vector<std::string>>> by_head_;
  std::size_t max_words_ = 0;
};

// Rule-based word tokenizer: case-folds, splits on whitespace and
// punctuation, keeps hyphens that sit between word characters. Bytes
// >= 0x80 are treated as word characters so UTF-8 sequences stay intact.
std::vector<Token> tokenize(std::string_view text);
std::vector<Token> tokenize(std::string_view text, const Lexicon& stopwords);

// Splits on . ! ? followed by whitespace and a capital letter (or end of
// text), with an abbreviation guard for forms like "e.g." and "et al.".
SentenceSplit split_sentences(std::string_view text);
SentenceSplit split_sentences(std::string_view text, const Lexicon& stopwords);

// Contiguous n-token windows over case-folded surfaces, deduplicated.
NgramSet ngrams(const std::vector<Token>& tokens, std::size_t n);

// Multiset variant used by overlap metrics.
NgramCounts ngram_counts(const std::vector<Token>& tokens, std::size_t n);

bool is_connective(std::string_view phrase);
bool is_connective(std::string_view phrase, const Lexicon& connectives);

// ASCII case folding; bytes >= 0x80 pass through.
std::string fold_case(std::string_view text);

// True for tokens carrying at least one alphanumeric byte (i.e. not pure
// punctuation).
bool is_word_token(const Token& token);

// Original-byte slice of sentence `index` (first token begin to last token
// end). Empty string for out-of-range indices.
std::string sentence_text(std::string_view text, const SentenceSplit& split,
                          std::size_t index);

}  // namespace coopnet
