#include "coopnet/text.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <fstream>
#include <sstream>

#include "coopnet/errors.hpp"
#include "coopnet/embedded_data.hpp"

namespace coopnet {

namespace {

bool is_ascii_space(unsigned char c) { return std::isspace(c) != 0; }

bool is_ascii_alnum(unsigned char c) { return std::isalnum(c) != 0; }

// Bytes >= 0x80 count as word characters so multi-byte UTF-8 sequences are
// never split apart.
bool is_word_byte(unsigned char c) { return is_ascii_alnum(c) || c >= 0x80; }

char fold_byte(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  if (u < 0x80) return static_cast<char>(std::tolower(u));
  return c;
}

bool is_terminal_punct(const std::string& surface) {
  return surface == "." || surface == "!" || surface == "?";
}

// Small guard list for the sentence splitter; entries must end with '.'.
// Words like "etc." that routinely close sentences are deliberately absent.
const std::vector<std::string>& abbreviation_guards() {
  static const std::vector<std::string> kGuards = {
      "e.g.", "i.e.", "et al.", "cf.",   "vs.",  "fig.", "figs.", "eq.",
      "eqs.", "sec.", "dr.",    "mr.",   "mrs.", "ms.",  "prof.", "resp.",
  };
  return kGuards;
}

// True when the text ending at end_pos (one past a '.') ends with a guarded
// abbreviation preceded by a non-word character or start of text.
bool guarded_abbreviation(std::string_view text, std::size_t end_pos) {
  for (const std::string& guard : abbreviation_guards()) {
    if (guard.size() > end_pos) continue;
    std::size_t start = end_pos - guard.size();
    bool match = true;
    for (std::size_t k = 0; k < guard.size(); ++k) {
      if (fold_byte(text[start + k]) != guard[k]) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    if (start == 0 || !is_word_byte(static_cast<unsigned char>(text[start - 1]))) {
      return true;
    }
  }
  return false;
}

std::vector<std::string> split_phrase_words(std::string_view phrase) {
  std::vector<std::string> words;
  std::string current;
  for (char c : phrase) {
    if (is_ascii_space(static_cast<unsigned char>(c))) {
      if (!current.empty()) {
        words.push_back(current);
        current.clear();
      }
    } else {
      current.push_back(fold_byte(c));
    }
  }
  if (!current.empty()) words.push_back(current);
  return words;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string joined;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) joined.push_back(' ');
    joined += words[i];
  }
  return joined;
}

}  // namespace

std::string fold_case(std::string_view text) {
  std::string folded;
  folded.reserve(text.size());
  for (char c : text) folded.push_back(fold_byte(c));
  return folded;
}

bool is_word_token(const Token& token) {
  for (char c : token.surface) {
    if (is_word_byte(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

Lexicon Lexicon::from_text(std::string_view text, Kind kind) {
  Lexicon lex;
  lex.kind_ = kind;
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) {
    // strip comments and surrounding whitespace
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::vector<std::string> words = split_phrase_words(line);
    if (words.empty()) continue;
    std::string joined = join_words(words);
    if (!lex.entries_.insert(joined).second) continue;
    lex.max_words_ = std::max(lex.max_words_, words.size());
    lex.head_words_.insert(words.front());
    if (words.size() == 1) {
      lex.words_.insert(words.front());
    } else {
      lex.head_bigrams_.insert(words[0] + ' ' + words[1]);
      lex.by_head_[words.front()].push_back(words);
    }
  }
  for (auto& [head, phrases] : lex.by_head_) {
    std::sort(phrases.begin(), phrases.end(),
              [](const auto& a, const auto& b) { return a.size() > b.size(); });
  }
  return lex;
}

Lexicon Lexicon::from_file(const std::string& path, Kind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw errors::io_error(path, "cannot open lexicon file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str(), kind);
}

const Lexicon& Lexicon::bundled_stopwords() {
  static const Lexicon lex = from_text(detail::kStopwordsTxt, Kind::Stopword);
  return lex;
}

const Lexicon& Lexicon::bundled_connectives() {
  static const Lexicon lex = from_text(detail::kConnectivesTxt, Kind::Connective);
  return lex;
}

namespace {

std::optional<Lexicon>& stopword_override() {
  static std::optional<Lexicon> lex;
  return lex;
}

std::optional<Lexicon>& connective_override() {
  static std::optional<Lexicon> lex;
  return lex;
}

}  // namespace

const Lexicon& Lexicon::default_stopwords() {
  if (stopword_override()) return *stopword_override();
  return bundled_stopwords();
}

const Lexicon& Lexicon::default_connectives() {
  if (connective_override()) return *connective_override();
  return bundled_connectives();
}

void Lexicon::set_default_stopwords(Lexicon lexicon) {
  stopword_override() = std::move(lexicon);
}

void Lexicon::set_default_connectives(Lexicon lexicon) {
  connective_override() = std::move(lexicon);
}

bool Lexicon::contains(std::string_view phrase) const {
  std::vector<std::string> words = split_phrase_words(phrase);
  if (words.empty()) return false;
  return entries_.count(join_words(words)) > 0;
}

bool Lexicon::contains_word(std::string_view word) const {
  return words_.count(fold_case(word)) > 0;
}

std::size_t Lexicon::match_at(const std::vector<Token>& tokens,
                              std::size_t start) const {
  if (start >= tokens.size()) return 0;
  const std::string& head = tokens[start].surface;
  auto it = by_head_.find(head);
  if (it != by_head_.end()) {
    for (const auto& phrase : it->second) {  // longest first
      if (start + phrase.size() > tokens.size()) continue;
      bool match = true;
      for (std::size_t k = 1; k < phrase.size(); ++k) {
        if (tokens[start + k].surface != phrase[k]) {
          match = false;
          break;
        }
      }
      if (match) return phrase.size();
    }
  }
  if (words_.count(head)) return 1;
  return 0;
}

bool Lexicon::is_head_word(std::string_view word) const {
  return head_words_.count(fold_case(word)) > 0;
}

bool Lexicon::is_head_bigram(std::string_view first, std::string_view second) const {
  std::string key = fold_case(first);
  key.push_back(' ');
  key += fold_case(second);
  return head_bigrams_.count(key) > 0;
}

std::vector<Token> tokenize(std::string_view text) {
  return tokenize(text, Lexicon::default_stopwords());
}

std::vector<Token> tokenize(std::string_view text, const Lexicon& stopwords) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_ascii_space(c)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (is_word_byte(c)) {
      while (j < n) {
        unsigned char cj = static_cast<unsigned char>(text[j]);
        if (is_word_byte(cj)) {
          ++j;
        } else if (cj == '-' && j + 1 < n &&
                   is_word_byte(static_cast<unsigned char>(text[j + 1])) &&
                   is_word_byte(static_cast<unsigned char>(text[j - 1]))) {
          ++j;  // hyphen between word characters stays inside the token
        } else {
          break;
        }
      }
    }
    Token token;
    token.surface = fold_case(text.substr(i, j - i));
    token.begin = i;
    token.end = j;
    token.is_stopword = stopwords.contains_word(token.surface);
    tokens.push_back(std::move(token));
    i = j;
  }
  return tokens;
}

SentenceSplit split_sentences(std::string_view text) {
  return split_sentences(text, Lexicon::default_stopwords());
}

SentenceSplit split_sentences(std::string_view text, const Lexicon& stopwords) {
  SentenceSplit split;
  std::vector<Token> tokens = tokenize(text, stopwords);
  if (tokens.empty()) return split;

  std::vector<Token> current;
  auto flush = [&](std::size_t boundary) {
    if (current.empty()) return;
    split.sentences.push_back(std::move(current));
    split.boundaries.push_back(boundary);
    current.clear();
  };

  const std::size_t n = text.size();
  for (const Token& token : tokens) {
    current.push_back(token);
    if (!is_terminal_punct(token.surface)) continue;
    if (token.surface == "." && guarded_abbreviation(text, token.end)) continue;
    std::size_t p = token.end;
    while (p < n && is_ascii_space(static_cast<unsigned char>(text[p]))) ++p;
    bool end_of_text = (p == n);
    bool capital_after_space =
        p > token.end && p < n && std::isupper(static_cast<unsigned char>(text[p]));
    if (end_of_text || capital_after_space) flush(token.end);
  }
  if (!current.empty()) flush(current.back().end);
  return split;
}

NgramSet ngrams(const std::vector<Token>& tokens, std::size_t n) {
  if (n < 1) throw std::invalid_argument("ngrams: order must be >= 1");
  NgramSet grams;
  if (tokens.size() < n) return grams;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    Ngram gram;
    gram.reserve(n);
    for (std::size_t k = 0; k < n; ++k) gram.push_back(tokens[i + k].surface);
    grams.insert(std::move(gram));
  }
  return grams;
}

NgramCounts ngram_counts(const std::vector<Token>& tokens, std::size_t n) {
  if (n < 1) throw std::invalid_argument("ngram_counts: order must be >= 1");
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    Ngram gram;
    gram.reserve(n);
    for (std::size_t k = 0; k < n; ++k) gram.push_back(tokens[i + k].surface);
    ++counts[std::move(gram)];
  }
  return counts;
}

bool is_connective(std::string_view phrase) {
  return is_connective(phrase, Lexicon::default_connectives());
}

bool is_connective(std::string_view phrase, const Lexicon& connectives) {
  return connectives.contains(phrase);
}

std::string sentence_text(std::string_view text, const SentenceSplit& split,
                          std::size_t index) {
  if (index >= split.sentences.size()) return {};
  const std::vector<Token>& sentence = split.sentences[index];
  if (sentence.empty()) return {};
  std::size_t begin = sentence.front().begin;
  std::size_t end = sentence.back().end;
  return std::string(text.substr(begin, end - begin));
}

}  // namespace coopnet
