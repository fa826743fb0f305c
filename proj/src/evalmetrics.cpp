#include "coopnet/evalmetrics.hpp"

#include <algorithm>

#include "coopnet/errors.hpp"

namespace coopnet {

namespace {

double f1_of(double p, double r) {
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

}  // namespace

RougeTriple rouge_n(std::string_view candidate, std::string_view reference,
                    std::size_t n) {
  std::vector<Token> cand_tokens = tokenize(candidate);
  std::vector<Token> ref_tokens = tokenize(reference);

  NgramCounts cand_counts = ngram_counts(cand_tokens, n);
  NgramCounts ref_counts = ngram_counts(ref_tokens, n);

  long cand_total = 0, ref_total = 0, overlap = 0;
  for (const auto& [gram, count] : cand_counts) {
    cand_total += count;
    auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) overlap += std::min(count, it->second);
  }
  for (const auto& [gram, count] : ref_counts) ref_total += count;

  RougeTriple triple;
  triple.empty_input = cand_total == 0 || ref_total == 0;
  triple.precision = cand_total == 0 ? 0.0
                                     : static_cast<double>(overlap) /
                                           static_cast<double>(cand_total);
  triple.recall = ref_total == 0 ? 0.0
                                 : static_cast<double>(overlap) /
                                       static_cast<double>(ref_total);
  triple.f1 = f1_of(triple.precision, triple.recall);
  return triple;
}

RougeTriple rouge_l(std::string_view candidate, std::string_view reference) {
  std::vector<Token> cand_tokens = tokenize(candidate);
  std::vector<Token> ref_tokens = tokenize(reference);
  const std::size_t m = cand_tokens.size();
  const std::size_t n = ref_tokens.size();

  RougeTriple triple;
  triple.empty_input = m == 0 || n == 0;
  if (m == 0 || n == 0) return triple;

  // One-row LCS table.
  std::vector<long> prev(n + 1, 0), row(n + 1, 0);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      if (cand_tokens[i - 1].surface == ref_tokens[j - 1].surface) {
        row[j] = prev[j - 1] + 1;
      } else {
        row[j] = std::max(prev[j], row[j - 1]);
      }
    }
    std::swap(prev, row);
  }
  long lcs = prev[n];

  triple.precision = static_cast<double>(lcs) / static_cast<double>(m);
  triple.recall = static_cast<double>(lcs) / static_cast<double>(n);
  triple.f1 = f1_of(triple.precision, triple.recall);
  return triple;
}

RougeScores rouge_all(std::string_view candidate, std::string_view reference) {
  RougeScores scores;
  scores.r1 = rouge_n(candidate, reference, 1);
  scores.r2 = rouge_n(candidate, reference, 2);
  scores.rl = rouge_l(candidate, reference);
  return scores;
}

ClassifierMetrics classifier_metrics(const ConfusionCounts& counts) {
  long total = counts.tp + counts.fp + counts.fn + counts.tn;
  if (total < 1) {
    throw ValidationError(ErrorKind::EmptyInput,
                          "classifier_metrics: empty confusion counts");
  }
  ClassifierMetrics m;
  if (counts.tp + counts.fp == 0) {
    m.precision_undefined = true;
  } else {
    m.precision = static_cast<double>(counts.tp) /
                  static_cast<double>(counts.tp + counts.fp);
  }
  if (counts.tp + counts.fn == 0) {
    m.recall_undefined = true;
  } else {
    m.recall = static_cast<double>(counts.tp) /
               static_cast<double>(counts.tp + counts.fn);
  }
  m.f1 = f1_of(m.precision, m.recall);
  m.accuracy = static_cast<double>(counts.tp + counts.tn) /
               static_cast<double>(total);
  return m;
}

DiscourseOverlapReport discourse_overlap(std::string_view generated,
                                         std::string_view gold,
                                         OverlapDenominator denominator) {
  return discourse_overlap(generated, gold, Lexicon::default_connectives(),
                           denominator);
}

DiscourseOverlapReport discourse_overlap(std::string_view generated,
                                         std::string_view gold,
                                         const Lexicon& connectives,
                                         OverlapDenominator denominator) {
  std::vector<Token> gen_tokens = tokenize(generated);
  std::vector<Token> gold_tokens = tokenize(gold);

  DiscourseOverlapReport report;

  for (std::size_t n = 1; n <= 2; ++n) {
    NgramSet gen_grams = ngrams(gen_tokens, n);
    NgramSet gold_grams = ngrams(gold_tokens, n);
    std::size_t shared = 0, shared_connective = 0;
    for (const Ngram& gram : gen_grams) {
      if (!gold_grams.count(gram)) continue;
      ++shared;
      bool connective = n == 1 ? connectives.is_head_word(gram[0])
                               : connectives.is_head_bigram(gram[0], gram[1]);
      if (connective) ++shared_connective;
    }
    std::size_t denom = denominator == OverlapDenominator::OverlappingGrams
                            ? shared
                            : gen_grams.size();
    double pct = 100.0 * static_cast<double>(shared_connective) /
                 static_cast<double>(std::max<std::size_t>(1, denom));
    if (n == 1) {
      report.overlap1_pct = pct;
    } else {
      report.overlap2_pct = pct;
    }
  }

  std::size_t connective_tokens = 0;
  for (const Token& token : gen_tokens) {
    if (connectives.is_head_word(token.surface)) ++connective_tokens;
  }
  report.discourse_pct =
      100.0 * static_cast<double>(connective_tokens) /
      static_cast<double>(std::max<std::size_t>(1, gen_tokens.size()));
  return report;
}

DiscourseOverlapReport mean_overlap(
    const std::vector<DiscourseOverlapReport>& reports) {
  DiscourseOverlapReport mean;
  if (reports.empty()) return mean;
  for (const DiscourseOverlapReport& r : reports) {
    mean.overlap1_pct += r.overlap1_pct;
    mean.overlap2_pct += r.overlap2_pct;
    mean.discourse_pct += r.discourse_pct;
  }
  double n = static_cast<double>(reports.size());
  mean.overlap1_pct /= n;
  mean.overlap2_pct /= n;
  mean.discourse_pct /= n;
  return mean;
}

std::string lede3(const Document& doc) {
  SentenceSplit split = split_sentences(doc.article);
  if (split.size() == 0) return {};
  std::size_t take = std::min<std::size_t>(3, split.size());
  std::size_t begin = split.sentences.front().front().begin;
  std::size_t end = split.sentences[take - 1].back().end;
  return doc.article.substr(begin, end - begin);
}

}  // namespace coopnet
