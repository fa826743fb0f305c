#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "coopnet/corpus.hpp"
#include "coopnet/text.hpp"

namespace coopnet {

struct RougeTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool empty_input = false;  // candidate or reference had no n-grams
};

struct RougeScores {
  RougeTriple r1;
  RougeTriple r2;
  RougeTriple rl;
};

// Clipped multiset n-gram overlap. Uses this library's own tokenizer; no
// stemming, no stopword removal.
RougeTriple rouge_n(std::string_view candidate, std::string_view reference,
                    std::size_t n);

// Token-level longest common subsequence.
RougeTriple rouge_l(std::string_view candidate, std::string_view reference);

RougeScores rouge_all(std::string_view candidate, std::string_view reference);

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;
};

struct ClassifierMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  bool precision_undefined = false;  // tp+fp == 0, reported as 0
  bool recall_undefined = false;     // tp+fn == 0, reported as 0
};

ClassifierMetrics classifier_metrics(const ConfusionCounts& counts);

struct DiscourseOverlapReport {
  double overlap1_pct = 0.0;   // % of overlapping unigrams that are connectives
  double overlap2_pct = 0.0;   // % of overlapping bigrams that are connectives
  double discourse_pct = 0.0;  // % of generated tokens that are connectives
};

// Denominator for the Overlap-N percentages: the overlapping n-grams
// themselves (default) or all generated n-grams (for comparison).
enum class OverlapDenominator { OverlappingGrams, GeneratedGrams };

DiscourseOverlapReport discourse_overlap(
    std::string_view generated, std::string_view gold,
    OverlapDenominator denominator = OverlapDenominator::OverlappingGrams);
DiscourseOverlapReport discourse_overlap(
    std::string_view generated, std::string_view gold,
    const Lexicon& connectives,
    OverlapDenominator denominator = OverlapDenominator::OverlappingGrams);

// Mean of per-pair reports.
DiscourseOverlapReport mean_overlap(const std::vector<DiscourseOverlapReport>& reports);

// First min(3, available) sentences of the article, as an original-byte slice.
std::string lede3(const Document& doc);

}  // namespace coopnet
