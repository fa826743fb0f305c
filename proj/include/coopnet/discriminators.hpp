#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "coopnet/corpus.hpp"
#include "coopnet/text.hpp"

namespace coopnet {

// Floor applied inside every log so zero ratios stay finite and
// order-preserving instead of collapsing to -inf.
inline constexpr double kLogClampEpsilon = 1e-8;

double clamped_log(double x);

using RoleSequence = std::vector<DiscourseRole>;

enum class DiscriminatorObjective { Coverage, Ordering, Adjacency, Factuality };

const char* to_string(DiscriminatorObjective objective);
std::optional<DiscriminatorObjective> objective_from_string(std::string_view name);

// Valid predecessor sets for each discourse role, plus the two endpoint
// rules (summaries should open with BACKGROUND and close with RESULT).
class OrderingRuleTable {
 public:
  static const OrderingRuleTable& standard();

  bool valid_transition(DiscourseRole prev, DiscourseRole next) const;
  DiscourseRole first_rule() const { return DiscourseRole::Background; }
  DiscourseRole last_rule() const { return DiscourseRole::Result; }

 private:
  OrderingRuleTable();
  std::array<std::array<bool, kNumDiscourseRoles>, kNumDiscourseRoles> allowed_{};
};

// Fixed normalization constants for the ordering score: summaries are
// truncated to max_sentences, and the +-1 sum is mapped to [0,1] against a
// fixed bound o_max = (max_sentences - 1) pair slots + 2 endpoint rules.
// Shorter summaries cannot reach the upper end of the scale.
struct NormalizationSpec {
  int max_sentences = 10;
  int o_max = 11;
};

struct DiscriminatorScore {
  DiscriminatorObjective objective = DiscriminatorObjective::Coverage;
  double value = 0.0;  // log-domain, clamped to be finite
  std::vector<std::string> flags;
  std::map<std::string, double> detail;
};

// log of the fraction of the five discourse roles present in the sequence.
DiscriminatorScore score_coverage(const RoleSequence& roles);

// +-1 per consecutive transition against the rule table, +-1 for each
// endpoint rule, normalized to [0,1] and logged.
DiscriminatorScore score_ordering(const RoleSequence& roles,
                                  const NormalizationSpec& spec = {});

// Affine map from [-o_max, o_max] to [0, 1].
double f_n(int s, int o_max);

inline constexpr std::array<const char*, 5> kAdjacencyFeatureNames = {
    "content_jaccard", "bigram_overlap", "length_ratio", "connective_start",
    "bias"};

// Deterministic surface features for a sentence pair, in the fixed order of
// kAdjacencyFeatureNames. Empty sentences yield zero overlap features.
std::vector<double> adjacency_features(std::string_view first,
                                       std::string_view second);
std::vector<double> adjacency_features(std::string_view first,
                                       std::string_view second,
                                       const Lexicon& stopwords,
                                       const Lexicon& connectives);

// Logistic classifier over adjacency_features.
struct AdjacencyModel {
  std::vector<std::string> feature_spec;
  std::vector<double> weights;
  double bias = 0.0;

  struct TrainingMeta {
    std::uint64_t seed = 0;
    double learning_rate = 0.0;
    int epochs = 0;
    double final_loss = 0.0;
    double train_accuracy = 0.0;
  };
  TrainingMeta meta;

  static AdjacencyModel zero();

  std::string to_json_string() const;
  static AdjacencyModel from_json_string(const std::string& json_text);
  void save(const std::string& path) const;
  static AdjacencyModel load(const std::string& path);
};

double sigmoid(double logit);

// sigma(w.x + b) for a raw feature vector; FeatureMismatch if the model
// does not carry the canonical feature spec.
double predict_adjacency_features(const AdjacencyModel& model,
                                  const std::vector<double>& features);

double predict_adjacency(const AdjacencyModel& model, std::string_view first,
                         std::string_view second);

// Binary cross-entropy of a single prediction, clamped like every other
// log in this module.
double bce_loss(double probability, int label);

// d/dw and d/db of bce_loss(sigmoid(w.x + b), label).
struct BceGradient {
  std::vector<double> weights;
  double bias = 0.0;
};
BceGradient bce_gradient(const AdjacencyModel& model,
                         const std::vector<double>& features, int label);

struct TrainResult {
  AdjacencyModel model;
  // epoch_losses[0] is the mean loss at initialization; entry e is the mean
  // training-set loss after epoch e.
  std::vector<double> epoch_losses;
};

// Seeded, shuffled SGD on mean BCE with zero initialization. DegenerateData
// if the pairs carry only one label.
TrainResult train_adjacency(const std::vector<SentencePairExample>& pairs,
                            std::uint64_t seed, double learning_rate = 0.1,
                            int epochs = 20);

double adjacency_accuracy(const AdjacencyModel& model,
                          const std::vector<SentencePairExample>& pairs);

enum class AdjacencyBackend { External, Builtin };

// Mean log adjacency probability over consecutive sentence pairs of the
// candidate. External reads candidate.adjacency_probs; Builtin computes
// probabilities with the given model. Single-sentence candidates score 0
// with flag "neutral".
DiscriminatorScore score_adjacency(const CandidateSummary& candidate,
                                   AdjacencyBackend backend,
                                   const AdjacencyModel* model = nullptr);

enum class SpanSource { ExternalLabels, Heuristic };

// Evidence spans as case-folded token tuples of order <= max_k.
struct EvidenceSpanSet {
  std::set<Ngram> spans;
  SpanSource source = SpanSource::Heuristic;
};

// ExternalLabels: maximal runs of saliency-1 tokens, stopwords stripped
// from run edges, chunked into tuples of <= max_k tokens. Heuristic: all
// content-word unigrams plus bigrams whose tokens are both content words.
// Pure-punctuation tokens never enter a span.
EvidenceSpanSet extract_spans(const CandidateSummary& candidate,
                              SpanSource source, int max_k = 2);

// log fraction of spans that occur verbatim as k-grams of the article.
// Empty span sets score 0 with flag "no-spans".
DiscriminatorScore score_factuality(const CandidateSummary& candidate,
                                    const Document& article,
                                    const EvidenceSpanSet& spans);

// Cue-phrase table for the fallback discourse-role labeler.
class RoleRuleTable {
 public:
  static const RoleRuleTable& bundled();
  static RoleRuleTable from_text(std::string_view text);
  static RoleRuleTable from_file(const std::string& path);

  DiscourseRole label_sentence(const std::vector<Token>& sentence,
                               std::size_t sentence_index) const;
  std::size_t cue_count() const;

 private:
  struct Cue {
    DiscourseRole role;
    std::vector<std::string> words;
  };
  std::vector<Cue> cues_;
};

// One role per sentence, from cue phrases; cue-free sentences default to
// BACKGROUND in first position and OTHER elsewhere.
RoleSequence label_roles_heuristic(const CandidateSummary& candidate);
RoleSequence label_roles_heuristic(const CandidateSummary& candidate,
                                   const RoleRuleTable& rules);

}  // namespace coopnet
