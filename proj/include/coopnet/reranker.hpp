#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "coopnet/corpus.hpp"
#include "coopnet/discriminators.hpp"

namespace coopnet {

// Which source supplies the objective's inputs: External reads the labels
// shipped with the candidate (roles / saliency / adjacency_probs), Builtin
// uses the library's own fallbacks (heuristic labeler, heuristic spans,
// trained logistic adjacency model).
enum class ScoreBackend { External, Builtin };

struct RerankConfig {
  double lambda_gen = 0.5;
  double lambda_disc = 0.5;
  DiscriminatorObjective objective = DiscriminatorObjective::Ordering;
  ScoreBackend backend = ScoreBackend::Builtin;
  int max_sentence_tokens = 200;
  int max_span_k = 2;
  NormalizationSpec ordering_spec;
  const AdjacencyModel* adjacency_model = nullptr;  // required for adjacency+builtin
  const RoleRuleTable* role_rules = nullptr;        // defaults to bundled table
};

struct ScoreBreakdown {
  std::string doc_id;
  int candidate_index = 0;
  double gen_term = 0.0;
  double disc_term = 0.0;
  double combined = 0.0;
  int rank = 0;
  std::vector<std::string> flags;
};

struct FilterResult {
  std::vector<CandidateSummary> kept;
  std::vector<std::pair<int, std::string>> removed;  // candidate index, reason
  bool bypassed = false;  // filter would have emptied the pool
};

// Drops candidates containing a sentence longer than max_sentence_tokens.
// If every candidate violates, the filter is bypassed and the whole pool
// kept, flagged.
FilterResult filter_pool(const std::vector<CandidateSummary>& pool,
                         int max_sentence_tokens = 200);

// Mean token log-probability of the candidate.
double gen_term(const CandidateSummary& candidate);

struct ScoredCandidate {
  int index = 0;
  double gen = 0.0;
  double disc = 0.0;
  std::vector<std::string> flags;
};

// Combination + ranking stage: combined = lambda_gen*gen + lambda_disc*disc,
// sorted descending, ties broken by higher gen then lower index.
std::vector<ScoreBreakdown> rank_candidates(const std::string& doc_id,
                                            std::vector<ScoredCandidate> scored,
                                            double lambda_gen,
                                            double lambda_disc);

// Scores every candidate with the configured objective and ranks the pool.
// The pool is expected to be filtered already. Scorer errors are rethrown
// with the offending candidate index in the message.
std::vector<ScoreBreakdown> rerank(const Document& doc,
                                   const std::vector<CandidateSummary>& pool,
                                   const RerankConfig& config);

// Fraction of documents whose top-ranked candidate differs between the two
// runs. Both maps must cover the same document ids.
double new_decision_rate(const std::map<std::string, int>& reranked_top,
                         const std::map<std::string, int>& baseline_top);

}  // namespace coopnet
