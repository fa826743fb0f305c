#include "coopnet/reranker.hpp"

#include <algorithm>

#include "coopnet/errors.hpp"

namespace coopnet {

FilterResult filter_pool(const std::vector<CandidateSummary>& pool,
                         int max_sentence_tokens) {
  if (pool.empty()) {
    throw ValidationError(ErrorKind::EmptyPool, "filter_pool: empty candidate pool");
  }
  FilterResult result;
  for (const CandidateSummary& cand : pool) {
    SentenceSplit split = split_sentences(cand.text);
    bool too_long = false;
    for (const auto& sentence : split.sentences) {
      if (sentence.size() > static_cast<std::size_t>(max_sentence_tokens)) {
        too_long = true;
        break;
      }
    }
    if (too_long) {
      result.removed.emplace_back(cand.index, "sentence-length");
    } else {
      result.kept.push_back(cand);
    }
  }
  if (result.kept.empty()) {
    // A filter that empties the pool would break the pipeline; keep
    // everything and flag it.
    result.kept = pool;
    result.removed.clear();
    result.bypassed = true;
  }
  return result;
}

double gen_term(const CandidateSummary& candidate) {
  if (candidate.token_logprobs.empty()) {
    throw ValidationError(ErrorKind::MissingLogprobs,
                          "gen_term: candidate has no token log-probabilities");
  }
  double total = 0.0;
  for (double lp : candidate.token_logprobs) total += lp;
  return total / static_cast<double>(candidate.token_logprobs.size());
}

std::vector<ScoreBreakdown> rank_candidates(const std::string& doc_id,
                                            std::vector<ScoredCandidate> scored,
                                            double lambda_gen,
                                            double lambda_disc) {
  if (lambda_gen < 0.0 || lambda_disc < 0.0 || lambda_gen + lambda_disc <= 0.0) {
    throw ValidationError(ErrorKind::BadConfig,
                          "lambdas must be non-negative with a positive sum");
  }
  std::vector<ScoreBreakdown> out;
  out.reserve(scored.size());
  for (ScoredCandidate& s : scored) {
    ScoreBreakdown b;
    b.doc_id = doc_id;
    b.candidate_index = s.index;
    b.gen_term = s.gen;
    b.disc_term = s.disc;
    b.combined = lambda_gen * s.gen + lambda_disc * s.disc;
    b.flags = std::move(s.flags);
    out.push_back(std::move(b));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoreBreakdown& a, const ScoreBreakdown& b) {
                     if (a.combined != b.combined) return a.combined > b.combined;
                     if (a.gen_term != b.gen_term) return a.gen_term > b.gen_term;
                     return a.candidate_index < b.candidate_index;
                   });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i + 1);
  return out;
}

namespace {

DiscriminatorScore score_objective(const Document& doc,
                                   const CandidateSummary& cand,
                                   const RerankConfig& config) {
  switch (config.objective) {
    case DiscriminatorObjective::Coverage:
    case DiscriminatorObjective::Ordering: {
      RoleSequence roles;
      if (config.backend == ScoreBackend::External) {
        if (!cand.roles) {
          throw ValidationError(ErrorKind::MissingRoles,
                                "external backend needs per-sentence roles");
        }
        roles = *cand.roles;
      } else {
        roles = config.role_rules ? label_roles_heuristic(cand, *config.role_rules)
                                  : label_roles_heuristic(cand);
      }
      if (config.objective == DiscriminatorObjective::Coverage) {
        return score_coverage(roles);
      }
      return score_ordering(roles, config.ordering_spec);
    }
    case DiscriminatorObjective::Adjacency: {
      AdjacencyBackend backend = config.backend == ScoreBackend::External
                                     ? AdjacencyBackend::External
                                     : AdjacencyBackend::Builtin;
      return score_adjacency(cand, backend, config.adjacency_model);
    }
    case DiscriminatorObjective::Factuality: {
      SpanSource source = config.backend == ScoreBackend::External
                              ? SpanSource::ExternalLabels
                              : SpanSource::Heuristic;
      EvidenceSpanSet spans = extract_spans(cand, source, config.max_span_k);
      return score_factuality(cand, doc, spans);
    }
  }
  throw ValidationError(ErrorKind::BadConfig, "unknown objective");
}

}  // namespace

std::vector<ScoreBreakdown> rerank(const Document& doc,
                                   const std::vector<CandidateSummary>& pool,
                                   const RerankConfig& config) {
  if (pool.empty()) {
    throw ValidationError(ErrorKind::EmptyPool, "rerank: empty candidate pool");
  }
  std::vector<ScoredCandidate> scored;
  scored.reserve(pool.size());
  for (const CandidateSummary& cand : pool) {
    ScoredCandidate s;
    s.index = cand.index;
    try {
      s.gen = gen_term(cand);
      DiscriminatorScore d = score_objective(doc, cand, config);
      s.disc = d.value;
      s.flags = d.flags;
    } catch (const ValidationError& e) {
      throw ValidationError(e.kind(), "doc " + doc.id + " candidate " +
                                          std::to_string(cand.index) + ": " +
                                          e.what());
    }
    scored.push_back(std::move(s));
  }
  return rank_candidates(doc.id, std::move(scored), config.lambda_gen,
                         config.lambda_disc);
}

double new_decision_rate(const std::map<std::string, int>& reranked_top,
                         const std::map<std::string, int>& baseline_top) {
  if (reranked_top.empty()) {
    throw ValidationError(ErrorKind::EmptyInput,
                          "new_decision_rate: no documents");
  }
  if (reranked_top.size() != baseline_top.size()) {
    throw ValidationError(ErrorKind::IdMismatch,
                          "new_decision_rate: document sets differ in size");
  }
  std::size_t changed = 0;
  for (const auto& [doc_id, index] : reranked_top) {
    auto it = baseline_top.find(doc_id);
    if (it == baseline_top.end()) {
      throw ValidationError(ErrorKind::IdMismatch,
                            "new_decision_rate: document \"" + doc_id +
                                "\" missing from baseline");
    }
    if (it->second != index) ++changed;
  }
  return static_cast<double>(changed) / static_cast<double>(reranked_top.size());
}

}  // namespace coopnet
