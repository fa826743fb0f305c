#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coopnet/text.hpp"

namespace coopnet {

enum class DiscourseRole { Background, Method, Objective, Result, Other };

inline constexpr int kNumDiscourseRoles = 5;

const char* to_string(DiscourseRole role);
std::optional<DiscourseRole> role_from_string(std::string_view name);

struct Document {
  std::string id;
  std::string article;
  std::string reference_summary;
  bool truncated = false;
};

// One generated summary with its per-token generator log-probabilities and
// optional externally supplied labels (discourse roles per sentence,
// token saliency, adjacency probabilities per consecutive sentence pair).
struct CandidateSummary {
  std::string doc_id;
  int index = 0;
  std::string text;
  std::vector<double> token_logprobs;
  std::optional<std::vector<DiscourseRole>> roles;
  std::optional<std::vector<int>> saliency;
  std::optional<std::vector<double>> adjacency_probs;
};

struct SentencePairExample {
  std::string first;
  std::string second;
  int label = 0;  // 1 = adjacent in the source summary
  std::string source_doc;
};

using CandidatePools = std::map<std::string, std::vector<CandidateSummary>>;

// documents.jsonl: {"id","article","reference_summary"} per line.
std::vector<Document> load_documents(const std::string& path);
void write_documents(const std::string& path, const std::vector<Document>& docs);

// candidates.jsonl: {"doc_id","index","text","token_logprobs",...} per line.
// Array lengths are validated against this library's own tokenization and
// sentence segmentation of the candidate text.
CandidatePools load_candidates(const std::string& path,
                               const std::vector<Document>& docs);
void write_candidates(const std::string& path, const CandidatePools& pools);

// Cuts article / reference summary to their first N tokens, on token
// boundaries (byte-slice through the end of the last kept token).
Document truncate_inputs(const Document& doc, std::size_t article_max = 800,
                         std::size_t summary_max = 200);

struct PairSample {
  std::vector<SentencePairExample> pairs;
  std::vector<std::string> skipped_docs;  // reference summary under 5 sentences
};

// For each eligible document (reference summary with >= 5 sentences) and
// each draw: picks an anchor sentence uniformly, one adjacent sentence as
// the positive partner, and one sentence at distance >= 2 as the negative
// partner. Emits one positive and one negative per draw. Fully determined
// by the seed.
PairSample sample_pairs(const std::vector<Document>& docs, std::uint64_t seed,
                        int per_doc = 1);

// pairs.jsonl: {"first","second","label","source_doc"} per line; lines
// starting with '#' are comments.
std::vector<SentencePairExample> load_pairs(const std::string& path);

}  // namespace coopnet
