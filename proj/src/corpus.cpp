#include "coopnet/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "coopnet/errors.hpp"
#include "coopnet/rng.hpp"

namespace coopnet {

using json = nlohmann::ordered_json;

const char* to_string(DiscourseRole role) {
  switch (role) {
    case DiscourseRole::Background: return "BACKGROUND";
    case DiscourseRole::Method: return "METHOD";
    case DiscourseRole::Objective: return "OBJECTIVE";
    case DiscourseRole::Result: return "RESULT";
    case DiscourseRole::Other: return "OTHER";
  }
  return "OTHER";
}

std::optional<DiscourseRole> role_from_string(std::string_view name) {
  if (name == "BACKGROUND") return DiscourseRole::Background;
  if (name == "METHOD") return DiscourseRole::Method;
  if (name == "OBJECTIVE") return DiscourseRole::Objective;
  if (name == "RESULT") return DiscourseRole::Result;
  if (name == "OTHER") return DiscourseRole::Other;
  return std::nullopt;
}

namespace {

// Calls fn(line_number, line) for every non-empty line of a file.
template <typename Fn>
void for_each_line(const std::string& path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw errors::io_error(path, "cannot open file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = line.find_first_not_of(" \t") == std::string::npos;
    if (blank) continue;
    fn(line_no, line);
  }
}

json parse_line(std::size_t line_no, const std::string& line) {
  try {
    return json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw errors::malformed_line(line_no, std::string("invalid JSON: ") + e.what());
  }
}

// Converts json type errors (wrong field types) into MalformedLine.
template <typename Fn>
void with_line_context(std::size_t line_no, Fn fn) {
  try {
    fn();
  } catch (const nlohmann::json::exception& e) {
    throw errors::malformed_line(line_no, e.what());
  }
}

std::string require_string(const json& obj, std::size_t line_no, const char* field) {
  if (!obj.contains(field)) throw errors::missing_field(line_no, field);
  if (!obj[field].is_string()) {
    throw errors::malformed_line(line_no, std::string("field \"") + field +
                                              "\" must be a string");
  }
  return obj[field].get<std::string>();
}

}  // namespace

std::vector<Document> load_documents(const std::string& path) {
  std::vector<Document> docs;
  std::set<std::string> seen;
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    json obj = parse_line(line_no, line);
    if (!obj.is_object()) throw errors::malformed_line(line_no, "expected a JSON object");
    Document doc;
    doc.id = require_string(obj, line_no, "id");
    doc.article = require_string(obj, line_no, "article");
    doc.reference_summary = require_string(obj, line_no, "reference_summary");
    if (doc.article.empty()) {
      throw errors::malformed_line(line_no, "article must be non-empty");
    }
    if (!seen.insert(doc.id).second) throw errors::duplicate_id(line_no, doc.id);
    docs.push_back(std::move(doc));
  });
  return docs;
}

void write_documents(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw errors::io_error(path, "cannot open file for writing");
  for (const Document& doc : docs) {
    json obj;
    obj["id"] = doc.id;
    obj["article"] = doc.article;
    obj["reference_summary"] = doc.reference_summary;
    out << obj.dump() << '\n';
  }
}

namespace {

CandidateSummary parse_candidate(const json& obj, std::size_t line_no,
                                 const std::set<std::string>& known) {
  CandidateSummary cand;
  cand.doc_id = require_string(obj, line_no, "doc_id");
  if (!known.count(cand.doc_id)) throw errors::unknown_doc(line_no, cand.doc_id);
  if (!obj.contains("index")) throw errors::missing_field(line_no, "index");
  if (!obj["index"].is_number_integer() || obj["index"].get<int>() < 0) {
    throw errors::malformed_line(line_no, "index must be a non-negative integer");
  }
  cand.index = obj["index"].get<int>();
  cand.text = require_string(obj, line_no, "text");
  if (!obj.contains("token_logprobs")) {
    throw errors::missing_field(line_no, "token_logprobs");
  }

  std::size_t token_count = tokenize(cand.text).size();
  SentenceSplit split = split_sentences(cand.text);

  cand.token_logprobs = obj["token_logprobs"].get<std::vector<double>>();
  if (cand.token_logprobs.size() != token_count) {
    throw errors::length_mismatch(line_no, "token_logprobs",
                                  cand.token_logprobs.size(), token_count);
  }
  for (double lp : cand.token_logprobs) {
    if (lp > 0.0) {
      throw errors::malformed_line(line_no, "token_logprobs must be <= 0");
    }
  }

  if (obj.contains("roles") && !obj["roles"].is_null()) {
    std::vector<DiscourseRole> roles;
    for (const auto& item : obj["roles"]) {
      auto role = role_from_string(item.get<std::string>());
      if (!role) {
        throw errors::malformed_line(line_no, "unknown discourse role \"" +
                                                  item.get<std::string>() + "\"");
      }
      roles.push_back(*role);
    }
    if (roles.size() != split.size()) {
      throw errors::length_mismatch(line_no, "roles", roles.size(), split.size());
    }
    cand.roles = std::move(roles);
  }

  if (obj.contains("saliency") && !obj["saliency"].is_null()) {
    auto saliency = obj["saliency"].get<std::vector<int>>();
    if (saliency.size() != token_count) {
      throw errors::length_mismatch(line_no, "saliency", saliency.size(), token_count);
    }
    for (int label : saliency) {
      if (label != 0 && label != 1) {
        throw errors::malformed_line(line_no, "saliency labels must be 0 or 1");
      }
    }
    cand.saliency = std::move(saliency);
  }

  if (obj.contains("adjacency_probs") && !obj["adjacency_probs"].is_null()) {
    auto probs = obj["adjacency_probs"].get<std::vector<double>>();
    std::size_t want = split.size() > 0 ? split.size() - 1 : 0;
    if (probs.size() != want) {
      throw errors::length_mismatch(line_no, "adjacency_probs", probs.size(), want);
    }
    for (double p : probs) {
      if (p < 0.0 || p > 1.0) {
        throw errors::malformed_line(line_no, "adjacency_probs must be in [0, 1]");
      }
    }
    cand.adjacency_probs = std::move(probs);
  }
  return cand;
}

}  // namespace

CandidatePools load_candidates(const std::string& path,
                               const std::vector<Document>& docs) {
  std::set<std::string> known;
  for (const Document& doc : docs) known.insert(doc.id);

  CandidatePools pools;
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    json obj = parse_line(line_no, line);
    if (!obj.is_object()) throw errors::malformed_line(line_no, "expected a JSON object");
    with_line_context(line_no, [&] {
      CandidateSummary cand = parse_candidate(obj, line_no, known);
      pools[cand.doc_id].push_back(std::move(cand));
    });
  });

  for (auto& [id, pool] : pools) {
    std::stable_sort(pool.begin(), pool.end(),
                     [](const CandidateSummary& a, const CandidateSummary& b) {
                       return a.index < b.index;
                     });
  }
  return pools;
}

void write_candidates(const std::string& path, const CandidatePools& pools) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw errors::io_error(path, "cannot open file for writing");
  for (const auto& [id, pool] : pools) {
    for (const CandidateSummary& cand : pool) {
      json obj;
      obj["doc_id"] = cand.doc_id;
      obj["index"] = cand.index;
      obj["text"] = cand.text;
      obj["token_logprobs"] = cand.token_logprobs;
      if (cand.roles) {
        json roles = json::array();
        for (DiscourseRole role : *cand.roles) roles.push_back(to_string(role));
        obj["roles"] = roles;
      }
      if (cand.saliency) obj["saliency"] = *cand.saliency;
      if (cand.adjacency_probs) obj["adjacency_probs"] = *cand.adjacency_probs;
      out << obj.dump() << '\n';
    }
  }
}

Document truncate_inputs(const Document& doc, std::size_t article_max,
                         std::size_t summary_max) {
  if (article_max < 1 || summary_max < 1) {
    throw ValidationError(ErrorKind::BadConfig, "truncation limits must be >= 1");
  }
  Document out = doc;
  auto cut = [](const std::string& text, std::size_t max_tokens) {
    std::vector<Token> tokens = tokenize(text);
    if (tokens.size() <= max_tokens) return text;
    return text.substr(0, tokens[max_tokens - 1].end);
  };
  out.article = cut(doc.article, article_max);
  out.reference_summary = cut(doc.reference_summary, summary_max);
  out.truncated = out.article.size() != doc.article.size() ||
                  out.reference_summary.size() != doc.reference_summary.size();
  return out;
}

PairSample sample_pairs(const std::vector<Document>& docs, std::uint64_t seed,
                        int per_doc) {
  if (per_doc < 1) {
    throw ValidationError(ErrorKind::BadConfig, "per_doc must be >= 1");
  }
  PairSample sample;
  SplitMix64 rng(seed);
  for (const Document& doc : docs) {
    SentenceSplit split = split_sentences(doc.reference_summary);
    std::size_t n = split.size();
    if (n < 5) {
      sample.skipped_docs.push_back(doc.id);
      continue;
    }
    for (int draw = 0; draw < per_doc; ++draw) {
      std::size_t anchor = rng.next_below(n);

      // Adjacent partner: uniform among the existing neighbours.
      std::size_t partner;
      if (anchor == 0) {
        partner = 1;
      } else if (anchor == n - 1) {
        partner = n - 2;
      } else {
        partner = (rng.next_below(2) == 0) ? anchor - 1 : anchor + 1;
      }

      // Non-adjacent partner: uniform among sentences at distance >= 2.
      std::vector<std::size_t> far;
      for (std::size_t v = 0; v < n; ++v) {
        if (v + 1 < anchor || v > anchor + 1) far.push_back(v);
      }
      std::size_t negative = far[rng.next_below(far.size())];

      SentencePairExample positive;
      positive.first = sentence_text(doc.reference_summary, split, anchor);
      positive.second = sentence_text(doc.reference_summary, split, partner);
      positive.label = 1;
      positive.source_doc = doc.id;
      sample.pairs.push_back(std::move(positive));

      SentencePairExample negative_example;
      negative_example.first = sentence_text(doc.reference_summary, split, anchor);
      negative_example.second = sentence_text(doc.reference_summary, split, negative);
      negative_example.label = 0;
      negative_example.source_doc = doc.id;
      sample.pairs.push_back(std::move(negative_example));
    }
  }
  return sample;
}

std::vector<SentencePairExample> load_pairs(const std::string& path) {
  std::vector<SentencePairExample> pairs;
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    if (line[line.find_first_not_of(" \t")] == '#') return;  // comment line
    json obj = parse_line(line_no, line);
    if (!obj.is_object()) throw errors::malformed_line(line_no, "expected a JSON object");
    with_line_context(line_no, [&] {
      SentencePairExample pair;
      pair.first = require_string(obj, line_no, "first");
      pair.second = require_string(obj, line_no, "second");
      if (!obj.contains("label")) throw errors::missing_field(line_no, "label");
      int label = obj["label"].get<int>();
      if (label != 0 && label != 1) {
        throw errors::malformed_line(line_no, "label must be 0 or 1");
      }
      pair.label = label;
      pair.source_doc = obj.value("source_doc", std::string{});
      pairs.push_back(std::move(pair));
    });
  });
  return pairs;
}

}  // namespace coopnet
