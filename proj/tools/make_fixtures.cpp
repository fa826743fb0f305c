// Regenerates the JSONL fixtures under tests/fixtures/. Deterministic: the
// same seed always produces byte-identical files. Usage:
//   make_fixtures [output-dir]

#include <cassert>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "coopnet/corpus.hpp"
#include "coopnet/rng.hpp"
#include "coopnet/text.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace coopnet;

namespace {

double round4(double value) { return std::round(value * 1e4) / 1e4; }

const std::vector<std::string> kNouns = {
    "entropy",   "lattice",  "embedding", "gradient", "manifold",
    "kernel",    "automaton", "spectrum", "topology", "genome",
    "protein",   "corpus",   "parser",    "decoder",  "alignment",
    "attention", "graph",    "tensor",    "sampler",  "operator",
};

const std::vector<std::string> kAdjectives = {
    "sparse", "robust", "modular", "compact", "adaptive", "layered",
};

// Words that never appear in any generated article, so candidates using
// them carry unverifiable spans.
const std::vector<std::string> kHallucinated = {
    "chimera", "griffin", "obelisk", "zeppelin", "labyrinth", "pendulum",
};

std::string pick(SplitMix64& rng, const std::vector<std::string>& bank) {
  return bank[rng.next_below(bank.size())];
}

std::string make_sentence(SplitMix64& rng, int flavor,
                          const std::vector<std::string>& noun_bank) {
  std::string n1 = pick(rng, noun_bank);
  std::string n2 = pick(rng, noun_bank);
  std::string adj = pick(rng, kAdjectives);
  switch (flavor % 8) {
    case 0: return "Prior work has been limited to " + n1 + " " + n2 + " pipelines.";
    case 1: return "We propose a " + adj + " " + n1 + " model for " + n2 + " analysis.";
    case 2: return "We use a " + n1 + " encoder with " + n2 + " features.";
    case 3: return "We train the model on a large " + n1 + " corpus.";
    case 4: return "Results show that the " + n1 + " approach outperforms strong baselines.";
    case 5: return "The " + n1 + " layer encodes " + n2 + " structure.";
    case 6: return "However, the " + n1 + " method remains sensitive to " + n2 + " noise.";
    default: return "Moreover, we find that " + n1 + " signals improve " + n2 + " recovery.";
  }
}

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string text;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i) text.push_back(' ');
    text += sentences[i];
  }
  return text;
}

std::vector<double> random_logprobs(SplitMix64& rng, const std::string& text) {
  std::size_t count = tokenize(text).size();
  std::vector<double> logprobs;
  logprobs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    logprobs.push_back(round4(-0.05 - 2.95 * rng.next_unit()));
  }
  return logprobs;
}

std::vector<DiscourseRole> random_roles(SplitMix64& rng, std::size_t count) {
  std::vector<DiscourseRole> roles;
  for (std::size_t i = 0; i < count; ++i) {
    roles.push_back(static_cast<DiscourseRole>(rng.next_below(5)));
  }
  return roles;
}

CandidateSummary finish_candidate(SplitMix64& rng, const std::string& doc_id,
                                  int index, const std::string& text) {
  CandidateSummary cand;
  cand.doc_id = doc_id;
  cand.index = index;
  cand.text = text;
  cand.token_logprobs = random_logprobs(rng, text);

  SentenceSplit split = split_sentences(text);
  cand.roles = random_roles(rng, split.size());

  std::vector<int> saliency;
  std::size_t token_count = cand.token_logprobs.size();
  saliency.assign(token_count, 0);
  for (std::size_t i = 0; i < token_count; ++i) {
    if (rng.next_unit() < 0.25) saliency[i] = 1;
  }
  cand.saliency = saliency;

  if (split.size() > 1) {
    std::vector<double> probs;
    for (std::size_t i = 0; i + 1 < split.size(); ++i) {
      probs.push_back(round4(0.05 + 0.9 * rng.next_unit()));
    }
    cand.adjacency_probs = probs;
  } else {
    cand.adjacency_probs = std::vector<double>{};
  }
  return cand;
}

void make_main_fixture(const fs::path& dir) {
  SplitMix64 rng(20240601);
  std::vector<Document> docs;
  CandidatePools pools;

  for (int d = 0; d < 20; ++d) {
    // Per-document noun bank keeps articles and faithful candidates aligned.
    std::vector<std::string> noun_bank;
    for (int k = 0; k < 8; ++k) noun_bank.push_back(pick(rng, kNouns));

    std::vector<std::string> article_sents;
    std::size_t article_len = 5 + rng.next_below(3);
    for (std::size_t s = 0; s < article_len; ++s) {
      article_sents.push_back(
          make_sentence(rng, static_cast<int>(rng.next_below(8)), noun_bank));
    }

    std::vector<std::string> summary_sents;
    std::size_t summary_len = 5 + rng.next_below(2);
    for (std::size_t s = 0; s < summary_len; ++s) {
      summary_sents.push_back(
          make_sentence(rng, static_cast<int>(s), noun_bank));
    }

    Document doc;
    doc.id = "doc" + std::to_string(d + 1);
    doc.article = join_sentences(article_sents);
    doc.reference_summary = join_sentences(summary_sents);
    docs.push_back(doc);

    for (int c = 0; c < 10; ++c) {
      std::vector<std::string> cand_sents;
      std::size_t cand_len = 3 + rng.next_below(3);
      for (std::size_t s = 0; s < cand_len; ++s) {
        // Most sentences reuse the document bank; some hallucinate.
        bool hallucinate = rng.next_unit() < 0.2;
        const std::vector<std::string>& bank =
            hallucinate ? kHallucinated : noun_bank;
        cand_sents.push_back(
            make_sentence(rng, static_cast<int>(rng.next_below(8)), bank));
      }
      // One run-on candidate exercises the sentence-length filter.
      if (d == 2 && c == 7) {
        std::string run_on = "The";
        for (int w = 0; w < 210; ++w) run_on += " " + pick(rng, kNouns);
        run_on += ".";
        cand_sents.push_back(run_on);
      }
      pools[doc.id].push_back(
          finish_candidate(rng, doc.id, c, join_sentences(cand_sents)));
    }
  }

  write_documents((dir / "documents.jsonl").string(), docs);
  write_candidates((dir / "candidates.jsonl").string(), pools);
}

// Ten documents with two candidates each; exactly three are constructed to
// change their top candidate under the coverage objective at equal lambdas.
void make_flip_fixture(const fs::path& dir) {
  std::vector<Document> docs;
  CandidatePools pools;

  const std::string five_role_text =
      "Prior work has been studied. We propose a new model. "
      "We use a simple encoder. Results show clear gains. "
      "This direction seems promising.";
  const std::vector<std::string> five_roles = {"BACKGROUND", "OBJECTIVE",
                                               "METHOD", "RESULT", "OTHER"};
  const std::string two_role_text_a =
      "Prior work has been studied. We use a simple encoder.";
  const std::string two_role_text_b =
      "Recent work has been explored. We train a small parser.";

  auto constant_logprobs = [](const std::string& text, double value) {
    return std::vector<double>(tokenize(text).size(), value);
  };
  auto to_roles = [](const std::vector<std::string>& names) {
    std::vector<DiscourseRole> roles;
    for (const std::string& name : names) roles.push_back(*role_from_string(name));
    return roles;
  };

  for (int d = 0; d < 10; ++d) {
    Document doc;
    doc.id = "flip" + std::to_string(d + 1);
    doc.article =
        "This article studies simple encoders. We describe a parser and a "
        "small model. Results are reported on a benchmark.";
    doc.reference_summary = five_role_text;
    docs.push_back(doc);

    bool flips = (d == 2 || d == 5 || d == 8);

    CandidateSummary first;
    first.doc_id = doc.id;
    first.index = 0;
    if (flips) {
      first.text = "Prior work has been studied extensively.";
      first.roles = to_roles({"BACKGROUND"});
    } else {
      first.text = two_role_text_a;
      first.roles = to_roles({"BACKGROUND", "METHOD"});
    }
    first.token_logprobs = constant_logprobs(first.text, -0.1);

    CandidateSummary second;
    second.doc_id = doc.id;
    second.index = 1;
    if (flips) {
      second.text = five_role_text;
      second.roles = to_roles(five_roles);
    } else {
      second.text = two_role_text_b;
      second.roles = to_roles({"BACKGROUND", "METHOD"});
    }
    second.token_logprobs = constant_logprobs(second.text, -0.2);

    pools[doc.id] = {first, second};
  }

  write_documents((dir / "flip_documents.jsonl").string(), docs);
  write_candidates((dir / "flip_candidates.jsonl").string(), pools);
}

// Sentence pairs whose label is 1 exactly when the two sentences share most
// of their content words, so the Jaccard feature separates them linearly.
void make_synthetic_pairs(const fs::path& dir) {
  SplitMix64 rng(987654321);
  std::ofstream out(dir / "synthetic_pairs.jsonl", std::ios::binary);
  assert(out);
  out << "# synthetic adjacency training pairs; label = high content overlap\n";

  auto sample_words = [&](std::size_t count, std::size_t offset) {
    std::vector<std::string> words;
    while (words.size() < count) {
      std::string word = kNouns[(rng.next_below(kNouns.size() / 2) + offset) %
                                kNouns.size()];
      bool seen = false;
      for (const std::string& w : words) seen = seen || w == word;
      if (!seen) words.push_back(word);
    }
    return words;
  };
  auto to_sentence = [](const std::vector<std::string>& words) {
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) text.push_back(' ');
      text += words[i];
    }
    return text + " .";
  };

  for (int i = 0; i < 100; ++i) {
    // positive: second sentence reuses five of six content words
    std::vector<std::string> base = sample_words(6, 0);
    std::vector<std::string> shared(base.begin(), base.begin() + 5);
    shared.push_back(kNouns[kNouns.size() / 2 + rng.next_below(kNouns.size() / 2)]);
    json pos;
    pos["first"] = to_sentence(base);
    pos["second"] = to_sentence(shared);
    pos["label"] = 1;
    pos["source_doc"] = "synthetic";
    out << pos.dump() << '\n';

    // negative: disjoint content word sets
    std::vector<std::string> left = sample_words(6, 0);
    std::vector<std::string> right = sample_words(6, kNouns.size() / 2);
    json neg;
    neg["first"] = to_sentence(left);
    neg["second"] = to_sentence(right);
    neg["label"] = 0;
    neg["source_doc"] = "synthetic";
    out << neg.dump() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("tests/fixtures");
  fs::create_directories(dir);
  make_main_fixture(dir);
  make_flip_fixture(dir);
  make_synthetic_pairs(dir);
  std::cout << "fixtures written to " << dir << "\n";
  return 0;
}
