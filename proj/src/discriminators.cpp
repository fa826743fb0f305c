#include "coopnet/discriminators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "coopnet/errors.hpp"
#include "coopnet/rng.hpp"
#include "coopnet/embedded_data.hpp"

namespace coopnet {

using json = nlohmann::ordered_json;

double clamped_log(double x) { return std::log(std::max(kLogClampEpsilon, x)); }

const char* to_string(DiscriminatorObjective objective) {
  switch (objective) {
    case DiscriminatorObjective::Coverage: return "coverage";
    case DiscriminatorObjective::Ordering: return "ordering";
    case DiscriminatorObjective::Adjacency: return "adjacency";
    case DiscriminatorObjective::Factuality: return "factuality";
  }
  return "coverage";
}

std::optional<DiscriminatorObjective> objective_from_string(std::string_view name) {
  if (name == "coverage") return DiscriminatorObjective::Coverage;
  if (name == "ordering") return DiscriminatorObjective::Ordering;
  if (name == "adjacency") return DiscriminatorObjective::Adjacency;
  if (name == "factuality") return DiscriminatorObjective::Factuality;
  return std::nullopt;
}

OrderingRuleTable::OrderingRuleTable() {
  auto allow = [&](DiscourseRole prev, DiscourseRole next) {
    allowed_[static_cast<int>(next)][static_cast<int>(prev)] = true;
  };
  using R = DiscourseRole;
  // BACKGROUND may only follow BACKGROUND.
  allow(R::Background, R::Background);
  // METHOD follows BACKGROUND, METHOD or OBJECTIVE.
  allow(R::Background, R::Method);
  allow(R::Method, R::Method);
  allow(R::Objective, R::Method);
  // OBJECTIVE follows BACKGROUND, OBJECTIVE or METHOD.
  allow(R::Background, R::Objective);
  allow(R::Objective, R::Objective);
  allow(R::Method, R::Objective);
  // RESULT follows OBJECTIVE, METHOD or OTHER.
  allow(R::Objective, R::Result);
  allow(R::Method, R::Result);
  allow(R::Other, R::Result);
  // Nothing transitions into OTHER.
}

const OrderingRuleTable& OrderingRuleTable::standard() {
  static const OrderingRuleTable table;
  return table;
}

bool OrderingRuleTable::valid_transition(DiscourseRole prev, DiscourseRole next) const {
  return allowed_[static_cast<int>(next)][static_cast<int>(prev)];
}

DiscriminatorScore score_coverage(const RoleSequence& roles) {
  if (roles.empty()) {
    throw ValidationError(ErrorKind::EmptyRoles, "coverage: role sequence is empty");
  }
  std::array<bool, kNumDiscourseRoles> present{};
  for (DiscourseRole role : roles) present[static_cast<int>(role)] = true;
  int distinct = 0;
  DiscriminatorScore score;
  score.objective = DiscriminatorObjective::Coverage;
  for (int r = 0; r < kNumDiscourseRoles; ++r) {
    if (present[r]) {
      ++distinct;
    } else {
      score.flags.push_back(std::string("missing:") +
                            to_string(static_cast<DiscourseRole>(r)));
    }
  }
  score.value = clamped_log(static_cast<double>(distinct) / kNumDiscourseRoles);
  score.detail["distinct_roles"] = distinct;
  return score;
}

double f_n(int s, int o_max) {
  if (s < -o_max || s > o_max) {
    throw ValidationError(ErrorKind::OutOfRange,
                          "f_n: sum " + std::to_string(s) + " outside [-" +
                              std::to_string(o_max) + ", " + std::to_string(o_max) + "]");
  }
  return static_cast<double>(s + o_max) / (2.0 * o_max);
}

DiscriminatorScore score_ordering(const RoleSequence& roles,
                                  const NormalizationSpec& spec) {
  if (roles.empty()) {
    throw ValidationError(ErrorKind::EmptyRoles, "ordering: role sequence is empty");
  }
  RoleSequence truncated = roles;
  if (truncated.size() > static_cast<std::size_t>(spec.max_sentences)) {
    truncated.resize(spec.max_sentences);
  }
  const OrderingRuleTable& table = OrderingRuleTable::standard();
  int sum = 0;
  for (std::size_t i = 1; i < truncated.size(); ++i) {
    sum += table.valid_transition(truncated[i - 1], truncated[i]) ? 1 : -1;
  }
  sum += truncated.front() == table.first_rule() ? 1 : -1;
  sum += truncated.back() == table.last_rule() ? 1 : -1;

  DiscriminatorScore score;
  score.objective = DiscriminatorObjective::Ordering;
  double normalized = f_n(sum, spec.o_max);
  score.value = clamped_log(normalized);
  score.detail["pair_sum"] = sum;
  score.detail["normalized"] = normalized;
  return score;
}

std::vector<double> adjacency_features(std::string_view first,
                                       std::string_view second) {
  return adjacency_features(first, second, Lexicon::default_stopwords(),
                            Lexicon::default_connectives());
}

std::vector<double> adjacency_features(std::string_view first,
                                       std::string_view second,
                                       const Lexicon& stopwords,
                                       const Lexicon& connectives) {
  std::vector<Token> a = tokenize(first, stopwords);
  std::vector<Token> b = tokenize(second, stopwords);

  auto content_set = [](const std::vector<Token>& tokens) {
    std::set<std::string> words;
    for (const Token& t : tokens) {
      if (!t.is_stopword && is_word_token(t)) words.insert(t.surface);
    }
    return words;
  };

  std::set<std::string> ca = content_set(a);
  std::set<std::string> cb = content_set(b);
  std::size_t intersection = 0;
  for (const std::string& w : ca) intersection += cb.count(w);
  std::size_t unions = ca.size() + cb.size() - intersection;
  double jaccard = unions == 0 ? 0.0
                               : static_cast<double>(intersection) /
                                     static_cast<double>(unions);

  double bigram_overlap = 0.0;
  std::size_t min_len = std::min(a.size(), b.size());
  if (min_len >= 2) {
    NgramSet ba = ngrams(a, 2);
    NgramSet bb = ngrams(b, 2);
    std::size_t shared = 0;
    for (const Ngram& g : ba) shared += bb.count(g);
    bigram_overlap = static_cast<double>(shared) / static_cast<double>(min_len);
  }

  double length_ratio = 0.0;
  std::size_t max_len = std::max(a.size(), b.size());
  if (max_len > 0) {
    length_ratio = static_cast<double>(std::min(a.size(), b.size())) /
                   static_cast<double>(max_len);
  }

  double connective_start = connectives.match_at(b, 0) > 0 ? 1.0 : 0.0;

  return {jaccard, bigram_overlap, length_ratio, connective_start, 1.0};
}

AdjacencyModel AdjacencyModel::zero() {
  AdjacencyModel model;
  model.feature_spec.assign(kAdjacencyFeatureNames.begin(),
                            kAdjacencyFeatureNames.end());
  model.weights.assign(kAdjacencyFeatureNames.size(), 0.0);
  model.bias = 0.0;
  return model;
}

std::string AdjacencyModel::to_json_string() const {
  json obj;
  obj["feature_spec"] = feature_spec;
  obj["weights"] = weights;
  obj["bias"] = bias;
  obj["training_meta"] = {{"seed", meta.seed},
                          {"learning_rate", meta.learning_rate},
                          {"epochs", meta.epochs},
                          {"final_loss", meta.final_loss},
                          {"train_accuracy", meta.train_accuracy}};
  return obj.dump(2) + "\n";
}

AdjacencyModel AdjacencyModel::from_json_string(const std::string& json_text) {
  json obj = json::parse(json_text);
  AdjacencyModel model;
  model.feature_spec = obj.at("feature_spec").get<std::vector<std::string>>();
  model.weights = obj.at("weights").get<std::vector<double>>();
  model.bias = obj.at("bias").get<double>();
  if (obj.contains("training_meta")) {
    const json& meta = obj["training_meta"];
    model.meta.seed = meta.value("seed", 0ULL);
    model.meta.learning_rate = meta.value("learning_rate", 0.0);
    model.meta.epochs = meta.value("epochs", 0);
    model.meta.final_loss = meta.value("final_loss", 0.0);
    model.meta.train_accuracy = meta.value("train_accuracy", 0.0);
  }
  if (model.weights.size() != model.feature_spec.size()) {
    throw ValidationError(ErrorKind::FeatureMismatch,
                          "model weights and feature_spec differ in length");
  }
  return model;
}

void AdjacencyModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw errors::io_error(path, "cannot open file for writing");
  out << to_json_string();
}

AdjacencyModel AdjacencyModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw errors::io_error(path, "cannot open model file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return from_json_string(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw errors::io_error(path, std::string("invalid model JSON: ") + e.what());
  }
}

double sigmoid(double logit) {
  if (logit >= 0.0) {
    return 1.0 / (1.0 + std::exp(-logit));
  }
  double e = std::exp(logit);
  return e / (1.0 + e);
}

namespace {

void check_feature_spec(const AdjacencyModel& model, std::size_t feature_count) {
  if (model.weights.size() != feature_count ||
      model.feature_spec.size() != feature_count) {
    throw ValidationError(ErrorKind::FeatureMismatch,
                          "adjacency model does not match the feature layout");
  }
  for (std::size_t i = 0; i < feature_count; ++i) {
    if (model.feature_spec[i] != kAdjacencyFeatureNames[i]) {
      throw ValidationError(ErrorKind::FeatureMismatch,
                            "adjacency model feature \"" + model.feature_spec[i] +
                                "\" does not match expected \"" +
                                kAdjacencyFeatureNames[i] + "\"");
    }
  }
}

}  // namespace

double predict_adjacency_features(const AdjacencyModel& model,
                                  const std::vector<double>& features) {
  check_feature_spec(model, features.size());
  double logit = model.bias;
  for (std::size_t i = 0; i < features.size(); ++i) {
    logit += model.weights[i] * features[i];
  }
  return sigmoid(logit);
}

double predict_adjacency(const AdjacencyModel& model, std::string_view first,
                         std::string_view second) {
  return predict_adjacency_features(model, adjacency_features(first, second));
}

double bce_loss(double probability, int label) {
  if (label == 1) return -clamped_log(probability);
  return -clamped_log(1.0 - probability);
}

BceGradient bce_gradient(const AdjacencyModel& model,
                         const std::vector<double>& features, int label) {
  double p = predict_adjacency_features(model, features);
  double residual = p - static_cast<double>(label);
  BceGradient grad;
  grad.weights.resize(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    grad.weights[i] = residual * features[i];
  }
  grad.bias = residual;
  return grad;
}

TrainResult train_adjacency(const std::vector<SentencePairExample>& pairs,
                            std::uint64_t seed, double learning_rate,
                            int epochs) {
  bool has_positive = false, has_negative = false;
  for (const SentencePairExample& pair : pairs) {
    (pair.label == 1 ? has_positive : has_negative) = true;
  }
  if (!has_positive || !has_negative) {
    throw ValidationError(ErrorKind::DegenerateData,
                          "training data must contain both labels");
  }

  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  features.reserve(pairs.size());
  for (const SentencePairExample& pair : pairs) {
    features.push_back(adjacency_features(pair.first, pair.second));
    labels.push_back(pair.label);
  }

  TrainResult result;
  result.model = AdjacencyModel::zero();
  result.model.meta.seed = seed;
  result.model.meta.learning_rate = learning_rate;
  result.model.meta.epochs = epochs;

  auto mean_loss = [&]() {
    double total = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      total += bce_loss(predict_adjacency_features(result.model, features[i]),
                        labels[i]);
    }
    return total / static_cast<double>(features.size());
  };

  result.epoch_losses.push_back(mean_loss());

  SplitMix64 rng(seed);
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::size_t j = rng.next_below(i);
      std::swap(order[i - 1], order[j]);
    }
    for (std::size_t idx : order) {
      BceGradient grad = bce_gradient(result.model, features[idx], labels[idx]);
      for (std::size_t k = 0; k < result.model.weights.size(); ++k) {
        result.model.weights[k] -= learning_rate * grad.weights[k];
      }
      result.model.bias -= learning_rate * grad.bias;
    }
    result.epoch_losses.push_back(mean_loss());
  }

  result.model.meta.final_loss = result.epoch_losses.back();
  double correct = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    double p = predict_adjacency_features(result.model, features[i]);
    if ((p >= 0.5 ? 1 : 0) == labels[i]) correct += 1.0;
  }
  result.model.meta.train_accuracy = correct / static_cast<double>(features.size());
  return result;
}

double adjacency_accuracy(const AdjacencyModel& model,
                          const std::vector<SentencePairExample>& pairs) {
  if (pairs.empty()) {
    throw ValidationError(ErrorKind::EmptyInput, "no pairs to evaluate");
  }
  double correct = 0.0;
  for (const SentencePairExample& pair : pairs) {
    double p = predict_adjacency(model, pair.first, pair.second);
    if ((p >= 0.5 ? 1 : 0) == pair.label) correct += 1.0;
  }
  return correct / static_cast<double>(pairs.size());
}

DiscriminatorScore score_adjacency(const CandidateSummary& candidate,
                                   AdjacencyBackend backend,
                                   const AdjacencyModel* model) {
  SentenceSplit split = split_sentences(candidate.text);
  if (split.size() == 0) {
    throw ValidationError(ErrorKind::EmptyInput,
                          "adjacency: candidate has no sentences");
  }
  DiscriminatorScore score;
  score.objective = DiscriminatorObjective::Adjacency;
  if (split.size() == 1) {
    score.value = 0.0;
    score.flags.push_back("neutral");
    score.detail["pairs"] = 0;
    return score;
  }

  std::size_t pair_count = split.size() - 1;
  double total = 0.0;
  if (backend == AdjacencyBackend::External) {
    if (!candidate.adjacency_probs) {
      throw ValidationError(ErrorKind::MissingExternalProbs,
                            "adjacency: external backend needs adjacency_probs");
    }
    if (candidate.adjacency_probs->size() != pair_count) {
      throw ValidationError(ErrorKind::LengthMismatch,
                            "adjacency: adjacency_probs length does not match "
                            "sentence pairs");
    }
    for (double p : *candidate.adjacency_probs) total += clamped_log(p);
  } else {
    if (model == nullptr) {
      throw ValidationError(ErrorKind::MissingModel,
                            "adjacency: builtin backend needs a trained model");
    }
    for (std::size_t u = 1; u < split.size(); ++u) {
      double p = predict_adjacency(*model,
                                   sentence_text(candidate.text, split, u - 1),
                                   sentence_text(candidate.text, split, u));
      total += clamped_log(p);
    }
  }
  score.value = total / static_cast<double>(pair_count);
  score.detail["pairs"] = static_cast<double>(pair_count);
  return score;
}

namespace {

bool is_content_token(const Token& token) {
  return !token.is_stopword && is_word_token(token);
}

}  // namespace

EvidenceSpanSet extract_spans(const CandidateSummary& candidate,
                              SpanSource source, int max_k) {
  if (max_k < 1) {
    throw ValidationError(ErrorKind::BadConfig, "extract_spans: max_k must be >= 1");
  }
  std::vector<Token> tokens = tokenize(candidate.text);
  EvidenceSpanSet result;
  result.source = source;

  if (source == SpanSource::Heuristic) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (!is_content_token(tokens[i])) continue;
      result.spans.insert({tokens[i].surface});
      if (max_k >= 2 && i + 1 < tokens.size() && is_content_token(tokens[i + 1])) {
        result.spans.insert({tokens[i].surface, tokens[i + 1].surface});
      }
    }
    return result;
  }

  if (!candidate.saliency) {
    throw ValidationError(ErrorKind::MissingSaliency,
                          "extract_spans: candidate has no saliency labels");
  }
  if (candidate.saliency->size() != tokens.size()) {
    throw ValidationError(ErrorKind::LengthMismatch,
                          "extract_spans: saliency length does not match tokens");
  }

  const std::vector<int>& labels = *candidate.saliency;
  std::size_t i = 0;
  while (i < tokens.size()) {
    // punctuation breaks a run so spans stay contiguous in the text
    if (labels[i] != 1 || !is_word_token(tokens[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < tokens.size() && labels[j] == 1 && is_word_token(tokens[j])) ++j;

    // stopwords stripped from run edges
    std::vector<std::string> run;
    std::size_t lo = i, hi = j;
    while (lo < hi && tokens[lo].is_stopword) ++lo;
    while (hi > lo && tokens[hi - 1].is_stopword) --hi;
    for (std::size_t k = lo; k < hi; ++k) run.push_back(tokens[k].surface);

    for (std::size_t start = 0; start < run.size();
         start += static_cast<std::size_t>(max_k)) {
      std::size_t len = std::min(static_cast<std::size_t>(max_k),
                                 run.size() - start);
      Ngram chunk(run.begin() + start, run.begin() + start + len);
      bool all_stopwords = true;
      for (const std::string& word : chunk) {
        if (!Lexicon::default_stopwords().contains_word(word)) {
          all_stopwords = false;
          break;
        }
      }
      if (!all_stopwords) result.spans.insert(std::move(chunk));
    }
    i = j;
  }
  return result;
}

DiscriminatorScore score_factuality(const CandidateSummary& candidate,
                                    const Document& article,
                                    const EvidenceSpanSet& spans) {
  (void)candidate;
  DiscriminatorScore score;
  score.objective = DiscriminatorObjective::Factuality;
  if (spans.spans.empty()) {
    score.value = 0.0;
    score.flags.push_back("no-spans");
    score.detail["spans"] = 0;
    score.detail["matched"] = 0;
    return score;
  }

  std::vector<Token> article_tokens = tokenize(article.article);
  std::map<std::size_t, NgramSet> grams_by_order;
  std::size_t matched = 0;
  for (const Ngram& span : spans.spans) {
    std::size_t k = span.size();
    auto it = grams_by_order.find(k);
    if (it == grams_by_order.end()) {
      it = grams_by_order.emplace(k, ngrams(article_tokens, k)).first;
    }
    if (it->second.count(span)) ++matched;
  }

  score.value = clamped_log(static_cast<double>(matched) /
                            static_cast<double>(spans.spans.size()));
  score.detail["spans"] = static_cast<double>(spans.spans.size());
  score.detail["matched"] = static_cast<double>(matched);
  return score;
}

RoleRuleTable RoleRuleTable::from_text(std::string_view text) {
  RoleRuleTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw errors::malformed_line(line_no, "role rule needs ROLE<TAB>cue phrase");
    }
    auto role = role_from_string(line.substr(0, tab));
    if (!role) {
      throw errors::malformed_line(line_no,
                                   "unknown role \"" + line.substr(0, tab) + "\"");
    }
    std::vector<Token> cue_tokens = tokenize(line.substr(tab + 1));
    if (cue_tokens.empty()) {
      throw errors::malformed_line(line_no, "empty cue phrase");
    }
    Cue cue;
    cue.role = *role;
    for (const Token& t : cue_tokens) cue.words.push_back(t.surface);
    table.cues_.push_back(std::move(cue));
  }
  return table;
}

RoleRuleTable RoleRuleTable::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw errors::io_error(path, "cannot open role rule file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

const RoleRuleTable& RoleRuleTable::bundled() {
  static const RoleRuleTable table = from_text(detail::kRoleRulesTxt);
  return table;
}

std::size_t RoleRuleTable::cue_count() const { return cues_.size(); }

DiscourseRole RoleRuleTable::label_sentence(const std::vector<Token>& sentence,
                                            std::size_t sentence_index) const {
  auto has_cue = [&](DiscourseRole role) {
    for (const Cue& cue : cues_) {
      if (cue.role != role) continue;
      if (cue.words.size() > sentence.size()) continue;
      for (std::size_t start = 0; start + cue.words.size() <= sentence.size();
           ++start) {
        bool match = true;
        for (std::size_t k = 0; k < cue.words.size(); ++k) {
          if (sentence[start + k].surface != cue.words[k]) {
            match = false;
            break;
          }
        }
        if (match) return true;
      }
    }
    return false;
  };

  // Fixed priority; first sentence defaults to BACKGROUND.
  if (has_cue(DiscourseRole::Objective)) return DiscourseRole::Objective;
  if (has_cue(DiscourseRole::Method)) return DiscourseRole::Method;
  if (has_cue(DiscourseRole::Result)) return DiscourseRole::Result;
  if (has_cue(DiscourseRole::Background)) return DiscourseRole::Background;
  return sentence_index == 0 ? DiscourseRole::Background : DiscourseRole::Other;
}

RoleSequence label_roles_heuristic(const CandidateSummary& candidate) {
  return label_roles_heuristic(candidate, RoleRuleTable::bundled());
}

RoleSequence label_roles_heuristic(const CandidateSummary& candidate,
                                   const RoleRuleTable& rules) {
  SentenceSplit split = split_sentences(candidate.text);
  RoleSequence roles;
  roles.reserve(split.size());
  for (std::size_t s = 0; s < split.size(); ++s) {
    roles.push_back(rules.label_sentence(split.sentences[s], s));
  }
  return roles;
}

}  // namespace coopnet
