#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "coopnet/corpus.hpp"
#include "coopnet/discriminators.hpp"
#include "coopnet/errors.hpp"
#include "coopnet/rng.hpp"

using namespace coopnet;

namespace {

using R = DiscourseRole;

CandidateSummary candidate_with_text(const std::string& text) {
  CandidateSummary cand;
  cand.doc_id = "d";
  cand.index = 0;
  cand.text = text;
  return cand;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.kind();
  }
  FAIL("expected a ValidationError");
  return ErrorKind::IoError;
}

// Independent rule-walker: an if-chain transcription of the four ordering
// rows plus the endpoint rules; kept free of the production table.
int naive_pair_score(R prev, R next) {
  if (next == R::Background && prev == R::Background) return 1;
  if (next == R::Method &&
      (prev == R::Background || prev == R::Method || prev == R::Objective)) {
    return 1;
  }
  if (next == R::Objective &&
      (prev == R::Background || prev == R::Objective || prev == R::Method)) {
    return 1;
  }
  if (next == R::Result &&
      (prev == R::Objective || prev == R::Method || prev == R::Other)) {
    return 1;
  }
  return -1;
}

double naive_ordering_value(const std::vector<R>& roles) {
  int sum = 0;
  for (std::size_t i = 1; i < roles.size(); ++i) {
    sum += naive_pair_score(roles[i - 1], roles[i]);
  }
  sum += roles.front() == R::Background ? 1 : -1;
  sum += roles.back() == R::Result ? 1 : -1;
  double normalized = (sum + 11) / 22.0;
  return std::log(std::max(1e-8, normalized));
}

}  // namespace

TEST_CASE("coverage: distinct-role ratios") {
  DiscriminatorScore full =
      score_coverage({R::Background, R::Method, R::Objective, R::Result, R::Other});
  CHECK(full.value == 0.0);
  CHECK(full.flags.empty());

  DiscriminatorScore three = score_coverage({R::Background, R::Method, R::Result});
  CHECK(three.value == doctest::Approx(-0.5108256238).epsilon(1e-9));
  CHECK(three.flags.size() == 2);  // OBJECTIVE and OTHER missing

  DiscriminatorScore one = score_coverage({R::Background, R::Background, R::Background});
  CHECK(one.value == doctest::Approx(-1.6094379124).epsilon(1e-9));

  CHECK(kind_of([] { score_coverage({}); }) == ErrorKind::EmptyRoles);
}

TEST_CASE("coverage: bounds and exact formula on random sequences") {
  SplitMix64 rng(5);
  double lower = std::log(1.0 / 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<R> roles;
    std::size_t len = 1 + rng.next_below(10);
    std::vector<bool> seen(5, false);
    for (std::size_t i = 0; i < len; ++i) {
      int r = static_cast<int>(rng.next_below(5));
      seen[r] = true;
      roles.push_back(static_cast<R>(r));
    }
    int distinct = 0;
    for (bool s : seen) distinct += s ? 1 : 0;

    DiscriminatorScore score = score_coverage(roles);
    CHECK(score.value >= lower - 1e-12);
    CHECK(score.value <= 0.0);
    double expected = std::log(std::max(1e-8, distinct / 5.0));
    CHECK(std::abs(score.value - expected) <= 1e-12);
    CHECK((score.value == 0.0) == (distinct == 5));
  }
}

TEST_CASE("f_n: exact endpoints, midpoint, monotonicity, range check") {
  CHECK(f_n(-11, 11) == 0.0);
  CHECK(f_n(0, 11) == 0.5);
  CHECK(f_n(11, 11) == 1.0);
  CHECK(f_n(4, 11) == doctest::Approx(15.0 / 22.0).epsilon(1e-15));
  for (int s = -10; s <= 11; ++s) {
    CHECK(f_n(s, 11) > f_n(s - 1, 11));
  }
  CHECK(kind_of([] { f_n(12, 11); }) == ErrorKind::OutOfRange);
  CHECK(kind_of([] { f_n(-12, 11); }) == ErrorKind::OutOfRange);
}

TEST_CASE("ordering: worked examples") {
  DiscriminatorScore good = score_ordering({R::Background, R::Method, R::Result});
  CHECK(good.detail["pair_sum"] == 4);
  CHECK(good.value == doctest::Approx(std::log(15.0 / 22.0)).epsilon(1e-12));

  DiscriminatorScore bad = score_ordering({R::Result, R::Background});
  CHECK(bad.detail["pair_sum"] == -3);
  CHECK(bad.value == doctest::Approx(std::log(8.0 / 22.0)).epsilon(1e-12));

  // A ten-sentence sequence that satisfies every rule reaches the maximum.
  std::vector<R> maximal(8, R::Background);
  maximal.push_back(R::Method);
  maximal.push_back(R::Result);
  DiscriminatorScore top = score_ordering(maximal);
  CHECK(top.detail["pair_sum"] == 11);
  CHECK(top.value == 0.0);

  // BACKGROUND is not a valid predecessor of RESULT, so a sequence ending
  // BACKGROUND -> RESULT loses a point on that transition.
  std::vector<R> bg_result(9, R::Background);
  bg_result.push_back(R::Result);
  DiscriminatorScore near = score_ordering(bg_result);
  CHECK(near.detail["pair_sum"] == 9);

  CHECK(kind_of([] { score_ordering({}); }) == ErrorKind::EmptyRoles);
}

TEST_CASE("ordering: sequences beyond ten sentences are truncated") {
  // 12 sentences; the tail RESULT would satisfy the last rule, but only the
  // first ten sentences count.
  std::vector<R> roles(11, R::Background);
  roles.push_back(R::Result);
  DiscriminatorScore score = score_ordering(roles);
  std::vector<R> first_ten(10, R::Background);
  DiscriminatorScore expected = score_ordering(first_ten);
  CHECK(score.value == expected.value);
}

TEST_CASE("ordering: exhaustive agreement with the naive rule-walker") {
  const std::vector<R> all = {R::Background, R::Method, R::Objective, R::Result,
                              R::Other};
  std::size_t checked = 0;
  for (std::size_t len = 1; len <= 4; ++len) {
    std::vector<std::size_t> idx(len, 0);
    while (true) {
      std::vector<R> roles;
      for (std::size_t k : idx) roles.push_back(all[k]);
      CHECK(score_ordering(roles).value == naive_ordering_value(roles));
      ++checked;
      std::size_t pos = 0;
      while (pos < len && ++idx[pos] == all.size()) idx[pos++] = 0;
      if (pos == len) break;
    }
  }
  CHECK(checked == 5 + 25 + 125 + 625);
}

TEST_CASE("adjacency features: identity, disjoint, connective start") {
  std::vector<double> same =
      adjacency_features("The cat sat on the mat.", "The cat sat on the mat.");
  CHECK(same[0] == 1.0);  // content jaccard
  CHECK(same[2] == 1.0);  // length ratio
  CHECK(same[4] == 1.0);  // bias channel

  std::vector<double> disjoint =
      adjacency_features("The cat sat.", "A dog runs fast.");
  CHECK(disjoint[0] == 0.0);

  std::vector<double> connective =
      adjacency_features("The model works.", "However, it fails.");
  CHECK(connective[3] == 1.0);
  std::vector<double> plain =
      adjacency_features("The model works.", "It fails.");
  CHECK(plain[3] == 0.0);

  std::vector<double> empty = adjacency_features("", "");
  CHECK(empty[0] == 0.0);
  CHECK(empty[1] == 0.0);
  CHECK(empty[2] == 0.0);
  CHECK(empty[4] == 1.0);
}

TEST_CASE("predict_adjacency: sigmoid behaviour and feature mismatch") {
  AdjacencyModel zero = AdjacencyModel::zero();
  CHECK(predict_adjacency(zero, "A b.", "C d.") == 0.5);

  CHECK(sigmoid(10.0) == doctest::Approx(0.9999546021).epsilon(1e-9));
  CHECK(sigmoid(-10.0) == doctest::Approx(4.5397868702e-05).epsilon(1e-9));

  AdjacencyModel bias_only = AdjacencyModel::zero();
  bias_only.bias = 10.0;
  CHECK(predict_adjacency(bias_only, "A b.", "C d.") ==
        doctest::Approx(0.9999546021).epsilon(1e-9));

  AdjacencyModel broken = AdjacencyModel::zero();
  broken.weights.pop_back();
  broken.feature_spec.pop_back();
  CHECK(kind_of([&] { predict_adjacency(broken, "A b.", "C d."); }) ==
        ErrorKind::FeatureMismatch);
}

TEST_CASE("bce loss at a 0.5 prediction is ln 2") {
  CHECK(bce_loss(0.5, 1) == doctest::Approx(0.6931471806).epsilon(1e-9));
  CHECK(bce_loss(0.5, 0) == doctest::Approx(0.6931471806).epsilon(1e-9));
}

TEST_CASE("bce gradient matches central finite differences") {
  SplitMix64 rng(99);
  double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    AdjacencyModel model = AdjacencyModel::zero();
    for (double& w : model.weights) w = rng.next_unit() * 2.0 - 1.0;
    model.bias = rng.next_unit() * 2.0 - 1.0;
    std::vector<double> x(5);
    for (double& v : x) v = rng.next_unit();
    int label = static_cast<int>(rng.next_below(2));

    BceGradient analytic = bce_gradient(model, x, label);
    for (std::size_t k = 0; k <= x.size(); ++k) {
      AdjacencyModel plus = model, minus = model;
      if (k < x.size()) {
        plus.weights[k] += h;
        minus.weights[k] -= h;
      } else {
        plus.bias += h;
        minus.bias -= h;
      }
      double numeric = (bce_loss(predict_adjacency_features(plus, x), label) -
                        bce_loss(predict_adjacency_features(minus, x), label)) /
                       (2.0 * h);
      double a = k < x.size() ? analytic.weights[k] : analytic.bias;
      double rel = std::abs(a - numeric) /
                   std::max({1e-8, std::abs(a), std::abs(numeric)});
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst < 1e-4);
}

namespace {

// Synthetic pairs where the label tracks content overlap: positives repeat
// most words, negatives share nothing.
std::vector<SentencePairExample> separable_pairs(int count) {
  std::vector<SentencePairExample> pairs;
  const std::vector<std::string> left = {"entropy", "lattice", "kernel",
                                         "manifold", "tensor", "graph"};
  const std::vector<std::string> right = {"protein", "genome", "corpus",
                                          "parser", "decoder", "sampler"};
  SplitMix64 rng(4242);
  for (int i = 0; i < count; ++i) {
    auto sentence = [&](const std::vector<std::string>& bank, int rotate) {
      std::string text;
      for (int k = 0; k < 4; ++k) {
        if (k) text.push_back(' ');
        text += bank[(k + rotate) % bank.size()];
      }
      return text + " .";
    };
    int rotate = static_cast<int>(rng.next_below(3));
    SentencePairExample pos;
    pos.first = sentence(left, rotate);
    pos.second = sentence(left, rotate);  // identical content, jaccard 1
    pos.label = 1;
    pairs.push_back(pos);
    SentencePairExample neg;
    neg.first = sentence(left, rotate);
    neg.second = sentence(right, rotate);  // disjoint content, jaccard 0
    neg.label = 0;
    pairs.push_back(neg);
  }
  return pairs;
}

}  // namespace

TEST_CASE("train_adjacency: initialization loss, accuracy, determinism") {
  std::vector<SentencePairExample> pairs = separable_pairs(40);
  TrainResult result = train_adjacency(pairs, 7, 0.1, 15);

  CHECK(result.epoch_losses.front() ==
        doctest::Approx(0.6931471806).epsilon(1e-9));
  CHECK(result.epoch_losses.back() <= result.epoch_losses.front());
  CHECK(result.model.meta.train_accuracy >= 0.95);
  CHECK(adjacency_accuracy(result.model, pairs) >= 0.95);

  TrainResult again = train_adjacency(pairs, 7, 0.1, 15);
  CHECK(result.model.to_json_string() == again.model.to_json_string());

  TrainResult other = train_adjacency(pairs, 8, 0.1, 15);
  CHECK(result.model.to_json_string() != other.model.to_json_string());
}

TEST_CASE("train_adjacency: single-class data is rejected") {
  std::vector<SentencePairExample> pairs = separable_pairs(4);
  pairs.erase(std::remove_if(pairs.begin(), pairs.end(),
                             [](const SentencePairExample& p) {
                               return p.label == 0;
                             }),
              pairs.end());
  CHECK(kind_of([&] { train_adjacency(pairs, 1, 0.1, 5); }) ==
        ErrorKind::DegenerateData);
}

TEST_CASE("adjacency model JSON round-trip") {
  std::vector<SentencePairExample> pairs = separable_pairs(10);
  TrainResult result = train_adjacency(pairs, 3, 0.1, 5);
  AdjacencyModel copy =
      AdjacencyModel::from_json_string(result.model.to_json_string());
  CHECK(copy.weights == result.model.weights);
  CHECK(copy.bias == result.model.bias);
  CHECK(copy.feature_spec == result.model.feature_spec);
  CHECK(copy.meta.seed == result.model.meta.seed);
}

TEST_CASE("score_adjacency: external probabilities") {
  CandidateSummary cand =
      candidate_with_text("Alpha one. Bravo two. Charlie three.");
  cand.adjacency_probs = std::vector<double>{0.5, 0.5};
  DiscriminatorScore score = score_adjacency(cand, AdjacencyBackend::External);
  CHECK(score.value == doctest::Approx(std::log(0.5)).epsilon(1e-12));

  cand.adjacency_probs = std::vector<double>{1.0, 1.0};
  DiscriminatorScore certain = score_adjacency(cand, AdjacencyBackend::External);
  CHECK(certain.value == 0.0);

  // zero probabilities are clamped, never -inf
  cand.adjacency_probs = std::vector<double>{0.0, 0.0};
  DiscriminatorScore floor = score_adjacency(cand, AdjacencyBackend::External);
  CHECK(std::isfinite(floor.value));
  CHECK(floor.value == doctest::Approx(std::log(1e-8)).epsilon(1e-12));

  cand.adjacency_probs.reset();
  CHECK(kind_of([&] { score_adjacency(cand, AdjacencyBackend::External); }) ==
        ErrorKind::MissingExternalProbs);
}

TEST_CASE("score_adjacency: single sentence is neutral") {
  CandidateSummary cand = candidate_with_text("Only one sentence here.");
  DiscriminatorScore score = score_adjacency(cand, AdjacencyBackend::External);
  CHECK(score.value == 0.0);
  REQUIRE(score.flags.size() == 1);
  CHECK(score.flags[0] == "neutral");
}

TEST_CASE("score_adjacency: builtin backend needs a model") {
  CandidateSummary cand = candidate_with_text("Alpha one. Bravo two.");
  CHECK(kind_of([&] { score_adjacency(cand, AdjacencyBackend::Builtin); }) ==
        ErrorKind::MissingModel);
  AdjacencyModel zero = AdjacencyModel::zero();
  DiscriminatorScore score =
      score_adjacency(cand, AdjacencyBackend::Builtin, &zero);
  CHECK(score.value == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("extract_spans: external labels") {
  CandidateSummary cand = candidate_with_text("we propose entropy bounds");
  cand.saliency = std::vector<int>{0, 0, 1, 1};
  EvidenceSpanSet spans = extract_spans(cand, SpanSource::ExternalLabels);
  REQUIRE(spans.spans.size() == 1);
  CHECK(spans.spans.count({"entropy", "bounds"}) == 1);

  // stopwords are stripped from run edges
  CandidateSummary edges = candidate_with_text("the entropy bounds the");
  edges.saliency = std::vector<int>{1, 1, 1, 1};
  EvidenceSpanSet trimmed = extract_spans(edges, SpanSource::ExternalLabels);
  REQUIRE(trimmed.spans.size() == 1);
  CHECK(trimmed.spans.count({"entropy", "bounds"}) == 1);

  // long runs are chunked to max_k
  CandidateSummary run = candidate_with_text("alpha beta gamma");
  run.saliency = std::vector<int>{1, 1, 1};
  EvidenceSpanSet chunks = extract_spans(run, SpanSource::ExternalLabels, 2);
  CHECK(chunks.spans.size() == 2);
  CHECK(chunks.spans.count({"alpha", "beta"}) == 1);
  CHECK(chunks.spans.count({"gamma"}) == 1);

  CandidateSummary all_stop = candidate_with_text("the of and");
  all_stop.saliency = std::vector<int>{1, 1, 1};
  CHECK(extract_spans(all_stop, SpanSource::ExternalLabels).spans.empty());

  // punctuation splits a labeled run rather than welding its sides together
  CandidateSummary punct = candidate_with_text("entropy, bounds");
  punct.saliency = std::vector<int>{1, 1, 1};
  EvidenceSpanSet split_spans = extract_spans(punct, SpanSource::ExternalLabels);
  CHECK(split_spans.spans.size() == 2);
  CHECK(split_spans.spans.count({"entropy"}) == 1);
  CHECK(split_spans.spans.count({"bounds"}) == 1);
  CHECK(split_spans.spans.count({"entropy", "bounds"}) == 0);

  CandidateSummary unlabeled = candidate_with_text("anything");
  CHECK(kind_of([&] { extract_spans(unlabeled, SpanSource::ExternalLabels); }) ==
        ErrorKind::MissingSaliency);
}

TEST_CASE("extract_spans: heuristic unigrams and bigrams") {
  CandidateSummary cand = candidate_with_text("biological system works");
  EvidenceSpanSet spans = extract_spans(cand, SpanSource::Heuristic);
  CHECK(spans.spans.size() == 5);
  CHECK(spans.spans.count({"biological"}) == 1);
  CHECK(spans.spans.count({"system"}) == 1);
  CHECK(spans.spans.count({"works"}) == 1);
  CHECK(spans.spans.count({"biological", "system"}) == 1);
  CHECK(spans.spans.count({"system", "works"}) == 1);

  // stopwords break bigrams and never appear as spans
  CandidateSummary mixed = candidate_with_text("the system of works");
  EvidenceSpanSet filtered = extract_spans(mixed, SpanSource::Heuristic);
  CHECK(filtered.spans.count({"system"}) == 1);
  CHECK(filtered.spans.count({"works"}) == 1);
  CHECK(filtered.spans.count({"the", "system"}) == 0);
  CHECK(filtered.spans.count({"system", "of"}) == 0);

  CandidateSummary stops = candidate_with_text("the of and");
  CHECK(extract_spans(stops, SpanSource::Heuristic).spans.empty());
}

TEST_CASE("score_factuality: match ratios and the no-span flag") {
  Document article;
  article.id = "a";
  article.article = "We study entropy bounds in a biological system today.";

  CandidateSummary cand = candidate_with_text("irrelevant");
  EvidenceSpanSet spans;
  spans.spans = {{"entropy"}, {"biological", "system"}};
  DiscriminatorScore all_present = score_factuality(cand, article, spans);
  CHECK(all_present.value == 0.0);

  spans.spans = {{"entropy"}, {"quantum", "leap"}};
  DiscriminatorScore half = score_factuality(cand, article, spans);
  CHECK(half.value == doctest::Approx(std::log(0.5)).epsilon(1e-12));

  spans.spans = {{"quantum"}, {"leap"}};
  DiscriminatorScore none = score_factuality(cand, article, spans);
  CHECK(none.value == doctest::Approx(std::log(1e-8)).epsilon(1e-12));

  spans.spans = {};
  DiscriminatorScore empty = score_factuality(cand, article, spans);
  CHECK(empty.value == 0.0);
  REQUIRE(empty.flags.size() == 1);
  CHECK(empty.flags[0] == "no-spans");
}

TEST_CASE("score_factuality: adding spans moves the score monotonically") {
  Document article;
  article.id = "a";
  article.article = "alpha beta gamma delta epsilon zeta";
  CandidateSummary cand = candidate_with_text("irrelevant");

  SplitMix64 rng(31);
  const std::vector<std::string> present = {"alpha", "beta", "gamma",
                                            "delta", "epsilon", "zeta"};
  const std::vector<std::string> absent = {"omega", "sigma", "kappa", "mu"};
  for (int trial = 0; trial < 200; ++trial) {
    EvidenceSpanSet spans;
    std::size_t base = 1 + rng.next_below(3);
    for (std::size_t i = 0; i < base; ++i) {
      if (rng.next_below(2)) {
        spans.spans.insert({present[rng.next_below(present.size())]});
      } else {
        spans.spans.insert({absent[rng.next_below(absent.size())]});
      }
    }
    double before = score_factuality(cand, article, spans).value;

    EvidenceSpanSet more = spans;
    std::string extra_present = present[rng.next_below(present.size())];
    bool inserted = more.spans.insert({extra_present}).second;
    if (inserted) {
      CHECK(score_factuality(cand, article, more).value >= before);
    }

    EvidenceSpanSet worse = spans;
    std::string extra_absent = absent[rng.next_below(absent.size())];
    inserted = worse.spans.insert({extra_absent}).second;
    if (inserted) {
      CHECK(score_factuality(cand, article, worse).value <= before);
    }
  }
}

TEST_CASE("heuristic role labeler: cues and defaults") {
  CandidateSummary objective = candidate_with_text("We propose a new model.");
  CHECK(label_roles_heuristic(objective) ==
        RoleSequence{DiscourseRole::Objective});

  CandidateSummary result = candidate_with_text("Our model outperforms baselines.");
  CHECK(label_roles_heuristic(result) == RoleSequence{DiscourseRole::Result});

  CandidateSummary plain = candidate_with_text("Clouds drift over the valley.");
  CHECK(label_roles_heuristic(plain) == RoleSequence{DiscourseRole::Background});

  CandidateSummary multi = candidate_with_text(
      "Clouds drift over the valley. Nothing matches here either. "
      "We use a parser.");
  RoleSequence roles = label_roles_heuristic(multi);
  REQUIRE(roles.size() == 3);
  CHECK(roles[0] == DiscourseRole::Background);  // first-sentence default
  CHECK(roles[1] == DiscourseRole::Other);
  CHECK(roles[2] == DiscourseRole::Method);
}

TEST_CASE("heuristic role labeler: every sentence gets exactly one role") {
  SplitMix64 rng(17);
  const std::vector<std::string> bank = {
      "We propose a model.", "We use a parser.", "Results show gains.",
      "Prior work has been slow.", "Clouds drift.", "It rains today."};
  for (int trial = 0; trial < 100; ++trial) {
    std::string text;
    std::size_t n = 1 + rng.next_below(5);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) text.push_back(' ');
      text += bank[rng.next_below(bank.size())];
    }
    CandidateSummary cand = candidate_with_text(text);
    RoleSequence roles = label_roles_heuristic(cand);
    CHECK(roles.size() == split_sentences(text).size());
  }
}
