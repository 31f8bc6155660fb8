#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "models.hpp"
#include "sams/siamese.hpp"

using namespace sams;

namespace {

Tensor randomVec(Rng& rng, std::size_t d) {
  Tensor t({d});
  for (double& x : t.data()) x = uniform(rng, -1, 1);
  return t;
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double distance(const Tensor& a, const Tensor& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<std::string> words(const std::string& s) { return splitTokens(s); }

Model smallModel(std::size_t senses, EncoderKind enc = EncoderKind::RecNN, std::uint64_t seed = 3) {
  ModelConfig mc;
  mc.dim = 5;
  mc.senses = senses;
  mc.hidden = 4;
  mc.encoder = enc;
  return Model::initialize(testing::toyVocab(10), mc, seed);
}

}  // namespace

TEST_CASE("l2 contrastive cost examples") {
  Tensor v = Tensor::vector({0.3, -0.1});
  CHECK(l2ContrastiveCost(v, v, 1, 1.0) == 0.0);
  CHECK(l2ContrastiveCost(v, v, 0, 1.0) == 0.5);
  CHECK(l2ContrastiveCost(Tensor::vector({0, 0}), Tensor::vector({3, 4}), 0, 5.0) == 0.0);
  CHECK(l2ContrastiveCost(Tensor::vector({0, 0}), Tensor::vector({3, 4}), 1, 5.0) == 12.5);
}

TEST_CASE("cosine cost examples") {
  Tensor v = Tensor::vector({0.3, -0.1});
  CHECK(cosineCost(v, v, 1, 1.0, 0.0) == doctest::Approx(0.03617).epsilon(1e-4));
  CHECK(cosineCost(v, 2.0 * v, 1, 1.0, 0.0) == doctest::Approx(0.5 * std::pow(1 - sig(1), 2)));
  CHECK(cosineCost(v, v, 1, 60.0, 0.0) < 1e-40);
  CHECK(testing::errorKind([&] { cosineCost(v, Tensor::zeros(2), 1, 1.0, 0.0); }) == "ZeroVector");
}

TEST_CASE("cost scale behaviour") {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    Tensor a = randomVec(rng, 4), b = randomVec(rng, 4);
    const double k = uniform(rng, 0.1, 10);
    CHECK(cosineCost(a, b, t % 2, 1.3, -0.2) ==
          doctest::Approx(cosineCost(k * a, b, t % 2, 1.3, -0.2)).epsilon(1e-12));
  }
  Tensor a = Tensor::vector({0.2, 0.4}), b = Tensor::vector({-0.1, 0.3});
  CHECK(l2ContrastiveCost(a, b, 1, 1.0) != doctest::Approx(l2ContrastiveCost(3.0 * a, b, 1, 1.0)));
}

TEST_CASE("tape costs match values and gradients") {
  Rng rng(3);
  ParamSlot a("a", randomVec(rng, 5)), b("b", randomVec(rng, 5));
  ParamSlot head("head", Tensor::vector({1.4, -0.3}));
  std::vector<ParamSlot*> slots{&a, &b, &head};
  for (int y : {0, 1}) {
    for (ParamSlot* s : slots) s->zeroGrad();
    Tape tape;
    Var c = cosineCost(tape, tape.param(a), tape.param(b), y, tape.param(head));
    CHECK(tape.scalarValue(c) == doctest::Approx(cosineCost(a.value, b.value, y, 1.4, -0.3)).epsilon(1e-14));
    GradBuffer g;
    tape.backward(c, g);
    g.flushInto();
    auto loss = [&] { return cosineCost(a.value, b.value, y, head.value[0], head.value[1]); };
    CHECK(finiteDiffCheck(loss, slots, 1e-5) < 1e-4);
  }
  const double m = distance(a.value, b.value) + 0.5;
  for (int y : {0, 1}) {
    a.zeroGrad();
    b.zeroGrad();
    Tape tape;
    Var c = l2ContrastiveCost(tape, tape.param(a), tape.param(b), y, m);
    CHECK(tape.scalarValue(c) == doctest::Approx(l2ContrastiveCost(a.value, b.value, y, m)).epsilon(1e-14));
    GradBuffer g;
    tape.backward(c, g);
    g.flushInto();
    ParamSlot* ab[] = {&a, &b};
    CHECK(finiteDiffCheck([&] { return l2ContrastiveCost(a.value, b.value, y, m); }, ab, 1e-5) < 1e-4);
  }
}

TEST_CASE("surface features") {
  auto same = extractSurfaceFeatures(words("the cat sat"), words("the cat sat"));
  CHECK(same.lengthDiff == 0.0);
  CHECK(same.unigramOverlap == 1.0);
  CHECK(same.numbersEqual);

  CHECK(extractSurfaceFeatures(words("a b"), words("c d e")).unigramOverlap == 0.0);
  CHECK(extractSurfaceFeatures(words("a b c"), words("b c d")).unigramOverlap == 0.5);

  auto nums = extractSurfaceFeatures(words("costs 40 dollars"), words("costs 50 dollars"));
  CHECK_FALSE(nums.numbersEqual);
  CHECK(nums.hasNumbers1);
  CHECK(nums.hasNumbers2);
  auto one = extractSurfaceFeatures(words("costs 3.5 dollars"), words("costs many dollars more"));
  CHECK(one.hasNumbers1);
  CHECK_FALSE(one.hasNumbers2);
  CHECK(one.lengthDiff == 1.0);
  CHECK(isNumericToken("1990s"));
  CHECK_FALSE(isNumericToken("ten"));

  auto f = c1Features(nums, 0.4);
  auto g = c1Features(extractSurfaceFeatures(words("costs 50 dollars"), words("costs 40 dollars")), 0.4);
  CHECK(f == g);
}

TEST_CASE("logistic regression separates a simple set") {
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double x = uniform(rng, -1, 1);
    xs.push_back({x, uniform(rng, -1, 1)});
    ys.push_back(x > 0.1 ? 1 : 0);
  }
  LogisticClassifier c = trainLogistic(xs, ys);
  int correct = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) correct += (c.probability(xs[i]) >= 0.5) == (ys[i] == 1);
  CHECK(correct >= 190);
  CHECK(c.weights[0] > 0);
}

TEST_CASE("single-sense models ignore the mode") {
  for (EncoderKind enc : {EncoderKind::RecNN, EncoderKind::Rnn}) {
    Model m = smallModel(1, enc);
    Sentence s{{1, 5, 2, 7}};
    ParseTree tree = ParseTree::rightBranching(4);
    Tensor amb = encodeSentence(m, s, &tree, SenseMode::Ambiguous, false);
    for (SenseMode mode : {SenseMode::Prior, SenseMode::Hard, SenseMode::Soft}) {
      CHECK(encodeSentence(m, s, &tree, mode, false) == amb);
    }
  }
}

TEST_CASE("soft mode approaches hard mode for large beta") {
  Model m = smallModel(3);
  m.store.beta.value[0] = 1e4;
  Sentence s{{1, 5, 2, 7, 3}};
  ParseTree tree = ParseTree::rightBranching(5);
  Tensor hard = encodeSentence(m, s, &tree, SenseMode::Hard, false);
  Tensor soft = encodeSentence(m, s, &tree, SenseMode::Soft, false);
  for (std::size_t i = 0; i < hard.size(); ++i) CHECK(std::abs(hard[i] - soft[i]) < 1e-6);
}

TEST_CASE("pooling adds the mean input vector") {
  Model m = smallModel(2);
  Sentence s{{1, 5, 2}};
  ParseTree tree = ParseTree::rightBranching(3);
  for (SenseMode mode : {SenseMode::Ambiguous, SenseMode::Prior, SenseMode::Hard, SenseMode::Soft}) {
    Tape tape;
    SentenceInputs in = buildInputs(tape, m, s, mode);
    std::vector<Tensor> vs;
    for (Var v : in.vectors) vs.push_back(tape.value(v));
    Tensor pooled = averagePool(vs);
    Tensor with = encodeSentence(m, s, &tree, mode, true);
    Tensor without = encodeSentence(m, s, &tree, mode, false);
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      CHECK(with[i] - without[i] == doctest::Approx(pooled[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("both branches accumulate into one storage") {
  Model m = smallModel(2);
  Sentence s1{{1, 5, 2}}, s2{{5, 3, 1, 4}};
  auto run = [&](bool first, bool second) {
    for (ParamSlot* p : m.allSlots()) p->zeroGrad();
    Tape tape;
    std::vector<Var> terms;
    if (first) terms.push_back(tape.sum(encodeSentence(tape, m, s1, nullptr, SenseMode::Soft, true)));
    if (second) terms.push_back(tape.sum(encodeSentence(tape, m, s2, nullptr, SenseMode::Soft, true)));
    GradBuffer g;
    tape.backward(tape.addN(terms), g);
    g.flushInto();
    std::vector<Tensor> grads;
    for (ParamSlot* p : m.allSlots()) grads.push_back(p->grad);
    return grads;
  };
  auto both = run(true, true), a = run(true, false), b = run(false, true);
  for (std::size_t k = 0; k < both.size(); ++k) {
    for (std::size_t i = 0; i < both[k].size(); ++i) {
      CHECK(both[k][i] == doctest::Approx(a[k][i] + b[k][i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("recnn without a tree falls back to right branching") {
  Model m = smallModel(1);
  Sentence s{{1, 5, 2}};
  ParseTree tree = ParseTree::rightBranching(3);
  CHECK(encodeSentence(m, s, nullptr, SenseMode::Ambiguous, false) ==
        encodeSentence(m, s, &tree, SenseMode::Ambiguous, false));
}

TEST_CASE("prediction rules") {
  Model m = smallModel(2);
  ParaphrasePair same{words("w1 w2 w3"), words("w1 w2 w3"), std::nullopt, std::nullopt, 1};
  m.heads.cost = CostKind::Cosine;
  Prediction p = predictParaphrase(m, same, false);
  CHECK(p.probability == doctest::Approx(0.731).epsilon(1e-3));
  CHECK(p.label == 1);
  CHECK(ensembleProbability(0.9, 0.5) == doctest::Approx(0.7));
  CHECK(ensembleProbability(0.37, 0.37) == doctest::Approx(0.37));
  CHECK(testing::errorKind([&] { predictParaphrase(m, same, true); }) == "ConfigError");

  m.heads.cost = CostKind::L2;
  m.heads.l2Margin = 2.0;
  m.heads.l2Calibration = 3.0;
  CHECK(predictParaphrase(m, same, false).probability == doctest::Approx(sig(3.0)));
}

TEST_CASE("prediction is symmetric") {
  Model m = smallModel(3);
  m.heads.c1 = LogisticClassifier{{0.3, 1.2, -0.4, 0.7, 0.2, 2.0}, -0.5};
  ParaphrasePair p{words("w1 w4 9 w2"), words("w3 w2 w1 7 w8"), std::nullopt, std::nullopt, 0};
  ParaphrasePair q{p.tokens2, p.tokens1, std::nullopt, std::nullopt, 0};
  for (CostKind cost : {CostKind::Cosine, CostKind::L2}) {
    for (SenseMode mode : {SenseMode::Ambiguous, SenseMode::Prior, SenseMode::Hard, SenseMode::Soft}) {
      m.heads.cost = cost;
      m.heads.mode = mode;
      m.heads.pooling = mode == SenseMode::Soft;
      CHECK(predictParaphrase(m, p, true).probability ==
            doctest::Approx(predictParaphrase(m, q, true).probability).epsilon(1e-12));
    }
  }
}

namespace {

std::vector<ParaphrasePair> toyPairs() {
  std::vector<ParaphrasePair> out;
  Rng rng(5);
  for (int i = 0; i < 40; ++i) {
    std::vector<std::string> a, b;
    for (int k = 0; k < 4; ++k) a.push_back("w" + std::to_string(1 + uniformIndex(rng, 9)));
    const int label = i % 2;
    if (label) {
      b = a;
    } else {
      for (int k = 0; k < 4; ++k) b.push_back("w" + std::to_string(1 + uniformIndex(rng, 9)));
    }
    out.push_back({a, b, std::nullopt, std::nullopt, label});
  }
  return out;
}

}  // namespace

TEST_CASE("zero epochs leave the model unchanged") {
  Model m = smallModel(2);
  ParaphraseTrainConfig cfg;
  cfg.epochs = 0;
  Model copy = m;
  auto r = trainParaphrase(m, toyPairs(), cfg);
  CHECK(testing::sameParameters(r.model, copy));
}

TEST_CASE("paraphrase training runs and is deterministic") {
  ParaphraseTrainConfig cfg;
  cfg.epochs = 3;
  cfg.batchSize = 4;
  cfg.validationFraction = 0.25;
  for (CostKind cost : {CostKind::Cosine, CostKind::L2}) {
    cfg.cost = cost;
    cfg.margins = {0.5, 1.0};
    auto a = trainParaphrase(smallModel(2), toyPairs(), cfg);
    cfg.threads = 2;
    auto b = trainParaphrase(smallModel(2), toyPairs(), cfg);
    cfg.threads = 1;
    CHECK(testing::sameParameters(a.model, b.model));
    CHECK(a.model.heads.trained);
    CHECK(a.model.heads.c1.has_value());
    CHECK(a.model.heads.cost == cost);
    CHECK(a.validationAccuracy >= 0.0);
    CHECK(a.validationAccuracy <= 1.0);
  }
  cfg.validationFraction = 1.0;
  CHECK_THROWS_AS(trainParaphrase(smallModel(2), toyPairs(), cfg), UsageError);
  cfg.validationFraction = 0.1;
  CHECK(testing::errorKind([&] { trainParaphrase(smallModel(2), {}, cfg); }) == "EmptyDataset");
}

TEST_CASE("reading paraphrase pairs") {
  const auto path = testing::writeFile("pairs.tsv", "1\ta b c\tc b a\n0\ta\tb d\n");
  auto pairs = readPairs(path);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].label == 1);
  CHECK(pairs[1].tokens2 == words("b d"));

  const auto t1 = testing::writeFile("t1.txt", "((a b) c)\n(a)\n");
  const auto t2 = testing::writeFile("t2.txt", "(c (b a))\n(b d)\n");
  auto withTrees = readPairs(path, t1, t2);
  CHECK(withTrees[0].tree1 == loadTree("((a b) c)").tree);

  const auto badTrees = testing::writeFile("t3.txt", "(c (b x))\n(b d)\n");
  CHECK(testing::errorKind([&] { readPairs(path, t1, badTrees); }) == "ParseError");
  const auto badLabel = testing::writeFile("bad.tsv", "2\ta\tb\n");
  CHECK(testing::errorKind([&] { readPairs(badLabel); }) == "FormatError");
  const auto badFields = testing::writeFile("bad2.tsv", "1\ta b\n");
  CHECK(testing::errorKind([&] { readPairs(badFields); }) == "FormatError");
  CHECK(testing::errorKind([] { readPairs("/nonexistent.tsv"); }) == "IoError");
}
