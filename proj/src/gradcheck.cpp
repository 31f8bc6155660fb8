#include "sams/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "sams/objective.hpp"
#include "sams/siamese.hpp"

namespace sams {

double GradCheckReport::maxRelError() const {
  double m = 0.0;
  for (const auto& c : cases) m = std::max(m, c.maxRelError);
  return m;
}

namespace {

constexpr double kStep = 1e-5;

Vocabulary toyVocab() {
  std::unordered_map<std::string, std::uint64_t> counts;
  const char* words[] = {"the", "cat", "sat", "on", "a", "mat", "dog", "ran", "fast", "bank"};
  for (std::size_t i = 0; i < std::size(words); ++i) counts[words[i]] = 20 - i;
  return Vocabulary::fromCounts(counts, 1);
}

Model toyModel(EncoderKind enc, std::size_t dim, std::size_t hidden, std::uint64_t seed) {
  ModelConfig cfg;
  cfg.dim = dim;
  cfg.senses = 2;
  cfg.hidden = hidden;
  cfg.encoder = enc;
  Model m = Model::initialize(toyVocab(), cfg, seed);
  // Scale parameters up from the tiny initial values so every term of the
  // loss carries a gradient well above round-off.
  Rng rng(deriveSeed(seed, {0x6c}));
  for (ParamSlot* s : m.allSlots()) {
    for (double& v : s->value.data()) v = uniform(rng, -0.8, 0.8);
  }
  m.store.beta.value[0] = 1.5;
  return m;
}

Sentence randomSentence(const Model& m, std::size_t len, Rng& rng) {
  Sentence s;
  for (std::size_t i = 0; i < len; ++i) {
    s.tokens.push_back(static_cast<WordId>(1 + uniformIndex(rng, m.vocab.size() - 1)));
  }
  return s;
}

std::vector<ParamSlot*> zeroed(std::vector<ParamSlot*> slots) {
  for (ParamSlot* s : slots) s->grad = Tensor(s->value.shape());
  return slots;
}

// Parameters whose gradient is identically zero under the loss (a bias shared
// equally by both sides of every hinge) are checked absolutely instead.
double checkSlots(const std::function<double()>& loss, std::vector<ParamSlot*> slots,
                  std::vector<ParamSlot*> zeroGradSlots, std::size_t& count) {
  double worst = finiteDiffCheck(loss, slots, kStep);
  for (ParamSlot* s : slots) count += s->value.size();
  for (ParamSlot* s : zeroGradSlots) {
    for (std::size_t i = 0; i < s->value.size(); ++i) {
      const double keep = s->value[i];
      s->value[i] = keep + kStep;
      const double up = loss();
      s->value[i] = keep - kStep;
      const double down = loss();
      s->value[i] = keep;
      const double numeric = (up - down) / (2 * kStep);
      if (s->grad[i] != 0.0 || std::abs(numeric) > 1e-8) worst = std::max(worst, 1.0);
      ++count;
    }
  }
  return worst;
}

GradCheckCase hingeCase(const std::string& name, EncoderKind enc, std::size_t len, std::size_t dim,
                        std::size_t hidden, std::uint64_t seed) {
  Model m = toyModel(enc, dim, hidden, seed);
  Rng rng(deriveSeed(seed, {0x71, static_cast<std::uint64_t>(enc)}));
  TrainingExample ex{randomSentence(m, len, rng), std::nullopt};
  if (enc == EncoderKind::RecNN) ex.tree = loadTree("((w0 w1) (w2 w3))").tree;
  HingeConfig cfg;
  cfg.kSub = 2;
  cfg.kShuf = 1;
  const Corrupter corrupter(m.vocab, SubstituteSampling::Uniform);
  const Negatives negs = drawNegatives(ex.sentence, cfg, corrupter, rng);

  // Pick a margin that keeps every hinge active by at least 0.25.
  {
    Tape tape;
    auto res = sentenceLoss(tape, m, ex, negs, cfg);
    double need = 0.0;
    for (double n : res.negScores) need = std::max(need, res.posScore - n);
    cfg.margin = need + 0.25;
  }

  std::vector<ParamSlot*> slots{&m.store.senseVecs};
  for (ParamSlot* s : m.encoderSlots()) slots.push_back(s);
  slots.push_back(&m.scorer.W1);
  slots.push_back(&m.scorer.b1);
  slots.push_back(&m.scorer.u);
  std::vector<ParamSlot*> all = slots;
  all.push_back(&m.scorer.b2);
  zeroed(all);

  Tape tape;
  auto res = sentenceLoss(tape, m, ex, negs, cfg);
  GradBuffer buf;
  tape.backward(res.loss, buf);
  buf.flushInto();

  GradCheckCase c{name, 0.0, 0, 1.0};
  c.kinkDistance = 1e300;
  for (double n : res.negScores) c.kinkDistance = std::min(c.kinkDistance, cfg.margin - res.posScore + n);
  auto loss = [&] {
    Tape t;
    return t.scalarValue(sentenceLoss(t, m, ex, negs, cfg).loss);
  };
  c.maxRelError = checkSlots(loss, slots, {&m.scorer.b2}, c.parameters);
  return c;
}

GradCheckCase cosineCase(std::size_t dim, std::size_t hidden, std::uint64_t seed) {
  Model m = toyModel(EncoderKind::RecNN, dim, hidden, seed);
  Rng rng(deriveSeed(seed, {0x72}));
  const Sentence s1 = randomSentence(m, 4, rng);
  const Sentence s2 = randomSentence(m, 3, rng);
  const ParseTree t1 = loadTree("((a b) (c d))").tree;
  const ParseTree t2 = loadTree("(a (b c))").tree;
  const int label = 1;

  std::vector<ParamSlot*> slots{&m.store.senseVecs, &m.store.centroids, &m.store.beta,
                                &m.comp.W,          &m.comp.b,          &m.heads.cosine};
  zeroed(slots);
  auto build = [&](Tape& tape) {
    Var v1 = encodeSentence(tape, m, s1, &t1, SenseMode::Soft, true);
    Var v2 = encodeSentence(tape, m, s2, &t2, SenseMode::Soft, true);
    return cosineCost(tape, v1, v2, label, tape.param(m.heads.cosine));
  };
  Tape tape;
  Var cost = build(tape);
  GradBuffer buf;
  tape.backward(cost, buf);
  buf.flushInto();
  auto loss = [&] {
    Tape t;
    return t.scalarValue(build(t));
  };
  GradCheckCase c{"cosine", 0.0, 0, 1.0};
  c.maxRelError = checkSlots(loss, slots, {}, c.parameters);
  return c;
}

}  // namespace

GradCheckReport runGradCheck(std::size_t dim, std::size_t hidden, std::uint64_t seed) {
  if (dim == 0 || hidden == 0) throw UsageError("ConfigError", "dim and hidden must be positive");
  GradCheckReport r;
  r.cases.push_back(hingeCase("recnn", EncoderKind::RecNN, 4, dim, hidden, seed));
  r.cases.push_back(hingeCase("lstm", EncoderKind::Rnn, 6, dim, hidden, seed));
  r.cases.push_back(cosineCase(dim, hidden, seed));
  return r;
}

}  // namespace sams
