#include "sams/objective.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <thread>

namespace sams {

void HingeConfig::validate() const {
  if (!(margin > 0.0)) throw UsageError("ConfigError", "margin must be positive");
  if (!(shuffleWeight >= 0.0)) throw UsageError("ConfigError", "shuffle weight must be >= 0");
}

void GenericTrainConfig::validate() const {
  if (model.dim == 0 || model.senses == 0 || model.hidden == 0 || batchSize == 0 ||
      minCount == 0 || threads == 0) {
    throw UsageError("ConfigError", "dims, senses, hidden, batch, min-count and threads must be positive");
  }
  if (model.encoder == EncoderKind::Additive) {
    throw UsageError("ConfigError", "generic training needs a recnn or rnn encoder");
  }
  adadelta.validate();
  hinge.validate();
}

double scoreNode(const Tensor& v, const PlausibilityScorer& scorer) {
  if (v.size() != scorer.W1.value.cols()) throw dimensionMismatch("scoreNode");
  const Tensor hidden = tanhApply(matvec(scorer.W1.value, v) + scorer.b1.value);
  return dot(scorer.u.value.span(), hidden.span()) + scorer.b2.value[0];
}

Var scoreNode(Tape& tape, Var v, PlausibilityScorer& scorer) {
  if (tape.value(v).size() != scorer.W1.value.cols()) throw dimensionMismatch("scoreNode");
  Var hidden = tape.tanh(tape.add(tape.matvec(tape.param(scorer.W1), v), tape.param(scorer.b1)));
  return tape.add(tape.dot(tape.param(scorer.u), hidden), tape.param(scorer.b2));
}

double hingePair(double posScore, double negScore, double margin) {
  return std::max(0.0, margin - posScore + negScore);
}

Var plausibility(Tape& tape, Model& model, const EncodedVars& enc, NodeAggregation agg) {
  std::vector<Var> scores;
  if (enc.nodes.empty()) {
    scores.push_back(scoreNode(tape, enc.root, model.scorer));
  } else {
    for (Var n : enc.nodes) scores.push_back(scoreNode(tape, n, model.scorer));
  }
  return agg == NodeAggregation::Sum ? tape.addN(scores) : tape.mean(scores);
}

Negatives drawNegatives(const Sentence& s, const HingeConfig& cfg, const Corrupter& corrupter,
                        Rng& rng) {
  Negatives out;
  for (std::size_t k = 0; k < cfg.kSub; ++k) out.substituted.push_back(corrupter.substitute(s, rng).sentence);
  if (s.size() >= 2) {
    for (std::size_t k = 0; k < cfg.kShuf; ++k) {
      auto shuffled = corrupter.shuffle(s, rng);
      if (!shuffled) break;
      out.shuffled.push_back(std::move(*shuffled));
    }
  }
  return out;
}

namespace {

const ParseTree* treeOf(const TrainingExample& ex) { return ex.tree ? &*ex.tree : nullptr; }

Var scoreSentence(Tape& tape, Model& model, const Sentence& s, const ParseTree* tree,
                  NodeAggregation agg, SentenceInputs* inputsOut = nullptr) {
  SentenceInputs inputs = buildInputs(tape, model, s, SenseMode::Prior, false);
  EncodedVars enc = encodeInputs(tape, model, inputs.vectors, tree);
  Var f = plausibility(tape, model, enc, agg);
  if (inputsOut) *inputsOut = std::move(inputs);
  return f;
}

}  // namespace

SentenceLossResult sentenceLoss(Tape& tape, Model& model, const TrainingExample& ex,
                                const Negatives& negs, const HingeConfig& cfg) {
  SentenceLossResult out;
  const ParseTree* tree = treeOf(ex);
  SentenceInputs inputs;
  Var f = scoreSentence(tape, model, ex.sentence, tree, cfg.nodeAgg, &inputs);
  out.posScore = tape.scalarValue(f);
  for (std::size_t pos = 0; pos < ex.sentence.size(); ++pos) {
    out.updates.push_back({ex.sentence.tokens[pos], inputs.senses[pos], inputs.contexts[pos]});
  }

  std::vector<Var> terms;
  Var margin = tape.scalar(cfg.margin);
  auto addTerm = [&](const Sentence& neg, double weight) {
    Var fn = scoreSentence(tape, model, neg, tree, cfg.nodeAgg);
    out.negScores.push_back(tape.scalarValue(fn));
    Var h = tape.relu(tape.add(margin, tape.sub(fn, f)));
    terms.push_back(weight == 1.0 ? h : tape.scale(h, weight));
  };
  for (const Sentence& s : negs.substituted) addTerm(s, 1.0);
  for (const Sentence& s : negs.shuffled) addTerm(s, cfg.shuffleWeight);
  out.loss = terms.empty() ? tape.scalar(0.0) : tape.addN(terms);
  return out;
}

double sentenceLoss(Model& model, const TrainingExample& ex, const HingeConfig& cfg,
                    const Corrupter& corrupter, Rng& rng) {
  Tape tape;
  Negatives negs = drawNegatives(ex.sentence, cfg, corrupter, rng);
  return tape.scalarValue(sentenceLoss(tape, model, ex, negs, cfg).loss);
}

RankingStats rankingAccuracy(Model& model, const std::vector<TrainingExample>& examples,
                             const HingeConfig& cfg, std::uint64_t seed) {
  Corrupter corrupter(model.vocab, cfg.sampling);
  std::size_t subWins = 0, subTotal = 0, shufWins = 0, shufTotal = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    Rng rng(deriveSeed(seed, {7, i}));
    Tape tape;
    Negatives negs = drawNegatives(examples[i].sentence, cfg, corrupter, rng);
    auto res = sentenceLoss(tape, model, examples[i], negs, cfg);
    for (std::size_t k = 0; k < res.negScores.size(); ++k) {
      const bool win = res.posScore > res.negScores[k];
      if (k < negs.substituted.size()) {
        subWins += win;
        ++subTotal;
      } else {
        shufWins += win;
        ++shufTotal;
      }
    }
  }
  RankingStats st;
  st.pairs = subTotal + shufTotal;
  st.subFraction = subTotal ? static_cast<double>(subWins) / static_cast<double>(subTotal) : 0.0;
  st.shufFraction = shufTotal ? static_cast<double>(shufWins) / static_cast<double>(shufTotal) : 0.0;
  st.overall = st.pairs ? static_cast<double>(subWins + shufWins) / static_cast<double>(st.pairs) : 0.0;
  return st;
}

void applyUpdates(Model& model, const TouchedRows& touched, const AdaDeltaConfig& cfg,
                  std::span<ParamSlot* const> slots) {
  for (ParamSlot* slot : slots) {
    if (model.isTable(slot)) {
      auto it = touched.find(slot);
      if (it == touched.end()) continue;
      std::vector<std::size_t> rows(it->second.begin(), it->second.end());
      adadeltaStepRows(*slot, rows, cfg);
    } else {
      adadeltaStep(*slot, cfg);
    }
  }
}

namespace {

struct ExampleWork {
  double loss = 0.0;
  std::size_t satisfied = 0;
  std::size_t pairs = 0;
  GradBuffer grads;
  std::vector<CentroidUpdate> updates;
};

template <typename Fn>
void parallelFor(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t workers = std::min(threads, n);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

Model trainGeneric(const Vocabulary& vocab, const std::vector<TrainingExample>& examples,
                   const GenericTrainConfig& cfg, std::ostream* log) {
  cfg.validate();
  Model model = Model::initialize(vocab, cfg.model, cfg.seed);
  model.contextWindow = cfg.contextWindow;
  if (cfg.mainInit) {
    if (!cfg.mainInit->sameShape(model.store.main.value)) {
      throw UsageError("ConfigError", "initial main vectors do not match the vocabulary/dimension");
    }
    model.store.main.value = *cfg.mainInit;
  }
  for (const auto& ex : examples) {
    if (model.encoder == EncoderKind::RecNN && !ex.tree) {
      throw UsageError("ConfigError", "the recnn encoder needs a tree for every sentence");
    }
  }

  const Corrupter corrupter(model.vocab, cfg.hinge.sampling);
  std::vector<ParamSlot*> slots{&model.store.senseTable()};
  for (ParamSlot* s : model.encoderSlots()) slots.push_back(s);
  for (ParamSlot* s : model.scorer.slots()) slots.push_back(s);

  std::vector<std::size_t> order(examples.size());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng orderRng(deriveSeed(cfg.seed, {1, epoch}));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[uniformIndex(orderRng, i)]);
    }

    double epochLoss = 0.0;
    std::size_t satisfied = 0, pairs = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batchSize) {
      const std::size_t n = std::min(cfg.batchSize, order.size() - start);
      std::vector<ExampleWork> work(n);
      parallelFor(n, cfg.threads, [&](std::size_t j) {
        const std::size_t idx = order[start + j];
        Rng rng(deriveSeed(cfg.seed, {2, epoch, idx}));
        Negatives negs = drawNegatives(examples[idx].sentence, cfg.hinge, corrupter, rng);
        Tape tape;
        auto res = sentenceLoss(tape, model, examples[idx], negs, cfg.hinge);
        ExampleWork& w = work[j];
        w.loss = tape.scalarValue(res.loss);
        for (double neg : res.negScores) {
          w.satisfied += (res.posScore - neg >= cfg.hinge.margin);
          ++w.pairs;
        }
        tape.backward(res.loss, w.grads);
        w.updates = std::move(res.updates);
      });

      TouchedRows touched;
      for (ExampleWork& w : work) {
        w.grads.flushInto(&touched);
        epochLoss += w.loss;
        satisfied += w.satisfied;
        pairs += w.pairs;
      }
      applyUpdates(model, touched, cfg.adadelta, slots);
      for (const ExampleWork& w : work) {
        for (const CentroidUpdate& u : w.updates) model.store.updateCentroid(u.word, u.sense, u.context);
      }
    }
    if (log) {
      const double meanLoss = examples.empty() ? 0.0 : epochLoss / static_cast<double>(examples.size());
      const double frac = pairs ? static_cast<double>(satisfied) / static_cast<double>(pairs) : 0.0;
      *log << "epoch " << epoch + 1 << " loss " << meanLoss << " margin-satisfied " << frac << '\n';
    }
  }
  for (ParamSlot* s : model.allSlots()) s->resetState();
  return model;
}

std::vector<TrainingExample> loadExamples(const std::string& corpusPath,
                                          const std::optional<std::string>& treePath,
                                          const Vocabulary& vocab, std::size_t maxLength) {
  std::vector<TrainingExample> out;
  if (!treePath) {
    for (auto& s : readCorpus(corpusPath, vocab, maxLength)) out.push_back({std::move(s), std::nullopt});
    return out;
  }
  std::ifstream in(corpusPath);
  if (!in) throw DataError("IoError", "cannot read " + corpusPath);
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = splitTokens(line);
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  auto trees = readTrees(*treePath);
  if (trees.size() != lines.size()) {
    throw DataError("ParseError", *treePath + " has " + std::to_string(trees.size()) +
                                      " trees for " + std::to_string(lines.size()) + " sentences");
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    checkTreeMatches(trees[i].tree, lines[i].size());
    if (trees[i].tokens != lines[i]) {
      throw DataError("ParseError", "tree " + std::to_string(i + 1) + " does not match its sentence");
    }
    // Trees cannot be truncated, so over-long parsed sentences are skipped.
    if (maxLength > 0 && lines[i].size() > maxLength) continue;
    out.push_back({encodeSentence(vocab, lines[i]), std::move(trees[i].tree)});
  }
  return out;
}

Model trainGeneric(const std::string& corpusPath, const std::optional<std::string>& treePath,
                   const GenericTrainConfig& cfg, std::ostream* log) {
  cfg.validate();
  if (cfg.model.encoder == EncoderKind::RecNN && !treePath) {
    throw UsageError("ConfigError", "--trees is required for the recnn encoder");
  }
  Vocabulary vocab = buildVocab(corpusPath, cfg.minCount);
  auto examples = loadExamples(corpusPath, treePath, vocab, cfg.maxLength);
  return trainGeneric(vocab, examples, cfg, log);
}

}  // namespace sams
