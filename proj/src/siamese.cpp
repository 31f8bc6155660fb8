#include "sams/siamese.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>
#include <unordered_map>

#include "sams/objective.hpp"

namespace sams {

std::vector<ParaphrasePair> readPairs(const std::string& path,
                                      const std::optional<std::string>& trees1,
                                      const std::optional<std::string>& trees2) {
  std::ifstream in(path);
  if (!in) throw DataError("IoError", "cannot read " + path);
  std::vector<ParaphrasePair> out;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (splitTokens(line).empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw DataError("FormatError", path + ":" + std::to_string(lineNo) + ": expected 3 tab-separated fields");
    }
    const std::string label = line.substr(0, t1);
    ParaphrasePair p;
    if (label == "1") {
      p.label = 1;
    } else if (label != "0") {
      throw DataError("FormatError", path + ":" + std::to_string(lineNo) + ": label must be 0 or 1");
    }
    p.tokens1 = splitTokens(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
    p.tokens2 = splitTokens(std::string_view(line).substr(t2 + 1));
    if (p.tokens1.empty() || p.tokens2.empty()) {
      throw DataError("FormatError", path + ":" + std::to_string(lineNo) + ": empty sentence");
    }
    out.push_back(std::move(p));
  }
  auto attach = [&](const std::optional<std::string>& treePath, bool first) {
    if (!treePath) return;
    auto trees = readTrees(*treePath);
    if (trees.size() != out.size()) {
      throw DataError("ParseError", *treePath + " has " + std::to_string(trees.size()) +
                                        " trees for " + std::to_string(out.size()) + " pairs");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto& toks = first ? out[i].tokens1 : out[i].tokens2;
      if (trees[i].tokens != toks) {
        throw DataError("ParseError", *treePath + ": tree " + std::to_string(i + 1) +
                                          " does not match its sentence");
      }
      (first ? out[i].tree1 : out[i].tree2) = std::move(trees[i].tree);
    }
  };
  attach(trees1, true);
  attach(trees2, false);
  return out;
}

Vocabulary vocabFromPairs(const std::vector<ParaphrasePair>& pairs, std::uint64_t minCount) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& p : pairs) {
    for (const auto& t : p.tokens1) ++counts[t];
    for (const auto& t : p.tokens2) ++counts[t];
  }
  return Vocabulary::fromCounts(counts, minCount);
}

Var encodeSentence(Tape& tape, Model& model, const Sentence& s, const ParseTree* tree,
                   SenseMode mode, bool pooling) {
  SentenceInputs inputs = buildInputs(tape, model, s, mode);
  std::optional<ParseTree> fallback;
  if (model.encoder == EncoderKind::RecNN && tree == nullptr) {
    fallback = ParseTree::rightBranching(s.size());
    tree = &*fallback;
  }
  EncodedVars enc = encodeInputs(tape, model, inputs.vectors, tree);
  if (!pooling) return enc.root;
  return tape.add(enc.root, tape.mean(inputs.vectors));
}

Tensor encodeSentence(Model& model, const Sentence& s, const ParseTree* tree, SenseMode mode,
                      bool pooling) {
  Tape tape;
  return tape.value(encodeSentence(tape, model, s, tree, mode, pooling));
}

double l2ContrastiveCost(const Tensor& v1, const Tensor& v2, int y, double margin) {
  const Tensor diff = v1 - v2;
  const double dist = norm2(diff.span());
  if (y == 1) return 0.5 * dist * dist;
  const double gap = std::max(0.0, margin - dist);
  return 0.5 * gap * gap;
}

Var l2ContrastiveCost(Tape& tape, Var v1, Var v2, int y, double margin) {
  Var diff = tape.sub(v1, v2);
  Var sq = tape.sum(tape.square(diff));
  if (y == 1) return tape.scale(sq, 0.5);
  if (tape.scalarValue(sq) == 0.0) return tape.scalar(0.5 * margin * margin);
  Var gap = tape.relu(tape.sub(tape.scalar(margin), tape.sqrt(sq)));
  return tape.scale(tape.square(gap), 0.5);
}

double cosineCost(const Tensor& v1, const Tensor& v2, int y, double w, double b) {
  const double d = cosine(v1, v2);
  const double r = static_cast<double>(y) - sigmoid(w * d + b);
  return 0.5 * r * r;
}

Var cosineCost(Tape& tape, Var v1, Var v2, int y, Var head) {
  Var d = tape.cosine(v1, v2);
  Var z = tape.add(tape.scaleBy(tape.element(head, 0), d), tape.element(head, 1));
  Var r = tape.sub(tape.scalar(static_cast<double>(y)), tape.sigmoid(z));
  return tape.scale(tape.square(r), 0.5);
}

bool isNumericToken(std::string_view token) {
  return std::any_of(token.begin(), token.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

SurfaceFeatures extractSurfaceFeatures(std::span<const std::string> s1,
                                       std::span<const std::string> s2) {
  SurfaceFeatures f;
  f.lengthDiff = std::abs(static_cast<double>(s1.size()) - static_cast<double>(s2.size()));
  const std::set<std::string> a(s1.begin(), s1.end());
  const std::set<std::string> b(s2.begin(), s2.end());
  std::size_t inter = 0;
  for (const auto& t : a) inter += b.count(t);
  const std::size_t uni = a.size() + b.size() - inter;
  f.unigramOverlap = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  std::multiset<std::string> n1, n2;
  for (const auto& t : s1) {
    if (isNumericToken(t)) n1.insert(t);
  }
  for (const auto& t : s2) {
    if (isNumericToken(t)) n2.insert(t);
  }
  f.hasNumbers1 = !n1.empty();
  f.hasNumbers2 = !n2.empty();
  f.numbersEqual = n1 == n2;
  return f;
}

std::vector<double> c1Features(const SurfaceFeatures& f, double similarity) {
  return {std::log1p(f.lengthDiff),
          f.unigramOverlap,
          (f.hasNumbers1 && f.hasNumbers2) ? 1.0 : 0.0,
          (f.hasNumbers1 != f.hasNumbers2) ? 1.0 : 0.0,
          f.numbersEqual ? 1.0 : 0.0,
          similarity};
}

LogisticClassifier trainLogistic(const std::vector<std::vector<double>>& xs,
                                 const std::vector<int>& ys, std::size_t iterations,
                                 double learningRate, double l2) {
  if (xs.empty() || xs.size() != ys.size()) throw UsageError("EmptyDataset", "logistic regression needs data");
  const std::size_t k = xs.front().size();
  LogisticClassifier clf{std::vector<double>(k, 0.0), 0.0};
  const double n = static_cast<double>(xs.size());
  std::vector<double> gw(k);
  for (std::size_t it = 0; it < iterations; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = clf.probability(xs[i]) - static_cast<double>(ys[i]);
      for (std::size_t j = 0; j < k; ++j) gw[j] += r * xs[i][j];
      gb += r;
    }
    for (std::size_t j = 0; j < k; ++j) clf.weights[j] -= learningRate * (gw[j] / n + l2 * clf.weights[j]);
    clf.bias -= learningRate * gb / n;
  }
  return clf;
}

double ensembleProbability(double base, double c1) { return 0.5 * (base + c1); }

void ParaphraseTrainConfig::validate() const {
  if (batchSize == 0 || threads == 0) throw UsageError("ConfigError", "batch and threads must be positive");
  if (!(validationFraction >= 0.0 && validationFraction < 1.0)) {
    throw UsageError("ConfigError", "validation fraction must be in [0, 1)");
  }
  if (margins.empty()) throw UsageError("ConfigError", "at least one margin is required");
  for (double m : margins) {
    if (!(m > 0.0)) throw UsageError("ConfigError", "margins must be positive");
  }
  adadelta.validate();
}

namespace {

struct EncodedPair {
  Sentence s1, s2;
  const ParseTree* t1 = nullptr;
  const ParseTree* t2 = nullptr;
  int label = 0;
};

EncodedPair encodePair(const Model& model, const ParaphrasePair& p) {
  return {encodeSentence(model.vocab, p.tokens1), encodeSentence(model.vocab, p.tokens2),
          p.tree1 ? &*p.tree1 : nullptr, p.tree2 ? &*p.tree2 : nullptr, p.label};
}

std::pair<Tensor, Tensor> pairVectors(Model& model, const EncodedPair& p) {
  const auto& h = model.heads;
  return {encodeSentence(model, p.s1, p.t1, h.mode, h.pooling),
          encodeSentence(model, p.s2, p.t2, h.mode, h.pooling)};
}

double safeCos(const Tensor& a, const Tensor& b) {
  if (norm2(a.span()) == 0.0 || norm2(b.span()) == 0.0) return 0.0;
  return cosine(a, b);
}

double baseProbability(const Model& model, const Tensor& v1, const Tensor& v2) {
  const auto& h = model.heads;
  if (h.cost == CostKind::Cosine) {
    return sigmoid(h.cosine.value[0] * safeCos(v1, v2) + h.cosine.value[1]);
  }
  const double dist = norm2((v1 - v2).span());
  return sigmoid(h.l2Calibration * (h.l2Margin / 2.0 - dist));
}

double accuracyOn(Model& model, const std::vector<EncodedPair>& pairs) {
  if (pairs.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& p : pairs) {
    auto [v1, v2] = pairVectors(model, p);
    const int label = baseProbability(model, v1, v2) >= 0.5 ? 1 : 0;
    correct += label == p.label;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

// Fits a > 0 in sigmoid(a (m/2 - D)) by Newton steps on the log loss.
double fitCalibration(Model& model, const std::vector<EncodedPair>& pairs) {
  std::vector<double> xs;
  std::vector<int> ys;
  for (const auto& p : pairs) {
    auto [v1, v2] = pairVectors(model, p);
    xs.push_back(model.heads.l2Margin / 2.0 - norm2((v1 - v2).span()));
    ys.push_back(p.label);
  }
  double a = 1.0;
  for (int it = 0; it < 100; ++it) {
    double g = 0.0, hess = 1e-6;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double p = sigmoid(a * xs[i]);
      g += (p - ys[i]) * xs[i];
      hess += p * (1.0 - p) * xs[i] * xs[i];
    }
    const double next = std::clamp(a - g / hess, 1e-3, 1e4);
    if (std::abs(next - a) < 1e-10) break;
    a = next;
  }
  return a;
}

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

std::vector<ParamSlot*> taskSlots(Model& model, const ParaphraseTrainConfig& cfg) {
  std::vector<ParamSlot*> slots;
  if (cfg.updateEmbeddings) {
    slots.push_back(&model.store.main);
    if (model.senses() > 1) slots.push_back(&model.store.senseVecs);
    for (ParamSlot* s : model.encoderSlots()) slots.push_back(s);
  }
  if (model.senses() > 1 && (cfg.mode == SenseMode::Hard || cfg.mode == SenseMode::Soft)) {
    slots.push_back(&model.store.centroids);
    slots.push_back(&model.store.beta);
  }
  if (cfg.cost == CostKind::Cosine) slots.push_back(&model.heads.cosine);
  return slots;
}

struct RunResult {
  Model model;
  double accuracy = -1.0;
  std::size_t epoch = 0;
};

RunResult runOneMargin(Model model, const std::vector<EncodedPair>& train,
                       const std::vector<EncodedPair>& val, const ParaphraseTrainConfig& cfg,
                       double margin, std::ostream* log) {
  model.heads.cost = cfg.cost;
  model.heads.mode = cfg.mode;
  model.heads.pooling = cfg.pooling;
  model.heads.l2Margin = margin;
  model.heads.trained = true;
  for (ParamSlot* s : model.allSlots()) s->resetState();

  const auto& selectOn = val.empty() ? train : val;
  RunResult best{model, accuracyOn(model, selectOn), 0};
  std::vector<ParamSlot*> slots = taskSlots(model, cfg);
  std::vector<std::size_t> order(train.size());

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng orderRng(deriveSeed(cfg.seed, {11, epoch}));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniformIndex(orderRng, i)]);

    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batchSize) {
      const std::size_t n = std::min(cfg.batchSize, order.size() - start);
      std::vector<GradBuffer> grads(n);
      std::vector<double> losses(n);
      parallelFor(n, cfg.threads, [&](std::size_t j) {
        const EncodedPair& p = train[order[start + j]];
        Tape tape;
        // Both branches are built on one tape from the same parameter slots.
        Var v1 = encodeSentence(tape, model, p.s1, p.t1, cfg.mode, cfg.pooling);
        Var v2 = encodeSentence(tape, model, p.s2, p.t2, cfg.mode, cfg.pooling);
        Var cost;
        if (cfg.cost == CostKind::Cosine) {
          if (norm2(tape.value(v1).span()) == 0.0 || norm2(tape.value(v2).span()) == 0.0) return;
          cost = cosineCost(tape, v1, v2, p.label, tape.param(model.heads.cosine));
        } else {
          cost = l2ContrastiveCost(tape, v1, v2, p.label, margin);
        }
        losses[j] = tape.scalarValue(cost);
        tape.backward(cost, grads[j]);
      });
      TouchedRows touched;
      for (std::size_t j = 0; j < n; ++j) {
        grads[j].flushInto(&touched);
        total += losses[j];
      }
      applyUpdates(model, touched, cfg.adadelta, slots);
      model.store.beta.value[0] = std::max(model.store.beta.value[0], 1e-3);
    }
    if (cfg.cost == CostKind::L2) model.heads.l2Calibration = fitCalibration(model, selectOn);
    const double acc = accuracyOn(model, selectOn);
    if (log) {
      *log << "epoch " << epoch + 1 << " cost " << (train.empty() ? 0.0 : total / static_cast<double>(train.size()))
           << " validation-accuracy " << acc;
      if (cfg.cost == CostKind::L2) *log << " margin " << margin;
      *log << '\n';
    }
    if (acc > best.accuracy) best = RunResult{model, acc, epoch + 1};
  }
  return best;
}

}  // namespace

ParaphraseTrainResult trainParaphrase(Model model, const std::vector<ParaphrasePair>& pairs,
                                      const ParaphraseTrainConfig& cfg, std::ostream* log) {
  cfg.validate();
  if (pairs.empty()) throw DataError("EmptyDataset", "no paraphrase pairs to train on");
  if (cfg.epochs == 0) {
    return ParaphraseTrainResult{std::move(model), 0.0, 0};
  }

  std::vector<EncodedPair> encoded;
  for (const auto& p : pairs) encoded.push_back(encodePair(model, p));
  std::vector<std::size_t> idx(encoded.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng splitRng(deriveSeed(cfg.seed, {10}));
  for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[uniformIndex(splitRng, i)]);
  const auto nVal = static_cast<std::size_t>(cfg.validationFraction * static_cast<double>(idx.size()));
  std::vector<EncodedPair> train, val;
  std::vector<std::size_t> trainIdx;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i < nVal) {
      val.push_back(encoded[idx[i]]);
    } else {
      train.push_back(encoded[idx[i]]);
      trainIdx.push_back(idx[i]);
    }
  }

  const std::vector<double> margins =
      cfg.cost == CostKind::L2 ? cfg.margins : std::vector<double>{cfg.margins.front()};
  std::optional<RunResult> best;
  for (double m : margins) {
    RunResult r = runOneMargin(model, train, val, cfg, m, log);
    if (!best || r.accuracy > best->accuracy) best = std::move(r);
  }
  Model out = std::move(best->model);
  if (out.heads.cost == CostKind::L2) out.heads.l2Calibration = fitCalibration(out, val.empty() ? train : val);

  out.heads.c1.reset();
  if (cfg.trainC1) {
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    for (std::size_t i : trainIdx) {
      const auto& p = pairs[i];
      auto [v1, v2] = pairVectors(out, encoded[i]);
      xs.push_back(c1Features(extractSurfaceFeatures(p.tokens1, p.tokens2), safeCos(v1, v2)));
      ys.push_back(p.label);
    }
    out.heads.c1 = trainLogistic(xs, ys);
  }
  for (ParamSlot* s : out.allSlots()) s->resetState();
  return ParaphraseTrainResult{std::move(out), best->accuracy, best->epoch};
}

double pairSimilarity(Model& model, const ParaphrasePair& pair) {
  EncodedPair p = encodePair(model, pair);
  auto [v1, v2] = pairVectors(model, p);
  return safeCos(v1, v2);
}

Prediction predictParaphrase(Model& model, const ParaphrasePair& pair, bool ensemble) {
  EncodedPair p = encodePair(model, pair);
  auto [v1, v2] = pairVectors(model, p);
  double prob = baseProbability(model, v1, v2);
  if (ensemble) {
    if (!model.heads.c1) throw UsageError("ConfigError", "ensembling needs a trained C1 classifier");
    const double c1 = model.heads.c1->probability(
        c1Features(extractSurfaceFeatures(pair.tokens1, pair.tokens2), safeCos(v1, v2)));
    prob = ensembleProbability(prob, c1);
  }
  return Prediction{prob, prob >= 0.5 ? 1 : 0};
}

}  // namespace sams
