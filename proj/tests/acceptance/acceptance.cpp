// Acceptance run: one PASS/FAIL line per criterion.
//
//   sams_acceptance            all criteria
//   sams_acceptance 2 3 9      a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "sams/checkpoint.hpp"
#include "sams/eval.hpp"
#include "sams/gradcheck.hpp"
#include "sams/objective.hpp"
#include "sams/siamese.hpp"
#include "synthetic.hpp"

using namespace sams;

namespace {

// Tolerances and thresholds.
constexpr double kGradTol = 1e-4;
constexpr double kGradSeconds = 10.0;
constexpr int kFormulaCases = 1000;
constexpr double kFormulaRelTol = 1e-12;
constexpr int kSpearmanLists = 200;
constexpr double kSpearmanTol = 1e-12;
constexpr double kF1Tol = 0.001;
constexpr double kPurity = 0.90;
constexpr double kSenseSeconds = 300.0;
constexpr double kRanking = 0.90;
constexpr double kParaphraseFloor = 0.85;
constexpr int kSeeds = 5;
constexpr int kSeedsNeeded = 3;
constexpr double kUnrollTol = 1e-12;
constexpr int kPoolCases = 100;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double relErr(double got, double want) {
  if (got == want) return 0.0;
  return std::abs(got - want) / std::max(std::abs(got), std::abs(want));
}

// 1 ---------------------------------------------------------------------------

Outcome gradientIntegrity() {
  const auto t0 = Clock::now();
  GradCheckReport r = runGradCheck(8, 6, 1);
  const double secs = seconds(t0);
  std::ostringstream d;
  bool ok = secs < kGradSeconds;
  for (const auto& c : r.cases) {
    d << c.name << "=" << fmt("%.2e", c.maxRelError) << " ";
    ok = ok && c.maxRelError < kGradTol && c.kinkDistance > 0.0;
  }
  d << "time=" << fmt("%.2fs", secs);
  return {ok && r.cases.size() == 3, d.str()};
}

// 2 ---------------------------------------------------------------------------

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Outcome formulaOracles() {
  Rng rng(2024);
  double worst[4] = {0, 0, 0, 0};
  for (int t = 0; t < kFormulaCases; ++t) {
    const double pos = uniform(rng, -3, 3), neg = uniform(rng, -3, 3), m = uniform(rng, 0.05, 3);
    worst[0] = std::max(worst[0], relErr(hingePair(pos, neg, m), std::max(0.0, m - pos + neg)));

    const std::size_t d = 1 + uniformIndex(rng, 8);
    Tensor a({d}), b({d});
    for (std::size_t i = 0; i < d; ++i) {
      a[i] = uniform(rng, -2, 2);
      b[i] = uniform(rng, -2, 2);
    }
    double sq = 0, ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < d; ++i) {
      sq += (a[i] - b[i]) * (a[i] - b[i]);
      ab += a[i] * b[i];
      aa += a[i] * a[i];
      bb += b[i] * b[i];
    }
    const int y = static_cast<int>(uniformIndex(rng, 2));
    const double margin = uniform(rng, 0.1, 5);
    const double gap = std::max(0.0, margin - std::sqrt(sq));
    const double l2 = y == 1 ? 0.5 * sq : 0.5 * gap * gap;
    worst[1] = std::max(worst[1], relErr(l2ContrastiveCost(a, b, y, margin), l2));

    const double w = uniform(rng, -5, 5), bias = uniform(rng, -2, 2);
    const double e = y - sig(w * ab / std::sqrt(aa * bb) + bias);
    worst[2] = std::max(worst[2], relErr(cosineCost(a, b, y, w, bias), 0.5 * e * e));

    AdaDeltaConfig cfg;
    cfg.decayRho = uniform(rng, 0.5, 0.999);
    cfg.epsilon = std::pow(10.0, uniform(rng, -8, -2));
    cfg.scale = uniform(rng, 0.1, 2);
    ParamSlot slot("p", Tensor({d}));
    std::vector<double> eg(d), ex(d), x(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = slot.value[i] = uniform(rng, -1, 1);
      eg[i] = slot.accumGradSq[i] = uniform(rng, 0, 1);
      ex[i] = slot.accumUpdateSq[i] = uniform(rng, 0, 1);
      slot.grad[i] = uniform(rng, -3, 3);
    }
    std::vector<double> g(slot.grad.data());
    adadeltaStep(slot, cfg);
    for (std::size_t i = 0; i < d; ++i) {
      const double egNew = cfg.decayRho * eg[i] + (1 - cfg.decayRho) * g[i] * g[i];
      const double dx = -std::sqrt(ex[i] + cfg.epsilon) / std::sqrt(egNew + cfg.epsilon) * g[i];
      const double exNew = cfg.decayRho * ex[i] + (1 - cfg.decayRho) * dx * dx;
      worst[3] = std::max({worst[3], relErr(slot.value[i], x[i] + cfg.scale * dx),
                           relErr(slot.accumGradSq[i], egNew), relErr(slot.accumUpdateSq[i], exNew)});
    }
  }
  const char* names[] = {"hinge", "l2", "cosine", "adadelta"};
  std::ostringstream d;
  bool ok = true;
  for (int k = 0; k < 4; ++k) {
    d << names[k] << "=" << fmt("%.1e", worst[k]) << " ";
    ok = ok && worst[k] <= kFormulaRelTol;
  }
  d << "cases=" << kFormulaCases;
  return {ok, d.str()};
}

// 3 ---------------------------------------------------------------------------

std::vector<double> bruteRanks(const std::vector<double>& xs) {
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double less = 0, equal = 0;
    for (double y : xs) {
      less += y < xs[i];
      equal += y == xs[i];
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

double brutePearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

Outcome spearmanOracle() {
  Rng rng(33);
  double worst = 0;
  for (int t = 0; t < kSpearmanLists; ++t) {
    const std::size_t n = 2 + uniformIndex(rng, 199);
    std::vector<double> xs(n), ys(n);
    const std::uint64_t levels = 2 + uniformIndex(rng, 30);
    do {
      for (std::size_t i = 0; i < n; ++i) {
        xs[i] = static_cast<double>(uniformIndex(rng, levels));
        ys[i] = uniform(rng, 0, 1) < 0.5 ? xs[i] + static_cast<double>(uniformIndex(rng, 4))
                                          : static_cast<double>(uniformIndex(rng, levels));
      }
    } while (std::all_of(xs.begin(), xs.end(), [&](double v) { return v == xs[0]; }) ||
             std::all_of(ys.begin(), ys.end(), [&](double v) { return v == ys[0]; }));
    worst = std::max(worst, std::abs(spearman(xs, ys) - brutePearson(bruteRanks(xs), bruteRanks(ys))));
  }
  std::vector<double> up(50), down(50);
  std::iota(up.begin(), up.end(), 0.0);
  std::reverse_copy(up.begin(), up.end(), down.begin());
  const double rev = spearman(up, down);
  return {worst <= kSpearmanTol && rev == -1.0,
          "max-diff=" + fmt("%.1e", worst) + " reversed=" + fmt("%.15g", rev)};
}

// 4 ---------------------------------------------------------------------------

Outcome metricIdentity() {
  std::vector<int> gold(1000, 0), pred(1000, 1);
  std::fill(gold.begin(), gold.begin() + 665, 1);
  const AccuracyF1 r = accuracyF1(pred, gold);
  const bool ok = std::abs(r.accuracy - 0.665) < 1e-12 && std::abs(r.f1 - 0.799) <= kF1Tol;
  return {ok, "accuracy=" + fmt("%.4f", r.accuracy) + " f1=" + fmt("%.4f", r.f1)};
}

// 5 ---------------------------------------------------------------------------

double bankPurity(const Model& m, const std::vector<synth::TreeSentence>& probes) {
  const WordId bank = m.vocab.id("bank");
  std::size_t counts[8][2] = {};
  for (const auto& p : probes) {
    Sentence s = encodeSentence(m.vocab, p.tokens);
    std::size_t pos = 0;
    while (s.tokens[pos] != bank) ++pos;
    const Tensor ctx = contextVector(s, pos, m.store.main.value, m.contextWindow);
    counts[selectSense(m.store, bank, ctx).senseIndex][p.topic]++;
  }
  std::size_t agree = 0;
  for (auto& c : counts) agree += std::max(c[0], c[1]);
  return static_cast<double>(agree) / static_cast<double>(probes.size());
}

Outcome senseSeparation() {
  const auto t0 = Clock::now();
  const std::uint64_t seed = 1;
  auto corpus = synth::homonymCorpus(1000, seed);
  auto probes = synth::homonymProbes(200, seed + 1000);
  Vocabulary vocab = synth::vocabOf(corpus);
  auto examples = synth::examplesOf(corpus, vocab);

  GenericTrainConfig cfg;
  cfg.model.dim = 64;
  cfg.model.senses = 1;
  cfg.model.hidden = 16;
  cfg.epochs = 5;
  cfg.seed = seed;
  Model single = trainGeneric(vocab, examples, cfg);
  cfg.model.senses = 2;
  cfg.mainInit = single.store.main.value;
  Model multi = trainGeneric(vocab, examples, cfg);

  const double p2 = bankPurity(multi, probes);
  const double p1 = bankPurity(single, probes);
  const double secs = seconds(t0);
  const bool ok = p2 >= kPurity && p1 == 0.5 && secs < kSenseSeconds;
  return {ok, "purity(n=2)=" + fmt("%.3f", p2) + " purity(n=1)=" + fmt("%.3f", p1) +
                  " time=" + fmt("%.0fs", secs)};
}

// 6 ---------------------------------------------------------------------------

Outcome marginLearning() {
  const std::uint64_t seed = 1;
  auto corpus = synth::paraphraseCorpus(500, seed);
  auto held = synth::paraphraseCorpus(200, seed + 99);
  Vocabulary vocab = synth::vocabOf(corpus);
  GenericTrainConfig cfg;
  cfg.model.dim = 32;
  cfg.model.senses = 2;
  cfg.model.hidden = 32;
  cfg.epochs = 20;
  cfg.seed = seed;
  Model m = trainGeneric(vocab, synth::examplesOf(corpus, vocab), cfg);
  RankingStats st = rankingAccuracy(m, synth::examplesOf(held, vocab), cfg.hinge, seed + 5);
  return {st.overall >= kRanking, "held-out overall=" + fmt("%.3f", st.overall) + " substituted=" +
                                      fmt("%.3f", st.subFraction) + " shuffled=" +
                                      fmt("%.3f", st.shufFraction) + " pairs=" +
                                      std::to_string(st.pairs)};
}

// 7 and 8 ---------------------------------------------------------------------

struct Pretrained {
  Model single;
  Model multi;
};

Pretrained pretrain(std::uint64_t seed) {
  auto corpus = synth::paraphraseCorpus(1000, seed);
  Vocabulary vocab = synth::vocabOf(corpus);
  auto examples = synth::examplesOf(corpus, vocab);
  GenericTrainConfig cfg;
  cfg.model.dim = 32;
  cfg.model.senses = 1;
  cfg.model.hidden = 32;
  cfg.epochs = 5;
  cfg.seed = seed;
  Model single = trainGeneric(vocab, examples, cfg);
  cfg.model.senses = 2;
  cfg.mainInit = single.store.main.value;
  Model multi = trainGeneric(vocab, examples, cfg);
  return {std::move(single), std::move(multi)};
}

double taskAccuracy(const Model& init, const std::vector<ParaphrasePair>& pairs, CostKind cost,
                    SenseMode mode, bool pooling, std::uint64_t seed) {
  std::vector<ParaphrasePair> train(pairs.begin(), pairs.begin() + 1600);
  std::vector<ParaphrasePair> test(pairs.begin() + 1600, pairs.end());
  ParaphraseTrainConfig cfg;
  cfg.cost = cost;
  cfg.mode = mode;
  cfg.pooling = pooling;
  cfg.epochs = 20;
  cfg.seed = seed;
  cfg.trainC1 = false;
  auto r = trainParaphrase(init, train, cfg);
  return evaluateParaphrase(r.model, test, false)[0].value;
}

struct SeedRun {
  double cosine = 0, l2 = 0;
  double ambiguous = 0, prior = 0, hard = 0, soft = 0, softPool = 0;
};

std::vector<SeedRun>& seedRuns() {
  static std::vector<SeedRun> runs = [] {
    std::vector<SeedRun> out;
    for (int s = 1; s <= kSeeds; ++s) {
      const auto seed = static_cast<std::uint64_t>(s);
      Pretrained pre = pretrain(seed);
      SeedRun r;
      auto plain = synth::paraphrasePairs(2000, seed, 0.0);
      r.cosine = taskAccuracy(pre.multi, plain, CostKind::Cosine, SenseMode::Soft, false, seed);
      r.l2 = taskAccuracy(pre.multi, plain, CostKind::L2, SenseMode::Soft, false, seed);
      auto cued = synth::paraphrasePairs(2000, seed, 0.5);
      r.ambiguous = taskAccuracy(pre.single, cued, CostKind::Cosine, SenseMode::Ambiguous, false, seed);
      r.prior = taskAccuracy(pre.multi, cued, CostKind::Cosine, SenseMode::Prior, false, seed);
      r.hard = taskAccuracy(pre.multi, cued, CostKind::Cosine, SenseMode::Hard, false, seed);
      r.soft = taskAccuracy(pre.multi, cued, CostKind::Cosine, SenseMode::Soft, false, seed);
      r.softPool = taskAccuracy(pre.multi, cued, CostKind::Cosine, SenseMode::Soft, true, seed);
      std::printf("  seed %d: cosine=%.4f l2=%.4f | ambiguous=%.4f prior=%.4f hard=%.4f soft=%.4f "
                  "soft+pool=%.4f\n",
                  s, r.cosine, r.l2, r.ambiguous, r.prior, r.hard, r.soft, r.softPool);
      std::fflush(stdout);
      out.push_back(r);
    }
    return out;
  }();
  return runs;
}

Outcome costDirection() {
  int wins = 0;
  bool floor = true;
  for (const SeedRun& r : seedRuns()) {
    wins += r.cosine >= r.l2;
    floor = floor && r.cosine >= kParaphraseFloor && r.l2 >= kParaphraseFloor;
  }
  return {wins >= kSeedsNeeded && floor,
          "cosine>=l2 in " + std::to_string(wins) + "/" + std::to_string(kSeeds) +
              " seeds, all runs >= 0.85: " + (floor ? "yes" : "no")};
}

Outcome modeOrderings() {
  struct Order {
    const char* name;
    std::function<bool(const SeedRun&)> holds;
  };
  const Order orders[] = {
      {"soft>=hard", [](const SeedRun& r) { return r.soft >= r.hard; }},
      {"hard>=prior", [](const SeedRun& r) { return r.hard >= r.prior; }},
      {"prior>=ambiguous", [](const SeedRun& r) { return r.prior >= r.ambiguous; }},
      {"pooling>=none", [](const SeedRun& r) { return r.softPool >= r.soft; }},
  };
  bool ok = true;
  std::ostringstream d;
  for (const Order& o : orders) {
    int n = 0;
    for (const SeedRun& r : seedRuns()) n += o.holds(r);
    ok = ok && n >= kSeedsNeeded;
    d << o.name << " " << n << "/" << kSeeds << " ";
  }
  std::string s = d.str();
  s.pop_back();
  return {ok, s};
}

// 9 ---------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<SimilarityItem> bankItems(const std::vector<synth::TreeSentence>& probes) {
  std::vector<SimilarityItem> items;
  for (std::size_t i = 0; i + 1 < probes.size(); i += 2) {
    const auto& a = probes[i];
    const auto& b = probes[i % 4 == 0 ? i + 1 : (i + 2) % probes.size()];
    SimilarityItem it;
    it.word1 = "bank";
    it.word2 = b.tokens[i % b.tokens.size()];
    it.context1 = a.tokens;
    it.context2 = b.tokens;
    it.position1 = static_cast<std::size_t>(std::find(a.tokens.begin(), a.tokens.end(), "bank") - a.tokens.begin());
    it.position2 = i % b.tokens.size();
    it.humanScore = a.topic == b.topic ? 8.0 : 2.0;
    items.push_back(std::move(it));
  }
  return items;
}

std::string reports(Model& m, const std::vector<SimilarityItem>& items,
                    const std::vector<ParaphrasePair>& pairs) {
  std::string out = formatReports(evaluateSimilarity(m, items, {"global", "local", "avg"}));
  out += formatReports(evaluateParaphrase(m, pairs, false));
  out += formatReports(evaluateParaphrase(m, pairs, true));
  return out;
}

Outcome determinismAndPersistence() {
  const auto dir = std::filesystem::temp_directory_path() / "sams-acceptance";
  std::filesystem::create_directories(dir);
  auto corpus = synth::homonymCorpus(200, 7);
  auto extra = synth::paraphraseCorpus(200, 7);
  corpus.insert(corpus.end(), extra.begin(), extra.end());
  Vocabulary vocab = synth::vocabOf(corpus);
  auto examples = synth::examplesOf(corpus, vocab);
  GenericTrainConfig cfg;
  cfg.model.dim = 12;
  cfg.model.senses = 2;
  cfg.model.hidden = 8;
  cfg.epochs = 2;
  cfg.seed = 77;

  auto pairs = synth::paraphrasePairs(120, 7);
  ParaphraseTrainConfig pc;
  pc.epochs = 2;
  pc.seed = 77;
  pc.cost = CostKind::L2;
  pc.margins = {0.5, 1.0};

  std::string files[2];
  for (int run = 0; run < 2; ++run) {
    cfg.threads = run == 0 ? 1 : 3;
    pc.threads = cfg.threads;
    Model m = trainGeneric(vocab, examples, cfg);
    Model tuned = trainParaphrase(m, pairs, pc).model;
    const auto path = dir / ("run" + std::to_string(run) + ".sams");
    saveModel(tuned, path.string());
    files[run] = slurp(path);
  }
  const bool identical = !files[0].empty() && files[0] == files[1];

  auto items = bankItems(synth::homonymProbes(40, 8));
  Model loaded = loadModel((dir / "run0.sams").string());
  const std::string before = reports(loaded, items, pairs);
  saveModel(loaded, (dir / "again.sams").string());
  Model reloaded = loadModel((dir / "again.sams").string());
  const std::string after = reports(reloaded, items, pairs);
  const bool sameReports = before == after;
  const bool sameFile = slurp(dir / "again.sams") == files[0];
  return {identical && sameReports && sameFile,
          std::string("checkpoints identical: ") + (identical ? "yes" : "no") +
              ", reports unchanged after round trip: " + (sameReports ? "yes" : "no") +
              ", re-saved file identical: " + (sameFile ? "yes" : "no")};
}

// 10 --------------------------------------------------------------------------

std::vector<double> handAffineTanh(const Tensor& W, const Tensor& b, const std::vector<double>& x) {
  std::vector<double> y(b.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < x.size(); ++j) s += W.data()[i * x.size() + j] * x[j];
    y[i] = std::tanh(s);
  }
  return y;
}

std::vector<double> joined(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Outcome encoderSemantics() {
  Rng rng(10);
  const std::size_t d = 4;
  double worstRec = 0, worstRnn = 0, worstPool = 0;
  auto rnd = [&](double r) {
    Tensor t({d});
    for (double& x : t.data()) x = uniform(rng, -r, r);
    return t;
  };
  for (int t = 0; t < kPoolCases; ++t) {
    CompositionLayer layer = CompositionLayer::zeros(d);
    for (double& x : layer.W.value.data()) x = uniform(rng, -1, 1);
    layer.b.value = rnd(0.5);
    std::vector<Tensor> xs{rnd(1), rnd(1), rnd(1)};
    const auto inner = handAffineTanh(layer.W.value, layer.b.value, joined(xs[1].data(), xs[2].data()));
    const auto root = handAffineTanh(layer.W.value, layer.b.value, joined(xs[0].data(), inner));
    const Tensor got = encodeRecNN(xs, ParseTree::rightBranching(3), layer).root;
    for (std::size_t i = 0; i < d; ++i) worstRec = std::max(worstRec, std::abs(got[i] - root[i]));

    LstmCell cell = LstmCell::zeros(d);
    for (ParamSlot* s : cell.slots()) {
      for (double& x : s->value.data()) x = uniform(rng, -1, 1);
    }
    std::vector<double> h(d, 0.0), c(d, 0.0);
    for (const Tensor& x : xs) {
      const auto in = joined(x.data(), h);
      auto lin = [&](const ParamSlot& W, const ParamSlot& b, std::size_t k) {
        double s = b.value[k];
        for (std::size_t j = 0; j < in.size(); ++j) s += W.value.data()[k * in.size() + j] * in[j];
        return s;
      };
      for (std::size_t k = 0; k < d; ++k) {
        const double ig = sig(lin(cell.Wi, cell.bi, k)), fg = sig(lin(cell.Wf, cell.bf, k));
        const double og = sig(lin(cell.Wo, cell.bo, k)), cand = std::tanh(lin(cell.Wc, cell.bc, k));
        c[k] = fg * c[k] + ig * cand;
        h[k] = og * std::tanh(c[k]);
      }
    }
    const Tensor rnn = encodeRNN(xs, cell).root;
    for (std::size_t i = 0; i < d; ++i) worstRnn = std::max(worstRnn, std::abs(rnn[i] - h[i]));

    std::vector<Tensor> ys;
    const std::size_t n = 2 + uniformIndex(rng, 10);
    for (std::size_t i = 0; i < n; ++i) ys.push_back(rnd(2));
    const Tensor before = averagePool(ys);
    for (std::size_t i = n; i > 1; --i) std::swap(ys[i - 1], ys[uniformIndex(rng, i)]);
    const Tensor after = averagePool(ys);
    for (std::size_t i = 0; i < d; ++i) worstPool = std::max(worstPool, std::abs(before[i] - after[i]));
  }
  return {worstRec <= kUnrollTol && worstRnn <= kUnrollTol && worstPool <= kUnrollTol,
          "recnn=" + fmt("%.1e", worstRec) + " rnn=" + fmt("%.1e", worstRnn) +
              " pool-permutation=" + fmt("%.1e", worstPool) + " cases=" + std::to_string(kPoolCases)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Outcome()>> criteria{
      {1, gradientIntegrity}, {2, formulaOracles},  {3, spearmanOracle},
      {4, metricIdentity},    {5, senseSeparation}, {6, marginLearning},
      {7, costDirection},     {8, modeOrderings},   {9, determinismAndPersistence},
      {10, encoderSemantics}};
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %d %s %s (%.1fs)\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                seconds(t0));
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
