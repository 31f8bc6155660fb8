// sams: train, evaluate and inspect multi-sense compositional models.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sams/checkpoint.hpp"
#include "sams/eval.hpp"
#include "sams/gradcheck.hpp"
#include "sams/objective.hpp"
#include "sams/siamese.hpp"

namespace {

using namespace sams;

std::optional<std::string> opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

struct GenericArgs {
  std::string corpus, trees, encoder = "recnn", out, nodeAgg = "sum", sampling = "unigram";
  GenericTrainConfig cfg;
};

struct ParaphraseArgs {
  std::string pairs, trees1, trees2, init, cost = "cosine", mode = "soft", out, encoder = "recnn";
  bool ensemble = false, freeze = false;
  std::size_t dim = 300, senses = 3, hidden = 150, minCount = 1;
  ParaphraseTrainConfig cfg;
};

int runGeneric(GenericArgs& a) {
  a.cfg.model.encoder = parseEncoderKind(a.encoder);
  if (a.nodeAgg == "sum") {
    a.cfg.hinge.nodeAgg = NodeAggregation::Sum;
  } else if (a.nodeAgg == "mean") {
    a.cfg.hinge.nodeAgg = NodeAggregation::Mean;
  } else {
    throw UsageError("ConfigError", "--node-agg must be sum or mean");
  }
  if (a.sampling == "unigram") {
    a.cfg.hinge.sampling = SubstituteSampling::Unigram;
  } else if (a.sampling == "uniform") {
    a.cfg.hinge.sampling = SubstituteSampling::Uniform;
  } else {
    throw UsageError("ConfigError", "--sampling must be unigram or uniform");
  }
  Model m = trainGeneric(a.corpus, opt(a.trees), a.cfg, &std::cerr);
  saveModel(m, a.out);
  return 0;
}

int runParaphrase(ParaphraseArgs& a) {
  a.cfg.cost = parseCostKind(a.cost);
  a.cfg.mode = parseSenseMode(a.mode);
  a.cfg.trainC1 = a.ensemble;
  a.cfg.updateEmbeddings = !a.freeze;
  auto pairs = readPairs(a.pairs, opt(a.trees1), opt(a.trees2));
  Model init;
  if (!a.init.empty()) {
    init = loadModel(a.init);
  } else {
    // One-step variant: the task objective trains a freshly initialized model.
    ModelConfig mc;
    mc.dim = a.dim;
    mc.senses = a.senses;
    mc.hidden = a.hidden;
    mc.encoder = parseEncoderKind(a.encoder);
    init = Model::initialize(vocabFromPairs(pairs, a.minCount), mc, a.cfg.seed);
  }
  auto res = trainParaphrase(std::move(init), pairs, a.cfg, &std::cerr);
  std::cerr << "best epoch " << res.bestEpoch << " validation-accuracy " << res.validationAccuracy << '\n';
  saveModel(res.model, a.out);
  return 0;
}

int runNeighbors(const std::string& model, const std::string& word, std::size_t k,
                 const std::string& space, std::size_t sense) {
  Model m = loadModel(model);
  const VectorSpace sp = parseVectorSpace(space);
  for (const auto& n : nearestNeighbors(m, word, k, sp, sense)) {
    std::string label = m.vocab.token(n.word);
    if (sp == VectorSpace::Sense && m.senses() > 1) label += "#" + std::to_string(n.sense);
    std::printf("%s\t%.6f\n", label.c_str(), n.score);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Syntax-aware multi-sense compositional embeddings"};
  app.require_subcommand(1);

  GenericArgs g;
  auto* gen = app.add_subcommand("train-generic", "train embeddings, encoder and scorer on a corpus");
  gen->add_option("--corpus", g.corpus, "one sentence per line")->required();
  gen->add_option("--trees", g.trees, "bracketed parse trees, one per corpus line");
  gen->add_option("--encoder", g.encoder, "recnn or rnn")->capture_default_str();
  gen->add_option("--dim", g.cfg.model.dim)->capture_default_str();
  gen->add_option("--senses", g.cfg.model.senses)->capture_default_str();
  gen->add_option("--hidden", g.cfg.model.hidden, "scorer hidden units")->capture_default_str();
  gen->add_option("--margin", g.cfg.hinge.margin)->capture_default_str();
  gen->add_option("--k-sub", g.cfg.hinge.kSub, "substitution negatives per sentence")->capture_default_str();
  gen->add_option("--k-shuf", g.cfg.hinge.kShuf, "shuffled negatives per sentence")->capture_default_str();
  gen->add_option("--shuffle-weight", g.cfg.hinge.shuffleWeight)->capture_default_str();
  gen->add_option("--node-agg", g.nodeAgg, "sum or mean")->capture_default_str();
  gen->add_option("--sampling", g.sampling, "unigram or uniform")->capture_default_str();
  gen->add_option("--epochs", g.cfg.epochs)->capture_default_str();
  gen->add_option("--batch", g.cfg.batchSize)->capture_default_str();
  gen->add_option("--seed", g.cfg.seed)->capture_default_str();
  gen->add_option("--min-count", g.cfg.minCount)->capture_default_str();
  gen->add_option("--max-length", g.cfg.maxLength)->capture_default_str();
  gen->add_option("--context-window", g.cfg.contextWindow, "0 = whole sentence")->capture_default_str();
  gen->add_option("--beta", g.cfg.model.initialBeta, "initial soft-max scale")->capture_default_str();
  gen->add_option("--threads", g.cfg.threads)->capture_default_str();
  gen->add_option("--out", g.out)->required();

  ParaphraseArgs p;
  auto* par = app.add_subcommand("train-paraphrase", "siamese paraphrase training");
  par->add_option("--pairs", p.pairs, "label<TAB>sentence1<TAB>sentence2")->required();
  par->add_option("--trees1", p.trees1);
  par->add_option("--trees2", p.trees2);
  par->add_option("--init", p.init, "pre-trained checkpoint; omit for the one-step variant");
  par->add_option("--cost", p.cost, "cosine or l2")->capture_default_str();
  par->add_option("--mode", p.mode, "ambiguous, prior, hard or soft")->capture_default_str();
  par->add_flag("--pooling", p.cfg.pooling, "add the mean input vector");
  par->add_flag("--ensemble", p.ensemble, "also train the surface-feature classifier");
  par->add_flag("--freeze-embeddings", p.freeze, "train only the gate and the head");
  par->add_option("--margins", p.cfg.margins, "L2 margins to try")->capture_default_str();
  par->add_option("--validation", p.cfg.validationFraction)->capture_default_str();
  par->add_option("--epochs", p.cfg.epochs)->capture_default_str();
  par->add_option("--batch", p.cfg.batchSize)->capture_default_str();
  par->add_option("--seed", p.cfg.seed)->capture_default_str();
  par->add_option("--threads", p.cfg.threads)->capture_default_str();
  par->add_option("--encoder", p.encoder, "one-step variant only")->capture_default_str();
  par->add_option("--dim", p.dim, "one-step variant only")->capture_default_str();
  par->add_option("--senses", p.senses, "one-step variant only")->capture_default_str();
  par->add_option("--hidden", p.hidden, "one-step variant only")->capture_default_str();
  par->add_option("--min-count", p.minCount, "one-step variant only")->capture_default_str();
  par->add_option("--out", p.out)->required();

  std::string simModel, simData, metric = "all";
  std::size_t window = 5;
  auto* sim = app.add_subcommand("eval-similarity", "contextual word similarity (Spearman)");
  sim->add_option("--model", simModel)->required();
  sim->add_option("--data", simData)->required();
  sim->add_option("--metric", metric, "global, local, avg or all")->capture_default_str();
  sim->add_option("--window", window, "tokens each side of the target; 0 = whole context")
      ->capture_default_str();

  std::string parModel, parData, parTrees1, parTrees2;
  bool parEnsemble = false;
  auto* evp = app.add_subcommand("eval-paraphrase", "paraphrase accuracy and F1");
  evp->add_option("--model", parModel)->required();
  evp->add_option("--data", parData)->required();
  evp->add_option("--trees1", parTrees1);
  evp->add_option("--trees2", parTrees2);
  evp->add_flag("--ensemble", parEnsemble);

  std::string nbModel, nbWord, space = "main";
  std::size_t k = 10, senseIndex = 0;
  auto* nb = app.add_subcommand("neighbors", "nearest neighbours of a word");
  nb->add_option("--model", nbModel)->required();
  nb->add_option("--word", nbWord)->required();
  nb->add_option("-k", k)->capture_default_str();
  nb->add_option("--space", space, "main or sense")->capture_default_str();
  nb->add_option("--sense", senseIndex, "query sense in sense space")->capture_default_str();

  std::size_t gcDim = 8, gcHidden = 6;
  std::uint64_t gcSeed = 1;
  auto* gc = app.add_subcommand("grad-check", "finite-difference check of the gradients");
  gc->add_option("--dim", gcDim)->capture_default_str();
  gc->add_option("--hidden", gcHidden)->capture_default_str();
  gc->add_option("--seed", gcSeed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*gen) return runGeneric(g);
    if (*par) return runParaphrase(p);
    if (*sim) {
      Model m = loadModel(simModel);
      auto items = readSimilarityItems(simData);
      std::vector<std::string> metrics;
      if (metric == "all") {
        metrics = {"global", "local", "avg"};
      } else {
        metrics = {metric};
      }
      std::cout << formatReports(evaluateSimilarity(m, items, metrics, window));
      return 0;
    }
    if (*evp) {
      Model m = loadModel(parModel);
      auto pairs = readPairs(parData, opt(parTrees1), opt(parTrees2));
      std::cout << formatReports(evaluateParaphrase(m, pairs, parEnsemble));
      return 0;
    }
    if (*nb) return runNeighbors(nbModel, nbWord, k, space, senseIndex);
    if (*gc) {
      const auto report = runGradCheck(gcDim, gcHidden, gcSeed);
      for (const auto& c : report.cases) {
        std::printf("%s\tmax-rel-error %.3e\tparameters %zu\n", c.name.c_str(), c.maxRelError, c.parameters);
      }
      std::printf("%.3e\n", report.maxRelError());
      return report.maxRelError() < 1e-4 ? 0 : 2;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
