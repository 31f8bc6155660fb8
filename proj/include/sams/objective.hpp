#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sams/model.hpp"

namespace sams {

enum class NodeAggregation { Sum, Mean };

struct HingeConfig {
  double margin = 1.0;
  std::size_t kSub = 5;
  std::size_t kShuf = 1;
  /// Weight of the shuffled-context hinge relative to the substitution hinge.
  double shuffleWeight = 1.0;
  NodeAggregation nodeAgg = NodeAggregation::Sum;
  SubstituteSampling sampling = SubstituteSampling::Unigram;

  void validate() const;
};

struct GenericTrainConfig {
  ModelConfig model;
  std::size_t epochs = 5;
  std::size_t batchSize = 16;
  std::uint64_t seed = 1;
  std::size_t minCount = 1;
  std::size_t maxLength = 64;
  std::size_t contextWindow = 0;
  std::size_t threads = 1;
  AdaDeltaConfig adadelta;
  HingeConfig hinge;
  /// Optional pre-trained main vectors (rows aligned with the vocabulary).
  std::optional<Tensor> mainInit;

  void validate() const;
};

/// u . tanh(W1 v + b1) + b2.
double scoreNode(const Tensor& v, const PlausibilityScorer& scorer);
Var scoreNode(Tape& tape, Var v, PlausibilityScorer& scorer);

/// max(0, m - pos + neg).
double hingePair(double posScore, double negScore, double margin);

/// A sentence paired with its (optional) parse tree.
struct TrainingExample {
  Sentence sentence;
  std::optional<ParseTree> tree;
};

/// Plausibility f(s): per-node scores aggregated over every composition node
/// (a single-leaf tree scores its leaf).
Var plausibility(Tape& tape, Model& model, const EncodedVars& enc, NodeAggregation agg);

/// The corrupted examples drawn for one sentence.
struct Negatives {
  std::vector<Sentence> substituted;
  std::vector<Sentence> shuffled;
};
Negatives drawNegatives(const Sentence& s, const HingeConfig& cfg, const Corrupter& corrupter,
                        Rng& rng);

struct CentroidUpdate {
  WordId word;
  std::size_t sense;
  Tensor context;
};

/// Loss of one sentence against its negatives, built on a tape.
struct SentenceLossResult {
  Var loss;
  double posScore = 0.0;
  std::vector<double> negScores;
  std::vector<CentroidUpdate> updates;  // sense choices made for the positive
};

SentenceLossResult sentenceLoss(Tape& tape, Model& model, const TrainingExample& ex,
                                const Negatives& negs, const HingeConfig& cfg);

/// Convenience value-level loss; draws negatives from `rng`.
double sentenceLoss(Model& model, const TrainingExample& ex, const HingeConfig& cfg,
                    const Corrupter& corrupter, Rng& rng);

/// Fraction of (positive, negative) pairs where the positive scores strictly
/// higher, over freshly drawn negatives for each example.
struct RankingStats {
  double subFraction = 0.0;
  double shufFraction = 0.0;
  double overall = 0.0;
  std::size_t pairs = 0;
};
RankingStats rankingAccuracy(Model& model, const std::vector<TrainingExample>& examples,
                             const HingeConfig& cfg, std::uint64_t seed);

/// Joint mini-batch AdaDelta training of embeddings, encoder and scorer, with
/// centroid updates applied after each batch in example order. Writes
/// `epoch <k> loss <mean> margin-satisfied <fraction>` per epoch to `log`.
Model trainGeneric(const Vocabulary& vocab, const std::vector<TrainingExample>& examples,
                   const GenericTrainConfig& cfg, std::ostream* log = nullptr);

/// File-level entry point: reads the corpus (and trees, required for recnn).
Model trainGeneric(const std::string& corpusPath, const std::optional<std::string>& treePath,
                   const GenericTrainConfig& cfg, std::ostream* log = nullptr);

/// Pairs sentences with trees, checking that tokens agree.
std::vector<TrainingExample> loadExamples(const std::string& corpusPath,
                                          const std::optional<std::string>& treePath,
                                          const Vocabulary& vocab, std::size_t maxLength);

/// Applies one AdaDelta step to every slot with gradient (tables by touched row).
void applyUpdates(Model& model, const TouchedRows& touched, const AdaDeltaConfig& cfg,
                  std::span<ParamSlot* const> slots);

}  // namespace sams
