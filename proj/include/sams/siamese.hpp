#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sams/model.hpp"

namespace sams {

struct ParaphrasePair {
  std::vector<std::string> tokens1;
  std::vector<std::string> tokens2;
  std::optional<ParseTree> tree1;
  std::optional<ParseTree> tree2;
  int label = 0;  // 1 = paraphrase
};

/// Reads `label<TAB>sentence1<TAB>sentence2` rows, with optional parallel tree
/// files (one bracketed tree per pair). Throws IoError / FormatError.
std::vector<ParaphrasePair> readPairs(const std::string& path,
                                      const std::optional<std::string>& trees1 = std::nullopt,
                                      const std::optional<std::string>& trees2 = std::nullopt);

/// Vocabulary over both sides of every pair, for models trained from scratch
/// on the task.
Vocabulary vocabFromPairs(const std::vector<ParaphrasePair>& pairs, std::uint64_t minCount);

/// Sentence vector for the siamese branches: inputs chosen by `mode`, then the
/// model's encoder, plus the mean input vector when `pooling` is set. A RecNN
/// model without a tree falls back to a right-branching tree.
Var encodeSentence(Tape& tape, Model& model, const Sentence& s, const ParseTree* tree,
                   SenseMode mode, bool pooling);
Tensor encodeSentence(Model& model, const Sentence& s, const ParseTree* tree, SenseMode mode,
                      bool pooling);

/// y = 1: 0.5 |v1 - v2|^2; y = 0: 0.5 max(0, m - |v1 - v2|)^2.
double l2ContrastiveCost(const Tensor& v1, const Tensor& v2, int y, double margin);
Var l2ContrastiveCost(Tape& tape, Var v1, Var v2, int y, double margin);

/// 0.5 (y - sigmoid(w d + b))^2 with d the cosine of v1 and v2.
double cosineCost(const Tensor& v1, const Tensor& v2, int y, double w, double b);
/// `head` holds (w, b).
Var cosineCost(Tape& tape, Var v1, Var v2, int y, Var head);

struct SurfaceFeatures {
  double lengthDiff = 0.0;
  double unigramOverlap = 0.0;  // Jaccard over token sets
  bool hasNumbers1 = false;
  bool hasNumbers2 = false;
  bool numbersEqual = true;  // numeric-token multisets equal
};

bool isNumericToken(std::string_view token);
SurfaceFeatures extractSurfaceFeatures(std::span<const std::string> s1,
                                       std::span<const std::string> s2);
/// Symmetric feature vector for C1: log1p(length diff), overlap, both have
/// numbers, exactly one has numbers, numbers equal, model similarity.
std::vector<double> c1Features(const SurfaceFeatures& f, double similarity);

/// Deterministic full-batch gradient descent on the L2-regularized log loss.
LogisticClassifier trainLogistic(const std::vector<std::vector<double>>& xs,
                                 const std::vector<int>& ys, std::size_t iterations = 3000,
                                 double learningRate = 0.5, double l2 = 1e-4);

struct ParaphraseTrainConfig {
  CostKind cost = CostKind::Cosine;
  SenseMode mode = SenseMode::Soft;
  bool pooling = false;
  bool trainC1 = true;
  std::size_t epochs = 10;
  std::size_t batchSize = 16;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  AdaDeltaConfig adadelta;
  /// Candidate margins for the L2 cost; the best on validation is kept.
  std::vector<double> margins{1.0};
  /// Fraction of pairs held out for epoch/margin selection and calibration.
  double validationFraction = 0.1;
  /// Whether word vectors and encoder weights are refined (false freezes them
  /// and trains only the selection layer and the head).
  bool updateEmbeddings = true;

  void validate() const;
};

struct ParaphraseTrainResult {
  Model model;
  double validationAccuracy = 0.0;
  std::size_t bestEpoch = 0;
};

/// Siamese training: both branches read the same parameter storage and their
/// gradients are summed. Heads and C1 are stored in `model.heads`.
ParaphraseTrainResult trainParaphrase(Model model, const std::vector<ParaphrasePair>& pairs,
                                      const ParaphraseTrainConfig& cfg,
                                      std::ostream* log = nullptr);

/// Cosine similarity of the two sentence vectors under the model's task settings.
double pairSimilarity(Model& model, const ParaphrasePair& pair);

struct Prediction {
  double probability = 0.0;
  int label = 0;
};

/// Base probability from the trained head; with `ensemble`, the mean of the
/// base and C1 probabilities. Label is probability >= 0.5.
Prediction predictParaphrase(Model& model, const ParaphrasePair& pair, bool ensemble);

/// Mean of two probabilities; the ensembling rule.
double ensembleProbability(double base, double c1);

}  // namespace sams
