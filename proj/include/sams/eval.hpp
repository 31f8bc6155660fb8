#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sams/model.hpp"
#include "sams/siamese.hpp"

namespace sams {

/// Word pair with contexts, as in SCWS-style data.
struct SimilarityItem {
  std::string word1, word2;
  std::vector<std::string> context1, context2;  // target markers removed
  std::size_t position1 = 0, position2 = 0;
  double humanScore = 0.0;
};

/// Parses one `word1<TAB>word2<TAB>context1<TAB>context2<TAB>score` row. Each
/// context marks its target as `<t>word</t>` exactly once.
SimilarityItem parseSimilarityItem(std::string_view line);
std::vector<SimilarityItem> readSimilarityItems(const std::string& path);

struct EvalReport {
  std::string metric;
  double value = 0.0;
  std::size_t n = 0;
};

/// `metric<TAB>value<TAB>n` lines.
std::string formatReports(const std::vector<EvalReport>& reports);

/// Cosine of the main vectors; unknown words fall back to UNK.
double globalSim(const std::string& w1, const std::string& w2, const Model& model);
/// Cosine of the senses selected by each side's context. `window` counts
/// tokens on each side of the target; 0 uses the whole context.
double localSim(const SimilarityItem& item, const Model& model, std::size_t window = 5);
/// Cosine of the probability-weighted sense mixtures, weighted with the
/// model's beta.
double avgSim(const SimilarityItem& item, const Model& model, std::size_t window = 5);

/// Pearson correlation of ranks, ties sharing their average rank.
double spearman(std::span<const double> xs, std::span<const double> ys);

enum class VectorSpace { Main, Sense };
VectorSpace parseVectorSpace(std::string_view name);

struct Neighbor {
  WordId word = 0;
  std::size_t sense = 0;
  double score = 0.0;
};

/// Top-k by cosine. The query word (all of its senses, in sense space) and
/// UNK are never returned; equal scores keep vocabulary order.
std::vector<Neighbor> nearestNeighbors(const Model& model, const std::string& word, std::size_t k,
                                       VectorSpace space, std::size_t senseIndex = 0);

struct AccuracyF1 {
  double accuracy = 0.0;
  double f1 = 0.0;
};
AccuracyF1 accuracyF1(std::span<const int> preds, std::span<const int> gold);

/// One Spearman report per requested metric (`global`, `local`, `avg`).
std::vector<EvalReport> evaluateSimilarity(const Model& model,
                                           const std::vector<SimilarityItem>& items,
                                           const std::vector<std::string>& metrics,
                                           std::size_t window = 5);

/// Accuracy and F1 reports over labelled pairs.
std::vector<EvalReport> evaluateParaphrase(Model& model, const std::vector<ParaphrasePair>& pairs,
                                           bool ensemble);

}  // namespace sams
