#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sams/corpus.hpp"
#include "sams/optim.hpp"
#include "sams/rng.hpp"
#include "sams/tensor.hpp"

namespace sams {

/// Everything a word owns in a multi-sense model, copied out of the store.
struct MultiSenseEntry {
  Tensor main;
  std::vector<Tensor> centroids;
  std::vector<Tensor> senseVecs;
  std::vector<std::uint64_t> centroidCounts;

  std::size_t senses() const { return centroids.size(); }
};

struct SenseChoice {
  WordId word = 0;
  std::size_t senseIndex = 0;
  double score = 0.0;  // cosine between the context and the winning centroid
  std::optional<Tensor> probs;
};

/// Per-word embedding tables.
///
/// `main` is V x d. Centroids and sense vectors are (V*n) x d with word w's
/// sense i at row w*n + i. A single-sense model (n == 1) has no separate sense
/// table: its sense vector is the main vector, so the ambiguous and
/// disambiguated views of such a model coincide.
class SenseStore {
 public:
  SenseStore() = default;
  SenseStore(std::size_t vocabSize, std::size_t dim, std::size_t senses);

  /// Main vectors uniform in [-0.5/d, 0.5/d]; sense vectors are the main
  /// vector plus noise of the same magnitude; centroids are random unit vectors.
  static SenseStore initialize(std::size_t vocabSize, std::size_t dim, std::size_t senses,
                               Rng& rng, double initialBeta = 1.0);

  std::size_t vocabSize() const { return vocabSize_; }
  std::size_t dim() const { return dim_; }
  std::size_t senses() const { return senses_; }

  ParamSlot& senseTable() { return senses_ == 1 ? main : senseVecs; }
  const ParamSlot& senseTable() const { return senses_ == 1 ? main : senseVecs; }
  std::size_t senseRow(WordId w, std::size_t i) const { return senses_ == 1 ? w : w * senses_ + i; }
  std::size_t centroidRow(WordId w, std::size_t i) const { return w * senses_ + i; }

  Tensor mainVector(WordId w) const { return main.value.rowTensor(w); }
  Tensor senseVector(WordId w, std::size_t i) const {
    return senseTable().value.rowTensor(senseRow(w, i));
  }
  MultiSenseEntry entry(WordId w) const;
  double betaValue() const { return beta.value[0]; }

  /// Adds `context` to centroid i of word w and bumps its count.
  void updateCentroid(WordId w, std::size_t senseIndex, const Tensor& context);

  ParamSlot main;
  ParamSlot senseVecs;
  ParamSlot centroids;
  ParamSlot beta;
  std::vector<std::uint64_t> centroidCounts;

 private:
  std::size_t vocabSize_ = 0;
  std::size_t dim_ = 0;
  std::size_t senses_ = 0;
};

/// Cosine of `context` with each centroid row [first, first+n) of `table`.
/// Zero vectors contribute a cosine of 0.
std::vector<double> centroidCosines(const Tensor& table, std::size_t first, std::size_t n,
                                    const Tensor& context);

/// Index of the largest value, lowest index on ties.
std::size_t argmaxLowest(std::span<const double> xs);

/// Picks the sense whose centroid is closest (cosine) to the context. A zero
/// context or all-zero centroids select sense 0; ties go to the lowest index.
SenseChoice selectSense(const MultiSenseEntry& entry, const Tensor& context);
SenseChoice selectSense(const SenseStore& store, WordId w, const Tensor& context);

MultiSenseEntry updateCentroid(MultiSenseEntry entry, std::size_t senseIndex,
                               const Tensor& context);

/// softmax(beta * cosine(context, centroid_i)); uniform for a zero context.
Tensor senseProbabilities(const MultiSenseEntry& entry, const Tensor& context, double beta);
Tensor senseProbabilities(const SenseStore& store, WordId w, const Tensor& context, double beta);

/// Probability-weighted mix of the sense vectors.
Tensor softSenseVector(const MultiSenseEntry& entry, const Tensor& probs);

struct PriorChoice {
  std::vector<std::size_t> senses;
  std::vector<Tensor> vectors;
};

/// Chooses each word's sense from the mean of the other words' main vectors.
/// Read-only with respect to the store.
PriorChoice priorDisambiguate(const Sentence& s, const SenseStore& store, std::size_t window = 0);

}  // namespace sams
