#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sams/composition.hpp"
#include "sams/corpus.hpp"
#include "sams/senses.hpp"

namespace sams {

/// Two-layer per-node plausibility network: u . tanh(W1 v + b1) + b2.
struct PlausibilityScorer {
  ParamSlot W1;  // h x d
  ParamSlot b1;  // h
  ParamSlot u;   // h
  ParamSlot b2;  // scalar

  static PlausibilityScorer zeros(std::size_t dim, std::size_t hidden);
  static PlausibilityScorer initialize(std::size_t dim, std::size_t hidden, Rng& rng);
  std::size_t hidden() const { return b1.value.size(); }
  std::vector<ParamSlot*> slots() { return {&W1, &b1, &u, &b2}; }
};

/// How per-word input vectors are chosen before composition.
enum class SenseMode { Ambiguous, Prior, Hard, Soft };
const char* senseModeName(SenseMode m);
SenseMode parseSenseMode(std::string_view name);

enum class CostKind { Cosine, L2 };
const char* costName(CostKind c);
CostKind parseCostKind(std::string_view name);

/// Logistic regression over a dense feature vector.
struct LogisticClassifier {
  std::vector<double> weights;
  double bias = 0.0;

  double probability(std::span<const double> features) const;
};

/// Task-phase state: cost heads, C1 and the settings the model was tuned with.
struct TaskHeads {
  ParamSlot cosine{"head.cos", Tensor::vector({1.0, 0.0})};  // w, b of sigma(w d + b)
  double l2Margin = 1.0;
  double l2Calibration = 1.0;  // a in sigma(a (m/2 - D))
  std::optional<LogisticClassifier> c1;
  CostKind cost = CostKind::Cosine;
  SenseMode mode = SenseMode::Ambiguous;
  bool pooling = false;
  bool trained = false;
};

struct ModelConfig {
  std::size_t dim = 300;
  std::size_t senses = 3;
  std::size_t hidden = 150;
  EncoderKind encoder = EncoderKind::RecNN;
  double initialBeta = 1.0;
};

/// Complete model: vocabulary, embeddings, encoder, scorer and task heads.
/// Copyable; parameter slots are reached through accessors, never cached.
struct Model {
  Vocabulary vocab;
  EncoderKind encoder = EncoderKind::RecNN;
  SenseStore store;
  CompositionLayer comp;
  LstmCell lstm;
  PlausibilityScorer scorer;
  TaskHeads heads;
  /// Context window (tokens each side) used for sense selection; 0 = sentence.
  std::size_t contextWindow = 0;

  static Model initialize(Vocabulary vocab, const ModelConfig& cfg, std::uint64_t seed);

  std::size_t dim() const { return store.dim(); }
  std::size_t senses() const { return store.senses(); }

  /// Slots of the active encoder (empty for the additive encoder).
  std::vector<ParamSlot*> encoderSlots();
  /// Every stored parameter slot; the sense table appears once for n == 1.
  std::vector<ParamSlot*> allSlots();
  /// Embedding tables updated sparsely by row.
  bool isTable(const ParamSlot* slot) const;
};

/// Per-word input vectors for one sentence on a tape.
struct SentenceInputs {
  std::vector<Var> vectors;
  std::vector<std::size_t> senses;  // selected (argmax) sense per position
  std::vector<Tensor> contexts;
};

/// Builds per-word inputs under `mode`. Prior selection is a fixed gate; Hard
/// passes the argmax sense vector through a straight-through factor so the
/// selection layer (beta, centroids) still receives gradient; Soft mixes all
/// sense vectors by the soft-max probabilities. With `differentiableGate`
/// false, Hard and Soft treat the probabilities as constants.
SentenceInputs buildInputs(Tape& tape, Model& model, const Sentence& s, SenseMode mode,
                           bool differentiableGate = true);

/// Encodes a sentence on a tape with the model's encoder. RecNN requires a
/// tree whose leaf count equals the sentence length.
EncodedVars encodeInputs(Tape& tape, Model& model, std::span<const Var> inputs,
                         const ParseTree* tree);

}  // namespace sams
