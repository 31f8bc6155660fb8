#include "sams/model.hpp"

#include <cmath>

namespace sams {

PlausibilityScorer PlausibilityScorer::zeros(std::size_t dim, std::size_t hidden) {
  if (hidden == 0) throw UsageError("ConfigError", "scorer hidden size must be positive");
  return PlausibilityScorer{ParamSlot("scorer.W1", Tensor({hidden, dim})),
                            ParamSlot("scorer.b1", Tensor({hidden})),
                            ParamSlot("scorer.u", Tensor({hidden})),
                            ParamSlot("scorer.b2", Tensor({1}))};
}

PlausibilityScorer PlausibilityScorer::initialize(std::size_t dim, std::size_t hidden, Rng& rng) {
  PlausibilityScorer s = zeros(dim, hidden);
  const double r1 = std::sqrt(6.0 / static_cast<double>(dim + hidden));
  for (double& v : s.W1.value.data()) v = uniform(rng, -r1, r1);
  const double r2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  for (double& v : s.u.value.data()) v = uniform(rng, -r2, r2);
  return s;
}

const char* senseModeName(SenseMode m) {
  switch (m) {
    case SenseMode::Ambiguous: return "ambiguous";
    case SenseMode::Prior: return "prior";
    case SenseMode::Hard: return "hard";
    case SenseMode::Soft: return "soft";
  }
  return "?";
}

SenseMode parseSenseMode(std::string_view name) {
  if (name == "ambiguous") return SenseMode::Ambiguous;
  if (name == "prior") return SenseMode::Prior;
  if (name == "hard" || name == "hardDD") return SenseMode::Hard;
  if (name == "soft" || name == "softDD") return SenseMode::Soft;
  throw UsageError("ConfigError", "unknown mode '" + std::string(name) + "'");
}

const char* costName(CostKind c) { return c == CostKind::Cosine ? "cosine" : "l2"; }

CostKind parseCostKind(std::string_view name) {
  if (name == "cosine") return CostKind::Cosine;
  if (name == "l2") return CostKind::L2;
  throw UsageError("ConfigError", "unknown cost '" + std::string(name) + "'");
}

double LogisticClassifier::probability(std::span<const double> features) const {
  if (features.size() != weights.size()) throw dimensionMismatch("logistic features");
  return sigmoid(dot(weights, features) + bias);
}

Model Model::initialize(Vocabulary vocab, const ModelConfig& cfg, std::uint64_t seed) {
  if (cfg.dim == 0 || cfg.senses == 0 || cfg.hidden == 0) {
    throw UsageError("ConfigError", "dim, senses and hidden must be positive");
  }
  Model m;
  Rng rng(deriveSeed(seed, {0x5e4d}));
  const std::size_t v = vocab.size();
  m.vocab = std::move(vocab);
  m.encoder = cfg.encoder;
  m.store = SenseStore::initialize(v, cfg.dim, cfg.senses, rng, cfg.initialBeta);
  if (cfg.encoder == EncoderKind::RecNN) m.comp = CompositionLayer::initialize(cfg.dim, rng);
  if (cfg.encoder == EncoderKind::Rnn) m.lstm = LstmCell::initialize(cfg.dim, rng);
  m.scorer = PlausibilityScorer::initialize(cfg.dim, cfg.hidden, rng);
  return m;
}

std::vector<ParamSlot*> Model::encoderSlots() {
  switch (encoder) {
    case EncoderKind::RecNN: return {&comp.W, &comp.b};
    case EncoderKind::Rnn: return lstm.slots();
    case EncoderKind::Additive: return {};
  }
  return {};
}

std::vector<ParamSlot*> Model::allSlots() {
  std::vector<ParamSlot*> out{&store.main};
  if (senses() > 1) out.push_back(&store.senseVecs);
  out.push_back(&store.centroids);
  out.push_back(&store.beta);
  for (ParamSlot* s : encoderSlots()) out.push_back(s);
  for (ParamSlot* s : scorer.slots()) out.push_back(s);
  out.push_back(&heads.cosine);
  return out;
}

bool Model::isTable(const ParamSlot* slot) const {
  return slot == &store.main || slot == &store.senseVecs || slot == &store.centroids;
}

namespace {

bool isZero(const Tensor& t) {
  for (double v : t.data()) {
    if (v != 0.0) return false;
  }
  return true;
}

// Soft-max over beta-scaled centroid cosines on the tape. Returns nullopt when
// the context is zero (the caller falls back to sense 0 / uniform weights).
std::optional<Var> gateProbabilities(Tape& tape, Model& model, WordId w, const Tensor& ctx,
                                     bool differentiable) {
  if (isZero(ctx)) return std::nullopt;
  SenseStore& st = model.store;
  if (!differentiable) {
    return tape.constant(senseProbabilities(st, w, ctx, st.betaValue()));
  }
  Var c = tape.constant(ctx);
  std::vector<Var> cos;
  for (std::size_t i = 0; i < st.senses(); ++i) {
    const std::size_t row = st.centroidRow(w, i);
    if (norm2(st.centroids.value.row(row)) == 0.0) {
      cos.push_back(tape.scalar(0.0));
    } else {
      cos.push_back(tape.cosine(c, tape.paramRow(st.centroids, row)));
    }
  }
  Var scores = tape.scaleBy(tape.param(st.beta), tape.stack(cos));
  return tape.softmax(scores);
}

}  // namespace

SentenceInputs buildInputs(Tape& tape, Model& model, const Sentence& s, SenseMode mode,
                           bool differentiableGate) {
  SenseStore& st = model.store;
  const std::size_t n = st.senses();
  SentenceInputs out;
  for (std::size_t pos = 0; pos < s.size(); ++pos) {
    const WordId w = s.tokens[pos];
    Tensor ctx = contextVector(s, pos, st.main.value, model.contextWindow);
    const std::size_t k = selectSense(st, w, ctx).senseIndex;
    out.senses.push_back(k);

    if (mode == SenseMode::Ambiguous || n == 1) {
      out.vectors.push_back(tape.paramRow(st.main, w));
    } else if (mode == SenseMode::Prior) {
      out.vectors.push_back(tape.paramRow(st.senseTable(), st.senseRow(w, k)));
    } else {
      auto probs = gateProbabilities(tape, model, w, ctx, differentiableGate);
      if (mode == SenseMode::Hard) {
        Var v = tape.paramRow(st.senseTable(), st.senseRow(w, k));
        if (probs && tape.requiresGrad(*probs)) {
          // Value stays exactly the selected vector; gradient reaches p_k.
          const double pk = tape.value(*probs)[k];
          v = tape.scaleBy(tape.scale(tape.element(*probs, k), 1.0 / pk), v);
        }
        out.vectors.push_back(v);
      } else {
        std::vector<Var> rows;
        for (std::size_t i = 0; i < n; ++i) {
          rows.push_back(tape.paramRow(st.senseTable(), st.senseRow(w, i)));
        }
        Var p = probs ? *probs : tape.constant(Tensor({n}, 1.0 / static_cast<double>(n)));
        out.vectors.push_back(tape.weightedSum(p, rows));
      }
    }
    out.contexts.push_back(std::move(ctx));
  }
  return out;
}

EncodedVars encodeInputs(Tape& tape, Model& model, std::span<const Var> inputs,
                         const ParseTree* tree) {
  switch (model.encoder) {
    case EncoderKind::RecNN: {
      if (tree == nullptr) throw UsageError("ModeMismatch", "the recnn encoder needs a parse tree");
      return encodeRecNN(tape, inputs, *tree, model.comp);
    }
    case EncoderKind::Rnn: return encodeRNN(tape, inputs, model.lstm);
    case EncoderKind::Additive: return encodeAdditive(tape, inputs);
  }
  throw UsageError("ConfigError", "unknown encoder");
}

}  // namespace sams
