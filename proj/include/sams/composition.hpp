#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sams/autodiff.hpp"
#include "sams/corpus.hpp"
#include "sams/rng.hpp"

namespace sams {

enum class EncoderKind { RecNN, Rnn, Additive };

const char* encoderName(EncoderKind kind);
EncoderKind parseEncoderKind(std::string_view name);

/// p = tanh(W [x1; x2] + b), shared by every node of the tree.
struct CompositionLayer {
  ParamSlot W;  // d x 2d
  ParamSlot b;  // d

  static CompositionLayer zeros(std::size_t dim);
  /// Glorot-uniform W, zero b.
  static CompositionLayer initialize(std::size_t dim, Rng& rng);
  std::size_t dim() const { return b.value.size(); }
};

/// Standard LSTM cell whose gates act on [x_t; h_{t-1}].
struct LstmCell {
  ParamSlot Wi, Wf, Wo, Wc;  // d x 2d
  ParamSlot bi, bf, bo, bc;  // d

  static LstmCell zeros(std::size_t dim);
  /// Weights uniform in [-0.5/d, 0.5/d], forget bias +1, other biases 0.
  static LstmCell initialize(std::size_t dim, Rng& rng);
  std::size_t dim() const { return bi.value.size(); }
  std::vector<ParamSlot*> slots();
};

/// Output of a sentence encoder.
struct Encoding {
  Tensor root;
  std::vector<Tensor> nodeVectors;  // internal nodes (post-order) or LSTM states
  std::optional<Tensor> pooled;
};

// Value-level encoders.
Tensor composePair(const Tensor& x1, const Tensor& x2, const CompositionLayer& layer);
Encoding encodeRecNN(std::span<const Tensor> leaves, const ParseTree& tree,
                     const CompositionLayer& layer);
struct LstmState {
  Tensor h;
  Tensor c;
};
LstmState lstmStep(const Tensor& x, const Tensor& hPrev, const Tensor& cPrev, const LstmCell& cell);
Encoding encodeRNN(std::span<const Tensor> inputs, const LstmCell& cell);
/// Elementwise mean; throws EmptyInput for an empty sequence.
Tensor averagePool(std::span<const Tensor> senseVectors);

// Differentiable encoders on a tape. Parameters enter through Tape::param.
struct EncodedVars {
  Var root;
  std::vector<Var> nodes;
};

Var composePair(Tape& tape, Var x1, Var x2, CompositionLayer& layer);
EncodedVars encodeRecNN(Tape& tape, std::span<const Var> leaves, const ParseTree& tree,
                        CompositionLayer& layer);
std::pair<Var, Var> lstmStep(Tape& tape, Var x, Var hPrev, Var cPrev, LstmCell& cell);
EncodedVars encodeRNN(Tape& tape, std::span<const Var> inputs, LstmCell& cell);
/// Parameter-free baseline: the sum of the input vectors.
EncodedVars encodeAdditive(Tape& tape, std::span<const Var> inputs);

}  // namespace sams
