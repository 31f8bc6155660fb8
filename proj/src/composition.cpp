#include "sams/composition.hpp"

#include <cmath>

namespace sams {

const char* encoderName(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::RecNN: return "recnn";
    case EncoderKind::Rnn: return "rnn";
    case EncoderKind::Additive: return "additive";
  }
  return "?";
}

EncoderKind parseEncoderKind(std::string_view name) {
  if (name == "recnn") return EncoderKind::RecNN;
  if (name == "rnn") return EncoderKind::Rnn;
  if (name == "additive") return EncoderKind::Additive;
  throw UsageError("ConfigError", "unknown encoder '" + std::string(name) + "'");
}

namespace {

void fillUniform(Tensor& t, double r, Rng& rng) {
  for (double& v : t.data()) v = uniform(rng, -r, r);
}

ParamSlot gateMatrix(const char* name, std::size_t d) { return ParamSlot(name, Tensor({d, 2 * d})); }
ParamSlot biasVector(const char* name, std::size_t d) { return ParamSlot(name, Tensor({d})); }

std::vector<Var> constants(Tape& tape, std::span<const Tensor> xs) {
  std::vector<Var> out;
  out.reserve(xs.size());
  for (const Tensor& x : xs) out.push_back(tape.constant(x));
  return out;
}

Encoding toEncoding(const Tape& tape, const EncodedVars& vars) {
  Encoding e;
  e.root = tape.value(vars.root);
  for (Var v : vars.nodes) e.nodeVectors.push_back(tape.value(v));
  return e;
}

}  // namespace

CompositionLayer CompositionLayer::zeros(std::size_t dim) {
  return CompositionLayer{gateMatrix("comp.W", dim), biasVector("comp.b", dim)};
}

CompositionLayer CompositionLayer::initialize(std::size_t dim, Rng& rng) {
  CompositionLayer layer = zeros(dim);
  fillUniform(layer.W.value, std::sqrt(6.0 / static_cast<double>(3 * dim)), rng);
  return layer;
}

LstmCell LstmCell::zeros(std::size_t d) {
  return LstmCell{gateMatrix("lstm.Wi", d), gateMatrix("lstm.Wf", d), gateMatrix("lstm.Wo", d),
                  gateMatrix("lstm.Wc", d), biasVector("lstm.bi", d), biasVector("lstm.bf", d),
                  biasVector("lstm.bo", d), biasVector("lstm.bc", d)};
}

LstmCell LstmCell::initialize(std::size_t dim, Rng& rng) {
  LstmCell cell = zeros(dim);
  const double r = 0.5 / static_cast<double>(dim);
  for (ParamSlot* w : {&cell.Wi, &cell.Wf, &cell.Wo, &cell.Wc}) fillUniform(w->value, r, rng);
  cell.bf.value.fill(1.0);
  return cell;
}

std::vector<ParamSlot*> LstmCell::slots() { return {&Wi, &Wf, &Wo, &Wc, &bi, &bf, &bo, &bc}; }

// ---------------------------------------------------------------------------
// Tape encoders

Var composePair(Tape& tape, Var x1, Var x2, CompositionLayer& layer) {
  if (tape.value(x1).size() != layer.dim() || tape.value(x2).size() != layer.dim()) {
    throw dimensionMismatch("composePair expects two vectors of size " + std::to_string(layer.dim()));
  }
  Var z = tape.concat(x1, x2);
  return tape.tanh(tape.add(tape.matvec(tape.param(layer.W), z), tape.param(layer.b)));
}

EncodedVars encodeRecNN(Tape& tape, std::span<const Var> leaves, const ParseTree& tree,
                        CompositionLayer& layer) {
  if (leaves.size() != tree.leafCount()) {
    throw UsageError("ShapeMismatch", std::to_string(leaves.size()) + " inputs for a tree with " +
                                          std::to_string(tree.leafCount()) + " leaves");
  }
  const auto& nodes = tree.nodes();
  std::vector<Var> out(nodes.size());
  EncodedVars enc;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.isLeaf()) {
      out[i] = leaves[static_cast<std::size_t>(n.position)];
    } else {
      out[i] = composePair(tape, out[static_cast<std::size_t>(n.left)],
                           out[static_cast<std::size_t>(n.right)], layer);
      enc.nodes.push_back(out[i]);
    }
  }
  enc.root = out[tree.root()];
  return enc;
}

std::pair<Var, Var> lstmStep(Tape& tape, Var x, Var hPrev, Var cPrev, LstmCell& cell) {
  const std::size_t d = cell.dim();
  if (tape.value(x).size() != d || tape.value(hPrev).size() != d || tape.value(cPrev).size() != d) {
    throw dimensionMismatch("lstmStep expects vectors of size " + std::to_string(d));
  }
  Var z = tape.concat(x, hPrev);
  auto gate = [&](ParamSlot& w, ParamSlot& b) {
    return tape.add(tape.matvec(tape.param(w), z), tape.param(b));
  };
  Var i = tape.sigmoid(gate(cell.Wi, cell.bi));
  Var f = tape.sigmoid(gate(cell.Wf, cell.bf));
  Var o = tape.sigmoid(gate(cell.Wo, cell.bo));
  Var candidate = tape.tanh(gate(cell.Wc, cell.bc));
  Var c = tape.add(tape.mul(f, cPrev), tape.mul(i, candidate));
  Var h = tape.mul(o, tape.tanh(c));
  return {h, c};
}

EncodedVars encodeRNN(Tape& tape, std::span<const Var> inputs, LstmCell& cell) {
  if (inputs.empty()) throw UsageError("EmptyInput", "encodeRNN needs at least one input");
  Var h = tape.constant(Tensor::zeros(cell.dim()));
  Var c = h;
  EncodedVars enc;
  for (Var x : inputs) {
    std::tie(h, c) = lstmStep(tape, x, h, c, cell);
    enc.nodes.push_back(h);
  }
  enc.root = h;
  return enc;
}

EncodedVars encodeAdditive(Tape& tape, std::span<const Var> inputs) {
  if (inputs.empty()) throw UsageError("EmptyInput", "encodeAdditive needs at least one input");
  EncodedVars enc;
  enc.root = tape.addN(inputs);
  return enc;
}

// ---------------------------------------------------------------------------
// Value-level wrappers

Tensor composePair(const Tensor& x1, const Tensor& x2, const CompositionLayer& layer) {
  Tape tape;
  CompositionLayer copy = layer;
  return tape.value(composePair(tape, tape.constant(x1), tape.constant(x2), copy));
}

Encoding encodeRecNN(std::span<const Tensor> leaves, const ParseTree& tree,
                     const CompositionLayer& layer) {
  Tape tape;
  CompositionLayer copy = layer;
  auto vars = constants(tape, leaves);
  return toEncoding(tape, encodeRecNN(tape, vars, tree, copy));
}

LstmState lstmStep(const Tensor& x, const Tensor& hPrev, const Tensor& cPrev, const LstmCell& cell) {
  Tape tape;
  LstmCell copy = cell;
  auto [h, c] =
      lstmStep(tape, tape.constant(x), tape.constant(hPrev), tape.constant(cPrev), copy);
  return {tape.value(h), tape.value(c)};
}

Encoding encodeRNN(std::span<const Tensor> inputs, const LstmCell& cell) {
  Tape tape;
  LstmCell copy = cell;
  auto vars = constants(tape, inputs);
  return toEncoding(tape, encodeRNN(tape, vars, copy));
}

Tensor averagePool(std::span<const Tensor> senseVectors) { return mean(senseVectors); }

}  // namespace sams
