#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sams/optim.hpp"
#include "sams/tensor.hpp"

namespace sams {

/// Rows of each table slot that received gradient, for sparse optimizer steps.
using TouchedRows = std::map<const ParamSlot*, std::set<std::size_t>>;

/// Parameter gradients produced by one backward pass, held apart from the
/// slots so independent examples can be differentiated concurrently and then
/// reduced into `ParamSlot::grad` in a fixed order.
class GradBuffer {
 public:
  void addDense(ParamSlot& slot, std::span<const double> g);
  void addRow(ParamSlot& slot, std::size_t row, std::span<const double> g);

  /// Adds every buffered gradient into its slot's `grad` and records touched rows.
  void flushInto(TouchedRows* touched = nullptr) const;
  void clear() { entries_.clear(); }
  bool empty() const { return entries_.empty(); }

 private:
  struct Entry {
    ParamSlot* slot = nullptr;
    std::vector<double> dense;
    std::map<std::size_t, std::vector<double>> rows;
  };
  Entry& entry(ParamSlot& slot);

  std::vector<Entry> entries_;
  std::unordered_map<const ParamSlot*, std::size_t> index_;
};

/// Handle to a node of a Tape.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode differentiation tape over vectors, matrices and scalars
/// (scalars are shape {1} tensors).
///
/// Nodes are appended in evaluation order, so a reverse sweep over the node
/// list is a valid topological order for backpropagation. Parameters enter
/// through `param`/`paramRow`; their gradients land in a GradBuffer.
class Tape {
 public:
  Var constant(Tensor value);
  Var scalar(double v) { return constant(Tensor::vector({v})); }
  /// Whole-slot parameter; repeated calls with the same slot share one node.
  Var param(ParamSlot& slot);
  /// One row of a matrix slot as a vector parameter.
  Var paramRow(ParamSlot& slot, std::size_t row);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double k);
  /// Scalar variable s times vector v.
  Var scaleBy(Var s, Var v);
  Var matvec(Var w, Var x);
  Var concat(Var a, Var b);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var relu(Var a);
  Var square(Var a);  // elementwise
  Var sqrt(Var a);    // elementwise, input must be positive
  Var dot(Var a, Var b);
  Var sum(Var a);
  Var cosine(Var a, Var b);
  Var softmax(Var a);
  Var element(Var a, std::size_t i);
  /// Packs scalar variables into one vector.
  Var stack(std::span<const Var> scalars);
  Var addN(std::span<const Var> xs);
  Var mean(std::span<const Var> xs);
  /// sum_i probs[i] * vecs[i].
  Var weightedSum(Var probs, std::span<const Var> vecs);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  double scalarValue(Var v) const { return nodes_[v.id].value[0]; }
  bool requiresGrad(Var v) const { return nodes_[v.id].requiresGrad; }
  std::size_t size() const { return nodes_.size(); }

  /// Backpropagates d(out)/d(.) with out a scalar, scaled by `seed`.
  void backward(Var out, GradBuffer& sink, double seed = 1.0);

 private:
  using BackFn = std::function<void(Tape&, std::size_t self)>;
  struct Node {
    Tensor value;
    Tensor grad;
    bool requiresGrad = false;
    BackFn back;
    ParamSlot* slot = nullptr;
    std::size_t row = 0;
    bool isRow = false;
  };

  Var push(Tensor value, bool requiresGrad, BackFn back);
  Tensor& gradOf(std::size_t id);
  bool rg(Var v) const { return nodes_[v.id].requiresGrad; }

  std::vector<Node> nodes_;
  std::unordered_map<const ParamSlot*, std::size_t> paramIds_;
  std::map<std::pair<const ParamSlot*, std::size_t>, std::size_t> rowIds_;
};

}  // namespace sams
