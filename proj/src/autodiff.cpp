#include "sams/autodiff.hpp"

#include <cmath>

namespace sams {

// ---------------------------------------------------------------------------
// GradBuffer

GradBuffer::Entry& GradBuffer::entry(ParamSlot& slot) {
  auto it = index_.find(&slot);
  if (it != index_.end()) return entries_[it->second];
  index_.emplace(&slot, entries_.size());
  entries_.push_back(Entry{&slot, {}, {}});
  return entries_.back();
}

void GradBuffer::addDense(ParamSlot& slot, std::span<const double> g) {
  Entry& e = entry(slot);
  if (e.dense.empty()) e.dense.assign(slot.value.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) e.dense[i] += g[i];
}

void GradBuffer::addRow(ParamSlot& slot, std::size_t row, std::span<const double> g) {
  Entry& e = entry(slot);
  auto& dst = e.rows[row];
  if (dst.empty()) dst.assign(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
}

void GradBuffer::flushInto(TouchedRows* touched) const {
  for (const Entry& e : entries_) {
    ParamSlot& slot = *e.slot;
    if (!e.dense.empty()) {
      for (std::size_t i = 0; i < e.dense.size(); ++i) slot.grad[i] += e.dense[i];
      if (touched) {
        auto& rows = (*touched)[&slot];
        for (std::size_t r = 0; r < slot.value.rows(); ++r) rows.insert(r);
      }
    }
    for (const auto& [row, g] : e.rows) {
      axpy(1.0, g, slot.grad.row(row));
      if (touched) (*touched)[&slot].insert(row);
    }
  }
}

// ---------------------------------------------------------------------------
// Tape

Var Tape::push(Tensor value, bool requiresGrad, BackFn back) {
  Node n;
  n.value = std::move(value);
  n.requiresGrad = requiresGrad;
  if (requiresGrad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Tensor& Tape::gradOf(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() != n.value.size() || n.grad.shape() != n.value.shape()) {
    n.grad = Tensor(n.value.shape());
  }
  return n.grad;
}

Var Tape::constant(Tensor value) { return push(std::move(value), false, nullptr); }

Var Tape::param(ParamSlot& slot) {
  if (auto it = paramIds_.find(&slot); it != paramIds_.end()) return Var{it->second};
  Var v = push(slot.value, true, [](Tape&, std::size_t) {});
  nodes_[v.id].slot = &slot;
  paramIds_.emplace(&slot, v.id);
  return v;
}

Var Tape::paramRow(ParamSlot& slot, std::size_t row) {
  const auto key = std::make_pair(static_cast<const ParamSlot*>(&slot), row);
  if (auto it = rowIds_.find(key); it != rowIds_.end()) return Var{it->second};
  if (slot.value.rank() != 2 || row >= slot.value.rows()) {
    throw UsageError("IndexError", "row " + std::to_string(row) + " outside " + slot.name);
  }
  Var v = push(slot.value.rowTensor(row), true, [](Tape&, std::size_t) {});
  nodes_[v.id].slot = &slot;
  nodes_[v.id].row = row;
  nodes_[v.id].isRow = true;
  rowIds_.emplace(key, v.id);
  return v;
}

Var Tape::add(Var a, Var b) {
  Tensor out = value(a) + value(b);
  return push(std::move(out), rg(a) || rg(b), [a, b](Tape& t, std::size_t self) {
    const Tensor g = t.nodes_[self].grad;
    if (t.rg(a)) t.gradOf(a.id) += g;
    if (t.rg(b)) t.gradOf(b.id) += g;
  });
}

Var Tape::sub(Var a, Var b) {
  Tensor out = value(a) - value(b);
  return push(std::move(out), rg(a) || rg(b), [a, b](Tape& t, std::size_t self) {
    const Tensor g = t.nodes_[self].grad;
    if (t.rg(a)) t.gradOf(a.id) += g;
    if (t.rg(b)) axpy(-1.0, g.span(), t.gradOf(b.id).span());
  });
}

Var Tape::mul(Var a, Var b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  if (!va.sameShape(vb)) throw dimensionMismatch("mul");
  Tensor out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= vb[i];
  return push(std::move(out), rg(a) || rg(b), [a, b](Tape& t, std::size_t self) {
    const Tensor g = t.nodes_[self].grad;
    if (t.rg(a)) {
      Tensor& ga = t.gradOf(a.id);
      const Tensor& vb = t.value(b);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * vb[i];
    }
    if (t.rg(b)) {
      Tensor& gb = t.gradOf(b.id);
      const Tensor& va = t.value(a);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * va[i];
    }
  });
}

Var Tape::scale(Var a, double k) {
  return push(k * value(a), rg(a), [a, k](Tape& t, std::size_t self) {
    axpy(k, t.nodes_[self].grad.span(), t.gradOf(a.id).span());
  });
}

Var Tape::scaleBy(Var s, Var v) {
  if (value(s).size() != 1) throw dimensionMismatch("scaleBy expects a scalar");
  const double k = value(s)[0];
  return push(k * value(v), rg(s) || rg(v), [s, v](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    if (t.rg(s)) t.gradOf(s.id)[0] += sams::dot(g.span(), t.value(v).span());
    if (t.rg(v)) axpy(t.value(s)[0], g.span(), t.gradOf(v.id).span());
  });
}

Var Tape::matvec(Var w, Var x) {
  Tensor out = sams::matvec(value(w), value(x));
  return push(std::move(out), rg(w) || rg(x), [w, x](Tape& t, std::size_t self) {
    const Tensor g = t.nodes_[self].grad;
    const Tensor& vw = t.value(w);
    const Tensor& vx = t.value(x);
    if (t.rg(w)) {
      Tensor& gw = t.gradOf(w.id);
      for (std::size_t r = 0; r < vw.rows(); ++r) {
        if (g[r] != 0.0) axpy(g[r], vx.span(), gw.row(r));
      }
    }
    if (t.rg(x)) {
      Tensor& gx = t.gradOf(x.id);
      for (std::size_t r = 0; r < vw.rows(); ++r) {
        if (g[r] != 0.0) axpy(g[r], vw.row(r), gx.span());
      }
    }
  });
}

Var Tape::concat(Var a, Var b) {
  Tensor out = sams::concat(value(a), value(b));
  return push(std::move(out), rg(a) || rg(b), [a, b](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    const std::size_t na = t.value(a).size();
    if (t.rg(a)) axpy(1.0, g.span().subspan(0, na), t.gradOf(a.id).span());
    if (t.rg(b)) axpy(1.0, g.span().subspan(na), t.gradOf(b.id).span());
  });
}

Var Tape::tanh(Var a) {
  return push(tanhApply(value(a)), rg(a), [a](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& y = t.nodes_[self].value;
    Tensor& ga = t.gradOf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var Tape::sigmoid(Var a) {
  return push(sigmoidApply(value(a)), rg(a), [a](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& y = t.nodes_[self].value;
    Tensor& ga = t.gradOf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var Tape::relu(Var a) {
  Tensor out = value(a);
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return push(std::move(out), rg(a), [a](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& x = t.value(a);
    Tensor& ga = t.gradOf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (x[i] > 0.0) ga[i] += g[i];
    }
  });
}

Var Tape::square(Var a) {
  Tensor out = value(a);
  for (double& v : out.data()) v *= v;
  return push(std::move(out), rg(a), [a](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& x = t.value(a);
    Tensor& ga = t.gradOf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += 2.0 * x[i] * g[i];
  });
}

Var Tape::sqrt(Var a) {
  Tensor out = value(a);
  for (double& v : out.data()) {
    if (!(v > 0.0)) throw DataError("DomainError", "sqrt of a non-positive value");
    v = std::sqrt(v);
  }
  return push(std::move(out), rg(a), [a](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& y = t.nodes_[self].value;
    Tensor& ga = t.gradOf(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / (2.0 * y[i]);
  });
}

Var Tape::dot(Var a, Var b) {
  const double v = sams::dot(value(a).span(), value(b).span());
  return push(Tensor::vector({v}), rg(a) || rg(b), [a, b](Tape& t, std::size_t self) {
    const double g = t.nodes_[self].grad[0];
    if (t.rg(a)) axpy(g, t.value(b).span(), t.gradOf(a.id).span());
    if (t.rg(b)) axpy(g, t.value(a).span(), t.gradOf(b.id).span());
  });
}

Var Tape::sum(Var a) {
  double s = 0.0;
  for (double v : value(a).data()) s += v;
  return push(Tensor::vector({s}), rg(a), [a](Tape& t, std::size_t self) {
    const double g = t.nodes_[self].grad[0];
    for (double& v : t.gradOf(a.id).data()) v += g;
  });
}

Var Tape::cosine(Var a, Var b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  if (va.size() != vb.size()) throw dimensionMismatch("cosine");
  const double na = norm2(va.span());
  const double nb = norm2(vb.span());
  if (na == 0.0 || nb == 0.0) throw DataError("ZeroVector", "cosine of a zero vector");
  const double c = sams::dot(va.span(), vb.span()) / (na * nb);
  return push(Tensor::vector({c}), rg(a) || rg(b), [a, b, na, nb, c](Tape& t, std::size_t self) {
    const double g = t.nodes_[self].grad[0];
    const Tensor& va = t.value(a);
    const Tensor& vb = t.value(b);
    // d cos / d a = b / (|a||b|) - cos * a / |a|^2
    if (t.rg(a)) {
      Tensor& ga = t.gradOf(a.id);
      for (std::size_t i = 0; i < va.size(); ++i) {
        ga[i] += g * (vb[i] / (na * nb) - c * va[i] / (na * na));
      }
    }
    if (t.rg(b)) {
      Tensor& gb = t.gradOf(b.id);
      for (std::size_t i = 0; i < vb.size(); ++i) {
        gb[i] += g * (va[i] / (na * nb) - c * vb[i] / (nb * nb));
      }
    }
  });
}

Var Tape::softmax(Var a) {
  return push(sams::softmax(value(a)), rg(a), [a](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& y = t.nodes_[self].value;
    const double gy = sams::dot(g.span(), y.span());
    Tensor& ga = t.gradOf(a.id);
    for (std::size_t i = 0; i < y.size(); ++i) ga[i] += y[i] * (g[i] - gy);
  });
}

Var Tape::element(Var a, std::size_t i) {
  if (i >= value(a).size()) throw UsageError("IndexError", "element out of range");
  return push(Tensor::vector({value(a)[i]}), rg(a), [a, i](Tape& t, std::size_t self) {
    t.gradOf(a.id)[i] += t.nodes_[self].grad[0];
  });
}

Var Tape::stack(std::span<const Var> scalars) {
  std::vector<double> vals;
  bool any = false;
  for (Var s : scalars) {
    vals.push_back(value(s)[0]);
    any = any || rg(s);
  }
  std::vector<Var> parents(scalars.begin(), scalars.end());
  return push(Tensor::vector(std::move(vals)), any,
              [parents = std::move(parents)](Tape& t, std::size_t self) {
                const Tensor& g = t.nodes_[self].grad;
                for (std::size_t i = 0; i < parents.size(); ++i) {
                  if (t.rg(parents[i])) t.gradOf(parents[i].id)[0] += g[i];
                }
              });
}

Var Tape::addN(std::span<const Var> xs) {
  if (xs.empty()) throw UsageError("EmptyInput", "addN of nothing");
  Tensor out = value(xs[0]);
  bool any = rg(xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    out += value(xs[i]);
    any = any || rg(xs[i]);
  }
  std::vector<Var> parents(xs.begin(), xs.end());
  return push(std::move(out), any, [parents = std::move(parents)](Tape& t, std::size_t self) {
    const Tensor g = t.nodes_[self].grad;
    for (Var p : parents) {
      if (t.rg(p)) t.gradOf(p.id) += g;
    }
  });
}

Var Tape::mean(std::span<const Var> xs) {
  return scale(addN(xs), 1.0 / static_cast<double>(xs.size()));
}

Var Tape::weightedSum(Var probs, std::span<const Var> vecs) {
  const Tensor& p = value(probs);
  if (p.size() != vecs.size() || vecs.empty()) throw dimensionMismatch("weightedSum");
  Tensor out(value(vecs[0]).shape());
  bool any = rg(probs);
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    axpy(p[i], value(vecs[i]).span(), out.span());
    any = any || rg(vecs[i]);
  }
  std::vector<Var> parents(vecs.begin(), vecs.end());
  return push(std::move(out), any,
              [probs, parents = std::move(parents)](Tape& t, std::size_t self) {
                const Tensor g = t.nodes_[self].grad;
                const Tensor p = t.value(probs);
                for (std::size_t i = 0; i < parents.size(); ++i) {
                  if (t.rg(probs)) {
                    t.gradOf(probs.id)[i] += sams::dot(g.span(), t.value(parents[i]).span());
                  }
                  if (t.rg(parents[i])) axpy(p[i], g.span(), t.gradOf(parents[i].id).span());
                }
              });
}

void Tape::backward(Var out, GradBuffer& sink, double seed) {
  if (value(out).size() != 1) throw dimensionMismatch("backward needs a scalar output");
  for (Node& n : nodes_) n.grad = Tensor();
  if (!nodes_[out.id].requiresGrad) return;
  gradOf(out.id)[0] = seed;
  for (std::size_t id = out.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requiresGrad || n.grad.size() == 0) continue;
    if (n.slot != nullptr) {
      if (n.isRow) {
        sink.addRow(*n.slot, n.row, n.grad.span());
      } else {
        sink.addDense(*n.slot, n.grad.span());
      }
      continue;
    }
    n.back(*this, id);
  }
}

}  // namespace sams
