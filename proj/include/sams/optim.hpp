#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sams/tensor.hpp"

namespace sams {

/// A trainable tensor together with its gradient and AdaDelta state.
struct ParamSlot {
  ParamSlot() = default;
  ParamSlot(std::string name, Tensor value);

  std::string name;
  Tensor value;
  Tensor grad;
  Tensor accumGradSq;
  Tensor accumUpdateSq;

  void zeroGrad() { grad.fill(0.0); }
  /// Clears the optimizer state (used when a model starts a new training phase).
  void resetState();
};

struct AdaDeltaConfig {
  double decayRho = 0.95;
  double epsilon = 1e-6;
  /// Multiplies the applied step; the update accumulator tracks the unscaled step.
  double scale = 1.0;

  void validate() const;
};

/// One AdaDelta update over every element of the slot; zeroes the gradient.
void adadeltaStep(ParamSlot& slot, const AdaDeltaConfig& cfg);

/// AdaDelta restricted to the listed rows of a matrix slot. Rows that are not
/// listed keep their value and their accumulators untouched, which is the usual
/// sparse treatment for embedding tables. Gradients of the listed rows are zeroed.
void adadeltaStepRows(ParamSlot& slot, std::span<const std::size_t> rows,
                      const AdaDeltaConfig& cfg);

/// Central-difference gradient verifier.
///
/// `slot.grad` must already hold the analytic gradient of `loss` at the current
/// parameter values. Every scalar parameter is perturbed by +/-h in turn and
/// restored afterwards. Returns the maximum over parameters of
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
double finiteDiffCheck(const std::function<double()>& loss, std::span<ParamSlot* const> slots,
                       double h);

}  // namespace sams
