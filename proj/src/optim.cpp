#include "sams/optim.hpp"

#include <algorithm>
#include <cmath>

namespace sams {

ParamSlot::ParamSlot(std::string n, Tensor v)
    : name(std::move(n)),
      value(std::move(v)),
      grad(value.shape()),
      accumGradSq(value.shape()),
      accumUpdateSq(value.shape()) {}

void ParamSlot::resetState() {
  grad.fill(0.0);
  accumGradSq.fill(0.0);
  accumUpdateSq.fill(0.0);
}

void AdaDeltaConfig::validate() const {
  if (!(decayRho > 0.0 && decayRho < 1.0)) throw UsageError("ConfigError", "rho must be in (0,1)");
  if (!(epsilon > 0.0)) throw UsageError("ConfigError", "epsilon must be positive");
  if (!(scale > 0.0)) throw UsageError("ConfigError", "scale must be positive");
}

namespace {

inline void updateElement(ParamSlot& s, std::size_t i, const AdaDeltaConfig& cfg) {
  const double g = s.grad[i];
  const double rho = cfg.decayRho;
  s.accumGradSq[i] = rho * s.accumGradSq[i] + (1.0 - rho) * g * g;
  const double delta =
      -std::sqrt(s.accumUpdateSq[i] + cfg.epsilon) / std::sqrt(s.accumGradSq[i] + cfg.epsilon) * g;
  s.accumUpdateSq[i] = rho * s.accumUpdateSq[i] + (1.0 - rho) * delta * delta;
  s.value[i] += cfg.scale * delta;
  s.grad[i] = 0.0;
}

}  // namespace

void adadeltaStep(ParamSlot& slot, const AdaDeltaConfig& cfg) {
  for (std::size_t i = 0; i < slot.value.size(); ++i) updateElement(slot, i, cfg);
}

void adadeltaStepRows(ParamSlot& slot, std::span<const std::size_t> rows,
                      const AdaDeltaConfig& cfg) {
  const std::size_t cols = slot.value.cols();
  for (std::size_t r : rows) {
    for (std::size_t c = 0; c < cols; ++c) updateElement(slot, r * cols + c, cfg);
  }
}

double finiteDiffCheck(const std::function<double()>& loss, std::span<ParamSlot* const> slots,
                       double h) {
  double worst = 0.0;
  for (ParamSlot* slot : slots) {
    for (std::size_t i = 0; i < slot->value.size(); ++i) {
      const double saved = slot->value[i];
      slot->value[i] = saved + h;
      const double plus = loss();
      slot->value[i] = saved - h;
      const double minus = loss();
      slot->value[i] = saved;
      const double numeric = (plus - minus) / (2.0 * h);
      const double analytic = slot->grad[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace sams
