#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sams {

struct GradCheckCase {
  std::string name;
  double maxRelError = 0.0;
  std::size_t parameters = 0;
  /// Smallest hinge argument (or 1 where there is no hinge); must stay well
  /// above 0 for the loss to be smooth around the sampled point.
  double kinkDistance = 1.0;
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  double maxRelError() const;
};

/// Central-difference check (h = 1e-5) of the tape gradients on small random
/// models: the generic hinge loss through a RecNN over a 4-leaf tree, the same
/// loss through the LSTM over a 6-step sequence, and the cosine cost through a
/// soft-gated siamese pair. Both multi-sense models use two senses.
GradCheckReport runGradCheck(std::size_t dim, std::size_t hidden, std::uint64_t seed);

}  // namespace sams
