#include "sams/senses.hpp"

#include <cmath>

namespace sams {

SenseStore::SenseStore(std::size_t vocabSize, std::size_t dim, std::size_t senses)
    : main("main", Tensor({vocabSize, dim})),
      centroids("centroid", Tensor({vocabSize * senses, dim})),
      beta("beta", Tensor::vector({1.0})),
      centroidCounts(vocabSize * senses, 0),
      vocabSize_(vocabSize),
      dim_(dim),
      senses_(senses) {
  if (vocabSize == 0 || dim == 0 || senses == 0) {
    throw UsageError("ConfigError", "vocabulary size, dimension and senses must be positive");
  }
  if (senses > 1) senseVecs = ParamSlot("sense", Tensor({vocabSize * senses, dim}));
}

SenseStore SenseStore::initialize(std::size_t vocabSize, std::size_t dim, std::size_t senses,
                                  Rng& rng, double initialBeta) {
  SenseStore s(vocabSize, dim, senses);
  const double r = 0.5 / static_cast<double>(dim);
  for (double& v : s.main.value.data()) v = uniform(rng, -r, r);
  if (senses > 1) {
    for (std::size_t w = 0; w < vocabSize; ++w) {
      for (std::size_t i = 0; i < senses; ++i) {
        auto dst = s.senseVecs.value.row(w * senses + i);
        auto src = s.main.value.row(w);
        for (std::size_t k = 0; k < dim; ++k) dst[k] = src[k] + uniform(rng, -r, r);
      }
    }
  }
  for (std::size_t row = 0; row < vocabSize * senses; ++row) {
    auto c = s.centroids.value.row(row);
    for (double& v : c) v = uniform(rng, -1.0, 1.0);
    const double n = norm2(c);
    for (double& v : c) v /= n;
  }
  s.beta.value[0] = initialBeta;
  return s;
}

MultiSenseEntry SenseStore::entry(WordId w) const {
  MultiSenseEntry e;
  e.main = main.value.rowTensor(w);
  for (std::size_t i = 0; i < senses_; ++i) {
    e.centroids.push_back(centroids.value.rowTensor(centroidRow(w, i)));
    e.senseVecs.push_back(senseVector(w, i));
    e.centroidCounts.push_back(centroidCounts[centroidRow(w, i)]);
  }
  return e;
}

void SenseStore::updateCentroid(WordId w, std::size_t senseIndex, const Tensor& context) {
  const std::size_t row = centroidRow(w, senseIndex);
  axpy(1.0, context.span(), centroids.value.row(row));
  ++centroidCounts[row];
}

namespace {

double safeCosine(std::span<const double> a, std::span<const double> b) {
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

bool isZero(const Tensor& t) {
  for (double v : t.data()) {
    if (v != 0.0) return false;
  }
  return true;
}

Tensor probsFromCosines(const std::vector<double>& cos, bool zeroContext, double beta) {
  const std::size_t n = cos.size();
  if (zeroContext) return Tensor({n}, 1.0 / static_cast<double>(n));
  Tensor scores = Tensor::zeros(n);
  for (std::size_t i = 0; i < n; ++i) scores[i] = beta * cos[i];
  return softmax(scores);
}

}  // namespace

std::vector<double> centroidCosines(const Tensor& table, std::size_t first, std::size_t n,
                                    const Tensor& context) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = safeCosine(context.span(), table.row(first + i));
  return out;
}

std::size_t argmaxLowest(std::span<const double> xs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] > xs[best]) best = i;
  }
  return best;
}

SenseChoice selectSense(const MultiSenseEntry& entry, const Tensor& context) {
  std::vector<double> cos;
  for (const Tensor& c : entry.centroids) cos.push_back(safeCosine(context.span(), c.span()));
  SenseChoice out;
  out.senseIndex = argmaxLowest(cos);
  out.score = cos[out.senseIndex];
  return out;
}

SenseChoice selectSense(const SenseStore& store, WordId w, const Tensor& context) {
  auto cos = centroidCosines(store.centroids.value, store.centroidRow(w, 0), store.senses(), context);
  SenseChoice out;
  out.word = w;
  out.senseIndex = argmaxLowest(cos);
  out.score = cos[out.senseIndex];
  return out;
}

MultiSenseEntry updateCentroid(MultiSenseEntry entry, std::size_t senseIndex,
                               const Tensor& context) {
  entry.centroids.at(senseIndex) += context;
  ++entry.centroidCounts.at(senseIndex);
  return entry;
}

Tensor senseProbabilities(const MultiSenseEntry& entry, const Tensor& context, double beta) {
  std::vector<double> cos;
  for (const Tensor& c : entry.centroids) cos.push_back(safeCosine(context.span(), c.span()));
  return probsFromCosines(cos, isZero(context), beta);
}

Tensor senseProbabilities(const SenseStore& store, WordId w, const Tensor& context, double beta) {
  auto cos = centroidCosines(store.centroids.value, store.centroidRow(w, 0), store.senses(), context);
  return probsFromCosines(cos, isZero(context), beta);
}

Tensor softSenseVector(const MultiSenseEntry& entry, const Tensor& probs) {
  if (probs.size() != entry.senseVecs.size()) throw dimensionMismatch("softSenseVector");
  Tensor out = Tensor::zeros(entry.senseVecs.front().size());
  for (std::size_t i = 0; i < probs.size(); ++i) axpy(probs[i], entry.senseVecs[i].span(), out.span());
  return out;
}

PriorChoice priorDisambiguate(const Sentence& s, const SenseStore& store, std::size_t window) {
  PriorChoice out;
  for (std::size_t pos = 0; pos < s.size(); ++pos) {
    const Tensor ctx = contextVector(s, pos, store.main.value, window);
    const std::size_t k = selectSense(store, s.tokens[pos], ctx).senseIndex;
    out.senses.push_back(k);
    out.vectors.push_back(store.senseVector(s.tokens[pos], k));
  }
  return out;
}

}  // namespace sams
