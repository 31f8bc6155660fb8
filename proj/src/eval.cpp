#include "sams/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sams/error.hpp"

namespace sams {

namespace {

constexpr std::string_view kOpen = "<t>";
constexpr std::string_view kClose = "</t>";

std::vector<std::string_view> splitTabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

void markedContext(std::string_view field, std::vector<std::string>& tokens, std::size_t& position) {
  tokens = splitTokens(field);
  std::size_t found = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string& t = tokens[i];
    if (t.size() > kOpen.size() + kClose.size() && t.starts_with(kOpen) && t.ends_with(kClose)) {
      t = t.substr(kOpen.size(), t.size() - kOpen.size() - kClose.size());
      position = i;
      ++found;
    }
  }
  if (found != 1) throw DataError("FormatError", "context must mark its target exactly once");
}

Tensor sideContext(const Model& model, const std::vector<std::string>& tokens, std::size_t position,
                   std::size_t window, WordId& target) {
  const Sentence s = encodeSentence(model.vocab, tokens);
  target = s.tokens[position];
  return contextVector(s, position, model.store.main.value, window);
}

double safeCosine(std::span<const double> a, std::span<const double> b) {
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

std::vector<double> averageRanks(std::span<const double> xs) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

SimilarityItem parseSimilarityItem(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto f = splitTabs(line);
  if (f.size() != 5) throw DataError("FormatError", "similarity rows need 5 tab-separated fields");
  SimilarityItem item;
  item.word1 = std::string(f[0]);
  item.word2 = std::string(f[1]);
  markedContext(f[2], item.context1, item.position1);
  markedContext(f[3], item.context2, item.position2);
  try {
    std::size_t used = 0;
    const std::string score(f[4]);
    item.humanScore = std::stod(score, &used);
    if (used != score.size() || !std::isfinite(item.humanScore)) throw std::invalid_argument(score);
  } catch (const std::exception&) {
    throw DataError("FormatError", "bad similarity score '" + std::string(f[4]) + "'");
  }
  return item;
}

std::vector<SimilarityItem> readSimilarityItems(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("IoError", "cannot read " + path);
  std::vector<SimilarityItem> items;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (splitTokens(line).empty()) continue;
    try {
      items.push_back(parseSimilarityItem(line));
    } catch (const DataError& e) {
      const std::string msg = e.what();
      throw DataError(e.kind(), path + ":" + std::to_string(lineNo) + ": " + msg.substr(e.kind().size() + 2));
    }
  }
  return items;
}

std::string formatReports(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  for (const auto& r : reports) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", r.value);
    out << r.metric << '\t' << buf << '\t' << r.n << '\n';
  }
  return out.str();
}

double globalSim(const std::string& w1, const std::string& w2, const Model& model) {
  const auto& main = model.store.main.value;
  return safeCosine(main.row(model.vocab.id(w1)), main.row(model.vocab.id(w2)));
}

double localSim(const SimilarityItem& item, const Model& model, std::size_t window) {
  WordId a = 0, b = 0;
  const Tensor c1 = sideContext(model, item.context1, item.position1, window, a);
  const Tensor c2 = sideContext(model, item.context2, item.position2, window, b);
  const auto s1 = selectSense(model.store, a, c1).senseIndex;
  const auto s2 = selectSense(model.store, b, c2).senseIndex;
  const auto& table = model.store.senseTable().value;
  return safeCosine(table.row(model.store.senseRow(a, s1)), table.row(model.store.senseRow(b, s2)));
}

double avgSim(const SimilarityItem& item, const Model& model, std::size_t window) {
  WordId a = 0, b = 0;
  const Tensor c1 = sideContext(model, item.context1, item.position1, window, a);
  const Tensor c2 = sideContext(model, item.context2, item.position2, window, b);
  const double beta = model.store.betaValue();
  const auto e1 = model.store.entry(a);
  const auto e2 = model.store.entry(b);
  const Tensor v1 = softSenseVector(e1, senseProbabilities(e1, c1, beta));
  const Tensor v2 = softSenseVector(e2, senseProbabilities(e2, c2, beta));
  return safeCosine(v1.span(), v2.span());
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw UsageError("LengthMismatch", "spearman inputs differ in length");
  if (xs.size() < 2) throw DataError("DegenerateInput", "spearman needs at least two items");
  const auto rx = averageRanks(xs);
  const auto ry = averageRanks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("DegenerateInput", "spearman input is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

VectorSpace parseVectorSpace(std::string_view name) {
  if (name == "main") return VectorSpace::Main;
  if (name == "sense") return VectorSpace::Sense;
  throw UsageError("ConfigError", "unknown space '" + std::string(name) + "'");
}

std::vector<Neighbor> nearestNeighbors(const Model& model, const std::string& word, std::size_t k,
                                       VectorSpace space, std::size_t senseIndex) {
  if (k == 0) throw UsageError("ConfigError", "k must be at least 1");
  if (!model.vocab.contains(word) || model.vocab.id(word) == Vocabulary::kUnk) {
    throw DataError("UnknownWord", "'" + word + "' is not in the vocabulary");
  }
  const WordId q = model.vocab.id(word);
  const auto& store = model.store;
  const std::size_t n = space == VectorSpace::Sense ? store.senses() : 1;
  if (senseIndex >= n) throw UsageError("ConfigError", "sense index out of range");
  const auto& table = space == VectorSpace::Sense ? store.senseTable().value : store.main.value;
  const auto rowOf = [&](WordId w, std::size_t i) {
    return space == VectorSpace::Sense ? store.senseRow(w, i) : static_cast<std::size_t>(w);
  };
  const auto query = table.row(rowOf(q, senseIndex));
  if (norm2(query) == 0.0) throw DataError("ZeroVector", "query vector is zero");

  std::vector<Neighbor> all;
  for (WordId w = 1; w < store.vocabSize(); ++w) {
    if (w == q) continue;
    for (std::size_t i = 0; i < n; ++i) {
      all.push_back(Neighbor{w, i, safeCosine(query, table.row(rowOf(w, i)))});
    }
  }
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      if (a.score != b.score) return a.score > b.score;
                      if (a.word != b.word) return a.word < b.word;
                      return a.sense < b.sense;
                    });
  all.resize(keep);
  return all;
}

AccuracyF1 accuracyF1(std::span<const int> preds, std::span<const int> gold) {
  if (preds.size() != gold.size()) throw UsageError("LengthMismatch", "predictions and labels differ in length");
  if (preds.empty()) throw DataError("EmptyDataset", "no labels to score");
  std::size_t correct = 0, tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    correct += preds[i] == gold[i];
    if (preds[i] == 1 && gold[i] == 1) ++tp;
    if (preds[i] == 1 && gold[i] != 1) ++fp;
    if (preds[i] != 1 && gold[i] == 1) ++fn;
  }
  AccuracyF1 r;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(preds.size());
  if (tp + fp > 0 && tp > 0) {
    const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double rc = static_cast<double>(tp) / static_cast<double>(tp + fn);
    r.f1 = 2.0 * p * rc / (p + rc);
  }
  return r;
}

std::vector<EvalReport> evaluateSimilarity(const Model& model,
                                           const std::vector<SimilarityItem>& items,
                                           const std::vector<std::string>& metrics,
                                           std::size_t window) {
  if (items.empty()) throw DataError("EmptyDataset", "no similarity items");
  std::vector<double> human;
  for (const auto& it : items) human.push_back(it.humanScore);
  std::vector<EvalReport> out;
  for (const auto& m : metrics) {
    std::vector<double> sims;
    for (const auto& it : items) {
      if (m == "global") {
        sims.push_back(globalSim(it.word1, it.word2, model));
      } else if (m == "local") {
        sims.push_back(localSim(it, model, window));
      } else if (m == "avg") {
        sims.push_back(avgSim(it, model, window));
      } else {
        throw UsageError("ConfigError", "unknown metric '" + m + "'");
      }
    }
    out.push_back(EvalReport{m + "Sim", spearman(sims, human), items.size()});
  }
  return out;
}

std::vector<EvalReport> evaluateParaphrase(Model& model, const std::vector<ParaphrasePair>& pairs,
                                           bool ensemble) {
  if (pairs.empty()) throw DataError("EmptyDataset", "no paraphrase pairs");
  std::vector<int> preds, gold;
  for (const auto& p : pairs) {
    preds.push_back(predictParaphrase(model, p, ensemble).label);
    gold.push_back(p.label);
  }
  const auto r = accuracyF1(preds, gold);
  return {EvalReport{"accuracy", r.accuracy, pairs.size()}, EvalReport{"f1", r.f1, pairs.size()}};
}

}  // namespace sams
