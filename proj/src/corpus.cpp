#include "sams/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

namespace sams {

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() { add(std::string(kUnkToken), 0); }

void Vocabulary::add(std::string token, std::uint64_t count) {
  if (ids_.count(token)) throw DataError("FormatError", "duplicate vocabulary token " + token);
  ids_.emplace(token, static_cast<WordId>(tokens_.size()));
  tokens_.push_back(std::move(token));
  counts_.push_back(count);
}

Vocabulary Vocabulary::fromCounts(const std::unordered_map<std::string, std::uint64_t>& counts,
                                  std::uint64_t minCount) {
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  std::uint64_t unk = 0;
  for (const auto& [tok, c] : counts) {
    if (tok == kUnkToken) {
      unk += c;
    } else if (c >= minCount) {
      kept.emplace_back(tok, c);
    } else {
      unk += c;
    }
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocabulary v;
  v.counts_[kUnk] = unk;
  for (auto& [tok, c] : kept) v.add(tok, c);
  return v;
}

Vocabulary Vocabulary::fromRows(std::vector<std::pair<std::string, std::uint64_t>> rows) {
  if (rows.empty() || rows.front().first != kUnkToken) {
    throw DataError("FormatError", "vocabulary must start with " + std::string(kUnkToken));
  }
  Vocabulary v;
  v.counts_[kUnk] = rows.front().second;
  for (std::size_t i = 1; i < rows.size(); ++i) v.add(std::move(rows[i].first), rows[i].second);
  return v;
}

WordId Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.count(std::string(token)) > 0;
}

std::vector<std::string> splitTokens(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

Sentence encodeSentence(const Vocabulary& vocab, std::span<const std::string> tokens) {
  Sentence s;
  s.tokens.reserve(tokens.size());
  for (const auto& t : tokens) s.tokens.push_back(vocab.id(t));
  return s;
}

namespace {

std::ifstream openInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("IoError", "cannot read " + path);
  return in;
}

}  // namespace

Vocabulary buildVocab(const std::string& corpusPath, std::uint64_t minCount) {
  if (minCount == 0) throw UsageError("ConfigError", "minCount must be positive");
  auto in = openInput(corpusPath);
  std::unordered_map<std::string, std::uint64_t> counts;
  std::string line;
  std::size_t total = 0;
  while (std::getline(in, line)) {
    for (auto& tok : splitTokens(line)) {
      ++counts[tok];
      ++total;
    }
  }
  if (total == 0) throw DataError("EmptyCorpus", corpusPath + " contains no tokens");
  return Vocabulary::fromCounts(counts, minCount);
}

std::vector<Sentence> readCorpus(const std::string& corpusPath, const Vocabulary& vocab,
                                 std::size_t maxLength) {
  auto in = openInput(corpusPath);
  std::vector<Sentence> out;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = splitTokens(line);
    if (toks.empty()) continue;
    if (maxLength > 0 && toks.size() > maxLength) toks.resize(maxLength);
    out.push_back(encodeSentence(vocab, toks));
  }
  return out;
}

// ---------------------------------------------------------------------------
// ParseTree

class TreeBuilder {
 public:
  int leaf(int position) {
    tree_.nodes_.push_back({-1, -1, position});
    ++tree_.leafCount_;
    return static_cast<int>(tree_.nodes_.size()) - 1;
  }
  int join(int l, int r) {
    tree_.nodes_.push_back({l, r, -1});
    return static_cast<int>(tree_.nodes_.size()) - 1;
  }
  ParseTree finish() { return std::move(tree_); }

 private:
  ParseTree tree_;
};

ParseTree ParseTree::leaf() {
  TreeBuilder b;
  b.leaf(0);
  return b.finish();
}

ParseTree ParseTree::rightBranching(std::size_t n) {
  if (n == 0) throw UsageError("EmptyInput", "tree over zero leaves");
  TreeBuilder b;
  // Post-order for a right-branching tree: all leaves first, then joins from
  // the bottom right upwards.
  std::vector<int> leaves;
  for (std::size_t i = 0; i < n; ++i) leaves.push_back(b.leaf(static_cast<int>(i)));
  int acc = leaves.back();
  for (std::size_t i = n - 1; i-- > 0;) acc = b.join(leaves[i], acc);
  return b.finish();
}

ParseTree ParseTree::leftBranching(std::size_t n) {
  if (n == 0) throw UsageError("EmptyInput", "tree over zero leaves");
  TreeBuilder b;
  int acc = b.leaf(0);
  for (std::size_t i = 1; i < n; ++i) acc = b.join(acc, b.leaf(static_cast<int>(i)));
  return b.finish();
}

std::vector<int> ParseTree::inOrderLeaves() const {
  std::vector<int> out;
  std::function<void(int)> walk = [&](int id) {
    const Node& n = nodes_[id];
    if (n.isLeaf()) {
      out.push_back(n.position);
      return;
    }
    walk(n.left);
    walk(n.right);
  };
  if (!nodes_.empty()) walk(static_cast<int>(root()));
  return out;
}

std::string ParseTree::render(std::span<const std::string> labels) const {
  std::function<std::string(int)> walk = [&](int id) -> std::string {
    const Node& n = nodes_[id];
    if (n.isLeaf()) return "( " + labels[n.position] + " )";
    return "( " + walk(n.left) + " " + walk(n.right) + " )";
  };
  return nodes_.empty() ? std::string() : walk(static_cast<int>(root()));
}

namespace {

// Intermediate n-ary tree produced by the bracket reader.
struct RawNode {
  std::string token;  // non-empty for leaves
  std::vector<std::unique_ptr<RawNode>> kids;
};

class BracketReader {
 public:
  explicit BracketReader(std::string_view text) : text_(text) {}

  std::unique_ptr<RawNode> readTop() {
    skipSpace();
    auto node = readNode();
    skipSpace();
    if (pos_ != text_.size()) fail("trailing characters after the tree");
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("ParseError", what + " at column " + std::to_string(pos_));
  }

  void skipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::unique_ptr<RawNode> readNode() {
    if (pos_ >= text_.size() || text_[pos_] != '(') fail("expected '('");
    ++pos_;
    auto node = std::make_unique<RawNode>();
    for (;;) {
      skipSpace();
      if (pos_ >= text_.size()) fail("unbalanced brackets");
      const char c = text_[pos_];
      if (c == ')') {
        ++pos_;
        break;
      }
      if (c == '(') {
        node->kids.push_back(readNode());
        continue;
      }
      std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
             !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
      auto leaf = std::make_unique<RawNode>();
      leaf->token = std::string(text_.substr(start, pos_ - start));
      node->kids.push_back(std::move(leaf));
    }
    if (node->kids.empty()) fail("empty bracket");
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int emit(const RawNode& raw, TreeBuilder& b, std::vector<std::string>& tokens) {
  if (!raw.token.empty()) {
    tokens.push_back(raw.token);
    return b.leaf(static_cast<int>(tokens.size()) - 1);
  }
  if (raw.kids.size() == 1) return emit(*raw.kids.front(), b, tokens);
  // Right-binarize: children are emitted left to right so leaf positions stay
  // in order, then folded pairwise from the right.
  std::vector<int> ids;
  for (const auto& k : raw.kids) ids.push_back(emit(*k, b, tokens));
  int acc = ids.back();
  for (std::size_t i = ids.size() - 1; i-- > 0;) acc = b.join(ids[i], acc);
  return acc;
}

}  // namespace

ParsedTree loadTree(std::string_view line) {
  BracketReader reader(line);
  auto raw = reader.readTop();
  TreeBuilder b;
  ParsedTree out;
  emit(*raw, b, out.tokens);
  out.tree = b.finish();
  return out;
}

void checkTreeMatches(const ParseTree& tree, std::size_t length) {
  if (tree.leafCount() != length) {
    throw DataError("ParseError", "tree has " + std::to_string(tree.leafCount()) +
                                      " leaves but the sentence has " + std::to_string(length) +
                                      " tokens");
  }
}

std::vector<ParsedTree> readTrees(const std::string& path) {
  auto in = openInput(path);
  std::vector<ParsedTree> out;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (splitTokens(line).empty()) continue;
    try {
      out.push_back(loadTree(line));
    } catch (const DataError& e) {
      throw DataError("ParseError", path + ":" + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corruption

Corrupter::Corrupter(const Vocabulary& vocab, SubstituteSampling sampling) {
  double total = 0.0;
  for (WordId id = 0; id < vocab.size(); ++id) {
    if (id == Vocabulary::kUnk) continue;
    const double w =
        sampling == SubstituteSampling::Unigram ? static_cast<double>(vocab.count(id)) : 1.0;
    if (w <= 0.0) continue;
    total += w;
    candidates_.push_back(id);
    cumulative_.push_back(total);
  }
}

WordId Corrupter::sampleWord(Rng& rng) const {
  const double u = uniform(rng, 0.0, cumulative_.back());
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return candidates_[static_cast<std::size_t>(it - cumulative_.begin())];
}

Corrupter::Substitution Corrupter::substitute(const Sentence& s, Rng& rng) const {
  if (s.size() == 0) throw UsageError("EmptyInput", "cannot corrupt an empty sentence");
  if (candidates_.size() < 2) {
    throw DataError("VocabularyTooSmall", "substitution needs at least two sampleable words");
  }
  const std::size_t pos = uniformIndex(rng, s.size());
  Substitution out{s, pos};
  WordId w;
  do {
    w = sampleWord(rng);
  } while (w == s.tokens[pos]);
  out.sentence.tokens[pos] = w;
  return out;
}

std::optional<Sentence> Corrupter::shuffle(const Sentence& s, Rng& rng) const {
  if (s.size() < 2) throw DataError("TooShort", "shuffling needs at least two tokens");
  const bool allSame =
      std::all_of(s.tokens.begin(), s.tokens.end(), [&](WordId w) { return w == s.tokens[0]; });
  if (allSame) return std::nullopt;
  Sentence out = s;
  do {
    out = s;
    for (std::size_t i = out.size() - 1; i > 0; --i) {
      std::swap(out.tokens[i], out.tokens[uniformIndex(rng, i + 1)]);
    }
  } while (out == s);
  return out;
}

Tensor contextVector(const Sentence& s, std::size_t position, const Tensor& mainTable,
                     std::size_t window) {
  const std::size_t d = mainTable.cols();
  Tensor ctx = Tensor::zeros(d);
  std::size_t lo = 0;
  std::size_t hi = s.size();
  if (window > 0) {
    lo = position > window ? position - window : 0;
    hi = std::min(s.size(), position + window + 1);
  }
  std::size_t n = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    if (i == position) continue;
    axpy(1.0, mainTable.row(s.tokens[i]), ctx.span());
    ++n;
  }
  if (n > 0) {
    for (double& v : ctx.data()) v /= static_cast<double>(n);
  }
  return ctx;
}

}  // namespace sams
