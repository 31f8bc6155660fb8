#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sams/rng.hpp"
#include "sams/tensor.hpp"

namespace sams {

using WordId = std::uint32_t;

/// Word inventory. Id 0 is always the unknown-word token.
class Vocabulary {
 public:
  static constexpr WordId kUnk = 0;
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  /// Builds from raw token counts: tokens with count >= minCount get ids in
  /// order of decreasing count (ties broken lexicographically); the rest are
  /// folded into the unknown token's count.
  static Vocabulary fromCounts(const std::unordered_map<std::string, std::uint64_t>& counts,
                               std::uint64_t minCount);
  /// Rebuilds a vocabulary from explicit (token, count) rows; row 0 must be UNK.
  static Vocabulary fromRows(std::vector<std::pair<std::string, std::uint64_t>> rows);

  std::size_t size() const { return tokens_.size(); }
  WordId unkId() const { return kUnk; }
  WordId id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(WordId id) const { return tokens_.at(id); }
  std::uint64_t count(WordId id) const { return counts_.at(id); }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.counts_ == b.counts_;
  }

 private:
  void add(std::string token, std::uint64_t count);

  std::unordered_map<std::string, WordId> ids_;
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
};

/// A tokenized sentence as vocabulary ids.
struct Sentence {
  std::vector<WordId> tokens;

  std::size_t size() const { return tokens.size(); }
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

std::vector<std::string> splitTokens(std::string_view line);
Sentence encodeSentence(const Vocabulary& vocab, std::span<const std::string> tokens);

/// Reads a one-sentence-per-line corpus and builds its vocabulary.
/// Throws IoError when unreadable and EmptyCorpus when no tokens were found.
Vocabulary buildVocab(const std::string& corpusPath, std::uint64_t minCount);

/// Reads sentences (skipping blank lines); tokens are mapped through `vocab`.
/// Sentences longer than `maxLength` are truncated (0 = no limit).
std::vector<Sentence> readCorpus(const std::string& corpusPath, const Vocabulary& vocab,
                                 std::size_t maxLength = 0);

/// Strictly binary tree over sentence positions, stored as a flat arena in
/// post-order (children always precede their parent; the root is last).
class ParseTree {
 public:
  struct Node {
    int left = -1;      // child node index, -1 for a leaf
    int right = -1;
    int position = -1;  // sentence position, leaves only
    bool isLeaf() const { return left < 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  static ParseTree leaf();
  /// Right-branching tree over n leaves: (x0 (x1 (x2 ...))).
  static ParseTree rightBranching(std::size_t n);
  static ParseTree leftBranching(std::size_t n);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t root() const { return nodes_.size() - 1; }
  std::size_t leafCount() const { return leafCount_; }
  std::size_t internalCount() const { return nodes_.size() - leafCount_; }
  /// Leaf positions visited in-order (left to right).
  std::vector<int> inOrderLeaves() const;
  /// Bracketed rendering using the given leaf labels.
  std::string render(std::span<const std::string> labels) const;

  friend bool operator==(const ParseTree&, const ParseTree&) = default;

 private:
  friend class TreeBuilder;
  std::vector<Node> nodes_;
  std::size_t leafCount_ = 0;
};

/// A tree line parsed into its shape and its leaf tokens.
struct ParsedTree {
  ParseTree tree;
  std::vector<std::string> tokens;
};

/// Parses a bracketed tree such as `(( kids ) (( play ) ( ball )))`.
/// Unary wrappers collapse; n-ary nodes are right-binarized. Throws ParseError.
ParsedTree loadTree(std::string_view line);

/// Throws ParseError unless the tree has exactly `length` leaves.
void checkTreeMatches(const ParseTree& tree, std::size_t length);

std::vector<ParsedTree> readTrees(const std::string& path);

/// How substitution negatives draw replacement words.
enum class SubstituteSampling { Unigram, Uniform };

/// Draws corrupted sentences. Sampling tables are built once from the
/// vocabulary; the sampler itself is immutable and safe to share.
class Corrupter {
 public:
  explicit Corrupter(const Vocabulary& vocab,
                     SubstituteSampling sampling = SubstituteSampling::Unigram);

  struct Substitution {
    Sentence sentence;
    std::size_t position;
  };

  /// Replaces one uniformly chosen position with a different sampled word.
  /// Throws VocabularyTooSmall when fewer than two words can be sampled.
  Substitution substitute(const Sentence& s, Rng& rng) const;

  /// Uniform random rearrangement of the tokens, redrawn until the token
  /// sequence differs from the input. Returns nullopt when all tokens are
  /// identical. Throws TooShort for sentences with fewer than two tokens.
  std::optional<Sentence> shuffle(const Sentence& s, Rng& rng) const;

 private:
  WordId sampleWord(Rng& rng) const;

  std::vector<WordId> candidates_;
  std::vector<double> cumulative_;
};

/// Mean of the main vectors of every token except the one at `position`.
/// `window` > 0 restricts the context to that many tokens on each side.
/// Returns the zero vector when the context is empty.
Tensor contextVector(const Sentence& s, std::size_t position, const Tensor& mainTable,
                     std::size_t window = 0);

}  // namespace sams
