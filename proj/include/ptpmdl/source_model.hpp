#ifndef PTPMDL_SOURCE_MODEL_HPP
#define PTPMDL_SOURCE_MODEL_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ptpmdl/types.hpp"

namespace ptpmdl {

/// Largest context depth accepted anywhere in the library.
inline constexpr int kMaxDepth = 30;

/// A plain bit string, one bit per element (0 or 1).
using BitString = std::vector<std::uint8_t>;

/// Structure of a binary context tree source: a complete and proper set of
/// states arranged as the leaves of a binary suffix tree.
///
/// States are written oldest symbol first, so the state matching a past
/// ...x_{i-2} x_{i-1} ends with x_{i-1}. The children of a node s are 0s and
/// 1s (one older symbol prepended). Leaves are kept in depth-first order,
/// 0-branch first; every per-state table in the library uses that order.
class TreeStructure {
 public:
  struct Node {
    std::array<std::int32_t, 2> child{-1, -1};
    std::int32_t leaf = -1;  ///< index into leaves(), or -1 for internal nodes
  };

  /// The single-state structure {ε}.
  TreeStructure();

  /// Builds a structure from its leaf strings; throws ConfigError unless the
  /// set is complete and proper.
  static TreeStructure from_leaves(std::vector<std::string> leaves);

  /// The full depth-D tree (all 2^D contexts are states).
  static TreeStructure full(int depth);

  int depth() const { return depth_; }
  std::size_t size() const { return leaves_.size(); }
  const std::vector<std::string>& leaves() const { return leaves_; }

  /// Nodes in depth-first order; nodes()[0] is the root.
  const std::vector<Node>& nodes() const { return nodes_; }

  /// Index of the unique leaf that is a suffix of `past` (temporal order,
  /// most recent symbol last). Requires past.size() >= depth().
  std::size_t lookup(std::span<const Symbol> past) const;

  friend bool operator==(const TreeStructure& a, const TreeStructure& b) {
    return a.leaves_ == b.leaves_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<std::string> leaves_;
  int depth_ = 0;
};

/// A tree structure together with p(1|s) for each state.
class TreeSource {
 public:
  /// `theta` is aligned with structure.leaves().
  TreeSource(TreeStructure structure, std::vector<double> theta);

  static TreeSource from_map(const std::map<std::string, double>& theta);

  const TreeStructure& structure() const { return structure_; }
  const std::vector<double>& theta() const { return theta_; }
  double p1(std::size_t leaf) const { return theta_[leaf]; }

 private:
  TreeStructure structure_;
  std::vector<double> theta_;
};

/// The four-state example source: S = {0, 11, 001, 101} with
/// p(1|0)=0.03, p(1|11)=0.98, p(1|001)=0.95, p(1|101)=0.97.
TreeSource four_state_source();

/// Reads the plain-text source format (see README): one `<state> <p1>` pair
/// per line, `-` for the empty state, optional `depth <D>` line, `#` comments.
TreeSource parse_tree_source(std::istream& in);
TreeSource load_tree_source(const std::filesystem::path& path);
std::string format_tree_source(const TreeSource& source);

/// Draws n symbols from `source`. The symbols before x_1 are taken from
/// `initial_context` (length depth(), oldest first); an empty span means all
/// zeros. Deterministic for a given seed.
Sequence generate(const TreeSource& source, std::uint64_t n, std::uint64_t seed,
                  std::span<const Symbol> initial_context = {});

/// The state string generating the next symbol after `past`.
const std::string& lookup_state(const TreeStructure& structure,
                                std::span<const Symbol> past);

/// Natural code of `structure` relative to the full depth-`depth` tree:
/// pre-order, 0-branch first, 1 for an internal node and 0 for a leaf, nothing
/// for nodes at depth `depth`.
BitString natural_encode(const TreeStructure& structure, int depth);

struct NaturalDecodeResult {
  TreeStructure structure;
  std::size_t consumed = 0;  ///< bits read from the input
};

/// Inverse of natural_encode. Throws FormatError on truncated input.
NaturalDecodeResult natural_decode(std::span<const std::uint8_t> code, int depth);

}  // namespace ptpmdl

#endif  // PTPMDL_SOURCE_MODEL_HPP
