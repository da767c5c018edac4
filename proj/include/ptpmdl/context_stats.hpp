#ifndef PTPMDL_CONTEXT_STATS_HPP
#define PTPMDL_CONTEXT_STATS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "ptpmdl/types.hpp"

namespace ptpmdl {

/// Dense table of symbol counts, one row per context, columns n^0 and n^1.
using CountTable = Eigen::Array<std::uint64_t, Eigen::Dynamic, 2>;

/// Index of a depth-D context: sum_j 2^j s[j] with s[0] the oldest symbol, so
/// the most recent symbol is the most significant bit.
using ContextIndex = std::uint32_t;

ContextIndex context_index(std::span<const Symbol> context);

/// Slides the context one symbol forward: drops `leaving` (the oldest symbol,
/// bit 0 of c) and appends `incoming` as the new most significant bit.
constexpr ContextIndex advance_index(ContextIndex c, Symbol incoming, Symbol leaving, int depth) {
  if (depth == 0) return 0;
  return ((c - leaving) >> 1) + (ContextIndex{incoming} << (depth - 1));
}

/// Symbol counts of one block for every depth-D context.
struct BlockCounts {
  CountTable counts;         ///< 2^D rows
  int depth = 0;
  std::uint64_t length = 0;  ///< block length in symbols
  std::uint64_t visits = 0;  ///< symbols counted, always max(length - D, 0)
};

/// Counts, for local positions D+1..length, which symbol follows which
/// depth-D context. The first D symbols of the block are never counted.
BlockCounts count_block(std::span<const Symbol> block, int depth);

/// Counts for every node of the full depth-D context tree.
///
/// level(d) holds the 2^d nodes at depth d, row c being the context whose
/// index (oldest symbol least significant) is c. The children of row c at
/// depth d are rows 2c (prepended 0) and 2c+1 (prepended 1) at depth d+1.
class CountsTree {
 public:
  CountsTree() : CountsTree(0) {}
  explicit CountsTree(int depth);

  /// Takes the levels as given, without enforcing the child-sum relation;
  /// check it with consistent().
  explicit CountsTree(std::vector<CountTable> levels);

  /// Builds internal levels bottom-up from the depth-D leaf table.
  static CountsTree from_leaves(CountTable leaves, int depth);

  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  const CountTable& level(int d) const { return levels_[static_cast<std::size_t>(d)]; }
  std::uint64_t count(int d, ContextIndex c, Symbol alpha) const {
    return levels_[static_cast<std::size_t>(d)](c, alpha);
  }

  /// n^0 + n^1 at the root.
  std::uint64_t total() const { return levels_[0].sum(); }

  /// True iff every internal node equals the sum of its two children.
  bool consistent() const;

 private:
  std::vector<CountTable> levels_;
};

/// Sums block tables into the leaf level and fills the internal levels.
/// Result does not depend on the order of `blocks`.
CountsTree aggregate(std::span<const BlockCounts> blocks, int depth);

}  // namespace ptpmdl

#endif  // PTPMDL_CONTEXT_STATS_HPP
