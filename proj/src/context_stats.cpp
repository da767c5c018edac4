#include "ptpmdl/context_stats.hpp"

#include "ptpmdl/source_model.hpp"

namespace ptpmdl {

namespace {

void check_depth(int depth) {
  if (depth < 0 || depth > kMaxDepth) throw ConfigError("context depth out of range");
}

CountTable zeros(int depth) {
  return CountTable::Zero(static_cast<Eigen::Index>(std::uint64_t{1} << depth), 2);
}

}  // namespace

ContextIndex context_index(std::span<const Symbol> context) {
  check_depth(static_cast<int>(context.size()));
  ContextIndex c = 0;
  for (std::size_t j = 0; j < context.size(); ++j) c |= ContextIndex{context[j] & 1u} << j;
  return c;
}

BlockCounts count_block(std::span<const Symbol> block, int depth) {
  check_depth(depth);
  BlockCounts out{zeros(depth), depth, block.size(), 0};
  const auto d = static_cast<std::size_t>(depth);
  if (block.size() <= d) return out;

  ContextIndex c = context_index(block.first(d));
  for (std::size_t i = d; i < block.size(); ++i) {
    const Symbol x = block[i];
    ++out.counts(c, x);
    c = advance_index(c, x, block[i - d], depth);
  }
  out.visits = block.size() - d;
  return out;
}

CountsTree::CountsTree(int depth) {
  check_depth(depth);
  for (int d = 0; d <= depth; ++d) levels_.push_back(zeros(d));
}

CountsTree::CountsTree(std::vector<CountTable> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw ConfigError("counts tree needs at least a root level");
  check_depth(depth());
  for (int d = 0; d <= depth(); ++d)
    if (level(d).rows() != (Eigen::Index{1} << d)) throw ConfigError("counts tree level has the wrong size");
}

CountsTree CountsTree::from_leaves(CountTable leaves, int depth) {
  CountsTree tree(depth);
  if (leaves.rows() != tree.levels_.back().rows()) throw ConfigError("leaf table does not match the depth");
  tree.levels_.back() = std::move(leaves);
  for (int d = depth - 1; d >= 0; --d) {
    auto& parent = tree.levels_[static_cast<std::size_t>(d)];
    const auto& child = tree.levels_[static_cast<std::size_t>(d) + 1];
    for (Eigen::Index c = 0; c < parent.rows(); ++c) parent.row(c) = child.row(2 * c) + child.row(2 * c + 1);
  }
  return tree;
}

bool CountsTree::consistent() const {
  for (int d = 0; d < depth(); ++d) {
    const auto& parent = level(d);
    const auto& child = level(d + 1);
    for (Eigen::Index c = 0; c < parent.rows(); ++c)
      if ((parent.row(c) != child.row(2 * c) + child.row(2 * c + 1)).any()) return false;
  }
  return true;
}

CountsTree aggregate(std::span<const BlockCounts> blocks, int depth) {
  check_depth(depth);
  CountTable leaves = zeros(depth);
  for (const auto& b : blocks) {
    if (b.depth != depth) throw ConfigError("block counts were collected with a different depth");
    leaves += b.counts;
  }
  return CountsTree::from_leaves(std::move(leaves), depth);
}

}  // namespace ptpmdl
