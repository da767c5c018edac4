#ifndef PTPMDL_CTP_HPP
#define PTPMDL_CTP_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ptpmdl/context_stats.hpp"
#include "ptpmdl/quantizer.hpp"
#include "ptpmdl/source_model.hpp"

namespace ptpmdl {

/// Two-part code length of one state: log2(K) bits for the bin index plus
/// -n0 log2(1-r) - n1 log2(r) bits for its symbols.
struct LeafCost {
  double bits = 0.0;
  QuantizedParam param;
};

/// theta = n1/(n0+n1), or 1/2 for an empty state.
LeafCost leaf_cost(std::uint64_t n0, std::uint64_t n1, const QuantizerGrid& grid);

/// A tree source estimate: structure plus one quantized parameter per leaf.
struct PrunedModel {
  TreeStructure structure;
  std::vector<QuantizedParam> params;  ///< aligned with structure.leaves()
  double mdl_root = 0.0;               ///< total cost in bits of the chosen model
  std::uint32_t grid_levels = 0;       ///< K of the grid the parameters index
};

/// Context-tree pruning. Bottom-up over the full depth-D tree:
///   MDL_s = l_s                                   if |s| = D
///   MDL_s = 1 + min(MDL_0s + MDL_1s, l_s)         otherwise
/// Children are kept only when strictly cheaper; ties prune.
/// Throws InternalError if `counts` violates the child-sum relation.
PrunedModel prune(const CountsTree& counts, const QuantizerGrid& grid);

/// The unpruned full depth-D model (every context is a state). Its cost has no
/// structure bits since the structure is implied by D.
PrunedModel full_model(const CountsTree& counts, const QuantizerGrid& grid);

/// n^0, n^1 of every leaf of `structure`, looked up in `counts`.
CountTable leaf_counts(const TreeStructure& structure, const CountsTree& counts);

/// Analytic code lengths for one model, all in bits.
struct LengthReport {
  double l_phase1 = 0.0;        ///< model_bits + param_bits
  double l_phase2 = 0.0;        ///< B (D + 2) + part2_bits
  double model_bits = 0.0;      ///< natural code length (0 when the structure is implied)
  double param_bits = 0.0;      ///< |S| log2 K
  double part2_bits = 0.0;      ///< -sum_s [n1 log2 r_s + n0 log2 (1 - r_s)]
  double ml_entropy = 0.0;      ///< same sum with unquantized ML parameters
  double redundancy = 0.0;      ///< l_phase1 + l_phase2 - ml_entropy
  double theorem1_bound = 0.0;  ///< B [log2(N/B) + 2] + |S|/2 [log2 N + log2(1.772) + 2]
  std::size_t states = 0;
};

/// The O(1) term used in theorem1_bound: log2(1.772) + 2.
double bound_constant();

LengthReport report_lengths(const PrunedModel& model, const CountsTree& counts, bool structure_described,
                            std::uint64_t n, std::span<const std::uint64_t> block_lengths, int depth);

}  // namespace ptpmdl

#endif  // PTPMDL_CTP_HPP
