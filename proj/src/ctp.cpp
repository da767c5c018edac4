#include "ptpmdl/ctp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ptpmdl {

namespace {

// -n log2(p), with 0 log 0 = 0.
double neg_log_term(std::uint64_t n, double p) {
  return n == 0 ? 0.0 : -static_cast<double>(n) * std::log2(p);
}

std::string context_string(int d, ContextIndex c) {
  std::string s(static_cast<std::size_t>(d), '0');
  for (int j = 0; j < d; ++j) s[static_cast<std::size_t>(j)] = char('0' + ((c >> j) & 1u));
  return s;
}

}  // namespace

LeafCost leaf_cost(std::uint64_t n0, std::uint64_t n1, const QuantizerGrid& grid) {
  const std::uint64_t n = n0 + n1;
  const double theta = n == 0 ? 0.5 : static_cast<double>(n1) / static_cast<double>(n);
  const auto param = quantize(theta, grid);
  const double bits = std::log2(static_cast<double>(grid.size)) + neg_log_term(n0, 1.0 - param.level) +
                      neg_log_term(n1, param.level);
  return {bits, param};
}

PrunedModel prune(const CountsTree& counts, const QuantizerGrid& grid) {
  if (!counts.consistent()) throw InternalError("counts tree violates n_s = n_0s + n_1s");
  const int depth = counts.depth();

  std::vector<std::vector<std::uint8_t>> keep(static_cast<std::size_t>(depth));
  std::vector<double> below;  // MDL of the level underneath
  for (int d = depth; d >= 0; --d) {
    const auto& level = counts.level(d);
    std::vector<double> mdl(static_cast<std::size_t>(level.rows()));
    if (d < depth) keep[static_cast<std::size_t>(d)].assign(mdl.size(), 0);
    for (std::size_t c = 0; c < mdl.size(); ++c) {
      const double own = leaf_cost(level(c, 0), level(c, 1), grid).bits;
      if (d == depth) {
        mdl[c] = own;
        continue;
      }
      const double split = below[2 * c] + below[2 * c + 1];
      const bool retain = split < own;
      keep[static_cast<std::size_t>(d)][c] = retain;
      mdl[c] = 1.0 + (retain ? split : own);
    }
    below = std::move(mdl);
  }

  std::vector<std::string> leaves;
  std::function<void(int, ContextIndex)> collect = [&](int d, ContextIndex c) {
    if (d < depth && keep[static_cast<std::size_t>(d)][c]) {
      collect(d + 1, 2 * c);
      collect(d + 1, 2 * c + 1);
    } else {
      leaves.push_back(context_string(d, c));
    }
  };
  collect(0, 0);

  PrunedModel model;
  model.structure = TreeStructure::from_leaves(std::move(leaves));
  model.mdl_root = below[0];
  model.grid_levels = grid.size;
  const CountTable lc = leaf_counts(model.structure, counts);
  for (Eigen::Index i = 0; i < lc.rows(); ++i) model.params.push_back(leaf_cost(lc(i, 0), lc(i, 1), grid).param);
  return model;
}

PrunedModel full_model(const CountsTree& counts, const QuantizerGrid& grid) {
  if (!counts.consistent()) throw InternalError("counts tree violates n_s = n_0s + n_1s");
  PrunedModel model;
  model.structure = TreeStructure::full(counts.depth());
  model.grid_levels = grid.size;
  const CountTable lc = leaf_counts(model.structure, counts);
  for (Eigen::Index i = 0; i < lc.rows(); ++i) {
    const auto cost = leaf_cost(lc(i, 0), lc(i, 1), grid);
    model.params.push_back(cost.param);
    model.mdl_root += cost.bits;
  }
  return model;
}

CountTable leaf_counts(const TreeStructure& structure, const CountsTree& counts) {
  if (structure.depth() > counts.depth()) throw ConfigError("structure is deeper than the counts tree");
  CountTable out(static_cast<Eigen::Index>(structure.size()), 2);
  const auto& leaves = structure.leaves();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    ContextIndex c = 0;
    for (std::size_t j = 0; j < leaves[i].size(); ++j) c |= ContextIndex(leaves[i][j] - '0') << j;
    out.row(static_cast<Eigen::Index>(i)) = counts.level(static_cast<int>(leaves[i].size())).row(c);
  }
  return out;
}

double bound_constant() { return std::log2(1.772) + 2.0; }

LengthReport report_lengths(const PrunedModel& model, const CountsTree& counts, bool structure_described,
                            std::uint64_t n, std::span<const std::uint64_t> block_lengths, int depth) {
  if (model.params.size() != model.structure.size()) throw ConfigError("model parameters do not match its states");
  const auto k = model.grid_levels;
  if (k == 0) throw ConfigError("model has no quantizer grid");
  const double blocks = static_cast<double>(block_lengths.size());
  const double states = static_cast<double>(model.structure.size());
  const double log_n = std::log2(static_cast<double>(std::max<std::uint64_t>(n, 1)));

  LengthReport r;
  r.states = model.structure.size();
  r.model_bits = structure_described ? static_cast<double>(natural_encode(model.structure, depth).size()) : 0.0;
  r.param_bits = states * std::log2(static_cast<double>(k));
  r.l_phase1 = r.model_bits + r.param_bits;

  const CountTable lc = leaf_counts(model.structure, counts);
  for (Eigen::Index i = 0; i < lc.rows(); ++i) {
    const auto n0 = lc(i, 0);
    const auto n1 = lc(i, 1);
    const double level = model.params[static_cast<std::size_t>(i)].level;
    r.part2_bits += neg_log_term(n0, 1.0 - level) + neg_log_term(n1, level);
    if (n0 + n1 > 0) {
      const double theta = static_cast<double>(n1) / static_cast<double>(n0 + n1);
      r.ml_entropy += neg_log_term(n0, 1.0 - theta) + neg_log_term(n1, theta);
    }
  }
  r.l_phase2 = blocks * (depth + 2.0) + r.part2_bits;
  r.redundancy = r.l_phase1 + r.l_phase2 - r.ml_entropy;
  const double per_block = blocks > 0 ? static_cast<double>(n) / blocks : 0.0;
  r.theorem1_bound = blocks * (std::log2(std::max(per_block, 1.0)) + 2.0) + states / 2.0 * (log_n + bound_constant());
  return r;
}

}  // namespace ptpmdl
