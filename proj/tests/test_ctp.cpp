#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ptpmdl/codec.hpp"
#include "ptpmdl/ctp.hpp"

using namespace ptpmdl;

namespace {

// l_s computed without leaf_cost/quantize: bin found by scanning the edges.
double oracle_leaf_bits(std::uint64_t n0, std::uint64_t n1, const QuantizerGrid& g) {
  const double theta = n0 + n1 == 0 ? 0.5 : static_cast<double>(n1) / static_cast<double>(n0 + n1);
  std::uint32_t k = 0;
  while (k + 1 < g.size && theta >= g.edges[k + 1]) ++k;
  const double r = g.levels[k];
  double bits = std::log2(static_cast<double>(g.size));
  if (n0) bits -= static_cast<double>(n0) * std::log2(1.0 - r);
  if (n1) bits -= static_cast<double>(n1) * std::log2(r);
  return bits;
}

struct Candidate {
  double cost;
  std::vector<std::string> leaves;
};

// Every complete and proper subtree rooted at (d, c) of the full depth-D tree,
// with its description cost: 1 bit per node above depth D plus l_s per leaf.
std::vector<Candidate> enumerate(const CountsTree& counts, const QuantizerGrid& g, int d, ContextIndex c) {
  const int depth = counts.depth();
  std::string name(static_cast<std::size_t>(d), '0');
  for (int j = 0; j < d; ++j) name[static_cast<std::size_t>(j)] = char('0' + ((c >> j) & 1u));
  const double own = oracle_leaf_bits(counts.count(d, c, 0), counts.count(d, c, 1), g);
  std::vector<Candidate> out{{own + (d < depth ? 1.0 : 0.0), {name}}};
  if (d == depth) return out;
  const auto left = enumerate(counts, g, d + 1, 2 * c);
  const auto right = enumerate(counts, g, d + 1, 2 * c + 1);
  for (const auto& l : left)
    for (const auto& r : right) {
      Candidate both{1.0 + l.cost + r.cost, l.leaves};
      both.leaves.insert(both.leaves.end(), r.leaves.begin(), r.leaves.end());
      out.push_back(std::move(both));
    }
  return out;
}

CountsTree random_counts(std::mt19937_64& rng, int depth) {
  CountTable leaves(Eigen::Index{1} << depth, 2);
  const int style = static_cast<int>(rng() % 3);
  for (Eigen::Index c = 0; c < leaves.rows(); ++c) {
    const std::uint64_t n = style == 0 ? rng() % 8 : style == 1 ? rng() % 400 : rng() % 3000;
    const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto n1 = static_cast<std::uint64_t>(std::binomial_distribution<std::uint64_t>(n, p)(rng));
    leaves(c, 0) = n - n1;
    leaves(c, 1) = n1;
  }
  return CountsTree::from_leaves(leaves, depth);
}

}  // namespace

TEST_CASE("leaf_cost examples") {
  const auto g = build_grid(10000);
  CHECK(leaf_cost(0, 0, g).bits == doctest::Approx(std::log2(178.0)).epsilon(1e-15));

  const auto g2 = build_grid_with_levels(2);
  const auto ten_ones = leaf_cost(0, 10, g2);
  CHECK(ten_ones.param.index == 1);
  CHECK(ten_ones.bits == doctest::Approx(1.0 - 10.0 * std::log2(0.8535533905932737)).epsilon(1e-12));
  CHECK(ten_ones.bits == doctest::Approx(3.2843).epsilon(1e-4));

  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto n0 = rng() % 100, n1 = rng() % 100;
    if (n0 + n1 == 0) continue;
    CHECK(leaf_cost(n0, n1, g).bits > std::log2(178.0));
  }
}

TEST_CASE("prune matches the exhaustive minimum over all depth-3 subtrees") {
  std::mt19937_64 rng(1234);
  int unique = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto counts = random_counts(rng, 3);
    const auto g = build_grid(std::max<std::uint64_t>(counts.total(), 1));
    const auto all = enumerate(counts, g, 0, 0);
    REQUIRE(all.size() == 26);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_at = 0, ties = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i].cost < best - 1e-9) {
        best = all[i].cost;
        best_at = i;
        ties = 0;
      } else if (std::abs(all[i].cost - best) <= 1e-9) {
        ++ties;
      }
    }
    const auto model = prune(counts, g);
    CHECK(std::abs(model.mdl_root - best) <= 1e-9);
    if (ties == 0) {
      ++unique;
      CHECK(model.structure == TreeStructure::from_leaves(all[best_at].leaves));
    }
  }
  CHECK(unique > 100);
}

TEST_CASE("pruning never costs more than the full tree or the root") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int depth = 1 + static_cast<int>(rng() % 6);
    const auto counts = random_counts(rng, depth);
    const auto g = build_grid(std::max<std::uint64_t>(counts.total(), 1));
    const auto model = prune(counts, g);
    const double root_only = 1.0 + leaf_cost(counts.count(0, 0, 0), counts.count(0, 0, 1), g).bits;
    const double full = full_model(counts, g).mdl_root + static_cast<double>((1u << depth) - 1);
    CHECK(model.mdl_root <= root_only + 1e-9);
    CHECK(model.mdl_root <= full + 1e-9);
    CHECK(model.params.size() == model.structure.size());
    CHECK(model.structure.depth() <= depth);
  }
}

TEST_CASE("i.i.d. data prunes to the root") {
  std::mt19937_64 rng(8);
  std::bernoulli_distribution bit(0.3);
  Sequence x(20000);
  for (auto& s : x) s = bit(rng);
  const auto b = count_block(x, 3);
  const auto counts = aggregate(std::span(&b, 1), 3);
  const auto model = prune(counts, build_grid(x.size()));
  CHECK(model.structure == TreeStructure());
}

TEST_CASE("four-state source: estimates coarsen the true structure") {
  // State 101 is visited a few dozen times in 2*10^5 symbols and differs from
  // 001 by 0.97 vs 0.95, so the data-supported structure merges them into 01.
  const auto src = four_state_source();
  const auto x = generate(src, 200000, 17);
  const auto b = count_block(x, 5);
  const auto model = prune(aggregate(std::span(&b, 1), 5), build_grid(x.size()));
  CHECK(model.structure == TreeStructure::from_leaves({"0", "01", "11"}));

  // For every seed and length, each true state has a suffix among the
  // estimated states (no spurious splits of state 0 or 11).
  for (std::uint64_t seed = 1; seed <= 30; ++seed)
    for (std::uint64_t n : {2000ull, 10000ull, 50000ull}) {
      const auto y = generate(src, n, seed);
      const auto c = count_block(y, 5);
      const auto est = prune(aggregate(std::span(&c, 1), 5), build_grid(n)).structure;
      for (const auto& leaf : src.structure().leaves()) {
        Sequence past;
        for (char ch : leaf) past.push_back(static_cast<Symbol>(ch - '0'));
        past.insert(past.begin(), 5 - past.size(), 0);
        const auto& found = est.leaves()[est.lookup(past)];
        CHECK(found.size() <= leaf.size());
        CHECK(leaf.compare(leaf.size() - found.size(), found.size(), found) == 0);
      }
    }
}

TEST_CASE("prune rejects a counts tree that breaks the child-sum relation") {
  auto counts = CountsTree::from_leaves(count_block(Sequence{0, 1, 1, 0, 1, 0, 0, 1}, 2).counts, 2);
  std::vector<CountTable> levels{counts.level(0), counts.level(1), counts.level(2)};
  levels[0](0, 1) += 3;
  CHECK_THROWS_AS(prune(CountsTree(levels), build_grid(8)), InternalError);
}

TEST_CASE("tie between splitting and merging prunes") {
  // Two children with zero counts cost 2 log2 K; choose K = 1 so every leaf
  // costs 0 bits with no symbols: split = 0 + 0, own = 0 -> tie -> prune.
  const auto g = build_grid_with_levels(1);
  const CountsTree empty(2);
  CHECK(prune(empty, g).structure == TreeStructure());
}

TEST_CASE("report_lengths: single empty state") {
  const CountsTree counts(0);
  const auto g = build_grid(1);
  const auto model = prune(counts, g);
  const std::vector<std::uint64_t> lengths{0};
  const auto r = report_lengths(model, counts, true, 0, lengths, 0);
  CHECK(r.states == 1);
  CHECK(r.model_bits == 0.0);  // depth 0: the root is at depth D
  CHECK(r.l_phase1 == doctest::Approx(std::log2(2.0)));

  const CountsTree deeper(3);
  const auto m3 = prune(deeper, g);
  const auto r3 = report_lengths(m3, deeper, true, 0, lengths, 3);
  CHECK(r3.l_phase1 == doctest::Approx(1.0 + std::log2(2.0)));
  CHECK(r3.ml_entropy == 0.0);
}

TEST_CASE("per-symbol code lengths add up to the closed form") {
  const auto x = generate(four_state_source(), 10000, 5);
  const EncodeConfig cfg{5, 5, Mode::ptp_mdl, 1};
  const auto enc = encode_detailed(x, cfg);
  const auto& model = enc.models[0];

  double accumulated = 0.0;
  std::size_t start = 0;
  for (auto len : enc.container.block_lengths) {
    for (std::size_t i = start + 5; i < start + len; ++i) {
      const auto leaf = model.structure.lookup(std::span(x).subspan(i - 5, 5));
      const double r = model.params[leaf].level;
      accumulated -= std::log2(x[i] ? r : 1.0 - r);
    }
    start += len;
  }
  const auto report = report_lengths(model, enc.counts[0], true, x.size(), enc.container.block_lengths, 5);
  CHECK(accumulated == doctest::Approx(report.part2_bits).epsilon(1e-10));
  CHECK(report.l_phase2 == doctest::Approx(5 * 7 + report.part2_bits));
  CHECK(report.redundancy == doctest::Approx(report.l_phase1 + report.l_phase2 - report.ml_entropy));
  CHECK(report.redundancy < report.theorem1_bound + 4.0 * static_cast<double>(report.states));
}
