#include <doctest.h>

#include <random>

#include "ptpmdl/codec.hpp"
#include "ptpmdl/context_stats.hpp"

using namespace ptpmdl;

namespace {

Sequence seq(const std::string& s) {
  Sequence out;
  for (char c : s) out.push_back(static_cast<Symbol>(c - '0'));
  return out;
}

Sequence random_sequence(std::mt19937_64& rng, std::size_t n, double p1 = 0.5) {
  std::bernoulli_distribution bit(p1);
  Sequence x(n);
  for (auto& s : x) s = bit(rng);
  return x;
}

// Reference counter: for every position i >= D of each block, read the
// context from scratch and bump the matching leaf. Deliberately ignores
// symbols of the previous block.
CountTable block_skipping_oracle(const Sequence& x, std::span<const std::uint64_t> lengths, int depth) {
  CountTable t = CountTable::Zero(Eigen::Index{1} << depth, 2);
  std::size_t start = 0;
  for (auto len : lengths) {
    for (std::size_t i = start + static_cast<std::size_t>(depth); i < start + len; ++i) {
      ContextIndex c = 0;
      for (int j = 0; j < depth; ++j) c += ContextIndex{x[i - static_cast<std::size_t>(depth) + j]} << j;
      ++t(c, x[i]);
    }
    start += len;
  }
  return t;
}

}  // namespace

TEST_CASE("context_index examples") {
  CHECK(context_index(seq("101")) == 5);
  CHECK(context_index(seq("011")) == 6);
  CHECK(context_index(seq("00000")) == 0);
  CHECK(context_index(seq("")) == 0);
}

TEST_CASE("advance_index examples") {
  CHECK(advance_index(5, 1, 1, 3) == 6);
  CHECK(advance_index(5, 1, 1, 3) == context_index(seq("011")));
  CHECK(advance_index(0, 0, 0, 4) == 0);
  CHECK(advance_index(0, 1, 0, 0) == 0);
}

TEST_CASE("advance_index agrees with context_index on random sequences") {
  std::mt19937_64 rng(5);
  for (int depth = 1; depth <= 12; ++depth) {
    const auto x = random_sequence(rng, 200);
    auto c = context_index(std::span(x).first(static_cast<std::size_t>(depth)));
    for (std::size_t i = static_cast<std::size_t>(depth); i < x.size(); ++i) {
      c = advance_index(c, x[i], x[i - static_cast<std::size_t>(depth)], depth);
      REQUIRE(c == context_index(std::span(x).subspan(i + 1 - static_cast<std::size_t>(depth),
                                                      static_cast<std::size_t>(depth))));
    }
  }
}

TEST_CASE("count_block examples") {
  const auto b = count_block(seq("0110110"), 2);
  // contexts (oldest first): "01" -> 2, "11" -> 3, "10" -> 1
  CHECK(b.counts(2, 1) == 2);
  CHECK(b.counts(3, 0) == 2);
  CHECK(b.counts(1, 1) == 1);
  CHECK(b.counts.sum() == 5);
  CHECK(b.visits == 5);

  const auto zeros = count_block(Sequence(100, 0), 3);
  CHECK(zeros.counts(0, 0) == 97);
  CHECK(zeros.counts.sum() == 97);

  const auto short_block = count_block(seq("01"), 3);
  CHECK(short_block.counts.sum() == 0);
  CHECK(short_block.visits == 0);
  CHECK(short_block.counts.rows() == 8);

  CHECK(count_block(seq("0111"), 0).counts(0, 1) == 3);
}

TEST_CASE("aggregate examples and child-sum relation") {
  std::mt19937_64 rng(9);
  const auto a = random_sequence(rng, 300);
  const auto b = random_sequence(rng, 257);
  const auto ba = count_block(a, 4);
  const auto bb = count_block(b, 4);

  const auto single = aggregate(std::span(&ba, 1), 4);
  CHECK((single.level(4) == ba.counts).all());

  std::vector<BlockCounts> both{ba, bb};
  const auto tree = aggregate(both, 4);
  CHECK((tree.level(4) == ba.counts + bb.counts).all());
  CHECK(tree.consistent());
  CHECK(tree.total() == (300 - 4) + (257 - 4));

  std::vector<BlockCounts> reversed{bb, ba};
  const auto tree2 = aggregate(reversed, 4);
  for (int d = 0; d <= 4; ++d) CHECK((tree2.level(d) == tree.level(d)).all());

  auto mismatched = count_block(a, 3);
  std::vector<BlockCounts> mixed{ba, mismatched};
  CHECK_THROWS_AS(aggregate(mixed, 4), ConfigError);
}

TEST_CASE("aggregated block counts equal the block-skipping serial count") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int depth = static_cast<int>(rng() % 6);
    const std::uint32_t blocks = 1 + static_cast<std::uint32_t>(rng() % 7);
    const std::size_t n = blocks * (std::size_t{1} << depth) + rng() % 500;
    const auto x = random_sequence(rng, n, 0.3);
    const auto lengths = partition(n, blocks);

    std::vector<BlockCounts> stats;
    std::size_t start = 0;
    for (auto len : lengths) {
      stats.push_back(count_block(std::span(x).subspan(start, len), depth));
      start += len;
    }
    const auto tree = aggregate(stats, depth);
    CHECK((tree.level(depth) == block_skipping_oracle(x, lengths, depth)).all());
    CHECK(tree.consistent());
    CHECK(tree.total() == n - blocks * static_cast<std::uint64_t>(depth));

    if (blocks > 1 && depth > 0) {
      // A single serial pass would also count the first D symbols of later
      // blocks, so its total is larger.
      CHECK(count_block(x, depth).counts.sum() > tree.total());
    }
  }
}

TEST_CASE("consistent() detects a broken child-sum relation") {
  auto tree = CountsTree::from_leaves(count_block(seq("0110100111010"), 2).counts, 2);
  CHECK(tree.consistent());
  std::vector<CountTable> levels{tree.level(0), tree.level(1), tree.level(2)};
  levels[1](0, 0) += 1;
  CHECK_FALSE(CountsTree(levels).consistent());
  CHECK_THROWS_AS(CountsTree(std::vector<CountTable>{CountTable::Zero(2, 2)}), ConfigError);
}
