#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ptpmdl/arith.hpp"
#include "ptpmdl/quantizer.hpp"

using namespace ptpmdl;

namespace {

// Information content under the integer probabilities the coder actually uses.
double ideal_bits(std::span<const Symbol> x, std::span<const ProbabilityAssignment> p) {
  double bits = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) bits -= std::log2(p[i].probability_of(x[i]));
  return bits;
}

ProbabilitySource replay(const std::vector<ProbabilityAssignment>& p) {
  return [&p](std::span<const Symbol> done) { return p[done.size()]; };
}

CodedPayload truncated(CodedPayload c, std::uint64_t drop) {
  c.bit_length -= drop;
  c.bytes.resize(packed_size(c.bit_length));
  if (c.bit_length % 8) c.bytes.back() &= static_cast<std::uint8_t>(0xFFu << (8 - c.bit_length % 8));
  return c;
}

}  // namespace

TEST_CASE("probability assignment scaling") {
  CHECK(probability_bits(10000) == 14);
  CHECK(probability_bits(1) == 14);
  CHECK(probability_bits(1u << 20) == 18);
  CHECK(probability_bits((1u << 20) + 1) == 19);
  CHECK(probability_bits(std::uint64_t{1} << 40) == 30);

  CHECK(ProbabilityAssignment::from_real(0.5, 14).one == 8192);
  CHECK(ProbabilityAssignment::from_real(0.0, 14).one == 1);
  CHECK(ProbabilityAssignment::from_real(1.0, 14).one == 16383);
  CHECK(ProbabilityAssignment::from_real(1.5 / 16384.0, 14).one == 2);  // half rounds up
  CHECK(ProbabilityAssignment::from_real(0.3, 14).p1() == doctest::Approx(0.3).epsilon(1e-4));
}

TEST_CASE("p = 1/2 codes one bit per symbol") {
  const auto half = ProbabilityAssignment::from_real(0.5, 14);
  std::mt19937_64 rng(4);
  Sequence x(1000);
  for (auto& s : x) s = rng() & 1u;
  const std::vector<ProbabilityAssignment> p(x.size(), half);
  const auto c = encode_binary(x, p);
  CHECK(c.bit_length >= 1000);
  CHECK(c.bit_length <= 1002);
  CHECK(c.bytes.size() == packed_size(c.bit_length));
  CHECK(decode_binary(c, replay(p), x.size()) == x);
}

TEST_CASE("empty input flushes at most two bits") {
  const auto c = encode_binary({}, {});
  CHECK(c.bit_length <= 2);
  CHECK(decode_binary(c, replay({}), 0).empty());
  CHECK(encode_uniform({}, 178).bit_length <= 2);
  CHECK(decode_uniform(encode_uniform({}, 178), 178, 0).empty());
}

TEST_CASE("round trip on random static tables, including grid extremes") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = rng() % 3000;
    const int s = probability_bits(std::max<std::uint64_t>(n, 1) << (rng() % 12));
    const auto g = build_grid(1 + rng() % 100000);
    std::vector<ProbabilityAssignment> table;
    table.push_back(ProbabilityAssignment::from_real(g.levels[0], s));
    table.push_back(ProbabilityAssignment::from_real(g.levels[g.size - 1], s));
    for (int k = 0; k < 6; ++k) table.push_back(ProbabilityAssignment::from_real(g.levels[rng() % g.size], s));

    Sequence x(n);
    std::vector<ProbabilityAssignment> p(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = table[rng() % table.size()];
      // Draw mostly from the assigned probability, sometimes against it.
      x[i] = trial % 5 == 0 ? static_cast<Symbol>(rng() & 1u) : static_cast<Symbol>(u(rng) < p[i].p1());
    }
    const auto c = encode_binary(x, p);
    REQUIRE(decode_binary(c, replay(p), n) == x);
  }
}

TEST_CASE("length contract against the ideal information content") {
  std::mt19937_64 rng(31);
  const double theta[] = {0.03, 0.98, 0.95, 0.97};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10000;
    const int s = probability_bits(n);
    const auto g = build_grid(n);
    Sequence x(n);
    std::vector<ProbabilityAssignment> p(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = ProbabilityAssignment::from_real(quantize(theta[rng() % 4], g).level, s);
      x[i] = u(rng) < p[i].p1();
    }
    const auto c = encode_binary(x, p);
    const double excess = static_cast<double>(c.bit_length) - ideal_bits(x, p);
    const double slack = 2.0 + static_cast<double>(n) * std::ldexp(1.0, -s) * std::numbers::log2e + 1.0;
    CHECK(excess >= 0.0);
    CHECK(excess <= slack);
    CHECK(excess <= 8.0);
  }
}

TEST_CASE("uniform coding") {
  std::mt19937_64 rng(6);
  for (std::uint32_t k : {2u, 178u, 1000u}) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::uint32_t> v(rng() % 300);
      for (auto& e : v) e = static_cast<std::uint32_t>(rng() % k);
      const auto c = encode_uniform(v, k);
      CHECK(static_cast<double>(c.bit_length) <= static_cast<double>(v.size()) * std::log2(double(k)) + 3.0);
      REQUIRE(decode_uniform(c, k, v.size()) == v);
    }
  }

  const std::vector<std::uint32_t> four{0, 177, 91, 3};
  CHECK(encode_uniform(four, 178).bit_length <= 32);  // 4 log2 178 + 2 = 31.9

  // K = 2 behaves like p = 1/2.
  const std::vector<std::uint32_t> bits{1, 0, 0, 1, 1, 1, 0};
  Sequence as_symbols(bits.begin(), bits.end());
  const std::vector<ProbabilityAssignment> half(bits.size(), ProbabilityAssignment::from_real(0.5, 14));
  CHECK(encode_uniform(bits, 2).bit_length == encode_binary(as_symbols, half).bit_length);

  CHECK_THROWS_AS(encode_uniform(std::vector<std::uint32_t>{178}, 178), ConfigError);
}

TEST_CASE("truncated or padded payloads are rejected") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 50 + rng() % 500;
    Sequence x(n);
    for (auto& s : x) s = (rng() % 10) < 3;
    const std::vector<ProbabilityAssignment> p(n, ProbabilityAssignment::from_real(0.3, 14));
    const auto c = encode_binary(x, p);
    const auto drop = 1 + rng() % std::min<std::uint64_t>(c.bit_length, 40);
    CHECK_THROWS_AS(decode_binary(truncated(c, drop), replay(p), n), FormatError);

    auto longer = c;
    longer.bit_length += 1 + rng() % 9;
    longer.bytes.resize(packed_size(longer.bit_length));
    CHECK_THROWS_AS(decode_binary(longer, replay(p), n), FormatError);
  }

  std::vector<std::uint32_t> v(40);
  for (auto& e : v) e = static_cast<std::uint32_t>(rng() % 178);
  CHECK_THROWS_AS(decode_uniform(truncated(encode_uniform(v, 178), 5), 178, v.size()), FormatError);
}

TEST_CASE("identical inputs give identical payloads") {
  std::mt19937_64 rng(8);
  Sequence x(5000);
  std::vector<ProbabilityAssignment> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng() & 1u;
    p[i] = {static_cast<std::uint32_t>(1 + rng() % 16383), 14};
  }
  CHECK(encode_binary(x, p) == encode_binary(x, p));
}
