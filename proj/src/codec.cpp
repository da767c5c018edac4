#include "ptpmdl/codec.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include "parallel.hpp"

namespace ptpmdl {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

/// Everything a coding unit needs from a model: generator table plus one
/// integer probability per state.
struct CodingModel {
  GeneratorStateTable table;
  std::vector<ProbabilityAssignment> probs;
};

CodingModel coding_model(const TreeStructure& structure, std::span<const QuantizedParam> params, int depth,
                         std::uint64_t model_length) {
  CodingModel m{build_generator_table(structure, depth), {}};
  const int scale = probability_bits(model_length);
  for (const auto& p : params) m.probs.push_back(ProbabilityAssignment::from_real(p.level, scale));
  return m;
}

QuantizerGrid grid_for(std::uint64_t model_length) { return build_grid(std::max<std::uint64_t>(model_length, 1)); }

ModelSection describe(const PrunedModel& model, Mode mode, int depth) {
  ModelSection s;
  if (is_pruned(mode)) s.natural = natural_encode(model.structure, depth);
  std::vector<std::uint32_t> indices;
  indices.reserve(model.params.size());
  for (const auto& p : model.params) indices.push_back(p.index);
  s.params = encode_uniform(indices, model.grid_levels);
  return s;
}

struct DecodedModel {
  TreeStructure structure;
  std::vector<QuantizedParam> params;
};

DecodedModel read_model(const ModelSection& s, Mode mode, int depth, std::uint64_t model_length) {
  DecodedModel m;
  if (is_pruned(mode)) {
    auto nat = natural_decode(s.natural, depth);
    if (nat.consumed != s.natural.size()) throw FormatError("natural code has unused bits");
    m.structure = std::move(nat.structure);
  } else {
    if (!s.natural.empty()) throw FormatError("markov model must not carry a structure description");
    m.structure = TreeStructure::full(depth);
  }
  const auto grid = grid_for(model_length);
  for (auto k : decode_uniform(s.params, grid.size, m.structure.size())) m.params.push_back(dequantize(k, grid));
  return m;
}

BlockSection code_block(std::span<const Symbol> block, const CodingModel& model, int depth,
                        std::uint64_t& visits) {
  const auto d = static_cast<std::size_t>(depth);
  BlockSection s;
  s.context.assign(block.begin(), block.begin() + static_cast<std::ptrdiff_t>(d));
  ArithmeticEncoder enc;
  ContextIndex c = context_index(block.first(d));
  for (std::size_t i = d; i < block.size(); ++i) {
    enc.encode_bit(block[i], model.probs[model.table[c]]);
    c = advance_index(c, block[i], block[i - d], depth);
  }
  visits = enc.symbols();
  s.payload = enc.finish();
  return s;
}

void decode_block(const BlockSection& s, const CodingModel& model, int depth, std::span<Symbol> out,
                  std::uint64_t& visits) {
  const auto d = static_cast<std::size_t>(depth);
  if (s.context.size() != d || out.size() < d) throw FormatError("block context does not match the depth");
  for (std::size_t i = 0; i < d; ++i) {
    if (s.context[i] > 1) throw FormatError("block context holds a non-binary symbol");
    out[i] = s.context[i];
  }
  ArithmeticDecoder dec(s.payload);
  ContextIndex c = context_index(out.first(d));
  for (std::size_t i = d; i < out.size(); ++i) {
    out[i] = dec.decode_bit(model.probs[model.table[c]]);
    c = advance_index(c, out[i], out[i - d], depth);
  }
  dec.finish();
  visits = out.size() - d;
}

std::vector<std::uint64_t> block_offsets(std::span<const std::uint64_t> lengths) {
  std::vector<std::uint64_t> offsets(lengths.size() + 1, 0);
  for (std::size_t b = 0; b < lengths.size(); ++b) offsets[b + 1] = offsets[b] + lengths[b];
  return offsets;
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::ptp_mdl: return "ptp-mdl";
    case Mode::naive: return "naive";
    case Mode::markov: return "markov";
    case Mode::naive_markov: return "naive-markov";
  }
  return "unknown";
}

Mode parse_mode(std::string_view name) {
  if (name == "ptp-mdl" || name == "ptp") return Mode::ptp_mdl;
  if (name == "naive" || name == "naive-mdl") return Mode::naive;
  if (name == "markov" || name == "ptp-markov") return Mode::markov;
  if (name == "naive-markov") return Mode::naive_markov;
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

void validate(const EncodeConfig& cfg, std::uint64_t n) {
  if (cfg.blocks == 0) throw ConfigError("block count must be at least 1");
  if (cfg.depth < 0 || cfg.depth > kMaxDepth) throw ConfigError("context depth out of range");
  if (n == 0) {
    if (cfg.blocks != 1 || cfg.depth != 0) throw ConfigError("an empty input needs one block and depth 0");
    return;
  }
  const std::uint64_t per_block = n / cfg.blocks;
  if (per_block == 0) throw ConfigError("fewer symbols than blocks");
  if ((std::uint64_t{1} << cfg.depth) > per_block)
    throw ConfigError("depth " + std::to_string(cfg.depth) + " exceeds log2(N/B) = log2(" +
                      std::to_string(per_block) + ")");
}

std::vector<std::uint64_t> partition(std::uint64_t n, std::uint32_t blocks) {
  if (blocks == 0) throw ConfigError("block count must be at least 1");
  std::vector<std::uint64_t> lengths(blocks, n / blocks);
  lengths.back() += n % blocks;
  return lengths;
}

GeneratorStateTable build_generator_table(const TreeStructure& structure, int depth) {
  if (structure.depth() > depth) throw ConfigError("structure is deeper than the table depth");
  GeneratorStateTable table(std::size_t{1} << depth);
  const auto& nodes = structure.nodes();
  std::function<void(std::size_t, int, std::uint64_t)> walk = [&](std::size_t node, int d, std::uint64_t index) {
    if (nodes[node].leaf >= 0) {
      const auto first = index << (depth - d);
      const auto last = (index + 1) << (depth - d);
      std::fill(table.begin() + static_cast<std::ptrdiff_t>(first), table.begin() + static_cast<std::ptrdiff_t>(last),
                static_cast<std::uint32_t>(nodes[node].leaf));
      return;
    }
    // Prepending an older symbol b makes it the new least significant bit.
    for (std::uint64_t b = 0; b < 2; ++b)
      walk(static_cast<std::size_t>(nodes[node].child[b]), d + 1, 2 * index + b);
  };
  walk(0, 0, 0);
  return table;
}

EncodeResult encode_detailed(std::span<const Symbol> x, const EncodeConfig& cfg) {
  validate(cfg, x.size());
  if (std::any_of(x.begin(), x.end(), [](Symbol s) { return s > 1; }))
    throw ConfigError("input holds a non-binary symbol");

  const int depth = cfg.depth;
  const auto lengths = partition(x.size(), cfg.blocks);
  const auto offsets = block_offsets(lengths);
  const std::size_t blocks = lengths.size();
  auto block_of = [&](std::size_t b) {
    return x.subspan(static_cast<std::size_t>(offsets[b]), static_cast<std::size_t>(lengths[b]));
  };

  EncodeResult out;
  out.container.mode = cfg.mode;
  out.container.depth = depth;
  out.container.length = x.size();
  out.container.block_lengths = lengths;
  out.container.blocks.resize(blocks);
  out.work.phase1.assign(blocks, 0);
  out.work.phase2.assign(blocks, 0);

  auto estimate = [&](const CountsTree& counts, std::uint64_t model_length) {
    const auto grid = grid_for(model_length);
    return is_pruned(cfg.mode) ? prune(counts, grid) : full_model(counts, grid);
  };

  if (!is_naive(cfg.mode)) {
    // Phase I: each unit counts its block; the coordinator reduces and prunes.
    auto start = Clock::now();
    std::vector<BlockCounts> stats(blocks);
    detail::parallel_for(blocks, cfg.workers, [&](std::size_t b) {
      stats[b] = count_block(block_of(b), depth);
      out.work.phase1[b] = stats[b].visits;
    });
    out.counts.push_back(aggregate(stats, depth));
    out.timing.phase1_ms = elapsed_ms(start);

    start = Clock::now();
    out.models.push_back(estimate(out.counts[0], x.size()));
    out.container.models.push_back(describe(out.models[0], cfg.mode, depth));
    const auto model = coding_model(out.models[0].structure, out.models[0].params, depth, x.size());
    out.timing.model_ms = elapsed_ms(start);

    // Phase II: every unit codes its block against the shared model.
    start = Clock::now();
    detail::parallel_for(blocks, cfg.workers, [&](std::size_t b) {
      out.container.blocks[b] = code_block(block_of(b), model, depth, out.work.phase2[b]);
    });
    out.timing.phase2_ms = elapsed_ms(start);
    return out;
  }

  // Naive parallel: every block is a self-contained two-pass code.
  out.counts.resize(blocks);
  out.models.resize(blocks);
  out.container.models.resize(blocks);
  std::vector<double> p1(blocks), pm(blocks), p2(blocks);
  detail::parallel_for(blocks, cfg.workers, [&](std::size_t b) {
    auto start = Clock::now();
    const auto stats = count_block(block_of(b), depth);
    out.work.phase1[b] = stats.visits;
    out.counts[b] = aggregate(std::span(&stats, 1), depth);
    p1[b] = elapsed_ms(start);

    start = Clock::now();
    out.models[b] = estimate(out.counts[b], lengths[b]);
    out.container.models[b] = describe(out.models[b], cfg.mode, depth);
    const auto model = coding_model(out.models[b].structure, out.models[b].params, depth, lengths[b]);
    pm[b] = elapsed_ms(start);

    start = Clock::now();
    out.container.blocks[b] = code_block(block_of(b), model, depth, out.work.phase2[b]);
    p2[b] = elapsed_ms(start);
  });
  // Blocks run concurrently, so report the slowest unit per phase.
  out.timing.phase1_ms = *std::max_element(p1.begin(), p1.end());
  out.timing.model_ms = *std::max_element(pm.begin(), pm.end());
  out.timing.phase2_ms = *std::max_element(p2.begin(), p2.end());
  return out;
}

Container encode(std::span<const Symbol> x, const EncodeConfig& cfg) { return encode_detailed(x, cfg).container; }

Sequence decode(const Container& c, unsigned workers, WorkCounters* work) {
  const std::size_t blocks = c.block_lengths.size();
  if (blocks == 0) throw FormatError("container has no blocks");
  if (c.blocks.size() != blocks || c.models.size() != (is_naive(c.mode) ? blocks : 1))
    throw FormatError("container sections do not match its block count");
  if (c.depth < 0 || c.depth > kMaxDepth) throw FormatError("context depth out of range");

  const auto offsets = block_offsets(c.block_lengths);
  if (offsets.back() != c.length) throw FormatError("block lengths do not add up to the sequence length");

  std::vector<CodingModel> models(c.models.size());
  detail::parallel_for(models.size(), workers, [&](std::size_t m) {
    const auto model_length = is_naive(c.mode) ? c.block_lengths[m] : c.length;
    const auto decoded = read_model(c.models[m], c.mode, c.depth, model_length);
    models[m] = coding_model(decoded.structure, decoded.params, c.depth, model_length);
  });

  Sequence x(static_cast<std::size_t>(c.length));
  std::vector<std::uint64_t> visits(blocks, 0);
  detail::parallel_for(blocks, workers, [&](std::size_t b) {
    const auto& model = models[is_naive(c.mode) ? b : 0];
    std::span<Symbol> out(x.data() + offsets[b], static_cast<std::size_t>(c.block_lengths[b]));
    decode_block(c.blocks[b], model, c.depth, out, visits[b]);
  });
  if (work) work->phase2 = std::move(visits);
  return x;
}

std::vector<std::uint8_t> compress(std::span<const Symbol> x, const EncodeConfig& cfg) {
  return serialize(encode(x, cfg));
}

Sequence decompress(std::span<const std::uint8_t> bytes, unsigned workers) {
  return decode(parse_container(bytes), workers);
}

Measurement measure(std::span<const Symbol> x, const EncodeConfig& cfg) {
  const auto enc = encode_detailed(x, cfg);
  const auto bytes = serialize(enc.container);

  Measurement m;
  m.timing = enc.timing;
  const auto start = Clock::now();
  const auto decoded = decompress(bytes, cfg.workers);
  m.decode_ms = elapsed_ms(start);
  if (!std::equal(decoded.begin(), decoded.end(), x.begin(), x.end()))
    throw InternalError("round trip failed: decoded sequence differs from the input");

  m.actual_bits = enc.container.coded_bits();
  m.container_bytes = bytes.size();
  const auto& lengths = enc.container.block_lengths;
  const bool described = is_pruned(cfg.mode);

  if (!is_naive(cfg.mode)) {
    m.report = report_lengths(enc.models[0], enc.counts[0], described, x.size(), lengths, cfg.depth);
    m.states = m.report.states;
    return m;
  }

  for (std::size_t b = 0; b < lengths.size(); ++b) {
    const auto r = report_lengths(enc.models[b], enc.counts[b], described, lengths[b],
                                  std::span(&lengths[b], 1), cfg.depth);
    m.report.l_phase1 += r.l_phase1;
    m.report.l_phase2 += r.l_phase2;
    m.report.model_bits += r.model_bits;
    m.report.param_bits += r.param_bits;
    m.report.part2_bits += r.part2_bits;
    m.report.ml_entropy += r.ml_entropy;
    m.report.redundancy += r.redundancy;
    m.states = std::max(m.states, r.states);
  }
  m.report.states = m.states;
  const double blocks = static_cast<double>(lengths.size());
  const double n = static_cast<double>(std::max<std::size_t>(x.size(), 1));
  m.report.theorem1_bound =
      blocks * (std::log2(std::max(n / blocks, 1.0)) + 2.0 +
                static_cast<double>(m.states) / 2.0 * (std::log2(n) + bound_constant()));
  return m;
}

}  // namespace ptpmdl
