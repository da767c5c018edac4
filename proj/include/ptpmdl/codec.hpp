#ifndef PTPMDL_CODEC_HPP
#define PTPMDL_CODEC_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptpmdl/arith.hpp"
#include "ptpmdl/context_stats.hpp"
#include "ptpmdl/ctp.hpp"
#include "ptpmdl/source_model.hpp"

namespace ptpmdl {

/// How the model is estimated and shared.
///   ptp_mdl       one pruned model for the whole sequence (the default)
///   naive         every block estimates, describes and uses its own pruned model
///   markov        one full depth-D model for the whole sequence, no pruning
///   naive_markov  per-block full depth-D models
enum class Mode : std::uint8_t { ptp_mdl = 0, naive = 1, markov = 2, naive_markov = 3 };

std::string_view to_string(Mode mode);
/// Accepts ptp-mdl (or ptp), naive, markov (or ptp-markov), naive-markov.
Mode parse_mode(std::string_view name);

inline bool is_naive(Mode m) { return m == Mode::naive || m == Mode::naive_markov; }
inline bool is_pruned(Mode m) { return m == Mode::ptp_mdl || m == Mode::naive; }

struct EncodeConfig {
  std::uint32_t blocks = 1;
  int depth = 0;
  Mode mode = Mode::ptp_mdl;
  unsigned workers = 1;  ///< execution detail, never changes the output
};

/// Throws ConfigError unless cfg is usable for n symbols: B >= 1 and
/// 2^D <= floor(n/B). An empty input is accepted only with B = 1, D = 0.
void validate(const EncodeConfig& cfg, std::uint64_t n);

/// B contiguous block lengths; the last block takes the remainder.
std::vector<std::uint64_t> partition(std::uint64_t n, std::uint32_t blocks);

/// Leaf index of the generator state for every depth-D context index.
using GeneratorStateTable = std::vector<std::uint32_t>;

/// Built in O(2^D) by walking the structure: a leaf at depth d covers the
/// contiguous index range whose top d bits spell it.
GeneratorStateTable build_generator_table(const TreeStructure& structure, int depth);

struct ModelSection {
  BitString natural;    ///< natural code of the structure; empty in markov modes
  CodedPayload params;  ///< uniform-coded bin indices, depth-first leaf order

  friend bool operator==(const ModelSection&, const ModelSection&) = default;
};

struct BlockSection {
  BitString context;     ///< the first D symbols of the block, stored raw
  CodedPayload payload;  ///< arithmetic-coded symbols D+1..length

  friend bool operator==(const BlockSection&, const BlockSection&) = default;
};

/// Parsed form of the compressed stream. See README for the byte layout.
struct Container {
  Mode mode = Mode::ptp_mdl;
  int depth = 0;
  std::uint64_t length = 0;
  std::vector<std::uint64_t> block_lengths;
  std::vector<ModelSection> models;  ///< 1, or one per block in naive modes
  std::vector<BlockSection> blocks;

  /// Information bits: natural codes, parameter payloads, raw contexts and
  /// block payloads. Excludes header, length fields, padding and checksum.
  std::uint64_t coded_bits() const;

  friend bool operator==(const Container&, const Container&) = default;
};

inline constexpr std::uint8_t kContainerVersion = 1;

std::vector<std::uint8_t> serialize(const Container& container);
/// Throws FormatError on any inconsistency (magic, version, checksum,
/// truncation, trailing bytes, impossible sizes).
Container parse_container(std::span<const std::uint8_t> bytes);

/// Per-unit symbol visits: phase1[b] symbols counted by unit b, phase2[b]
/// symbols arithmetic-coded by unit b.
struct WorkCounters {
  std::vector<std::uint64_t> phase1;
  std::vector<std::uint64_t> phase2;
};

struct PhaseTimings {
  double phase1_ms = 0.0;  ///< block counting + aggregation
  double model_ms = 0.0;   ///< pruning and model description
  double phase2_ms = 0.0;  ///< block coding
};

struct EncodeResult {
  Container container;
  std::vector<PrunedModel> models;  ///< parallel to container.models
  std::vector<CountsTree> counts;   ///< statistics each model was estimated from
  WorkCounters work;
  PhaseTimings timing;
};

EncodeResult encode_detailed(std::span<const Symbol> x, const EncodeConfig& cfg);
Container encode(std::span<const Symbol> x, const EncodeConfig& cfg);

Sequence decode(const Container& container, unsigned workers = 1, WorkCounters* work = nullptr);

std::vector<std::uint8_t> compress(std::span<const Symbol> x, const EncodeConfig& cfg);
Sequence decompress(std::span<const std::uint8_t> bytes, unsigned workers = 1);

struct Measurement {
  LengthReport report;                ///< analytic lengths (summed over blocks in naive modes)
  std::uint64_t actual_bits = 0;      ///< Container::coded_bits()
  std::uint64_t container_bytes = 0;  ///< serialized size including framing
  std::size_t states = 0;             ///< |S|, or the largest per-block |S| in naive modes
  PhaseTimings timing;
  double decode_ms = 0.0;
};

/// Encodes, checks the round trip (throws InternalError on mismatch) and
/// reports analytic and actual lengths. In naive modes theorem1_bound holds the
/// naive bound B [log2(N/B) + 2 + |S_n|/2 (log2 N + c)].
Measurement measure(std::span<const Symbol> x, const EncodeConfig& cfg);

}  // namespace ptpmdl

#endif  // PTPMDL_CODEC_HPP
