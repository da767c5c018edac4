#ifndef PTPMDL_EXPERIMENT_HPP
#define PTPMDL_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ptpmdl/codec.hpp"

namespace ptpmdl {

/// Coding-length sweep: for every repetition a fresh sequence is drawn from
/// the source (seed = seed + rep) and coded with every (mode, B) pair.
struct ExperimentSpec {
  std::optional<std::filesystem::path> source;  ///< none: the built-in four-state source
  std::uint64_t length = 10000;
  int depth = 5;
  std::vector<std::uint32_t> blocks{1, 2, 4, 8, 16};
  std::vector<Mode> modes{Mode::ptp_mdl, Mode::naive, Mode::markov, Mode::naive_markov};
  std::uint32_t repetitions = 200;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> output;
};

/// key = value lines, `#` comments. Keys: source, length, depth, blocks
/// (comma list), modes (comma list), repetitions, seed, output. Relative
/// paths resolve against `base_dir`.
ExperimentSpec parse_experiment_spec(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// Throws ConfigError if any (length, B, depth) violates 2^D <= floor(N/B)
/// or repetitions is 0.
void validate(const ExperimentSpec& spec);

struct ExperimentRow {
  Mode mode = Mode::ptp_mdl;
  std::uint32_t blocks = 1;
  std::uint32_t rep = 0;
  std::uint64_t seed = 0;
  Measurement m;

  /// actual_bits - ml_entropy
  double redundancy() const { return static_cast<double>(m.actual_bits) - m.report.ml_entropy; }
};

/// Rows sorted by (mode, blocks, rep); content is independent of `workers`
/// apart from the timing fields.
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec, unsigned workers = 1);

/// Column order: mode,blocks,rep,seed,analytic_bits,actual_bits,states,
/// ml_entropy,redundancy,theorem1_bound,container_bytes,phase1_ms,model_ms,
/// phase2_ms,decode_ms
void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows, bool timings = true);

struct GroupMeans {
  Mode mode = Mode::ptp_mdl;
  std::uint32_t blocks = 1;
  std::size_t runs = 0;
  double actual_bits = 0.0;
  double analytic_bits = 0.0;
  double redundancy = 0.0;
  double theorem1_bound = 0.0;
  double states = 0.0;
};

std::vector<GroupMeans> summarize(const std::vector<ExperimentRow>& rows);

/// Mean row for one (mode, B); throws ConfigError if absent.
const GroupMeans& find_group(const std::vector<GroupMeans>& groups, Mode mode, std::uint32_t blocks);

}  // namespace ptpmdl

#endif  // PTPMDL_EXPERIMENT_HPP
