// ptpmdl: compress/decompress bit sequences with parallel two-pass MDL coding,
// generate tree-source data, and run coding-length experiments.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data/format error.

#include <CLI11.hpp>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "ptpmdl/codec.hpp"
#include "ptpmdl/experiment.hpp"
#include "ptpmdl/source_model.hpp"

namespace fs = std::filesystem;
using namespace ptpmdl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes through a temporary sibling so a failed run never leaves a partial file.
void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw ConfigError("write failed for " + path.string());
    }
  }
  fs::rename(tmp, path);
}

Sequence unpack_bytes(std::span<const std::uint8_t> bytes) {
  Sequence x;
  x.reserve(bytes.size() * 8);
  for (auto byte : bytes)
    for (int bit = 7; bit >= 0; --bit) x.push_back(static_cast<Symbol>((byte >> bit) & 1u));
  return x;
}

std::vector<std::uint8_t> pack_symbols(std::span<const Symbol> x) { return pack_bits(x); }

int default_depth(std::uint64_t n, std::uint32_t blocks) {
  if (blocks == 0 || n / blocks == 0) return 0;
  return std::min(8, static_cast<int>(std::bit_width(n / blocks)) - 1);
}

struct CompressArgs {
  fs::path input, output;
  std::uint32_t blocks = 1;
  std::optional<int> depth;
  std::string mode = "ptp-mdl";
  unsigned workers = 1;
  bool no_verify = false;
};

int cmd_compress(const CompressArgs& a) {
  const auto bytes = read_file(a.input);
  const auto x = unpack_bytes(bytes);
  EncodeConfig cfg{a.blocks, a.depth.value_or(default_depth(x.size(), a.blocks)), parse_mode(a.mode), a.workers};
  validate(cfg, x.size());

  const auto result = encode_detailed(x, cfg);
  const auto out = serialize(result.container);
  if (!a.no_verify) {
    const auto back = decompress(out, a.workers);
    if (back != x) throw InternalError("verification failed: decoded output differs from the input");
  }
  write_file(a.output, out);

  std::size_t states = 0;
  for (const auto& m : result.models) states = std::max(states, m.structure.size());
  double analytic = 0.0;
  const bool described = is_pruned(cfg.mode);
  if (is_naive(cfg.mode)) {
    for (std::size_t b = 0; b < result.models.size(); ++b) {
      const auto& len = result.container.block_lengths[b];
      const auto r = report_lengths(result.models[b], result.counts[b], described, len, std::span(&len, 1), cfg.depth);
      analytic += r.l_phase1 + r.l_phase2;
    }
  } else {
    const auto r = report_lengths(result.models[0], result.counts[0], described, x.size(),
                                  result.container.block_lengths, cfg.depth);
    analytic = r.l_phase1 + r.l_phase2;
  }
  const auto actual = result.container.coded_bits();
  std::cout << "N=" << x.size() << " B=" << cfg.blocks << " D=" << cfg.depth << " mode=" << to_string(cfg.mode)
            << " states=" << states << '\n'
            << std::fixed << std::setprecision(2) << "analytic_bits=" << analytic << " actual_bits=" << actual
            << " container_bytes=" << out.size() << " bits_per_symbol="
            << std::setprecision(5) << (x.empty() ? 0.0 : static_cast<double>(actual) / static_cast<double>(x.size()))
            << '\n';
  return kExitOk;
}

int cmd_decompress(const fs::path& input, const fs::path& output, unsigned workers) {
  const auto x = decompress(read_file(input), workers);
  write_file(output, pack_symbols(x));
  return kExitOk;
}

int cmd_gen(const std::optional<fs::path>& source_path, std::uint64_t n, std::uint64_t seed, const fs::path& output) {
  const auto source = source_path ? load_tree_source(*source_path) : four_state_source();
  write_file(output, pack_symbols(generate(source, n, seed)));
  return kExitOk;
}

int cmd_experiment(const fs::path& spec_path, std::optional<fs::path> output, unsigned workers, bool timings) {
  auto spec = load_experiment_spec(spec_path);
  if (output) spec.output = output;
  validate(spec);
  const auto rows = run_experiment(spec, workers);

  std::ostringstream csv;
  write_csv(csv, rows, timings);
  const auto text = csv.str();
  if (spec.output)
    write_file(*spec.output, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  else
    std::cout << text;

  auto& log = spec.output ? std::cout : std::cerr;
  log << std::left << std::setw(14) << "mode" << std::right << std::setw(4) << "B" << std::setw(14) << "mean_bits"
      << std::setw(14) << "redundancy" << std::setw(14) << "bound" << std::setw(10) << "states" << '\n';
  for (const auto& g : summarize(rows))
    log << std::left << std::setw(14) << to_string(g.mode) << std::right << std::setw(4) << g.blocks << std::fixed
        << std::setprecision(2) << std::setw(14) << g.actual_bits << std::setw(14) << g.redundancy << std::setw(14)
        << g.theorem1_bound << std::setw(10) << g.states << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel two-pass MDL compression for binary tree sources"};
  app.require_subcommand(1);

  CompressArgs ca;
  auto* compress = app.add_subcommand("compress", "Compress a file (read as bits, MSB first)");
  compress->add_option("input", ca.input, "Input file")->required();
  compress->add_option("output", ca.output, "Output container")->required();
  compress->add_option("-B,--blocks", ca.blocks, "Number of blocks / parallel units")->check(CLI::PositiveNumber);
  compress->add_option("-D,--depth", ca.depth, "Maximum context depth (default: min(8, log2(N/B)))");
  compress->add_option("-m,--mode", ca.mode, "ptp-mdl | naive | markov | naive-markov");
  compress->add_option("-w,--workers", ca.workers, "Worker threads")->check(CLI::PositiveNumber);
  compress->add_flag("--no-verify", ca.no_verify, "Skip the decode check");

  fs::path d_in, d_out;
  unsigned d_workers = 1;
  auto* decompress_cmd = app.add_subcommand("decompress", "Restore a file from a container");
  decompress_cmd->add_option("input", d_in, "Input container")->required();
  decompress_cmd->add_option("output", d_out, "Output file")->required();
  decompress_cmd->add_option("-w,--workers", d_workers, "Worker threads")->check(CLI::PositiveNumber);

  std::optional<fs::path> g_source;
  std::uint64_t g_n = 10000, g_seed = 1;
  fs::path g_out;
  auto* gen = app.add_subcommand("gen", "Generate symbols from a tree source (bit-packed, MSB first)");
  gen->add_option("-s,--source", g_source, "Source config (default: built-in four-state source)");
  gen->add_option("-n,--length", g_n, "Number of symbols");
  gen->add_option("--seed", g_seed, "PRNG seed");
  gen->add_option("output", g_out, "Output file")->required();

  fs::path e_spec;
  std::optional<fs::path> e_out;
  unsigned e_workers = 1;
  bool e_no_timing = false;
  auto* experiment = app.add_subcommand("experiment", "Run a coding-length sweep and write CSV");
  experiment->add_option("spec", e_spec, "Experiment spec file")->required();
  experiment->add_option("-o,--output", e_out, "CSV output (overrides the spec)");
  experiment->add_option("-w,--workers", e_workers, "Repetitions run in parallel")->check(CLI::PositiveNumber);
  experiment->add_flag("--no-timing", e_no_timing, "Write zeros in the timing columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*compress) return cmd_compress(ca);
    if (*decompress_cmd) return cmd_decompress(d_in, d_out, d_workers);
    if (*gen) return cmd_gen(g_source, g_n, g_seed, g_out);
    if (*experiment) return cmd_experiment(e_spec, e_out, e_workers, !e_no_timing);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitConfig;
}
