#include "ptpmdl/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "parallel.hpp"

namespace ptpmdl {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (auto t = trim(item); !t.empty()) out.push_back(std::move(t));
  return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(value, &used);
    if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + value + "'");
  }
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentSpec spec;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value' on line " + std::to_string(lineno));
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "source") {
      if (value == "builtin") spec.source.reset();
      else spec.source = resolve(value);
    } else if (key == "length") {
      spec.length = to_unsigned(key, value);
    } else if (key == "depth") {
      spec.depth = static_cast<int>(to_unsigned(key, value));
    } else if (key == "blocks") {
      spec.blocks.clear();
      for (const auto& b : split_list(value)) spec.blocks.push_back(static_cast<std::uint32_t>(to_unsigned(key, b)));
    } else if (key == "modes") {
      spec.modes.clear();
      for (const auto& m : split_list(value)) spec.modes.push_back(parse_mode(m));
    } else if (key == "repetitions") {
      spec.repetitions = static_cast<std::uint32_t>(to_unsigned(key, value));
    } else if (key == "seed") {
      spec.seed = to_unsigned(key, value);
    } else if (key == "output") {
      spec.output = resolve(value);
    } else {
      throw ConfigError("unknown experiment key '" + key + "' on line " + std::to_string(lineno));
    }
  }
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open experiment spec " + path.string());
  return parse_experiment_spec(in, path.parent_path());
}

void validate(const ExperimentSpec& spec) {
  if (spec.repetitions == 0) throw ConfigError("repetitions must be at least 1");
  if (spec.blocks.empty()) throw ConfigError("experiment needs at least one block count");
  if (spec.modes.empty()) throw ConfigError("experiment needs at least one mode");
  if (spec.length == 0) throw ConfigError("experiment length must be positive");
  for (auto b : spec.blocks) validate(EncodeConfig{b, spec.depth, Mode::ptp_mdl, 1}, spec.length);
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec, unsigned workers) {
  validate(spec);
  const TreeSource source = spec.source ? load_tree_source(*spec.source) : four_state_source();

  const std::size_t per_rep = spec.modes.size() * spec.blocks.size();
  std::vector<ExperimentRow> rows(per_rep * spec.repetitions);
  detail::parallel_for(spec.repetitions, workers, [&](std::size_t rep) {
    const std::uint64_t seed = spec.seed + rep;
    const auto x = generate(source, spec.length, seed);
    std::size_t slot = rep * per_rep;
    for (auto mode : spec.modes)
      for (auto b : spec.blocks) {
        auto& row = rows[slot++];
        row.mode = mode;
        row.blocks = b;
        row.rep = static_cast<std::uint32_t>(rep);
        row.seed = seed;
        row.m = measure(x, EncodeConfig{b, spec.depth, mode, 1});
      }
  });
  std::stable_sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
    return std::tie(a.mode, a.blocks, a.rep) < std::tie(b.mode, b.blocks, b.rep);
  });
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows, bool timings) {
  out << "mode,blocks,rep,seed,analytic_bits,actual_bits,states,ml_entropy,redundancy,theorem1_bound,"
         "container_bytes,phase1_ms,model_ms,phase2_ms,decode_ms\n";
  std::ostringstream line;
  for (const auto& r : rows) {
    const auto& rep = r.m.report;
    const auto t = [&](double ms) { return timings ? ms : 0.0; };
    line.str({});
    line.precision(10);
    line << to_string(r.mode) << ',' << r.blocks << ',' << r.rep << ',' << r.seed << ','
         << rep.l_phase1 + rep.l_phase2 << ',' << r.m.actual_bits << ',' << r.m.states << ',' << rep.ml_entropy
         << ',' << r.redundancy() << ',' << rep.theorem1_bound << ',' << r.m.container_bytes << ','
         << t(r.m.timing.phase1_ms) << ',' << t(r.m.timing.model_ms) << ',' << t(r.m.timing.phase2_ms) << ','
         << t(r.m.decode_ms) << '\n';
    out << line.str();
  }
}

std::vector<GroupMeans> summarize(const std::vector<ExperimentRow>& rows) {
  std::map<std::pair<Mode, std::uint32_t>, GroupMeans> groups;
  for (const auto& r : rows) {
    auto& g = groups[{r.mode, r.blocks}];
    g.mode = r.mode;
    g.blocks = r.blocks;
    ++g.runs;
    g.actual_bits += static_cast<double>(r.m.actual_bits);
    g.analytic_bits += r.m.report.l_phase1 + r.m.report.l_phase2;
    g.redundancy += r.redundancy();
    g.theorem1_bound += r.m.report.theorem1_bound;
    g.states += static_cast<double>(r.m.states);
  }
  std::vector<GroupMeans> out;
  for (auto& [key, g] : groups) {
    const double n = static_cast<double>(g.runs);
    g.actual_bits /= n;
    g.analytic_bits /= n;
    g.redundancy /= n;
    g.theorem1_bound /= n;
    g.states /= n;
    out.push_back(g);
  }
  return out;
}

const GroupMeans& find_group(const std::vector<GroupMeans>& groups, Mode mode, std::uint32_t blocks) {
  for (const auto& g : groups)
    if (g.mode == mode && g.blocks == blocks) return g;
  throw ConfigError("no results for mode " + std::string(to_string(mode)) + " with B=" + std::to_string(blocks));
}

}  // namespace ptpmdl
