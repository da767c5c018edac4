#include "ptpmdl/source_model.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <random>
#include <sstream>

namespace ptpmdl {

namespace {

struct TrieNode {
  std::array<std::int32_t, 2> child{-1, -1};
  bool leaf = false;
};

bool is_bit_string(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

}  // namespace

TreeStructure::TreeStructure() : nodes_(1), leaves_{std::string{}} { nodes_[0].leaf = 0; }

TreeStructure TreeStructure::from_leaves(std::vector<std::string> leaves) {
  if (leaves.empty()) throw ConfigError("tree structure has no states");

  std::vector<TrieNode> trie(1);
  for (const auto& s : leaves) {
    if (!is_bit_string(s)) throw ConfigError("state '" + s + "' is not a binary string");
    if (s.size() > static_cast<std::size_t>(kMaxDepth))
      throw ConfigError("state '" + s + "' exceeds the maximum depth");
    std::size_t node = 0;
    // Walk from the most recent symbol (last character) towards the oldest.
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (trie[node].leaf) throw ConfigError("states are not proper: a state is a suffix of '" + s + "'");
      const int sym = s[s.size() - 1 - k] - '0';
      if (trie[node].child[sym] < 0) {
        trie[node].child[sym] = static_cast<std::int32_t>(trie.size());
        trie.emplace_back();
      }
      node = static_cast<std::size_t>(trie[node].child[sym]);
    }
    if (trie[node].leaf) throw ConfigError("duplicate state '" + s + "'");
    if (trie[node].child[0] >= 0 || trie[node].child[1] >= 0)
      throw ConfigError("states are not proper: '" + s + "' is a suffix of another state");
    trie[node].leaf = true;
  }

  TreeStructure out;
  out.nodes_.clear();
  out.leaves_.clear();
  out.depth_ = 0;

  std::function<std::int32_t(std::size_t, const std::string&)> visit =
      [&](std::size_t t, const std::string& path) -> std::int32_t {
    const auto id = static_cast<std::int32_t>(out.nodes_.size());
    out.nodes_.emplace_back();
    if (trie[t].leaf) {
      out.nodes_[id].leaf = static_cast<std::int32_t>(out.leaves_.size());
      out.leaves_.push_back(path);
      out.depth_ = std::max(out.depth_, static_cast<int>(path.size()));
      return id;
    }
    if (trie[t].child[0] < 0 || trie[t].child[1] < 0)
      throw ConfigError("states are not complete: context '" + path + "' has a missing branch");
    for (int b = 0; b < 2; ++b) {
      const auto c = visit(static_cast<std::size_t>(trie[t].child[b]), std::string(1, char('0' + b)) + path);
      out.nodes_[id].child[b] = c;
    }
    return id;
  };
  visit(0, std::string{});
  return out;
}

TreeStructure TreeStructure::full(int depth) {
  if (depth < 0 || depth > kMaxDepth) throw ConfigError("depth out of range");
  std::vector<std::string> leaves;
  leaves.reserve(std::size_t{1} << depth);
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << depth); ++c) {
    std::string s(static_cast<std::size_t>(depth), '0');
    for (int j = 0; j < depth; ++j) s[j] = char('0' + ((c >> j) & 1u));
    leaves.push_back(std::move(s));
  }
  return from_leaves(std::move(leaves));
}

std::size_t TreeStructure::lookup(std::span<const Symbol> past) const {
  std::size_t node = 0;
  std::size_t k = 0;
  while (nodes_[node].leaf < 0) {
    if (k >= past.size()) throw ConfigError("past is shorter than the context depth");
    node = static_cast<std::size_t>(nodes_[node].child[past[past.size() - 1 - k] & 1u]);
    ++k;
  }
  return static_cast<std::size_t>(nodes_[node].leaf);
}

TreeSource::TreeSource(TreeStructure structure, std::vector<double> theta)
    : structure_(std::move(structure)), theta_(std::move(theta)) {
  if (theta_.size() != structure_.size())
    throw ConfigError("parameter count does not match the number of states");
  for (double p : theta_)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("state probability outside [0, 1]");
}

TreeSource TreeSource::from_map(const std::map<std::string, double>& theta) {
  std::vector<std::string> leaves;
  for (const auto& [s, p] : theta) leaves.push_back(s);
  auto structure = TreeStructure::from_leaves(std::move(leaves));
  std::vector<double> params;
  for (const auto& s : structure.leaves()) params.push_back(theta.at(s));
  return TreeSource(std::move(structure), std::move(params));
}

TreeSource four_state_source() {
  return TreeSource::from_map({{"0", 0.03}, {"11", 0.98}, {"001", 0.95}, {"101", 0.97}});
}

TreeSource parse_tree_source(std::istream& in) {
  std::map<std::string, double> theta;
  int declared_depth = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) continue;
    const auto where = " (line " + std::to_string(lineno) + ")";
    if (key == "depth") {
      if (!(fields >> declared_depth) || declared_depth < 0)
        throw ConfigError("bad depth declaration" + where);
      continue;
    }
    double p = 0.0;
    if (!(fields >> p)) throw ConfigError("expected '<state> <p1>'" + where);
    std::string rest;
    if (fields >> rest) throw ConfigError("trailing text" + where);
    if (key == "-") key.clear();
    if (!theta.emplace(key, p).second) throw ConfigError("duplicate state" + where);
  }
  auto source = TreeSource::from_map(theta);
  if (declared_depth >= 0 && declared_depth != source.structure().depth())
    throw ConfigError("declared depth does not match the deepest state");
  return source;
}

TreeSource load_tree_source(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open source config " + path.string());
  return parse_tree_source(in);
}

std::string format_tree_source(const TreeSource& source) {
  std::ostringstream out;
  out.precision(17);
  out << "depth " << source.structure().depth() << '\n';
  const auto& leaves = source.structure().leaves();
  for (std::size_t i = 0; i < leaves.size(); ++i)
    out << (leaves[i].empty() ? "-" : leaves[i]) << ' ' << source.p1(i) << '\n';
  return out.str();
}

Sequence generate(const TreeSource& source, std::uint64_t n, std::uint64_t seed,
                  std::span<const Symbol> initial_context) {
  const auto depth = static_cast<std::size_t>(source.structure().depth());
  if (!initial_context.empty() && initial_context.size() != depth)
    throw ConfigError("initial context length must equal the source depth");

  Sequence history(depth, 0);
  std::copy(initial_context.begin(), initial_context.end(), history.begin());
  history.reserve(depth + n);

  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto state = source.structure().lookup(history);
    // 53 high bits -> uniform double in [0, 1), identical on every platform.
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    history.push_back(u < source.p1(state) ? 1 : 0);
  }
  return Sequence(history.begin() + static_cast<std::ptrdiff_t>(depth), history.end());
}

const std::string& lookup_state(const TreeStructure& structure, std::span<const Symbol> past) {
  return structure.leaves()[structure.lookup(past)];
}

BitString natural_encode(const TreeStructure& structure, int depth) {
  if (structure.depth() > depth) throw ConfigError("structure is deeper than the natural-code depth");
  BitString bits;
  const auto& nodes = structure.nodes();
  std::function<void(std::size_t, int)> visit = [&](std::size_t node, int d) {
    if (d == depth) return;
    const bool internal = nodes[node].leaf < 0;
    bits.push_back(internal ? 1 : 0);
    if (!internal) return;
    visit(static_cast<std::size_t>(nodes[node].child[0]), d + 1);
    visit(static_cast<std::size_t>(nodes[node].child[1]), d + 1);
  };
  visit(0, 0);
  return bits;
}

NaturalDecodeResult natural_decode(std::span<const std::uint8_t> code, int depth) {
  if (depth < 0 || depth > kMaxDepth) throw ConfigError("depth out of range");
  std::size_t pos = 0;
  std::vector<std::string> leaves;
  std::function<void(const std::string&)> visit = [&](const std::string& path) {
    if (static_cast<int>(path.size()) == depth) {
      leaves.push_back(path);
      return;
    }
    if (pos >= code.size()) throw FormatError("natural code is truncated");
    if (code[pos++] == 0) {
      leaves.push_back(path);
      return;
    }
    visit("0" + path);
    visit("1" + path);
  };
  visit(std::string{});
  return {TreeStructure::from_leaves(std::move(leaves)), pos};
}

}  // namespace ptpmdl
