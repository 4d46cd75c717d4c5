#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "meso/errors.hpp"

namespace meso {

using NodeId = std::uint32_t;

/// Immutable simple undirected unweighted graph.
///
/// Internal ids are contiguous `0..n-1`; every node also carries the external
/// name it had in the input so reports can be written against it. Adjacency
/// lists are sorted, which makes `has_edge` a binary search.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from external names and an edge list over internal ids.
  /// Duplicate edges (in either orientation) are collapsed; self-loops and
  /// out-of-range ids throw `DataError`.
  static Graph from_edges(std::vector<std::string> names,
                          std::span<const std::pair<NodeId, NodeId>> edges,
                          std::size_t* duplicates_collapsed = nullptr) {
    Graph g;
    const auto n = names.size();
    g.names_ = std::move(names);
    g.adj_.assign(n, {});
    for (const auto& [u, v] : edges) {
      if (u >= n || v >= n) throw DataError("edge endpoint out of range");
      if (u == v) throw DataError("self-loop on node '" + g.names_[u] + "'");
      g.adj_[u].push_back(v);
      g.adj_[v].push_back(u);
    }
    std::size_t half_degree_sum = 0;
    for (auto& row : g.adj_) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
      half_degree_sum += row.size();
    }
    g.m_ = half_degree_sum / 2;
    if (duplicates_collapsed) *duplicates_collapsed = edges.size() - g.m_;
    g.index_.reserve(n);
    for (NodeId i = 0; i < n; ++i) {
      if (!g.index_.emplace(g.names_[i], i).second)
        throw DataError("duplicate node name '" + g.names_[i] + "'");
    }
    return g;
  }

  std::size_t n() const noexcept { return adj_.size(); }
  std::size_t m() const noexcept { return m_; }

  std::span<const NodeId> neighbors(NodeId i) const {
    check(i);
    return adj_[i];
  }

  std::size_t degree(NodeId i) const { return neighbors(i).size(); }

  bool has_edge(NodeId i, NodeId j) const {
    check(i);
    check(j);
    const auto& row = adj_[i];
    return std::binary_search(row.begin(), row.end(), j);
  }

  const std::string& name(NodeId i) const {
    check(i);
    return names_[i];
  }

  const std::vector<std::string>& names() const noexcept { return names_; }

  std::optional<NodeId> id_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Edges as (i, j) pairs with i < j, sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(m_);
    for (NodeId i = 0; i < n(); ++i)
      for (NodeId j : adj_[i])
        if (i < j) out.emplace_back(i, j);
    return out;
  }

  /// Equality as labelled graphs: same node names, same edges between names.
  friend bool operator==(const Graph& a, const Graph& b) {
    if (a.n() != b.n() || a.m() != b.m()) return false;
    for (NodeId i = 0; i < a.n(); ++i) {
      auto j = b.id_of(a.names_[i]);
      if (!j || a.adj_[i].size() != b.adj_[*j].size()) return false;
      for (NodeId k : a.adj_[i]) {
        auto kb = b.id_of(a.names_[k]);
        if (!kb || !b.has_edge(*j, *kb)) return false;
      }
    }
    return true;
  }

 private:
  void check(NodeId i) const {
    if (i >= adj_.size())
      throw std::out_of_range("node id " + std::to_string(i) + " out of range (n=" +
                              std::to_string(adj_.size()) + ")");
  }

  std::vector<std::vector<NodeId>> adj_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
  std::size_t m_ = 0;
};

struct ParseOptions {
  bool allow_isolated = false;
  char comment_prefix = '#';
  /// Optional node-list sidecar; names not seen in the edge list become
  /// isolated nodes (requires `allow_isolated`).
  std::vector<std::string> node_list;
};

struct ParseDiagnostics {
  std::size_t lines = 0;
  std::size_t edge_lines = 0;
  std::size_t duplicates_collapsed = 0;
  std::size_t isolated_added = 0;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

// Digit strings compare numerically, everything else lexicographically.
inline bool natural_less(const std::string& a, const std::string& b) {
  const auto digits = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (digits(a) && digits(b) && a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace detail

/// Parses whitespace-separated edge-list text. Node ids are assigned in order
/// of first appearance; duplicate edges collapse silently (counted in `diag`).
inline Graph parse_edge_list(std::string_view text, const ParseOptions& options = {},
                             ParseDiagnostics* diag = nullptr) {
  std::vector<std::string> names;
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::pair<NodeId, NodeId>> edges;
  ParseDiagnostics d;

  const auto intern = [&](std::string_view tok) {
    auto [it, inserted] = ids.emplace(std::string(tok), static_cast<NodeId>(names.size()));
    if (inserted) names.emplace_back(tok);
    return it->second;
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (eol == text.size() && line.empty()) break;
    ++d.lines;

    auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens.front().front() == options.comment_prefix) continue;
    if (tokens.size() != 2)
      throw ParseError(d.lines, "expected two node tokens, found " + std::to_string(tokens.size()));
    if (tokens[0] == tokens[1])
      throw ParseError(d.lines, "self-loop on node '" + std::string(tokens[0]) + "'");
    NodeId u = intern(tokens[0]);
    NodeId v = intern(tokens[1]);
    edges.emplace_back(u, v);
    ++d.edge_lines;
  }

  for (const auto& name : options.node_list) {
    if (ids.contains(name)) continue;
    if (!options.allow_isolated)
      throw DataError("node '" + name + "' has no edges; isolated nodes need allow_isolated");
    intern(name);
    ++d.isolated_added;
  }

  Graph g = Graph::from_edges(std::move(names), edges, &d.duplicates_collapsed);
  if (diag) *diag = d;
  return g;
}

/// Canonical edge-list text: one "a b" line per edge with a before b in
/// natural name order, lines sorted. Isolated nodes are not represented.
inline std::string to_edge_list(const Graph& g) {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.reserve(g.m());
  for (auto [i, j] : g.edges()) {
    const auto& a = g.name(i);
    const auto& b = g.name(j);
    if (detail::natural_less(b, a))
      rows.emplace_back(b, a);
    else
      rows.emplace_back(a, b);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return detail::natural_less(x.first, y.first);
    return detail::natural_less(x.second, y.second);
  });
  std::string out;
  for (const auto& [a, b] : rows) {
    out += a;
    out += ' ';
    out += b;
    out += '\n';
  }
  return out;
}

/// Reads a "name" or "name label" per-line file, returning the first column.
inline std::vector<std::string> parse_node_list(std::string_view text, char comment_prefix = '#') {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens.front().front() == comment_prefix) continue;
    if (tokens.size() > 2) throw ParseError(lineno, "expected a node name and optional label");
    out.emplace_back(tokens.front());
  }
  return out;
}

}  // namespace meso
