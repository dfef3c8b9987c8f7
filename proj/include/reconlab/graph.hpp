#pragma once

// undirected loopy multigraph with the a_ii-is-even self-loop convention.
// adjacency is a per-node hash map (neighbor -> parallel edge count) plus a
// flat list of edge instances so the sampler can draw a uniform edge in O(1).

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "util.hpp"

namespace reconlab {

enum class graph_mode { simple, multi };

inline std::string to_string(graph_mode m) { return m == graph_mode::simple ? "simple" : "multi"; }

inline graph_mode graph_mode_from_string(const std::string& s) {
  if (s == "simple") return graph_mode::simple;
  if (s == "multi") return graph_mode::multi;
  throw std::invalid_argument("unknown graph mode: " + s);
}

// canonical unordered pair, i <= j
struct node_pair {
  int i = 0, j = 0;
  node_pair() = default;
  node_pair(int a, int b) : i(std::min(a, b)), j(std::max(a, b)) {}
  bool loop() const { return i == j; }
  bool operator==(const node_pair& o) const { return i == o.i && j == o.j; }
  bool operator!=(const node_pair& o) const { return !(*this == o); }
  bool operator<(const node_pair& o) const { return i < o.i || (i == o.i && j < o.j); }
};

class Graph {
 public:
  Graph(int n, graph_mode mode) : n_(n), mode_(mode), deg_(n, 0) {
    if (n <= 0) throw std::invalid_argument("Graph: need n >= 1");
    adj_.resize(n);
  }

  int n_nodes() const { return n_; }
  graph_mode mode() const { return mode_; }
  long long edge_total() const { return (long long)edges_.size(); }

  // number of parallel edge instances between i and j (a self-loop counts 1)
  int instances(int i, int j) const {
    check_node(i);
    check_node(j);
    node_pair p(i, j);
    auto it = adj_[p.i].find(p.j);
    return it == adj_[p.i].end() ? 0 : it->second;
  }

  // multigraph adjacency a_ij: equals instances off-diagonal, 2x instances on it
  int adjacency(int i, int j) const {
    int m = instances(i, j);
    return i == j ? 2 * m : m;
  }

  int degree(int i) const {
    check_node(i);
    return deg_[i];
  }

  const std::vector<int>& degrees() const { return deg_; }

  // iterate (neighbor, instance count); includes the node itself for loops
  const std::unordered_map<int, int>& neighbors(int i) const {
    check_node(i);
    return adj_[i];
  }

  const std::vector<node_pair>& edges() const { return edges_; }

  bool is_simple() const {
    for (const auto& e : edges_)
      if (e.loop()) return false;
    for (int i = 0; i < n_; ++i)
      for (const auto& [j, c] : adj_[i])
        if (c > 1) return false;
    return true;
  }

  // add (delta=+1) or remove (delta=-1) one edge instance between i and j
  void toggle_edge(int i, int j, int delta) {
    check_node(i);
    check_node(j);
    if (delta != 1 && delta != -1) throw std::invalid_argument("toggle_edge: delta must be +-1");
    node_pair p(i, j);
    if (delta == 1) {
      if (mode_ == graph_mode::simple) {
        if (p.loop()) throw std::domain_error("toggle_edge: self-loop in simple mode");
        if (instances(p.i, p.j) >= 1) throw std::domain_error("toggle_edge: multiedge in simple mode");
      }
      adj_[p.i][p.j] += 1;
      if (!p.loop()) adj_[p.j][p.i] += 1;
      positions_[key(p)].push_back((int)edges_.size());
      edges_.push_back(p);
      bump_degree(p, +1);
    } else {
      auto it = positions_.find(key(p));
      if (it == positions_.end() || it->second.empty())
        throw std::domain_error("toggle_edge: removing absent edge");
      remove_instance_at(it->second.back());
    }
  }

  // remove the k-th edge instance from the flat list (sampler helper)
  void remove_instance_at(int idx) {
    node_pair p = edges_[idx];
    auto& plist = positions_[key(p)];
    // drop idx from p's position list
    for (size_t k = 0; k < plist.size(); ++k) {
      if (plist[k] == idx) {
        plist[k] = plist.back();
        plist.pop_back();
        break;
      }
    }
    if (idx + 1 != (int)edges_.size()) {
      node_pair moved = edges_.back();
      edges_[idx] = moved;
      auto& mlist = positions_[key(moved)];
      for (size_t k = 0; k < mlist.size(); ++k) {
        if (mlist[k] == (int)edges_.size() - 1) {
          mlist[k] = idx;
          break;
        }
      }
    }
    edges_.pop_back();
    int left = (adj_[p.i][p.j] -= 1);
    if (left == 0) adj_[p.i].erase(p.j);
    if (!p.loop()) {
      int l2 = (adj_[p.j][p.i] -= 1);
      if (l2 == 0) adj_[p.j].erase(p.i);
    }
    bump_degree(p, -1);
  }

  bool operator==(const Graph& o) const {
    if (n_ != o.n_ || edges_.size() != o.edges_.size()) return false;
    for (int i = 0; i < n_; ++i)
      if (adj_[i] != o.adj_[i]) return false;
    return true;
  }

  // compact canonical key, usable as a map key in enumeration code
  std::string key_string() const {
    std::vector<node_pair> es = edges_;
    std::sort(es.begin(), es.end());
    std::ostringstream os;
    for (const auto& e : es) os << e.i << ',' << e.j << ';';
    return os.str();
  }

 private:
  static std::uint64_t key(const node_pair& p) {
    return (std::uint64_t(std::uint32_t(p.i)) << 32) | std::uint32_t(p.j);
  }
  void check_node(int i) const {
    if (i < 0 || i >= n_) throw std::out_of_range("Graph: node index");
  }
  void bump_degree(const node_pair& p, int delta) {
    if (p.loop()) {
      deg_[p.i] += 2 * delta;
    } else {
      deg_[p.i] += delta;
      deg_[p.j] += delta;
    }
  }

  int n_;
  graph_mode mode_;
  std::vector<std::unordered_map<int, int>> adj_;  // neighbor -> instances
  std::vector<int> deg_;
  std::vector<node_pair> edges_;  // one entry per instance
  std::unordered_map<std::uint64_t, std::vector<int>> positions_;
};

// ---- edge-list text format: "N E mode" header, then "i j multiplicity" ----

inline void write_edge_list(std::ostream& os, const Graph& g) {
  os << g.n_nodes() << ' ' << g.edge_total() << ' ' << to_string(g.mode()) << '\n';
  for (int i = 0; i < g.n_nodes(); ++i) {
    std::vector<std::pair<int, int>> row(g.neighbors(i).begin(), g.neighbors(i).end());
    std::sort(row.begin(), row.end());
    for (const auto& [j, c] : row)
      if (j >= i) os << i << ' ' << j << ' ' << c << '\n';
  }
}

inline std::string to_edge_list(const Graph& g) {
  std::ostringstream os;
  write_edge_list(os, g);
  return os.str();
}

inline Graph read_edge_list(std::istream& is) {
  int n;
  long long e;
  std::string mode_s;
  if (!(is >> n >> e >> mode_s)) throw std::runtime_error("edge list: bad header");
  Graph g(n, graph_mode_from_string(mode_s));
  int i, j, c;
  long long total = 0;
  while (is >> i >> j >> c) {
    if (c < 0) throw std::runtime_error("edge list: negative multiplicity");
    for (int k = 0; k < c; ++k) g.toggle_edge(i, j, +1);
    total += c;
  }
  if (total != e) throw std::runtime_error("edge list: header edge count mismatch");
  return g;
}

inline Graph graph_from_edge_list(const std::string& text) {
  std::istringstream is(text);
  return read_edge_list(is);
}

}  // namespace reconlab
