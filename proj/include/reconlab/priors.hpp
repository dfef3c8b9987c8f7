#pragma once

// graph priors: ER (simple / loopy multigraph), configuration model (fixed
// degrees), uniform configuration model, and the one-level microcanonical SBM.
// all log-probabilities in bits. -inf marks out-of-support states.

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "graph.hpp"
#include "util.hpp"

namespace reconlab {

enum class prior_kind { er_simple, er_multi, cm, ucm, sbm };

inline std::string to_string(prior_kind k) {
  switch (k) {
    case prior_kind::er_simple: return "er_simple";
    case prior_kind::er_multi: return "er_multi";
    case prior_kind::cm: return "cm";
    case prior_kind::ucm: return "ucm";
    case prior_kind::sbm: return "sbm";
  }
  return "er_simple";
}

inline prior_kind prior_kind_from_string(const std::string& s) {
  if (s == "er_simple") return prior_kind::er_simple;
  if (s == "er_multi") return prior_kind::er_multi;
  if (s == "cm") return prior_kind::cm;
  if (s == "ucm") return prior_kind::ucm;
  if (s == "sbm") return prior_kind::sbm;
  throw std::invalid_argument("unknown prior kind: " + s);
}

// graph space implied by the prior: plain ER works on simple graphs, the
// stub-matching and SBM constructions on loopy multigraphs
inline graph_mode natural_mode(prior_kind k) {
  return k == prior_kind::er_simple ? graph_mode::simple : graph_mode::multi;
}

struct edge_count_prior {
  bool is_delta = true;
  long long e_star = 0;     // delta location
  double lambda_bar = 1.0;  // geometric mean edge count

  static edge_count_prior delta(long long e) { return {true, e, 0.0}; }
  static edge_count_prior geometric(double lb) { return {false, 0, lb}; }
};

inline double log_edge_count_prior(long long e, const edge_count_prior& spec) {
  if (e < 0) throw std::invalid_argument("log_edge_count_prior: e >= 0");
  if (spec.is_delta) return e == spec.e_star ? 0.0 : neg_inf;
  if (spec.lambda_bar < 0.0) throw std::invalid_argument("geometric prior: lambda_bar >= 0");
  if (spec.lambda_bar == 0.0) return e == 0 ? 0.0 : neg_inf;
  return double(e) * std::log2(spec.lambda_bar) -
         double(e + 1) * std::log2(spec.lambda_bar + 1.0);
}

// ---- partitions -------------------------------------------------------------

// node -> block labels kept dense (0..B-1); emptied blocks are compacted by
// relabeling the last block into the hole, deterministically
struct Partition {
  std::vector<int> b;
  std::vector<int> sizes;

  int B() const { return (int)sizes.size(); }
  int n_nodes() const { return (int)b.size(); }

  static Partition single_block(int n) {
    Partition p;
    p.b.assign(n, 0);
    p.sizes.assign(1, n);
    return p;
  }

  static Partition from_labels(const std::vector<int>& labels) {
    Partition p;
    p.b = labels;
    int B = 0;
    for (int v : labels) B = std::max(B, v + 1);
    p.sizes.assign(B, 0);
    for (int v : labels) {
      if (v < 0 || v >= B) throw std::invalid_argument("Partition: bad label");
      p.sizes[v] += 1;
    }
    for (int s : p.sizes)
      if (s == 0) throw std::invalid_argument("Partition: labels not dense");
    return p;
  }

  // target in [0, B()] — B() opens a fresh block; returns the node's new label
  int move_node(int i, int target) {
    int old = b[i];
    if (target == old) return old;
    if (target == B()) sizes.push_back(0);
    if (target < 0 || target >= B()) throw std::invalid_argument("Partition: bad move target");
    sizes[old] -= 1;
    sizes[target] += 1;
    b[i] = target;
    if (sizes[old] == 0) {
      int last = B() - 1;
      if (old != last) {  // fill the hole with the last block's label
        for (auto& v : b)
          if (v == last) v = old;
        sizes[old] = sizes[last];
      }
      sizes.pop_back();
    }
    return b[i];
  }

  bool operator==(const Partition& o) const { return b == o.b; }
};

// within/between block edge instance counts: eps[r][s] symmetric, with the
// diagonal holding within-block instances (so sum_{r<=s} eps = E)
inline std::vector<std::vector<long long>> block_edge_counts(const Graph& g, const Partition& p) {
  int B = p.B();
  std::vector<std::vector<long long>> eps(B, std::vector<long long>(B, 0));
  for (const auto& e : g.edges()) {
    int r = p.b[e.i], s = p.b[e.j];
    if (r == s) {
      eps[r][r] += 1;
    } else {
      eps[r][s] += 1;
      eps[s][r] += 1;
    }
  }
  return eps;
}

// ---- prior model -------------------------------------------------------------

struct PriorModel {
  prior_kind kind = prior_kind::er_simple;
  int n = 0;
  edge_count_prior ec = edge_count_prior::delta(0);
  std::vector<int> fixed_degrees;  // cm only

  static PriorModel er(int n, edge_count_prior ec, bool simple = true) {
    PriorModel m;
    m.kind = simple ? prior_kind::er_simple : prior_kind::er_multi;
    m.n = n;
    m.ec = ec;
    return m;
  }
  static PriorModel config_model(std::vector<int> degrees) {
    PriorModel m;
    m.kind = prior_kind::cm;
    m.n = (int)degrees.size();
    long long s = std::accumulate(degrees.begin(), degrees.end(), 0LL);
    if (s % 2) throw std::invalid_argument("cm: degree sum must be even");
    m.ec = edge_count_prior::delta(s / 2);
    m.fixed_degrees = std::move(degrees);
    return m;
  }
  static PriorModel ucm(int n, edge_count_prior ec) {
    PriorModel m;
    m.kind = prior_kind::ucm;
    m.n = n;
    m.ec = ec;
    return m;
  }
  static PriorModel sbm(int n, edge_count_prior ec) {
    PriorModel m;
    m.kind = prior_kind::sbm;
    m.n = n;
    m.ec = ec;
    return m;
  }
};

// ---- structure terms ----------------------------------------------------------

inline long long simple_pair_count(int n) { return (long long)n * (n - 1) / 2; }
inline long long loopy_pair_count(int n) { return (long long)n * (n + 1) / 2; }

inline double log_prior_er(const Graph& g, long long e, graph_mode mode) {
  if (g.edge_total() != e) throw std::invalid_argument("log_prior_er: edge-count mismatch");
  int n = g.n_nodes();
  if (mode == graph_mode::simple) {
    if (!g.is_simple()) return neg_inf;
    return -log2_binomial(simple_pair_count(n), e);  // -inf when e > pairs
  }
  return -log2_multiset(loopy_pair_count(n), e);
}

// stub-matching probability: prod kappa_i! / [(2E-1)!! prod_{i<j} a_ij! prod_i a_ii!!]
inline double log_prior_cm(const Graph& g, const std::vector<int>& kappa) {
  if ((int)kappa.size() != g.n_nodes()) throw std::invalid_argument("log_prior_cm: degree size");
  if (g.degrees() != kappa) throw std::invalid_argument("log_prior_cm: degree mismatch");
  long long e = g.edge_total();
  double lp = -log2_odd_double_factorial(e);
  for (int k : kappa) lp += log2_factorial(k);
  for (int i = 0; i < g.n_nodes(); ++i)
    for (const auto& [j, c] : g.neighbors(i)) {
      if (j > i) lp -= log2_factorial(c);             // a_ij!
      if (j == i) lp -= log2_even_double_factorial(2 * c);  // a_ii!!
    }
  return lp;
}

inline double log_prior_ucm(const Graph& g, const std::vector<int>& kappa, long long e) {
  long long s = std::accumulate(kappa.begin(), kappa.end(), 0LL);
  if (s != 2 * e) throw std::invalid_argument("log_prior_ucm: degree sum != 2e");
  return log_prior_cm(g, kappa) - log2_multiset(g.n_nodes(), 2 * e);
}

// the five-term microcanonical SBM: P(G|e,b) P(e|b,E) P(E) P(b|B) P(B)
inline double log_prior_sbm(const Graph& g, const Partition& p,
                            const std::vector<std::vector<long long>>& eps,
                            const edge_count_prior& ec) {
  int n = g.n_nodes();
  int B = p.B();
  if ((int)p.b.size() != n) throw std::invalid_argument("log_prior_sbm: partition size");
  for (int s : p.sizes)
    if (s <= 0) throw std::invalid_argument("log_prior_sbm: empty block");
  auto check = block_edge_counts(g, p);
  if (check != eps) throw std::invalid_argument("log_prior_sbm: inconsistent e_matrix");

  long long e = g.edge_total();
  double lp = 0.0;
  // P(G | e, b): independent uniform multisets per block pair
  for (int r = 0; r < B; ++r) {
    lp -= log2_multiset(loopy_pair_count(p.sizes[r]), eps[r][r]);
    for (int s = r + 1; s < B; ++s)
      lp -= log2_multiset((long long)p.sizes[r] * p.sizes[s], eps[r][s]);
  }
  // P(e | b, E): uniform over edge matrices with total E
  lp -= log2_multiset((long long)B * (B + 1) / 2, e);
  // P(E)
  lp += log_edge_count_prior(e, ec);
  // P(b | B): uniform sizes composition, uniform assignment given sizes
  for (int s : p.sizes) lp += log2_factorial(s);
  lp -= log2_factorial(n);
  lp -= log2_binomial(n - 1, B - 1);
  // P(B): uniform over 1..N
  lp -= std::log2(double(n));
  return lp;
}

inline double log_prior_sbm(const Graph& g, const Partition& p, const edge_count_prior& ec) {
  return log_prior_sbm(g, p, block_edge_counts(g, p), ec);
}

// joint log prior of the sampler state (graph + hyperparams), edge-count term
// included. non-throwing support checks: returns -inf off support.
inline double log_prior_state(const PriorModel& model, const Graph& g, const Partition* part) {
  long long e = g.edge_total();
  double ec_term = log_edge_count_prior(e, model.ec);
  if (impossible(ec_term)) return neg_inf;
  switch (model.kind) {
    case prior_kind::er_simple: {
      if (!g.is_simple()) return neg_inf;
      double s = -log2_binomial(simple_pair_count(g.n_nodes()), e);
      return impossible(s) ? neg_inf : s + ec_term;
    }
    case prior_kind::er_multi:
      return -log2_multiset(loopy_pair_count(g.n_nodes()), e) + ec_term;
    case prior_kind::cm:
      if (g.degrees() != model.fixed_degrees) return neg_inf;
      return log_prior_cm(g, model.fixed_degrees) + ec_term;
    case prior_kind::ucm:
      return log_prior_cm(g, g.degrees()) - log2_multiset(g.n_nodes(), 2 * e) + ec_term;
    case prior_kind::sbm: {
      if (!part) throw std::invalid_argument("log_prior_state: sbm needs a partition");
      return log_prior_sbm(g, *part, model.ec);
    }
  }
  return neg_inf;
}

// ---- exact sampling ------------------------------------------------------------

inline node_pair nth_simple_pair(int n, long long k) {
  for (int i = 0; i < n; ++i) {
    long long row = n - 1 - i;
    if (k < row) return node_pair(i, i + 1 + (int)k);
    k -= row;
  }
  throw std::out_of_range("nth_simple_pair");
}

// inverse of nth_simple_pair (requires i < j)
inline long long simple_pair_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return (long long)i * n - (long long)i * (i + 1) / 2 + (j - i - 1);
}

// inverse of nth_loopy_pair (requires i <= j)
inline long long loopy_pair_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return (long long)i * n - (long long)i * (i - 1) / 2 + (j - i);
}

inline node_pair nth_loopy_pair(int n, long long k) {
  for (int i = 0; i < n; ++i) {
    long long row = n - i;
    if (k < row) return node_pair(i, i + (int)k);
    k -= row;
  }
  throw std::out_of_range("nth_loopy_pair");
}

// uniform multiset of size k over {0..n-1} via the stars-and-bars bijection
inline std::vector<long long> sample_uniform_multiset(long long n, long long k,
                                                      std::mt19937_64& rng) {
  std::vector<long long> picks;
  if (k == 0) return picks;
  if (n <= 0) throw std::invalid_argument("sample_uniform_multiset: empty base set");
  // sample a k-combination from {0 .. n+k-2} (Floyd's algorithm), then shift
  std::vector<long long> comb;
  comb.reserve(k);
  long long m = n + k - 1;
  std::unordered_map<long long, char> used;
  for (long long j = m - k; j < m; ++j) {
    std::uniform_int_distribution<long long> d(0, j);
    long long t = d(rng);
    if (used.count(t))
      comb.push_back(j);
    else
      comb.push_back(t);
    used[comb.back()] = 1;
  }
  std::sort(comb.begin(), comb.end());
  picks.resize(k);
  for (long long idx = 0; idx < k; ++idx) picks[idx] = comb[idx] - idx;
  return picks;
}

// uniform k-subset of {0..n-1}
inline std::vector<long long> sample_uniform_subset(long long n, long long k,
                                                    std::mt19937_64& rng) {
  if (k > n) throw std::invalid_argument("sample_uniform_subset: k > n");
  std::vector<long long> comb;
  comb.reserve(k);
  std::unordered_map<long long, char> used;
  for (long long j = n - k; j < n; ++j) {
    std::uniform_int_distribution<long long> d(0, j);
    long long t = d(rng);
    if (used.count(t))
      comb.push_back(j);
    else
      comb.push_back(t);
    used[comb.back()] = 1;
  }
  std::sort(comb.begin(), comb.end());
  return comb;
}

struct prior_draw {
  Graph g;
  Partition part;
  bool has_partition = false;
};

inline long long sample_edge_count(const PriorModel& model, std::mt19937_64& rng) {
  if (model.ec.is_delta) return model.ec.e_star;
  if (model.ec.lambda_bar == 0.0) return 0;
  std::geometric_distribution<long long> d(1.0 / (model.ec.lambda_bar + 1.0));
  return d(rng);
}

inline Graph sample_cm_graph(const std::vector<int>& kappa, std::mt19937_64& rng) {
  int n = (int)kappa.size();
  Graph g(n, graph_mode::multi);
  std::vector<int> stubs;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < kappa[i]; ++k) stubs.push_back(i);
  if (stubs.size() % 2) throw std::invalid_argument("sample_cm_graph: odd stub count");
  std::shuffle(stubs.begin(), stubs.end(), rng);
  for (size_t k = 0; k + 1 < stubs.size(); k += 2) g.toggle_edge(stubs[k], stubs[k + 1], +1);
  return g;
}

inline prior_draw sample_prior(const PriorModel& model, std::mt19937_64& rng) {
  int n = model.n;
  if (n <= 0) throw std::invalid_argument("sample_prior: model.n unset");
  switch (model.kind) {
    case prior_kind::er_simple: {
      long long pairs = simple_pair_count(n);
      long long e = sample_edge_count(model, rng);
      while (e > pairs) e = sample_edge_count(model, rng);  // truncated tail
      Graph g(n, graph_mode::simple);
      for (long long k : sample_uniform_subset(pairs, e, rng)) {
        node_pair p = nth_simple_pair(n, k);
        g.toggle_edge(p.i, p.j, +1);
      }
      return {std::move(g), {}, false};
    }
    case prior_kind::er_multi: {
      long long e = sample_edge_count(model, rng);
      Graph g(n, graph_mode::multi);
      for (long long k : sample_uniform_multiset(loopy_pair_count(n), e, rng)) {
        node_pair p = nth_loopy_pair(n, k);
        g.toggle_edge(p.i, p.j, +1);
      }
      return {std::move(g), {}, false};
    }
    case prior_kind::cm:
      return {sample_cm_graph(model.fixed_degrees, rng), {}, false};
    case prior_kind::ucm: {
      long long e = sample_edge_count(model, rng);
      // uniform degree sequence with sum 2e == uniform multiset of 2e stubs over n nodes
      std::vector<int> kappa(n, 0);
      for (long long k : sample_uniform_multiset(n, 2 * e, rng)) kappa[(size_t)k] += 1;
      return {sample_cm_graph(kappa, rng), {}, false};
    }
    case prior_kind::sbm: {
      long long e = sample_edge_count(model, rng);
      std::uniform_int_distribution<int> bdist(1, n);
      int B = bdist(rng);
      // uniform positive composition of n into B parts: B-1 cuts among n-1 gaps
      std::vector<long long> cuts = sample_uniform_subset(n - 1, B - 1, rng);
      std::vector<int> sizes;
      long long prev = 0;
      for (long long c : cuts) {
        sizes.push_back(int(c + 1 - prev));
        prev = c + 1;
      }
      sizes.push_back(int(n - prev));
      // uniform assignment given sizes
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<int> labels(n);
      std::vector<std::vector<int>> members(B);
      int pos = 0;
      for (int r = 0; r < B; ++r)
        for (int k = 0; k < sizes[r]; ++k) {
          labels[perm[pos]] = r;
          members[r].push_back(perm[pos]);
          ++pos;
        }
      Partition part = Partition::from_labels(labels);
      // edge matrix: uniform multiset of e block pairs
      std::vector<std::vector<long long>> eps(B, std::vector<long long>(B, 0));
      for (long long k : sample_uniform_multiset((long long)B * (B + 1) / 2, e, rng)) {
        node_pair rp = nth_loopy_pair(B, k);
        if (rp.i == rp.j)
          eps[rp.i][rp.i] += 1;
        else {
          eps[rp.i][rp.j] += 1;
          eps[rp.j][rp.i] += 1;
        }
      }
      // graph given the matrix: uniform multisets per block pair
      Graph g(n, graph_mode::multi);
      for (int r = 0; r < B; ++r) {
        for (long long k : sample_uniform_multiset(loopy_pair_count(sizes[r]), eps[r][r], rng)) {
          node_pair lp = nth_loopy_pair(sizes[r], k);
          g.toggle_edge(members[r][lp.i], members[r][lp.j], +1);
        }
        for (int s = r + 1; s < B; ++s) {
          for (long long k :
               sample_uniform_multiset((long long)sizes[r] * sizes[s], eps[r][s], rng)) {
            int u = int(k / sizes[s]);
            int v = int(k % sizes[s]);
            g.toggle_edge(members[r][u], members[s][v], +1);
          }
        }
      }
      return {std::move(g), std::move(part), true};
    }
  }
  throw std::logic_error("sample_prior: unreachable");
}

}  // namespace reconlab
