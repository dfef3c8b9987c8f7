#pragma once

// exhaustive enumeration of small graph / partition / series spaces; backs the
// exact evidence and posterior routines and serves as the oracle layer in tests.

#include <stdexcept>
#include <vector>

#include "graph.hpp"
#include "priors.hpp"
#include "series.hpp"
#include "util.hpp"

namespace reconlab {

inline void check_enumeration_size(double count, double cap = 5e6) {
  if (count > cap) throw std::domain_error("enumeration space too large");
}

// all simple graphs on n nodes with exactly e edges
inline std::vector<Graph> enumerate_simple_graphs(int n, long long e) {
  if (n > 8) throw std::domain_error("enumerate_simple_graphs: n > 8");
  long long pairs = simple_pair_count(n);
  if (e < 0 || e > pairs) return {};
  check_enumeration_size(std::exp2(log2_binomial(pairs, e)));
  std::vector<Graph> out;
  std::vector<long long> idx(e);
  for (long long k = 0; k < e; ++k) idx[k] = k;
  while (true) {
    Graph g(n, graph_mode::simple);
    for (long long k : idx) {
      node_pair p = nth_simple_pair(n, k);
      g.toggle_edge(p.i, p.j, +1);
    }
    out.push_back(std::move(g));
    // next combination in lexicographic order
    long long pos = e - 1;
    while (pos >= 0 && idx[pos] == pairs - e + pos) --pos;
    if (pos < 0) break;
    idx[pos] += 1;
    for (long long k = pos + 1; k < e; ++k) idx[k] = idx[k - 1] + 1;
  }
  return out;
}

// all simple graphs on n nodes, any edge count (2^(n(n-1)/2) of them)
inline std::vector<Graph> enumerate_all_simple_graphs(int n) {
  if (n > 6) throw std::domain_error("enumerate_all_simple_graphs: n > 6");
  long long pairs = simple_pair_count(n);
  long long total = 1LL << pairs;
  std::vector<Graph> out;
  out.reserve(total);
  for (long long mask = 0; mask < total; ++mask) {
    Graph g(n, graph_mode::simple);
    for (long long k = 0; k < pairs; ++k)
      if (mask >> k & 1) {
        node_pair p = nth_simple_pair(n, k);
        g.toggle_edge(p.i, p.j, +1);
      }
    out.push_back(std::move(g));
  }
  return out;
}

// all loopy multigraphs with exactly e edge instances: size-e multisets over
// the n(n+1)/2 pair space, enumerated as nondecreasing index sequences
inline std::vector<Graph> enumerate_multigraphs(int n, long long e) {
  if (n > 8) throw std::domain_error("enumerate_multigraphs: n > 8");
  long long pairs = loopy_pair_count(n);
  check_enumeration_size(std::exp2(log2_multiset(pairs, e)));
  std::vector<Graph> out;
  std::vector<long long> idx(e, 0);
  while (true) {
    Graph g(n, graph_mode::multi);
    for (long long k : idx) {
      node_pair p = nth_loopy_pair(n, k);
      g.toggle_edge(p.i, p.j, +1);
    }
    out.push_back(std::move(g));
    if (e == 0) break;
    long long pos = e - 1;
    while (pos >= 0 && idx[pos] == pairs - 1) --pos;
    if (pos < 0) break;
    long long v = idx[pos] + 1;
    for (long long k = pos; k < e; ++k) idx[k] = v;
  }
  return out;
}

// graphs with exactly e instances in the prior's natural mode
inline std::vector<Graph> enumerate_graphs(int n, long long e, graph_mode mode) {
  return mode == graph_mode::simple ? enumerate_simple_graphs(n, e)
                                    : enumerate_multigraphs(n, e);
}

// all dense labeled partitions of n nodes into 1..max_blocks blocks
// (surjective labelings; each labeled partition appears exactly once)
inline std::vector<Partition> enumerate_partitions(int n, int max_blocks) {
  if (n > 6) throw std::domain_error("enumerate_partitions: n > 6");
  std::vector<Partition> out;
  for (int B = 1; B <= max_blocks; ++B) {
    long long total = 1;
    for (int i = 0; i < n; ++i) total *= B;
    for (long long code = 0; code < total; ++code) {
      std::vector<int> b(n);
      long long c = code;
      for (int i = 0; i < n; ++i) {
        b[i] = int(c % B);
        c /= B;
      }
      std::vector<bool> used(B, false);
      for (int v : b) used[v] = true;
      bool dense = true;
      for (bool u : used) dense = dense && u;
      if (dense) out.push_back(Partition::from_labels(b));
    }
  }
  return out;
}

// SBM structure prior with the partition summed out (oracle for small n)
inline double sbm_log_marginal_prior(const Graph& g, const PriorModel& prior) {
  std::vector<double> terms;
  for (const auto& part : enumerate_partitions(g.n_nodes(), g.n_nodes())) {
    double lp = log_prior_state(prior, g, &part);
    if (!impossible(lp)) terms.push_back(lp);
  }
  return log_sum_exp2(terms);
}

// decode one of the 2^(nT) binary series (bit t*n+i of `code` is node i at time t)
inline TimeSeries series_from_bits(int n, int T, unsigned long long code) {
  TimeSeries x(n, T);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i) x.set(i, t, int(code >> (static_cast<unsigned>(t) * n + i) & 1ULL));
  return x;
}

}  // namespace reconlab
