#pragma once

// posterior sampling over (G, theta, phi): metropolis-hastings graph moves
// (double-edge swaps + hinge flips, 50/50 in fixed-E mode), single-node
// partition moves for the SBM, gaussian parameter moves, gibbs sweeps, and the
// semi-greedy description-length search that fixes the edge count.

#include <cassert>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "graph.hpp"
#include "priors.hpp"
#include "series.hpp"
#include "util.hpp"

namespace reconlab {

enum class move_kind { double_edge_swap, hinge_flip, param_gaussian, partition_move };

struct MoveProposal {
  move_kind kind = move_kind::double_edge_swap;
  bool lazy = false;                 // proposal equals the current state
  std::vector<edge_toggle> toggles;  // net multiset change (removals first)
  double log_forward = 0.0;          // log2 q(g' | g)
  double log_reverse = 0.0;          // log2 q(g | g')
};

struct sampler_config {
  int chains = 1;
  long long sweeps = 1000;   // post burn-in sweeps; one sample per `thinning`
  long long burn_in = 2000;  // sweeps
  long long thinning = 10;
  std::uint64_t seed = 1;
  double sigma_phi = 0.1;
  long long graph_proposals_per_sweep = 0;  // 0 -> N(N-1)/2
  bool update_graph = true;
  bool update_partition = true;
  std::vector<std::string> infer_params;  // phi names sampled by gaussian moves
  // semi-greedy search
  int candidates_g = 10000;
  int candidates_phi = 10;
  int patience = 3;
  int max_rounds = 200;
  long long audit_every = 0;  // >0: recompute caches every k sweeps and compare
};

struct ChainState {
  Graph g;
  Partition part;
  bool has_partition = false;
  PriorModel prior;
  const TimeSeries* x = nullptr;
  transition_cache cache;  // owns the current DynamicsModel (phi)
  activity_table counts;
  double log_lik = 0.0;
  double log_prior = 0.0;  // joint structure + hyperparam + edge-count terms
  std::mt19937_64 rng;
  long long proposed = 0, accepted = 0;

  ChainState(const Graph& g0, const PriorModel& pr, const DynamicsModel& dyn,
             const TimeSeries& series, std::mt19937_64 r)
      : g(g0), prior(pr), x(&series), cache(dyn), counts(g0, series), rng(r) {
    if (pr.kind == prior_kind::sbm) {
      part = Partition::single_block(g0.n_nodes());
      has_partition = true;
    }
    refresh();
  }

  const DynamicsModel& model() const { return cache.model(); }

  void refresh() {
    counts.recompute(g, *x);
    cache.invalidate();
    log_lik = log_likelihood_cached(g, cache, counts, *x);
    log_prior = log_prior_state(prior, g, has_partition ? &part : nullptr);
  }
};

struct PosteriorSample {
  Graph g;
  Partition part;
  bool has_partition = false;
  DynamicsModel model;
  double log_lik = 0.0;
  double log_prior = 0.0;  // joint, same convention as ChainState::log_prior
};

// ---- graph move proposals -----------------------------------------------------

// number of stub re-pairings of (p1, p2) that land on the pair multiset {t1, t2}
inline int rewiring_matches(const node_pair& p1, const node_pair& p2, const node_pair& t1,
                            const node_pair& t2) {
  node_pair r1a(p1.i, p2.i), r1b(p1.j, p2.j);
  node_pair r2a(p1.i, p2.j), r2b(p1.j, p2.i);
  auto eq = [](const node_pair& x1, const node_pair& x2, const node_pair& y1,
               const node_pair& y2) {
    return (x1 == y1 && x2 == y2) || (x1 == y2 && x2 == y1);
  };
  return eq(r1a, r1b, t1, t2) + eq(r2a, r2b, t1, t2);
}

// q aggregates instance picks and coincident rewirings:
// q = n_pick * k / (2 C(E,2)), n_pick = m(P1) m(P2) or C(m,2) for a repeated pair
inline double log2_swap_prob(long long E, long long mult1, long long mult2, bool same_pair,
                             int k) {
  double n_pick = same_pair ? 0.5 * double(mult1) * double(mult1 - 1)
                            : double(mult1) * double(mult2);
  double denom = 0.5 * double(E) * double(E - 1);
  return std::log2(n_pick * double(k) / (2.0 * denom));
}

inline MoveProposal propose_double_edge_swap(const Graph& g, std::mt19937_64& rng) {
  long long E = g.edge_total();
  if (E < 2) throw std::logic_error("double-edge swap needs E >= 2");
  std::uniform_int_distribution<long long> d(0, E - 1);
  long long k1 = d(rng), k2 = d(rng);
  while (k2 == k1) k2 = d(rng);
  node_pair P1 = g.edges()[k1], P2 = g.edges()[k2];
  MoveProposal mv;
  mv.kind = move_kind::double_edge_swap;
  bool u = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  node_pair Q1 = u ? node_pair(P1.i, P2.j) : node_pair(P1.i, P2.i);
  node_pair Q2 = u ? node_pair(P1.j, P2.i) : node_pair(P1.j, P2.j);
  // identity rewiring: nothing changes
  if ((Q1 == P1 && Q2 == P2) || (Q1 == P2 && Q2 == P1)) {
    mv.lazy = true;
    return mv;
  }
  mv.toggles = {{P1.i, P1.j, -1}, {P2.i, P2.j, -1}, {Q1.i, Q1.j, +1}, {Q2.i, Q2.j, +1}};
  bool same_removed = (P1 == P2);
  int kf = rewiring_matches(P1, P2, Q1, Q2);
  mv.log_forward = log2_swap_prob(E, g.instances(P1.i, P1.j),
                                  same_removed ? 0 : g.instances(P2.i, P2.j), same_removed, kf);
  // multiplicities of Q1, Q2 after the move (the Qs never coincide with the Ps
  // on a non-lazy swap)
  bool same_added = (Q1 == Q2);
  long long mq1 = g.instances(Q1.i, Q1.j) + (same_added ? 2 : 1);
  long long mq2 = same_added ? 0 : g.instances(Q2.i, Q2.j) + 1;
  int kr = rewiring_matches(Q1, Q2, P1, P2);
  mv.log_reverse = log2_swap_prob(E, mq1, mq2, same_added, kr);
  return mv;
}

// forward prob of remove-P/add-Q via a hinge: (m(P)/E) * w * (1/N), where w sums
// the kept-endpoint orientations consistent with Q
inline double hinge_orientation_weight(const node_pair& p, const node_pair& q) {
  double orient = p.loop() ? 1.0 : 0.5;
  double w = 0.0;
  if (q.i == p.i || q.j == p.i) w += orient;
  if (!p.loop() && (q.i == p.j || q.j == p.j)) w += orient;
  return w;
}

inline MoveProposal propose_hinge_flip(const Graph& g, std::mt19937_64& rng) {
  long long E = g.edge_total();
  if (E < 1) throw std::logic_error("hinge flip needs E >= 1");
  std::uniform_int_distribution<long long> d(0, E - 1);
  node_pair P = g.edges()[d(rng)];
  int kept;
  if (P.loop())
    kept = P.i;
  else
    kept = std::uniform_int_distribution<int>(0, 1)(rng) ? P.j : P.i;
  int target = std::uniform_int_distribution<int>(0, g.n_nodes() - 1)(rng);
  node_pair Q(kept, target);
  MoveProposal mv;
  mv.kind = move_kind::hinge_flip;
  if (Q == P) {
    mv.lazy = true;
    return mv;
  }
  mv.toggles = {{P.i, P.j, -1}, {Q.i, Q.j, +1}};
  double n = double(g.n_nodes());
  mv.log_forward =
      std::log2(double(g.instances(P.i, P.j)) * hinge_orientation_weight(P, Q) / (double(E) * n));
  long long mq = g.instances(Q.i, Q.j) + 1;
  mv.log_reverse = std::log2(double(mq) * hinge_orientation_weight(Q, P) / (double(E) * n));
  return mv;
}

// fixed-E kind mixture; swap and hinge outcomes are distinguishable (diffs of
// size 2 vs 1), so the mixture weights cancel between forward and reverse
inline MoveProposal propose_graph_move(const Graph& g, std::mt19937_64& rng) {
  long long E = g.edge_total();
  if (E == 0) throw std::domain_error("propose_graph_move: no legal move on empty graph");
  if (E == 1) return propose_hinge_flip(g, rng);
  if (std::uniform_int_distribution<int>(0, 1)(rng))
    return propose_double_edge_swap(g, rng);
  return propose_hinge_flip(g, rng);
}

// ---- incremental prior ratios ---------------------------------------------------

// log P(G',theta) - log P(G,theta) for a toggle set, handling E changes (used by
// both the fixed-E chain and the semi-greedy add/remove moves)
inline double log_prior_delta(const PriorModel& prior, const Graph& g, const Partition* part,
                              const std::vector<edge_toggle>& toggles) {
  long long e_old = g.edge_total();
  long long de = 0;
  for (const auto& t : toggles) de += t.delta;
  long long e_new = e_old + de;
  if (e_new < 0) return neg_inf;
  double d = log_edge_count_prior(e_new, prior.ec) - log_edge_count_prior(e_old, prior.ec);
  if (impossible(d)) return neg_inf;

  // sequential per-pair instance changes (toggles may repeat a pair)
  auto pair_deltas = [&](auto&& per_toggle) {
    std::map<std::pair<int, int>, int> acc;
    for (const auto& t : toggles) {
      node_pair p(t.i, t.j);
      int& shift = acc[{p.i, p.j}];
      int cur = g.instances(p.i, p.j) + shift;
      per_toggle(p, cur, t.delta);
      shift += t.delta;
    }
  };

  switch (prior.kind) {
    case prior_kind::er_simple: {
      long long pairs = simple_pair_count(g.n_nodes());
      bool ok = true;
      pair_deltas([&](const node_pair& p, int cur, int delta) {
        if (p.loop()) ok = false;
        int next = cur + delta;
        if (next < 0 || next > 1) ok = false;
      });
      if (!ok) return neg_inf;
      double t_new = -log2_binomial(pairs, e_new);
      double t_old = -log2_binomial(pairs, e_old);
      if (impossible(t_new)) return neg_inf;
      return d + t_new - t_old;
    }
    case prior_kind::er_multi:
      return d - log2_multiset(loopy_pair_count(g.n_nodes()), e_new) +
             log2_multiset(loopy_pair_count(g.n_nodes()), e_old);
    case prior_kind::cm:
    case prior_kind::ucm: {
      // shared stub-matching terms: prod a_ij! and prod a_ii!!
      double acc = 0.0;
      bool ok = true;
      pair_deltas([&](const node_pair& p, int cur, int delta) {
        if (cur + delta < 0) ok = false;
        if (p.loop()) {
          // a_ii!! with a_ii = 2 * instances
          acc += (delta > 0) ? -std::log2(2.0 * cur + 2.0) : std::log2(2.0 * cur);
        } else {
          acc += (delta > 0) ? -std::log2(double(cur + 1)) : std::log2(double(cur));
        }
      });
      if (!ok) return neg_inf;
      if (prior.kind == prior_kind::cm) {
        if (de != 0) return neg_inf;
        for (int u = 0; u < g.n_nodes(); ++u) {
          // degree changes leave the fixed-degree support
          int dd = 0;
          for (const auto& t : toggles)
            dd += (t.i == u && t.j == u) ? 2 * t.delta : ((t.i == u || t.j == u) ? t.delta : 0);
          if (dd != 0) return neg_inf;
        }
        return d + acc;
      }
      // ucm: kappa! terms, (2E-1)!!, and the degree-sequence hyperprior all move
      for (int u = 0; u < g.n_nodes(); ++u) {
        int dd = 0;
        for (const auto& t : toggles)
          dd += (t.i == u && t.j == u) ? 2 * t.delta : ((t.i == u || t.j == u) ? t.delta : 0);
        if (dd != 0) acc += log2_factorial(g.degree(u) + dd) - log2_factorial(g.degree(u));
      }
      acc += -log2_odd_double_factorial(e_new) + log2_odd_double_factorial(e_old);
      acc += -log2_multiset(g.n_nodes(), 2 * e_new) + log2_multiset(g.n_nodes(), 2 * e_old);
      return d + acc;
    }
    case prior_kind::sbm: {
      if (!part) throw std::invalid_argument("log_prior_delta: sbm needs a partition");
      // per block-pair multiset terms, tracked sequentially against the
      // current block matrix
      auto eps = block_edge_counts(g, *part);
      double acc = 0.0;
      std::map<std::pair<int, int>, long long> cur_shift;
      for (const auto& t : toggles) {
        int r = part->b[t.i], s = part->b[t.j];
        if (r > s) std::swap(r, s);
        long long& shift = cur_shift[{r, s}];
        long long cur = eps[r][s] + shift;
        long long space = (r == s) ? loopy_pair_count(part->sizes[r])
                                   : (long long)part->sizes[r] * part->sizes[s];
        long long next = cur + t.delta;
        if (next < 0) return neg_inf;
        acc += -log2_multiset(space, next) + log2_multiset(space, cur);
        shift += t.delta;
      }
      long long pb = (long long)part->B() * (part->B() + 1) / 2;
      acc += -log2_multiset(pb, e_new) + log2_multiset(pb, e_old);
      return d + acc;
    }
  }
  return neg_inf;
}

// single-toggle wrapper: O(T) likelihood ratio
inline double delta_log_likelihood(ChainState& st, int i, int j, int delta) {
  std::vector<edge_toggle> tg = {{i, j, delta}};
  return delta_log_likelihood(st.g, st.cache, st.counts, *st.x, tg);
}

// min(0, log Delta + log q(g|g') - log q(g'|g)); -inf on sentinel posteriors
inline double mh_accept_log_prob(ChainState& st, const MoveProposal& mv) {
  if (mv.lazy) return 0.0;
  double dprior = log_prior_delta(st.prior, st.g, st.has_partition ? &st.part : nullptr,
                                  mv.toggles);
  if (impossible(dprior)) return neg_inf;
  double dlik = delta_log_likelihood(st.g, st.cache, st.counts, *st.x, mv.toggles);
  if (impossible(dlik)) return neg_inf;
  return std::min(0.0, dlik + dprior + mv.log_reverse - mv.log_forward);
}

inline void apply_toggles(ChainState& st, const std::vector<edge_toggle>& toggles) {
  for (const auto& t : toggles) {
    st.g.toggle_edge(t.i, t.j, t.delta);
    st.counts.apply_toggle(t.i, t.j, t.delta, *st.x);
  }
}

// one graph MH step; returns true when the state changed
inline bool graph_mh_step(ChainState& st) {
  if (st.g.edge_total() == 0) return false;
  MoveProposal mv = propose_graph_move(st.g, st.rng);
  st.proposed += 1;
  if (mv.lazy) {
    st.accepted += 1;
    return false;
  }
  double dprior = log_prior_delta(st.prior, st.g, st.has_partition ? &st.part : nullptr,
                                  mv.toggles);
  double la;
  double dlik = 0.0;
  if (impossible(dprior)) {
    la = neg_inf;
  } else {
    dlik = delta_log_likelihood(st.g, st.cache, st.counts, *st.x, mv.toggles);
    la = impossible(dlik) ? neg_inf
                          : std::min(0.0, dlik + dprior + mv.log_reverse - mv.log_forward);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (std::log2(u(st.rng)) <= la) {
    apply_toggles(st, mv.toggles);
    st.log_lik += dlik;
    st.log_prior += dprior;
    st.accepted += 1;
    return true;
  }
  return false;
}

// single-node reassignment, uniform over existing blocks plus one fresh label.
// merges are only legal for a singleton holding the last label: then no
// compaction relabel happens, every non-lazy move is label-exact and bijective,
// and the uniform kernel probabilities below are the true proposal masses
inline bool partition_mh_step(ChainState& st) {
  if (!st.has_partition) return false;
  int n = st.g.n_nodes();
  int B = st.part.B();
  std::uniform_int_distribution<int> nd(0, n - 1);
  std::uniform_int_distribution<int> td(0, B);  // B = fresh block
  int i = nd(st.rng);
  int target = td(st.rng);
  st.proposed += 1;
  int old = st.part.b[i];
  bool alone = st.part.sizes[old] == 1;
  if (target == old || (alone && target == B)) {
    st.accepted += 1;  // lazy
    return false;
  }
  if (alone && old != B - 1) return false;  // middle-label merge: propose-and-reject
  Partition p2 = st.part;
  p2.move_node(i, target);
  double lp2 = log_prior_state(st.prior, st.g, &p2);
  double la;
  if (impossible(lp2)) {
    la = neg_inf;
  } else {
    double log_fwd = -std::log2(double(n) * double(B + 1));
    double log_rev = -std::log2(double(n) * double(p2.B() + 1));
    la = std::min(0.0, (lp2 - st.log_prior) + log_rev - log_fwd);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (std::log2(u(st.rng)) <= la) {
    st.part = std::move(p2);
    st.log_prior = lp2;
    st.accepted += 1;
    return true;
  }
  return false;
}

// gaussian random-walk move on one dynamics parameter; out-of-support rejected
inline bool param_mh_step(ChainState& st, const std::string& name, double sigma) {
  DynamicsModel m2 = st.cache.model();
  std::normal_distribution<double> step(0.0, sigma);
  st.proposed += 1;
  set_param(m2, name, get_param(m2, name) + step(st.rng));
  if (!params_in_support(m2)) return false;
  transition_cache c2(m2);
  double lik2 = log_likelihood_cached(st.g, c2, st.counts, *st.x);
  double la = impossible(lik2) ? neg_inf : std::min(0.0, lik2 - st.log_lik);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (std::log2(u(st.rng)) <= la) {
    st.cache = std::move(c2);
    st.log_lik = lik2;
    st.accepted += 1;
    return true;
  }
  return false;
}

struct gibbs_schedule {
  bool graph = true;
  bool partition = true;
  std::vector<std::string> params;  // phi names
};

inline void gibbs_sweep(ChainState& st, const sampler_config& cfg, const gibbs_schedule& sched) {
  int n = st.g.n_nodes();
  if (sched.graph) {
    long long reps = cfg.graph_proposals_per_sweep > 0 ? cfg.graph_proposals_per_sweep
                                                       : simple_pair_count(n);
    if (st.g.edge_total() > 0)
      for (long long k = 0; k < reps; ++k) graph_mh_step(st);
  }
  if (sched.partition && st.has_partition)
    for (int k = 0; k < n; ++k) partition_mh_step(st);
  for (const auto& name : sched.params) param_mh_step(st, name, cfg.sigma_phi);
}

inline void audit_state(const ChainState& st, double tol = 1e-6) {
  ChainState fresh = st;
  fresh.refresh();
  if (std::abs(fresh.log_lik - st.log_lik) > tol ||
      std::abs(fresh.log_prior - st.log_prior) > tol)
    throw std::logic_error("ChainState audit failed: cached values diverged");
}

inline PosteriorSample record_sample(const ChainState& st) {
  PosteriorSample s{st.g, st.part, st.has_partition, st.cache.model(), st.log_lik, st.log_prior};
  return s;
}

inline ChainState make_chain_state(const TimeSeries& x, const PriorModel& prior,
                                   const DynamicsModel& dyn, std::mt19937_64 rng) {
  prior_draw d = sample_prior(prior, rng);
  ChainState st(d.g, prior, dyn, x, rng);
  if (d.has_partition) {
    st.part = std::move(d.part);
    st.has_partition = true;
    st.log_prior = log_prior_state(prior, st.g, &st.part);
  }
  return st;
}

inline std::vector<PosteriorSample> run_chain(const TimeSeries& x, const PriorModel& prior,
                                              const DynamicsModel& dyn,
                                              const sampler_config& cfg,
                                              const ChainState* init = nullptr) {
  ChainState st = init ? *init : make_chain_state(x, prior, dyn, make_rng(cfg.seed, 0));
  if (init) st.rng = make_rng(cfg.seed, 0);
  gibbs_schedule sched;
  sched.graph = cfg.update_graph;
  sched.partition = cfg.update_partition;
  sched.params = cfg.infer_params;
  std::vector<PosteriorSample> out;
  out.reserve(cfg.sweeps / std::max<long long>(1, cfg.thinning));
  long long total = cfg.burn_in + cfg.sweeps;
  for (long long s = 1; s <= total; ++s) {
    gibbs_sweep(st, cfg, sched);
    if (cfg.audit_every > 0 && s % cfg.audit_every == 0) audit_state(st);
    if (s > cfg.burn_in && (s - cfg.burn_in) % cfg.thinning == 0) out.push_back(record_sample(st));
  }
  return out;
}

// ---- semi-greedy description-length search --------------------------------------

struct semi_greedy_result {
  long long e_star = 0;
  bool converged = false;
  int rounds = 0;
  double objective = neg_inf;  // log2 P(x, phi, g, theta) at the optimum
};

// one candidate move for the G block: add / remove / swap / hinge
inline MoveProposal random_dl_candidate(const Graph& g, std::mt19937_64& rng) {
  long long E = g.edge_total();
  int choices = E >= 2 ? 4 : (E >= 1 ? 3 : 1);
  int c = std::uniform_int_distribution<int>(0, choices - 1)(rng);
  MoveProposal mv;
  if (c == 0) {  // add a uniform pair
    long long pairs = g.mode() == graph_mode::simple ? simple_pair_count(g.n_nodes())
                                                     : loopy_pair_count(g.n_nodes());
    long long k = std::uniform_int_distribution<long long>(0, pairs - 1)(rng);
    node_pair p = g.mode() == graph_mode::simple ? nth_simple_pair(g.n_nodes(), k)
                                                 : nth_loopy_pair(g.n_nodes(), k);
    mv.toggles = {{p.i, p.j, +1}};
    return mv;
  }
  if (c == 1) {  // remove a uniform instance
    long long k = std::uniform_int_distribution<long long>(0, E - 1)(rng);
    node_pair p = g.edges()[k];
    mv.toggles = {{p.i, p.j, -1}};
    return mv;
  }
  if (c == 2) return propose_hinge_flip(g, rng);
  return propose_double_edge_swap(g, rng);
}

// maximizes log P(x, phi, G, theta); each block keeps the best of K candidates
// relative to the current state, so the objective never decreases (and K=1 is
// plain greedy hill-climbing)
inline semi_greedy_result semi_greedy_search(ChainState& st, const sampler_config& cfg) {
  if (st.prior.ec.is_delta)
    throw std::invalid_argument("semi_greedy_search: needs a geometric edge-count prior");
  semi_greedy_result res;
  double phi_density = log2_param_prior(st.cache.model(), cfg.infer_params);
  const double tol = 1e-9;
  long long e_prev = st.g.edge_total();
  int stable = 0;
  for (int round = 0; round < cfg.max_rounds; ++round) {
    res.rounds = round + 1;
    // --- G block
    double best = 0.0;
    std::vector<edge_toggle> best_toggles;
    for (int k = 0; k < cfg.candidates_g; ++k) {
      MoveProposal mv = random_dl_candidate(st.g, st.rng);
      if (mv.lazy || mv.toggles.empty()) continue;
      double dp = log_prior_delta(st.prior, st.g, st.has_partition ? &st.part : nullptr,
                                  mv.toggles);
      if (impossible(dp)) continue;
      double dl = delta_log_likelihood(st.g, st.cache, st.counts, *st.x, mv.toggles);
      if (impossible(dl)) continue;
      if (dp + dl > best + tol) {
        best = dp + dl;
        best_toggles = mv.toggles;
      }
    }
    if (!best_toggles.empty()) {
      double dp = log_prior_delta(st.prior, st.g, st.has_partition ? &st.part : nullptr,
                                  best_toggles);
      double dl = delta_log_likelihood(st.g, st.cache, st.counts, *st.x, best_toggles);
      apply_toggles(st, best_toggles);
      st.log_prior += dp;
      st.log_lik += dl;
    }
    // --- theta block (sbm partition)
    if (st.has_partition && cfg.update_partition) {
      double bestp = 0.0;
      Partition best_part = st.part;
      bool found = false;
      std::uniform_int_distribution<int> nd(0, st.g.n_nodes() - 1);
      for (int k = 0; k < cfg.candidates_g; ++k) {
        std::uniform_int_distribution<int> td(0, st.part.B());
        int i = nd(st.rng);
        int target = td(st.rng);
        if (target == st.part.b[i]) continue;
        Partition p2 = st.part;
        p2.move_node(i, target);
        double lp2 = log_prior_state(st.prior, st.g, &p2);
        if (impossible(lp2)) continue;
        if (lp2 - st.log_prior > bestp + tol) {
          bestp = lp2 - st.log_prior;
          best_part = std::move(p2);
          found = true;
        }
      }
      if (found) {
        st.part = std::move(best_part);
        st.log_prior += bestp;
      }
    }
    // --- phi block
    for (const auto& name : cfg.infer_params) {
      double best_gain = 0.0;
      double best_val = get_param(st.cache.model(), name);
      bool found = false;
      std::normal_distribution<double> step(0.0, cfg.sigma_phi);
      for (int k = 0; k < cfg.candidates_phi; ++k) {
        DynamicsModel m2 = st.cache.model();
        set_param(m2, name, get_param(m2, name) + step(st.rng));
        if (!params_in_support(m2)) continue;
        transition_cache c2(m2);
        double lik2 = log_likelihood_cached(st.g, c2, st.counts, *st.x);
        if (impossible(lik2)) continue;
        if (lik2 - st.log_lik > best_gain + tol) {
          best_gain = lik2 - st.log_lik;
          best_val = get_param(m2, name);
          found = true;
        }
      }
      if (found) {
        DynamicsModel m2 = st.cache.model();
        set_param(m2, name, best_val);
        st.cache.set_model(m2);
        st.log_lik += best_gain;
      }
    }
    long long e_now = st.g.edge_total();
    stable = (e_now == e_prev) ? stable + 1 : 0;
    e_prev = e_now;
    if (stable >= cfg.patience) {
      res.converged = true;
      break;
    }
  }
  res.e_star = st.g.edge_total();
  res.objective = st.log_lik + st.log_prior + phi_density;
  return res;
}

}  // namespace reconlab
