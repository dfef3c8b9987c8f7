#pragma once

// binary Markov-chain dynamics on a graph: per-node activation/deactivation
// probabilities built from neighbor activity counts (m active, n inactive),
// simulation, exact log-likelihood and O(T) toggle deltas.

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "series.hpp"
#include "util.hpp"

namespace reconlab {

enum class dyn_kind { glauber, sis, voter, cowan };

inline std::string to_string(dyn_kind k) {
  switch (k) {
    case dyn_kind::glauber: return "glauber";
    case dyn_kind::sis: return "sis";
    case dyn_kind::voter: return "voter";
    case dyn_kind::cowan: return "cowan";
  }
  return "glauber";
}

inline dyn_kind dyn_kind_from_string(const std::string& s) {
  if (s == "glauber") return dyn_kind::glauber;
  if (s == "sis") return dyn_kind::sis;
  if (s == "voter") return dyn_kind::voter;
  if (s == "cowan") return dyn_kind::cowan;
  throw std::invalid_argument("unknown dynamics kind: " + s);
}

// the printed transition table anti-aligns glauber spins; ferro flips the sign
enum class glauber_convention { ferro, table_literal };

struct DynamicsModel {
  dyn_kind kind = dyn_kind::glauber;
  double alpha0 = 0.0;  // spontaneous activation
  double beta0 = 0.0;   // spontaneous deactivation
  glauber_convention conv = glauber_convention::ferro;

  double J = 1.0;                             // glauber coupling
  double sis_beta = 0.5, sis_lambda = 0.25;   // recovery, infection
  double cowan_a = 1.0, cowan_beta = 0.1, cowan_mu = 1.0, cowan_nu = 1.0;
};

// ---- parameter registry (for gaussian moves, bounds, priors) ---------------

struct param_info {
  const char* name;
  double lo, hi;
  bool probability;  // flat density 1 on [0,1]; capped params get density 1/(hi-lo)
};

inline std::vector<param_info> param_registry(dyn_kind k) {
  // unbounded positives capped at 10
  switch (k) {
    case dyn_kind::glauber: return {{"J", 0.0, 10.0, false}};
    case dyn_kind::sis: return {{"beta", 0.0, 1.0, true}, {"lambda", 0.0, 1.0, true}};
    case dyn_kind::voter: return {};
    case dyn_kind::cowan:
      return {{"a", 0.0, 10.0, false},
              {"beta", 0.0, 1.0, true},
              {"mu", 0.0, 10.0, false},
              {"nu", 0.0, 10.0, false}};
  }
  return {};
}

// alpha0/beta0 are inferable too (brain pipeline); registry name list covers them
inline std::vector<param_info> full_param_registry(dyn_kind k) {
  auto v = param_registry(k);
  v.push_back({"alpha0", 0.0, 1.0, true});
  v.push_back({"beta0", 0.0, 1.0, true});
  return v;
}

inline double get_param(const DynamicsModel& m, const std::string& name) {
  if (name == "alpha0") return m.alpha0;
  if (name == "beta0") return m.beta0;
  switch (m.kind) {
    case dyn_kind::glauber:
      if (name == "J") return m.J;
      break;
    case dyn_kind::sis:
      if (name == "beta") return m.sis_beta;
      if (name == "lambda") return m.sis_lambda;
      break;
    case dyn_kind::voter: break;
    case dyn_kind::cowan:
      if (name == "a") return m.cowan_a;
      if (name == "beta") return m.cowan_beta;
      if (name == "mu") return m.cowan_mu;
      if (name == "nu") return m.cowan_nu;
      break;
  }
  throw std::invalid_argument("unknown dynamics parameter: " + name);
}

inline void set_param(DynamicsModel& m, const std::string& name, double v) {
  if (name == "alpha0") {
    m.alpha0 = v;
    return;
  }
  if (name == "beta0") {
    m.beta0 = v;
    return;
  }
  switch (m.kind) {
    case dyn_kind::glauber:
      if (name == "J") {
        m.J = v;
        return;
      }
      break;
    case dyn_kind::sis:
      if (name == "beta") {
        m.sis_beta = v;
        return;
      }
      if (name == "lambda") {
        m.sis_lambda = v;
        return;
      }
      break;
    case dyn_kind::voter: break;
    case dyn_kind::cowan:
      if (name == "a") {
        m.cowan_a = v;
        return;
      }
      if (name == "beta") {
        m.cowan_beta = v;
        return;
      }
      if (name == "mu") {
        m.cowan_mu = v;
        return;
      }
      if (name == "nu") {
        m.cowan_nu = v;
        return;
      }
      break;
  }
  throw std::invalid_argument("unknown dynamics parameter: " + name);
}

inline param_info param_bounds(dyn_kind k, const std::string& name) {
  for (const auto& p : full_param_registry(k))
    if (name == p.name) return p;
  throw std::invalid_argument("unknown dynamics parameter: " + name);
}

// bounds plus the SIS support constraint lambda <= beta
inline bool params_in_support(const DynamicsModel& m) {
  for (const auto& p : full_param_registry(m.kind)) {
    double v = get_param(m, p.name);
    if (v < p.lo || v > p.hi) return false;
  }
  if (m.kind == dyn_kind::sis && m.sis_lambda > m.sis_beta) return false;
  return true;
}

// flat log2-density of the inferred parameters (0 per probability param,
// -log2(hi-lo) per capped param)
inline double log2_param_prior(const DynamicsModel& m, const std::vector<std::string>& inferred) {
  double lp = 0.0;
  for (const auto& name : inferred) {
    auto p = param_bounds(m.kind, name);
    if (!p.probability) lp -= std::log2(p.hi - p.lo);
  }
  return lp;
}

// ---- transition probabilities ----------------------------------------------

inline double activation_tilde(const DynamicsModel& m, int n_inactive, int m_active) {
  switch (m.kind) {
    case dyn_kind::glauber: {
      double s = (m.conv == glauber_convention::ferro) ? (m_active - n_inactive)
                                                       : (n_inactive - m_active);
      return sigmoid(2.0 * m.J * s);
    }
    case dyn_kind::sis: {
      if (m_active == 0) return 0.0;
      if (m.sis_beta <= 0.0) return 0.0;  // support enforces lambda <= beta
      return 1.0 - std::pow(1.0 - m.sis_lambda / m.sis_beta, m_active);
    }
    case dyn_kind::voter: {
      int k = n_inactive + m_active;
      return k == 0 ? 0.0 : double(m_active) / double(k);  // isolated node frozen
    }
    case dyn_kind::cowan:
      return sigmoid(m.cowan_a * (m.cowan_nu * m_active - m.cowan_mu));
  }
  return 0.0;
}

inline double deactivation_tilde(const DynamicsModel& m, int n_inactive, int m_active) {
  switch (m.kind) {
    case dyn_kind::glauber: {
      double s = (m.conv == glauber_convention::ferro) ? (n_inactive - m_active)
                                                       : (m_active - n_inactive);
      return sigmoid(2.0 * m.J * s);
    }
    case dyn_kind::sis: return m.sis_beta;
    case dyn_kind::voter: {
      int k = n_inactive + m_active;
      return k == 0 ? 0.0 : double(n_inactive) / double(k);
    }
    case dyn_kind::cowan: return m.cowan_beta;
  }
  return 0.0;
}

inline double activation_prob(const DynamicsModel& m, int n_inactive, int m_active) {
  if (n_inactive < 0 || m_active < 0) throw std::invalid_argument("activation_prob: negative count");
  return (1.0 - m.alpha0) * activation_tilde(m, n_inactive, m_active) + m.alpha0;
}

inline double deactivation_prob(const DynamicsModel& m, int n_inactive, int m_active) {
  if (n_inactive < 0 || m_active < 0) throw std::invalid_argument("deactivation_prob: negative count");
  return (1.0 - m.beta0) * deactivation_tilde(m, n_inactive, m_active) + m.beta0;
}

// log2 of P(x_{t+1} = y | x_t = x, n, m)
inline double log2_transition(const DynamicsModel& mod, int x, int y, int n_inactive, int m_active) {
  if (x == 0) {
    double a = activation_prob(mod, n_inactive, m_active);
    return std::log2(y ? a : 1.0 - a);
  }
  double b = deactivation_prob(mod, n_inactive, m_active);
  return std::log2(y ? 1.0 - b : b);
}

// per-(kappa, m) cache of the four transition log-probs; rebuilt on phi change
class transition_cache {
 public:
  explicit transition_cache(const DynamicsModel& m) : model_(m) {}

  const DynamicsModel& model() const { return model_; }
  DynamicsModel& model() { return model_; }

  void invalidate() { rows_.clear(); }

  void set_model(const DynamicsModel& m) {
    model_ = m;
    invalidate();
  }

  // entry index: x*2 + y
  const std::array<double, 4>& row(int kappa, int m_active) {
    if (kappa >= (int)rows_.size()) rows_.resize(kappa + 1);
    auto& level = rows_[kappa];
    if (level.empty()) {
      level.resize(kappa + 1);
      for (int m = 0; m <= kappa; ++m) {
        int n = kappa - m;
        level[m] = {log2_transition(model_, 0, 0, n, m), log2_transition(model_, 0, 1, n, m),
                    log2_transition(model_, 1, 0, n, m), log2_transition(model_, 1, 1, n, m)};
      }
    }
    return level[m_active];
  }

 private:
  DynamicsModel model_;
  std::vector<std::vector<std::array<double, 4>>> rows_;
};

// ---- neighbor activity table ------------------------------------------------

// m_it = sum_j a_ij x_jt (loops add 2 x_it); n_it = kappa_i - m_it
class activity_table {
 public:
  activity_table() = default;
  activity_table(const Graph& g, const TimeSeries& x) { recompute(g, x); }

  void recompute(const Graph& g, const TimeSeries& x) {
    if (g.n_nodes() != x.n) throw std::invalid_argument("activity_table: dimension mismatch");
    n_ = x.n;
    T_ = x.T;
    m_.assign((size_t)n_ * T_, 0);
    for (int i = 0; i < n_; ++i)
      for (const auto& [j, c] : g.neighbors(i)) {
        int w = (j == i) ? 2 * c : c;
        for (int t = 0; t < T_; ++t) m_[(size_t)i * T_ + t] += w * x(j, t);
      }
  }

  int m(int i, int t) const { return m_[(size_t)i * T_ + t]; }
  int n(const Graph& g, int i, int t) const { return g.degree(i) - m(i, t); }
  int rows() const { return n_; }
  int cols() const { return T_; }

  // mirror a toggle_edge(i,j,delta) in O(T)
  void apply_toggle(int i, int j, int delta, const TimeSeries& x) {
    if (i == j) {
      for (int t = 0; t < T_; ++t) m_[(size_t)i * T_ + t] += 2 * delta * x(i, t);
    } else {
      for (int t = 0; t < T_; ++t) {
        m_[(size_t)i * T_ + t] += delta * x(j, t);
        m_[(size_t)j * T_ + t] += delta * x(i, t);
      }
    }
  }

 private:
  int n_ = 0, T_ = 0;
  std::vector<int> m_;
};

// ---- simulation --------------------------------------------------------------

inline TimeSeries simulate(const Graph& g, const DynamicsModel& model, int T, std::mt19937_64& rng,
                           initial_state init = initial_state::bernoulli_half) {
  if (T < 1) throw std::invalid_argument("simulate: T >= 1");
  if (!params_in_support(model)) throw std::invalid_argument("simulate: parameters out of support");
  int n = g.n_nodes();
  TimeSeries x(n, T, init);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    std::uint8_t v = 0;
    if (init == initial_state::bernoulli_half) v = u(rng) < 0.5 ? 1 : 0;
    if (init == initial_state::all_active) v = 1;
    x.set(i, 0, v);
  }
  std::vector<int> m_cnt(n);
  for (int t = 0; t + 1 < T; ++t) {
    std::fill(m_cnt.begin(), m_cnt.end(), 0);
    for (int i = 0; i < n; ++i)
      for (const auto& [j, c] : g.neighbors(i)) m_cnt[i] += ((j == i) ? 2 * c : c) * x(j, t);
    for (int i = 0; i < n; ++i) {
      int m_act = m_cnt[i];
      int n_in = g.degree(i) - m_act;
      double p_next;
      if (x(i, t) == 0)
        p_next = activation_prob(model, n_in, m_act);
      else
        p_next = 1.0 - deactivation_prob(model, n_in, m_act);
      x.set(i, t + 1, u(rng) < p_next ? 1 : 0);
    }
  }
  return x;
}

// log2 P(X_1) under the series' initial-state spec (graph independent)
inline double log2_initial_state(const TimeSeries& x) {
  switch (x.init) {
    case initial_state::bernoulli_half: return -double(x.n);
    case initial_state::all_inactive:
      for (int i = 0; i < x.n; ++i)
        if (x(i, 0)) return neg_inf;
      return 0.0;
    case initial_state::all_active:
      for (int i = 0; i < x.n; ++i)
        if (!x(i, 0)) return neg_inf;
      return 0.0;
  }
  return -double(x.n);
}

// full log2 P(X | G, phi), initial state included
inline double log_likelihood(const Graph& g, const DynamicsModel& model, const TimeSeries& x) {
  if (g.n_nodes() != x.n) throw std::invalid_argument("log_likelihood: dimension mismatch");
  if (x.T < 2) throw std::invalid_argument("log_likelihood: need T >= 2");
  transition_cache cache(model);
  double lp = log2_initial_state(x);
  if (impossible(lp)) return neg_inf;
  std::vector<int> m_cnt(x.n);
  for (int t = 0; t + 1 < x.T; ++t) {
    std::fill(m_cnt.begin(), m_cnt.end(), 0);
    for (int i = 0; i < x.n; ++i)
      for (const auto& [j, c] : g.neighbors(i)) m_cnt[i] += ((j == i) ? 2 * c : c) * x(j, t);
    for (int i = 0; i < x.n; ++i) {
      const auto& r = cache.row(g.degree(i), m_cnt[i]);
      lp += r[x(i, t) * 2 + x(i, t + 1)];
      if (impossible(lp)) return neg_inf;
    }
  }
  return lp;
}

// cached variant used by the sampler (table + cache supplied by the chain)
inline double log_likelihood_cached(const Graph& g, transition_cache& cache,
                                    const activity_table& tab, const TimeSeries& x) {
  double lp = log2_initial_state(x);
  if (impossible(lp)) return neg_inf;
  for (int i = 0; i < x.n; ++i) {
    int kappa = g.degree(i);
    for (int t = 0; t + 1 < x.T; ++t) {
      lp += cache.row(kappa, tab.m(i, t))[x(i, t) * 2 + x(i, t + 1)];
    }
    if (impossible(lp)) return neg_inf;
  }
  return lp;
}

// ---- toggle deltas -----------------------------------------------------------

struct edge_toggle {
  int i = 0, j = 0;
  int delta = 0;
};

// log-likelihood change if all toggles were applied, computed without mutating
// anything; O(T) per affected node
inline double delta_log_likelihood(const Graph& g, transition_cache& cache,
                                   const activity_table& tab, const TimeSeries& x,
                                   const std::vector<edge_toggle>& toggles) {
  int affected[8];
  int n_aff = 0;
  auto mark = [&](int u) {
    for (int k = 0; k < n_aff; ++k)
      if (affected[k] == u) return;
    if (n_aff == 8) throw std::invalid_argument("delta_log_likelihood: too many toggles");
    affected[n_aff++] = u;
  };
  for (const auto& tg : toggles) {
    mark(tg.i);
    mark(tg.j);
  }
  double total = 0.0;
  for (int k = 0; k < n_aff; ++k) {
    int u = affected[k];
    int dkappa = 0;
    for (const auto& tg : toggles) {
      if (tg.i == u && tg.j == u)
        dkappa += 2 * tg.delta;
      else if (tg.i == u || tg.j == u)
        dkappa += tg.delta;
    }
    int kappa = g.degree(u);
    int kappa2 = kappa + dkappa;
    for (int t = 0; t + 1 < x.T; ++t) {
      int dm = 0;
      for (const auto& tg : toggles) {
        if (tg.i == u && tg.j == u)
          dm += 2 * tg.delta * x(u, t);
        else if (tg.i == u)
          dm += tg.delta * x(tg.j, t);
        else if (tg.j == u)
          dm += tg.delta * x(tg.i, t);
      }
      if (dkappa == 0 && dm == 0) continue;
      int idx = x(u, t) * 2 + x(u, t + 1);
      int m_old = tab.m(u, t);
      total += cache.row(kappa2, m_old + dm)[idx] - cache.row(kappa, m_old)[idx];
      if (std::isnan(total)) return neg_inf;  // -inf old factor: treat as reject
    }
    if (impossible(total)) return neg_inf;
  }
  return total;
}

}  // namespace reconlab
