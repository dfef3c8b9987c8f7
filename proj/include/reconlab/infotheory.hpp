#pragma once

// information-theoretic layer: exact evidence / posterior / mutual information
// by enumeration on small systems, and sample-based estimators (mean-field
// graph entropy, KDE parameter entropy, partition entropy, evidence and
// information-gain estimates) for everything larger.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "enumerate.hpp"
#include "graph.hpp"
#include "priors.hpp"
#include "sampler.hpp"
#include "series.hpp"
#include "util.hpp"

namespace reconlab {

// ---- posterior edge marginals ----------------------------------------------------

inline long long pair_count(graph_mode mode, int n) {
  return mode == graph_mode::simple ? simple_pair_count(n) : loopy_pair_count(n);
}

inline node_pair nth_pair(graph_mode mode, int n, long long k) {
  return mode == graph_mode::simple ? nth_simple_pair(n, k) : nth_loopy_pair(n, k);
}

// presence probabilities P(a_ij >= 1 | x) per unordered pair (diagonal pairs
// included in multigraph mode)
struct EdgeMarginals {
  int n = 0;
  graph_mode mode = graph_mode::simple;
  std::vector<double> pi;

  EdgeMarginals() = default;
  EdgeMarginals(int n_, graph_mode m) : n(n_), mode(m), pi(pair_count(m, n_), 0.0) {}

  long long index(int i, int j) const {
    if (i == j && mode == graph_mode::simple)
      throw std::invalid_argument("EdgeMarginals: no diagonal in simple mode");
    return mode == graph_mode::simple ? simple_pair_index(n, i, j) : loopy_pair_index(n, i, j);
  }
  double at(int i, int j) const { return pi[index(i, j)]; }
  double& at(int i, int j) { return pi[index(i, j)]; }
};

inline void accumulate_presence(EdgeMarginals& m, const Graph& g, double w) {
  for (long long k = 0; k < (long long)m.pi.size(); ++k) {
    node_pair p = nth_pair(m.mode, m.n, k);
    if (g.instances(p.i, p.j) > 0) m.pi[k] += w;
  }
}

// plug-in presence frequencies; `pseudocount` c maps a hit count k out of S
// samples to (k + c) / (S + 2c) — the default c = 0 keeps hard 0/1 frequencies
// (downstream log terms then hit the -inf sentinel rather than being smoothed)
inline EdgeMarginals edge_marginals(const std::vector<PosteriorSample>& samples, int n,
                                    graph_mode mode, double pseudocount = 0.0) {
  if (samples.empty()) throw std::invalid_argument("edge_marginals: no samples");
  EdgeMarginals m(n, mode);
  for (const auto& s : samples) accumulate_presence(m, s.g, 1.0);
  double S = double(samples.size());
  for (double& pi : m.pi) pi = (pi + pseudocount) / (S + 2.0 * pseudocount);
  return m;
}

// enumerated flavor: log_post holds normalized log2 posterior masses
inline EdgeMarginals edge_marginals(const std::vector<Graph>& graphs,
                                    const std::vector<double>& log_post, graph_mode mode) {
  if (graphs.empty()) throw std::invalid_argument("edge_marginals: no graphs");
  EdgeMarginals m(graphs[0].n_nodes(), mode);
  for (size_t k = 0; k < graphs.size(); ++k)
    if (!impossible(log_post[k])) accumulate_presence(m, graphs[k], std::exp2(log_post[k]));
  return m;
}

// log2 of the mean-field (independent-pair) posterior mass of g; marginals can
// be clipped away from {0,1} with a pseudocount before taking logs
inline double mf_posterior_log_prob(const EdgeMarginals& m, const Graph& g,
                                    double clip = 0.0) {
  double lp = 0.0;
  for (long long k = 0; k < (long long)m.pi.size(); ++k) {
    node_pair p = nth_pair(m.mode, m.n, k);
    double pi = std::min(1.0 - clip, std::max(clip, m.pi[k]));
    bool present = g.instances(p.i, p.j) > 0;
    double term = present ? std::log2(pi) : std::log2(1.0 - pi);
    if (std::isnan(term) || impossible(term)) return neg_inf;
    lp += term;
  }
  return lp;
}

// H_MF(G|x) = sum of pairwise bernoulli entropies, in bits
inline double mf_graph_entropy(const EdgeMarginals& m) {
  double h = 0.0;
  for (double pi : m.pi) h += binary_entropy(pi);
  return h;
}

// ---- exact enumeration: evidence, posterior, mutual information --------------------

struct enumerated_posterior {
  std::vector<Graph> graphs;
  std::vector<double> log_post;    // normalized log2 posterior masses
  std::vector<double> log_prior;   // log2 prior masses (partition summed out for sbm)
  double log_evidence = neg_inf;   // log2 zeta_M(x)
};

// cap for geometric edge-count enumeration: P(E > cap) < 2^-40
inline long long geometric_enumeration_cap(const edge_count_prior& ec) {
  if (ec.is_delta) return ec.e_star;
  if (ec.lambda_bar == 0.0) return 0;
  double r = ec.lambda_bar / (ec.lambda_bar + 1.0);
  return (long long)std::ceil(-40.0 / std::log2(r)) + 1;
}

// all graphs in the structure prior's support with log2 prior masses, for
// enumerable n; geometric edge counts are truncated at a negligible tail
inline enumerated_posterior enumerate_prior_support(const PriorModel& prior,
                                                    long long max_edges = -1) {
  enumerated_posterior out;
  graph_mode mode = natural_mode(prior.kind);
  std::vector<long long> e_list;
  if (prior.ec.is_delta) {
    e_list.push_back(prior.ec.e_star);
  } else {
    long long cap = max_edges >= 0 ? max_edges : geometric_enumeration_cap(prior.ec);
    for (long long e = 0; e <= cap; ++e) e_list.push_back(e);
  }
  for (long long e : e_list) {
    for (auto& g : enumerate_graphs(prior.n, e, mode)) {
      double lp = prior.kind == prior_kind::sbm ? sbm_log_marginal_prior(g, prior)
                                                : log_prior_state(prior, g, nullptr);
      if (impossible(lp)) continue;
      out.graphs.push_back(std::move(g));
      out.log_prior.push_back(lp);
    }
  }
  return out;
}

// exact log2 zeta at a fixed phi, and the normalized posterior over graphs
inline enumerated_posterior enumerate_posterior(const TimeSeries& x, const PriorModel& prior,
                                                const DynamicsModel& dyn,
                                                long long max_edges = -1) {
  enumerated_posterior out = enumerate_prior_support(prior, max_edges);
  out.log_post.resize(out.graphs.size());
  std::vector<double> joint(out.graphs.size());
  for (size_t k = 0; k < out.graphs.size(); ++k)
    joint[k] = out.log_prior[k] + log_likelihood(out.graphs[k], dyn, x);
  out.log_evidence = log_sum_exp2(joint);
  for (size_t k = 0; k < joint.size(); ++k) out.log_post[k] = joint[k] - out.log_evidence;
  return out;
}

// evidence with up to one inferred parameter integrated out by Simpson
// quadrature over its flat prior support
inline double enumerate_evidence(const TimeSeries& x, const PriorModel& prior,
                                 const DynamicsModel& dyn,
                                 const std::vector<std::string>& infer_params = {},
                                 int quad_points = 41, long long max_edges = -1) {
  if (infer_params.empty()) return enumerate_posterior(x, prior, dyn, max_edges).log_evidence;
  if (infer_params.size() > 1)
    throw std::invalid_argument("enumerate_evidence: quadrature supports one parameter");
  if (quad_points < 3 || quad_points % 2 == 0)
    throw std::invalid_argument("enumerate_evidence: quad_points must be odd and >= 3");
  const std::string& name = infer_params[0];
  param_info info = param_bounds(dyn.kind, name);
  double h = (info.hi - info.lo) / double(quad_points - 1);
  double log_density = log2_param_prior(dyn, infer_params);
  enumerated_posterior support = enumerate_prior_support(prior, max_edges);
  std::vector<double> terms;
  for (int q = 0; q < quad_points; ++q) {
    DynamicsModel m = dyn;
    set_param(m, name, info.lo + h * double(q));
    if (!params_in_support(m)) continue;
    std::vector<double> joint(support.graphs.size());
    for (size_t k = 0; k < support.graphs.size(); ++k)
      joint[k] = support.log_prior[k] + log_likelihood(support.graphs[k], m, x);
    double coef = (q == 0 || q == quad_points - 1) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
    terms.push_back(std::log2(coef * h / 3.0) + log_density + log_sum_exp2(joint));
  }
  return log_sum_exp2(terms);
}

// I(X;G) in bits by double enumeration of graphs and length-T series
inline double exact_mutual_information(const std::vector<Graph>& graphs,
                                       const std::vector<double>& log_prior, int T,
                                       const DynamicsModel& dyn) {
  if (graphs.empty()) throw std::invalid_argument("exact_mutual_information: no graphs");
  int n = graphs[0].n_nodes();
  long long bits = (long long)n * T;
  if (bits > 22) throw std::domain_error("exact_mutual_information: series space too large");
  long long n_series = 1LL << bits;
  double mi = 0.0;
  std::vector<double> ll(graphs.size());
  for (long long code = 0; code < n_series; ++code) {
    TimeSeries x = series_from_bits(n, T, (unsigned long long)code);
    std::vector<double> joint(graphs.size());
    for (size_t k = 0; k < graphs.size(); ++k) {
      ll[k] = log_likelihood(graphs[k], dyn, x);
      joint[k] = log_prior[k] + ll[k];
    }
    double log_px = log_sum_exp2(joint);
    if (impossible(log_px)) continue;
    for (size_t k = 0; k < graphs.size(); ++k)
      if (!impossible(joint[k])) mi += std::exp2(joint[k]) * (ll[k] - log_px);
  }
  return mi;
}

inline double exact_mutual_information(const PriorModel& prior, int T, const DynamicsModel& dyn,
                                       long long max_edges = -1) {
  enumerated_posterior sup = enumerate_prior_support(prior, max_edges);
  return exact_mutual_information(sup.graphs, sup.log_prior, T, dyn);
}

// MC estimate of I(X;G) over K joint draws (g, x): the series average is
// stochastic but log2 P(x) is computed exactly by summing the enumerated
// structure support, so the standard error shrinks as K^(-1/2)
inline mc_estimate mc_mutual_information(const PriorModel& prior, const DynamicsModel& dyn,
                                         int T, int K, std::mt19937_64& rng,
                                         long long max_edges = -1) {
  if (K < 2) throw std::invalid_argument("mc_mutual_information: need K >= 2");
  enumerated_posterior sup = enumerate_prior_support(prior, max_edges);
  std::vector<double> terms((size_t)K);
  for (int k = 0; k < K; ++k) {
    prior_draw d = sample_prior(prior, rng);
    TimeSeries x = simulate(d.g, dyn, T, rng);
    std::vector<double> joint(sup.graphs.size());
    for (size_t j = 0; j < sup.graphs.size(); ++j)
      joint[j] = sup.log_prior[j] + log_likelihood(sup.graphs[j], dyn, x);
    terms[(size_t)k] = log_likelihood(d.g, dyn, x) - log_sum_exp2(joint);
  }
  return mean_and_se(terms);
}

// ---- reconstruction index and related summaries -----------------------------------

struct recon_index {
  double psi = 0.0;
  bool clamped_low = false, clamped_high = false;
  bool degenerate_prior = false;  // H(G) == 0: prior already pins the graph
};

inline recon_index reconstruction_index(double info, double prior_entropy) {
  recon_index r;
  if (prior_entropy <= 0.0) {
    r.psi = 1.0;
    r.degenerate_prior = true;
    return r;
  }
  r.psi = info / prior_entropy;
  if (r.psi < 0.0) {
    r.psi = 0.0;
    r.clamped_low = true;
  } else if (r.psi > 1.0) {
    r.psi = 1.0;
    r.clamped_high = true;
  }
  return r;
}

// spiked prior: g* with probability 1-eps, eps spread uniformly over the
// other family members, so H(G) = h(eps) + eps*log2(Z) with Z = |family|-1
struct delta_prior_point {
  double eps = 0.0, mi = 0.0, prior_entropy = 0.0, psi = 1.0;
};

inline delta_prior_point delta_prior_reconstructability(const Graph& g_star,
                                                        const std::vector<Graph>& family,
                                                        double eps, int T,
                                                        const DynamicsModel& dyn) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("delta_prior_reconstructability: eps must be in (0,1)");
  delta_prior_point out;
  out.eps = eps;
  long long z = 0;
  bool found = false;
  for (const auto& g : family) {
    if (g == g_star)
      found = true;
    else
      z += 1;
  }
  if (!found || z == 0)
    throw std::invalid_argument(
        "delta_prior_reconstructability: family must contain g* and at least one other graph");
  std::vector<double> lp(family.size());
  for (size_t k = 0; k < family.size(); ++k)
    lp[k] = family[k] == g_star ? std::log2(1.0 - eps) : std::log2(eps / double(z));
  out.prior_entropy = binary_entropy(eps) + eps * std::log2(double(z));
  out.mi = exact_mutual_information(family, lp, T, dyn);
  out.psi = reconstruction_index(out.mi, out.prior_entropy).psi;
  return out;
}

// ---- KDE differential entropy for sampled parameters -------------------------------

struct kde_entropy_result {
  double bits = 0.0;
  double bandwidth = 0.0;
  bool degenerate = false;  // no spread in the samples
};

// plug-in grid estimator with a gaussian kernel and silverman's bandwidth
inline kde_entropy_result kde_param_entropy(std::vector<double> v, int bins = 2048) {
  kde_entropy_result out;
  if (v.size() < 2) {
    out.degenerate = true;
    return out;
  }
  std::sort(v.begin(), v.end());
  double n = double(v.size());
  auto quantile = [&](double q) {
    double pos = q * (n - 1.0);
    size_t lo = size_t(pos);
    size_t hi = std::min(v.size() - 1, lo + 1);
    double frac = pos - double(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
  };
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  double sd = std::sqrt(var / (n - 1.0));
  double iqr_term = (quantile(0.75) - quantile(0.25)) / 1.34;
  double spread = neg_inf;
  if (sd > 0.0 && iqr_term > 0.0)
    spread = std::min(sd, iqr_term);
  else if (sd > 0.0)
    spread = sd;
  else if (iqr_term > 0.0)
    spread = iqr_term;
  if (impossible(spread)) {
    out.degenerate = true;
    return out;
  }
  double bw = 0.9 * spread * std::pow(n, -0.2);
  out.bandwidth = bw;
  double lo = v.front() - 5.0 * bw, hi = v.back() + 5.0 * bw;
  double dx = (hi - lo) / double(bins);
  std::vector<double> mass(bins, 0.0);
  for (double x : v) {
    int b = std::min(bins - 1, std::max(0, int((x - lo) / dx)));
    mass[b] += 1.0 / n;
  }
  int reach = int(std::ceil(5.0 * bw / dx));
  std::vector<double> kernel(2 * reach + 1);
  double ksum = 0.0;
  for (int d = -reach; d <= reach; ++d) {
    double u = double(d) * dx / bw;
    kernel[d + reach] = std::exp(-0.5 * u * u);
    ksum += kernel[d + reach];
  }
  for (double& w : kernel) w /= ksum;
  double hbits = 0.0;
  for (int j = 0; j < bins; ++j) {
    double p = 0.0;
    for (int d = -reach; d <= reach; ++d) {
      int src = j - d;
      if (src >= 0 && src < bins) p += mass[src] * kernel[d + reach];
    }
    if (p > 0.0) hbits -= p * std::log2(p);
  }
  out.bits = hbits + std::log2(dx);
  return out;
}

// ---- partition entropy (sbm) --------------------------------------------------------

// mean-field partition entropy: each sampled labeling is greedily aligned to
// the running modal labeling (labels are arbitrary, only the induced grouping
// matters), then per-node label entropies are summed
inline double sbm_partition_entropy(const std::vector<Partition>& parts) {
  if (parts.empty()) return 0.0;
  int n = int(parts[0].b.size());
  int max_labels = n + 1;
  std::vector<std::vector<double>> counts(n, std::vector<double>(max_labels, 0.0));
  std::vector<int> modal(n, 0);
  for (const auto& part : parts) {
    int bp = part.B();
    // overlap with current modal labels
    std::vector<std::vector<int>> overlap(bp, std::vector<int>(max_labels, 0));
    for (int i = 0; i < n; ++i) overlap[part.b[i]][modal[i]] += 1;
    std::vector<int> map(bp, -1);
    std::vector<bool> used(max_labels, false);
    for (int step = 0; step < bp; ++step) {
      int best_r = -1, best_m = -1, best = -1;
      for (int r = 0; r < bp; ++r) {
        if (map[r] >= 0) continue;
        for (int m = 0; m < max_labels; ++m) {
          if (used[m]) continue;
          if (overlap[r][m] > best) {
            best = overlap[r][m];
            best_r = r;
            best_m = m;
          }
        }
      }
      map[best_r] = best_m;
      used[best_m] = true;
    }
    for (int i = 0; i < n; ++i) counts[i][map[part.b[i]]] += 1.0;
    // refresh modal labels
    for (int i = 0; i < n; ++i) {
      int arg = 0;
      for (int m = 1; m < max_labels; ++m)
        if (counts[i][m] > counts[i][arg]) arg = m;
      modal[i] = arg;
    }
  }
  double h = 0.0;
  double s = double(parts.size());
  for (int i = 0; i < n; ++i) {
    std::vector<double> pi = counts[i];
    for (double& p : pi) p /= s;
    h += discrete_entropy(pi);
  }
  return h;
}

// ---- sample-based evidence and information estimates --------------------------------

struct evidence_estimate {
  double log_evidence = neg_inf;  // log2 zeta-hat
  double mean_log_joint = neg_inf;
  double graph_entropy = 0.0;      // H_MF(G|x)
  double param_entropy = 0.0;      // sum of KDE entropies over inferred phi
  double partition_entropy = 0.0;  // sbm chains only
};

inline double mean_posterior_log_lik(const std::vector<PosteriorSample>& samples) {
  double s = 0.0;
  for (const auto& smp : samples) s += smp.log_lik;
  return s / double(samples.size());
}

// log2 zeta-hat = mean log2 P(x, phi, g, theta) + H_MF(G|x) + H-hat(phi|x) + H-hat(b|x)
inline evidence_estimate estimate_log_evidence(const std::vector<PosteriorSample>& samples,
                                               const std::vector<std::string>& infer_params,
                                               graph_mode mode) {
  if (samples.empty()) throw std::invalid_argument("estimate_log_evidence: no samples");
  evidence_estimate out;
  int n = samples[0].g.n_nodes();
  double mj = 0.0;
  for (const auto& s : samples)
    mj += s.log_lik + s.log_prior + log2_param_prior(s.model, infer_params);
  out.mean_log_joint = mj / double(samples.size());
  out.graph_entropy = mf_graph_entropy(edge_marginals(samples, n, mode));
  for (const auto& name : infer_params) {
    std::vector<double> vals;
    vals.reserve(samples.size());
    for (const auto& s : samples) vals.push_back(get_param(s.model, name));
    auto k = kde_param_entropy(vals);
    if (!k.degenerate) out.param_entropy += k.bits;
  }
  if (samples[0].has_partition) {
    std::vector<Partition> parts;
    parts.reserve(samples.size());
    for (const auto& s : samples) parts.push_back(s.part);
    out.partition_entropy = sbm_partition_entropy(parts);
  }
  out.log_evidence =
      out.mean_log_joint + out.graph_entropy + out.param_entropy + out.partition_entropy;
  return out;
}

// information gain: per-dataset mean posterior log-likelihood minus log-evidence,
// averaged over datasets
inline mc_estimate information_gain_estimate(const std::vector<double>& mean_post_loglik,
                                             const std::vector<double>& log_evidence) {
  if (mean_post_loglik.size() != log_evidence.size())
    throw std::invalid_argument("information_gain_estimate: size mismatch");
  std::vector<double> diff(mean_post_loglik.size());
  for (size_t k = 0; k < diff.size(); ++k) diff[k] = mean_post_loglik[k] - log_evidence[k];
  return mean_and_se(diff);
}

// prior entropy Lambda-hat: mean description length of the generated structures
inline mc_estimate prior_entropy_estimate(const std::vector<double>& log_prior_true) {
  std::vector<double> neg(log_prior_true.size());
  for (size_t k = 0; k < neg.size(); ++k) neg[k] = -log_prior_true[k];
  return mean_and_se(neg);
}

// mean-field mutual-information lower bound: mean [log q(g*|x) - log P(g*)]
inline mc_estimate mf_mutual_information(const std::vector<double>& log_q_true,
                                         const std::vector<double>& log_prior_true) {
  if (log_q_true.size() != log_prior_true.size())
    throw std::invalid_argument("mf_mutual_information: size mismatch");
  std::vector<double> diff(log_q_true.size());
  for (size_t k = 0; k < diff.size(); ++k) diff[k] = log_q_true[k] - log_prior_true[k];
  return mean_and_se(diff);
}

}  // namespace reconlab
