#pragma once

// reconstruction performance metrics: posterior (cross-entropy) loss, mean
// error, AUC, jaccard similarity, and the fano / posterior-loss routes to
// reconstructability.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "graph.hpp"
#include "infotheory.hpp"
#include "util.hpp"

namespace reconlab {

struct loss_result {
  double bits = 0.0;
  bool clipped = false;  // a marginal hit 0/1 on the wrong side and was clipped
};

// cross-entropy loss between the true adjacency indicators and the posterior
// presence marginals; only conflicting hard marginals are clipped (to 1e-12,
// flagged) so that agreement costs exactly zero instead of returning infinity
inline loss_result posterior_loss(const Graph& g_true, const EdgeMarginals& m) {
  if (g_true.n_nodes() != m.n) throw std::invalid_argument("posterior_loss: size mismatch");
  const double eps = 1e-12;
  loss_result out;
  for (long long k = 0; k < (long long)m.pi.size(); ++k) {
    node_pair p = nth_pair(m.mode, m.n, k);
    bool present = g_true.instances(p.i, p.j) > 0;
    double hit = present ? m.pi[k] : 1.0 - m.pi[k];  // mass on the true value
    if (hit < eps) {
      out.clipped = true;
      hit = eps;
    }
    out.bits -= std::log2(hit);
  }
  return out;
}

// mean absolute error between presence marginals and the true indicators
inline double mean_error(const Graph& g_true, const EdgeMarginals& m) {
  if (g_true.n_nodes() != m.n) throw std::invalid_argument("mean_error: size mismatch");
  double s = 0.0;
  for (long long k = 0; k < (long long)m.pi.size(); ++k) {
    node_pair p = nth_pair(m.mode, m.n, k);
    double a = g_true.instances(p.i, p.j) > 0 ? 1.0 : 0.0;
    s += std::abs(a - m.pi[k]);
  }
  return s / double(m.pi.size());
}

// mann-whitney AUC with average ranks for ties
inline double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: size mismatch");
  std::vector<size_t> order(scores.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  long long n_pos = 0, n_neg = 0;
  size_t k = 0;
  while (k < order.size()) {
    size_t j = k;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[k]]) ++j;
    double avg_rank = 0.5 * double(k + 1 + j + 1);  // 1-based ranks k+1 .. j+1
    for (size_t t = k; t <= j; ++t)
      if (labels[order[t]]) rank_sum_pos += avg_rank;
    k = j + 1;
  }
  for (int l : labels) (l ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc: needs both classes");
  return (rank_sum_pos - 0.5 * double(n_pos) * double(n_pos + 1)) /
         (double(n_pos) * double(n_neg));
}

// AUC of presence marginals against the true adjacency
inline double auc(const Graph& g_true, const EdgeMarginals& m) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (long long k = 0; k < (long long)m.pi.size(); ++k) {
    node_pair p = nth_pair(m.mode, m.n, k);
    scores.push_back(m.pi[k]);
    labels.push_back(g_true.instances(p.i, p.j) > 0 ? 1 : 0);
  }
  return auc(scores, labels);
}

// jaccard similarity of the presence sets; two empty graphs count as identical
inline double jaccard(const Graph& a, const Graph& b) {
  if (a.n_nodes() != b.n_nodes()) throw std::invalid_argument("jaccard: size mismatch");
  long long inter = 0, uni = 0;
  int n = a.n_nodes();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      bool in_a = a.instances(i, j) > 0, in_b = b.instances(i, j) > 0;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  return uni == 0 ? 1.0 : double(inter) / double(uni);
}

// posterior-mean jaccard similarity against the true graph
inline double posterior_jaccard(const std::vector<PosteriorSample>& samples,
                                const Graph& g_true) {
  if (samples.empty()) throw std::invalid_argument("posterior_jaccard: no samples");
  double s = 0.0;
  for (const auto& smp : samples) s += jaccard(smp.g, g_true);
  return s / double(samples.size());
}

// fano lower bound on the error probability: P(err) >= 1 - (I + 1) / H
inline double fano_error_lower_bound(double mi, double prior_entropy) {
  if (prior_entropy <= 0.0) return 0.0;
  return std::max(0.0, 1.0 - (mi + 1.0) / prior_entropy);
}

// psi-hat through the posterior-loss route: 1 - mean loss / prior entropy
inline recon_index reconstructability_from_loss(double mean_loss, double prior_entropy) {
  return reconstruction_index(prior_entropy - mean_loss, prior_entropy);
}

// simple R^2 of observations against model predictions (no refitting)
inline double r_squared(const std::vector<double>& observed,
                        const std::vector<double>& predicted) {
  if (observed.size() != predicted.size() || observed.size() < 2)
    throw std::invalid_argument("r_squared: bad input");
  double mean = 0.0;
  for (double y : observed) mean += y;
  mean /= double(observed.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t k = 0; k < observed.size(); ++k) {
    ss_res += (observed[k] - predicted[k]) * (observed[k] - predicted[k]);
    ss_tot += (observed[k] - mean) * (observed[k] - mean);
  }
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace reconlab
