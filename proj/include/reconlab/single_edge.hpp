#pragma once

// closed-form single-edge reconstruction problem: one potential edge with
// prior p, observed through T bernoulli trials that succeed with probability q
// when the edge exists and r otherwise. everything is exact and log-space.

#include <cmath>
#include <stdexcept>

#include "util.hpp"

namespace reconlab {

struct single_edge_model {
  double p = 0.5;  // prior edge probability
  double q = 0.5;  // true-positive rate (success prob with the edge)
  double r = 0.5;  // false-positive rate (success prob without it)
  int T = 1;       // number of observations

  void validate() const {
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0) || !(r >= 0.0 && r <= 1.0) || T < 1)
      throw std::invalid_argument("single_edge_model: parameters out of range");
  }
};

// n log2(v) with the 0 * log 0 = 0 convention
inline double n_log2(double n, double v) { return n == 0.0 ? 0.0 : n * std::log2(v); }

// log2 P(n successes)
inline double single_edge_log_count_prob(const single_edge_model& m, int n) {
  if (n < 0 || n > m.T) return neg_inf;
  double with_edge = (m.p > 0.0)
                         ? std::log2(m.p) + n_log2(n, m.q) + n_log2(m.T - n, 1.0 - m.q)
                         : neg_inf;
  double without = (m.p < 1.0)
                       ? std::log2(1.0 - m.p) + n_log2(n, m.r) + n_log2(m.T - n, 1.0 - m.r)
                       : neg_inf;
  return log2_binomial(m.T, n) + log_sum_exp2(with_edge, without);
}

// P(edge | n successes), computed through the posterior log-odds
inline double single_edge_posterior(const single_edge_model& m, int n) {
  if (m.p == 0.0) return 0.0;
  if (m.p == 1.0) return 1.0;
  // logit = logit(p) + n log(q/r) + (T-n) log((1-q)/(1-r))
  double logit = std::log2(m.p) - std::log2(1.0 - m.p);
  double a = double(n), b = double(m.T - n);
  if (a > 0.0) {
    if (m.q == 0.0) return 0.0;  // a success is impossible with the edge
    if (m.r == 0.0) return 1.0;
    logit += a * (std::log2(m.q) - std::log2(m.r));
  }
  if (b > 0.0) {
    if (m.q == 1.0) return 0.0;  // a failure is impossible with the edge
    if (m.r == 1.0) return 1.0;
    logit += b * (std::log2(1.0 - m.q) - std::log2(1.0 - m.r));
  }
  return 1.0 / (1.0 + std::exp2(-logit));
}

// H(edge | observations) = sum_n P(n) h(posterior(n)), in bits
inline double single_edge_conditional_entropy(const single_edge_model& m) {
  m.validate();
  double h = 0.0;
  for (int n = 0; n <= m.T; ++n) {
    double lp = single_edge_log_count_prob(m, n);
    if (impossible(lp)) continue;
    h += std::exp2(lp) * binary_entropy(single_edge_posterior(m, n));
  }
  return h;
}

inline double single_edge_mutual_information(const single_edge_model& m) {
  return binary_entropy(m.p) - single_edge_conditional_entropy(m);
}

// reconstructability Psi = I / H(prior); a degenerate prior gives Psi = 1
inline double single_edge_psi(const single_edge_model& m) {
  double hp = binary_entropy(m.p);
  if (hp == 0.0) return 1.0;
  double psi = single_edge_mutual_information(m) / hp;
  return std::min(1.0, std::max(0.0, psi));
}

}  // namespace reconlab
