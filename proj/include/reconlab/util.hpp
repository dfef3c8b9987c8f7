#pragma once

// shared numeric helpers. every log-probability in this codebase is base-2
// (bits), including likelihoods and MH acceptance thresholds.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace reconlab {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

inline bool impossible(double logp) { return std::isinf(logp) && logp < 0; }

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline constexpr double ln2 = 0.6931471805599453;

inline double log2_gamma(double x) { return std::lgamma(x) / ln2; }

inline double log2_factorial(long long n) { return log2_gamma(double(n) + 1.0); }

inline double log2_binomial(long long n, long long k) {
  if (k < 0 || k > n || n < 0) return neg_inf;
  if (k == 0 || k == n) return 0.0;
  return log2_factorial(n) - log2_factorial(k) - log2_factorial(n - k);
}

// multiset coefficient ((n; k)) = C(n+k-1, k)
inline double log2_multiset(long long n, long long k) {
  if (k < 0) return neg_inf;
  if (k == 0) return 0.0;
  if (n <= 0) return neg_inf;
  return log2_binomial(n + k - 1, k);
}

// (2E-1)!! = (2E)! / (2^E E!)
inline double log2_odd_double_factorial(long long e) {
  if (e <= 0) return 0.0;
  return log2_factorial(2 * e) - double(e) - log2_factorial(e);
}

// a!! for even a >= 0: (2h)!! = 2^h h!
inline double log2_even_double_factorial(long long a) {
  if (a <= 0) return 0.0;
  long long h = a / 2;
  return double(h) + log2_factorial(h);
}

inline double log_sum_exp2(double a, double b) {
  if (impossible(a)) return b;
  if (impossible(b)) return a;
  double m = std::max(a, b);
  return m + std::log2(std::exp2(a - m) + std::exp2(b - m));
}

inline double log_sum_exp2(const std::vector<double>& v) {
  double m = neg_inf;
  for (double x : v) m = std::max(m, x);
  if (impossible(m)) return neg_inf;
  double s = 0.0;
  for (double x : v)
    if (!impossible(x)) s += std::exp2(x - m);
  return m + std::log2(s);
}

// p*log2(p) with the 0 log 0 = 0 convention
inline double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

inline double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p outside [0,1]");
  return -xlog2x(p) - xlog2x(1.0 - p);
}

// discrete entropy of a normalized distribution, in bits
inline double discrete_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) h -= xlog2x(v);
  return h;
}

struct mc_estimate {
  double value = 0.0;
  double se = 0.0;
  long long n = 0;
};

inline mc_estimate mean_and_se(const std::vector<double>& v) {
  mc_estimate e;
  e.n = (long long)v.size();
  if (v.empty()) return e;
  double s = 0.0;
  for (double x : v) s += x;
  e.value = s / double(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - e.value) * (x - e.value);
    e.se = std::sqrt(ss / double(v.size() - 1) / double(v.size()));
  }
  return e;
}

// ---- rng streams -----------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// all randomness flows from one master seed; independent tasks get their own
// stream id so results do not depend on scheduling order
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) + stream);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream = 0) {
  return std::mt19937_64(derive_seed(master, stream));
}

// run fn(k) for k in [0, n_tasks); deterministic regardless of thread count
template <typename Fn>
void parallel_for(long long n_tasks, int n_threads, Fn&& fn) {
  if (n_threads <= 1 || n_tasks <= 1) {
    for (long long k = 0; k < n_tasks; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<long long> next{0};
  auto worker = [&] {
    for (;;) {
      long long k = next.fetch_add(1);
      if (k >= n_tasks) return;
      fn(k);
    }
  };
  int use = std::min<long long>(n_threads, n_tasks);
  pool.reserve(use);
  for (int i = 0; i < use; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

// percentile bootstrap interval for the mean (90% by default)
struct bootstrap_ci {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

inline bootstrap_ci percentile_bootstrap(const std::vector<double>& v, std::mt19937_64& rng,
                                         int reps = 1000, double level = 0.90) {
  bootstrap_ci ci;
  if (v.empty()) return ci;
  double s = 0.0;
  for (double x : v) s += x;
  ci.mean = s / double(v.size());
  if (v.size() == 1) {
    ci.lo = ci.hi = ci.mean;
    return ci;
  }
  std::uniform_int_distribution<size_t> pick(0, v.size() - 1);
  std::vector<double> means(reps);
  for (int r = 0; r < reps; ++r) {
    double acc = 0.0;
    for (size_t k = 0; k < v.size(); ++k) acc += v[pick(rng)];
    means[r] = acc / double(v.size());
  }
  std::sort(means.begin(), means.end());
  double a = (1.0 - level) / 2.0;
  auto at = [&](double q) {
    double idx = q * (reps - 1);
    size_t lo = (size_t)idx;
    size_t hi = std::min<size_t>(lo + 1, reps - 1);
    double w = idx - double(lo);
    return means[lo] * (1.0 - w) + means[hi] * w;
  };
  ci.lo = at(a);
  ci.hi = at(1.0 - a);
  return ci;
}

}  // namespace reconlab
