#pragma once

// heuristic reconstruction scores: equal-time correlation, granger causality
// (linear AR residual-variance ratio), and plug-in transfer entropy. each
// method fills an n-by-n score matrix where larger means "more likely an edge"
// once symmetrized.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "series.hpp"
#include "util.hpp"

namespace reconlab {

struct ScoreMatrix {
  int n = 0;
  std::vector<double> s;      // row-major, diagonal kept at 0
  bool degenerate = false;    // some pair had no variance / empty cells

  ScoreMatrix() = default;
  explicit ScoreMatrix(int n_) : n(n_), s((size_t)n_ * n_, 0.0) {}
  double at(int i, int j) const { return s[(size_t)i * n + j]; }
  double& at(int i, int j) { return s[(size_t)i * n + j]; }
};

// S_ij <- max(S_ij, S_ji): undirected score from a directed matrix
inline ScoreMatrix symmetrize(const ScoreMatrix& m) {
  ScoreMatrix out = m;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) out.at(i, j) = std::max(m.at(i, j), m.at(j, i));
  return out;
}

// pearson correlation of the equal-time node series
inline ScoreMatrix correlation_scores(const TimeSeries& x) {
  int n = x.n, T = x.T;
  ScoreMatrix out(n);
  std::vector<double> mean(n, 0.0), sd(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) mean[i] += x(i, t);
    mean[i] /= double(T);
    for (int t = 0; t < T; ++t) sd[i] += (x(i, t) - mean[i]) * (x(i, t) - mean[i]);
    sd[i] = std::sqrt(sd[i] / double(T - 1));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (sd[i] == 0.0 || sd[j] == 0.0) {
        out.degenerate = true;
        continue;
      }
      double c = 0.0;
      for (int t = 0; t < T; ++t) c += (x(i, t) - mean[i]) * (x(j, t) - mean[j]);
      c /= double(T - 1);
      out.at(i, j) = out.at(j, i) = c / (sd[i] * sd[j]);
    }
  return out;
}

// residual variance of least-squares y ~ cols; rank-deficient columns dropped
inline double ols_residual_variance(const std::vector<std::vector<double>>& cols,
                                    const std::vector<double>& y) {
  size_t m = y.size(), p = cols.size();
  // normal equations A w = b
  std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
  std::vector<double> b(p, 0.0);
  for (size_t r = 0; r < p; ++r) {
    for (size_t c = 0; c < p; ++c)
      for (size_t t = 0; t < m; ++t) a[r][c] += cols[r][t] * cols[c][t];
    for (size_t t = 0; t < m; ++t) b[r] += cols[r][t] * y[t];
  }
  // gaussian elimination with pivot tolerance; zero pivot -> drop coefficient
  std::vector<double> w(p, 0.0);
  std::vector<int> piv(p, -1);
  std::vector<bool> used_row(p, false);
  for (size_t c = 0; c < p; ++c) {
    size_t best = p;
    double best_abs = 1e-9;
    for (size_t r = 0; r < p; ++r)
      if (!used_row[r] && std::abs(a[r][c]) > best_abs) {
        best_abs = std::abs(a[r][c]);
        best = r;
      }
    if (best == p) continue;
    used_row[best] = true;
    piv[c] = int(best);
    double d = a[best][c];
    for (size_t r = 0; r < p; ++r) {
      if (r == best) continue;
      double f = a[r][c] / d;
      for (size_t cc = 0; cc < p; ++cc) a[r][cc] -= f * a[best][cc];
      b[r] -= f * b[best];
    }
  }
  for (size_t c = 0; c < p; ++c)
    if (piv[c] >= 0) w[c] = b[piv[c]] / a[piv[c]][c];
  double ssr = 0.0;
  for (size_t t = 0; t < m; ++t) {
    double pred = 0.0;
    for (size_t c = 0; c < p; ++c) pred += w[c] * cols[c][t];
    ssr += (y[t] - pred) * (y[t] - pred);
  }
  return ssr / double(m);
}

struct granger_result {
  ScoreMatrix score;    // variance ratio restricted / full: larger = stronger
  ScoreMatrix literal;  // full / restricted, the ratio as usually printed
};

// linear AR(1) residual-variance comparison: does adding x_j(t) improve the
// one-step prediction of x_i(t+1)?
inline granger_result granger_scores(const TimeSeries& x) {
  int n = x.n, T = x.T;
  if (T < 3) throw std::invalid_argument("granger_scores: need T >= 3");
  granger_result out;
  out.score = ScoreMatrix(n);
  out.literal = ScoreMatrix(n);
  const double tiny = 1e-300;
  size_t m = size_t(T - 1);
  std::vector<double> ones(m, 1.0);
  for (int i = 0; i < n; ++i) {
    std::vector<double> y(m), self(m);
    for (size_t t = 0; t < m; ++t) {
      y[t] = x(i, int(t) + 1);
      self[t] = x(i, int(t));
    }
    double restricted = ols_residual_variance({ones, self}, y);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      std::vector<double> other(m);
      for (size_t t = 0; t < m; ++t) other[t] = x(j, int(t));
      double full = ols_residual_variance({ones, self, other}, y);
      if (restricted <= tiny && full <= tiny) {
        out.score.degenerate = true;
        out.score.at(i, j) = 1.0;
        out.literal.at(i, j) = 1.0;
        continue;
      }
      out.score.at(i, j) = restricted / std::max(full, tiny);
      out.literal.at(i, j) = full / std::max(restricted, tiny);
    }
  }
  return out;
}

// plug-in transfer entropy from node j to node i over {0,1}^3 transition cells
inline ScoreMatrix transfer_entropy_scores(const TimeSeries& x) {
  int n = x.n, T = x.T;
  if (T < 2) throw std::invalid_argument("transfer_entropy_scores: need T >= 2");
  ScoreMatrix out(n);
  double m = double(T - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double cnt[2][2][2] = {};  // [x_i(t+1)][x_i(t)][x_j(t)]
      for (int t = 0; t + 1 < T; ++t) cnt[x(i, t + 1)][x(i, t)][x(j, t)] += 1.0;
      double te = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c) {
            double n_abc = cnt[a][b][c];
            if (n_abc == 0.0) continue;
            double n_bc = cnt[0][b][c] + cnt[1][b][c];
            double n_ab = cnt[a][b][0] + cnt[a][b][1];
            double n_b = cnt[0][b][0] + cnt[0][b][1] + cnt[1][b][0] + cnt[1][b][1];
            te += (n_abc / m) * std::log2((n_abc / n_bc) / (n_ab / n_b));
          }
      out.at(i, j) = te;
    }
  return out;
}

enum class heuristic_kind { correlation, granger, transfer_entropy };

// undirected score matrix for the requested method (directed methods are
// symmetrized with max)
inline ScoreMatrix heuristic_scores(const TimeSeries& x, heuristic_kind kind) {
  switch (kind) {
    case heuristic_kind::correlation: return correlation_scores(x);
    case heuristic_kind::granger: return symmetrize(granger_scores(x).score);
    case heuristic_kind::transfer_entropy: return symmetrize(transfer_entropy_scores(x));
  }
  throw std::logic_error("heuristic_scores: unknown kind");
}

}  // namespace reconlab
