#pragma once

// binary time series container + text IO ("N T" header, then T lines of N bits)

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace reconlab {

enum class initial_state { bernoulli_half, all_inactive, all_active };

inline std::string to_string(initial_state s) {
  switch (s) {
    case initial_state::bernoulli_half: return "bernoulli_half";
    case initial_state::all_inactive: return "all_inactive";
    case initial_state::all_active: return "all_active";
  }
  return "bernoulli_half";
}

inline initial_state initial_state_from_string(const std::string& s) {
  if (s == "bernoulli_half") return initial_state::bernoulli_half;
  if (s == "all_inactive") return initial_state::all_inactive;
  if (s == "all_active") return initial_state::all_active;
  throw std::invalid_argument("unknown initial state spec: " + s);
}

struct TimeSeries {
  int n = 0;
  int T = 0;
  std::vector<std::uint8_t> data;  // node-major: data[i*T + t]
  initial_state init = initial_state::bernoulli_half;

  TimeSeries() = default;
  TimeSeries(int n_, int T_, initial_state init_ = initial_state::bernoulli_half)
      : n(n_), T(T_), data((size_t)n_ * T_, 0), init(init_) {
    if (n_ <= 0 || T_ <= 0) throw std::invalid_argument("TimeSeries: need n,T >= 1");
  }

  std::uint8_t operator()(int i, int t) const { return data[(size_t)i * T + t]; }
  void set(int i, int t, std::uint8_t v) {
    if (v > 1) throw std::invalid_argument("TimeSeries: entries are bits");
    data[(size_t)i * T + t] = v;
  }
};

inline void write_series(std::ostream& os, const TimeSeries& x) {
  os << x.n << ' ' << x.T << '\n';
  for (int t = 0; t < x.T; ++t) {
    for (int i = 0; i < x.n; ++i) {
      if (i) os << ' ';
      os << int(x(i, t));
    }
    os << '\n';
  }
}

inline std::string to_series_text(const TimeSeries& x) {
  std::ostringstream os;
  write_series(os, x);
  return os.str();
}

inline TimeSeries read_series(std::istream& is) {
  int n, T;
  if (!(is >> n >> T)) throw std::runtime_error("series: bad header");
  TimeSeries x(n, T);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i) {
      int v;
      if (!(is >> v)) throw std::runtime_error("series: truncated data");
      if (v != 0 && v != 1) throw std::runtime_error("series: non-binary entry");
      x.set(i, t, (std::uint8_t)v);
    }
  return x;
}

inline TimeSeries series_from_text(const std::string& text) {
  std::istringstream is(text);
  return read_series(is);
}

}  // namespace reconlab
