#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "spinchain/types.hpp"

namespace spinchain {

struct RevivalOptions {
  int window = 20;         // cycles per amplitude window, centred
  double threshold = 1.5;  // multiple of the running minimum amplitude
  long long n0 = 40;       // no detection before this cycle
  int sustain = 20;        // cycles the raw signal must stay elevated
  double floor = 1e-9;     // amplitudes below this count as flat
};

/// max - min of series over the centred window around each cycle; zero where
/// the window does not fit.
inline std::vector<double> windowed_amplitude(const std::vector<double>& c, int window) {
  const long long n = static_cast<long long>(c.size());
  const long long lo_off = window / 2, hi_off = window - 1 - window / 2;
  std::vector<double> a(c.size(), 0.0);
  for (long long i = lo_off; i + hi_off < n; ++i) {
    const auto first = c.begin() + (i - lo_off), last = c.begin() + (i + hi_off + 1);
    const auto [mn, mx] = std::minmax_element(first, last);
    a[static_cast<std::size_t>(i)] = *mx - *mn;
  }
  return a;
}

/// First cycle n > n0 that opens a run of windowed amplitudes above threshold
/// times the minimum amplitude seen since n0. A burst of L cycles lifts
/// L + window - 1 centred windows, so the run must reach sustain + window - 1;
/// shorter transients and beating in the pre-revival tail are rejected.
inline std::optional<long long> detect_revival(const std::vector<double>& c, const RevivalOptions& o = {}) {
  if (o.window < 2 || o.sustain < 1 || o.threshold <= 1.0) throw DomainError("detect_revival: bad options");
  const std::vector<double> a = windowed_amplitude(c, o.window);
  const long long last = static_cast<long long>(c.size()) - (o.window - 1 - o.window / 2);
  const int need = o.sustain + o.window - 1;
  double rmin = -1.0;
  int run = 0;
  for (long long n = std::max<long long>(o.n0, o.window / 2); n < last; ++n) {
    const double v = a[static_cast<std::size_t>(n)];
    if (rmin >= 0.0 && v > std::max(o.threshold * rmin, o.floor)) {
      if (++run >= need) return n - need + 1;
    } else {
      run = 0;
      if (rmin < 0.0 || v < rmin) rmin = v;
    }
  }
  return std::nullopt;
}

}  // namespace spinchain
