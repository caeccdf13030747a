#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace spinchain {

/// Golden-section minimum of a unimodal f on [lo, hi]. Returns (x, f(x)).
template <class F>
std::pair<double, double> golden_section(F&& f, double lo, double hi, double xtol = 1e-10, int max_iter = 200) {
  constexpr double g = 0.61803398874989484820;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

struct SimplexResult {
  std::array<double, 2> x{};
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Two-dimensional Nelder-Mead; stops when the spread of vertex values drops
/// below ftol.
template <class F>
SimplexResult nelder_mead_2d(F&& f, std::array<double, 2> x0, double step, double ftol = 1e-12, int max_iter = 2000) {
  using P = std::array<double, 2>;
  std::array<P, 3> v{x0, P{x0[0] + step, x0[1]}, P{x0[0], x0[1] + step}};
  std::array<double, 3> fv{f(v[0]), f(v[1]), f(v[2])};
  auto lerp = [](const P& a, const P& b, double t) { return P{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])}; };
  SimplexResult res;
  int it = 0;
  for (; it < max_iter; ++it) {
    std::array<int, 3> o{0, 1, 2};
    std::sort(o.begin(), o.end(), [&](int i, int j) { return fv[i] < fv[j]; });
    const int best = o[0], mid = o[1], worst = o[2];
    if (std::abs(fv[worst] - fv[best]) < ftol) {
      res.converged = true;
      break;
    }
    const P c{0.5 * (v[best][0] + v[mid][0]), 0.5 * (v[best][1] + v[mid][1])};
    const P xr = lerp(c, v[worst], -1.0);
    const double fr = f(xr);
    if (fr < fv[best]) {
      const P xe = lerp(c, v[worst], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        v[worst] = xe;
        fv[worst] = fe;
      } else {
        v[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[mid]) {
      v[worst] = xr;
      fv[worst] = fr;
    } else {
      const bool outside = fr < fv[worst];
      const P xc = outside ? lerp(c, xr, 0.5) : lerp(c, v[worst], 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : fv[worst])) {
        v[worst] = xc;
        fv[worst] = fc;
      } else {
        for (int i : {mid, worst}) {
          v[i] = lerp(v[best], v[i], 0.5);
          fv[i] = f(v[i]);
        }
      }
    }
  }
  const int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = v[best];
  res.f = fv[best];
  res.iterations = it;
  return res;
}

}  // namespace spinchain
