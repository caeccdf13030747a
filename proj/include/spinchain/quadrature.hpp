#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "spinchain/types.hpp"

namespace spinchain {

struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on P_n.
/// Nodes ascending.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  QuadratureRule r;
  r.x.assign(n, 0.0);
  r.w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    if (n == 1) pp = 1.0;  // P_1' = 1 at z = 0
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    r.w[n - 1 - i] = r.w[i];
  }
  return r;
}

/// Composite rule over [lo, hi]: `panels` equal panels of `order` points.
inline QuadratureRule composite_gauss_legendre(double lo, double hi, std::size_t panels, int order = 16) {
  if (panels == 0) throw DomainError("composite_gauss_legendre: zero panels");
  const QuadratureRule base = gauss_legendre(order);
  QuadratureRule r;
  r.x.reserve(panels * order);
  r.w.reserve(panels * order);
  const double h = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = lo + h * static_cast<double>(p);
    for (int i = 0; i < order; ++i) {
      r.x.push_back(a + 0.5 * h * (base.x[i] + 1.0));
      r.w.push_back(0.5 * h * base.w[i]);
    }
  }
  return r;
}

}  // namespace spinchain
