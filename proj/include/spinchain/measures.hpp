#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "spinchain/evolution.hpp"
#include "spinchain/optimize.hpp"
#include "spinchain/types.hpp"

namespace spinchain {

inline void check_density_matrix(const Mat4& rho, const char* who) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw DomainError(std::string(who) + ": not Hermitian");
  if (std::abs(rho.trace() - 1.0) > 1e-10) throw DomainError(std::string(who) + ": trace != 1");
  Eigen::SelfAdjointEigenSolver<Mat4> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPositivityFloor) throw DomainError(std::string(who) + ": not positive");
}

/// -sum p log2 p over the spectrum, zero eigenvalues skipped.
inline double entropy_of(const Eigen::VectorXd& ev) {
  double s = 0.0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > 1e-15) s -= ev(i) * std::log2(ev(i));
  return s;
}

inline double von_neumann_entropy(const MatX& rho) {
  Eigen::SelfAdjointEigenSolver<MatX> es(rho, Eigen::EigenvaluesOnly);
  return entropy_of(es.eigenvalues());
}

/// Closed-form entropy of a 2x2 Hermitian matrix with trace t (unnormalized
/// allowed; returns the entropy of rho / t).
inline double entropy2(const Mat2& r) {
  const double t = r.trace().real();
  if (t <= 0.0) return 0.0;
  const double a = r(0, 0).real() / t, d = r(1, 1).real() / t;
  const double off = std::abs(r(0, 1)) / t;
  const double disc = std::sqrt(std::max(0.0, 0.25 * (a - d) * (a - d) + off * off));
  Eigen::VectorXd ev(2);
  ev << 0.5 * (a + d) + disc, 0.5 * (a + d) - disc;
  return entropy_of(ev);
}

inline Mat2 partial_trace_B(const Mat4& r) {
  Mat2 a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = r(2 * i, 2 * j) + r(2 * i + 1, 2 * j + 1);
  return a;
}

inline Mat2 partial_trace_A(const Mat4& r) {
  Mat2 b;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) b(k, l) = r(k, l) + r(2 + k, 2 + l);
  return b;
}

/// Wootters concurrence. With rho = A A^dagger, the lambda_i are the singular
/// values of A^T (Y x Y) A, which avoids a second square root. Eigenvalues of
/// rho below 1e-13 of the largest are treated as exact zeros; keeping them
/// would add spurious lambdas of order sqrt(1e-16).
inline double concurrence(const Mat4& rho) {
  check_density_matrix(rho, "concurrence");
  const Mat4 yy = kron(pauli::y(), pauli::y());
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (rho + rho.adjoint()));
  Eigen::Vector4d ev = es.eigenvalues();
  const double cut = 1e-13 * ev.maxCoeff();
  for (int i = 0; i < 4; ++i) ev(i) = ev(i) > cut ? std::sqrt(ev(i)) : 0.0;
  const Mat4 A = es.eigenvectors() * ev.cast<cplx>().asDiagonal();
  const Mat4 m = A.transpose() * yy * A;
  const Eigen::Vector4d l = Eigen::JacobiSVD<Mat4>(m).singularValues();  // descending
  return std::clamp(l(0) - l(1) - l(2) - l(3), 0.0, 1.0);
}

/// Sum_i p_i S(rho_A|i) for the projective measurement on B along
/// (sin t cos f, sin t sin f, cos t).
inline double conditional_entropy(const Mat4& rho, double t, double f) {
  const Vec3 n{std::sin(t) * std::cos(f), std::sin(t) * std::sin(f), std::cos(t)};
  double s = 0.0;
  for (int sign : {1, -1}) {
    const Mat2 P = 0.5 * (Mat2::Identity() + static_cast<double>(sign) * pauli::dot(n));
    Mat2 ra = Mat2::Zero();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) ra(i, j) += rho(2 * i + k, 2 * j + l) * P(l, k);
    const double p = ra.trace().real();
    if (p > 1e-15) s += p * entropy2(ra);
  }
  return s;
}

struct DiscordResult {
  double value = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Discord with rank-1 projective measurements on B: 64x64 Bloch-angle seed,
/// then simplex refinement.
inline DiscordResult quantum_discord_full(const Mat4& rho, int grid = 64) {
  check_density_matrix(rho, "quantum_discord");
  const double sb = entropy2(partial_trace_A(rho));
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  const double sab = entropy_of(es.eigenvalues().cwiseMax(0.0));
  double best = 1e300, bt = 0.0, bf = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double t = kPi * i / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double f = 2.0 * kPi * j / grid;
      const double v = conditional_entropy(rho, t, f);
      if (v < best) {
        best = v;
        bt = t;
        bf = f;
      }
    }
  }
  const SimplexResult sr = nelder_mead_2d(
      [&](const std::array<double, 2>& x) { return conditional_entropy(rho, x[0], x[1]); }, {bt, bf}, kPi / grid,
      1e-12);
  if (sr.f < best) {
    best = sr.f;
    bt = sr.x[0];
    bf = sr.x[1];
  }
  return {sb - sab + best, bt, bf};
}

inline double quantum_discord(const Mat4& rho) { return quantum_discord_full(rho).value; }

/// Sum of singular values of a - b; halved when `half` is set.
inline double trace_distance(const MatX& a, const MatX& b, bool half = false) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("trace_distance: dimension mismatch");
  Eigen::JacobiSVD<MatX> svd(a - b);
  const double s = svd.singularValues().sum();
  return half ? 0.5 * s : s;
}

inline double purity(const MatX& rho) { return (rho * rho).trace().real(); }

struct PowerLawFit {
  double A = 0.0;
  double B = 0.0;
  double n_min = 0.0;
  double n_max = 0.0;
  double residual = 0.0;
  int points = 0;
};

struct FitOptions {
  int block = 10;             // cycles per block average
  double tail_fraction = 0.25;  // window [tail_fraction * n_max, n_max]
};

/// d = A n^-B by least squares in log-log over the tail window after block
/// averaging. The block abscissa is (mean n^-B)^(-1/B), iterated with B, so
/// exact power laws are recovered without averaging bias.
inline PowerLawFit fit_power_law(const std::vector<double>& n, const std::vector<double>& d, const FitOptions& o = {}) {
  if (n.size() != d.size()) throw DomainError("fit_power_law: size mismatch");
  if (n.size() < 20) throw DomainError("fit_power_law: need >= 20 points");
  const double nmax = *std::max_element(n.begin(), n.end());
  const double nlo = o.tail_fraction * nmax;
  struct Blk {
    std::vector<double> ns;
    double dm = 0.0;
  };
  std::vector<Blk> blocks;
  const int bs = std::max(1, o.block);
  for (std::size_t i = 0; i < n.size(); i += static_cast<std::size_t>(bs)) {
    Blk b;
    double acc = 0.0;
    for (std::size_t j = i; j < std::min(n.size(), i + static_cast<std::size_t>(bs)); ++j) {
      b.ns.push_back(n[j]);
      acc += d[j];
    }
    b.dm = acc / static_cast<double>(b.ns.size());
    if (b.ns.front() >= nlo && b.ns.back() <= nmax && b.dm > 0.0 && b.ns.front() > 0.0) blocks.push_back(std::move(b));
  }
  if (blocks.size() < 2) throw ConvergenceError("converged below floor: fewer than two positive tail blocks");
  auto abscissa = [](const std::vector<double>& ns, double B) {
    if (std::abs(B) < 1e-8) {
      double l = 0.0;
      for (double v : ns) l += std::log(v);
      return std::exp(l / static_cast<double>(ns.size()));
    }
    double m = 0.0;
    for (double v : ns) m += std::pow(v, -B);
    return std::pow(m / static_cast<double>(ns.size()), -1.0 / B);
  };
  PowerLawFit fit;
  double B = 0.0, lnA = 0.0;
  for (int it = 0; it < 100; ++it) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(blocks.size());
    for (const auto& b : blocks) {
      const double x = std::log(abscissa(b.ns, B)), y = std::log(b.dm);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    const double nb = -slope;
    lnA = (sy - slope * sx) / k;
    const bool done = std::abs(nb - B) < 1e-13;
    B = nb;
    if (done) break;
  }
  double rss = 0.0;
  for (const auto& b : blocks) {
    const double r = std::log(b.dm) - (lnA - B * std::log(abscissa(b.ns, B)));
    rss += r * r;
  }
  fit.A = std::exp(lnA);
  fit.B = B;
  fit.n_min = blocks.front().ns.front();
  fit.n_max = blocks.back().ns.back();
  fit.residual = std::sqrt(rss / static_cast<double>(blocks.size()));
  fit.points = static_cast<int>(blocks.size());
  return fit;
}

}  // namespace spinchain
