#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "spinchain/evolution.hpp"
#include "spinchain/model.hpp"
#include "spinchain/types.hpp"

namespace spinchain {

/// Spin-space oracle for rings of N <= 12 sites. Bit j of a basis index is 1
/// when site j points up (sigma_z = +1).
namespace ed {

inline constexpr int kMaxSites = 12;

inline void check_size(int N, int min_sites = 2) {
  if (N > kMaxSites) throw ResourceError("ed oracle: N = " + std::to_string(N) + " exceeds the 12-site guard");
  if (N < min_sites || N % 2 != 0) throw DomainError("ed oracle: N must be even and >= " + std::to_string(min_sites));
}

/// sigma^p |bit>, p in {0: I, 1: x, 2: y, 3: z}. Returns the amplitude and
/// writes the new bit.
inline cplx pauli_on_bit(int p, int bit, int& out) {
  switch (p) {
    case 1: out = 1 - bit; return 1.0;
    case 2: out = 1 - bit; return bit ? cplx(0, 1) : cplx(0, -1);
    case 3: out = bit; return bit ? 1.0 : -1.0;
    default: out = bit; return 1.0;
  }
}

/// sigma^p_i sigma^q_j acting on basis state s.
inline cplx apply_pair(int p, int i, int q, int j, std::uint32_t s, std::uint32_t& out) {
  int bi = (s >> i) & 1u, bj = (s >> j) & 1u, ni = 0, nj = 0;
  const cplx c = pauli_on_bit(p, bi, ni) * pauli_on_bit(q, bj, nj);
  out = s;
  out = (out & ~(1u << i)) | (static_cast<std::uint32_t>(ni) << i);
  out = (out & ~(1u << j)) | (static_cast<std::uint32_t>(nj) << j);
  return c;
}

/// Bond couplings: (J/4)[(1+g) XX + (1-g) YY] on every ring bond.
struct BondTerm {
  int p, q;
  double c;
};
inline std::vector<BondTerm> xy_bond(double J, double gamma) {
  return {{1, 1, 0.25 * J * (1.0 + gamma)}, {2, 2, 0.25 * J * (1.0 - gamma)}};
}

/// Dense real Hamiltonian sum (J/4)[(1+g)XX + (1-g)YY] - (h/2) sum Z.
inline Eigen::MatrixXd build_dense(int N, double h, double gamma = 1.0, double J = 1.0) {
  check_size(N, 2);
  const std::uint32_t dim = 1u << N;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint32_t s = 0; s < dim; ++s) {
    for (int j = 0; j < N; ++j) {
      const int k = (j + 1) % N;
      for (const auto& t : xy_bond(J, gamma)) {
        std::uint32_t o = 0;
        const cplx c = apply_pair(t.p, j, t.q, k, s, o);
        H(o, s) += t.c * c.real();
      }
      H(s, s) -= 0.5 * h * (((s >> j) & 1u) ? 1.0 : -1.0);
    }
  }
  return H;
}

/// One-site cyclic shift: site j -> j + 1.
inline std::uint32_t shift(std::uint32_t s, int N) {
  const std::uint32_t top = (s >> (N - 1)) & 1u;
  return ((s << 1) | top) & ((1u << N) - 1u);
}

inline Eigen::MatrixXd shift_matrix(int N) {
  const std::uint32_t dim = 1u << N;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint32_t s = 0; s < dim; ++s) T(shift(s, N), s) = 1.0;
  return T;
}

/// Translation-orbit bookkeeping: every state s equals T^shift rep.
struct Orbits {
  int N = 0;
  std::vector<std::uint32_t> rep;
  std::vector<int> shift_of;
  std::vector<int> period;  // indexed by state, period of its orbit
  std::vector<std::uint32_t> reps;
};

inline Orbits build_orbits(int N) {
  const std::uint32_t dim = 1u << N;
  Orbits o;
  o.N = N;
  o.rep.assign(dim, 0);
  o.shift_of.assign(dim, 0);
  o.period.assign(dim, 0);
  std::vector<bool> seen(dim, false);
  for (std::uint32_t s = 0; s < dim; ++s) {
    if (seen[s]) continue;
    // s is the smallest member of its orbit
    std::uint32_t t = s;
    int l = 0;
    std::vector<std::uint32_t> members;
    do {
      members.push_back(t);
      t = shift(t, N);
      ++l;
    } while (t != s);
    for (int m = 0; m < l; ++m) {
      seen[members[m]] = true;
      o.rep[members[m]] = s;
      o.shift_of[members[m]] = m;
      o.period[members[m]] = l;
    }
    o.reps.push_back(s);
  }
  return o;
}

/// Momentum sector K = 2 pi m / N: representatives whose period R has
/// m R / N integral.
struct Sector {
  int m = 0;
  double K = 0.0;
  std::vector<std::uint32_t> reps;
  std::vector<int> index;  // state index -> position in reps, -1 if absent
};

inline std::vector<Sector> build_sectors(const Orbits& o) {
  const int N = o.N;
  std::vector<Sector> out;
  for (int m = 0; m < N; ++m) {
    Sector sec;
    sec.m = m;
    sec.K = 2.0 * kPi * m / N;
    sec.index.assign(o.rep.size(), -1);
    for (std::uint32_t r : o.reps) {
      if ((m * o.period[r]) % N != 0) continue;
      sec.index[r] = static_cast<int>(sec.reps.size());
      sec.reps.push_back(r);
    }
    out.push_back(std::move(sec));
  }
  return out;
}

/// Block of sum_j T^j (sigma^p_0 sigma^q_1 * c) T^-j in sector sec; p or q may
/// be 0 for one-site terms (then pass the one-site operator at bond position).
inline MatX sector_operator(const Orbits& o, const Sector& sec, const std::vector<BondTerm>& terms) {
  const int N = o.N;
  const int d = static_cast<int>(sec.reps.size());
  MatX A = MatX::Zero(d, d);
  for (int col = 0; col < d; ++col) {
    const std::uint32_t r = sec.reps[col];
    for (int j = 0; j < N; ++j) {
      for (const auto& t : terms) {
        std::uint32_t s = 0;
        const cplx c = apply_pair(t.p, j, t.q, (j + 1) % N, r, s);
        const int row = sec.index[o.rep[s]];
        if (row < 0) continue;
        const double ratio = std::sqrt(static_cast<double>(o.period[r]) / o.period[s]);
        A(row, col) += t.c * c * std::exp(kI * (sec.K * o.shift_of[s])) * ratio;
      }
    }
  }
  return A;
}

/// Pauli expectations <sigma^p_0 sigma^q_1>, p, q in 0..3.
using PauliTable = std::array<std::array<double, 4>, 4>;

struct EdCorrelators {
  double mz = 0.0, txx = 0.0, tyy = 0.0, tzz = 0.0, txy = 0.0, tyx = 0.0;
  Mat4 rho2 = Mat4::Identity() / 4.0;
  PauliTable table{};
};

inline EdCorrelators from_table(const PauliTable& t) {
  EdCorrelators e;
  e.table = t;
  e.mz = t[3][0];
  e.txx = t[1][1];
  e.tyy = t[2][2];
  e.tzz = t[3][3];
  e.txy = t[1][2];
  e.tyx = t[2][1];
  Mat4 r = Mat4::Zero();
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) r += t[p][q] * kron(pauli::by_index(p), pauli::by_index(q));
  e.rho2 = r / 4.0;
  return e;
}

/// Exact stroboscopic evolution from the Gibbs state of field a, resolved by
/// lattice momentum. Evaluates all requested cycles in ascending order.
class MomentumOracle {
 public:
  MomentumOracle(int N, const ModelParams& p) : N_(N), p_(p) {
    check_size(N, 4);
    p.validate();
    orb_ = build_orbits(N);
    sectors_ = build_sectors(orb_);
    const auto bond = xy_bond(p.J, p.gamma);
    const std::vector<BondTerm> zterm{{3, 0, 1.0}};
    double emin = 1e300;
    blocks_.resize(sectors_.size());
    for (std::size_t k = 0; k < sectors_.size(); ++k) {
      Block& b = blocks_[k];
      const MatX hxy = sector_operator(orb_, sectors_[k], bond);
      const MatX z = sector_operator(orb_, sectors_[k], zterm);
      const MatX ha = hxy - 0.5 * p.a * z, hb = hxy - 0.5 * p.b * z;
      Eigen::SelfAdjointEigenSolver<MatX> ea(ha), eb(hb);
      b.Ea = ea.eigenvalues();
      b.Va = ea.eigenvectors();
      if (b.Ea.size() > 0) emin = std::min(emin, b.Ea.minCoeff());
      const Eigen::VectorXcd pa = (-kI * 0.5 * p.tau * b.Ea.cast<cplx>()).array().exp();
      const Eigen::VectorXcd pb = (-kI * 0.5 * p.tau * eb.eigenvalues().cast<cplx>()).array().exp();
      b.U = eb.eigenvectors() * pb.asDiagonal() * eb.eigenvectors().adjoint() * b.Va * pa.asDiagonal() *
            b.Va.adjoint();
      for (int pp = 0; pp < 4; ++pp)
        for (int qq = 0; qq < 4; ++qq) {
          if (pp == 0 && qq == 0) continue;
          b.ops[pp][qq] = sector_operator(orb_, sectors_[k], {{pp, qq, 1.0 / N}});
        }
    }
    double z = 0.0;
    for (auto& b : blocks_) {
      const Eigen::VectorXd w = (-p.beta * (b.Ea.array() - emin)).exp();
      z += w.sum();
      b.rho = b.Va * w.cast<cplx>().asDiagonal() * b.Va.adjoint();
    }
    for (auto& b : blocks_) b.rho /= z;
  }

  /// Correlators at ascending cycles ns.
  std::vector<EdCorrelators> series(const std::vector<long long>& ns) const {
    std::vector<EdCorrelators> out;
    std::vector<MatX> rho;
    for (const auto& b : blocks_) rho.push_back(b.rho);
    long long cur = 0;
    for (long long n : ns) {
      if (n < cur) throw DomainError("MomentumOracle::series: cycles must ascend");
      for (std::size_t k = 0; k < blocks_.size(); ++k) {
        if (blocks_[k].U.size() == 0 || n == cur) continue;
        const MatX un = power(blocks_[k].U, n - cur);
        rho[k] = un * rho[k] * un.adjoint();
      }
      cur = n;
      out.push_back(measure(rho));
    }
    return out;
  }

  EdCorrelators at(long long n) const { return series({n}).front(); }

  int N() const { return N_; }

 private:
  struct Block {
    Eigen::VectorXd Ea;
    MatX Va, U, rho;
    std::array<std::array<MatX, 4>, 4> ops;
  };

  static MatX power(const MatX& U, long long n) {
    MatX r = MatX::Identity(U.rows(), U.cols()), b = U;
    while (n > 0) {
      if (n & 1) r = r * b;
      n >>= 1;
      if (n) b = b * b;
    }
    return r;
  }

  EdCorrelators measure(const std::vector<MatX>& rho) const {
    PauliTable t{};
    t[0][0] = 1.0;
    for (int pp = 0; pp < 4; ++pp)
      for (int qq = 0; qq < 4; ++qq) {
        if (pp == 0 && qq == 0) continue;
        cplx acc = 0.0;
        for (std::size_t k = 0; k < blocks_.size(); ++k)
          if (rho[k].size() > 0) acc += (rho[k].transpose().cwiseProduct(blocks_[k].ops[pp][qq])).sum();
        t[pp][qq] = acc.real();
      }
    return from_table(t);
  }

  int N_;
  ModelParams p_;
  Orbits orb_;
  std::vector<Sector> sectors_;
  std::vector<Block> blocks_;
};

/// Full 2^N construction with an explicit partial trace; N <= 8 in practice.
inline EdCorrelators dense_two_site(int N, const ModelParams& p, long long n) {
  check_size(N, 4);
  const Eigen::MatrixXd Ha = build_dense(N, p.a, p.gamma, p.J), Hb = build_dense(N, p.b, p.gamma, p.J);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(Ha), eb(Hb);
  const Eigen::VectorXd w = (-p.beta * (ea.eigenvalues().array() - ea.eigenvalues().minCoeff())).exp();
  MatX rho = ea.eigenvectors().cast<cplx>() * (w / w.sum()).cast<cplx>().asDiagonal() *
             ea.eigenvectors().transpose().cast<cplx>();
  const Eigen::VectorXcd pa = (-kI * 0.5 * p.tau * ea.eigenvalues().cast<cplx>()).array().exp();
  const Eigen::VectorXcd pb = (-kI * 0.5 * p.tau * eb.eigenvalues().cast<cplx>()).array().exp();
  const MatX Va = ea.eigenvectors().cast<cplx>(), Vb = eb.eigenvectors().cast<cplx>();
  const MatX U = Vb * pb.asDiagonal() * Vb.adjoint() * Va * pa.asDiagonal() * Va.adjoint();
  for (long long i = 0; i < n; ++i) rho = U * rho * U.adjoint();
  // rho2 index 2a + b with a, b = 0 for up (bit 1) on sites 0, 1
  auto idx = [](std::uint32_t low) {
    return 2 * (1 - static_cast<int>(low & 1u)) + (1 - static_cast<int>((low >> 1) & 1u));
  };
  Mat4 r2 = Mat4::Zero();
  const std::uint32_t dim = 1u << N;
  for (std::uint32_t rest = 0; rest < dim; rest += 4)
    for (std::uint32_t x = 0; x < 4; ++x)
      for (std::uint32_t y = 0; y < 4; ++y) r2(idx(x), idx(y)) += rho(x | rest, y | rest);
  PauliTable tab{};
  for (int pp = 0; pp < 4; ++pp)
    for (int qq = 0; qq < 4; ++qq)
      tab[pp][qq] = (r2 * kron(pauli::by_index(pp), pauli::by_index(qq))).trace().real();
  return from_table(tab);
}

}  // namespace ed

}  // namespace spinchain
