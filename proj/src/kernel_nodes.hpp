#pragma once

// Per-node bodies shared by the serial and OpenMP kernel loops.

#include "prehyp/kernels.hpp"

namespace prehyp::kernels::detail {

inline constexpr int kMax = kMaxRank;

struct Vec {
  cplx c[kMax] = {};
};

inline Vec load(std::span<const cplx> row, int i, int k) {
  Vec v;
  const cplx* p = row.data() + static_cast<std::size_t>(i) * k;
  for (int a = 0; a < k; ++a) v.c[a] = p[a];
  return v;
}

// Neighbor with periodic wrap or zero ghost.
inline Vec neighbor(const Stencil& s, std::span<const cplx> row, int i) {
  if (s.periodic) {
    i %= s.nx;
    if (i < 0) i += s.nx;
    return load(row, i, s.rank);
  }
  if (i < 0 || i >= s.nx) return Vec{};
  return load(row, i, s.rank);
}

inline Vec combo(const Vec& a, cplx wa, const Vec& b, cplx wb, int k) {
  Vec r;
  for (int c = 0; c < k; ++c) r.c[c] = wa * a.c[c] + wb * b.c[c];
  return r;
}

// acc += M v with M the k x k block of `coef` at node i.
inline void mat_acc(std::span<const cplx> coef, int i, int k, const Vec& v, Vec& acc) {
  if (coef.empty()) return;
  const cplx* m = coef.data() + static_cast<std::size_t>(i) * k * k;
  for (int r = 0; r < k; ++r) {
    cplx sum = 0.0;
    for (int c = 0; c < k; ++c) sum += m[r * k + c] * v.c[c];
    acc.c[r] += sum;
  }
}

inline void store(std::span<cplx> row, int i, int k, const Vec& v) {
  cplx* p = row.data() + static_cast<std::size_t>(i) * k;
  for (int a = 0; a < k; ++a) p[a] = v.c[a];
}

inline bool held_boundary(const Stencil& s, int i) { return !s.periodic && (i == 0 || i == s.nx - 1); }

// Centered first derivative with held-zero ghosts (evolution stencil).
inline Vec dx_centered(const Stencil& s, std::span<const cplx> u, int i) {
  const double w = 0.5 / s.dx;
  return combo(neighbor(s, u, i + 1), w, neighbor(s, u, i - 1), -w, s.rank);
}

inline Vec dxx_centered(const Stencil& s, std::span<const cplx> u, int i) {
  const double w = 1.0 / (s.dx * s.dx);
  const Vec up = neighbor(s, u, i + 1);
  const Vec um = neighbor(s, u, i - 1);
  const Vec u0 = load(u, i, s.rank);
  Vec r;
  for (int c = 0; c < s.rank; ++c) r.c[c] = w * (up.c[c] - 2.0 * u0.c[c] + um.c[c]);
  return r;
}

// Second-order accurate first derivative, one-sided at line ends (operator application).
inline Vec dx_apply(const Stencil& s, std::span<const cplx> u, int i) {
  if (s.periodic || (i > 0 && i < s.nx - 1)) return dx_centered(s, u, i);
  const int k = s.rank;
  const int dir = i == 0 ? 1 : -1;
  const Vec a = load(u, i, k);
  const Vec b = load(u, i + dir, k);
  const Vec c = load(u, i + 2 * dir, k);
  Vec r;
  const double w = dir * 0.5 / s.dx;
  for (int q = 0; q < k; ++q) r.c[q] = w * (-3.0 * a.c[q] + 4.0 * b.c[q] - c.c[q]);
  return r;
}

inline Vec dxx_apply(const Stencil& s, std::span<const cplx> u, int i) {
  if (s.periodic || (i > 0 && i < s.nx - 1)) return dxx_centered(s, u, i);
  const int k = s.rank;
  const int dir = i == 0 ? 1 : -1;
  const Vec a = load(u, i, k);
  const Vec b = load(u, i + dir, k);
  const Vec c = load(u, i + 2 * dir, k);
  const Vec d = load(u, i + 3 * dir, k);
  Vec r;
  const double w = 1.0 / (s.dx * s.dx);
  for (int q = 0; q < k; ++q) r.c[q] = w * (2.0 * a.c[q] - 5.0 * b.c[q] + 4.0 * c.c[q] - d.c[q]);
  return r;
}

inline void first_order_rhs_node(const Stencil& s, std::span<const cplx> k1, std::span<const cplx> k0,
                                 std::span<const cplx> u, std::span<cplx> out, int i) {
  Vec acc;
  if (!held_boundary(s, i)) {
    mat_acc(k1, i, s.rank, dx_centered(s, u, i), acc);
    mat_acc(k0, i, s.rank, load(u, i, s.rank), acc);
  }
  store(out, i, s.rank, acc);
}

inline void second_order_rhs_node(const Stencil& s, const SecondOrderSystemRow& c, std::span<const cplx> u,
                                  std::span<const cplx> v, std::span<const cplx> f, std::span<cplx> du,
                                  std::span<cplx> dv, int i) {
  const int k = s.rank;
  Vec acc;
  Vec vel;
  if (!held_boundary(s, i)) {
    vel = load(v, i, k);
    mat_acc(c.k_tx, i, k, dx_centered(s, v, i), acc);
    mat_acc(c.k_xx, i, k, dxx_centered(s, u, i), acc);
    mat_acc(c.k_t, i, k, vel, acc);
    mat_acc(c.k_x, i, k, dx_centered(s, u, i), acc);
    mat_acc(c.k_e, i, k, load(u, i, k), acc);
    if (!f.empty()) mat_acc(c.m, i, k, load(f, i, k), acc);
  }
  store(du, i, k, vel);
  store(dv, i, k, acc);
}

inline void dissipation_node(const Stencil& s, double eps, std::span<const cplx> u, std::span<cplx> out, int i) {
  if (held_boundary(s, i)) return;
  const int k = s.rank;
  const Vec m2 = neighbor(s, u, i - 2);
  const Vec m1 = neighbor(s, u, i - 1);
  const Vec z = load(u, i, k);
  const Vec p1 = neighbor(s, u, i + 1);
  const Vec p2 = neighbor(s, u, i + 2);
  const double w = -eps / (16.0 * s.dx);
  cplx* o = out.data() + static_cast<std::size_t>(i) * k;
  for (int q = 0; q < k; ++q) {
    o[q] += w * (m2.c[q] - 4.0 * m1.c[q] + 6.0 * z.c[q] - 4.0 * p1.c[q] + p2.c[q]);
  }
}

inline void apply_first_order_node(const Stencil& s, std::span<const cplx> a_t, std::span<const cplx> a_x,
                                   std::span<const cplx> b, std::span<const cplx> u, std::span<const cplx> ut,
                                   std::span<cplx> out, int i) {
  const int k = s.rank;
  Vec acc;
  mat_acc(a_t, i, k, load(ut, i, k), acc);
  mat_acc(a_x, i, k, dx_apply(s, u, i), acc);
  mat_acc(b, i, k, load(u, i, k), acc);
  store(out, i, k, acc);
}

inline void apply_second_order_node(const Stencil& s, const SecondOrderOperatorRow& c, std::span<const cplx> u,
                                    std::span<const cplx> ut, std::span<const cplx> utt, std::span<cplx> out,
                                    int i) {
  const int k = s.rank;
  Vec acc;
  mat_acc(c.c_tt, i, k, load(utt, i, k), acc);
  Vec mixed = dx_apply(s, ut, i);
  for (int q = 0; q < k; ++q) mixed.c[q] *= 2.0;
  mat_acc(c.c_tx, i, k, mixed, acc);
  mat_acc(c.c_xx, i, k, dxx_apply(s, u, i), acc);
  mat_acc(c.d_t, i, k, load(ut, i, k), acc);
  mat_acc(c.d_x, i, k, dx_apply(s, u, i), acc);
  mat_acc(c.e, i, k, load(u, i, k), acc);
  store(out, i, k, acc);
}

}  // namespace prehyp::kernels::detail
