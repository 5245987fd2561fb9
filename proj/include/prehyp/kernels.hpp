#pragma once

#include <span>

#include "prehyp/field.hpp"

/// Data-parallel stencil kernels on one time level.
///
/// Every kernel exists twice with identical signatures: `serial::` is the plain
/// reference loop kept for testing, `omp::` distributes the node loop with OpenMP.
/// Coefficient rows are node-major, each node holding a row-major k x k block.
/// Section rows are node-major k-vectors.
namespace prehyp::kernels {

/// Spatial layout of one level.
struct Stencil {
  int nx = 0;
  int rank = 0;
  double dx = 1.0;
  bool periodic = false;
};

/// Premultiplied coefficients of the second-order system
///   dv/dt = k_tx dx(v) + k_xx dxx(u) + k_t v + k_x dx(u) + k_e u + m f,   du/dt = v.
struct SecondOrderSystemRow {
  std::span<const cplx> k_tx, k_xx, k_t, k_x, k_e, m;
};

/// Raw coefficients of L = C_tt dtt + 2 C_tx dtx + C_xx dxx + D_t dt + D_x dx + E.
struct SecondOrderOperatorRow {
  std::span<const cplx> c_tt, c_tx, c_xx, d_t, d_x, e;
};

/// Which kernel family to dispatch to.
enum class Exec { serial, parallel };

#define PREHYP_KERNEL_DECLS                                                                      \
  /* out = k1 dx(u) + k0 u in the interior; line boundary nodes get 0 (held boundary). */        \
  void first_order_rhs(const Stencil& s, std::span<const cplx> k1, std::span<const cplx> k0,      \
                       std::span<const cplx> u, std::span<cplx> out);                              \
  /* (du, dv) for the second-order system; f may be empty. Line boundary nodes get 0. */          \
  void second_order_rhs(const Stencil& s, const SecondOrderSystemRow& c,                          \
                        std::span<const cplx> u, std::span<const cplx> v,                         \
                        std::span<const cplx> f, std::span<cplx> du, std::span<cplx> dv);          \
  /* out += -(eps/(16 dx)) * (5-point fourth difference of u); zero ghosts on a line. */        \
  void add_dissipation(const Stencil& s, double eps, std::span<const cplx> u, std::span<cplx> out); \
  /* out = a_t ut + a_x dx(u) + b u, one-sided second-order x differences at line ends. */       \
  void apply_first_order(const Stencil& s, std::span<const cplx> a_t, std::span<const cplx> a_x,  \
                         std::span<const cplx> b, std::span<const cplx> u,                        \
                         std::span<const cplx> ut, std::span<cplx> out);                           \
  /* out = L u given the time-derivative rows ut = dt(u), utt = dtt(u). */                      \
  void apply_second_order(const Stencil& s, const SecondOrderOperatorRow& c,                      \
                          std::span<const cplx> u, std::span<const cplx> ut,                      \
                          std::span<const cplx> utt, std::span<cplx> out);

namespace serial {
PREHYP_KERNEL_DECLS
}  // namespace serial

namespace omp {
PREHYP_KERNEL_DECLS
}  // namespace omp

#undef PREHYP_KERNEL_DECLS

inline void first_order_rhs(Exec e, const Stencil& s, std::span<const cplx> k1, std::span<const cplx> k0,
                            std::span<const cplx> u, std::span<cplx> out) {
  e == Exec::serial ? serial::first_order_rhs(s, k1, k0, u, out) : omp::first_order_rhs(s, k1, k0, u, out);
}

inline void second_order_rhs(Exec e, const Stencil& s, const SecondOrderSystemRow& c,
                             std::span<const cplx> u, std::span<const cplx> v, std::span<const cplx> f,
                             std::span<cplx> du, std::span<cplx> dv) {
  e == Exec::serial ? serial::second_order_rhs(s, c, u, v, f, du, dv)
                    : omp::second_order_rhs(s, c, u, v, f, du, dv);
}

inline void add_dissipation(Exec e, const Stencil& s, double eps, std::span<const cplx> u,
                            std::span<cplx> out) {
  e == Exec::serial ? serial::add_dissipation(s, eps, u, out) : omp::add_dissipation(s, eps, u, out);
}

inline void apply_first_order(Exec e, const Stencil& s, std::span<const cplx> a_t, std::span<const cplx> a_x,
                              std::span<const cplx> b, std::span<const cplx> u, std::span<const cplx> ut,
                              std::span<cplx> out) {
  e == Exec::serial ? serial::apply_first_order(s, a_t, a_x, b, u, ut, out)
                    : omp::apply_first_order(s, a_t, a_x, b, u, ut, out);
}

inline void apply_second_order(Exec e, const Stencil& s, const SecondOrderOperatorRow& c,
                               std::span<const cplx> u, std::span<const cplx> ut,
                               std::span<const cplx> utt, std::span<cplx> out) {
  e == Exec::serial ? serial::apply_second_order(s, c, u, ut, utt, out)
                    : omp::apply_second_order(s, c, u, ut, utt, out);
}

}  // namespace prehyp::kernels
