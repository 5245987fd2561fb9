#include "kernel_nodes.hpp"

namespace prehyp::kernels::omp {

void first_order_rhs(const Stencil& s, std::span<const cplx> k1, std::span<const cplx> k0,
                     std::span<const cplx> u, std::span<cplx> out) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < s.nx; ++i) detail::first_order_rhs_node(s, k1, k0, u, out, i);
}

void second_order_rhs(const Stencil& s, const SecondOrderSystemRow& c, std::span<const cplx> u,
                      std::span<const cplx> v, std::span<const cplx> f, std::span<cplx> du,
                      std::span<cplx> dv) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < s.nx; ++i) detail::second_order_rhs_node(s, c, u, v, f, du, dv, i);
}

void add_dissipation(const Stencil& s, double eps, std::span<const cplx> u, std::span<cplx> out) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < s.nx; ++i) detail::dissipation_node(s, eps, u, out, i);
}

void apply_first_order(const Stencil& s, std::span<const cplx> a_t, std::span<const cplx> a_x,
                       std::span<const cplx> b, std::span<const cplx> u, std::span<const cplx> ut,
                       std::span<cplx> out) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < s.nx; ++i) detail::apply_first_order_node(s, a_t, a_x, b, u, ut, out, i);
}

void apply_second_order(const Stencil& s, const SecondOrderOperatorRow& c, std::span<const cplx> u,
                        std::span<const cplx> ut, std::span<const cplx> utt, std::span<cplx> out) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < s.nx; ++i) detail::apply_second_order_node(s, c, u, ut, utt, out, i);
}

}  // namespace prehyp::kernels::omp
