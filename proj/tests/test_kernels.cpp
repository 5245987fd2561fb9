#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "prehyp/kernels.hpp"

using namespace prehyp;
using namespace prehyp::kernels;

namespace {

std::vector<cplx> noise(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {d(rng), d(rng)};
  return v;
}

bool bitwise_equal(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

}  // namespace

TEST_CASE("serial and parallel kernels agree bitwise", "[kernels]") {
  std::mt19937_64 rng(11);
  for (bool periodic : {false, true}) {
    for (int rank : {1, 2, 3}) {
      const Stencil s{257, rank, 0.013, periodic};
      const std::size_t nv = static_cast<std::size_t>(s.nx) * rank;
      const std::size_t nm = nv * rank;
      INFO("periodic " << periodic << " rank " << rank);
      const auto u = noise(nv, rng), v = noise(nv, rng), f = noise(nv, rng), ut = noise(nv, rng),
                 utt = noise(nv, rng);
      const auto m1 = noise(nm, rng), m2 = noise(nm, rng), m3 = noise(nm, rng), m4 = noise(nm, rng),
                 m5 = noise(nm, rng), m6 = noise(nm, rng);

      std::vector<cplx> a(nv), b(nv);
      serial::first_order_rhs(s, m1, m2, u, a);
      omp::first_order_rhs(s, m1, m2, u, b);
      CHECK(bitwise_equal(a, b));

      std::vector<cplx> du_a(nv), dv_a(nv), du_b(nv), dv_b(nv);
      const SecondOrderSystemRow sys{m1, m2, m3, m4, m5, m6};
      serial::second_order_rhs(s, sys, u, v, f, du_a, dv_a);
      omp::second_order_rhs(s, sys, u, v, f, du_b, dv_b);
      CHECK(bitwise_equal(du_a, du_b));
      CHECK(bitwise_equal(dv_a, dv_b));
      serial::second_order_rhs(s, sys, u, v, {}, du_a, dv_a);
      omp::second_order_rhs(s, sys, u, v, {}, du_b, dv_b);
      CHECK(bitwise_equal(dv_a, dv_b));

      a = f;
      b = f;
      serial::add_dissipation(s, 0.02, u, a);
      omp::add_dissipation(s, 0.02, u, b);
      CHECK(bitwise_equal(a, b));

      serial::apply_first_order(s, m1, m2, m3, u, ut, a);
      omp::apply_first_order(s, m1, m2, m3, u, ut, b);
      CHECK(bitwise_equal(a, b));

      const SecondOrderOperatorRow op{m1, m2, m3, m4, m5, m6};
      serial::apply_second_order(s, op, u, ut, utt, a);
      omp::apply_second_order(s, op, u, ut, utt, b);
      CHECK(bitwise_equal(a, b));

      // dispatch through Exec
      std::vector<cplx> c(nv);
      first_order_rhs(Exec::parallel, s, m1, m2, u, c);
      serial::first_order_rhs(s, m1, m2, u, a);
      CHECK(bitwise_equal(a, c));
    }
  }
}

TEST_CASE("first-order rhs differentiates at second order", "[kernels]") {
  double prev = 0.0;
  for (int nx : {64, 128, 256}) {
    const double dx = 2 * M_PI / nx;
    const Stencil s{nx, 1, dx, true};
    std::vector<cplx> u(nx), out(nx), one(nx, 1.0), zero(nx, 0.0);
    for (int i = 0; i < nx; ++i) u[i] = std::sin(i * dx);
    first_order_rhs(Exec::serial, s, one, zero, u, out);
    double err = 0.0;
    for (int i = 0; i < nx; ++i) err = std::max(err, std::abs(out[i] - std::cos(i * dx)));
    if (prev > 0.0) CHECK(std::log2(prev / err) == Catch::Approx(2.0).margin(0.05));
    prev = err;
  }
}

TEST_CASE("line boundaries are held and dissipation ignores polynomials", "[kernels]") {
  const int nx = 40;
  const Stencil line{nx, 1, 0.1, false};
  std::vector<cplx> u(nx), out(nx, 0.0), one(nx, 1.0), zero(nx, 0.0);
  for (int i = 0; i < nx; ++i) u[i] = 1.0 + 0.5 * i;
  first_order_rhs(Exec::serial, line, one, zero, u, out);
  CHECK(out.front() == cplx(0.0));
  CHECK(out.back() == cplx(0.0));
  CHECK(out[nx / 2].real() == Catch::Approx(5.0));

  const Stencil ring{nx, 1, 0.1, true};
  std::vector<cplx> c(nx, 2.0), acc(nx, 0.0);
  add_dissipation(Exec::serial, ring, 0.02, c, acc);
  for (const cplx& z : acc) CHECK(std::abs(z) == 0.0);
}
