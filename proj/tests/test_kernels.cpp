#include <cmath>
#include <vector>

#include "doctest.h"
#include "terracini/kernels.hpp"
#include "terracini/random.hpp"

using namespace terracini;
namespace k = terracini::kernels;

namespace {

double rel(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("dispatch reports an available instruction set") {
  CHECK(k::isa_available(k::active_isa()));
  CHECK(k::isa_available(k::Isa::scalar));
  k::force_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  k::reset_isa();
}

TEST_CASE("dot and weighted dot agree across variants") {
  if (!k::isa_available(k::Isa::avx2)) return;
  Rng rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 33u, 100u}) {
    std::vector<double> a(n), b(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
      w[i] = rng.uniform();
    }
    CHECK(rel(k::scalar::dot(a.data(), b.data(), n),
              k::avx2::dot(a.data(), b.data(), n)) <= 1e-13);
    CHECK(rel(k::scalar::weighted_dot(w.data(), a.data(), b.data(), n),
              k::avx2::weighted_dot(w.data(), a.data(), b.data(), n)) <= 1e-13);
  }
}

TEST_CASE("batched polynomial evaluation agrees across variants") {
  // p = 2 x0^2 x2 - x1 x2^2 + 0.5
  std::vector<double> coefs{2.0, -1.0, 0.5};
  std::vector<int> exps{2, 0, 1, 0, 1, 2, 0, 0, 0};
  Rng rng(9);
  for (std::size_t npts : {1u, 4u, 5u, 11u, 64u}) {
    std::vector<double> pts(3 * npts);
    for (auto& v : pts) v = rng.normal();
    std::vector<double> s(npts), v(npts);
    k::scalar::poly_eval(coefs.data(), exps.data(), 3, 3, pts.data(), npts,
                         s.data());
    for (std::size_t j = 0; j < npts; ++j) {
      double x0 = pts[j], x1 = pts[npts + j], x2 = pts[2 * npts + j];
      CHECK(rel(s[j], 2 * x0 * x0 * x2 - x1 * x2 * x2 + 0.5) <= 1e-14);
    }
    if (k::isa_available(k::Isa::avx2)) {
      k::avx2::poly_eval(coefs.data(), exps.data(), 3, 3, pts.data(), npts,
                         v.data());
      for (std::size_t j = 0; j < npts; ++j) CHECK(rel(s[j], v[j]) <= 1e-14);
    }
  }
}
