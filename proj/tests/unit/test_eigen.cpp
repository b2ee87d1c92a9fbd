#include <algorithm>
#include <cmath>
#include <random>

#include "blockframe/error.hpp"
#include "blockframe/hermitian_eigen.hpp"
#include "doctest.h"

using namespace blockframe;

namespace {

// Q from Gram-Schmidt on a random complex matrix.
CMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix q(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<cplx> v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    for (std::size_t p = 0; p < c; ++p) {
      cplx dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += std::conj(q(r, p)) * v[r];
      for (std::size_t r = 0; r < n; ++r) v[r] -= dot * q(r, p);
    }
    double norm = 0.0;
    for (auto& x : v) norm += std::norm(x);
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < n; ++r) q(r, c) = v[r] / norm;
  }
  return q;
}

}  // namespace

TEST_SUITE("eigen") {
  TEST_CASE("2x2 closed form") {
    CMatrix a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = -1.0;
    a(0, 1) = cplx(1.0, 2.0);
    a(1, 0) = cplx(1.0, -2.0);
    const auto ev = hermitian_eigenvalues(a);
    const double mid = 0.5, rad = std::sqrt(1.5 * 1.5 + 5.0);
    CHECK(ev[0] == doctest::Approx(mid - rad).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(mid + rad).epsilon(1e-14));
  }

  TEST_CASE("recovers the spectrum of U diag(d) U^H") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (std::size_t n : {1u, 3u, 8u, 16u, 33u}) {
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> d(n);
        for (auto& x : d) x = u(rng);
        if (trial == 0 && n > 2) d[1] = d[0];  // repeated eigenvalue
        const CMatrix q = random_unitary(n, rng);
        CMatrix diag(n, n);
        for (std::size_t i = 0; i < n; ++i) diag(i, i) = d[i];
        const CMatrix a = multiply(multiply(q, diag), q.adjoint());
        auto ev = hermitian_eigenvalues(a);
        std::sort(d.begin(), d.end());
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ev[i] - d[i]) < 1e-12);
      }
    }
  }

  TEST_CASE("diagonal and zero matrices") {
    CMatrix z(4, 4);
    for (double v : hermitian_eigenvalues(z)) CHECK(v == 0.0);
    CMatrix d(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    d(2, 2) = 2.0;
    CHECK(hermitian_eigenvalues(d) == std::vector<double>{-1.0, 2.0, 3.0});
  }

  TEST_CASE("non-square input throws") {
    CHECK_THROWS_AS(hermitian_eigenvalues(CMatrix(2, 3)), NumericalError);
  }
}
