#include <cmath>
#include <cstring>
#include <random>

#include "blockframe/capacity_engine.hpp"
#include "blockframe/error.hpp"
#include "blockframe/kernels.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace blockframe;
using namespace blockframe::kernels;

namespace {

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct Planes {
  std::vector<double> re, im;
};

Planes random_planes(std::size_t count, bool real, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Planes p;
  p.re.resize(count);
  for (auto& x : p.re) x = g(rng);
  if (!real) {
    p.im.resize(count);
    for (auto& x : p.im) x = g(rng);
  }
  return p;
}

// Lane-interleaved batch of random Gram matrices (lower triangle used).
Planes random_gram_batch(std::size_t n, std::size_t groups, bool real, std::mt19937_64& rng,
                         std::vector<oracle::Dense>& dense) {
  Planes out;
  out.re.assign(groups * n * n * kLanes, 0.0);
  if (!real) out.im.assign(out.re.size(), 0.0);
  dense.clear();
  for (std::size_t g = 0; g < groups; ++g)
    for (std::size_t l = 0; l < kLanes; ++l) {
      const std::size_t rows = n + 2;
      Planes a = random_planes(rows * n, real, rng);
      oracle::Dense m(n, std::vector<oracle::cplx>(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          oracle::cplx s = 0.0;
          for (std::size_t r = 0; r < rows; ++r) {
            const oracle::cplx x(a.re[r * n + i], real ? 0.0 : a.im[r * n + i]);
            const oracle::cplx y(a.re[r * n + j], real ? 0.0 : a.im[r * n + j]);
            s += std::conj(x) * y;
          }
          m[i][j] = s / double(rows);
          const std::size_t at = ((g * n + i) * n + j) * kLanes + l;
          out.re[at] = m[i][j].real();
          if (!real) out.im[at] = m[i][j].imag();
        }
      dense.push_back(m);
    }
  return out;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar table is always available and first") {
    const auto tables = available_kernels();
    REQUIRE_FALSE(tables.empty());
    CHECK(tables.front()->isa == Isa::Scalar);
    CHECK(isa_name(Isa::Scalar) == "scalar");
    CHECK(isa_name(Isa::Avx2) == "avx2");
    MESSAGE("active kernels: " << isa_name(active_kernels().isa) << ", available: " << tables.size());
  }

  TEST_CASE("gram variants are bit-identical to scalar") {
    std::mt19937_64 rng(5);
    for (bool real : {true, false})
      for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {6, 16}, {7, 13}, {20, 64}, {3, 5}}) {
        const Planes a = random_planes(rows * cols, real, rng);
        const SplitConstView in{a.re, a.im};
        std::vector<double> ref_re(cols * cols), ref_im(cols * cols);
        scalar_kernels().gram(in, rows, cols, SplitView{ref_re, ref_im});
        for (std::size_t i = 0; i < cols; ++i)
          for (std::size_t j = 0; j < cols; ++j) {
            oracle::cplx s = 0.0;
            for (std::size_t r = 0; r < rows; ++r)
              s += std::conj(oracle::cplx(a.re[r * cols + i], real ? 0.0 : a.im[r * cols + i])) *
                   oracle::cplx(a.re[r * cols + j], real ? 0.0 : a.im[r * cols + j]);
            CHECK(std::abs(oracle::cplx(ref_re[i * cols + j], ref_im[i * cols + j]) - s) < 1e-12);
          }
        for (const KernelTable* t : available_kernels()) {
          std::vector<double> re(cols * cols, -1.0), im(cols * cols, -1.0);
          t->gram(in, rows, cols, SplitView{re, im});
          CHECK(bit_equal(re, ref_re));
          CHECK(bit_equal(im, ref_im));
        }
      }
  }

  TEST_CASE("log-det variants are bit-identical to scalar and match elimination") {
    std::mt19937_64 rng(17);
    for (bool real : {true, false})
      for (std::size_t n : {1u, 2u, 5u, 8u, 16u}) {
        const std::size_t groups = 3;
        std::vector<oracle::Dense> dense;
        const Planes batch = random_gram_batch(n, groups, real, rng, dense);
        const double scale = 100.0;
        std::vector<double> work(logdet_work_size(n, groups, real));
        std::vector<double> ref(groups * kLanes);
        scalar_kernels().logdet_shifted(SplitConstView{batch.re, batch.im}, n, groups, scale, work, ref);
        for (std::size_t i = 0; i < ref.size(); ++i)
          CHECK(std::abs(ref[i] - oracle::logdet_shifted(dense[i], scale)) < 1e-10 * std::max(1.0, std::abs(ref[i])));
        for (const KernelTable* t : available_kernels()) {
          std::vector<double> out(ref.size(), 0.0);
          std::fill(work.begin(), work.end(), 123.0);
          t->logdet_shifted(SplitConstView{batch.re, batch.im}, n, groups, scale, work, out);
          CHECK(bit_equal(out, ref));
        }
      }
  }

  TEST_CASE("log-det reports NaN for an indefinite shift") {
    const std::size_t n = 2;
    std::vector<double> re(n * n * kLanes, 0.0);
    for (std::size_t l = 0; l < kLanes; ++l) {
      re[(0 * n + 0) * kLanes + l] = l == 2 ? -5.0 : 1.0;
      re[(1 * n + 1) * kLanes + l] = 1.0;
    }
    for (const KernelTable* t : available_kernels()) {
      std::vector<double> work(logdet_work_size(n, 1, true)), out(kLanes);
      t->logdet_shifted(SplitConstView{re, {}}, n, 1, 1.0, work, out);
      CHECK(std::isnan(out[2]));
      CHECK(out[0] == doctest::Approx(2.0 * std::log(2.0)));
    }
  }

  TEST_CASE("abs2 variants are bit-identical") {
    std::mt19937_64 rng(3);
    for (std::size_t count : {1u, 4u, 7u, 1025u}) {
      const Planes p = random_planes(count, false, rng);
      std::vector<double> ref(count);
      scalar_kernels().abs2(SplitConstView{p.re, p.im}, ref);
      for (std::size_t i = 0; i < count; ++i) CHECK(ref[i] == p.re[i] * p.re[i] + p.im[i] * p.im[i]);
      for (const KernelTable* t : available_kernels()) {
        std::vector<double> out(count);
        t->abs2(SplitConstView{p.re, p.im}, out);
        CHECK(bit_equal(out, ref));
      }
    }
  }

  TEST_CASE("subset log-det is identical across kernel tables") {
    const Frame f = construct_frame({BaseKind::Dft, 16, 6, {0, 1, 3, 7, 10, 12}, identity_permutation(16),
                                     BlockModel{4, 4, 2}});
    const GramPlanes g = GramPlanes::of(f.entries());
    std::vector<int> sets;
    for (const auto& s : oracle::combinations(16, 5))
      if (sets.size() < 5 * 41) sets.insert(sets.end(), s.begin(), s.end());
    std::vector<double> ref(sets.size() / 5);
    SubsetLogdet(5, 31.6, scalar_kernels()).run(g, sets, ref);
    for (const KernelTable* t : available_kernels()) {
      std::vector<double> out(ref.size());
      SubsetLogdet(5, 31.6, *t).run(g, sets, out);
      CHECK(bit_equal(out, ref));
    }
  }
}
