#include <cmath>
#include <random>

#include "blockframe/error.hpp"
#include "blockframe/frames.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace blockframe;

TEST_SUITE("frames") {
  TEST_CASE("base matrices are unitary and match the entry formulas") {
    for (auto [base, n] : {std::pair{BaseKind::Dft, 7}, {BaseKind::Dft, 12}, {BaseKind::Hadamard, 16}}) {
      const CMatrix w = build_base_matrix(base, n);
      const CMatrix prod = multiply(w.adjoint(), w);
      CHECK(max_abs_difference(prod, CMatrix::identity(n)) < 1e-12);
      for (int s = 0; s < n; ++s)
        for (int c = 0; c < n; ++c)
          CHECK(std::abs(w(s, c) - oracle::base_entry(base, n, s, c) / std::sqrt(double(n))) < 1e-14);
    }
    CHECK_THROWS_AS(build_base_matrix(BaseKind::Hadamard, 12), ValidationError);
  }

  TEST_CASE("construct_frame selects rows and permutes columns") {
    const std::vector<int> rows{0, 2, 5, 6, 14, 15};
    std::vector<int> perm{1, 3, 6, 10, 9, 8, 13, 2, 14, 12, 0, 4, 11, 7, 5, 15};
    const Frame f = construct_frame({BaseKind::Hadamard, 16, 6, rows, perm, BlockModel{4, 4, 2}});
    const auto ref = oracle::frame(BaseKind::Hadamard, 16, rows, perm);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 16; ++c) CHECK(std::abs(f.entries()(r, c) - ref[r][c]) < 1e-15);
    CHECK(f.is_real());
    CHECK_FALSE(construct_frame({BaseKind::Dft, 7, 3, {1, 2, 4}, identity_permutation(7), BlockModel{7, 1, 3}}).is_real());
  }

  TEST_CASE("frame spec validation") {
    const BlockModel b{4, 4, 2};
    FrameSpec s{BaseKind::Hadamard, 16, 6, {0, 2, 5, 6, 14, 15}, identity_permutation(16), b};
    CHECK_NOTHROW(s.validate());
    auto bad = s;
    bad.permutation[1] = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = s;
    bad.rows = {0, 2, 5, 6, 14, 16};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = s;
    bad.rows = {0, 2, 2, 6, 14, 15};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = s;
    bad.blocks = BlockModel{5, 4, 2};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = s;
    bad.n = 12;
    bad.permutation = identity_permutation(12);
    bad.blocks = BlockModel{4, 3, 2};
    bad.rows = {0, 1, 2};
    bad.m = 3;
    CHECK_THROWS_AS(bad.validate(), ValidationError);  // Hadamard needs a power of two
  }

  TEST_CASE("Frame rejects non-unit columns and mismatched blocks") {
    CMatrix a(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 0.5;
    CHECK_THROWS_AS(Frame(a, BlockModel{2, 1, 1}), ValidationError);
    a(1, 1) = 1.0;
    CHECK_NOTHROW(Frame(a, BlockModel{2, 1, 1}));
    CHECK_THROWS_AS(Frame(a, BlockModel{3, 1, 1}), ValidationError);
  }

  TEST_CASE("difference set verifier: worked examples") {
    auto r = verify_difference_set({GroupKind::BinaryGF2L, 16, {0, 2, 5, 6, 14, 15}, 2});
    CHECK(r.is_difference_set);
    CHECK(r.lambda == 2);
    r = verify_difference_set({GroupKind::CyclicZN, 7, {0, 1, 3}, 1});
    CHECK(r.is_difference_set);
    CHECK(r.lambda == 1);
    r = verify_difference_set({GroupKind::CyclicZN, 7, {0, 1, 2}, 1});
    CHECK_FALSE(r.is_difference_set);
    CHECK(r.difference_multiplicities.at(1) == 2);
    CHECK(r.difference_multiplicities.at(3) == 0);
    r = verify_difference_set({GroupKind::CyclicZN, 5, {0}, 0});
    CHECK(r.degenerate);
    CHECK_THROWS_AS(verify_difference_set({GroupKind::BinaryGF2L, 12, {0, 1}, 0}), ValidationError);
    CHECK_THROWS_AS(verify_difference_set({GroupKind::CyclicZN, 7, {0, 7}, 0}), ValidationError);
    CHECK_THROWS_AS(verify_difference_set({GroupKind::CyclicZN, 7, {1, 1}, 0}), ValidationError);
  }

  TEST_CASE("difference set verifier agrees with brute force for all subsets, N <= 8") {
    int checked = 0;
    for (bool binary : {false, true})
      for (int n = 2; n <= 8; ++n) {
        if (binary && (n & (n - 1))) continue;
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
          std::vector<int> set;
          for (int i = 0; i < n; ++i)
            if (mask >> i & 1) set.push_back(i);
          int lambda = -1;
          const bool expect = oracle::is_difference_set(binary, n, set, &lambda);
          const auto r = verify_difference_set(
              {binary ? GroupKind::BinaryGF2L : GroupKind::CyclicZN, n, set, 0});
          CHECK(r.is_difference_set == expect);
          if (expect) CHECK(r.lambda == lambda);
          ++checked;
        }
      }
    CHECK(checked > 700);
  }

  TEST_CASE("Welch bounds") {
    const auto wb = welch_bounds(16, 6);
    CHECK(wb.average_bound == doctest::Approx(10.0 / 90.0).epsilon(1e-15));
    CHECK(wb.epsilon_wb == wb.average_bound);
    CHECK(welch_bounds(7, 7).average_bound == 0.0);
    CHECK_THROWS_AS(welch_bounds(4, 5), ValidationError);
  }

  TEST_CASE("difference-set frames are ETFs; permuting keeps the correlation multiset") {
    const Frame f = construct_frame({BaseKind::Hadamard, 16, 6, {0, 2, 5, 6, 14, 15}, identity_permutation(16),
                                     BlockModel{4, 4, 2}});
    const auto c = squared_correlation_matrix(f);
    const double eps = welch_bounds(16, 6).epsilon_wb;
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) CHECK(std::abs(c(i, j) - (i == j ? 1.0 : eps)) < 1e-12);
    const Tightness t = tightness(f);
    CHECK(t.is_tight);
    CHECK(t.is_untf);
    CHECK(t.a == doctest::Approx(16.0 / 6.0));

    const Frame d = construct_frame({BaseKind::Dft, 13, 4, {0, 1, 3, 9}, identity_permutation(13), BlockModel{13, 1, 4}});
    const auto cd = squared_correlation_matrix(d);
    for (int i = 0; i < 13; ++i)
      for (int j = 0; j < 13; ++j)
        if (i != j) CHECK(std::abs(cd(i, j) - welch_bounds(13, 4).epsilon_wb) < 1e-12);
  }

  TEST_CASE("mean squared correlation meets the Welch bound for random row-selection UNTFs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 16;
      std::vector<int> all = identity_permutation(n);
      std::shuffle(all.begin(), all.end(), rng);
      const int m = 2 + trial % 10;
      std::vector<int> rows(all.begin(), all.begin() + m);
      std::sort(rows.begin(), rows.end());
      std::shuffle(all.begin(), all.end(), rng);
      const Frame f = construct_frame({trial % 2 ? BaseKind::Dft : BaseKind::Hadamard, n, m, rows, all,
                                       BlockModel{4, 4, 2}});
      const auto c = squared_correlation_matrix(f);
      double sum = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) sum += c(i, j);
      CHECK(tightness(f).is_untf);
      CHECK(std::abs(sum / (n * (n - 1.0)) - welch_bounds(n, m).average_bound) < 1e-12);
    }
  }

  TEST_CASE("gram matches the oracle") {
    const std::vector<int> rows{1, 2, 4};
    const auto perm = std::vector<int>{3, 0, 6, 1, 5, 2, 4};
    const Frame f = construct_frame({BaseKind::Dft, 7, 3, rows, perm, BlockModel{7, 1, 3}});
    const CMatrix g = gram(f.entries());
    const auto ref = oracle::gram_of_columns(oracle::frame(BaseKind::Dft, 7, rows, perm), identity_permutation(7));
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) CHECK(std::abs(g(i, j) - ref[i][j]) < 1e-14);
  }

  TEST_CASE("with_blocks keeps vectors") {
    const Frame f = construct_frame({BaseKind::Hadamard, 16, 6, {0, 2, 5, 6, 14, 15}, identity_permutation(16),
                                     BlockModel{4, 4, 2}});
    const Frame g = f.with_blocks(BlockModel{16, 1, 8});
    CHECK(g.entries() == f.entries());
    CHECK(g.blocks().num_blocks == 16);
    CHECK_THROWS_AS(f.with_blocks(BlockModel{5, 3, 2}), ValidationError);
  }
}
