#pragma once
// Reference computations written independently of the library code paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "blockframe/frames.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Dense = std::vector<std::vector<cplx>>;

// Unnormalized base entry: exp(-2πi s n / N) or (-1)^{popcount(s & n)}.
inline cplx base_entry(blockframe::BaseKind base, int n_size, int s, int n) {
  if (base == blockframe::BaseKind::Hadamard) {
    int bits = 0;
    for (int v = s & n; v; v >>= 1) bits += v & 1;
    return bits % 2 ? -1.0 : 1.0;
  }
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(static_cast<long long>(s) * n % n_size) / n_size;
  return {std::cos(angle), std::sin(angle)};
}

// M×N frame entries, columns permuted: column j is base column perm[j].
inline Dense frame(blockframe::BaseKind base, int n, const std::vector<int>& rows, const std::vector<int>& perm) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows.size()));
  Dense f(rows.size(), std::vector<cplx>(n));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int j = 0; j < n; ++j) f[r][j] = base_entry(base, n, rows[r], perm[j]) * scale;
  return f;
}

inline Dense gram_of_columns(const Dense& f, const std::vector<int>& cols) {
  const std::size_t k = cols.size();
  Dense g(k, std::vector<cplx>(k));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      cplx s = 0.0;
      for (const auto& row : f) s += std::conj(row[cols[a]]) * row[cols[b]];
      g[a][b] = s;
    }
  return g;
}

// ln|det(I + scale·G)| by Gaussian elimination with partial pivoting.
inline double logdet_shifted(Dense g, double scale) {
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i][j] = (i == j ? 1.0 : 0.0) + scale * g[i][j];
  double acc = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(g[r][c]) > std::abs(g[p][c])) p = r;
    std::swap(g[p], g[c]);
    acc += std::log(std::abs(g[c][c]));
    for (std::size_t r = c + 1; r < n; ++r) {
      const cplx f = g[r][c] / g[c][c];
      for (std::size_t k = c; k < n; ++k) g[r][k] -= f * g[c][k];
    }
  }
  return acc;
}

inline std::vector<int> block_columns(int block_size, const std::vector<int>& blocks) {
  std::vector<int> cols;
  for (int b : blocks)
    for (int c = 0; c < block_size; ++c) cols.push_back(b * block_size + c);
  return cols;
}

inline std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

// Mean over all block selections of log2 det(I + SNR·G_S).
inline double average_capacity(const Dense& f, int num_blocks, int active, double snr) {
  const int n = static_cast<int>(f[0].size());
  const int nv = n / num_blocks;
  double sum = 0.0;
  const auto sels = combinations(num_blocks, active);
  for (const auto& s : sels) sum += logdet_shifted(gram_of_columns(f, block_columns(nv, s)), snr) / std::log(2.0);
  return sum / static_cast<double>(sels.size());
}

// Multiplicity of every nonzero difference, counted by direct enumeration.
inline bool is_difference_set(bool binary, int n, const std::vector<int>& set, int* lambda_out) {
  std::vector<int> count(n, 0);
  for (int a : set)
    for (int b : set)
      if (a != b) ++count[binary ? (a ^ b) : ((a - b + n) % n)];
  for (int g = 2; g < n; ++g)
    if (count[g] != count[1]) return false;
  const int lambda = n > 1 ? count[1] : 0;
  if (static_cast<long>(set.size()) * (static_cast<long>(set.size()) - 1) != static_cast<long>(lambda) * (n - 1))
    return false;
  if (lambda_out) *lambda_out = lambda;
  return true;
}

}  // namespace oracle
