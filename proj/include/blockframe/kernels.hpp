#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference variant and,
// when built with BLOCKFRAME_ENABLE_AVX2, an AVX2 variant selected at runtime.
// The variants perform the same floating-point operations in the same order
// per output element, so their results are bit-identical.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace blockframe::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Matrices per batch group in the log-determinant kernel (one AVX2 register
/// of doubles).
inline constexpr std::size_t kLanes = 4;

/// Split-plane view of a complex array. `im` empty means the data is real.
struct SplitConstView {
  std::span<const double> re;
  std::span<const double> im;
  bool is_real() const noexcept { return im.empty(); }
};

struct SplitView {
  std::span<double> re;
  std::span<double> im;
};

/// out = A^H A for a row-major rows×cols matrix A. Output is cols×cols,
/// row-major. If A is real, out.im is filled with zeros.
using GramFn = void (*)(SplitConstView a, std::size_t rows, std::size_t cols, SplitView out);

/// Batched log-determinant of (I + scale·G) for Hermitian n×n matrices G
/// stored in lane-interleaved groups: element (i,j) of lane l in group g is at
/// ((g·n + i)·n + j)·kLanes + l. Only the lower triangle is read.
/// `work` must hold logdet_work_size(...) doubles.
/// out[g·kLanes + l] receives the natural log-determinant, or NaN when the
/// factorization hits a nonpositive pivot.
using LogdetFn = void (*)(SplitConstView batch, std::size_t n, std::size_t groups, double scale,
                          std::span<double> work, std::span<double> out);

/// Scratch doubles needed by LogdetFn.
constexpr std::size_t logdet_work_size(std::size_t n, std::size_t groups, bool real) {
  return (real ? 1 : 2) * groups * n * n * kLanes + groups * n * kLanes;
}

/// out[i] = re[i]^2 + im[i]^2.
using Abs2Fn = void (*)(SplitConstView values, std::span<double> out);

struct KernelTable {
  Isa isa;
  GramFn gram;
  LogdetFn logdet_shifted;
  Abs2Fn abs2;
};

const KernelTable& scalar_kernels();

/// Kernel tables usable on this machine (scalar always first).
std::vector<const KernelTable*> available_kernels();

/// The table used by the library. Picks the widest supported ISA on first
/// use; the environment variable BLOCKFRAME_ISA=scalar|avx2 overrides.
const KernelTable& active_kernels();

}  // namespace blockframe::kernels
