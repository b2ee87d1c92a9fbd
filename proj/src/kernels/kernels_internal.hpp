#pragma once

#include "blockframe/kernels.hpp"

namespace blockframe::kernels::detail {

void gram_scalar(SplitConstView a, std::size_t rows, std::size_t cols, SplitView out);
void logdet_shifted_scalar(SplitConstView batch, std::size_t n, std::size_t groups, double scale,
                           std::span<double> work, std::span<double> out);
void abs2_scalar(SplitConstView values, std::span<double> out);

// Sums ln(pivot) per lane in factorization order; shared so both variants
// finish identically.
void sum_log_pivots(std::span<const double> pivots, std::size_t n, std::size_t groups,
                    std::span<double> out);

#ifdef BLOCKFRAME_HAVE_AVX2
void gram_avx2(SplitConstView a, std::size_t rows, std::size_t cols, SplitView out);
void logdet_shifted_avx2(SplitConstView batch, std::size_t n, std::size_t groups, double scale,
                         std::span<double> work, std::span<double> out);
void abs2_avx2(SplitConstView values, std::span<double> out);
#endif

}  // namespace blockframe::kernels::detail
