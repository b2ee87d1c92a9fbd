#include <immintrin.h>

#include "kernels_internal.hpp"

// Compiled with -mavx2 and only reached through the dispatch table after a
// CPUID check. No FMA: products and sums round separately, matching the
// scalar variants bit for bit.

namespace blockframe::kernels::detail {

void gram_avx2(SplitConstView a, std::size_t rows, std::size_t cols, SplitView out) {
  const double* ar = a.re.data();
  const double* ai = a.is_real() ? nullptr : a.im.data();
  const std::size_t vec_cols = cols - cols % 4;
  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = 0; j < vec_cols; j += 4) {
      __m256d acc_re = _mm256_setzero_pd();
      __m256d acc_im = _mm256_setzero_pd();
      if (ai == nullptr) {
        for (std::size_t r = 0; r < rows; ++r) {
          const __m256d x = _mm256_set1_pd(ar[r * cols + i]);
          const __m256d y = _mm256_loadu_pd(ar + r * cols + j);
          acc_re = _mm256_add_pd(acc_re, _mm256_mul_pd(x, y));
        }
      } else {
        for (std::size_t r = 0; r < rows; ++r) {
          const __m256d xr = _mm256_set1_pd(ar[r * cols + i]);
          const __m256d xi = _mm256_set1_pd(ai[r * cols + i]);
          const __m256d yr = _mm256_loadu_pd(ar + r * cols + j);
          const __m256d yi = _mm256_loadu_pd(ai + r * cols + j);
          acc_re = _mm256_add_pd(acc_re, _mm256_add_pd(_mm256_mul_pd(xr, yr), _mm256_mul_pd(xi, yi)));
          acc_im = _mm256_add_pd(acc_im, _mm256_sub_pd(_mm256_mul_pd(xr, yi), _mm256_mul_pd(xi, yr)));
        }
      }
      _mm256_storeu_pd(out.re.data() + i * cols + j, acc_re);
      _mm256_storeu_pd(out.im.data() + i * cols + j, acc_im);
    }
    for (std::size_t j = vec_cols; j < cols; ++j) {
      double acc_re = 0.0;
      double acc_im = 0.0;
      if (ai == nullptr) {
        for (std::size_t r = 0; r < rows; ++r) acc_re = acc_re + ar[r * cols + i] * ar[r * cols + j];
      } else {
        for (std::size_t r = 0; r < rows; ++r) {
          const double xr = ar[r * cols + i], xi = ai[r * cols + i];
          const double yr = ar[r * cols + j], yi = ai[r * cols + j];
          acc_re = acc_re + (xr * yr + xi * yi);
          acc_im = acc_im + (xr * yi - xi * yr);
        }
      }
      out.re[i * cols + j] = acc_re;
      out.im[i * cols + j] = acc_im;
    }
  }
}

void logdet_shifted_avx2(SplitConstView batch, std::size_t n, std::size_t groups, double scale,
                         std::span<double> work, std::span<double> out) {
  const bool real = batch.is_real();
  const std::size_t block = n * n * kLanes;
  const std::size_t planes = real ? 1 : 2;
  std::span<double> pivots = work.subspan(planes * groups * block, groups * n * kLanes);
  const __m256d vscale = _mm256_set1_pd(scale);
  const __m256d one = _mm256_set1_pd(1.0);
  for (std::size_t g = 0; g < groups; ++g) {
    double* wr = work.data() + g * block;
    double* wi = real ? nullptr : work.data() + groups * block + g * block;
    const double* gr = batch.re.data() + g * block;
    const double* gi = real ? nullptr : batch.im.data() + g * block;
    auto at = [n](std::size_t i, std::size_t j) { return (i * n + j) * kLanes; };
    for (std::size_t j = 0; j < n; ++j) {
      __m256d d = _mm256_add_pd(_mm256_mul_pd(vscale, _mm256_loadu_pd(gr + at(j, j))), one);
      for (std::size_t k = 0; k < j; ++k) {
        const __m256d lr = _mm256_loadu_pd(wr + at(j, k));
        if (real) {
          d = _mm256_sub_pd(d, _mm256_mul_pd(lr, lr));
        } else {
          const __m256d li = _mm256_loadu_pd(wi + at(j, k));
          d = _mm256_sub_pd(d, _mm256_add_pd(_mm256_mul_pd(lr, lr), _mm256_mul_pd(li, li)));
        }
      }
      _mm256_storeu_pd(pivots.data() + (g * n + j) * kLanes, d);
      const __m256d ljj = _mm256_sqrt_pd(d);
      for (std::size_t i = j + 1; i < n; ++i) {
        __m256d sr = _mm256_mul_pd(vscale, _mm256_loadu_pd(gr + at(i, j)));
        if (real) {
          for (std::size_t k = 0; k < j; ++k) {
            sr = _mm256_sub_pd(sr, _mm256_mul_pd(_mm256_loadu_pd(wr + at(i, k)),
                                                 _mm256_loadu_pd(wr + at(j, k))));
          }
          _mm256_storeu_pd(wr + at(i, j), _mm256_div_pd(sr, ljj));
        } else {
          __m256d si = _mm256_mul_pd(vscale, _mm256_loadu_pd(gi + at(i, j)));
          for (std::size_t k = 0; k < j; ++k) {
            const __m256d ar = _mm256_loadu_pd(wr + at(i, k));
            const __m256d ai = _mm256_loadu_pd(wi + at(i, k));
            const __m256d br = _mm256_loadu_pd(wr + at(j, k));
            const __m256d bi = _mm256_loadu_pd(wi + at(j, k));
            sr = _mm256_sub_pd(sr, _mm256_add_pd(_mm256_mul_pd(ar, br), _mm256_mul_pd(ai, bi)));
            si = _mm256_sub_pd(si, _mm256_sub_pd(_mm256_mul_pd(ai, br), _mm256_mul_pd(ar, bi)));
          }
          _mm256_storeu_pd(wr + at(i, j), _mm256_div_pd(sr, ljj));
          _mm256_storeu_pd(wi + at(i, j), _mm256_div_pd(si, ljj));
        }
      }
    }
  }
  sum_log_pivots(pivots, n, groups, out);
}

void abs2_avx2(SplitConstView values, std::span<double> out) {
  const std::size_t count = values.re.size();
  const std::size_t vec = count - count % 4;
  const double* re = values.re.data();
  if (values.is_real()) {
    for (std::size_t i = 0; i < vec; i += 4) {
      const __m256d r = _mm256_loadu_pd(re + i);
      _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(r, r));
    }
    for (std::size_t i = vec; i < count; ++i) out[i] = re[i] * re[i];
    return;
  }
  const double* im = values.im.data();
  for (std::size_t i = 0; i < vec; i += 4) {
    const __m256d r = _mm256_loadu_pd(re + i);
    const __m256d m = _mm256_loadu_pd(im + i);
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(_mm256_mul_pd(r, r), _mm256_mul_pd(m, m)));
  }
  for (std::size_t i = vec; i < count; ++i) out[i] = re[i] * re[i] + im[i] * im[i];
}

}  // namespace blockframe::kernels::detail
