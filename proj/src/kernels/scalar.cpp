#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace blockframe::kernels::detail {

void gram_scalar(SplitConstView a, std::size_t rows, std::size_t cols, SplitView out) {
  const double* ar = a.re.data();
  const double* ai = a.is_real() ? nullptr : a.im.data();
  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
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

void sum_log_pivots(std::span<const double> pivots, std::size_t n, std::size_t groups,
                    std::span<double> out) {
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = pivots[(g * n + j) * kLanes + l];
        if (!(d > 0.0)) {
          acc = std::numeric_limits<double>::quiet_NaN();
          break;
        }
        acc += std::log(d);
      }
      out[g * kLanes + l] = acc;
    }
  }
}

// Cholesky L·L^H of I + scale·G, column by column. L overwrites the lower
// triangle of the work copy; pivots d_j = L_jj^2 are kept for the log sum.
void logdet_shifted_scalar(SplitConstView batch, std::size_t n, std::size_t groups, double scale,
                           std::span<double> work, std::span<double> out) {
  const bool real = batch.is_real();
  const std::size_t block = n * n * kLanes;
  const std::size_t planes = real ? 1 : 2;
  std::span<double> pivots = work.subspan(planes * groups * block, groups * n * kLanes);
  for (std::size_t g = 0; g < groups; ++g) {
    double* wr = work.data() + g * block;
    double* wi = real ? nullptr : work.data() + groups * block + g * block;
    const double* gr = batch.re.data() + g * block;
    const double* gi = real ? nullptr : batch.im.data() + g * block;
    for (std::size_t l = 0; l < kLanes; ++l) {
      auto at = [&](std::size_t i, std::size_t j) { return (i * n + j) * kLanes + l; };
      for (std::size_t j = 0; j < n; ++j) {
        double d = scale * gr[at(j, j)] + 1.0;
        for (std::size_t k = 0; k < j; ++k) {
          const double lr = wr[at(j, k)];
          if (real) {
            d = d - lr * lr;
          } else {
            const double li = wi[at(j, k)];
            d = d - (lr * lr + li * li);
          }
        }
        pivots[(g * n + j) * kLanes + l] = d;
        const double ljj = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
          double sr = scale * gr[at(i, j)];
          double si = real ? 0.0 : scale * gi[at(i, j)];
          for (std::size_t k = 0; k < j; ++k) {
            const double ar = wr[at(i, k)], br = wr[at(j, k)];
            if (real) {
              sr = sr - ar * br;
            } else {
              const double ai = wi[at(i, k)], bi = wi[at(j, k)];
              // L_ik · conj(L_jk)
              sr = sr - (ar * br + ai * bi);
              si = si - (ai * br - ar * bi);
            }
          }
          wr[at(i, j)] = sr / ljj;
          if (!real) wi[at(i, j)] = si / ljj;
        }
      }
    }
  }
  sum_log_pivots(pivots, n, groups, out);
}

void abs2_scalar(SplitConstView values, std::span<double> out) {
  const std::size_t count = values.re.size();
  if (values.is_real()) {
    for (std::size_t i = 0; i < count; ++i) out[i] = values.re[i] * values.re[i];
    return;
  }
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = values.re[i] * values.re[i] + values.im[i] * values.im[i];
  }
}

}  // namespace blockframe::kernels::detail
