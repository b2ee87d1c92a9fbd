#pragma once

#include <span>
#include <vector>

#include "blockframe/erasure.hpp"
#include "blockframe/frames.hpp"
#include "blockframe/kernels.hpp"

namespace blockframe {

/// N×N Gram matrix in split planes, row-major.
struct GramPlanes {
  std::size_t n = 0;
  bool real = true;
  std::vector<double> re;
  std::vector<double> im;

  static GramPlanes of(const CMatrix& frame_entries);
};

/// Batched ln det(I + scale·G[S, S]) over many index sets S of a common
/// size, where G is a full Gram matrix. Because the eigenvalues of G[S, S]
/// are those of the subframe Gram, (1/ln 2)·ln det(I + SNR·G[S,S]) equals
/// Σ log2(1 + SNR·λ_k), and exp(-ln det(I + SNR/4·G[S,S])) equals the
/// error-bound term (zero eigenvalues contribute factor 1 either way).
class SubsetLogdet {
 public:
  SubsetLogdet(std::size_t set_size, double scale,
               const kernels::KernelTable& kernels = kernels::active_kernels());

  std::size_t set_size() const noexcept { return k_; }

  /// `sets` holds count·set_size indices into g (count = sets.size() / set_size).
  /// Writes one natural log-determinant per set; throws NumericalError if a
  /// factorization fails.
  void run(const GramPlanes& g, std::span<const int> sets, std::span<double> out);

 private:
  std::size_t k_;
  double scale_;
  const kernels::KernelTable* kernels_;
  std::vector<double> batch_re_, batch_im_, work_, out_;
};

/// Average capacity through SubsetLogdet. Matches average_capacity's mean to
/// rounding; used where speed matters (search objectives).
double average_capacity_logdet(const Frame& frame, double snr_linear, const EvaluationMode& mode = {});

}  // namespace blockframe
