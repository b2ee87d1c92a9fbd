#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace blockframe {

using cplx = std::complex<double>;

/// Dense row-major complex matrix.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static CMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  std::vector<cplx> column(std::size_t c) const;
  CMatrix adjoint() const;

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// Plain product A·B.
CMatrix multiply(const CMatrix& a, const CMatrix& b);

/// Largest |A(i,j) - conj(A(j,i))|.
double hermitian_defect(const CMatrix& a);

/// Largest |A(i,j) - B(i,j)|; matrices must have equal shapes.
double max_abs_difference(const CMatrix& a, const CMatrix& b);

/// Dense real matrix, row-major. Used for squared-correlation data.
struct RMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  RMatrix() = default;
  RMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

}  // namespace blockframe
