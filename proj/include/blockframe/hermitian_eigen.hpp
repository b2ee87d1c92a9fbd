#pragma once

#include <vector>

#include "blockframe/matrix.hpp"

namespace blockframe {

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// returned in ascending order. Only the upper triangle and the real part of
/// the diagonal are read.
///
/// Throws NumericalError if the off-diagonal mass does not drop below
/// n·1e-15 of the Frobenius norm within the sweep limit, or if the input is
/// not square.
std::vector<double> hermitian_eigenvalues(const CMatrix& a, int max_sweeps = 64);

}  // namespace blockframe
