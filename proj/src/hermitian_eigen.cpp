#include "blockframe/hermitian_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blockframe/error.hpp"

namespace blockframe {

namespace {

double off_diagonal_norm2(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += std::norm(a(i, j));
  return 2.0 * s;
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const CMatrix& input, int max_sweeps) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw NumericalError("hermitian_eigenvalues: matrix is not square");
  if (n == 0) return {};

  // Work on a fully Hermitian copy built from the upper triangle.
  CMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = input(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = input(i, j);
      a(j, i) = std::conj(input(i, j));
    }
  }
  double frob2 = 0.0;
  for (const cplx& v : a.data()) frob2 += std::norm(v);
  const double rel = 1e-15 * static_cast<double>(n);
  const double stop = rel * rel * frob2;

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm2(a) <= stop) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Skip entries already negligible against both diagonal entries.
        if (sweep > 3 && std::abs(app) + 1e3 * mag == std::abs(app) &&
            std::abs(aqq) + 1e3 * mag == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        // The phase e = apq/|apq| reduces the 2x2 block to a real symmetric
        // one; J = diag(1, conj(e)) · [[c, s], [-s, c]].
        const cplx e = apq / mag;
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const cplx jqp = -s * std::conj(e);
        const cplx jqq = c * std::conj(e);
        // A <- A J (columns p, q)
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * c + akq * jqp;
          a(k, q) = akp * s + akq * jqq;
        }
        // A <- J^H A (rows p, q)
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk + std::conj(jqp) * aqk;
          a(q, k) = s * apk + std::conj(jqq) * aqk;
        }
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }
  if (off_diagonal_norm2(a) > stop) {
    std::ostringstream msg;
    msg << "hermitian_eigenvalues: no convergence after " << max_sweeps << " sweeps (n=" << n
        << ", off-diagonal norm " << std::sqrt(off_diagonal_norm2(a)) << ", Frobenius norm "
        << std::sqrt(frob2) << ")";
    throw NumericalError(msg.str());
  }

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i).real();
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace blockframe
