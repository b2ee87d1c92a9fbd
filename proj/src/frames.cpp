#include "blockframe/frames.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>

#include "blockframe/error.hpp"
#include "blockframe/hermitian_eigen.hpp"
#include "blockframe/kernels.hpp"

namespace blockframe {

namespace {

bool is_power_of_two(int n) { return n > 0 && std::has_single_bit(static_cast<unsigned>(n)); }

void require_permutation(const std::vector<int>& perm, int n, const char* what) {
  if (static_cast<int>(perm.size()) != n)
    throw ValidationError(std::string(what) + ": expected " + std::to_string(n) + " entries, got " +
                          std::to_string(perm.size()));
  std::vector<char> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || p >= n)
      throw ValidationError(std::string(what) + ": index " + std::to_string(p) + " out of range");
    if (seen[p]++)
      throw ValidationError(std::string(what) + ": index " + std::to_string(p) +
                            " repeated (not a bijection)");
  }
}

}  // namespace

std::string_view to_string(BaseKind base) { return base == BaseKind::Dft ? "dft" : "hadamard"; }

BaseKind parse_base_kind(std::string_view text) {
  if (text == "dft") return BaseKind::Dft;
  if (text == "hadamard") return BaseKind::Hadamard;
  throw ValidationError("unknown base matrix '" + std::string(text) + "' (expected dft|hadamard)");
}

std::string_view to_string(GroupKind group) {
  return group == GroupKind::CyclicZN ? "cyclic" : "binary";
}

GroupKind parse_group_kind(std::string_view text) {
  if (text == "cyclic") return GroupKind::CyclicZN;
  if (text == "binary") return GroupKind::BinaryGF2L;
  throw ValidationError("unknown group '" + std::string(text) + "' (expected cyclic|binary)");
}

GroupKind group_for(BaseKind base) {
  return base == BaseKind::Dft ? GroupKind::CyclicZN : GroupKind::BinaryGF2L;
}

DifferenceSetReport verify_difference_set(const DifferenceSet& ds) {
  const int n = ds.order;
  if (n < 1) throw ValidationError("difference set: group order must be positive");
  if (ds.group == GroupKind::BinaryGF2L && !is_power_of_two(n))
    throw ValidationError("difference set: binary group order " + std::to_string(n) +
                          " is not a power of two");
  std::set<int> distinct;
  for (int e : ds.elements) {
    if (e < 0 || e >= n)
      throw ValidationError("difference set: element " + std::to_string(e) + " outside [0, " +
                            std::to_string(n - 1) + "]");
    if (!distinct.insert(e).second)
      throw ValidationError("difference set: element " + std::to_string(e) + " repeated");
  }

  DifferenceSetReport report;
  for (int g = 1; g < n; ++g) report.difference_multiplicities[g] = 0;
  for (int a : ds.elements)
    for (int b : ds.elements) {
      if (a == b) continue;
      const int d = ds.group == GroupKind::CyclicZN ? ((a - b) % n + n) % n : (a ^ b);
      ++report.difference_multiplicities[d];
    }

  const long m = static_cast<long>(ds.elements.size());
  report.degenerate = m < 2 || m >= n - 1;
  if (n == 1) {
    report.lambda = 0;
    report.is_difference_set = true;
    return report;
  }
  const int first = report.difference_multiplicities.begin()->second;
  const bool uniform = std::all_of(report.difference_multiplicities.begin(),
                                   report.difference_multiplicities.end(),
                                   [first](const auto& kv) { return kv.second == first; });
  if (uniform) report.lambda = first;
  report.is_difference_set = uniform && m * (m - 1) == static_cast<long>(first) * (n - 1);
  return report;
}

void FrameSpec::validate() const {
  if (n < 2) throw ValidationError("frame spec: N must be at least 2");
  if (m < 1 || m >= n)
    throw ValidationError("frame spec: need 1 <= M < N, got M=" + std::to_string(m) +
                          " N=" + std::to_string(n));
  if (base == BaseKind::Hadamard && !is_power_of_two(n))
    throw ValidationError("frame spec: Hadamard base needs N = 2^L, got N=" + std::to_string(n));
  if (static_cast<int>(rows.size()) != m)
    throw ValidationError("frame spec: row set has " + std::to_string(rows.size()) +
                          " entries, expected M=" + std::to_string(m));
  std::vector<char> seen(n, 0);
  for (int r : rows) {
    if (r < 0 || r >= n) throw ValidationError("frame spec: row " + std::to_string(r) + " out of range");
    if (seen[r]++) throw ValidationError("frame spec: duplicate row " + std::to_string(r));
  }
  require_permutation(permutation, n, "frame spec permutation");
  blocks.validate();
  if (blocks.total_columns() != n)
    throw ValidationError("frame spec: block model " + blocks.to_string() + " covers " +
                          std::to_string(blocks.total_columns()) + " columns, N=" + std::to_string(n));
}

std::vector<int> identity_permutation(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  return p;
}

Frame::Frame(CMatrix entries, BlockModel blocks, std::optional<FrameSpec> spec)
    : entries_(std::move(entries)), blocks_(blocks), spec_(std::move(spec)) {
  blocks_.validate();
  if (static_cast<std::size_t>(blocks_.total_columns()) != entries_.cols())
    throw ValidationError("frame: block model " + blocks_.to_string() + " covers " +
                          std::to_string(blocks_.total_columns()) + " columns but the frame has " +
                          std::to_string(entries_.cols()));
  real_ = true;
  for (std::size_t c = 0; c < entries_.cols(); ++c) {
    double norm2 = 0.0;
    for (std::size_t r = 0; r < entries_.rows(); ++r) {
      norm2 += std::norm(entries_(r, c));
      if (entries_(r, c).imag() != 0.0) real_ = false;
    }
    if (std::abs(norm2 - 1.0) > 1e-10)
      throw ValidationError("frame: column " + std::to_string(c) + " has squared norm " +
                            std::to_string(norm2) + " (expected 1)");
  }
}

Frame Frame::with_blocks(const BlockModel& blocks) const {
  std::optional<FrameSpec> spec = spec_;
  if (spec) spec->blocks = blocks;
  return Frame(entries_, blocks, std::move(spec));
}

namespace {

// Entry (s, n) of the base matrix scaled by 1/sqrt(scale_rows).
cplx base_entry(BaseKind base, int n_total, int s, int col, double inv_sqrt) {
  if (base == BaseKind::Hadamard)
    return (std::popcount(static_cast<unsigned>(s & col)) & 1) ? -inv_sqrt : inv_sqrt;
  // Reduce s·n mod N first so the phase stays accurate for large N.
  const long k = (static_cast<long>(s) * col) % n_total;
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / n_total;
  return {std::cos(angle) * inv_sqrt, std::sin(angle) * inv_sqrt};
}

}  // namespace

CMatrix build_base_matrix(BaseKind base, int n) {
  if (n < 2) throw ValidationError("base matrix: N must be at least 2");
  if (base == BaseKind::Hadamard && !is_power_of_two(n))
    throw ValidationError("base matrix: Hadamard order " + std::to_string(n) + " is not a power of two");
  CMatrix w(n, n);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(n));
  for (int s = 0; s < n; ++s)
    for (int c = 0; c < n; ++c) w(s, c) = base_entry(base, n, s, c, inv_sqrt);
  return w;
}

Frame construct_frame(const FrameSpec& spec) {
  spec.validate();
  // Rows of W carry 1/sqrt(N); rescaling by sqrt(N/M) leaves 1/sqrt(M).
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(spec.m));
  CMatrix f(spec.m, spec.n);
  for (int r = 0; r < spec.m; ++r)
    for (int j = 0; j < spec.n; ++j)
      f(r, j) = base_entry(spec.base, spec.n, spec.rows[r], spec.permutation[j], inv_sqrt);
  return Frame(std::move(f), spec.blocks, spec);
}

CMatrix gram(const CMatrix& a) {
  const std::size_t rows = a.rows(), cols = a.cols();
  std::vector<double> re(rows * cols), im(rows * cols);
  bool real = true;
  for (std::size_t i = 0; i < rows * cols; ++i) {
    re[i] = a.data()[i].real();
    im[i] = a.data()[i].imag();
    real = real && im[i] == 0.0;
  }
  std::vector<double> out_re(cols * cols), out_im(cols * cols);
  kernels::SplitConstView in{re, real ? std::span<const double>{} : std::span<const double>(im)};
  kernels::active_kernels().gram(in, rows, cols, {out_re, out_im});
  CMatrix g(cols, cols);
  for (std::size_t i = 0; i < cols * cols; ++i) g.data()[i] = {out_re[i], out_im[i]};
  return g;
}

CorrelationMatrix squared_correlation_matrix(const Frame& frame) {
  const CMatrix g = gram(frame.entries());
  const std::size_t n = g.rows();
  std::vector<double> re(n * n), im(n * n);
  for (std::size_t i = 0; i < n * n; ++i) {
    re[i] = g.data()[i].real();
    im[i] = g.data()[i].imag();
  }
  CorrelationMatrix c{RMatrix(n, n)};
  kernels::active_kernels().abs2({re, im}, c.values.values);
  return c;
}

WelchBounds welch_bounds(int n, int m) {
  if (m < 1 || n < m)
    throw ValidationError("welch bounds: need N >= M >= 1, got N=" + std::to_string(n) +
                          " M=" + std::to_string(m));
  if (n == 1) return {0.0, 0.0};
  const double v = static_cast<double>(n - m) / (static_cast<double>(n - 1) * m);
  return {v, v};
}

Tightness tightness(const Frame& frame) {
  const std::vector<double> eig = hermitian_eigenvalues(gram(frame.entries().adjoint()));
  Tightness t;
  t.a = eig.front();
  t.b = eig.back();
  const double redundancy = static_cast<double>(frame.n()) / static_cast<double>(frame.m());
  t.is_tight = t.b - t.a <= 1e-8;
  t.is_untf = t.is_tight && std::abs(t.a - redundancy) <= 1e-8;
  return t;
}

}  // namespace blockframe
