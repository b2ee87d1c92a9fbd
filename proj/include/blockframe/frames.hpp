#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "blockframe/block_model.hpp"
#include "blockframe/matrix.hpp"

namespace blockframe {

enum class BaseKind { Dft, Hadamard };

std::string_view to_string(BaseKind base);
/// Accepts "dft" or "hadamard"; throws ValidationError otherwise.
BaseKind parse_base_kind(std::string_view text);

/// Group in which differences are taken: Z_N (subtraction mod N) or
/// GF(2)^L (XOR).
enum class GroupKind { CyclicZN, BinaryGF2L };

std::string_view to_string(GroupKind group);
/// Accepts "cyclic" or "binary".
GroupKind parse_group_kind(std::string_view text);

/// The group matching a base matrix: DFT rows pair with Z_N, Hadamard rows
/// with GF(2)^L.
GroupKind group_for(BaseKind base);

struct DifferenceSet {
  GroupKind group = GroupKind::CyclicZN;
  int order = 0;
  std::vector<int> elements;
  int lambda = 0;
};

struct DifferenceSetReport {
  bool is_difference_set = false;
  /// Fewer than two elements or at least N-1 of them.
  bool degenerate = false;
  /// The common multiplicity when all nonzero differences agree.
  std::optional<int> lambda;
  /// nonzero group element -> number of ordered pairs (a, b), a != b, with
  /// a - b equal to it.
  std::map<int, int> difference_multiplicities;
};

/// Counts differences over all ordered pairs. Throws ValidationError when the
/// field invariants fail (elements out of range or repeated, binary group of
/// non-power-of-two order).
DifferenceSetReport verify_difference_set(const DifferenceSet& candidate);

/// Recipe for F = Z_S · W · P: rows `rows` of the N×N base matrix W, columns
/// reordered so that output column j is base column permutation[j].
struct FrameSpec {
  BaseKind base = BaseKind::Hadamard;
  int n = 0;
  int m = 0;
  std::vector<int> rows;
  std::vector<int> permutation;
  BlockModel blocks;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  friend bool operator==(const FrameSpec&, const FrameSpec&) = default;
};

std::vector<int> identity_permutation(int n);

/// M×N matrix with unit-norm columns and a block partition.
class Frame {
 public:
  /// Validates unit norms (1e-10) and N = N_B · N_v; throws ValidationError.
  Frame(CMatrix entries, BlockModel blocks, std::optional<FrameSpec> spec = std::nullopt);

  const CMatrix& entries() const noexcept { return entries_; }
  const BlockModel& blocks() const noexcept { return blocks_; }
  const std::optional<FrameSpec>& spec() const noexcept { return spec_; }

  std::size_t m() const noexcept { return entries_.rows(); }
  std::size_t n() const noexcept { return entries_.cols(); }
  /// True when every entry has a zero imaginary part.
  bool is_real() const noexcept { return real_; }

  /// Same vectors, different erasure configuration (block count must keep
  /// dividing N).
  Frame with_blocks(const BlockModel& blocks) const;

 private:
  CMatrix entries_;
  BlockModel blocks_;
  std::optional<FrameSpec> spec_;
  bool real_ = false;
};

/// Unitary N×N DFT (entry (s,n) = exp(-2πi·s·n/N)/√N) or Sylvester
/// Hadamard (entry (s,n) = (-1)^popcount(s & n)/√N, N = 2^L).
CMatrix build_base_matrix(BaseKind base, int n);

Frame construct_frame(const FrameSpec& spec);

/// A^H A.
CMatrix gram(const CMatrix& a);

/// |<f_n, f_k>|^2 for all column pairs.
struct CorrelationMatrix {
  RMatrix values;
  std::size_t size() const noexcept { return values.rows; }
  double operator()(std::size_t n, std::size_t k) const { return values(n, k); }
};

CorrelationMatrix squared_correlation_matrix(const Frame& frame);

struct WelchBounds {
  double average_bound = 0.0;
  double epsilon_wb = 0.0;
};

/// Both bounds equal (N-M)/((N-1)M). Throws ValidationError if N < M or M < 1.
WelchBounds welch_bounds(int n, int m);

struct Tightness {
  double a = 0.0;
  double b = 0.0;
  bool is_tight = false;
  bool is_untf = false;
};

/// Extreme eigenvalues of F F^H.
Tightness tightness(const Frame& frame);

}  // namespace blockframe
