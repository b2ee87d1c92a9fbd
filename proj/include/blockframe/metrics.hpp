#pragma once

#include <map>
#include <span>
#include <vector>

#include "blockframe/erasure.hpp"
#include "blockframe/frames.hpp"

namespace blockframe {

/// Receiver SNR = 1/σ_z² (linear).
class ChannelParams {
 public:
  /// Throws ValidationError unless snr_linear > 0.
  explicit ChannelParams(double snr_linear);
  static ChannelParams from_db(double snr_db);

  double snr_linear() const noexcept { return snr_; }
  double snr_db() const;

 private:
  double snr_;
};

struct SelectionValue {
  Selection selection;
  double value = 0.0;
};

/// Capacities in bits per channel use.
struct CapacityReport {
  double mean = 0.0;
  double orthogonality_bound = 0.0;
  int active_columns = 0;
  std::vector<SelectionValue> per_selection;
  std::map<double, double> outage;  // rate fraction -> probability
};

struct StcReport {
  double bound_mean = 0.0;
  double orthogonality_bound = 0.0;
  std::vector<SelectionValue> per_selection;
};

/// Σ log2(1 + SNR·λ_k). Throws ValidationError on eigenvalues below -1e-8;
/// tiny negatives count as zero.
double instantaneous_capacity(std::span<const double> eigenvalues, const ChannelParams& channel);

/// K·log2(1 + SNR).
double capacity_orthogonality_bound(int k, const ChannelParams& channel);

/// Mean of instantaneous_capacity over the selections `mode` yields, using
/// the eigenvalues of each subframe Gram. K > M is accepted with a warning.
/// Outage probabilities are filled for each requested rate fraction.
CapacityReport average_capacity(const Frame& frame, const ChannelParams& channel,
                                const EvaluationMode& mode = {},
                                const std::vector<double>& outage_fractions = {0.98});

/// Weighted probability that a selection's capacity is below fraction·mean.
/// Throws ValidationError for an empty report or fraction outside (0, 1].
double capacity_outage(const CapacityReport& report, double rate_fraction);

/// Mean over selections of Π_{k≤M} (1 + SNR/4·λ_k)^{-1}, with λ from the
/// M×M Gram (log domain). Throws ValidationError when K < M.
StcReport stc_error_bound(const Frame& frame, const ChannelParams& channel,
                          const EvaluationMode& mode = {});

/// sqrt(Σ_g Σ_{n,k} (B_gg(n,k) - I(n,k))²) over the diagonal blocks of the
/// squared correlation matrix.
double intra_block_identity_distance(const Frame& frame);

/// Inter-block squared correlation that keeps the average Welch bound tight
/// when every intra-block correlation is zero. Throws ValidationError unless
/// N_B divides N and N > M.
double desired_epsilon(int n, int m, int num_blocks);

struct StructureDeviation {
  double intra_rms = 0.0;        ///< RMS of off-diagonal intra-block |c|²
  double inter_rms_error = 0.0;  ///< RMS of (inter-block |c|² - ε)
};

StructureDeviation desired_structure_deviation(const Frame& frame);

}  // namespace blockframe
