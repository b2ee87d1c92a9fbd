#include "blockframe/metrics.hpp"

#include <cmath>
#include <sstream>

#include "blockframe/error.hpp"
#include "blockframe/log.hpp"
#include "blockframe/parallel.hpp"
#include "blockframe/spectra.hpp"

namespace blockframe {

ChannelParams::ChannelParams(double snr_linear) : snr_(snr_linear) {
  if (!(snr_linear > 0.0) || !std::isfinite(snr_linear))
    throw ValidationError("channel: SNR must be a positive finite number");
}

ChannelParams ChannelParams::from_db(double snr_db) { return ChannelParams(std::pow(10.0, snr_db / 10.0)); }

double ChannelParams::snr_db() const { return 10.0 * std::log10(snr_); }

double instantaneous_capacity(std::span<const double> eigenvalues, const ChannelParams& channel) {
  double total = 0.0;
  for (double v : eigenvalues) {
    if (v < -1e-8) throw ValidationError("instantaneous_capacity: negative eigenvalue " + std::to_string(v));
    total += std::log2(1.0 + channel.snr_linear() * std::max(v, 0.0));
  }
  return total;
}

double capacity_orthogonality_bound(int k, const ChannelParams& channel) {
  if (k < 1) throw ValidationError("capacity bound: K must be positive");
  return k * std::log2(1.0 + channel.snr_linear());
}

CapacityReport average_capacity(const Frame& frame, const ChannelParams& channel, const EvaluationMode& mode,
                                const std::vector<double>& outage_fractions) {
  const int k = frame.blocks().active_columns();
  if (static_cast<std::size_t>(k) > frame.m()) {
    std::ostringstream msg;
    msg << "capacity evaluated with K=" << k << " > M=" << frame.m()
        << " (the NOMA setting assumes K <= M)";
    warn(msg.str());
  }
  const std::vector<Selection> selections = selections_for(frame.blocks(), mode);
  const auto caps = parallel_map(selections.size(), [&](std::size_t i) {
    return instantaneous_capacity(gram_spectrum(subframe(frame, selections[i])), channel);
  });

  CapacityReport report;
  report.active_columns = k;
  report.orthogonality_bound = capacity_orthogonality_bound(k, channel);
  report.per_selection.reserve(selections.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < selections.size(); ++i) {
    sum += caps[i];
    report.per_selection.push_back({selections[i], caps[i]});
  }
  report.mean = sum / static_cast<double>(selections.size());
  for (double f : outage_fractions) report.outage[f] = capacity_outage(report, f);
  return report;
}

double capacity_outage(const CapacityReport& report, double rate_fraction) {
  if (report.per_selection.empty()) throw ValidationError("capacity_outage: no per-selection capacities");
  if (!(rate_fraction > 0.0 && rate_fraction <= 1.0))
    throw ValidationError("capacity_outage: rate fraction must lie in (0, 1]");
  const double threshold = rate_fraction * report.mean;
  std::size_t below = 0;
  for (const SelectionValue& s : report.per_selection)
    if (s.value < threshold) ++below;
  return static_cast<double>(below) / static_cast<double>(report.per_selection.size());
}

StcReport stc_error_bound(const Frame& frame, const ChannelParams& channel, const EvaluationMode& mode) {
  const int k = frame.blocks().active_columns();
  const int m = static_cast<int>(frame.m());
  if (k < m)
    throw ValidationError("stc_error_bound: requires M <= K, got M=" + std::to_string(m) +
                          " > K=" + std::to_string(k));
  const double quarter = channel.snr_linear() / 4.0;
  const std::vector<Selection> selections = selections_for(frame.blocks(), mode);
  const auto terms = parallel_map(selections.size(), [&](std::size_t i) {
    double log_prod = 0.0;
    for (double v : gram_spectrum(subframe(frame, selections[i]))) log_prod += std::log1p(quarter * v);
    return std::exp(-log_prod);
  });
  StcReport report;
  report.orthogonality_bound = std::exp(-m * std::log1p(quarter));
  double sum = 0.0;
  for (std::size_t i = 0; i < selections.size(); ++i) {
    sum += terms[i];
    report.per_selection.push_back({selections[i], terms[i]});
  }
  report.bound_mean = sum / static_cast<double>(selections.size());
  return report;
}

double intra_block_identity_distance(const Frame& frame) {
  const CorrelationMatrix c = squared_correlation_matrix(frame);
  const int nv = frame.blocks().block_size;
  double acc = 0.0;
  for (int g = 0; g < frame.blocks().num_blocks; ++g)
    for (int a = 0; a < nv; ++a)
      for (int b = 0; b < nv; ++b) {
        const double d = c(g * nv + a, g * nv + b) - (a == b ? 1.0 : 0.0);
        acc += d * d;
      }
  return std::sqrt(acc);
}

double desired_epsilon(int n, int m, int num_blocks) {
  if (num_blocks < 1 || n % num_blocks != 0)
    throw ValidationError("desired_epsilon: N_B=" + std::to_string(num_blocks) + " does not divide N=" +
                          std::to_string(n));
  if (n <= m) throw ValidationError("desired_epsilon: need N > M");
  const double nv = static_cast<double>(n / num_blocks);
  const double factor = num_blocks == 1 ? 1.0 : 1.0 + (nv - 1.0) / (nv * (num_blocks - 1));
  return factor * welch_bounds(n, m).epsilon_wb;
}

StructureDeviation desired_structure_deviation(const Frame& frame) {
  const CorrelationMatrix c = squared_correlation_matrix(frame);
  const int nv = frame.blocks().block_size;
  const int n = static_cast<int>(frame.n());
  const double eps = frame.blocks().num_blocks > 1
                         ? desired_epsilon(n, static_cast<int>(frame.m()), frame.blocks().num_blocks)
                         : 0.0;
  double intra = 0.0, inter = 0.0;
  long intra_count = 0, inter_count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (i / nv == j / nv) {
        intra += c(i, j) * c(i, j);
        ++intra_count;
      } else {
        const double d = c(i, j) - eps;
        inter += d * d;
        ++inter_count;
      }
    }
  StructureDeviation out;
  out.intra_rms = intra_count ? std::sqrt(intra / intra_count) : 0.0;
  out.inter_rms_error = inter_count ? std::sqrt(inter / inter_count) : 0.0;
  return out;
}

}  // namespace blockframe
