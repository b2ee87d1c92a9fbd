#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "blockframe/block_model.hpp"
#include "blockframe/frames.hpp"

namespace blockframe {

/// Active block indices of one erasure realization, ascending.
struct Selection {
  std::vector<int> active;

  std::string to_string() const;  // "0,2"
  friend auto operator<=>(const Selection&, const Selection&) = default;
};

struct Ratios {
  double p = 0.0;      ///< non-erasure probability N_A / N_B
  double gamma = 0.0;  ///< frame aspect M / N
  double beta = 0.0;   ///< subframe aspect K / M
};

Ratios ratios(const BlockModel& model, int m);

/// C(n, k), or nullopt if it does not fit in 64 bits.
std::optional<std::uint64_t> binomial(int n, int k);

/// All C(N_B, N_A) selections in lexicographic order. Throws InfeasibleError
/// when the count overflows 64 bits.
std::vector<Selection> enumerate_selections(const BlockModel& model);

/// Deterministic generator used for sampling and search.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; derives independent per-worker/per-restart seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Uniform over all C(N_B, N_A) selections.
Selection sample_selection(const BlockModel& model, Rng& rng);

/// Concatenation of the selected blocks, ascending block order; block i spans
/// columns [i·N_v, (i+1)·N_v). Throws ValidationError on a bad selection.
CMatrix subframe(const Frame& frame, const Selection& selection);

/// Column indices induced by a selection.
std::vector<int> selection_columns(const BlockModel& model, const Selection& selection);

/// Evaluators enumerate every selection when C(N_B, N_A) <= threshold and
/// otherwise draw `samples` selections from `seed`. `force_monte_carlo`
/// samples even when enumeration is affordable.
struct EvaluationMode {
  static constexpr std::uint64_t kExhaustiveThreshold = 100000;

  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  bool force_monte_carlo = false;

  static EvaluationMode monte_carlo(std::uint64_t samples, std::uint64_t seed) {
    return EvaluationMode{samples, seed, true};
  }
};

/// True when `mode` resolves to exhaustive enumeration for `model`.
bool uses_enumeration(const BlockModel& model, const EvaluationMode& mode);

/// The selections an evaluator averages over, with equal weight each.
std::vector<Selection> selections_for(const BlockModel& model, const EvaluationMode& mode);

}  // namespace blockframe
