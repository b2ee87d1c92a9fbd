#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "blockframe/erasure.hpp"
#include "blockframe/frames.hpp"
#include "blockframe/metrics.hpp"

namespace blockframe {

enum class SearchMode { Exhaustive, Stochastic };
enum class Neighborhood { ColumnSwap, RowSwap, Both };
enum class RowSetPolicy { Fixed, Free };

std::string_view to_string(SearchMode mode);
std::string_view to_string(Neighborhood neighborhood);
SearchMode parse_search_mode(std::string_view text);
Neighborhood parse_neighborhood(std::string_view text);

/// Simulated annealing with geometric cooling, several restarts, and a
/// first-improvement descent from each restart's best state.
struct StochasticOptions {
  int restarts = 4;
  int iterations_per_restart = 2000;
  std::uint64_t seed = 1;
  Neighborhood neighborhood = Neighborhood::Both;
  double initial_temperature = 1.0;  // bits
  double cooling = 0.995;            // per iteration
  int descent_passes = 4;            // 0 disables the final descent
};

struct SearchConfig {
  ChannelParams channel{1000.0};
  SearchMode mode = SearchMode::Stochastic;
  StochasticOptions stochastic;
  RowSetPolicy row_set_policy = RowSetPolicy::Fixed;
  /// Selections averaged by the objective.
  EvaluationMode evaluation;
  /// Starting points for the first restarts (e.g. a difference-set frame in
  /// a BUTF search). Later restarts start at random states.
  std::vector<FrameSpec> initial_specs;
  /// Largest search space exhaustive mode accepts.
  std::uint64_t exhaustive_cap = 10'000'000;
};

struct TracePoint {
  std::uint64_t iteration = 0;
  double objective = 0.0;
};

struct RestartOutcome {
  int restart = 0;
  FrameSpec best_spec;
  double best_objective = 0.0;
  std::uint64_t evaluations = 0;
  std::vector<TracePoint> trace;
};

struct SearchResult {
  FrameSpec best_spec;
  double best_objective = 0.0;
  std::vector<TracePoint> trace;  // of the winning restart
  std::uint64_t evaluations = 0;  // over all restarts
  std::vector<RestartOutcome> restarts;
};

/// Resume support: restarts listed in `completed` are reused instead of
/// rerun; `on_restart` fires after each newly finished restart (possibly
/// from a worker thread).
struct SearchHooks {
  std::vector<RestartOutcome> completed;
  std::function<void(const RestartOutcome&)> on_restart;
};

/// N! / ((N_v!)^N_B · N_B!), the number of ways to split N columns into N_B
/// unlabeled blocks of N_v; nullopt when above 2^63. Throws ValidationError
/// unless N_B divides N.
std::optional<std::uint64_t> canonical_partition_count(int n, int num_blocks);
/// log10 of the same count, for sizes past 2^63.
double canonical_partition_log10(int n, int num_blocks);

/// Sorts each block's columns, orders blocks by their smallest column and
/// sorts the row set. The capacity objective is unchanged.
FrameSpec canonicalize(const FrameSpec& spec);

/// Average capacity (bits) of the frame a spec builds, via the log-det route.
double capacity_objective(const FrameSpec& spec, const ChannelParams& channel,
                          const EvaluationMode& mode = {});

/// Best column permutation for a fixed row set (Permuted ETF).
SearchResult search_petf(BaseKind base, const DifferenceSet& rows, const BlockModel& blocks,
                         const SearchConfig& config, SearchHooks* hooks = nullptr);

/// Best row set and permutation jointly (block unit tight frame).
SearchResult search_butf(BaseKind base, const BlockModel& blocks, int m, const SearchConfig& config,
                         SearchHooks* hooks = nullptr);

}  // namespace blockframe
