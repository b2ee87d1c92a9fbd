#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "blockframe/frames.hpp"

namespace blockframe {

struct CatalogEntry {
  std::string name;
  DifferenceSet difference_set;
  BaseKind base = BaseKind::Hadamard;
  /// Near-ETF row set that is not an exact difference set.
  bool almost = false;
  /// Largest off-diagonal squared correlation of the row-selection frame.
  double max_sq_corr = 0.0;
  std::string provenance;
  std::string notes;
};

/// Parses and validates a catalog file. Errors carry "path:line: ..." for
/// the offending entry. An empty file yields an empty list.
std::vector<CatalogEntry> load_catalog(const std::filesystem::path& path);
std::vector<CatalogEntry> parse_catalog(const std::string& text, const std::string& origin = "<catalog>");

std::string catalog_to_json(const std::vector<CatalogEntry>& entries);

/// Directory holding the bundled catalog (BLOCKFRAME_DATA_DIR at run time,
/// otherwise the source tree's data directory).
std::filesystem::path default_catalog_path();

const CatalogEntry& find_entry(const std::vector<CatalogEntry>& entries, const std::string& name);

/// |<f_n, f_k>|^2 of the frame built from `rows`, indexed by the group
/// difference of n and k. Element 0 is 1.
std::vector<double> correlation_profile(BaseKind base, int n, const std::vector<int>& rows);

double max_squared_correlation(BaseKind base, int n, const std::vector<int>& rows);

struct DifferenceSetSearch {
  std::vector<std::vector<int>> sets;
  /// Why the result is empty without searching (necessary condition fails).
  std::optional<std::string> reason;
};

/// All (N, M, λ) difference sets up to translation, each containing 0.
/// Throws InfeasibleError for N > 32 or more than 5·10^7 candidates.
DifferenceSetSearch find_difference_sets(GroupKind group, int n, int m);

struct AlmostSearchOptions {
  std::uint64_t seed = 1;
  int restarts = 8;
  int iterations = 20000;
};

struct AlmostSet {
  std::vector<int> elements;
  double max_sq_corr = 0.0;
  double sum_sq_corr_sq = 0.0;
};

/// Local search over M-subsets for a small largest squared correlation,
/// breaking ties by the sum of squared squared correlations.
AlmostSet find_almost_set(BaseKind base, int n, int m, const AlmostSearchOptions& options = {});

}  // namespace blockframe
