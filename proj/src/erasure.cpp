#include "blockframe/erasure.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "blockframe/error.hpp"
#include "blockframe/text.hpp"

namespace blockframe {

std::string Selection::to_string() const { return text::join(active); }

Ratios ratios(const BlockModel& model, int m) {
  if (m < 1) throw ValidationError("ratios: M must be positive");
  const double n = model.total_columns();
  const double k = model.active_columns();
  return {static_cast<double>(model.active_blocks) / model.num_blocks, m / n, k / m};
}

std::optional<std::uint64_t> binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (int i = 1; i <= k; ++i) {
    // acc · (n-k+i) / i stays integral at each step.
    acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

std::vector<Selection> enumerate_selections(const BlockModel& model) {
  model.validate();
  const auto count = binomial(model.num_blocks, model.active_blocks);
  if (!count)
    throw InfeasibleError("enumerate_selections: C(" + std::to_string(model.num_blocks) + ", " +
                          std::to_string(model.active_blocks) +
                          ") does not fit in 64 bits; use Monte Carlo sampling instead");
  std::vector<Selection> out;
  out.reserve(*count);
  const int k = model.active_blocks, n = model.num_blocks;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(Selection{idx});
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Selection sample_selection(const BlockModel& model, Rng& rng) {
  model.validate();
  // Partial Fisher-Yates; the first N_A slots are a uniform N_A-subset.
  std::vector<int> pool(model.num_blocks);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < model.active_blocks; ++i) {
    std::uniform_int_distribution<int> pick(i, model.num_blocks - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(model.active_blocks);
  std::sort(pool.begin(), pool.end());
  return Selection{std::move(pool)};
}

std::vector<int> selection_columns(const BlockModel& model, const Selection& selection) {
  std::vector<int> cols;
  cols.reserve(selection.active.size() * model.block_size);
  int previous = -1;
  for (int b : selection.active) {
    if (b < 0 || b >= model.num_blocks)
      throw ValidationError("selection: block " + std::to_string(b) + " out of range [0, " +
                            std::to_string(model.num_blocks - 1) + "]");
    if (b <= previous) throw ValidationError("selection: blocks must be strictly ascending");
    previous = b;
    for (int c = 0; c < model.block_size; ++c) cols.push_back(b * model.block_size + c);
  }
  return cols;
}

CMatrix subframe(const Frame& frame, const Selection& selection) {
  const std::vector<int> cols = selection_columns(frame.blocks(), selection);
  if (static_cast<int>(selection.active.size()) != frame.blocks().active_blocks)
    throw ValidationError("subframe: selection has " + std::to_string(selection.active.size()) +
                          " blocks, block model expects " +
                          std::to_string(frame.blocks().active_blocks));
  CMatrix out(frame.m(), cols.size());
  for (std::size_t r = 0; r < frame.m(); ++r)
    for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = frame.entries()(r, cols[j]);
  return out;
}

bool uses_enumeration(const BlockModel& model, const EvaluationMode& mode) {
  if (mode.force_monte_carlo) return false;
  const auto count = binomial(model.num_blocks, model.active_blocks);
  return count && *count <= EvaluationMode::kExhaustiveThreshold;
}

std::vector<Selection> selections_for(const BlockModel& model, const EvaluationMode& mode) {
  if (uses_enumeration(model, mode)) return enumerate_selections(model);
  if (mode.samples == 0) throw ValidationError("Monte Carlo evaluation needs a positive sample count");
  Rng rng(mode.seed);
  std::vector<Selection> out;
  out.reserve(mode.samples);
  for (std::uint64_t i = 0; i < mode.samples; ++i) out.push_back(sample_selection(model, rng));
  return out;
}

}  // namespace blockframe
