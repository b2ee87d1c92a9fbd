#include "blockframe/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <mutex>
#include <unordered_map>

#include "blockframe/capacity_engine.hpp"
#include "blockframe/error.hpp"
#include "blockframe/parallel.hpp"

namespace blockframe {

std::string_view to_string(SearchMode mode) {
  return mode == SearchMode::Exhaustive ? "exhaustive" : "stochastic";
}

std::string_view to_string(Neighborhood nb) {
  switch (nb) {
    case Neighborhood::ColumnSwap:
      return "column";
    case Neighborhood::RowSwap:
      return "row";
    case Neighborhood::Both:
      return "both";
  }
  return "unknown";
}

SearchMode parse_search_mode(std::string_view text) {
  if (text == "exhaustive") return SearchMode::Exhaustive;
  if (text == "stochastic") return SearchMode::Stochastic;
  throw ValidationError("unknown search mode '" + std::string(text) + "' (expected exhaustive|stochastic)");
}

Neighborhood parse_neighborhood(std::string_view text) {
  if (text == "column") return Neighborhood::ColumnSwap;
  if (text == "row") return Neighborhood::RowSwap;
  if (text == "both") return Neighborhood::Both;
  throw ValidationError("unknown neighborhood '" + std::string(text) + "' (expected column|row|both)");
}

std::optional<std::uint64_t> canonical_partition_count(int n, int num_blocks) {
  if (num_blocks < 1 || n < 1 || n % num_blocks != 0)
    throw ValidationError("canonical_partition_count: N_B=" + std::to_string(num_blocks) +
                          " must divide N=" + std::to_string(n));
  const int nv = n / num_blocks;
  constexpr unsigned __int128 kLimit = static_cast<unsigned __int128>(1) << 63;
  unsigned __int128 total = 1;
  // The block holding the smallest unassigned column picks its N_v - 1
  // partners from the rest.
  for (int i = 0; i < num_blocks; ++i) {
    const auto c = binomial(n - i * nv - 1, nv - 1);
    if (!c) return std::nullopt;
    total *= *c;
    if (total > kLimit) return std::nullopt;
  }
  return static_cast<std::uint64_t>(total);
}

double canonical_partition_log10(int n, int num_blocks) {
  if (num_blocks < 1 || n < 1 || n % num_blocks != 0)
    throw ValidationError("canonical_partition_log10: N_B must divide N");
  const int nv = n / num_blocks;
  return (std::lgamma(n + 1.0) - num_blocks * std::lgamma(nv + 1.0) - std::lgamma(num_blocks + 1.0)) /
         std::numbers::ln10;
}

FrameSpec canonicalize(const FrameSpec& spec) {
  const int nv = spec.blocks.block_size;
  std::vector<std::vector<int>> blocks(spec.blocks.num_blocks);
  for (int b = 0; b < spec.blocks.num_blocks; ++b) {
    blocks[b].assign(spec.permutation.begin() + b * nv, spec.permutation.begin() + (b + 1) * nv);
    std::sort(blocks[b].begin(), blocks[b].end());
  }
  std::sort(blocks.begin(), blocks.end());
  FrameSpec out = spec;
  out.permutation.clear();
  for (const auto& b : blocks) out.permutation.insert(out.permutation.end(), b.begin(), b.end());
  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

double capacity_objective(const FrameSpec& spec, const ChannelParams& channel, const EvaluationMode& mode) {
  return average_capacity_logdet(construct_frame(spec), channel.snr_linear(), mode);
}

namespace {

constexpr double kTieTolerance = 1e-12;

struct Problem {
  BaseKind base;
  int n;
  int m;
  BlockModel blocks;
  double snr;
  std::vector<Selection> selections;
  std::vector<std::vector<int>> selection_cols;    // column positions per selection
  std::vector<std::vector<std::size_t>> by_block;  // selections containing each block
};

Problem make_problem(BaseKind base, int n, int m, const BlockModel& blocks, const SearchConfig& config) {
  Problem p{base, n, m, blocks, config.channel.snr_linear(), selections_for(blocks, config.evaluation), {}, {}};
  p.by_block.resize(blocks.num_blocks);
  for (std::size_t i = 0; i < p.selections.size(); ++i) {
    p.selection_cols.push_back(selection_columns(blocks, p.selections[i]));
    for (int b : p.selections[i].active) p.by_block[b].push_back(i);
  }
  return p;
}

GramPlanes rows_gram(const Problem& p, const std::vector<int>& rows) {
  FrameSpec s{p.base, p.n, p.m, rows, identity_permutation(p.n), BlockModel{1, p.n, 1}};
  return GramPlanes::of(construct_frame(s).entries());
}

bool spec_less(const FrameSpec& a, const FrameSpec& b) {
  if (a.rows != b.rows) return a.rows < b.rows;
  return a.permutation < b.permutation;
}

// Annealing state: the Gram of the unpermuted row selection plus one
// log-determinant per selection. The objective is recomputed by summing the
// cached values in selection order, so it matches a from-scratch evaluation
// bit for bit.
class Chain {
 public:
  Chain(const Problem& p, std::vector<int> rows, std::vector<int> perm)
      : p_(&p), rows_(std::move(rows)), perm_(std::move(perm)),
        engine_(static_cast<std::size_t>(p.blocks.active_columns()), p.snr) {
    gram_ = rows_gram(p, rows_);
    values_.resize(p.selections.size());
    std::vector<std::size_t> all(p.selections.size());
    std::iota(all.begin(), all.end(), 0);
    refresh(all);
  }

  double objective() const {
    double sum = 0.0;
    for (double v : values_) sum += v;
    return sum / std::numbers::ln2 / static_cast<double>(values_.size());
  }

  double try_swap_columns(int a, int b) {
    const int nv = p_->blocks.block_size;
    const auto& la = p_->by_block[a / nv];
    const auto& lb = p_->by_block[b / nv];
    touched_.clear();
    std::set_union(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(touched_));
    saved_.resize(touched_.size());
    for (std::size_t i = 0; i < touched_.size(); ++i) saved_[i] = values_[touched_[i]];
    std::swap(perm_[a], perm_[b]);
    last_ = {Move::Column, a, b};
    refresh(touched_);
    return objective();
  }

  double try_swap_row(int index, int row) {
    saved_gram_ = gram_;
    saved_ = values_;
    last_ = {Move::Row, index, rows_[index]};
    rows_[index] = row;
    gram_ = rows_gram(*p_, rows_);
    std::vector<std::size_t> all(values_.size());
    std::iota(all.begin(), all.end(), 0);
    refresh(all);
    return objective();
  }

  void undo() {
    if (last_.kind == Move::Column) {
      std::swap(perm_[last_.a], perm_[last_.b]);
      for (std::size_t i = 0; i < touched_.size(); ++i) values_[touched_[i]] = saved_[i];
    } else if (last_.kind == Move::Row) {
      rows_[last_.a] = last_.b;
      gram_ = std::move(saved_gram_);
      values_ = saved_;
    }
    last_.kind = Move::None;
  }

  const std::vector<int>& rows() const { return rows_; }
  const std::vector<int>& perm() const { return perm_; }
  std::uint64_t evaluations() const { return evaluations_; }

  FrameSpec spec() const { return FrameSpec{p_->base, p_->n, p_->m, rows_, perm_, p_->blocks}; }

 private:
  enum class Move { None, Column, Row };
  struct LastMove {
    Move kind = Move::None;
    int a = 0;
    int b = 0;
  };

  void refresh(const std::vector<std::size_t>& which) {
    const std::size_t k = engine_.set_size();
    sets_.resize(which.size() * k);
    for (std::size_t s = 0; s < which.size(); ++s) {
      const auto& cols = p_->selection_cols[which[s]];
      for (std::size_t c = 0; c < k; ++c) sets_[s * k + c] = perm_[cols[c]];
    }
    fresh_.resize(which.size());
    engine_.run(gram_, sets_, fresh_);
    for (std::size_t s = 0; s < which.size(); ++s) values_[which[s]] = fresh_[s];
    ++evaluations_;
  }

  const Problem* p_;
  std::vector<int> rows_;
  std::vector<int> perm_;
  SubsetLogdet engine_;
  GramPlanes gram_, saved_gram_;
  std::vector<double> values_, saved_, fresh_;
  std::vector<std::size_t> touched_;
  std::vector<int> sets_;
  LastMove last_;
  std::uint64_t evaluations_ = 0;
};

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm = identity_permutation(n);
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(perm[i], perm[pick(rng)]);
  }
  return perm;
}

std::vector<int> random_rows(int n, int m, Rng& rng) {
  std::vector<int> perm = random_permutation(n, rng);
  perm.resize(m);
  std::sort(perm.begin(), perm.end());
  return perm;
}

struct StartState {
  std::vector<int> rows;
  std::vector<int> perm;
};

RestartOutcome run_restart(const Problem& p, const SearchConfig& config, int restart, const StartState& start,
                           bool rows_free) {
  const StochasticOptions& opt = config.stochastic;
  Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(restart)));
  const int nv = p.blocks.block_size;
  const bool columns_matter = nv > 1 && p.blocks.num_blocks > 1;
  const bool allow_columns = columns_matter && opt.neighborhood != Neighborhood::RowSwap;
  const bool allow_rows = rows_free && opt.neighborhood != Neighborhood::ColumnSwap;

  Chain chain(p, start.rows, start.perm);
  RestartOutcome out;
  out.restart = restart;
  double current = chain.objective();
  double best = current;
  FrameSpec best_spec = chain.spec();
  out.trace.push_back({0, best});

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> any_col(0, p.n - 1);
  std::uniform_int_distribution<int> other_col(0, p.n - nv - 1);
  std::uniform_int_distribution<int> any_row_slot(0, p.m - 1);
  std::uniform_int_distribution<int> outside_row(0, p.n - p.m - 1);

  auto random_row_move = [&](const std::vector<int>& rows) {
    const int slot = any_row_slot(rng);
    int pick = outside_row(rng);
    // pick-th row not currently in the set
    std::vector<char> used(p.n, 0);
    for (int r : rows) used[r] = 1;
    int row = 0;
    for (; row < p.n; ++row)
      if (!used[row] && pick-- == 0) break;
    return std::pair{slot, row};
  };

  double temperature = opt.initial_temperature;
  if (allow_columns || allow_rows) {
    for (int it = 1; it <= opt.iterations_per_restart; ++it) {
      bool row_move = allow_rows && !allow_columns;
      if (allow_rows && allow_columns) row_move = opt.neighborhood == Neighborhood::RowSwap || it % 2 == 0;
      double proposed;
      if (row_move) {
        const auto [slot, row] = random_row_move(chain.rows());
        proposed = chain.try_swap_row(slot, row);
      } else {
        const int a = any_col(rng);
        int b = other_col(rng);
        if (b >= (a / nv) * nv) b += nv;  // skip a's own block
        proposed = chain.try_swap_columns(a, b);
      }
      const double delta = proposed - current;
      const bool accept = delta >= 0.0 || unit(rng) < std::exp(delta / temperature);
      if (accept) {
        current = proposed;
        if (current > best) {
          best = current;
          best_spec = chain.spec();
          out.trace.push_back({static_cast<std::uint64_t>(it), best});
        }
      } else {
        chain.undo();
      }
      temperature *= opt.cooling;
    }
  }

  // First-improvement descent from the best state.
  std::uint64_t evaluations = chain.evaluations();
  if (opt.descent_passes > 0 && (allow_columns || allow_rows)) {
    Chain descent(p, best_spec.rows, best_spec.permutation);
    double value = descent.objective();
    std::uint64_t step = static_cast<std::uint64_t>(opt.iterations_per_restart);
    for (int pass = 0; pass < opt.descent_passes; ++pass) {
      bool improved = false;
      if (allow_columns) {
        for (int a = 0; a < p.n; ++a)
          for (int b = (a / nv + 1) * nv; b < p.n; ++b) {
            const double v = descent.try_swap_columns(a, b);
            ++step;
            if (v > value + kTieTolerance) {
              value = v;
              improved = true;
            } else {
              descent.undo();
            }
          }
      }
      if (allow_rows) {
        for (int slot = 0; slot < p.m; ++slot)
          for (int row = 0; row < p.n; ++row) {
            if (std::find(descent.rows().begin(), descent.rows().end(), row) != descent.rows().end()) continue;
            const double v = descent.try_swap_row(slot, row);
            ++step;
            if (v > value + kTieTolerance) {
              value = v;
              improved = true;
            } else {
              descent.undo();
            }
          }
      }
      if (improved && value > best) {
        best = value;
        best_spec = descent.spec();
        out.trace.push_back({step, best});
      }
      if (!improved) break;
    }
    evaluations += descent.evaluations();
  }

  out.best_spec = canonicalize(best_spec);
  out.best_objective = capacity_objective(out.best_spec, config.channel, config.evaluation);
  out.evaluations = evaluations;
  return out;
}

SearchResult combine(std::vector<RestartOutcome> outcomes) {
  SearchResult result;
  std::size_t winner = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    result.evaluations += outcomes[i].evaluations;
    if (i == 0) continue;
    const double diff = outcomes[i].best_objective - outcomes[winner].best_objective;
    if (diff > kTieTolerance ||
        (std::abs(diff) <= kTieTolerance && spec_less(outcomes[i].best_spec, outcomes[winner].best_spec)))
      winner = i;
  }
  result.best_spec = outcomes[winner].best_spec;
  result.best_objective = outcomes[winner].best_objective;
  result.trace = outcomes[winner].trace;
  result.restarts = std::move(outcomes);
  return result;
}

SearchResult run_stochastic(const Problem& p, const SearchConfig& config, bool rows_free,
                            const std::function<StartState(int, Rng&)>& start_for, SearchHooks* hooks) {
  const int restarts = config.stochastic.restarts;
  if (restarts < 1) throw ValidationError("stochastic search: need at least one restart");
  if (config.stochastic.iterations_per_restart < 0)
    throw ValidationError("stochastic search: iteration count must be nonnegative");
  std::vector<std::optional<RestartOutcome>> done(restarts);
  if (hooks)
    for (const RestartOutcome& r : hooks->completed)
      if (r.restart >= 0 && r.restart < restarts) done[r.restart] = r;

  std::mutex hook_mutex;
  auto outcomes = parallel_map(static_cast<std::size_t>(restarts), [&](std::size_t r) {
    if (done[r]) return *done[r];
    // Start states draw from their own stream so they do not depend on the
    // annealing stream.
    Rng init_rng(derive_seed(config.stochastic.seed ^ 0x5bd1e995ULL, r));
    RestartOutcome outcome = run_restart(p, config, static_cast<int>(r), start_for(static_cast<int>(r), init_rng),
                                         rows_free);
    if (hooks && hooks->on_restart) {
      std::lock_guard lock(hook_mutex);
      hooks->on_restart(outcome);
    }
    return outcome;
  });
  return combine(std::move(outcomes));
}

// Exhaustive search over canonical partitions for one row set. Capacities of
// block unions are memoized by column bitmask.
class PartitionSearch {
 public:
  PartitionSearch(const Problem& p, const std::vector<int>& rows)
      : p_(p), rows_(rows), gram_(rows_gram(p, rows)),
        engine_(static_cast<std::size_t>(p.blocks.active_columns()), p.snr) {
    if (p.n <= 20) dense_.assign(std::size_t{1} << p.n, std::numeric_limits<double>::quiet_NaN());
  }

  // Visits partitions in lexicographic order of the canonical permutation.
  void run(double& best, FrameSpec& best_spec, std::vector<TracePoint>& trace, std::uint64_t& counter) {
    const int nv = p_.blocks.block_size;
    perm_.assign(p_.n, -1);
    used_.assign(p_.n, 0);
    block_masks_.assign(p_.blocks.num_blocks, 0);
    recurse(0, nv, best, best_spec, trace, counter);
  }

 private:
  void recurse(int block, int nv, double& best, FrameSpec& best_spec, std::vector<TracePoint>& trace,
               std::uint64_t& counter) {
    if (block == p_.blocks.num_blocks) {
      ++counter;
      const double v = score();
      if (v > best + kTieTolerance) {
        best = v;
        best_spec = FrameSpec{p_.base, p_.n, p_.m, rows_, perm_, p_.blocks};
        trace.push_back({counter, best});
      }
      return;
    }
    int first = 0;
    while (used_[first]) ++first;
    used_[first] = 1;
    perm_[block * nv] = first;
    choose(block, nv, 1, first + 1, std::uint64_t{1} << first, best, best_spec, trace, counter);
    used_[first] = 0;
  }

  void choose(int block, int nv, int filled, int from, std::uint64_t mask, double& best, FrameSpec& best_spec,
              std::vector<TracePoint>& trace, std::uint64_t& counter) {
    if (filled == nv) {
      block_masks_[block] = mask;
      recurse(block + 1, nv, best, best_spec, trace, counter);
      return;
    }
    for (int c = from; c < p_.n; ++c) {
      if (used_[c]) continue;
      used_[c] = 1;
      perm_[block * nv + filled] = c;
      choose(block, nv, filled + 1, c + 1, mask | (std::uint64_t{1} << c), best, best_spec, trace, counter);
      used_[c] = 0;
    }
  }

  double score() {
    double sum = 0.0;
    for (const Selection& s : p_.selections) {
      std::uint64_t mask = 0;
      for (int b : s.active) mask |= block_masks_[b];
      sum += lookup(mask);
    }
    return sum / std::numbers::ln2 / static_cast<double>(p_.selections.size());
  }

  double lookup(std::uint64_t mask) {
    if (!dense_.empty()) {
      double& slot = dense_[mask];
      if (std::isnan(slot)) slot = compute(mask);
      return slot;
    }
    auto it = sparse_.find(mask);
    if (it != sparse_.end()) return it->second;
    const double v = compute(mask);
    sparse_.emplace(mask, v);
    return v;
  }

  double compute(std::uint64_t mask) {
    std::vector<int> idx;
    for (int c = 0; c < p_.n; ++c)
      if (mask >> c & 1) idx.push_back(c);
    double out = 0.0;
    engine_.run(gram_, idx, std::span<double>(&out, 1));
    return out;
  }

  const Problem& p_;
  std::vector<int> rows_;
  GramPlanes gram_;
  SubsetLogdet engine_;
  std::vector<double> dense_;
  std::unordered_map<std::uint64_t, double> sparse_;
  std::vector<int> perm_;
  std::vector<char> used_;
  std::vector<std::uint64_t> block_masks_;
};

std::string space_size_text(std::optional<std::uint64_t> v, double log10_size) {
  if (v) return std::to_string(*v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "about 10^%.1f", log10_size);
  return buf;
}

double log10_binomial(int n, int k) {
  return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / std::numbers::ln10;
}

SearchResult finish_exhaustive(const SearchConfig& config, FrameSpec best_spec, std::vector<TracePoint> trace,
                               std::uint64_t evaluations, SearchHooks* hooks) {
  RestartOutcome outcome;
  outcome.restart = 0;
  outcome.best_spec = canonicalize(best_spec);
  outcome.best_objective = capacity_objective(outcome.best_spec, config.channel, config.evaluation);
  outcome.evaluations = evaluations;
  outcome.trace = std::move(trace);
  if (hooks && hooks->on_restart) hooks->on_restart(outcome);
  return combine({outcome});
}

void check_exhaustive_size(std::optional<std::uint64_t> size, double log10_size, const SearchConfig& config,
                           std::string_view what) {
  if (!size || *size > config.exhaustive_cap)
    throw InfeasibleError("exhaustive " + std::string(what) + " search space has " +
                          space_size_text(size, log10_size) +
                          " candidates (cap " + std::to_string(config.exhaustive_cap) +
                          "); use --mode stochastic");
}

}  // namespace

SearchResult search_petf(BaseKind base, const DifferenceSet& ds, const BlockModel& blocks, const SearchConfig& config,
                         SearchHooks* hooks) {
  if (config.row_set_policy != RowSetPolicy::Fixed)
    throw ValidationError("search_petf: the row set policy must be Fixed");
  if (group_for(base) != ds.group)
    throw ValidationError("search_petf: " + std::string(to_string(ds.group)) + " difference set does not match a " +
                          std::string(to_string(base)) + " base matrix");
  const int n = blocks.total_columns();
  if (ds.order != n)
    throw ValidationError("search_petf: difference set order " + std::to_string(ds.order) + " differs from N=" +
                          std::to_string(n));
  std::vector<int> rows = ds.elements;
  std::sort(rows.begin(), rows.end());
  const int m = static_cast<int>(rows.size());
  FrameSpec canonical{base, n, m, rows, identity_permutation(n), blocks};
  canonical.validate();
  const Problem p = make_problem(base, n, m, blocks, config);

  if (blocks.block_size == 1 || blocks.num_blocks == 1) {
    // The objective does not depend on the permutation.
    return finish_exhaustive(config, canonical, {}, 1, hooks);
  }

  if (config.mode == SearchMode::Exhaustive) {
    if (n > 64) throw InfeasibleError("exhaustive search supports N <= 64");
    check_exhaustive_size(canonical_partition_count(n, blocks.num_blocks),
                          canonical_partition_log10(n, blocks.num_blocks), config, "partition");
    double best = -std::numeric_limits<double>::infinity();
    FrameSpec best_spec = canonical;
    std::vector<TracePoint> trace;
    std::uint64_t counter = 0;
    PartitionSearch(p, rows).run(best, best_spec, trace, counter);
    return finish_exhaustive(config, best_spec, std::move(trace), counter, hooks);
  }

  auto start_for = [&](int r, Rng& rng) {
    if (static_cast<std::size_t>(r) < config.initial_specs.size()) {
      const FrameSpec& s = config.initial_specs[r];
      if (s.rows != rows && canonicalize(s).rows != rows)
        throw ValidationError("search_petf: initial spec uses a different row set");
      return StartState{rows, s.permutation};
    }
    if (r == 0) return StartState{rows, identity_permutation(n)};
    return StartState{rows, random_permutation(n, rng)};
  };
  return run_stochastic(p, config, false, start_for, hooks);
}

SearchResult search_butf(BaseKind base, const BlockModel& blocks, int m, const SearchConfig& config,
                         SearchHooks* hooks) {
  if (config.row_set_policy != RowSetPolicy::Free)
    throw ValidationError("search_butf: the row set policy must be Free");
  const int n = blocks.total_columns();
  FrameSpec probe{base, n, m, identity_permutation(m), identity_permutation(n), blocks};
  probe.validate();
  const Problem p = make_problem(base, n, m, blocks, config);

  if (config.mode == SearchMode::Exhaustive) {
    if (n > 64) throw InfeasibleError("exhaustive search supports N <= 64");
    const auto row_sets = binomial(n, m);
    const bool trivial_columns = blocks.block_size == 1 || blocks.num_blocks == 1;
    const auto partitions = trivial_columns ? std::optional<std::uint64_t>(1)
                                            : canonical_partition_count(n, blocks.num_blocks);
    std::optional<std::uint64_t> total;
    if (row_sets && partitions && (*partitions == 0 || *row_sets <= std::numeric_limits<std::uint64_t>::max() / *partitions))
      total = *row_sets * *partitions;
    const double log10_total =
        log10_binomial(n, m) + (trivial_columns ? 0.0 : canonical_partition_log10(n, blocks.num_blocks));
    check_exhaustive_size(total, log10_total, config, "row-set x partition");

    double best = -std::numeric_limits<double>::infinity();
    FrameSpec best_spec = probe;
    std::vector<TracePoint> trace;
    std::uint64_t counter = 0;
    std::vector<int> rows = identity_permutation(m);
    while (true) {
      if (trivial_columns) {
        ++counter;
        const FrameSpec s{base, n, m, rows, identity_permutation(n), blocks};
        const double v = capacity_objective(s, config.channel, config.evaluation);
        if (v > best + kTieTolerance) {
          best = v;
          best_spec = s;
          trace.push_back({counter, best});
        }
      } else {
        PartitionSearch(p, rows).run(best, best_spec, trace, counter);
      }
      int i = m - 1;
      while (i >= 0 && rows[i] == n - m + i) --i;
      if (i < 0) break;
      ++rows[i];
      for (int j = i + 1; j < m; ++j) rows[j] = rows[j - 1] + 1;
    }
    return finish_exhaustive(config, best_spec, std::move(trace), counter, hooks);
  }

  auto start_for = [&](int r, Rng& rng) {
    if (static_cast<std::size_t>(r) < config.initial_specs.size()) {
      const FrameSpec& s = config.initial_specs[r];
      if (s.n != n || s.m != m) throw ValidationError("search_butf: initial spec has a different shape");
      return StartState{s.rows, s.permutation};
    }
    std::vector<int> rows = random_rows(n, m, rng);
    return StartState{rows, random_permutation(n, rng)};
  };
  return run_stochastic(p, config, true, start_for, hooks);
}

}  // namespace blockframe
