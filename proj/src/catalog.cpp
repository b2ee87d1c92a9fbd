#include "blockframe/catalog.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "blockframe/erasure.hpp"
#include "blockframe/error.hpp"
#include "json.hpp"

#ifndef BLOCKFRAME_DEFAULT_DATA_DIR
#define BLOCKFRAME_DEFAULT_DATA_DIR "data"
#endif

namespace blockframe {

namespace {

using json = nlohmann::ordered_json;

constexpr double kRecordedCorrTolerance = 1e-9;

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line numbers of the objects inside the top-level "entries" array, in order.
std::vector<int> entry_lines(const std::string& text) {
  std::vector<int> lines;
  std::vector<char> stack;
  bool in_string = false;
  bool escaped = false;
  std::string last_key, current;
  std::string pending_key;
  bool entries_array_open = false;
  std::size_t entries_depth = 0;
  int line = 1;
  for (char c : text) {
    if (c == '\n') ++line;
    if (in_string) {
      if (escaped) {
        escaped = false;
        current += c;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
        last_key = current;
      } else {
        current += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_string = true;
        current.clear();
        break;
      case ':':
        pending_key = last_key;
        break;
      case '{':
        if (entries_array_open && stack.size() == entries_depth) lines.push_back(line);
        stack.push_back('{');
        break;
      case '[':
        stack.push_back('[');
        if (stack.size() == 2 && pending_key == "entries") {
          entries_array_open = true;
          entries_depth = stack.size();
        }
        break;
      case '}':
      case ']':
        if (!stack.empty()) {
          if (entries_array_open && stack.size() == entries_depth && c == ']') entries_array_open = false;
          stack.pop_back();
        }
        break;
      case ',':
        pending_key.clear();
        break;
      default:
        break;
    }
  }
  return lines;
}

class EntryError {
 public:
  EntryError(std::string origin, int line, std::string name)
      : origin_(std::move(origin)), line_(line), name_(std::move(name)) {}

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << origin_ << ":" << line_ << ": ";
    if (!name_.empty()) os << "entry '" << name_ << "': ";
    os << what;
    throw ValidationError(os.str());
  }

  void set_name(std::string name) { name_ = std::move(name); }

 private:
  std::string origin_;
  int line_;
  std::string name_;
};

const json& require(const json& obj, const char* key, const EntryError& err) {
  auto it = obj.find(key);
  if (it == obj.end()) err.fail(std::string("missing field '") + key + "'");
  return *it;
}

int require_int(const json& obj, const char* key, const EntryError& err) {
  const json& v = require(obj, key, err);
  if (!v.is_number_integer()) err.fail(std::string("field '") + key + "' must be an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    err.fail(std::string("field '") + key + "' is out of range");
  return static_cast<int>(x);
}

std::string require_string(const json& obj, const char* key, const EntryError& err) {
  const json& v = require(obj, key, err);
  if (!v.is_string()) err.fail(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

CatalogEntry parse_entry(const json& obj, EntryError err) {
  if (!obj.is_object()) err.fail("entry must be an object");
  CatalogEntry e;
  e.name = require_string(obj, "name", err);
  if (e.name.empty()) err.fail("field 'name' must not be empty");
  err.set_name(e.name);

  static const std::set<std::string> known{"name",   "group",  "N",          "M",          "lambda",     "elements",
                                           "base",   "almost", "provenance", "notes",      "max_sq_corr"};
  for (const auto& item : obj.items())
    if (!known.count(item.key())) err.fail("unknown field '" + item.key() + "'");

  try {
    e.base = parse_base_kind(require_string(obj, "base", err));
    e.difference_set.group = parse_group_kind(require_string(obj, "group", err));
  } catch (const ValidationError& ex) {
    err.fail(ex.what());
  }
  if (e.difference_set.group != group_for(e.base))
    err.fail(std::string(to_string(e.difference_set.group)) + " group does not match a " +
             std::string(to_string(e.base)) + " base");
  e.difference_set.order = require_int(obj, "N", err);
  const int m = require_int(obj, "M", err);
  if (e.difference_set.order < 2) err.fail("N must be at least 2");
  if (m < 1 || m > e.difference_set.order) err.fail("M must lie in [1, N]");

  const json& elements = require(obj, "elements", err);
  if (!elements.is_array()) err.fail("field 'elements' must be an array");
  for (const json& x : elements) {
    if (!x.is_number_integer()) err.fail("elements must be integers");
    e.difference_set.elements.push_back(x.get<int>());
  }
  if (static_cast<int>(e.difference_set.elements.size()) != m)
    err.fail("M=" + std::to_string(m) + " but " + std::to_string(e.difference_set.elements.size()) +
             " elements listed");

  if (auto it = obj.find("almost"); it != obj.end()) {
    if (!it->is_boolean()) err.fail("field 'almost' must be a boolean");
    e.almost = it->get<bool>();
  }
  e.provenance = require_string(obj, "provenance", err);
  if (auto it = obj.find("notes"); it != obj.end()) {
    if (!it->is_string()) err.fail("field 'notes' must be a string");
    e.notes = it->get<std::string>();
  }

  DifferenceSetReport report;
  try {
    report = verify_difference_set(e.difference_set);
  } catch (const ValidationError& ex) {
    err.fail(ex.what());
  }
  std::sort(e.difference_set.elements.begin(), e.difference_set.elements.end());

  if (!e.almost) {
    const int claimed = require_int(obj, "lambda", err);
    if (!report.is_difference_set)
      err.fail("not a difference set (differences are not uniform); mark it \"almost\" if intended");
    if (*report.lambda != claimed)
      err.fail("claims lambda=" + std::to_string(claimed) + " but verification gives lambda=" +
               std::to_string(*report.lambda));
    e.difference_set.lambda = claimed;
  } else {
    if (obj.contains("lambda")) err.fail("an almost entry must not claim lambda");
    e.difference_set.lambda = 0;
  }

  e.max_sq_corr = max_squared_correlation(e.base, e.difference_set.order, e.difference_set.elements);
  if (auto it = obj.find("max_sq_corr"); it != obj.end()) {
    if (!it->is_number()) err.fail("field 'max_sq_corr' must be a number");
    const double recorded = it->get<double>();
    if (std::abs(recorded - e.max_sq_corr) > kRecordedCorrTolerance)
      err.fail("recorded max_sq_corr " + std::to_string(recorded) + " differs from computed " +
               std::to_string(e.max_sq_corr));
  }
  return e;
}

// chi[d][s]: the character value whose sum over the row set gives the
// (unnormalized) inner product of columns that differ by d.
std::vector<std::vector<std::complex<double>>> character_table(BaseKind base, int n) {
  std::vector<std::vector<std::complex<double>>> chi(n, std::vector<std::complex<double>>(n));
  for (int d = 0; d < n; ++d)
    for (int s = 0; s < n; ++s) {
      if (base == BaseKind::Hadamard) {
        chi[d][s] = (std::popcount(static_cast<unsigned>(s & d)) % 2) ? -1.0 : 1.0;
      } else {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long long>(s) * d) % n) / n;
        chi[d][s] = std::polar(1.0, angle);
      }
    }
  return chi;
}

void check_base_size(BaseKind base, int n) {
  if (n < 1) throw ValidationError("N must be positive");
  if (base == BaseKind::Hadamard && !std::has_single_bit(static_cast<unsigned>(n)))
    throw ValidationError("Hadamard base needs N to be a power of two, got " + std::to_string(n));
}

}  // namespace

std::vector<CatalogEntry> parse_catalog(const std::string& text, const std::string& origin) {
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) return {};
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    const std::size_t byte = ex.byte > 0 ? ex.byte - 1 : 0;
    throw ValidationError(origin + ":" + std::to_string(line_of_offset(text, byte)) + ": malformed JSON: " +
                          ex.what());
  }
  if (!doc.is_object()) throw ValidationError(origin + ":1: catalog must be a JSON object");
  const auto version = doc.find("version");
  if (version == doc.end() || !version->is_number_integer() || version->get<int>() != 1)
    throw ValidationError(origin + ":1: unsupported or missing catalog version (expected 1)");
  const auto entries = doc.find("entries");
  if (entries == doc.end() || !entries->is_array())
    throw ValidationError(origin + ":1: field 'entries' must be an array");

  const std::vector<int> lines = entry_lines(text);
  std::vector<CatalogEntry> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < entries->size(); ++i) {
    const int line = i < lines.size() ? lines[i] : 1;
    CatalogEntry e = parse_entry((*entries)[i], EntryError(origin, line, ""));
    if (!names.insert(e.name).second)
      EntryError(origin, line, e.name).fail("duplicate name");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CatalogEntry> load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open catalog " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_catalog(buffer.str(), path.string());
}

std::string catalog_to_json(const std::vector<CatalogEntry>& entries) {
  json doc;
  doc["version"] = 1;
  doc["entries"] = json::array();
  for (const CatalogEntry& e : entries) {
    json j;
    j["name"] = e.name;
    j["group"] = std::string(to_string(e.difference_set.group));
    j["N"] = e.difference_set.order;
    j["M"] = e.difference_set.elements.size();
    if (!e.almost) j["lambda"] = e.difference_set.lambda;
    j["elements"] = e.difference_set.elements;
    j["base"] = std::string(to_string(e.base));
    j["almost"] = e.almost;
    if (e.almost) j["max_sq_corr"] = e.max_sq_corr;
    j["provenance"] = e.provenance;
    if (!e.notes.empty()) j["notes"] = e.notes;
    doc["entries"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::filesystem::path default_catalog_path() {
  if (const char* dir = std::getenv("BLOCKFRAME_DATA_DIR"); dir && *dir)
    return std::filesystem::path(dir) / "catalog.json";
  return std::filesystem::path(BLOCKFRAME_DEFAULT_DATA_DIR) / "catalog.json";
}

const CatalogEntry& find_entry(const std::vector<CatalogEntry>& entries, const std::string& name) {
  for (const CatalogEntry& e : entries)
    if (e.name == name) return e;
  throw ValidationError("no catalog entry named '" + name + "'");
}

std::vector<double> correlation_profile(BaseKind base, int n, const std::vector<int>& rows) {
  check_base_size(base, n);
  if (rows.empty()) throw ValidationError("row set must not be empty");
  for (int r : rows)
    if (r < 0 || r >= n) throw ValidationError("row " + std::to_string(r) + " outside [0, N)");
  const auto chi = character_table(base, n);
  const double m2 = static_cast<double>(rows.size()) * static_cast<double>(rows.size());
  std::vector<double> profile(n);
  for (int d = 0; d < n; ++d) {
    std::complex<double> sum = 0.0;
    for (int s : rows) sum += chi[d][s];
    profile[d] = std::norm(sum) / m2;
  }
  return profile;
}

double max_squared_correlation(BaseKind base, int n, const std::vector<int>& rows) {
  const auto profile = correlation_profile(base, n, rows);
  return n > 1 ? *std::max_element(profile.begin() + 1, profile.end()) : 0.0;
}

DifferenceSetSearch find_difference_sets(GroupKind group, int n, int m) {
  if (n < 2) throw ValidationError("find_difference_sets: N must be at least 2");
  if (m < 1 || m > n) throw ValidationError("find_difference_sets: M must lie in [1, N]");
  if (group == GroupKind::BinaryGF2L && !std::has_single_bit(static_cast<unsigned>(n)))
    throw ValidationError("find_difference_sets: binary group order must be a power of two");
  DifferenceSetSearch result;
  const long pairs = static_cast<long>(m) * (m - 1);
  if (pairs % (n - 1) != 0) {
    result.reason = "lambda = M(M-1)/(N-1) = " + std::to_string(pairs) + "/" + std::to_string(n - 1) +
                    " is not an integer";
    return result;
  }
  const int lambda = static_cast<int>(pairs / (n - 1));
  if (n > 32) throw InfeasibleError("find_difference_sets: exhaustive search supports N <= 32");
  constexpr std::uint64_t kCandidateCap = 50'000'000;
  const auto candidates = binomial(n - 1, m - 1);
  if (!candidates || *candidates > kCandidateCap)
    throw InfeasibleError("find_difference_sets: " +
                          (candidates ? std::to_string(*candidates) : std::string("too many")) +
                          " candidate subsets exceed the cap of " + std::to_string(kCandidateCap));

  auto diff = [group, n](int a, int b) { return group == GroupKind::CyclicZN ? ((a - b) % n + n) % n : (a ^ b); };
  auto shift = [group, n](int a, int g) { return group == GroupKind::CyclicZN ? (a + g) % n : (a ^ g); };

  std::vector<int> set(m);
  std::vector<int> rest(m - 1);
  for (int i = 0; i < m - 1; ++i) rest[i] = i + 1;
  std::vector<int> counts(n);
  std::vector<int> translate(m);
  while (true) {
    set[0] = 0;
    std::copy(rest.begin(), rest.end(), set.begin() + 1);
    std::fill(counts.begin(), counts.end(), 0);
    bool ok = true;
    for (int i = 0; i < m && ok; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        if (++counts[diff(set[i], set[j])] > lambda) {
          ok = false;
          break;
        }
      }
    if (ok) {
      // Keep only the lexicographically smallest translate.
      bool smallest = true;
      for (int g = 1; g < n && smallest; ++g) {
        for (int i = 0; i < m; ++i) translate[i] = shift(set[i], g);
        std::sort(translate.begin(), translate.end());
        if (translate < set) smallest = false;
      }
      if (smallest) result.sets.push_back(set);
    }
    int i = m - 2;
    while (i >= 0 && rest[i] == n - 1 - (m - 2 - i)) --i;
    if (i < 0) break;
    ++rest[i];
    for (int j = i + 1; j < m - 1; ++j) rest[j] = rest[j - 1] + 1;
  }
  return result;
}

AlmostSet find_almost_set(BaseKind base, int n, int m, const AlmostSearchOptions& options) {
  check_base_size(base, n);
  if (m < 1 || m >= n) throw ValidationError("find_almost_set: M must lie in [1, N)");
  if (options.restarts < 1 || options.iterations < 0)
    throw ValidationError("find_almost_set: restarts must be positive and iterations nonnegative");
  const auto chi = character_table(base, n);
  const double m2 = static_cast<double>(m) * m;

  struct Score {
    double max = 0.0;
    double fourth = 0.0;
  };
  auto score = [&](const std::vector<std::complex<double>>& sums) {
    Score s;
    for (int d = 1; d < n; ++d) {
      const double c = std::norm(sums[d]) / m2;
      s.max = std::max(s.max, c);
      s.fourth += c * c;
    }
    return s;
  };
  auto better_or_equal = [](const Score& a, const Score& b) {
    if (a.max < b.max - 1e-12) return true;
    if (a.max > b.max + 1e-12) return false;
    return a.fourth <= b.fourth + 1e-12;
  };
  auto strictly_better = [](const Score& a, const Score& b) {
    if (a.max < b.max - 1e-12) return true;
    if (a.max > b.max + 1e-12) return false;
    return a.fourth < b.fourth - 1e-12;
  };

  AlmostSet best;
  Score best_score{std::numeric_limits<double>::infinity(), 0.0};
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
    std::vector<int> order = identity_permutation(n);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> in(order.begin(), order.begin() + m);
    std::vector<int> out(order.begin() + m, order.end());
    std::vector<std::complex<double>> sums(n, 0.0);
    for (int d = 0; d < n; ++d)
      for (int s : in) sums[d] += chi[d][s];
    Score current = score(sums);
    std::vector<int> run_best = in;
    Score run_score = current;

    std::uniform_int_distribution<int> pick_in(0, m - 1);
    std::uniform_int_distribution<int> pick_out(0, n - m - 1);
    std::vector<std::complex<double>> trial(n);
    for (int it = 0; it < options.iterations; ++it) {
      const int i = pick_in(rng);
      const int o = pick_out(rng);
      for (int d = 0; d < n; ++d) trial[d] = sums[d] - chi[d][in[i]] + chi[d][out[o]];
      const Score s = score(trial);
      if (better_or_equal(s, current)) {
        std::swap(in[i], out[o]);
        sums.swap(trial);
        current = s;
        if (strictly_better(current, run_score)) {
          run_score = current;
          run_best = in;
        }
      }
    }
    std::sort(run_best.begin(), run_best.end());
    if (strictly_better(run_score, best_score) ||
        (!strictly_better(best_score, run_score) && !best.elements.empty() && run_best < best.elements)) {
      best_score = run_score;
      best.elements = run_best;
    }
  }
  // Report from a fresh evaluation, not the accumulated sums.
  const auto profile = correlation_profile(base, n, best.elements);
  best.max_sq_corr = *std::max_element(profile.begin() + 1, profile.end());
  best.sum_sq_corr_sq = 0.0;
  for (int d = 1; d < n; ++d) best.sum_sq_corr_sq += profile[d] * profile[d];
  return best;
}

}  // namespace blockframe
