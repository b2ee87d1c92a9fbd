#include <algorithm>
#include <cmath>
#include <string>

#include "blockframe/catalog.hpp"
#include "blockframe/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace blockframe;

namespace {

std::string one_entry(const std::string& body) {
  return "{\n  \"version\": 1,\n  \"entries\": [\n    {\n" + body + "\n    }\n  ]\n}\n";
}

std::string error_of(const std::string& text) {
  try {
    parse_catalog(text, "cat.json");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

// Brute force max over all pairs of columns of the row-selection frame.
double oracle_max_sq_corr(BaseKind base, int n, const std::vector<int>& rows) {
  const oracle::Dense f = oracle::frame(base, n, rows, blockframe::identity_permutation(n));
  double best = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      oracle::cplx s = 0.0;
      for (std::size_t r = 0; r < rows.size(); ++r) s += std::conj(f[r][a]) * f[r][b];
      best = std::max(best, std::norm(s));
    }
  return best;
}

}  // namespace

TEST_SUITE("catalog") {
  TEST_CASE("bundled catalog loads and every entry checks out") {
    const auto entries = load_catalog(default_catalog_path());
    REQUIRE(entries.size() >= 10);
    for (const CatalogEntry& e : entries) {
      CAPTURE(e.name);
      const int n = e.difference_set.order;
      const int m = static_cast<int>(e.difference_set.elements.size());
      if (!e.almost) {
        int lambda = 0;
        CHECK(oracle::is_difference_set(e.difference_set.group == GroupKind::BinaryGF2L, n, e.difference_set.elements,
                                        &lambda));
        CHECK(lambda == e.difference_set.lambda);
        const double welch = double(n - m) / (double(m) * (n - 1));
        CHECK(std::abs(e.max_sq_corr - welch) < 1e-9);
      }
      if (n <= 64) CHECK(std::abs(e.max_sq_corr - oracle_max_sq_corr(e.base, n, e.difference_set.elements)) < 1e-9);
    }
    const CatalogEntry& worked = find_entry(entries, "hadamard-16-6");
    CHECK(worked.difference_set.elements == std::vector<int>{0, 2, 5, 6, 14, 15});
    CHECK_THROWS_AS(find_entry(entries, "nope"), ValidationError);
  }

  TEST_CASE("serialization round trip") {
    const auto entries = load_catalog(default_catalog_path());
    const auto again = parse_catalog(catalog_to_json(entries));
    REQUIRE(again.size() == entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      CHECK(again[i].name == entries[i].name);
      CHECK(again[i].difference_set.elements == entries[i].difference_set.elements);
      CHECK(again[i].max_sq_corr == entries[i].max_sq_corr);
    }
  }

  TEST_CASE("empty file yields no entries") {
    CHECK(parse_catalog("").empty());
    CHECK(parse_catalog("  \n\n").empty());
    CHECK(parse_catalog("{\"version\": 1, \"entries\": []}").empty());
  }

  TEST_CASE("a wrong lambda claim is rejected with its line") {
    const std::string text = one_entry(
        "      \"name\": \"bad\", \"group\": \"binary\", \"N\": 16, \"M\": 6, \"lambda\": 3,\n"
        "      \"elements\": [0, 2, 5, 6, 14, 15], \"base\": \"hadamard\", \"provenance\": \"t\"");
    const std::string what = error_of(text);
    CHECK(what.find("cat.json:4:") == 0);
    CHECK(what.find("entry 'bad'") != std::string::npos);
    CHECK(what.find("claims lambda=3 but verification gives lambda=2") != std::string::npos);
  }

  TEST_CASE("other malformed entries") {
    const std::string head = "      \"name\": \"x\", \"group\": \"binary\", \"N\": 16, \"M\": 6, \"provenance\": \"t\", ";
    CHECK(error_of(one_entry(head + "\"elements\": [0, 1, 2, 3, 4, 5], \"base\": \"hadamard\", \"lambda\": 2"))
              .find("not a difference set") != std::string::npos);
    CHECK(error_of(one_entry(head + "\"elements\": [0, 2, 5, 6, 14, 15], \"base\": \"hadamard\", \"lambda\": 2, "
                                    "\"colour\": 1"))
              .find("unknown field 'colour'") != std::string::npos);
    CHECK(error_of(one_entry(head + "\"elements\": [0, 2, 5, 6, 14], \"base\": \"hadamard\", \"lambda\": 2"))
              .find("M=6 but 5") != std::string::npos);
    CHECK(error_of(one_entry(head + "\"elements\": [0, 2, 5, 6, 14, 15], \"base\": \"hadamard\", \"lambda\": 2, "
                                    "\"max_sq_corr\": 0.5"))
              .find("recorded max_sq_corr") != std::string::npos);
    CHECK_FALSE(error_of("{\"version\": 2, \"entries\": []}").empty());
  }

  TEST_CASE("malformed JSON reports the line") {
    const std::string what = error_of("{\n  \"version\": 1,\n  \"entries\": [\n    {,\n  ]\n}\n");
    CHECK(what.find("cat.json:4: malformed JSON") == 0);
  }

  TEST_CASE("duplicate names") {
    const std::string e = "{\"name\": \"d\", \"group\": \"cyclic\", \"N\": 7, \"M\": 3, \"lambda\": 1, "
                          "\"elements\": [1, 2, 4], \"base\": \"dft\", \"provenance\": \"t\"}";
    CHECK(error_of("{\"version\": 1, \"entries\": [" + e + ",\n" + e + "]}").find("duplicate name") !=
          std::string::npos);
  }

  TEST_CASE("difference set search") {
    auto r = find_difference_sets(GroupKind::BinaryGF2L, 16, 6);
    CHECK(r.sets.size() == 28);
    for (const auto& s : r.sets) {
      int lambda = 0;
      CHECK(oracle::is_difference_set(true, 16, s, &lambda));
      CHECK(lambda == 2);
      CHECK(s.front() == 0);
    }
    std::vector<int> translate;
    for (int x : {0, 2, 5, 6, 14, 15}) translate.push_back(x ^ 14);
    std::sort(translate.begin(), translate.end());
    CHECK(std::find(r.sets.begin(), r.sets.end(), translate) != r.sets.end());

    CHECK(find_difference_sets(GroupKind::CyclicZN, 7, 3).sets.size() == 2);
    CHECK(find_difference_sets(GroupKind::CyclicZN, 13, 4).sets.size() == 4);
    for (const auto& s : find_difference_sets(GroupKind::CyclicZN, 13, 4).sets)
      CHECK(oracle::is_difference_set(false, 13, s, nullptr));

    r = find_difference_sets(GroupKind::CyclicZN, 5, 2);
    CHECK(r.sets.empty());
    REQUIRE(r.reason.has_value());
    CHECK(r.reason->find("not an integer") != std::string::npos);
    CHECK_THROWS_AS(find_difference_sets(GroupKind::BinaryGF2L, 64, 28), InfeasibleError);
  }

  TEST_CASE("almost sets") {
    const AlmostSet a = find_almost_set(BaseKind::Hadamard, 16, 5, {3, 4, 3000});
    CHECK(a.elements.size() == 5);
    CHECK(std::is_sorted(a.elements.begin(), a.elements.end()));
    CHECK(std::abs(a.max_sq_corr - oracle_max_sq_corr(BaseKind::Hadamard, 16, a.elements)) < 1e-12);
    CHECK(a.max_sq_corr >= double(16 - 5) / (5.0 * 15) - 1e-12);
    const AlmostSet b = find_almost_set(BaseKind::Hadamard, 16, 5, {3, 4, 3000});
    CHECK(a.elements == b.elements);

    const AlmostSet etf = find_almost_set(BaseKind::Dft, 7, 3, {1, 4, 2000});
    CHECK(etf.max_sq_corr == doctest::Approx(4.0 / 18.0));
  }

  TEST_CASE("correlation profile") {
    const auto p = correlation_profile(BaseKind::Dft, 7, {1, 2, 4});
    REQUIRE(p.size() == 7);
    CHECK(p[0] == doctest::Approx(1.0));
    for (int d = 1; d < 7; ++d) CHECK(p[d] == doctest::Approx(2.0 / 9.0));
  }
}
