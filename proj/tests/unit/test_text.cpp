#include <string>

#include "blockframe/block_model.hpp"
#include "blockframe/error.hpp"
#include "blockframe/log.hpp"
#include "blockframe/text.hpp"
#include "doctest.h"

using namespace blockframe;

TEST_SUITE("text") {
  TEST_CASE("block model parsing") {
    const BlockModel b = BlockModel::parse("16:4:4");
    CHECK(b.num_blocks == 16);
    CHECK(b.block_size == 4);
    CHECK(b.active_blocks == 4);
    CHECK(b.total_columns() == 64);
    CHECK(b.active_columns() == 16);
    CHECK(b.erased_blocks() == 12);
    CHECK(b.to_string() == "16:4:4");
    CHECK_THROWS_AS(BlockModel::parse("4:4:5"), ValidationError);
    CHECK_THROWS_AS(BlockModel::parse("4:0:2"), ValidationError);
    CHECK_THROWS_AS(BlockModel::parse("4:4"), ValidationError);
    CHECK_THROWS_AS(BlockModel::parse("a:4:2"), ValidationError);
  }

  TEST_CASE("a single active block parses with a warning") {
    std::string seen;
    auto prev = set_warning_sink([&](std::string_view m) { seen = m; });
    const BlockModel b = BlockModel::parse("4:4:1");
    set_warning_sink(prev);
    CHECK(b.active_blocks == 1);
    CHECK_FALSE(seen.empty());
  }

  TEST_CASE("number lists and round-trip doubles") {
    CHECK(text::parse_int_list(" 1, 2 ,3", "x") == std::vector<int>{1, 2, 3});
    CHECK(text::parse_int_list("", "x").empty());
    CHECK_THROWS_AS(text::parse_int_list("1,,2", "x"), ValidationError);
    CHECK_THROWS_AS(text::parse_int("3.5", "x"), ValidationError);
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0})
      CHECK(text::parse_double(text::format_double(v), "v") == v);
    CHECK(text::join({4, 5}) == "4,5");
  }
}
