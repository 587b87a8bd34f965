#include "calibra/config.hpp"
#include "calibra/error.hpp"
#include "doctest.h"

using namespace calibra;

TEST_CASE("TOML grid, flat form") {
  const auto g = parse_grid_toml(R"(
# convergence sweep
class_counts = [3]
alpha_presets = ["equal", "10,1,1"]
sample_sizes = [
  10_000,
  100_000,   # trailing comma allowed
]
binnings = ["equal-frequency"]
bins = 15
metrics = ["ece", "vce:iqv"]
replicates = 4
base_seed = 100
keep_data = true
)");
  CHECK(g.class_counts == std::vector<std::size_t>{3});
  CHECK(g.alpha_presets == std::vector<std::string>{"equal", "10,1,1"});
  CHECK(g.sample_sizes == std::vector<std::size_t>{10'000, 100'000});
  CHECK(g.binnings == std::vector<BinningStrategy>{BinningStrategy::kEqualFrequency});
  CHECK(g.num_bins == 15);
  REQUIRE(g.metrics.size() == 2);
  CHECK(g.metrics[1].name() == "vce:iqv");
  CHECK(g.seeds == std::vector<std::uint64_t>{100, 101, 102, 103});
  CHECK(g.keep_data);
}

TEST_CASE("TOML grid, table form keeps defaults") {
  const auto g = parse_grid_toml("[grid]\nseeds = [7]\n");
  CHECK(g.seeds == std::vector<std::uint64_t>{7});
  CHECK(g.class_counts == std::vector<std::size_t>{3, 10});
  CHECK(g.num_bins == 10);
}

TEST_CASE("JSON grid") {
  const auto g = parse_grid_json(R"({"class_counts": [10], "sample_sizes": [1000], "seeds": [1, 2]})");
  CHECK(g.class_counts == std::vector<std::size_t>{10});
  CHECK(g.seeds.size() == 2);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_grid_toml("colours = [1]\n"), Error);
  CHECK_THROWS_AS(parse_grid_toml("bins = \n"), Error);
  CHECK_THROWS_AS(parse_grid_toml("[other]\nbins = 3\n"), Error);
  CHECK_THROWS_AS(parse_grid_toml("binnings = [\"quantile\"]\n"), Error);
  CHECK_THROWS_AS(parse_grid_toml("seeds = [1]\nreplicates = 2\n"), Error);
  CHECK_THROWS_AS(parse_grid_toml("class_counts = []\n"), Error);
  CHECK_THROWS_AS(parse_grid_toml("class_counts = [1]\n"), Error);
  CHECK_THROWS_AS(parse_grid_json("[1, 2]"), Error);
  try {
    parse_grid_toml("bins = 3\nsample_sizes = [1, \n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
  }
}
