#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "automorph/config.hpp"

using namespace automorph;

namespace {
ExperimentConfig parse(const std::string& text) { return parse_config(Json::parse(text, nullptr, true, true)); }
}  // namespace

TEST(Config, Defaults) {
  const auto c = parse("{}");
  EXPECT_FALSE(c.map.has_value());
  EXPECT_EQ(c.grid, std::size_t{1} << 14);
  EXPECT_DOUBLE_EQ(c.tol_kr, 1e-9);
  EXPECT_DOUBLE_EQ(c.tol_a, 1e-12);
  EXPECT_EQ(c.scheme, TransferScheme::AtomTransport);
  EXPECT_EQ(c.method, SolveMethod::Inverse);
}

TEST(Config, NamedNumbers) {
  const auto c = parse(R"({"map": {"rotation": "golden"}, "cf_value": "5/12", "fd_h": "1e-3/2pi"})");
  ASSERT_TRUE(c.map.has_value());
  EXPECT_DOUBLE_EQ(c.map->offset, (std::sqrt(5.0) - 1.0) / 2.0);
  EXPECT_DOUBLE_EQ(*c.cf_value, 5.0 / 12.0);
  EXPECT_DOUBLE_EQ(c.fd_h, 1e-3 / kTwoPi);
}

TEST(Config, MapAndAlpha) {
  const auto c = parse(R"({
    // comments are allowed
    "map": {"offset": 0.1, "nu": "1/2pi", "on_tongue": true},
    "alpha": {"quotients": [0, 2], "period": 1},
    "exponents": [-1, -0.5],
    "grid": 1024,
    "scheme": "overlap",
    "method": "power",
    "nu_grid": {"start": 0, "stop": 0.1, "count": 3}
  })");
  ASSERT_TRUE(c.map && c.alpha);
  EXPECT_DOUBLE_EQ(c.map->sine.at(0), 1.0 / kTwoPi);
  EXPECT_TRUE(c.map->on_tongue);
  EXPECT_EQ(c.alpha->expanded(4), (std::vector<std::int64_t>{0, 2, 2, 2}));
  EXPECT_EQ(c.exponents, (std::vector<double>{-1.0, -0.5}));
  EXPECT_EQ(c.grid, 1024u);
  EXPECT_EQ(c.scheme, TransferScheme::CellOverlap);
  EXPECT_EQ(c.method, SolveMethod::Power);
  ASSERT_EQ(c.nu_grid.size(), 3u);
  EXPECT_DOUBLE_EQ(c.nu_grid[1], 0.05);
  EXPECT_EQ(c.tongue_options().N, 1024u);
}

TEST(Config, AlphaAsFloatRejected) {
  EXPECT_THROW(parse(R"({"alpha": 0.618})"), InvalidArgument);
  EXPECT_THROW(parse(R"({"alpha": "bronze"})"), InvalidArgument);
  EXPECT_THROW(parse(R"({"alpha": [0, 1.5]})"), InvalidArgument);
}

TEST(Config, InvalidValuesRejected) {
  EXPECT_THROW(parse(R"({"grid": 1000})"), InvalidArgument);
  EXPECT_THROW(parse(R"({"tol_kr": -1})"), InvalidArgument);
  EXPECT_THROW(parse(R"({"scheme": "ulam2"})"), InvalidArgument);
  EXPECT_THROW(parse(R"({"max_iter": "many"})"), InvalidArgument);
  EXPECT_THROW(parse(R"({"map": {"nu": "abc"}})"), InvalidArgument);
  EXPECT_THROW(parse("[1, 2]"), InvalidArgument);
}

TEST(Config, LoadFromFile) {
  const std::string path = ::testing::TempDir() + "/cfg.json";
  std::ofstream(path) << "{ \"grid\": 256 /* block comment */ }";
  EXPECT_EQ(load_config(path).grid, 256u);
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_config(path), InvalidArgument);
  EXPECT_THROW(load_config(path + ".missing"), InvalidArgument);
}

TEST(Config, BuildMapOnTongue) {
  const auto c = parse(R"({"map": {"nu": 0.05, "on_tongue": true}, "alpha": "golden", "tol_a": 1e-11})");
  const auto f = build_map(c);
  const auto rho = rotation_number(f, 1e-9, 10'000'000);
  EXPECT_NEAR(rho.value, (std::sqrt(5.0) - 1.0) / 2.0, 1e-9);
  EXPECT_THROW(build_map(parse(R"({"map": {"nu": 0.05, "on_tongue": true}})")), InvalidArgument);
  EXPECT_THROW(build_map(parse("{}")), InvalidArgument);
}
