#include <cstdio>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "liouville/io.hpp"
#include "support.hpp"

using namespace liouville;

TEST(Io, FormatsRoundTripExactly) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 4.0}) EXPECT_EQ(std::stod(io::fmt(x)), x);
  EXPECT_EQ(io::fmt(4.0), "4");
  EXPECT_EQ(io::fmt(NAN), "nan");
}

TEST(Io, JsonDumpIsStableAndParsable) {
  io::Json j{{"b", 0.1}, {"a", {1.0, 2.5}}, {"nested", {{"x", 1}}}, {"bad", INFINITY}};
  const std::string s = io::dump_json(j);
  EXPECT_EQ(s, io::dump_json(j));
  EXPECT_EQ(s.back(), '\n');
  EXPECT_LT(s.find("\"b\""), s.find("\"a\""));
  const auto back = io::parse_json(s, "test");
  EXPECT_EQ(back["b"].get<double>(), 0.1);
  EXPECT_TRUE(back["bad"].is_null());
  EXPECT_THROW(io::parse_json("{", "test"), Error);
}

TEST(Io, HeightInputsRoundTrip) {
  const double pi = std::numbers::pi;
  HeightInputs in{24.0 * pi, 2, 2, 2, 0.7, {1.3, 0.8}, {{0, 0.4}, {0.4, 0}}, {{0.05, -0.02}, {-0.02, 0.07}}, {0.1, -0.3}, 0.01};
  const auto back = io::height_inputs_from_json(io::parse_json(io::dump_json(io::to_json(in)), "t"));
  EXPECT_EQ(back.rho, in.rho);
  EXPECT_EQ(back.C_ti, in.C_ti);
  EXPECT_EQ(back.green_regular, in.green_regular);
  EXPECT_EQ(back.t, in.t);
  auto j = io::to_json(in);
  j["extra"] = 1;
  EXPECT_THROW(io::height_inputs_from_json(j), Error);
  j = io::to_json(in);
  j.erase("t");
  EXPECT_THROW(io::height_inputs_from_json(j), Error);
}

TEST(Io, CsvRowsMatchHeader) {
  io::Csv c{{"a", "b"}, {}};
  c.add({"1", "2"});
  EXPECT_EQ(c.str(), "a,b\n1,2\n");
  EXPECT_THROW(c.add({"1"}), Error);
}

TEST(Io, GridRoundTrip) {
  const auto mf = testing_support::manufactured(0.0, 2.0, 20, 8);
  const auto dir = std::filesystem::temp_directory_path() / "liouville_io_test";
  std::filesystem::create_directories(dir);
  const std::string stem = (dir / "grid").string();
  io::write_grid(stem, mf.problem, mf.solution);
  EXPECT_EQ(io::read_grid_values(stem + ".bin"), mf.solution.u);
  const auto side = io::parse_json(io::read_file(stem + ".json"), "sidecar");
  EXPECT_EQ(side["mesh"]["n_r"].get<int>(), 20);
  EXPECT_EQ(side["data"].get<std::string>(), "grid.bin");
  std::filesystem::remove_all(dir);
  EXPECT_THROW(io::read_file((dir / "missing").string()), Error);
}
