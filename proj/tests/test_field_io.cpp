#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "dnwave/error.hpp"
#include "dnwave/field_io.hpp"

using namespace dnwave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("dnwave_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(FieldIo, CsvRoundTripIsBitExact) {
  const auto g = HalfSpaceGrid::two_d(1.5, 7, 2.0, 5, -0.25);
  const auto f = ScalarField::from_function(g, [](double t, double z) { return std::sin(t) / 3 + z * 1e-9; });
  const auto dir = scratch("csv");
  write_field_csv(dir / "f.csv", f);
  const auto back = read_field_csv(dir / "f.csv", g);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(back.values()[k], f.values()[k]);

  std::ifstream in(dir / "f.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "z_tangential,z_normal,value");
}

TEST(FieldIo, SnapshotWithSidecar) {
  const auto g = HalfSpaceGrid::one_d(2.0, 9);
  const auto f = ScalarField::from_function(g, [](double, double z) { return z * z; }, 0.125);
  const auto dir = scratch("snap");
  const auto path = write_snapshot(dir, "rho", f, ModelParams(2, 2));
  EXPECT_TRUE(fs::exists(path));
  EXPECT_TRUE(fs::exists(fs::path(path).replace_extension(".json")));
  const auto back = read_snapshot(path);
  EXPECT_EQ(back.grid(), g);
  EXPECT_EQ(back.time(), 0.125);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(back.values()[k], f.values()[k]);
}

TEST(FieldIo, GridJsonRoundTrip) {
  const auto g = HalfSpaceGrid::two_d(3.0, 12, 6.0, 10, -1.0);
  EXPECT_EQ(grid_from_json(grid_to_json(g)), g);
}

TEST(FieldIo, RejectsMismatchedGrid) {
  const auto g = HalfSpaceGrid::one_d(1.0, 4);
  const auto dir = scratch("bad");
  write_field_csv(dir / "f.csv", ScalarField::zeros(g));
  EXPECT_THROW(read_field_csv(dir / "f.csv", HalfSpaceGrid::one_d(1.0, 5)), GridError);
  EXPECT_THROW(read_field_csv(dir / "f.csv", HalfSpaceGrid::two_d(1.0, 4, 1.0, 1)), GridError);
}
