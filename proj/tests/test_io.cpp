#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "walklab/errors.hpp"
#include "walklab/io.hpp"

using namespace walklab;

namespace {
std::string data_path(const std::string& name) { return std::string(WALKLAB_TEST_DATA_DIR) + "/" + name; }
}  // namespace

TEST(Json, RvFileAndInline) {
  const auto from_file = parse_rv(read_json_arg(data_path("asym.json")));
  const auto builtin = FiniteRV::asymmetric_binomial();
  ASSERT_EQ(from_file.size(), builtin.size());
  for (std::size_t i = 0; i < builtin.size(); ++i) {
    EXPECT_DOUBLE_EQ(from_file.atoms()[i].value, builtin.atoms()[i].value);
    EXPECT_DOUBLE_EQ(from_file.atoms()[i].prob, builtin.atoms()[i].prob);
  }
  const auto again = parse_rv(rv_to_json(builtin));
  EXPECT_DOUBLE_EQ(again.atoms()[1].value, 2.0);
}

TEST(Json, RvValidation) {
  EXPECT_THROW(read_json_arg(data_path("missing.json")), ValidationError);
  EXPECT_THROW(parse_rv("{\"atoms\":[{\"value\":-1,\"prob\":0.5}"), ValidationError);
  EXPECT_THROW(parse_rv("{\"atoms\":[{\"value\":-1,\"prob\":0.4},{\"value\":1,\"prob\":0.4}]}"),
               ValidationError);
  EXPECT_THROW(parse_rv("{\"atoms\":[{\"value\":0,\"prob\":0.5},{\"value\":1,\"prob\":0.5}]}"),
               ValidationError);
  EXPECT_THROW(parse_rv("{\"atoms\":[]}"), ValidationError);
}

TEST(Json, UtilityRoundTrip) {
  const auto crra = parse_utility(read_json_arg(data_path("crra.json")));
  EXPECT_EQ(crra.family_name(), "crra");
  EXPECT_NEAR(crra.U(8.0), 3.0 * 2.0, 1e-12);
  const auto power = parse_utility("{\"family\":\"power_conjugate\",\"alpha\":0.5,\"beta\":2}");
  const auto back = parse_utility(utility_to_json(power));
  EXPECT_DOUBLE_EQ(back.V(3.0), power.V(3.0));
  const auto series =
      parse_utility("{\"family\":\"series_conjugate\",\"terms\":[{\"alpha\":1,\"log_beta\":0},"
                    "{\"alpha\":2,\"log_beta\":-1}]}");
  EXPECT_NEAR(series.V(1.0), 1.0 + std::exp(-1.0), 1e-14);
  EXPECT_EQ(parse_utility("{\"family\":\"prop1b_v0\",\"z0\":0.1}").family_name(), "prop1b_v0");
  EXPECT_THROW(parse_utility("{\"family\":\"exotic\"}"), ValidationError);
  EXPECT_THROW(parse_utility("{\"family\":\"crra\",\"gamma\":1.5}"), ValidationError);
}

TEST(Format, RoundTripsDoubles) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Csv, HeaderAndRows) {
  CsvTable t({"a", "b"});
  t.add_row({"1", "2"});
  t.add_row({"3", "4"});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.str(), "a,b\n1,2\n3,4\n");
  EXPECT_ANY_THROW(t.add_row({"only one"}));
}

TEST(Csv, LatticeTable) {
  const auto dist = terminal_distribution(FiniteRV::symmetric_binomial(), 2);
  const std::string csv = lattice_to_csv(dist);
  std::istringstream in(csv);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1 + static_cast<int>(dist.size()));
}

TEST(AtomicWrite, ReplacesTarget) {
  const auto dir = std::filesystem::temp_directory_path() / "walklab_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.csv").string();
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "second\n");
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  EXPECT_THROW(write_file_atomic((dir / "no_such_dir" / "x.csv").string(), "x"), Error);
  std::filesystem::remove_all(dir);
}
