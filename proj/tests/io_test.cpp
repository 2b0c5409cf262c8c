#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "algomc/io.hpp"
#include "support.hpp"

namespace algomc {
namespace {

TEST(IoTest, GraphRoundTripIsCanonical) {
  auto rng = stream(41, "io/graph");
  for (int t = 0; t < 50; ++t) {
    const auto g = testing::random_dag(1 + rng.uniform_int(7), 0.4, rng);
    const auto text = io::dump_graph(g);
    const auto back = io::dag_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back, g);
    EXPECT_EQ(io::dump_graph(back), text);
  }
}

TEST(IoTest, GraphErrors) {
  using nlohmann::json;
  EXPECT_THROW(io::dag_from_json(json::parse(R"({"nodes": ["A"]})")), FormatError);
  EXPECT_THROW(io::dag_from_json(json::parse(R"({"nodes": ["A","B"], "edges": [["A"]]})")), FormatError);
  EXPECT_THROW(io::dag_from_json(json::parse(R"({"nodes": [1], "edges": []})")), FormatError);
  EXPECT_THROW(io::dag_from_json(json::parse(R"({"nodes": ["A","B"], "edges": [["A","B"],["B","A"]]})")),
               PreconditionError);
}

TEST(IoTest, DistributionRoundTrip) {
  auto rng = stream(42, "io/dist");
  const DiscreteDistribution p({2, 3}, testing::random_simplex(6, rng, 0.0), {"X", "Y"});
  const auto q = io::distribution_from_json(nlohmann::json::parse(io::to_json(p).dump()));
  EXPECT_EQ(q.arity(), p.arity());
  EXPECT_EQ(q.names(), p.names());
  for (std::size_t i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(q.probs()[i], p.probs()[i]);
  std::ostringstream csv;
  io::write_distribution_csv(csv, p);
  std::istringstream in(csv.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "X,Y,p");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 6u);
  EXPECT_THROW(io::distribution_from_json(nlohmann::json::parse(R"({"arity": [2]})")), FormatError);
}

TEST(IoTest, MatrixAndModelRoundTrip) {
  const auto a0 = StochasticMatrix::from_rows({{0.9, 0.3}, {0.1, 0.7}});
  const auto a1 = StochasticMatrix::from_rows({{0.6, 0.15}, {0.4, 0.85}});
  EXPECT_TRUE(io::matrix_from_json(io::to_json(a0)).approx_equal(a0, 0));
  const io::ModelSpec m{ProductModel(BitString::parse("0110"), 0.2, 0.7),
                        TransitionModel(BitString::parse("1100"), a0, a1)};
  const auto back = io::model_from_json(nlohmann::json::parse(io::to_json(m).dump()));
  EXPECT_EQ(back.product.c, m.product.c);
  EXPECT_EQ(back.transition.d, m.transition.d);
  EXPECT_DOUBLE_EQ(back.product.p_one[1], 0.7);
  EXPECT_TRUE(back.transition.a[1].approx_equal(a1, 0));
  auto bad = io::to_json(m);
  bad["d"] = "110";
  EXPECT_THROW(io::model_from_json(bad), FormatError);
  bad = io::to_json(m);
  bad.erase("A1");
  EXPECT_THROW(io::model_from_json(bad), FormatError);
  EXPECT_THROW(io::matrix_from_json(nlohmann::json("x")), FormatError);
}

TEST(IoTest, BitstringsRoundTripAndReportLine) {
  auto rng = stream(43, "io/bits");
  std::vector<BitString> xs;
  for (int i = 0; i < 20; ++i) xs.push_back(testing::random_bits(1 + rng.uniform_int(70), rng));
  std::ostringstream out;
  io::write_bitstrings(out, xs);
  std::istringstream in(out.str() + "\n");
  EXPECT_EQ(io::read_bitstrings(in), xs);
  std::istringstream bad("0101\n01x1\n");
  try {
    io::read_bitstrings(bad);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(IoTest, FileBytes) {
  const std::string path = ::testing::TempDir() + "algomc_io_bytes.bin";
  const Bytes data{0, 1, 2, 255, 10, 13};
  {
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  }
  EXPECT_EQ(io::read_file_bytes(path), data);
  std::remove(path.c_str());
  EXPECT_THROW(io::read_file_bytes(path), FormatError);
}

TEST(IoTest, DensityRoundTrip) {
  const auto g = gaussian_grid(0.5, 1.3, 0.05);
  std::ostringstream out;
  io::write_density_csv(out, g);
  std::istringstream in(out.str());
  const auto back = io::read_density_csv(in);
  ASSERT_EQ(back.size(), g.size());
  EXPECT_NEAR(back.x0, g.x0, 1e-12);
  EXPECT_NEAR(back.h, g.h, 1e-12);
  EXPECT_NEAR(fisher_information(back), fisher_information(g), 1e-9);
  std::istringstream uneven("x,p\n0,1\n1,1\n3,1\n");
  EXPECT_THROW(io::read_density_csv(uneven), FormatError);
  std::istringstream junk("x,p\n0,a\n1,1\n");
  EXPECT_THROW(io::read_density_csv(junk), FormatError);
}

TEST(IoTest, GroupAndTrajectories) {
  const auto g = FiniteGroupAction::bit_flips(2);
  const auto back = io::group_from_json(nlohmann::json::parse(io::to_json(g).dump()));
  EXPECT_EQ(back.elements(), g.elements());
  EXPECT_THROW(io::group_from_json(nlohmann::json::parse(R"({"size": 2})")), FormatError);

  const std::vector<std::vector<int>> trajs{{0, 1, 0, -1}, {5, 4, 3, 4}};
  std::ostringstream out;
  io::write_trajectories_csv(out, trajs);
  EXPECT_EQ(out.str(), "0,1,0,-1\n5,4,3,4\n");
  std::istringstream in(out.str());
  EXPECT_EQ(io::read_trajectories_csv(in), trajs);
  std::istringstream bad("0,1,z\n");
  EXPECT_THROW(io::read_trajectories_csv(bad), FormatError);
}

}  // namespace
}  // namespace algomc
