#include <closedsum/io.hpp>

#include <gtest/gtest.h>

using namespace closedsum;
using closedsum::io::json;

TEST(Io, ComplexEntries) {
  EXPECT_EQ(io::complex_from_json(json(2.5)), cplx(2.5, 0.0));
  EXPECT_EQ(io::complex_from_json(json::array({1.0, -2.0})), cplx(1.0, -2.0));
  EXPECT_THROW(io::complex_from_json(json("x")), io::InputError);
  EXPECT_TRUE(io::real_to_json(kInfinity).is_null());
}

TEST(Io, SubspaceRoundTrip) {
  const json j = json::parse(R"({"ambient_dim": 3, "vectors": [[1, 0, 0], [[0, 1], 0, 1]]})");
  const Subspace s = io::subspace_from_json(j);
  EXPECT_EQ(s.dim(), 2);
  const Subspace back = io::subspace_from_json(io::subspace_to_json(s));
  EXPECT_LE(projector_distance(s, back), 1e-14);
}

TEST(Io, SubspaceErrors) {
  EXPECT_THROW(io::subspace_from_json(json::parse(R"({"vectors": []})")), io::InputError);
  EXPECT_THROW(io::subspace_from_json(json::parse(R"({"ambient_dim": -1})")), io::InputError);
  try {
    io::subspace_from_json(json::parse(R"({"ambient_dim": 2, "vectors": [[1, 0, 0]]})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Io, SystemInheritsAmbientDimension) {
  const json j = json::parse(R"({"ambient_dim": 2, "members": [{"vectors": [[1, 0]]}, {"vectors": [[1, 1]]}]})");
  const SubspaceSystem s = io::system_from_json(j);
  EXPECT_EQ(s.size(), 2);
  EXPECT_EQ(io::system_to_json(s)["members"].size(), 2u);
}

TEST(Io, GraphIsOneBased) {
  const WeightedGraph g = io::graph_from_json(json::parse(R"({"n": 3, "edges": [[1, 2], [2, 3, 0.5]]})"));
  ASSERT_EQ(g.edges().size(), 2u);
  EXPECT_EQ(g.edges()[1].i, 1);
  EXPECT_EQ(g.edges()[1].weight, 0.5);
  EXPECT_THROW(io::graph_from_json(json::parse(R"({"edges": []})")), io::InputError);
}

TEST(Io, OperatorKinds) {
  const json j = json::parse(R"({"ambient_dim": 1, "matrices": [[[2]], [[1]]], "kind": ["nonnegative", "general"]})");
  const OperatorFamily f = io::operators_from_json(j);
  EXPECT_EQ(f.kinds()[0], OperatorKind::Nonnegative);
  EXPECT_FALSE(f.all_nonnegative());
  EXPECT_THROW(io::operators_from_json(json::parse(R"({"ambient_dim": 1, "matrices": [[[1]]], "kind": ["odd"]})")),
               io::InputError);
}

TEST(Io, ReportSerialization) {
  MarginReport r;
  r.add("gap", 0.5, {});
  r.add("vacuous", kInfinity, {});
  r.values["x"] = 1.0;
  r.flags["ok"] = true;
  const json j = io::report_to_json(r);
  EXPECT_EQ(j["entries"][0]["verdict"], "satisfied");
  EXPECT_TRUE(j["entries"][1]["margin"].is_null());
  EXPECT_TRUE(j["entries"][1]["vacuous"].get<bool>());
  EXPECT_EQ(j["flags"]["ok"], true);
}
