#include <catch2/catch_amalgamated.hpp>

#include "agentmesh/graph.hpp"
#include "agentmesh/rng.hpp"
#include "test_util.hpp"

using namespace agentmesh;

TEST_CASE("metrics on a path graph") {
  const auto t = testutil::path_graph(4);
  const auto m = metrics(t);
  CHECK(m.diameter == 3);
  CHECK(m.max_degree == 2);
  CHECK(m.degree_sequence == std::vector<int>{1, 2, 2, 1});
}

TEST_CASE("metrics on K4") {
  const auto m = metrics(testutil::complete_graph(4));
  CHECK(m.diameter == 1);
  CHECK(m.max_degree == 3);
}

TEST_CASE("metrics on the star K1,3") {
  const auto m = metrics(testutil::star_graph(3));
  CHECK(m.diameter == 2);
  CHECK(m.max_degree == 3);
}

TEST_CASE("metrics refuse disconnected graphs") {
  const auto t = testutil::make_topology(4, {{0, 1}, {2, 3}});
  CHECK_FALSE(is_connected(t));
  CHECK_THROWS_AS(metrics(t), StructuralError);
}

TEST_CASE("metrics agree with Floyd-Warshall and a direct degree recount") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 2 + static_cast<int>(seed % 7);
    const auto t = testutil::random_connected_graph(n, 0.3, seed);
    const auto m = metrics(t);
    CHECK(m.diameter == testutil::floyd_warshall_diameter(t));
    CHECK(m.degree_sequence == testutil::recount_degrees(t));
    CHECK(m.max_degree ==
          *std::max_element(m.degree_sequence.begin(), m.degree_sequence.end()));
    if (n >= 2) {
      CHECK(m.diameter >= 1);
      CHECK(m.diameter <= n - 1);
    }
  }
}

TEST_CASE("edge normalization orients, sorts, and dedupes") {
  const auto edges = normalize_edges({{2, 1}, {0, 1}, {1, 2}, {1, 0}});
  CHECK(edges == std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK_THROWS_AS(make_edge(3, 3), StructuralError);
}

TEST_CASE("topology serialization round-trips bit-exactly") {
  auto t = testutil::cycle_graph(5);
  t.family = GraphFamily::Delaunay;
  t.seed = 123456789012345ULL;
  const std::string text = serialize_topology(t);
  const Topology back = parse_topology(text);
  CHECK(back.node_count == t.node_count);
  CHECK(back.edges == t.edges);
  CHECK(back.family == t.family);
  CHECK(back.seed == t.seed);
  CHECK(serialize_topology(back) == text);
}

TEST_CASE("topology parser rejects malformed input") {
  CHECK_THROWS_AS(parse_topology("not a header"), StructuralError);
  CHECK_THROWS_AS(parse_topology("3 delaunay 1\n2 1\n"), StructuralError);  // u >= v
  CHECK_THROWS_AS(parse_topology("3 what 1\n"), ParameterError);
}

TEST_CASE("labels fall back to node indices") {
  auto t = testutil::path_graph(3, {"ann", "bob"});
  CHECK(t.label_of(0) == "ann");
  CHECK(t.label_of(2) == "2");
}

TEST_CASE("rng below is unbiased across its range and deterministic") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(7);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 5000; ++i) ++counts[r.below_int(5)];
  for (int c : counts) CHECK(c > 800);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("derive_seed separates sub-streams") {
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(derive_seed(5, hash64("a")) == derive_seed(5, hash64("a")));
}
