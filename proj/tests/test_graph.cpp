#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "umet/graph.hpp"
#include "umet/universality.hpp"

using namespace umet;

TEST_CASE("adjacency storage is symmetric with a hard zero diagonal") {
  adjacency_matrix a(5);
  CHECK(a.edge_count() == 0);
  a.set_edge(1, 3, true);
  CHECK(a.at(1, 3));
  CHECK(a.at(3, 1));
  CHECK(a.edge_count() == 1);
  a.set_edge(3, 1, false);
  CHECK_FALSE(a.at(1, 3));
  CHECK_THROWS_AS(a.set_edge(2, 2, true), input_error);
  CHECK_THROWS_AS(adjacency_matrix(0), input_error);
}

TEST_CASE("random graphs are seeded reproducibly with sane densities") {
  auto a = sample_er(100, 0.5, 6);
  auto b = sample_er(100, 0.5, 6);
  CHECK(a.bits == b.bits);
  auto c = sample_er(100, 0.5, 7);
  CHECK(a.bits != c.bits);
  // 4950 candidate edges at p = 1/2: mean 2475, sd ~ 35.2
  CHECK(a.edge_count() > 2475 - 106);
  CHECK(a.edge_count() < 2475 + 106);
  CHECK_THROWS_AS(sample_er(10, 0.0, 1), input_error);
  CHECK_THROWS_AS(sample_er(10, 1.0, 1), input_error);
}

TEST_CASE("trivial graphs miss the obvious single-letter words") {
  adjacency_matrix empty(4);
  auto erep = word_universality_depth(empty, 1);
  CHECK_FALSE(erep.universal);
  REQUIRE(erep.missing.size() == 1);
  CHECK(erep.missing[0] == "1");

  adjacency_matrix k10(10);
  for (int j = 1; j < 10; ++j)
    for (int i = 0; i < j; ++i) k10.set_edge(i, j, true);
  auto krep = word_universality_depth(k10, 1);
  CHECK_FALSE(krep.universal);
  REQUIRE(krep.missing.size() == 1);
  CHECK(krep.missing[0] == "0");

  CHECK_THROWS_AS(word_universality_depth(empty, 0), input_error);
  CHECK_THROWS_AS(word_universality_depth(empty, word_depth_cap + 1), capability_error);
}

TEST_CASE("the deterministic graph is word universal at the sharp size") {
  for (int d = 1; d <= 6; ++d) {
    int n = (1 << d) + d;
    auto g = construct_universal_graph(n);
    CHECK(word_universality_depth(g, d).universal);
  }
}

TEST_CASE("one vertex below the sharp size exactly one word goes missing") {
  const char* expected[] = {"", "", "10", "010", "1100", "00100", "101000"};
  for (int d = 2; d <= 6; ++d) {
    int n = (1 << d) + d - 1;
    auto g = construct_universal_graph(n);
    auto rep = word_universality_depth(g, d);
    CHECK_FALSE(rep.universal);
    REQUIRE(rep.missing.size() == 1);
    CHECK(rep.missing[0] == expected[d]);
  }
}

TEST_CASE("prefix splits are witnessed exactly when words are realized") {
  for (int s = 0; s < 20; ++s) {
    auto g = sample_er(64, 0.5, 4000 + std::uint64_t(s));
    bool words = word_universality_depth(g, 3).universal;
    bool splits = prefix_extension_scan(g, 3).all_witnessed;
    CHECK(words == splits);
  }
}

TEST_CASE("extension witnesses are genuine common neighbors and non-neighbors") {
  auto g = sample_er(200, 0.5, 12);
  auto res = extension_property_check(g, {0, 1, 2}, {3, 4});
  REQUIRE(res.found);
  for (int u : {0, 1, 2}) CHECK(g.at(res.witness, u));
  for (int v : {3, 4}) CHECK_FALSE(g.at(res.witness, v));
  CHECK_THROWS_AS(extension_property_check(g, {0, 1}, {1, 2}), input_error);
  CHECK_THROWS_AS(extension_property_check(g, {0, 300}, {1}), input_error);
}

TEST_CASE("the deterministic graph extends over its first address-width vertices") {
  auto g = construct_universal_graph(128);
  auto rep = extension_property_scan(g, 4, {0, 1, 2, 3, 4, 5, 6});
  CHECK(rep.all_witnessed);
  CHECK(rep.cases_checked == 938);
  CHECK(rep.failures.empty());
}

TEST_CASE("moderate random graphs have the depth-4 extension property") {
  for (int s = 0; s < 20; ++s) {
    auto g = sample_er(200, 0.5, 900 + std::uint64_t(s));
    CHECK(word_universality_depth(g, 4).universal);
  }
}

TEST_CASE("bridging a diameter-2 graph yields a valid two-valued metric") {
  auto g = construct_universal_graph(32);
  auto r = graph_to_distance(g);
  CHECK(validate(r, 0.0).ok);
  for (int j = 1; j < 32; ++j)
    for (int i = 0; i < j; ++i) {
      CHECK((r.at(i, j) == 1.0 || r.at(i, j) == 2.0));
      CHECK((r.at(i, j) == 1.0) == g.at(i, j));
    }
}

TEST_CASE("bridging refuses graphs with distant vertex pairs") {
  adjacency_matrix path(4);
  path.set_edge(0, 1, true);
  path.set_edge(1, 2, true);
  path.set_edge(2, 3, true);
  CHECK_THROWS_WITH_AS(graph_to_distance(path),
                       "graph_to_distance: vertices 1 and 4 have no common neighbor "
                       "(diameter > 2)",
                       input_error);
}

TEST_CASE("word universality makes every short two-valued target exactly realizable") {
  auto g = construct_universal_graph(32);
  REQUIRE(word_universality_depth(g, 4).universal);
  auto r = graph_to_distance(g);
  for (int len = 1; len <= 4; ++len) {
    auto pre = nw_corner(r, len);
    std::vector<std::vector<double>> columns;
    for (int j = len; j < r.n; ++j) {
      std::vector<double> col;
      for (int i = 0; i < len; ++i) col.push_back(r.at(i, j));
      columns.push_back(std::move(col));
    }
    for (int word = 0; word < (1 << len); ++word) {
      std::vector<double> target;
      for (int i = 0; i < len; ++i) target.push_back((word >> i) & 1 ? 1.0 : 2.0);
      auto rep = universality_defect(pre, columns, {target});
      CHECK(rep.defect == 0.0);
    }
  }
}
