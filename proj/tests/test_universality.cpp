#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "umet/growth.hpp"
#include "umet/universality.hpp"

using namespace umet;

TEST_CASE("defect of the all-ones space against a far target is exact") {
  distance_matrix ones(6, std::vector<double>(15, 1.0));
  auto rep = universality_defect(ones, 1, {{3.0}});
  CHECK(rep.defect == 2.0);
  CHECK(rep.targets_tested == 1);
  CHECK(rep.worst_target == std::vector<double>{3.0});
  CHECK(rep.columns_used == 5);
}

TEST_CASE("product-measure matrices keep a defect of at least one half") {
  entry_spec spec(0.5, 1.0);
  auto r = sample_product_half_one(60, spec, 23);
  auto rep = universality_defect(r, 1, {{0.0}});
  CHECK(rep.defect >= 0.5 - 1e-9);
}

TEST_CASE("defect rejects out-of-range prefixes and inadmissible targets") {
  distance_matrix r(3, {1.0, 2.0, 2.5});
  CHECK_THROWS_AS(universality_defect(r, 0, {{1.0}}), input_error);
  CHECK_THROWS_AS(universality_defect(r, 3, {{1.0}}), input_error);
  distance_matrix pre(2, {1.0});
  CHECK_THROWS_AS(
      universality_defect(pre, std::vector<std::vector<double>>{{1.0, 1.5}},
                          std::vector<std::vector<double>>{{9.0, 0.1}}),
      input_error);
}

TEST_CASE("defect curves are nonincreasing in the admitted columns") {
  auto gamma = gamma_spec::parse("unif:0,1");
  auto rows = sample_prefix_rows(300, 2, gamma, 8, 1.0);
  auto targets = sample_targets(rows.prefix, 50, 4, 1.0);
  auto curve = defect_curve(rows.prefix, rows.columns, {10, 50, 298}, targets);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].columns_used == 10);
  CHECK(curve[2].columns_used == 298);
  CHECK(curve[0].defect >= curve[1].defect);
  CHECK(curve[1].defect >= curve[2].defect);
  CHECK_THROWS_AS(defect_curve(rows.prefix, rows.columns, {299}, targets), input_error);
}

TEST_CASE("sampled targets are admissible and deterministic") {
  distance_matrix pre(3, {1.0, 1.5, 2.0});
  auto a = sample_targets(pre, 40, 12);
  auto b = sample_targets(pre, 40, 12);
  REQUIRE(a.size() == 40);
  CHECK(a == b);
  for (const auto& t : a) CHECK(is_admissible(pre, t));
  auto bounded = sample_targets(pre, 40, 12, 1.0);
  for (const auto& t : bounded) CHECK(is_admissible(pre, t));
}

TEST_CASE("epsilon extension finds exact copies embedded in a host") {
  auto gamma = gamma_spec::parse("unif:0,1");
  auto host = sample_nu_gamma(12, gamma, 42).matrix;
  // pattern = rows {0, 1, 4, 7} of the host, so an exact match exists
  std::vector<int> picks{0, 1, 4, 7};
  distance_matrix q = distance_matrix::zero(4);
  for (int j = 1; j < 4; ++j)
    for (int i = 0; i < j; ++i)
      q.set(i, j, host.at(picks[std::size_t(i)], picks[std::size_t(j)]));
  q.refresh_proper();
  auto res = epsilon_extend(host, q, 2, 1e-9);
  REQUIRE(res.found);
  CHECK(res.deviation <= 1e-9);
  REQUIRE(res.indices.size() == 4);
  CHECK(res.indices[0] == 0);
  CHECK(res.indices[1] == 1);
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < x; ++y)
      CHECK(std::fabs(host.at(res.indices[x], res.indices[y]) - q.at(int(x), int(y))) <=
            1e-9);
}

TEST_CASE("epsilon extension reports corner mismatches and size overflow") {
  distance_matrix r(3, {1.0, 2.0, 2.5});
  distance_matrix q(3, {1.5, 2.0, 2.5});
  CHECK_THROWS_AS(epsilon_extend(r, q, 2, 0.1), input_error);
  distance_matrix big(5, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  CHECK_FALSE(epsilon_extend(r, big, 1, 0.1).found);
}

TEST_CASE("back and forth matches a matrix with itself at zero distortion") {
  auto gamma = gamma_spec::parse("unif:0,1");
  auto r = sample_nu_gamma(20, gamma, 33).matrix;
  auto m = back_and_forth(r, r, 5, 0.05);
  CHECK(m.complete);
  CHECK(m.rounds_completed == 5);
  CHECK(m.distortion <= 1e-12);
  CHECK_THROWS_AS(back_and_forth(r, r, -1, 0.05), input_error);
}

TEST_CASE("back and forth rejects matrices that do not validate") {
  distance_matrix bad(3, {1.0, 2.0, 9.0});
  distance_matrix ok(3, {1.0, 2.0, 2.5});
  CHECK_THROWS_AS(back_and_forth(bad, ok, 2, 0.1), precondition_error);
}

TEST_CASE("constructed spaces validate, respect the bound, and repeat") {
  auto a = construct_universal(128, 0.0625, 1.0, 5);
  auto b = construct_universal(128, 0.0625, 1.0, 5);
  CHECK(a.upper == b.upper);
  CHECK(validate(a).ok);
  CHECK(a.max_entry() <= 1.0 + 1e-12);
  CHECK_THROWS_AS(construct_universal(0, 0.0625, 1.0, 5), input_error);
  CHECK_THROWS_AS(construct_universal(8, 0.0, 1.0, 5), input_error);
}

TEST_CASE("independently constructed spaces admit a low-distortion matching") {
  auto a = construct_universal(512, 0.0625, 1.0, 71);
  auto b = construct_universal(512, 0.0625, 1.0, 72);
  auto m = back_and_forth(a, b, 6, 0.1);
  CHECK(m.complete);
  CHECK(m.distortion < 0.2);
}

TEST_CASE("constructed spaces drive the defect down as columns accumulate") {
  auto r = construct_universal(600, 0.0625, 1.0, 9);
  auto pre = nw_corner(r, 2);
  std::vector<std::vector<double>> columns;
  for (int j = 2; j < r.n; ++j)
    columns.push_back({r.at(0, j), r.at(1, j)});
  auto targets = sample_targets(pre, 100, 3, 1.0);
  auto curve = defect_curve(pre, columns, {30, 598}, targets);
  CHECK(curve[1].defect < curve[0].defect);
  CHECK(curve[1].defect < 0.15);
}
