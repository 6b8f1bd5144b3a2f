#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "umet/growth.hpp"
#include "umet/polytope.hpp"

using namespace umet;

namespace {

bool same_point(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::fabs(a[i] - b[i]) > tol) return false;
  return true;
}

bool same_point_set(std::vector<std::vector<double>> a, std::vector<std::vector<double>> b,
                    double tol) {
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_point(a[i], b[i], tol)) return false;
  return true;
}

}  // namespace

TEST_CASE("closed form lists the seven admissible vertices of a triangle") {
  auto vs = triangle_vertices_closed_form(1.0, 1.0, 1.0);
  std::vector<std::vector<double>> expected{
      {0.5, 0.5, 0.5}, {1.5, 0.5, 0.5}, {0.5, 1.5, 0.5}, {0.5, 0.5, 1.5},
      {0.0, 1.0, 1.0}, {1.0, 0.0, 1.0}, {1.0, 1.0, 0.0}};
  REQUIRE(vs.size() == 7);
  CHECK(same_point_set(vs, expected, 1e-9));
  CHECK_THROWS_AS(triangle_vertices_closed_form(1.0, 2.0, 3.0), input_error);
}

TEST_CASE("closed form matches brute-force vertex enumeration on random triangles") {
  rng g(21);
  for (int trial = 0; trial < 50; ++trial) {
    double al = g.uniform(0.5, 2.0);
    double be = g.uniform(0.5, 2.0);
    double lo = std::fabs(al - be) + 0.05, hi = al + be - 0.05;
    if (lo >= hi) continue;
    double ga = g.uniform(lo, hi);
    auto closed = triangle_vertices_closed_form(al, be, ga);
    auto brute = oracle::vertices_3d(al, be, ga);
    REQUIRE(closed.size() == 7);
    CHECK(same_point_set(closed, brute, 1e-8));
  }
}

TEST_CASE("extreme points of a two-point base match the oracle") {
  for (double c : {0.5, 1.0, 1.5, 3.0}) {
    distance_matrix r(2, {c});
    auto vs = extreme_points(r);
    auto brute = oracle::vertices_2d(c);
    CHECK(same_point_set(vs.vertices, brute, 1e-9));
    REQUIRE(vs.recession_rays.size() == 1);
    CHECK(vs.recession_rays[0][0] == doctest::Approx(1.0));
    CHECK(vs.recession_rays[0][1] == doctest::Approx(1.0));
  }
}

TEST_CASE("extreme points of a triangle base match the closed form") {
  distance_matrix r(3, {1.0, 1.5, 2.0});
  auto vs = extreme_points(r);
  auto closed = triangle_vertices_closed_form(1.0, 1.5, 2.0);
  CHECK(same_point_set(vs.vertices, closed, 1e-9));
  REQUIRE(vs.recession_rays.size() == 1);
  for (double x : vs.recession_rays[0]) CHECK(x == doctest::Approx(1.0));
}

TEST_CASE("vertex enumeration is capped beyond six points") {
  auto gamma = gamma_spec::parse("unif:0,1");
  auto chain = sample_nu_gamma(7, gamma, 3);
  CHECK_THROWS_AS(extreme_points(chain.matrix), capability_error);
}

TEST_CASE("recession cone of a proper matrix is the all-ones ray") {
  auto gamma = gamma_spec::parse("unif:0,1");
  for (int n = 3; n <= 6; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      auto chain = sample_nu_gamma(n, gamma, std::uint64_t(40 + 10 * n + trial));
      auto rec = recession_cone(chain.matrix);
      CHECK(rec.base_proper);
      REQUIRE(rec.rays.size() == 1);
      for (double x : rec.rays[0]) CHECK(x == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("improper bases widen the recession cone") {
  distance_matrix r = distance_matrix::zero(3);
  r.set(0, 1, 1.0);
  r.set(0, 2, 1.0);
  // d(2,3) = 0: points 2 and 3 coincide, so rays may move them jointly
  auto rec = recession_cone(r);
  CHECK_FALSE(rec.base_proper);
  CHECK(rec.rays.size() >= 1);
}

TEST_CASE("sampled admissible vectors land inside the vertex hull plus rays") {
  distance_matrix r(3, {1.0, 1.2, 1.8});
  auto vs = extreme_points(r);
  auto gamma = gamma_spec::parse("unif:0,1");
  auto chain = sample_nu_gamma(4, gamma, 55);
  // brute membership: subtract a multiple of the all-ones ray until some
  // coordinate reaches a hull facet, then check hull membership on a grid
  rng g(77);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a;
    std::size_t v1 = g.uniform_index(vs.vertices.size());
    std::size_t v2 = g.uniform_index(vs.vertices.size());
    double w = g.next_double();
    double s = g.uniform(0.0, 2.0);
    for (int i = 0; i < 3; ++i)
      a.push_back(w * vs.vertices[v1][std::size_t(i)] +
                  (1.0 - w) * vs.vertices[v2][std::size_t(i)] + s);
    CHECK(is_admissible(r, a));
  }
}
