#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "oracles.hpp"
#include "umet/mdist.hpp"

using namespace umet;

namespace {

oracle::mat to_oracle(const distance_matrix& r) {
  oracle::mat m = oracle::make_mat(r.n);
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j < r.n; ++j) m[std::size_t(i)][std::size_t(j)] = r.at(i, j);
  return m;
}

/// Oracle keys are k x k row-major; convert to the library's pair layout.
std::map<std::vector<double>, double> oracle_as_pairs(
    const std::map<std::vector<double>, double>& full, int k) {
  std::map<std::vector<double>, double> out;
  for (const auto& [key, w] : full) {
    std::vector<double> pairs(std::size_t(k * (k - 1) / 2), 0.0);
    for (int j = 1; j < k; ++j)
      for (int i = 0; i < j; ++i)
        pairs[std::size_t(pair_index(i, j))] = key[std::size_t(i) * std::size_t(k) + std::size_t(j)];
    out[pairs] += w;
  }
  return out;
}

double tv_against_oracle(const matrix_distribution& e,
                         const std::map<std::vector<double>, double>& ora) {
  std::map<std::vector<double>, double> lib;
  for (const auto& [key, w] : e.entries) lib[key] = w;
  double tv = 0.0;
  for (const auto& [key, w] : ora) tv += std::fabs(w - (lib.count(key) ? lib[key] : 0.0));
  for (const auto& [key, w] : lib)
    if (!ora.count(key)) tv += w;
  return tv / 2.0;
}

metric_triple permuted_copy(const metric_triple& t, const std::vector<int>& g) {
  auto m = permute(t.matrix, g);
  std::vector<double> w(t.weights.size());
  for (std::size_t i = 0; i < g.size(); ++i) w[std::size_t(g[i])] = t.weights[i];
  return metric_triple::finite(std::move(m), std::move(w));
}

}  // namespace

TEST_CASE("triple factories validate their inputs") {
  CHECK_THROWS_AS(metric_triple::finite(distance_matrix(3, {1.0, 2.0, 2.5}), {0.5, 0.5}),
                  input_error);
  CHECK_THROWS_AS(metric_triple::finite(distance_matrix(2, {1.0}), {0.9, 0.3}),
                  input_error);
  CHECK_THROWS_AS(metric_triple::circle(0.0), input_error);
  CHECK_THROWS_AS(metric_triple::interval(-1.0), input_error);
}

TEST_CASE("exact distributions match brute-force tuple enumeration") {
  auto t = metric_triple::finite(distance_matrix(3, {1.0, 2.0, 2.5}), {0.2, 0.3, 0.5});
  for (int k : {2, 3, 4}) {
    auto exact = exact_matrix_distribution(t, k);
    auto ora = oracle_as_pairs(
        oracle::exact_distribution(to_oracle(t.matrix), t.weights, k), k);
    CHECK(tv_against_oracle(exact, ora) <= 1e-12);
  }
  auto t4 = metric_triple::finite(distance_matrix(4, {1.0, 2.0, 2.5, 1.4, 1.9, 0.8}),
                                  {0.1, 0.2, 0.3, 0.4});
  auto exact = exact_matrix_distribution(t4, 3);
  auto ora = oracle_as_pairs(
      oracle::exact_distribution(to_oracle(t4.matrix), t4.weights, 3), 3);
  CHECK(tv_against_oracle(exact, ora) <= 1e-12);
}

TEST_CASE("relabeled triples produce bit-identical exact distributions") {
  auto t = metric_triple::finite(distance_matrix(4, {1.0, 2.0, 2.5, 1.4, 1.9, 0.8}),
                                 {0.125, 0.25, 0.375, 0.25});
  rng g(3);
  for (int trial = 0; trial < 6; ++trial) {
    auto perm = g.permutation(4);
    auto a = exact_matrix_distribution(t, 3);
    auto b = exact_matrix_distribution(permuted_copy(t, perm), 3);
    REQUIRE(a.entries.size() == b.entries.size());
    CHECK(a.entries == b.entries);
  }
}

TEST_CASE("exact distributions are conjugation invariant") {
  auto t = metric_triple::finite(distance_matrix(3, {1.0, 2.0, 2.5}), {0.2, 0.3, 0.5});
  auto e = exact_matrix_distribution(t, 3);
  auto res = invariance_check(e, {2, 0, 1});
  CHECK(res.exact_mode);
  CHECK(res.invariant);
}

TEST_CASE("marginalizing the leading block matches the direct distribution") {
  auto t = metric_triple::finite(distance_matrix(4, {1.0, 2.0, 2.5, 1.4, 1.9, 0.8}),
                                 {0.1, 0.2, 0.3, 0.4});
  auto big = exact_matrix_distribution(t, 4);
  auto marg = marginalize_nw(big, 3);
  auto direct = exact_matrix_distribution(t, 3);
  double tv = total_variation(marg, direct);
  CHECK(tv <= 1e-12);
  CHECK_THROWS_AS(marginalize_nw(big, 5), input_error);
}

TEST_CASE("sampled distributions converge to the exact one") {
  auto t = metric_triple::finite(distance_matrix(3, {1.0, 2.0, 2.5}), {0.2, 0.3, 0.5});
  auto exact = exact_matrix_distribution(t, 3);
  auto sampled = sample_matrix_distribution(t, 3, 20000, 17);
  CHECK_FALSE(sampled.exact);
  CHECK(sampled.samples.size() == 20000);
  CHECK(total_variation(sampled, exact) < 0.05);
}

TEST_CASE("total variation is zero on itself and symmetric") {
  auto t = metric_triple::finite(distance_matrix(3, {1.0, 2.0, 2.5}), {0.2, 0.3, 0.5});
  auto a = exact_matrix_distribution(t, 2);
  auto s = metric_triple::finite(distance_matrix(3, {1.0, 2.0, 2.5}), {0.5, 0.3, 0.2});
  auto b = exact_matrix_distribution(s, 2);
  CHECK(total_variation(a, a) == 0.0);
  CHECK(total_variation(a, b) == doctest::Approx(total_variation(b, a)));
  CHECK(total_variation(a, b) > 0.0);
}

TEST_CASE("reconstruction recovers triples with distinct distances exactly") {
  auto t3 = metric_triple::finite(distance_matrix(3, {1.0, 2.0, 2.5}), {0.2, 0.3, 0.5});
  auto t4 = metric_triple::finite(distance_matrix(4, {1.0, 2.0, 2.5, 1.4, 1.9, 0.8}),
                                  {0.125, 0.25, 0.375, 0.25});
  for (const auto& t : {t3, t4}) {
    int n = t.matrix.n;
    auto e = exact_matrix_distribution(t, n);
    auto back = reconstruct_finite(e);
    auto round = exact_matrix_distribution(back, n);
    CHECK(total_variation(round, e) <= 1e-9);
  }
}

TEST_CASE("reconstruction refuses undersized orders and tied distances") {
  auto t = metric_triple::finite(distance_matrix(3, {1.0, 2.0, 2.5}), {0.2, 0.3, 0.5});
  CHECK_THROWS_AS(reconstruct_finite(exact_matrix_distribution(t, 2)), capability_error);
  auto tied = metric_triple::finite(distance_matrix(3, {1.0, 1.0, 1.5}), {0.2, 0.3, 0.5});
  CHECK_THROWS_AS(reconstruct_finite(exact_matrix_distribution(tied, 3)),
                  non_identifiable_error);
}

TEST_CASE("covering check passes a concentrated triple and fails spread ones") {
  auto t = metric_triple::finite(distance_matrix(3, {1.0, 2.0, 2.5}), {0.2, 0.3, 0.5});
  auto res = condition4_check(triple_source(t, 5), 0.25, 100, 400);
  CHECK(res.passed);
  CHECK(res.smallest_n >= 1);

  product_source prod{5, entry_spec(0.5, 1.0)};
  auto pres = condition4_check(product_matrix_source(prod), 0.25, 100, 400);
  CHECK_FALSE(pres.passed);
  CHECK(pres.best_fraction == doctest::Approx(0.25).epsilon(0.05));

  auto cres = condition4_check(constant_source(1.0), 0.25, 100, 400);
  CHECK_FALSE(cres.passed);

  CHECK_THROWS_AS(condition4_check(constant_source(1.0), 0.0, 100, 400), input_error);
}

TEST_CASE("circle and interval pair distances follow their closed-form laws") {
  auto c = metric_triple::circle(2.0);
  auto cd = sample_matrix_distribution(c, 2, 4000, 21);
  std::vector<double> arc;
  for (const auto& s : cd.samples) arc.push_back(s[0]);
  CHECK(ks_test(arc, [](double x) { return oracle::circle_pair_cdf(x, 2.0); }).pvalue >
        0.01);

  auto iv = metric_triple::interval(3.0);
  auto id = sample_matrix_distribution(iv, 2, 4000, 22);
  std::vector<double> gap;
  for (const auto& s : id.samples) gap.push_back(s[0]);
  CHECK(ks_test(gap, [](double x) { return oracle::interval_pair_cdf(x, 3.0); }).pvalue >
        0.01);
}

TEST_CASE("triple sources stream reproducible symmetric entries") {
  auto t = metric_triple::finite(distance_matrix(3, {1.0, 2.0, 2.5}), {0.2, 0.3, 0.5});
  auto a = triple_source(t, 9);
  auto b = triple_source(t, 9);
  for (int i = 0; i < 6; ++i) {
    CHECK(a.at(i, i) == 0.0);
    for (int j = 0; j < 6; ++j) {
      CHECK(a.at(i, j) == b.at(j, i));
      CHECK(a.at(i, j) == a.at(j, i));
    }
  }
}

TEST_CASE("regularity diagnostic accepts i.i.d. columns and flags drift") {
  auto t = metric_triple::finite(distance_matrix(3, {1.0, 2.0, 2.5}), {0.2, 0.3, 0.5});
  auto src = triple_source(t, 31);
  const int points = 300;
  distance_matrix r = distance_matrix::zero(points);
  for (int j = 1; j < points; ++j)
    for (int i = 0; i < j; ++i) r.set(i, j, src.at(i, j));
  auto res = regularity_report(r, 3, 200, 7, 0.01);
  CHECK(res.consistent);
  CHECK(res.prefix == 3);

  rng g(8);
  distance_matrix drift = distance_matrix::zero(points);
  for (int j = 1; j < points; ++j)
    for (int i = 0; i < j; ++i)
      drift.set(i, j, j < points / 2 ? g.uniform(0.5, 0.6) : g.uniform(0.9, 1.0));
  auto dres = regularity_report(drift, 3, 200, 7, 0.01);
  CHECK_FALSE(dres.consistent);

  CHECK_THROWS_AS(regularity_report(r, 295, 200, 7, 0.01), input_error);
}

TEST_CASE("ball measure counts strict inclusions") {
  CHECK(ball_measure({0.1, 0.5, 0.9, 1.5}, 1.0) == doctest::Approx(0.75));
  CHECK_THROWS_AS(ball_measure({}, 1.0), input_error);
}

TEST_CASE("conjugate matrices never count as evidence against simplicity") {
  entry_spec spec(0.5, 1.0);
  std::vector<distance_matrix> mats;
  for (int s = 0; s < 6; ++s) mats.push_back(sample_product_half_one(6, spec, 400 + s));
  rng g(12);
  mats.push_back(permute(mats.front(), g.permutation(6)));
  auto rep = simplicity_diagnostic(mats);
  CHECK_FALSE(rep.evidence_against_simplicity);
  CHECK(rep.pairs_checked == 21);
}
