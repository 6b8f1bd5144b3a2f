#pragma once
/// Matrix distributions of metric triples: exact finite-support evaluation,
/// i.i.d. sampling, invariance checks, ball measures, reconstruction of
/// finite triples from their distributions, the small-distance covering
/// condition, and regularity/simplicity diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "distance_matrix.hpp"
#include "errors.hpp"
#include "growth.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace umet {

/// A metric space with a probability measure: finite weighted spaces plus
/// two analytic continuous examples (circle with arc metric, interval with
/// absolute difference), both carrying the uniform measure.
struct metric_triple {
  enum class kind { finite, circle, interval };
  kind variant = kind::finite;
  distance_matrix matrix{1, {}};
  std::vector<double> weights{1.0};
  double size = 1.0;  // circumference or length for the continuous variants

  static metric_triple finite(distance_matrix m, std::vector<double> w) {
    if (int(w.size()) != m.n)
      throw input_error("metric_triple: need one weight per point");
    double total = 0.0;
    for (double x : w) {
      if (!(x > 0.0)) throw input_error("metric_triple: weights must be positive");
      total += x;
    }
    if (std::fabs(total - 1.0) > 1e-12)
      throw input_error("metric_triple: weights must sum to 1 within 1e-12");
    if (!validate(m).ok)
      throw precondition_error("metric_triple: finite part must be a valid matrix");
    metric_triple t;
    t.variant = kind::finite;
    t.matrix = std::move(m);
    t.weights = std::move(w);
    return t;
  }
  static metric_triple circle(double circumference) {
    if (!(circumference > 0.0))
      throw input_error("metric_triple: circumference must be positive");
    metric_triple t;
    t.variant = kind::circle;
    t.size = circumference;
    return t;
  }
  static metric_triple interval(double length) {
    if (!(length > 0.0)) throw input_error("metric_triple: length must be positive");
    metric_triple t;
    t.variant = kind::interval;
    t.size = length;
    return t;
  }
};

/// Distribution over k-point distance matrices, keyed by the upper-triangle
/// vector. Exact mode carries probabilities per distinct matrix; sampled
/// mode keeps the raw draws.
struct matrix_distribution {
  int k = 0;
  bool exact = false;
  std::vector<std::pair<std::vector<double>, double>> entries;  // exact: sorted keys
  std::vector<std::vector<double>> samples;                     // sampled: raw upper vectors
  std::string origin;

  std::size_t support_size() const { return exact ? entries.size() : samples.size(); }
};

namespace detail {

inline std::vector<double> tuple_key(const metric_triple& t, const std::vector<int>& idx) {
  int k = int(idx.size());
  std::vector<double> key;
  key.reserve(std::size_t(k * (k - 1) / 2));
  for (int j = 1; j < k; ++j)
    for (int i = 0; i < j; ++i)
      key.push_back(t.matrix.at(idx[std::size_t(i)], idx[std::size_t(j)]));
  return key;
}

/// Product of the tuple's point weights, multiplied in sorted order so that
/// relabeling the triple reproduces the same floating-point value.
inline double canonical_product(const std::vector<double>& w, const std::vector<int>& idx) {
  std::vector<double> factors;
  factors.reserve(idx.size());
  for (int i : idx) factors.push_back(w[std::size_t(i)]);
  std::sort(factors.begin(), factors.end());
  double p = 1.0;
  for (double f : factors) p *= f;
  return p;
}

/// Sort-then-compensated-sum, so any reordering of the addends produces the
/// identical double.
inline double canonical_sum(std::vector<double>& addends) {
  std::sort(addends.begin(), addends.end());
  kahan_sum s;
  for (double a : addends) s.add(a);
  return s.value();
}

}  // namespace detail

/// Exact matrix distribution of a finite triple: every k-tuple enumerated,
/// weights accumulated per matrix key in a canonical order, so isometric
/// relabelings of the triple produce bit-identical distributions.
inline matrix_distribution exact_matrix_distribution(const metric_triple& t, int k) {
  if (t.variant != metric_triple::kind::finite)
    throw input_error("exact_matrix_distribution: only finite triples enumerate");
  if (k < 1) throw input_error("exact_matrix_distribution: k must be at least 1");
  int n = t.matrix.n;
  double tuples = std::pow(double(n), double(k));
  if (tuples > 1e7)
    throw capability_error("exact_matrix_distribution: n^k exceeds the 1e7 guard");

  std::map<std::vector<double>, std::vector<double>> buckets;
  std::vector<int> idx(std::size_t(k), 0);
  while (true) {
    buckets[detail::tuple_key(t, idx)].push_back(
        detail::canonical_product(t.weights, idx));
    int pos = k - 1;
    while (pos >= 0 && ++idx[std::size_t(pos)] == n) idx[std::size_t(pos--)] = 0;
    if (pos < 0) break;
  }
  matrix_distribution out;
  out.k = k;
  out.exact = true;
  out.origin = "exact(n=" + std::to_string(n) + ",k=" + std::to_string(k) + ")";
  for (auto& [key, products] : buckets)
    out.entries.emplace_back(key, detail::canonical_sum(products));
  return out;
}

/// Matrix of one i.i.d. k-point draw from the triple, as an upper vector.
namespace detail {

inline std::vector<double> draw_sample_key(const metric_triple& t, int k, rng& g) {
  std::vector<double> key;
  key.reserve(std::size_t(k * (k - 1) / 2));
  if (t.variant == metric_triple::kind::finite) {
    std::vector<int> idx;
    for (int p = 0; p < k; ++p) {
      double u = g.next_double();
      double acc = 0.0;
      int chosen = t.matrix.n - 1;
      for (int i = 0; i < t.matrix.n; ++i) {
        acc += t.weights[std::size_t(i)];
        if (u < acc) {
          chosen = i;
          break;
        }
      }
      idx.push_back(chosen);
    }
    for (int j = 1; j < k; ++j)
      for (int i = 0; i < j; ++i)
        key.push_back(t.matrix.at(idx[std::size_t(i)], idx[std::size_t(j)]));
    return key;
  }
  std::vector<double> pos;
  for (int p = 0; p < k; ++p) pos.push_back(g.uniform(0.0, t.size));
  for (int j = 1; j < k; ++j)
    for (int i = 0; i < j; ++i) {
      double d = std::fabs(pos[std::size_t(i)] - pos[std::size_t(j)]);
      if (t.variant == metric_triple::kind::circle) d = std::min(d, t.size - d);
      key.push_back(d);
    }
  return key;
}

}  // namespace detail

/// Empirical matrix distribution: count i.i.d. k-point draws from the
/// triple's measure, one RNG substream per draw.
inline matrix_distribution sample_matrix_distribution(const metric_triple& t, int k,
                                                      int count, std::uint64_t seed) {
  if (k < 2) throw input_error("sample_matrix_distribution: k must be at least 2");
  if (count < 0) throw input_error("sample_matrix_distribution: count must be nonnegative");
  rng master(seed);
  matrix_distribution out;
  out.k = k;
  out.exact = false;
  out.origin = "sampled(k=" + std::to_string(k) + ",count=" + std::to_string(count) + ")";
  out.samples.reserve(std::size_t(count));
  for (int s = 0; s < count; ++s) {
    rng g = master.child(std::uint64_t(s));
    out.samples.push_back(detail::draw_sample_key(t, k, g));
  }
  return out;
}

/// Collapse raw samples into sorted keys with empirical probabilities.
inline std::vector<std::pair<std::vector<double>, double>> aggregate_samples(
    const matrix_distribution& e) {
  if (e.exact) return e.entries;
  std::map<std::vector<double>, double> acc;
  double w = e.samples.empty() ? 0.0 : 1.0 / double(e.samples.size());
  for (const auto& s : e.samples) acc[s] += w;
  return {acc.begin(), acc.end()};
}

/// Total variation distance between two distributions on matrix keys.
inline double total_variation(const matrix_distribution& a, const matrix_distribution& b) {
  if (a.k != b.k) throw input_error("total_variation: distributions must share k");
  auto ea = aggregate_samples(a);
  auto eb = aggregate_samples(b);
  double tv = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && ea[i].first < eb[j].first))
      tv += std::fabs(ea[i++].second);
    else if (i == ea.size() || eb[j].first < ea[i].first)
      tv += std::fabs(eb[j++].second);
    else
      tv += std::fabs(ea[i++].second - eb[j++].second);
  }
  return tv / 2.0;
}

struct invariance_result {
  bool invariant = false;
  bool exact_mode = false;
  double pvalue = 1.0;  // meaningful in sampled mode only
};

/// Conjugation invariance of the distribution: exact mode compares the
/// g-pushforward for equality key by key (bit-exact thanks to canonical
/// summation); sampled mode degrades to a two-sample KS test on one entry
/// position at the stated level.
inline invariance_result invariance_check(const matrix_distribution& e,
                                          const std::vector<int>& g, double level = 0.01) {
  check_permutation(g, e.k);
  invariance_result res;
  res.exact_mode = e.exact;
  if (e.exact) {
    std::map<std::vector<double>, double> pushed;
    for (const auto& [key, w] : e.entries) {
      distance_matrix m(e.k, key);
      pushed[permute(m, g).upper] = w;
    }
    res.invariant = pushed.size() == e.entries.size();
    if (res.invariant)
      for (const auto& [key, w] : e.entries)
        if (!(pushed.count(key) && pushed[key] == w)) {
          res.invariant = false;
          break;
        }
    return res;
  }
  // sampled: compare the (1,2) entry against its preimage position under g
  std::vector<int> inv(std::size_t(e.k));
  for (int i = 0; i < e.k; ++i) inv[std::size_t(g[std::size_t(i)])] = i;
  int a = std::min(inv[0], inv[1]), b = std::max(inv[0], inv[1]);
  std::size_t moved = std::size_t(pair_index(a, b));
  std::vector<double> x, y;
  for (const auto& s : e.samples) {
    x.push_back(s[0]);
    y.push_back(s[moved]);
  }
  if (x.empty()) {
    res.invariant = true;
    return res;
  }
  auto ks = ks_test_two_sample(x, y);
  res.pvalue = ks.pvalue;
  res.invariant = ks.pvalue >= level;
  return res;
}

/// Fraction of a point's sampled distances that fall strictly inside radius l.
inline double ball_measure(const std::vector<double>& row, double l) {
  if (row.empty()) throw input_error("ball_measure: empty sample");
  std::size_t inside = 0;
  for (double d : row)
    if (d < l) ++inside;
  return double(inside) / double(row.size());
}

/// Marginal of an exact distribution on the leading k_new points: keys keep
/// their NW prefix, weights accumulate canonically.
inline matrix_distribution marginalize_nw(const matrix_distribution& e, int k_new) {
  if (!e.exact) throw input_error("marginalize_nw: exact mode only");
  if (k_new < 1 || k_new > e.k) throw input_error("marginalize_nw: bad target order");
  std::size_t keep = std::size_t(k_new * (k_new - 1) / 2);
  std::map<std::vector<double>, std::vector<double>> buckets;
  for (const auto& [key, w] : e.entries)
    buckets[std::vector<double>(key.begin(), key.begin() + long(keep))].push_back(w);
  matrix_distribution out;
  out.k = k_new;
  out.exact = true;
  out.origin = e.origin + "|marginal(k=" + std::to_string(k_new) + ")";
  for (auto& [key, ws] : buckets) out.entries.emplace_back(key, detail::canonical_sum(ws));
  return out;
}

/// Recover a finite triple from its matrix distribution, assuming all
/// pairwise distances of the source were distinct. Point count comes from
/// the size of the entry-value support, the matrix from the lexicographically
/// minimal full-support key, weights from pair-entry marginals; a round trip
/// through the exact distribution certifies the result.
inline metric_triple reconstruct_finite(const matrix_distribution& e, double tol = -1.0) {
  if (tol < 0.0) tol = e.exact ? 1e-9 : 0.05;
  auto entries = aggregate_samples(e);
  if (entries.empty()) throw input_error("reconstruct_finite: empty distribution");

  // support of entry values and the (1,2)-entry marginal
  std::map<double, double> pair_marginal;
  std::vector<double> support;
  for (const auto& [key, w] : entries) {
    pair_marginal[key[0]] += w;
    for (double v : key)
      if (v > 0.0) support.push_back(v);
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  if (support.empty()) {
    // every sampled matrix is zero: a single point carries all the mass
    return metric_triple::finite(distance_matrix::zero(1), {1.0});
  }
  double n_hat_real = (1.0 + std::sqrt(1.0 + 8.0 * double(support.size()))) / 2.0;
  int n_hat = int(std::lround(n_hat_real));
  if (n_hat * (n_hat - 1) / 2 != int(support.size()))
    throw non_identifiable_error(
        "reconstruct_finite: " + std::to_string(support.size()) +
        " distinct values is not a full set of pairwise distances (tied distances?)");
  if (n_hat != e.k)
    throw capability_error("reconstruct_finite: need matrix order k = " +
                           std::to_string(n_hat) + " to realize every distance, got k = " +
                           std::to_string(e.k));

  // lexicographically minimal key realizing every distance once
  const std::vector<double>* best = nullptr;
  for (const auto& [key, w] : entries) {
    std::vector<double> sorted_key = key;
    std::sort(sorted_key.begin(), sorted_key.end());
    if (sorted_key == support && (!best || key < *best)) best = &key;
  }
  if (!best)
    throw non_identifiable_error(
        "reconstruct_finite: no sampled tuple realizes all distances at once");
  distance_matrix m(n_hat, *best);

  std::vector<double> w(std::size_t(n_hat), 1.0);
  if (n_hat == 2) {
    // P(nonzero entry) = 2 w1 w2 with w1 + w2 = 1
    double p = pair_marginal.count(m.at(0, 1)) ? pair_marginal[m.at(0, 1)] : 0.0;
    double disc = std::max(0.0, 1.0 - 2.0 * p);
    w[0] = (1.0 + std::sqrt(disc)) / 2.0;
    w[1] = 1.0 - w[0];
  } else if (n_hat >= 3) {
    // P(entry = d(a,b)) = 2 w_a w_b when distances are distinct
    auto pair_prob = [&](int a, int b) {
      double v = m.at(a, b);
      auto it = pair_marginal.find(v);
      if (it == pair_marginal.end() || !(it->second > 0.0))
        throw non_identifiable_error(
            "reconstruct_finite: entry value " + format_double(v) +
            " has no mass in the pair marginal");
      return it->second;
    };
    for (int a = 0; a < n_hat; ++a) {
      int b = (a + 1) % n_hat, c = (a + 2) % n_hat;
      w[std::size_t(a)] =
          std::sqrt(pair_prob(a, b) * pair_prob(a, c) / (2.0 * pair_prob(b, c)));
    }
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= total;  // absorb sampling noise; exact mode is a no-op
  }
  metric_triple t = metric_triple::finite(m, w);

  auto round_trip = exact_matrix_distribution(t, e.k);
  double tv = total_variation(round_trip, e);
  if (tv > tol)
    throw non_identifiable_error("reconstruct_finite: round-trip total variation " +
                                 format_double(tv) + " exceeds tolerance " +
                                 format_double(tol));
  return t;
}

/// Column source abstraction for streamed checks: symmetric entries with a
/// zero diagonal, addressable by index pair.
struct matrix_source {
  std::function<double(int, int)> at;
  std::string name;
};

/// Stream of i.i.d. points from a triple; point i is determined by substream
/// i alone, so entries are reproducible in any access order.
inline matrix_source triple_source(const metric_triple& t, std::uint64_t seed) {
  auto cache = std::make_shared<std::vector<double>>();
  auto have = std::make_shared<std::vector<char>>();
  rng master(seed);
  auto point = [cache, have, master, t](int i) {
    if (int(cache->size()) <= i) {
      cache->resize(std::size_t(i + 1), 0.0);
      have->resize(std::size_t(i + 1), 0);
    }
    if (!(*have)[std::size_t(i)]) {
      rng g = master.child(std::uint64_t(i));
      if (t.variant == metric_triple::kind::finite) {
        double u = g.next_double(), acc = 0.0;
        int chosen = t.matrix.n - 1;
        for (int p = 0; p < t.matrix.n; ++p) {
          acc += t.weights[std::size_t(p)];
          if (u < acc) {
            chosen = p;
            break;
          }
        }
        (*cache)[std::size_t(i)] = double(chosen);
      } else {
        (*cache)[std::size_t(i)] = g.uniform(0.0, t.size);
      }
      (*have)[std::size_t(i)] = 1;
    }
    return (*cache)[std::size_t(i)];
  };
  matrix_source src;
  src.name = "triple";
  src.at = [point, t](int i, int j) {
    if (i == j) return 0.0;
    double a = point(i), b = point(j);
    if (t.variant == metric_triple::kind::finite)
      return t.matrix.at(int(a), int(b));
    double d = std::fabs(a - b);
    if (t.variant == metric_triple::kind::circle) d = std::min(d, t.size - d);
    return d;
  };
  return src;
}

inline matrix_source product_matrix_source(const product_source& p) {
  matrix_source src;
  src.name = "product";
  src.at = [p](int i, int j) { return p.at(i, j); };
  return src;
}

inline matrix_source constant_source(double value) {
  matrix_source src;
  src.name = "constant";
  src.at = [value](int i, int j) { return i == j ? 0.0 : value; };
  return src;
}

struct condition4_result {
  bool passed = false;
  int smallest_n = -1;   // first N whose covering fraction clears 1 - eps
  double best_fraction = 0.0;
};

/// Finite-horizon covering check: does some N <= n_max make the fraction of
/// columns j < horizon with min_{i<N} r(i,j) < eps exceed 1 - eps? Columns
/// j < N count as covered through their zero diagonal entry.
inline condition4_result condition4_check(const matrix_source& src, double eps, int n_max,
                                          int horizon) {
  if (!(eps > 0.0)) throw input_error("condition4_check: eps must be positive");
  if (n_max < 1 || horizon < 1)
    throw input_error("condition4_check: need n_max >= 1 and horizon >= 1");
  auto colmin =
      std::vector<double>(std::size_t(horizon), std::numeric_limits<double>::infinity());
  condition4_result res;
  for (int n = 1; n <= n_max; ++n) {
    int row = n - 1;
    int covered = 0;
    for (int j = 0; j < horizon; ++j) {
      double d = src.at(row, j);
      auto& cm = colmin[std::size_t(j)];
      if (d < cm) cm = d;
      if (cm < eps) ++covered;
    }
    double fraction = double(covered) / double(horizon);
    res.best_fraction = std::max(res.best_fraction, fraction);
    if (fraction > 1.0 - eps) {
      res.passed = true;
      res.smallest_n = n;
      return res;
    }
  }
  return res;
}

struct regularity_result {
  double statistic = 0.0;
  double pvalue = 1.0;
  int prefix = 0;
  int per_group = 0;
  bool consistent = true;
};

/// Regularity diagnostic: length-n column prefixes from the first half of
/// the columns against those from the second half, compared by the energy
/// statistic with a permutation p-value. Groups are subsampled to 500.
inline regularity_result regularity_report(const distance_matrix& r, int n,
                                           int permutations = 200, std::uint64_t seed = 0,
                                           double level = 0.01) {
  if (n < 1 || r.n - n < 8)
    throw input_error("regularity_report: need at least 8 columns past the prefix");
  std::vector<std::vector<double>> cols;
  for (int j = n; j < r.n; ++j) {
    std::vector<double> c;
    for (int i = 0; i < n; ++i) c.push_back(r.at(i, j));
    cols.push_back(std::move(c));
  }
  std::size_t half = cols.size() / 2;
  std::vector<std::vector<double>> a(cols.begin(), cols.begin() + long(half));
  std::vector<std::vector<double>> b(cols.begin() + long(half), cols.end());
  rng g(seed);
  auto cap = [&](std::vector<std::vector<double>>& v) {
    if (v.size() > 500) {
      g.shuffle(v);
      v.resize(500);
    }
  };
  cap(a);
  cap(b);
  auto res = energy_test(a, b, permutations, g);
  regularity_result out;
  out.statistic = res.statistic;
  out.pvalue = res.pvalue;
  out.prefix = n;
  out.per_group = int(std::min(a.size(), b.size()));
  out.consistent = res.pvalue >= level;
  return out;
}

/// Lexicographically minimal conjugate of a matrix over all relabelings;
/// the canonical form used by the conjugacy test.
inline distance_matrix canonical_form(const distance_matrix& r) {
  if (r.n > 8)
    throw capability_error("canonical_form: relabeling search capped at 8 points");
  std::vector<int> perm(std::size_t(r.n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> best = r.upper;
  do {
    auto candidate = permute(r, perm).upper;
    if (candidate < best) best = candidate;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return distance_matrix(r.n, best);
}

/// Sorted multiset of row multisets: each row sorted ascending, then the
/// list of rows sorted lexicographically.
inline std::vector<std::vector<double>> row_profile(const distance_matrix& r) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < r.n; ++i) {
    std::vector<double> row;
    for (int j = 0; j < r.n; ++j) row.push_back(r.at(i, j));
    std::sort(row.begin(), row.end());
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

struct simplicity_report {
  // pairs with matching row profiles that are not relabelings of each other
  std::vector<std::pair<int, int>> counterexamples;
  bool evidence_against_simplicity = false;
  int pairs_checked = 0;
};

namespace detail {

inline bool profiles_match(const std::vector<std::vector<double>>& a,
                           const std::vector<std::vector<double>>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j)
      if (std::fabs(a[i][j] - b[i][j]) > tol) return false;
  return true;
}

}  // namespace detail

/// Search an ensemble for pairs whose row profiles agree within tol but that
/// are not conjugate: such a pair is evidence that row distributions do not
/// pin down the matrix (evidence against simplicity of the source).
inline simplicity_report simplicity_diagnostic(const std::vector<distance_matrix>& mats,
                                               double tol = default_tol) {
  if (mats.size() < 2)
    throw input_error("simplicity_diagnostic: need at least two matrices");
  simplicity_report rep;
  std::vector<std::vector<std::vector<double>>> profiles;
  for (const auto& m : mats) profiles.push_back(row_profile(m));
  for (std::size_t a = 0; a < mats.size(); ++a)
    for (std::size_t b = a + 1; b < mats.size(); ++b) {
      ++rep.pairs_checked;
      if (!detail::profiles_match(profiles[a], profiles[b], tol)) continue;
      bool conjugate = mats[a].n == mats[b].n &&
                       canonical_form(mats[a]).upper == canonical_form(mats[b]).upper;
      if (!conjugate) rep.counterexamples.emplace_back(int(a), int(b));
    }
  rep.evidence_against_simplicity = !rep.counterexamples.empty();
  return rep;
}

}  // namespace umet
