#pragma once
/// Markov growth of random distance matrices: attach one point at a time,
/// first-row entries i.i.d. from a base distribution, every later coordinate
/// uniform on its feasibility interval. Includes the bounded-diameter mode,
/// ensemble generation, symmetrization, the i.i.d. [1/2,1] product measure,
/// and a shift-stationarity diagnostic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "distance_matrix.hpp"
#include "errors.hpp"
#include "format.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace umet {

/// Base distribution for first-row entries. The uniform variant is reserved
/// for the bounded-diameter mode; the unbounded kinds have full support on
/// the positive axis.
struct gamma_spec {
  enum class kind { uniform, exponential, half_normal };
  kind k = kind::exponential;
  double lo = 0.0, hi = 1.0;  // uniform bounds
  double rate = 1.0;          // exponential
  double scale = 1.0;         // half-normal

  static gamma_spec uniform(double lo, double hi) {
    if (!(lo >= 0.0) || !(hi > lo))
      throw input_error("gamma_spec: uniform needs 0 <= lo < hi");
    gamma_spec g;
    g.k = kind::uniform;
    g.lo = lo;
    g.hi = hi;
    return g;
  }
  static gamma_spec exponential(double rate = 1.0) {
    if (!(rate > 0.0)) throw input_error("gamma_spec: exponential rate must be positive");
    gamma_spec g;
    g.k = kind::exponential;
    g.rate = rate;
    return g;
  }
  static gamma_spec half_normal(double scale = 1.0) {
    if (!(scale > 0.0)) throw input_error("gamma_spec: half-normal scale must be positive");
    gamma_spec g;
    g.k = kind::half_normal;
    g.scale = scale;
    return g;
  }

  /// One draw, consuming exactly one generator value for every kind.
  double draw(rng& g) const {
    switch (k) {
      case kind::uniform:
        return g.uniform(lo, hi);
      case kind::exponential:
        return g.exponential(rate);
      case kind::half_normal:
        return inverse_normal_cdf(0.5 + 0.5 * g.next_double()) * scale;
    }
    return 0.0;
  }

  double cdf(double x) const {
    if (x <= 0.0) return 0.0;
    switch (k) {
      case kind::uniform:
        return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
      case kind::exponential:
        return -std::expm1(-rate * x);
      case kind::half_normal:
        return std::erf(x / (scale * std::sqrt(2.0)));
    }
    return 0.0;
  }

  std::string to_string() const {
    switch (k) {
      case kind::uniform:
        return "unif:" + format_double(lo) + "," + format_double(hi);
      case kind::exponential:
        return "exp:" + format_double(rate);
      case kind::half_normal:
        return "halfnorm:" + format_double(scale);
    }
    return "";
  }

  /// Accepts "unif:lo,hi", "exp:rate", "halfnorm:scale".
  static gamma_spec parse(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
      throw input_error("gamma_spec: expected kind:params, got '" + text + "'");
    std::string head = text.substr(0, colon);
    std::string tail = text.substr(colon + 1);
    auto read_numbers = [&](std::size_t want) {
      std::vector<double> vals;
      std::size_t pos = 0;
      while (pos <= tail.size()) {
        auto comma = tail.find(',', pos);
        std::string piece = tail.substr(pos, comma == std::string::npos ? std::string::npos
                                                                        : comma - pos);
        try {
          std::size_t used = 0;
          vals.push_back(std::stod(piece, &used));
          if (used != piece.size()) throw std::invalid_argument(piece);
        } catch (const std::exception&) {
          throw input_error("gamma_spec: bad number '" + piece + "' in '" + text + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (vals.size() != want)
        throw input_error("gamma_spec: '" + head + "' takes " + std::to_string(want) +
                          " parameter(s), got " + std::to_string(vals.size()));
      return vals;
    };
    if (head == "unif") {
      auto v = read_numbers(2);
      return uniform(v[0], v[1]);
    }
    if (head == "exp") return exponential(read_numbers(1)[0]);
    if (head == "halfnorm") return half_normal(read_numbers(1)[0]);
    throw input_error("gamma_spec: unknown kind '" + head +
                      "' (expected unif, exp, or halfnorm)");
  }
};

/// One grown matrix together with the attachment vectors that produced it.
/// Replaying the steps through extend reconstructs the matrix bit for bit.
struct growth_chain {
  distance_matrix matrix{1, {}};
  std::vector<std::vector<double>> steps;  // steps[k-1] attaches point k+1
  std::uint64_t seed = 0;                  // master seed of the producing run
  std::uint64_t chain_index = 0;           // stream index under that seed
  gamma_spec gamma;
  double bound = 0.0;  // positive iff the bounded-diameter mode was used
  double p = 1.0;      // triangle-inequality exponent the chain was grown under
};

namespace detail {

inline double pow_p(double x, double p) { return p == 1.0 ? x : std::pow(x, p); }
inline double root_p(double x, double p) { return p == 1.0 ? x : std::pow(x, 1.0 / p); }

/// Feasibility interval for the next coordinate of an attachment vector,
/// computed in the p-th power domain with endpoints rooted back once.
/// prefix holds the already drawn coordinates; the bounded entry caps the
/// interval when positive.
inline std::pair<double, double> coordinate_interval_p(const distance_matrix& r,
                                                       const std::vector<double>& prefix,
                                                       double p, double bound) {
  int m = int(prefix.size());
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    double ai = pow_p(prefix[std::size_t(i)], p);
    double ri = pow_p(r.at(i, m), p);
    lo = std::max(lo, std::fabs(ai - ri));
    hi = std::min(hi, ai + ri);
  }
  if (bound > 0.0) hi = std::min(hi, pow_p(bound, p));
  hi = std::max(hi, lo);  // guard against rounding inversion
  return {root_p(lo, p), root_p(hi, p)};
}

/// Attachment vector for the point with index k (0-based), truncated to the
/// first coord_limit coordinates. Draw order per step: coordinate 0 from the
/// base distribution, then one uniform per later coordinate in index order.
inline std::vector<double> draw_step(rng step_rng, const distance_matrix& r, int k,
                                     const gamma_spec& gamma, double bound, double p,
                                     int coord_limit) {
  std::vector<double> a;
  int limit = std::min(k, coord_limit);
  a.reserve(std::size_t(limit));
  for (int m = 0; m < limit; ++m) {
    if (m == 0) {
      a.push_back(gamma.draw(step_rng));
    } else {
      auto [lo, hi] = coordinate_interval_p(r, a, p, bound);
      a.push_back(step_rng.uniform(lo, hi));
    }
  }
  return a;
}

/// Full chain under one stream: step k consumes the substream chain.child(k),
/// so a truncated replay of any step reproduces the same leading draws.
inline growth_chain run_chain(const rng& chain_rng, int n, const gamma_spec& gamma,
                              double bound, double p) {
  growth_chain out;
  out.gamma = gamma;
  out.bound = bound;
  out.p = p;
  distance_matrix r = distance_matrix::zero(1);
  for (int k = 1; k < n; ++k) {
    auto a = draw_step(chain_rng.child(std::uint64_t(k)), r, k, gamma, bound, p, k);
    r = extend(r, a);
    out.steps.push_back(std::move(a));
  }
  out.matrix = std::move(r);
  return out;
}

}  // namespace detail

/// One conditional draw of the growth kernel: uniform on the feasibility
/// interval of the next coordinate given the already drawn prefix.
inline double kernel_draw(rng& g, const distance_matrix& r, const std::vector<double>& prefix,
                          double bound = 0.0) {
  if (prefix.empty() && !(bound > 0.0))
    throw input_error("kernel_draw: empty prefix has an unbounded interval; "
                      "the first coordinate comes from the base distribution");
  auto [lo, hi] = detail::coordinate_interval_p(r, prefix, 1.0, bound);
  return g.uniform(lo, hi);
}

/// Grow an n-point matrix under the unbounded-mode kernel. Deterministic in
/// the seed; n = 1 yields the one-point matrix without consuming draws.
inline growth_chain sample_nu_gamma(int n, const gamma_spec& gamma, std::uint64_t seed) {
  if (n < 1) throw input_error("sample_nu_gamma: n must be at least 1");
  rng master(seed);
  growth_chain out = detail::run_chain(master.child(0), n, gamma, 0.0, 1.0);
  out.seed = seed;
  out.chain_index = 0;
  return out;
}

/// Bounded-diameter mode: base distribution uniform(0, b) and every
/// feasibility interval intersected with [0, b].
inline growth_chain sample_bounded(int n, double b, std::uint64_t seed) {
  if (!(b > 0.0)) throw input_error("sample_bounded: bound must be positive");
  if (n < 1) throw input_error("sample_bounded: n must be at least 1");
  rng master(seed);
  growth_chain out = detail::run_chain(master.child(0), n, gamma_spec::uniform(0.0, b), b, 1.0);
  out.seed = seed;
  out.chain_index = 0;
  return out;
}

/// Independent chains under one master seed; chain c uses stream child(c),
/// so ensembles are reproducible regardless of job count and the c = 0 chain
/// equals the single-sample call.
inline std::vector<growth_chain> sample_ensemble(int n, int count, const gamma_spec& gamma,
                                                 std::uint64_t seed, double bound = 0.0,
                                                 int jobs = 1) {
  if (n < 1) throw input_error("sample_ensemble: n must be at least 1");
  if (count < 0) throw input_error("sample_ensemble: count must be nonnegative");
  rng master(seed);
  auto chains = std::vector<growth_chain>(std::size_t(count));
  parallel_for(count, jobs, [&](int c) {
    chains[std::size_t(c)] =
        detail::run_chain(master.child(std::uint64_t(c)), n, gamma, bound, 1.0);
    chains[std::size_t(c)].seed = seed;
    chains[std::size_t(c)].chain_index = std::uint64_t(c);
  });
  return chains;
}

/// First p coordinates of every step, plus the full matrix on the first p
/// points. Because each step has its own substream, the values agree bit for
/// bit with the corresponding prefix of a full sample at the same seed.
struct prefix_rows_sample {
  distance_matrix prefix{1, {}};             // distances among the first min(n, p) points
  std::vector<std::vector<double>> columns;  // for j in [p, n): distances to the first p points
};

inline prefix_rows_sample sample_prefix_rows(int n, int p, const gamma_spec& gamma,
                                             std::uint64_t seed, double bound = 0.0,
                                             std::uint64_t chain_index = 0) {
  if (n < 1 || p < 1) throw input_error("sample_prefix_rows: need n >= 1 and p >= 1");
  rng chain = rng(seed).child(chain_index);
  prefix_rows_sample out;
  distance_matrix r = distance_matrix::zero(1);
  for (int k = 1; k < std::min(n, p); ++k)
    r = extend(r, detail::draw_step(chain.child(std::uint64_t(k)), r, k, gamma, bound, 1.0, k));
  out.prefix = r;
  for (int k = std::max(1, p); k < n; ++k)
    out.columns.push_back(
        detail::draw_step(chain.child(std::uint64_t(k)), r, k, gamma, bound, 1.0, p));
  return out;
}

/// Conjugate every matrix by an independent uniform random permutation; one
/// sampled term of the symmetrized (Cesaro) measure, not its exact limit.
inline std::vector<distance_matrix> symmetrize_sample(const std::vector<distance_matrix>& mats,
                                                      std::uint64_t seed) {
  for (const auto& m : mats)
    if (m.n != mats.front().n)
      throw input_error("symmetrize_sample: matrices must share one size");
  rng master(seed);
  std::vector<distance_matrix> out;
  out.reserve(mats.size());
  for (std::size_t c = 0; c < mats.size(); ++c) {
    rng g = master.child(c);
    out.push_back(permute(mats[c], g.permutation(mats[c].n)));
  }
  return out;
}

inline std::vector<distance_matrix> symmetrize_sample(const std::vector<growth_chain>& chains,
                                                      std::uint64_t seed) {
  std::vector<distance_matrix> mats;
  mats.reserve(chains.size());
  for (const auto& c : chains) mats.push_back(c.matrix);
  return symmetrize_sample(mats, seed);
}

/// Entry distribution for the i.i.d. product measure: uniform on [lo, hi],
/// degenerating to a point mass when lo == hi. Support must stay inside
/// [1/2, 1] so the triangle inequality holds automatically.
struct entry_spec {
  double lo = 0.5;
  double hi = 1.0;

  entry_spec() = default;
  entry_spec(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo >= 0.5) || !(hi <= 1.0) || !(lo <= hi))
      throw input_error("entry_spec: support must satisfy 1/2 <= lo <= hi <= 1");
  }

  double draw(rng& g) const { return lo == hi ? lo : g.uniform(lo, hi); }
};

/// Lazy keyed access to the product-measure matrix: entry (i, j) comes from
/// the substream of its pair index, so any sub-block can be read on demand
/// and agrees with the materialized sample at the same seed.
struct product_source {
  std::uint64_t seed = 0;
  entry_spec m;

  double at(int i, int j) const {
    if (i == j) return 0.0;
    rng g = rng(seed).child(pair_index(std::min(i, j), std::max(i, j)));
    return m.draw(g);
  }
};

/// Materialize an n-point sample of the product measure with i.i.d. entries.
inline distance_matrix sample_product_half_one(int n, const entry_spec& m,
                                               std::uint64_t seed) {
  if (n < 1) throw input_error("sample_product_half_one: n must be at least 1");
  product_source src{seed, m};
  distance_matrix out = distance_matrix::zero(n);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) out.set(i, j, src.at(i, j));
  out.refresh_proper();
  return out;
}

/// Per-row shift diagnostic: for each of the first k rows, the entry at the
/// first off-diagonal column is compared against the entry `shift` columns
/// later with a two-sample KS test. The two samples come from disjoint
/// halves of the ensemble so the test sees independent data.
struct stationarity_row {
  int row = 0;  // 0-based
  int col_a = 0, col_b = 0;
  ks_result ks;
  bool pass = true;
};

struct stationarity_summary {
  std::vector<stationarity_row> rows;
  double level = 0.01;
  bool all_pass = true;
};

inline stationarity_summary stationarity_report(const std::vector<growth_chain>& ensemble,
                                                int k, int shift, double level = 0.01) {
  if (ensemble.size() < 4)
    throw input_error("stationarity_report: need at least 4 chains to split");
  int n = ensemble.front().matrix.n;
  for (const auto& c : ensemble)
    if (c.matrix.n != n) throw input_error("stationarity_report: chains must share one size");
  if (k < 1 || shift < 1) throw input_error("stationarity_report: need k >= 1 and shift >= 1");
  if ((k - 1) + 1 + shift > n - 1)
    throw input_error("stationarity_report: window exceeds matrix size (need n >= k + shift + 1)");
  std::size_t half = ensemble.size() / 2;
  stationarity_summary out;
  out.level = level;
  for (int row = 0; row < k; ++row) {
    stationarity_row sr;
    sr.row = row;
    sr.col_a = row + 1;
    sr.col_b = row + 1 + shift;
    std::vector<double> a, b;
    for (std::size_t c = 0; c < half; ++c)
      a.push_back(ensemble[c].matrix.at(row, sr.col_a));
    for (std::size_t c = half; c < ensemble.size(); ++c)
      b.push_back(ensemble[c].matrix.at(row, sr.col_b));
    sr.ks = ks_test_two_sample(a, b);
    sr.pass = sr.ks.pvalue >= level;
    out.all_pass = out.all_pass && sr.pass;
    out.rows.push_back(sr);
  }
  return out;
}

}  // namespace umet
