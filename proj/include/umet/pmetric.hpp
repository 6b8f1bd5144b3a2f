#pragma once
/// The p-power triangle inequality family: validation and admissibility for
/// finite p >= 1 and for p = infinity (ultrametrics), the two-point
/// amalgamation law in both regimes, sampling through the shared growth
/// kernel, and an ultrametric generator for demonstrating why the infinite
/// case degenerates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "distance_matrix.hpp"
#include "errors.hpp"
#include "growth.hpp"
#include "rng.hpp"

namespace umet {

inline void check_exponent(double p) {
  if (std::isnan(p) || p < 1.0)
    throw input_error("p-metric: exponent must be at least 1 (or infinity)");
}

/// Triangle checks under the exponent p. For finite p the three inequalities
/// of a triple hold together iff the largest p-th power is at most the sum of
/// the other two, so the slack lives in the power domain. At p = infinity the
/// condition is that the two largest sides of every triple are equal, and the
/// slack is their (nonpositive) difference.
inline validation_report validate_p(const distance_matrix& r, double p,
                                    double tol = default_tol) {
  check_exponent(p);
  if (p == 1.0) return validate(r, tol);
  validation_report rep;
  bool ultra = std::isinf(p);
  rep.tol_used = tol * std::max(1.0, ultra ? r.max_entry()
                                           : detail::pow_p(r.max_entry(), p));
  for (int i = 0; i < r.n; ++i)
    for (int j = i + 1; j < r.n; ++j)
      for (int k = j + 1; k < r.n; ++k) {
        double slack;
        if (ultra) {
          double s[3] = {r.at(i, j), r.at(i, k), r.at(j, k)};
          std::sort(s, s + 3);
          slack = s[1] - s[2];
        } else {
          double x = detail::pow_p(r.at(i, j), p);
          double y = detail::pow_p(r.at(i, k), p);
          double z = detail::pow_p(r.at(j, k), p);
          slack = x + y + z - 2.0 * std::max({x, y, z});
        }
        if (slack < -rep.tol_used) {
          rep.ok = false;
          rep.violations.push_back({i, j, k, slack});
        }
      }
  return rep;
}

/// Can a new point at distances a be attached so that every triple through it
/// satisfies the p-power inequality?
inline bool is_admissible_p(const distance_matrix& r, const std::vector<double>& a,
                            double p, double tol = default_tol) {
  check_exponent(p);
  if (int(a.size()) != r.n)
    throw input_error("is_admissible_p: vector length does not match point count");
  bool ultra = std::isinf(p);
  double te = tol * std::max(1.0, ultra ? r.max_entry() : detail::pow_p(r.max_entry(), p));
  for (double v : a) {
    if (!std::isfinite(v)) throw input_error("is_admissible_p: non-finite coordinate");
    if (v < -te) throw input_error("is_admissible_p: negative coordinate");
  }
  for (int j = 1; j < r.n; ++j)
    for (int i = 0; i < j; ++i) {
      double d = r.at(i, j);
      double ai = a[std::size_t(i)], aj = a[std::size_t(j)];
      if (ultra) {
        if (d > std::max(ai, aj) + te) return false;
        if (aj > std::max(ai, d) + te) return false;
        if (ai > std::max(aj, d) + te) return false;
      } else {
        double dp = detail::pow_p(d, p);
        double pi = detail::pow_p(ai, p), pj = detail::pow_p(aj, p);
        if (std::fabs(pi - pj) > dp + te) return false;
        if (dp > pi + pj + te) return false;
      }
    }
  return true;
}

struct p_amalgam_result {
  enum class kind { interval, forced, empty };
  kind outcome = kind::interval;
  double lo = 0.0;    // forced value sits in both endpoints
  double hi = 0.0;
  std::string note;   // names the coordinates behind a forced or empty outcome
};

/// Feasible distances between two points separately attached under the same
/// exponent. For finite p this is always a nonempty interval, computed in the
/// power domain and rooted back once. At p = infinity every coordinate with
/// a_i != b_i pins the distance to max(a_i, b_i) exactly, so the outcome is
/// an interval (no disagreement), a single forced value, or empty.
inline p_amalgam_result amalgamation_interval_p(const distance_matrix& r,
                                                const std::vector<double>& a,
                                                const std::vector<double>& b,
                                                double p, double tol = default_tol) {
  check_exponent(p);
  if (!is_admissible_p(r, a, p, tol) || !is_admissible_p(r, b, p, tol))
    throw precondition_error("amalgamation_interval_p: both vectors must be admissible");
  p_amalgam_result out;
  if (!std::isinf(p)) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
      double pi = detail::pow_p(a[i], p), qi = detail::pow_p(b[i], p);
      lo = std::max(lo, std::fabs(pi - qi));
      hi = std::min(hi, pi + qi);
    }
    hi = std::max(hi, lo);  // guard against rounding inversion
    out.lo = detail::root_p(lo, p);
    out.hi = detail::root_p(hi, p);
    return out;
  }
  double te = tol * std::max(1.0, r.max_entry());
  double forced = -1.0;
  int forced_at = -1;
  double cap = std::numeric_limits<double>::infinity();
  int cap_at = -1;
  for (int i = 0; i < r.n; ++i) {
    double ai = a[std::size_t(i)], bi = b[std::size_t(i)];
    if (std::fabs(ai - bi) <= te) {
      if (std::max(ai, bi) < cap) {
        cap = std::max(ai, bi);
        cap_at = i;
      }
      continue;
    }
    double f = std::max(ai, bi);
    if (forced_at >= 0 && std::fabs(f - forced) > te) {
      out.outcome = p_amalgam_result::kind::empty;
      out.note = "coordinates " + std::to_string(forced_at + 1) + " and " +
                 std::to_string(i + 1) + " force different values";
      return out;
    }
    if (forced_at < 0 || f > forced) {
      forced = f;
      forced_at = i;
    }
  }
  if (forced_at < 0) {
    out.outcome = p_amalgam_result::kind::interval;
    out.lo = 0.0;
    out.hi = cap;
    return out;
  }
  if (forced > cap + te) {
    out.outcome = p_amalgam_result::kind::empty;
    out.note = "coordinate " + std::to_string(forced_at + 1) + " forces " +
               std::to_string(forced) + " above the cap from coordinate " +
               std::to_string(cap_at + 1);
    return out;
  }
  out.outcome = p_amalgam_result::kind::forced;
  out.lo = out.hi = forced;
  out.note = "pinned by coordinate " + std::to_string(forced_at + 1);
  return out;
}

/// Grow an n-point matrix whose triples satisfy the p-power inequality, using
/// the same stream layout and draw order as the p = 1 sampler: the two agree
/// draw for draw at p = 1.
inline growth_chain sample_p_metric(int n, double p, const gamma_spec& gamma,
                                    std::uint64_t seed) {
  check_exponent(p);
  if (std::isinf(p))
    throw capability_error(
        "sample_p_metric: at p = infinity the attachment intervals degenerate to "
        "points and the chain reproduces one ultrametric; use sample_ultrametric");
  if (n < 1) throw input_error("sample_p_metric: n must be at least 1");
  rng master(seed);
  growth_chain out = detail::run_chain(master.child(0), n, gamma, 0.0, p);
  out.seed = seed;
  out.chain_index = 0;
  return out;
}

/// Random ultrametric: points sit on a line with i.i.d. uniform(0, scale)
/// barriers between neighbors, and the distance of a pair is the tallest
/// barrier between them. Path maxima make every triple's two largest sides
/// equal.
inline distance_matrix sample_ultrametric(int n, std::uint64_t seed, double scale = 1.0) {
  if (n < 1) throw input_error("sample_ultrametric: n must be at least 1");
  if (!(scale > 0.0)) throw input_error("sample_ultrametric: scale must be positive");
  rng master(seed);
  rng g = master.child(0);
  distance_matrix r = distance_matrix::zero(n);
  for (int j = 1; j < n; ++j) {
    double barrier = g.uniform(0.0, scale);
    r.set(j - 1, j, barrier);
    for (int i = 0; i < j - 1; ++i) r.set(i, j, std::max(r.at(i, j - 1), barrier));
  }
  r.refresh_proper();
  return r;
}

/// Admissible vector over an ultrametric: distances to a ball around `center`
/// of radius t, namely a_i = max(t, d(center, i)). Any two such vectors with
/// different centers or radii disagree somewhere almost surely, which is what
/// collapses the amalgamation interval at p = infinity.
inline std::vector<double> ultra_admissible_vector(const distance_matrix& r, int center,
                                                   double t) {
  if (center < 0 || center >= r.n)
    throw input_error("ultra_admissible_vector: center out of range");
  if (!(t >= 0.0)) throw input_error("ultra_admissible_vector: radius must be nonnegative");
  std::vector<double> a(std::size_t(r.n));
  for (int i = 0; i < r.n; ++i) a[std::size_t(i)] = std::max(t, r.at(center, i));
  return a;
}

}  // namespace umet
