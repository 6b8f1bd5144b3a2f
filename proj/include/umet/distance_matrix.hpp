#pragma once
/// Finite distance matrices and their admissible extensions: validation,
/// corner and shift projections, admissible vectors, the amalgamation
/// interval for attaching two points, coordinate-wise feasibility intervals
/// for growing a matrix point by point, zero-distance quotients, and
/// relabeling.
///
/// Storage is the upper triangle as a flat array in column-major pair order
/// d(1,2), d(1,3), d(2,3), d(1,4), ...; symmetry holds by construction and
/// full-matrix views are always derived, never stored.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"

namespace umet {

inline constexpr double default_tol = 1e-9;

/// Flat index of the pair (i, j), 0 <= i < j, in column-major pair order.
inline std::size_t pair_index(int i, int j) {
  return std::size_t(j) * std::size_t(j - 1) / 2 + std::size_t(i);
}

struct distance_matrix {
  int n = 1;
  std::vector<double> upper;  // n(n-1)/2 entries in pair order
  bool proper = true;         // no stored entry is zero

  distance_matrix() = default;

  distance_matrix(int points, std::vector<double> entries)
      : n(points), upper(std::move(entries)) {
    if (n < 1) throw input_error("distance_matrix: need at least one point");
    if (upper.size() != std::size_t(n) * std::size_t(n - 1) / 2)
      throw input_error("distance_matrix: entry count does not match point count");
    for (std::size_t t = 0; t < upper.size(); ++t) {
      if (!std::isfinite(upper[t]))
        throw input_error("distance_matrix: non-finite entry at flat index " +
                          std::to_string(t));
      if (upper[t] < 0.0)
        throw input_error("distance_matrix: negative entry at flat index " +
                          std::to_string(t));
    }
    refresh_proper();
  }

  static distance_matrix zero(int points) {
    distance_matrix r;
    r.n = points;
    r.upper.assign(std::size_t(points) * std::size_t(points - 1) / 2, 0.0);
    r.proper = r.upper.empty();
    if (points < 1) throw input_error("distance_matrix: need at least one point");
    return r;
  }

  double at(int i, int j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    return upper[pair_index(i, j)];
  }

  void set(int i, int j, double v) {
    if (i == j) throw input_error("distance_matrix: cannot set diagonal");
    if (i > j) std::swap(i, j);
    upper[pair_index(i, j)] = v;
    if (v == 0.0) proper = false;
  }

  void refresh_proper() {
    proper = std::all_of(upper.begin(), upper.end(), [](double v) { return v > 0.0; });
  }

  double max_entry() const {
    double m = 0.0;
    for (double v : upper) m = std::max(m, v);
    return m;
  }
};

/// Effective absolute slack for triangle checks: scaled by the largest entry
/// once entries exceed 1, so long extension chains stay checkable.
inline double effective_tol(const distance_matrix& r, double tol) {
  return tol * std::max(1.0, r.max_entry());
}

/// One violated triple {i, j, k}. The three triangle inequalities of a triple
/// hold together iff the largest side is at most the sum of the other two, so
/// the slack is d(i,j) + d(i,k) + d(j,k) - 2 max(...), negative on violation.
struct triangle_violation {
  int i = 0;
  int j = 0;
  int k = 0;
  double slack = 0.0;
};

struct validation_report {
  bool ok = true;
  double tol_used = 0.0;
  std::vector<triangle_violation> violations;
};

/// Check all n(n-1)(n-2)/6 triangle constraints with slack >= -tol (tol
/// scaled by the largest entry when that exceeds 1). Lists every violation.
inline validation_report validate(const distance_matrix& r, double tol = default_tol) {
  validation_report rep;
  rep.tol_used = effective_tol(r, tol);
  for (int i = 0; i < r.n; ++i)
    for (int j = i + 1; j < r.n; ++j)
      for (int k = j + 1; k < r.n; ++k) {
        double dij = r.upper[pair_index(i, j)];
        double dik = r.upper[pair_index(i, k)];
        double djk = r.upper[pair_index(j, k)];
        double slack = dij + dik + djk - 2.0 * std::max({dij, dik, djk});
        if (slack < -rep.tol_used) {
          rep.ok = false;
          rep.violations.push_back({i, j, k, slack});
        }
      }
  return rep;
}

/// The matrix restricted to points 1..k.
inline distance_matrix nw_corner(const distance_matrix& r, int k) {
  if (k < 1 || k > r.n) throw input_error("nw_corner: k out of range");
  distance_matrix out;
  out.n = k;
  out.upper.assign(r.upper.begin(),
                   r.upper.begin() + std::ptrdiff_t(std::size_t(k) * std::size_t(k - 1) / 2));
  out.refresh_proper();
  return out;
}

/// Drop the first point: entry (i, j) of the output is entry (i+1, j+1).
inline distance_matrix nw_shift(const distance_matrix& r) {
  if (r.n < 2) throw input_error("nw_shift: need at least two points");
  distance_matrix out = distance_matrix::zero(r.n - 1);
  for (int j = 1; j < out.n; ++j)
    for (int i = 0; i < j; ++i) out.upper[pair_index(i, j)] = r.at(i + 1, j + 1);
  out.refresh_proper();
  return out;
}

/// Membership test for the admissible set A(r): every pair must satisfy
/// |a_i - a_j| <= d(i,j) <= a_i + a_j within tolerance.
inline bool is_admissible(const distance_matrix& r, const std::vector<double>& a,
                          double tol = default_tol) {
  if (int(a.size()) != r.n)
    throw input_error("is_admissible: vector length does not match point count");
  double te = effective_tol(r, tol);
  for (double v : a) {
    if (!std::isfinite(v)) throw input_error("is_admissible: non-finite coordinate");
    if (v < -te) throw input_error("is_admissible: negative coordinate");
  }
  for (int j = 1; j < r.n; ++j)
    for (int i = 0; i < j; ++i) {
      double d = r.upper[pair_index(i, j)];
      if (std::fabs(a[std::size_t(i)] - a[std::size_t(j)]) > d + te) return false;
      if (d > a[std::size_t(i)] + a[std::size_t(j)] + te) return false;
    }
  return true;
}

/// Worst violated admissibility constraint of `a` against `r`, as
/// (i, j, excess); excess <= 0 means admissible.
inline std::tuple<int, int, double> worst_admissibility_violation(
    const distance_matrix& r, const std::vector<double>& a) {
  int wi = 0, wj = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int j = 1; j < r.n; ++j)
    for (int i = 0; i < j; ++i) {
      double d = r.upper[pair_index(i, j)];
      double excess = std::max(std::fabs(a[std::size_t(i)] - a[std::size_t(j)]) - d,
                               d - (a[std::size_t(i)] + a[std::size_t(j)]));
      if (excess > worst) {
        worst = excess;
        wi = i;
        wj = j;
      }
    }
  if (r.n == 1) worst = a[0] >= 0.0 ? 0.0 : -a[0];
  return {wi, wj, worst};
}

/// Attach a new point with distance row `a`; the old matrix is the NW corner
/// of the result.
inline distance_matrix extend(const distance_matrix& r, const std::vector<double>& a,
                              double tol = default_tol) {
  if (!is_admissible(r, a, tol)) {
    auto [i, j, excess] = worst_admissibility_violation(r, a);
    std::ostringstream msg;
    msg << "extend: vector is not admissible; worst pair (" << i + 1 << "," << j + 1
        << ") violated by " << excess;
    throw precondition_error(msg.str());
  }
  distance_matrix out;
  out.n = r.n + 1;
  out.upper = r.upper;
  for (double v : a)
    out.upper.push_back(std::max(v, 0.0));  // admissible within tolerance may sit at -tol
  out.refresh_proper();
  return out;
}

/// Closed interval; hi is meaningful only when unbounded_above is false.
struct interval {
  double lo = 0.0;
  double hi = 0.0;
  bool unbounded_above = false;
};

/// Feasible distances between two points separately attached to the same
/// base: [max_i |a_i - b_i|, min_i (a_i + b_i)], never empty.
inline interval amalgamation_interval(const distance_matrix& r,
                                      const std::vector<double>& a,
                                      const std::vector<double>& b,
                                      double tol = default_tol) {
  if (!is_admissible(r, a, tol) || !is_admissible(r, b, tol))
    throw precondition_error("amalgamation_interval: both vectors must be admissible");
  interval out;
  out.lo = 0.0;
  out.hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.lo = std::max(out.lo, std::fabs(a[i] - b[i]));
    out.hi = std::min(out.hi, a[i] + b[i]);
  }
  return out;
}

/// Feasibility interval for the next distance of a partially attached point:
/// `prefix` fixes distances to points 1..k, the result bounds the distance to
/// point k+1. Empty prefix means no constraint: [0, +inf).
inline interval next_coordinate_interval(const distance_matrix& r,
                                         const std::vector<double>& prefix,
                                         double tol = default_tol) {
  int k = int(prefix.size());
  if (k >= r.n) throw input_error("next_coordinate_interval: prefix already complete");
  if (k == 0) return {0.0, 0.0, true};
  double te = effective_tol(r, tol);
  for (int j = 1; j < k; ++j)
    for (int i = 0; i < j; ++i) {
      double d = r.at(i, j);
      double pi = prefix[std::size_t(i)], pj = prefix[std::size_t(j)];
      if (std::fabs(pi - pj) > d + te || d > pi + pj + te) {
        std::ostringstream msg;
        msg << "next_coordinate_interval: fixed prefix violates the pair (" << i + 1
            << "," << j + 1 << ")";
        throw state_error(msg.str());
      }
    }
  interval out;
  out.lo = 0.0;
  out.hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    double d = r.at(i, k);
    out.lo = std::max(out.lo, std::fabs(prefix[std::size_t(i)] - d));
    out.hi = std::min(out.hi, prefix[std::size_t(i)] + d);
  }
  return out;
}

struct quotient_result {
  distance_matrix matrix;                             // proper by construction
  std::vector<std::vector<int>> classes;              // zero-distance classes
  std::vector<std::tuple<int, int, double>> near_zero;  // reported, not merged
};

/// Merge points at exact distance zero (transitively; triangle validity makes
/// zero-distance an equivalence). Near-zero entries below `near_tol` are
/// reported but never merged.
inline quotient_result quotient(const distance_matrix& r, double tol = default_tol,
                                double near_tol = default_tol) {
  auto rep = validate(r, tol);
  if (!rep.ok) throw precondition_error("quotient: input is not a semimetric");
  std::vector<int> parent(std::size_t(r.n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[std::size_t(x)] != x) {
      parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
      x = parent[std::size_t(x)];
    }
    return x;
  };
  quotient_result out;
  for (int j = 1; j < r.n; ++j)
    for (int i = 0; i < j; ++i) {
      double v = r.upper[pair_index(i, j)];
      if (v == 0.0) {
        int a = find(i), b = find(j);
        if (a != b) parent[std::size_t(std::max(a, b))] = std::min(a, b);
      } else if (v <= near_tol) {
        out.near_zero.emplace_back(i, j, v);
      }
    }
  std::vector<int> reps;
  std::vector<int> class_of(std::size_t(r.n), -1);
  for (int i = 0; i < r.n; ++i) {
    int root = find(i);
    if (class_of[std::size_t(root)] < 0) {
      class_of[std::size_t(root)] = int(reps.size());
      reps.push_back(root);
      out.classes.emplace_back();
    }
    out.classes[std::size_t(class_of[std::size_t(root)])].push_back(i);
  }
  int m = int(reps.size());
  distance_matrix q = distance_matrix::zero(m);
  for (int j = 1; j < m; ++j)
    for (int i = 0; i < j; ++i)
      q.upper[pair_index(i, j)] = r.at(reps[std::size_t(i)], reps[std::size_t(j)]);
  q.refresh_proper();
  out.matrix = q;
  return out;
}

/// Apply a point relabeling g (old index -> new index) to a coordinate vector.
inline std::vector<double> apply_permutation(const std::vector<double>& a,
                                             const std::vector<int>& g) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[std::size_t(g[i])] = a[i];
  return out;
}

inline void check_permutation(const std::vector<int>& g, int n) {
  if (int(g.size()) != n) throw input_error("permute: permutation length mismatch");
  std::vector<char> seen(std::size_t(n), 0);
  for (int v : g) {
    if (v < 0 || v >= n || seen[std::size_t(v)])
      throw input_error("permute: not a bijection");
    seen[std::size_t(v)] = 1;
  }
}

/// Relabel points by g (old index -> new index): output(i,j) = input at the
/// preimages of i and j.
inline distance_matrix permute(const distance_matrix& r, const std::vector<int>& g) {
  check_permutation(g, r.n);
  std::vector<int> inv(std::size_t(r.n));
  for (int i = 0; i < r.n; ++i) inv[std::size_t(g[std::size_t(i)])] = i;
  distance_matrix out = distance_matrix::zero(r.n);
  for (int j = 1; j < r.n; ++j)
    for (int i = 0; i < j; ++i)
      out.upper[pair_index(i, j)] = r.at(inv[std::size_t(i)], inv[std::size_t(j)]);
  out.refresh_proper();
  return out;
}

}  // namespace umet
