#pragma once
/// Finite-truncation universality tooling: covering-radius defect of a
/// matrix's columns against admissible targets, greedy sub-pattern searches,
/// epsilon-extension of corner isometries, back-and-forth matching, and a
/// deterministic dense-grid construction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "distance_matrix.hpp"
#include "errors.hpp"
#include "polytope.hpp"
#include "rng.hpp"

namespace umet {

struct defect_report {
  int prefix = 0;
  int targets_tested = 0;
  double defect = 0.0;  // covering radius in max-norm
  std::vector<double> worst_target;
  int columns_used = 0;
};

namespace detail {

/// Max-norm distance from a column (distances to the first `prefix` points)
/// to a target admissible vector.
inline double column_deviation(const std::vector<double>& column,
                               const std::vector<double>& target) {
  double d = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i)
    d = std::max(d, std::fabs(column[i] - target[i]));
  return d;
}

inline defect_report defect_core(const distance_matrix& prefix,
                                 const std::vector<std::vector<double>>& columns,
                                 const std::vector<std::vector<double>>& targets,
                                 double tol) {
  for (std::size_t t = 0; t < targets.size(); ++t)
    if (!is_admissible(prefix, targets[t], tol))
      throw input_error("universality_defect: target #" + std::to_string(t) +
                        " is not admissible for the prefix");
  defect_report rep;
  rep.prefix = prefix.n;
  rep.targets_tested = int(targets.size());
  rep.columns_used = int(columns.size());
  for (const auto& a : targets) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& col : columns) best = std::min(best, column_deviation(col, a));
    if (columns.empty()) best = std::numeric_limits<double>::infinity();
    if (best > rep.defect || rep.worst_target.empty()) {
      rep.defect = best;
      rep.worst_target = a;
    }
  }
  if (targets.empty()) rep.defect = 0.0;
  return rep;
}

}  // namespace detail

/// Random admissible targets for defect measurement: alternating polytope
/// vertices and Dirichlet-weighted vertex combinations, each pushed along
/// the recession rays by an exp(1) offset in the unbounded mode.
inline std::vector<std::vector<double>> sample_targets(const distance_matrix& prefix,
                                                       int count, std::uint64_t seed,
                                                       double bound = 0.0) {
  if (count < 0) throw input_error("sample_targets: count must be nonnegative");
  auto vs = extreme_points(prefix);
  rng master(seed);
  std::vector<std::vector<double>> targets;
  targets.reserve(std::size_t(count));
  for (int t = 0; t < count; ++t) {
    rng g = master.child(std::uint64_t(t));
    std::vector<double> a;
    if (t % 2 == 0) {
      a = vs.vertices[std::size_t(g.uniform_index(int(vs.vertices.size())))];
    } else {
      std::vector<double> w;
      double total = 0.0;
      for (std::size_t v = 0; v < vs.vertices.size(); ++v) {
        w.push_back(g.exponential(1.0));
        total += w.back();
      }
      a.assign(std::size_t(prefix.n), 0.0);
      for (std::size_t v = 0; v < vs.vertices.size(); ++v)
        for (int i = 0; i < prefix.n; ++i)
          a[std::size_t(i)] += (w[v] / total) * vs.vertices[v][std::size_t(i)];
    }
    if (!(bound > 0.0))
      for (const auto& ray : vs.recession_rays) {
        double s = g.exponential(1.0);
        for (int i = 0; i < prefix.n; ++i) a[std::size_t(i)] += s * ray[std::size_t(i)];
      }
    targets.push_back(std::move(a));
  }
  return targets;
}

/// Defect of the columns of r beyond the prefix against an explicit target
/// list: max over targets of the min column deviation in max-norm.
inline defect_report universality_defect(const distance_matrix& r, int n,
                                         const std::vector<std::vector<double>>& targets,
                                         double tol = default_tol) {
  if (n < 1 || n >= r.n)
    throw input_error("universality_defect: prefix must satisfy 1 <= n < N");
  distance_matrix prefix = nw_corner(r, n);
  std::vector<std::vector<double>> columns;
  for (int j = n; j < r.n; ++j) {
    std::vector<double> col;
    col.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i) col.push_back(r.at(i, j));
    columns.push_back(std::move(col));
  }
  return detail::defect_core(prefix, columns, targets, tol);
}

/// Sampled-target variant.
inline defect_report universality_defect(const distance_matrix& r, int n, int target_count,
                                         std::uint64_t seed, double bound = 0.0,
                                         double tol = default_tol) {
  if (n < 1 || n >= r.n)
    throw input_error("universality_defect: prefix must satisfy 1 <= n < N");
  return universality_defect(r, n, sample_targets(nw_corner(r, n), target_count, seed, bound),
                             tol);
}

/// Row-prefix variant: the matrix is described by its prefix block plus the
/// per-column distance vectors, as produced by sample_prefix_rows.
inline defect_report universality_defect(const distance_matrix& prefix,
                                         const std::vector<std::vector<double>>& columns,
                                         const std::vector<std::vector<double>>& targets,
                                         double tol = default_tol) {
  return detail::defect_core(prefix, columns, targets, tol);
}

struct defect_curve_point {
  int columns_used = 0;
  double defect = 0.0;
};

/// Defect as a function of how many columns are admitted, over one nested
/// lineage; nonincreasing by construction. `cuts` are column counts.
inline std::vector<defect_curve_point> defect_curve(
    const distance_matrix& prefix, const std::vector<std::vector<double>>& columns,
    std::vector<int> cuts, const std::vector<std::vector<double>>& targets,
    double tol = default_tol) {
  for (std::size_t t = 0; t < targets.size(); ++t)
    if (!is_admissible(prefix, targets[t], tol))
      throw input_error("defect_curve: target #" + std::to_string(t) +
                        " is not admissible for the prefix");
  std::sort(cuts.begin(), cuts.end());
  for (int c : cuts)
    if (c < 0 || c > int(columns.size()))
      throw input_error("defect_curve: cut exceeds available columns");
  auto best = std::vector<double>(targets.size(), std::numeric_limits<double>::infinity());
  std::vector<defect_curve_point> out;
  std::size_t col = 0;
  for (int cut : cuts) {
    for (; col < std::size_t(cut); ++col)
      for (std::size_t t = 0; t < targets.size(); ++t)
        best[t] = std::min(best[t], detail::column_deviation(columns[col], targets[t]));
    defect_curve_point p;
    p.columns_used = cut;
    p.defect = targets.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
    out.push_back(p);
  }
  return out;
}

struct search_result {
  bool found = false;
  std::vector<int> indices;  // chosen column indices in the host matrix
  double deviation = std::numeric_limits<double>::infinity();
  long nodes_explored = 0;
};

namespace detail {

inline constexpr int search_branch_budget = 32;
inline constexpr long search_node_cap = 20000;

/// Deviation a candidate column j would add at this level: max mismatch
/// against the already chosen indices.
inline double placement_cost(const distance_matrix& r, const distance_matrix& q,
                             const std::vector<int>& chosen, int level, int j) {
  double c = 0.0;
  for (int s = 0; s < level; ++s)
    c = std::max(c, std::fabs(r.at(chosen[std::size_t(s)], j) - q.at(s, level)));
  return c;
}

/// Depth-first index search shared by the sub-pattern and extension ops.
/// Levels start at `first_level` with `chosen` already holding forced
/// indices. Candidates per level come from `candidates_for`, are ranked by
/// placement cost, and only costs below eps are explored.
template <typename CandidateFn>
inline bool index_dfs(const distance_matrix& r, const distance_matrix& q, int first_level,
                      std::vector<int>& chosen, double eps, const CandidateFn& candidates_for,
                      long& nodes, double& deviation) {
  int k = q.n;
  if (first_level == k) return true;
  struct ranked {
    double cost;
    int index;
  };
  std::vector<ranked> order;
  for (int j : candidates_for(first_level, chosen)) {
    double c = placement_cost(r, q, chosen, first_level, j);
    if (c < eps) order.push_back({c, j});
  }
  std::sort(order.begin(), order.end(), [](const ranked& a, const ranked& b) {
    return a.cost < b.cost || (a.cost == b.cost && a.index < b.index);
  });
  int branches = 0;
  for (const auto& cand : order) {
    if (branches++ >= search_branch_budget || nodes >= search_node_cap) break;
    ++nodes;
    chosen.push_back(cand.index);
    double saved = deviation;
    deviation = std::max(deviation, cand.cost);
    if (index_dfs(r, q, first_level + 1, chosen, eps, candidates_for, nodes, deviation))
      return true;
    deviation = saved;
    chosen.pop_back();
  }
  return false;
}

/// One pure greedy pass (no eps filter): always extend with the cheapest
/// candidate. Reports the best deviation the method achieves, for failures.
template <typename CandidateFn>
inline std::pair<std::vector<int>, double> greedy_pass(const distance_matrix& r,
                                                       const distance_matrix& q,
                                                       int first_level,
                                                       std::vector<int> chosen,
                                                       const CandidateFn& candidates_for) {
  double dev = 0.0;
  for (int level = first_level; level < q.n; ++level) {
    int best_j = -1;
    double best_c = std::numeric_limits<double>::infinity();
    for (int j : candidates_for(level, chosen)) {
      double c = placement_cost(r, q, chosen, level, j);
      if (c < best_c) {
        best_c = c;
        best_j = j;
      }
    }
    if (best_j < 0) return {chosen, std::numeric_limits<double>::infinity()};
    chosen.push_back(best_j);
    dev = std::max(dev, best_c);
  }
  return {chosen, dev};
}

}  // namespace detail

inline constexpr int search_pattern_cap = 64;

/// Find increasing indices i_1 < ... < i_k in r whose induced submatrix
/// matches q within eps in max-norm. Failure is a result carrying the best
/// deviation a pure greedy pass achieves, not an error.
inline search_result almost_universality_search(const distance_matrix& r,
                                                const distance_matrix& q, double eps) {
  if (q.n > search_pattern_cap)
    throw capability_error("almost_universality_search: pattern capped at " +
                           std::to_string(search_pattern_cap) + " points");
  search_result res;
  if (q.n > r.n) return res;  // deviation stays infinite: nothing to index
  auto candidates_for = [&](int level, const std::vector<int>& chosen) {
    int lo = chosen.empty() ? 0 : chosen.back() + 1;
    int hi = r.n - (q.n - level - 1);  // leave room for the remaining levels
    std::vector<int> c;
    for (int j = lo; j < hi; ++j) c.push_back(j);
    return c;
  };
  std::vector<int> chosen;
  double dev = 0.0;
  long nodes = 0;
  if (detail::index_dfs(r, q, 0, chosen, eps, candidates_for, nodes, dev)) {
    res.found = true;
    res.indices = chosen;
    res.deviation = dev;
  } else {
    auto [greedy, gdev] = detail::greedy_pass(r, q, 0, {}, candidates_for);
    res.indices = greedy;
    res.deviation = gdev;
  }
  res.nodes_explored = nodes;
  return res;
}

/// Extend the identity on the first `corner` points to all of q: indices are
/// forced to i_j = j below the corner and searched above it.
inline search_result epsilon_extend(const distance_matrix& r, const distance_matrix& q,
                                    int corner, double eps, double tol = default_tol) {
  if (corner < 0 || corner > q.n || corner > r.n)
    throw input_error("epsilon_extend: corner size out of range");
  double te = effective_tol(r, tol);
  for (int j = 1; j < corner; ++j)
    for (int i = 0; i < j; ++i)
      if (std::fabs(q.at(i, j) - r.at(i, j)) > te)
        throw input_error("epsilon_extend: corner mismatch at pair (" + std::to_string(i + 1) +
                          "," + std::to_string(j + 1) + ")");
  search_result res;
  if (q.n - corner > r.n - corner) return res;
  auto candidates_for = [&](int /*level*/, const std::vector<int>& chosen) {
    std::vector<int> c;
    for (int j = corner; j < r.n; ++j)
      if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) c.push_back(j);
    return c;
  };
  std::vector<int> chosen;
  for (int j = 0; j < corner; ++j) chosen.push_back(j);
  double dev = 0.0;
  for (int j = 1; j < corner; ++j)
    for (int i = 0; i < j; ++i) dev = std::max(dev, std::fabs(q.at(i, j) - r.at(i, j)));
  long nodes = 0;
  if (detail::index_dfs(r, q, corner, chosen, eps, candidates_for, nodes, dev)) {
    res.found = true;
    res.indices = chosen;
    res.deviation = dev;
  } else {
    auto base = std::vector<int>();
    for (int j = 0; j < corner; ++j) base.push_back(j);
    auto [greedy, gdev] = detail::greedy_pass(r, q, corner, base, candidates_for);
    res.indices = greedy;
    res.deviation = std::max(gdev, dev);
  }
  res.nodes_explored = nodes;
  return res;
}

struct matching_result {
  std::vector<std::pair<int, int>> pairs;  // (index in A, index in B)
  double distortion = 0.0;
  int rounds_completed = 0;
  bool complete = false;
};

/// Alternating extension rounds between two matrices: each round matches the
/// smallest unmatched index of the active side to a partner on the other
/// side, ranked by max deviation against the pairs so far, with bounded
/// backtracking. Distortion is the max deviation over matched pairs.
inline matching_result back_and_forth(const distance_matrix& ra, const distance_matrix& rb,
                                      int depth, double eps) {
  if (!validate(ra).ok || !validate(rb).ok)
    throw precondition_error("back_and_forth: both matrices must validate");
  if (depth < 0) throw input_error("back_and_forth: depth must be nonnegative");

  matching_result best;
  std::vector<std::pair<int, int>> pairs;
  std::vector<char> used_a(std::size_t(ra.n), 0), used_b(std::size_t(rb.n), 0);
  long nodes = 0;

  auto record_best = [&](double distortion) {
    if (int(pairs.size()) > best.rounds_completed) {
      best.pairs = pairs;
      best.rounds_completed = int(pairs.size());
      best.distortion = distortion;
    }
  };

  std::function<bool(int, double)> round_dfs = [&](int round, double distortion) -> bool {
    record_best(distortion);
    if (round == depth) return true;
    bool a_turn = (round % 2 == 0);
    const distance_matrix& own = a_turn ? ra : rb;
    const distance_matrix& other = a_turn ? rb : ra;
    auto& own_used = a_turn ? used_a : used_b;
    auto& other_used = a_turn ? used_b : used_a;
    int fresh = -1;
    for (int i = 0; i < own.n; ++i)
      if (!own_used[std::size_t(i)]) {
        fresh = i;
        break;
      }
    if (fresh < 0) return false;
    struct ranked {
      double cost;
      int index;
    };
    std::vector<ranked> order;
    for (int j = 0; j < other.n; ++j) {
      if (other_used[std::size_t(j)]) continue;
      double c = 0.0;
      for (const auto& [pa, pb] : pairs) {
        int own_prev = a_turn ? pa : pb;
        int other_prev = a_turn ? pb : pa;
        c = std::max(c, std::fabs(own.at(fresh, own_prev) - other.at(j, other_prev)));
      }
      // steps may compound: each accepts up to twice the step tolerance,
      // which is what keeps the final distortion below 2 * eps
      if (c < 2.0 * eps) order.push_back({c, j});
    }
    std::sort(order.begin(), order.end(), [](const ranked& x, const ranked& y) {
      return x.cost < y.cost || (x.cost == y.cost && x.index < y.index);
    });
    int branches = 0;
    for (const auto& cand : order) {
      if (branches++ >= detail::search_branch_budget || nodes >= detail::search_node_cap)
        break;
      ++nodes;
      own_used[std::size_t(fresh)] = 1;
      other_used[std::size_t(cand.index)] = 1;
      pairs.push_back(a_turn ? std::make_pair(fresh, cand.index)
                             : std::make_pair(cand.index, fresh));
      if (round_dfs(round + 1, std::max(distortion, cand.cost))) return true;
      pairs.pop_back();
      own_used[std::size_t(fresh)] = 0;
      other_used[std::size_t(cand.index)] = 0;
    }
    return false;
  };

  if (round_dfs(0, 0.0)) {
    best.pairs = pairs;
    best.rounds_completed = int(pairs.size());
    best.complete = true;
    double d = 0.0;
    for (std::size_t x = 0; x < pairs.size(); ++x)
      for (std::size_t y = 0; y < x; ++y)
        d = std::max(d, std::fabs(ra.at(pairs[x].first, pairs[y].first) -
                                  rb.at(pairs[x].second, pairs[y].second)));
    best.distortion = d;
  }
  return best;
}

/// Deterministic dense construction: columns are emitted by a dovetailed
/// scheduler over cells (prefix length, refinement level). Each cell holds
/// grid targets at step delta / 2^level; short prefixes enumerate the grid
/// outright, longer ones draw grid points inside the running feasibility
/// interval. Coordinates beyond a cell's target take fiber-interval
/// midpoints. bound = 0 selects the unbounded mode with a growing window.
inline distance_matrix construct_universal(int n_points, double delta, double bound,
                                           std::uint64_t seed) {
  if (n_points < 1) throw input_error("construct_universal: need at least one point");
  if (!(delta > 0.0)) throw input_error("construct_universal: grid step must be positive");
  if (bound < 0.0) throw input_error("construct_universal: bound must be nonnegative");

  rng master(seed);
  distance_matrix r = distance_matrix::zero(1);

  struct cell {
    std::vector<std::vector<double>> queue;
    std::size_t next = 0;
  };
  std::map<std::pair<int, int>, cell> cells;

  auto grid_values = [&](int level) {
    double step = delta * std::pow(0.5, level);
    double window =
        bound > 0.0 ? bound : double(level + 1) * std::max(1.0, 16.0 * delta);
    std::vector<double> vals;
    for (int i = 1; double(i) * step <= window + 1e-12; ++i)
      vals.push_back(std::min(double(i) * step, window));
    return vals;
  };

  // feasibility interval of the next coordinate against a prefix that is
  // valid by construction; skips the consistency check of the public op,
  // which would cost O(prefix^2) on this hot path
  auto fiber_interval = [](const distance_matrix& base, const std::vector<double>& prefix) {
    int m = int(prefix.size());
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      double d = base.at(i, m);
      lo = std::max(lo, std::fabs(prefix[std::size_t(i)] - d));
      hi = std::min(hi, prefix[std::size_t(i)] + d);
    }
    return std::make_pair(lo, hi);
  };

  auto make_cell = [&](int len, int level) {
    cell c;
    rng g = master.child((std::uint64_t(len) << 24) | std::uint64_t(level));
    auto vals = grid_values(level);
    if (vals.empty()) return c;
    // deep refinement grids get huge; cap what one cell materializes, since
    // the scheduler only ever consumes a handful of targets per deep cell
    if (len == 1) {
      if (vals.size() <= 4096) {
        for (double v : vals) c.queue.push_back({v});
        g.shuffle(c.queue);
      } else {
        for (int t = 0; t < 4096; ++t)
          c.queue.push_back({vals[std::size_t(g.uniform_index(int(vals.size())))]});
      }
      return c;
    }
    if (len == 2 && vals.size() * vals.size() <= 65536) {
      double d01 = r.at(0, 1);
      for (double x : vals)
        for (double y : vals)
          if (std::fabs(x - y) <= d01 + 1e-12 && x + y >= d01 - 1e-12)
            c.queue.push_back({x, y});
      g.shuffle(c.queue);
      return c;
    }
    // draw targets coordinate by coordinate, snapping to grid points inside
    // the feasibility interval of the fixed length-len prefix
    distance_matrix prefix = nw_corner(r, len);
    double step = delta * std::pow(0.5, level);
    int draws = len == 2 ? 4096 : 96;
    for (int t = 0; t < draws; ++t) {
      std::vector<double> a;
      a.push_back(vals[std::size_t(g.uniform_index(int(vals.size())))]);
      for (int m = 1; m < len; ++m) {
        auto [lo, hi] = fiber_interval(prefix, a);
        if (bound > 0.0) hi = std::min(hi, bound);
        hi = std::max(hi, lo);
        long lo_idx = long(std::ceil(lo / step - 1e-9));
        long hi_idx = long(std::floor(hi / step + 1e-9));
        lo_idx = std::max(lo_idx, 1L);
        hi_idx = std::min(hi_idx, long(vals.size()));
        double v;
        if (lo_idx > hi_idx)
          v = 0.5 * (lo + hi);
        else
          v = double(lo_idx + g.uniform_index(int(hi_idx - lo_idx + 1))) * step;
        a.push_back(std::clamp(v, lo, hi));
      }
      c.queue.push_back(std::move(a));
    }
    return c;
  };

  auto emit = [&](const std::vector<double>& target) {
    std::vector<double> col = target;
    col.reserve(std::size_t(r.n));
    for (int m = int(col.size()); m < r.n; ++m) {
      auto [lo, hi] = fiber_interval(r, col);
      if (bound > 0.0) hi = std::min(hi, bound);
      hi = std::max(hi, lo);
      col.push_back(0.5 * (lo + hi));
    }
    // grow in place: the column is feasible by construction, and the copy
    // extend makes per call would dominate at construction scale
    r.upper.insert(r.upper.end(), col.begin(), col.end());
    r.n += 1;
  };

  for (int round = 1; r.n < n_points; ++round) {
    for (int rank = 1; rank <= round && r.n < n_points; ++rank)
      for (int len = 1; len <= rank && r.n < n_points; ++len) {
        int level = rank - len;
        if (len > r.n) continue;
        auto key = std::make_pair(len, level);
        auto it = cells.find(key);
        if (it == cells.end()) it = cells.emplace(key, make_cell(len, level)).first;
        cell& c = it->second;
        if (c.next >= c.queue.size()) continue;
        emit(c.queue[c.next++]);
      }
  }
  return r;
}

}  // namespace umet
