#pragma once
/// Convex-geometric view of the admissible set A(r): H-representation,
/// exhaustive vertex enumeration of its bounded part, recession cone, the
/// closed-form triangle vertex list, and an LP membership check for the
/// vertex-plus-ray decomposition.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "distance_matrix.hpp"
#include "errors.hpp"

namespace umet {

/// One admissibility constraint. abs_le encodes |coeffs . a| <= rhs (the
/// two-sided difference bound of a pair), ge encodes coeffs . a >= rhs.
struct constraint {
  enum class sense { abs_le, ge };
  std::vector<double> coeffs;
  double rhs = 0.0;
  sense s = sense::ge;
};

struct admissible_polyhedron {
  distance_matrix base;
  std::vector<constraint> constraints;  // n(n-1) pair constraints, then n nonnegativity

  bool contains(const std::vector<double>& a, double tol = default_tol) const {
    double te = effective_tol(base, tol);
    for (const auto& c : constraint_span()) {
      double dot = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) dot += c.coeffs[i] * a[i];
      if (c.s == constraint::sense::abs_le) {
        if (std::fabs(dot) > c.rhs + te) return false;
      } else {
        if (dot < c.rhs - te) return false;
      }
    }
    return true;
  }

 private:
  const std::vector<constraint>& constraint_span() const { return constraints; }
};

/// Build the inequality description of A(r): per pair one two-sided
/// difference constraint and one sum constraint, plus n nonnegativity rows.
inline admissible_polyhedron h_representation(const distance_matrix& r) {
  admissible_polyhedron poly;
  poly.base = r;
  for (int j = 1; j < r.n; ++j)
    for (int i = 0; i < j; ++i) {
      constraint diff;
      diff.coeffs.assign(std::size_t(r.n), 0.0);
      diff.coeffs[std::size_t(i)] = 1.0;
      diff.coeffs[std::size_t(j)] = -1.0;
      diff.rhs = r.upper[pair_index(i, j)];
      diff.s = constraint::sense::abs_le;
      poly.constraints.push_back(diff);
      constraint sum;
      sum.coeffs.assign(std::size_t(r.n), 0.0);
      sum.coeffs[std::size_t(i)] = 1.0;
      sum.coeffs[std::size_t(j)] = 1.0;
      sum.rhs = r.upper[pair_index(i, j)];
      sum.s = constraint::sense::ge;
      poly.constraints.push_back(sum);
    }
  for (int i = 0; i < r.n; ++i) {
    constraint nn;
    nn.coeffs.assign(std::size_t(r.n), 0.0);
    nn.coeffs[std::size_t(i)] = 1.0;
    nn.rhs = 0.0;
    nn.s = constraint::sense::ge;
    poly.constraints.push_back(nn);
  }
  return poly;
}

struct vertex_set {
  std::vector<std::vector<double>> vertices;        // sorted lexicographically
  std::vector<std::vector<double>> recession_rays;  // unit max-coordinate
  int affine_dim = 0;
};

struct recession_report {
  std::vector<std::vector<double>> rays;
  bool base_proper = true;
};

/// Recession cone of A(r). Difference constraints force equal coordinates
/// across every constrained pair; with nonnegativity the generators are the
/// indicator vectors of the resulting classes (the all-ones ray when every
/// pair is constrained, i.e. always for a full matrix).
inline recession_report recession_cone(const distance_matrix& r) {
  std::vector<int> parent(std::size_t(r.n));
  for (int i = 0; i < r.n; ++i) parent[std::size_t(i)] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[std::size_t(x)] != x) {
      parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
      x = parent[std::size_t(x)];
    }
    return x;
  };
  for (int j = 1; j < r.n; ++j)
    for (int i = 0; i < j; ++i) {
      int a = find(i), b = find(j);
      if (a != b) parent[std::size_t(std::max(a, b))] = std::min(a, b);
    }
  recession_report out;
  out.base_proper = r.proper;
  std::vector<int> roots;
  for (int i = 0; i < r.n; ++i)
    if (find(i) == i) roots.push_back(i);
  for (int root : roots) {
    std::vector<double> ray(std::size_t(r.n), 0.0);
    for (int i = 0; i < r.n; ++i)
      if (find(i) == root) ray[std::size_t(i)] = 1.0;
    out.rays.push_back(ray);
  }
  return out;
}

namespace detail {

struct facet_row {
  std::vector<double> coeff;
  double rhs;  // coeff . a >= rhs
};

inline std::vector<facet_row> one_sided_rows(const admissible_polyhedron& poly) {
  std::vector<facet_row> rows;
  for (const auto& c : poly.constraints) {
    if (c.s == constraint::sense::abs_le) {
      facet_row up{c.coeffs, -c.rhs};
      for (double& v : up.coeff) v = -v;
      rows.push_back(up);                 // -(coeff . a) >= -rhs
      rows.push_back({c.coeffs, -c.rhs});  //  (coeff . a) >= -rhs
    } else {
      rows.push_back({c.coeffs, c.rhs});
    }
  }
  return rows;
}

/// Solve a square system by Gaussian elimination with partial pivoting;
/// nullopt when numerically singular.
inline std::optional<std::vector<double>> solve_square(
    std::vector<std::vector<double>> a, std::vector<double> b) {
  int n = int(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int row = col + 1; row < n; ++row)
      if (std::fabs(a[std::size_t(row)][std::size_t(col)]) >
          std::fabs(a[std::size_t(piv)][std::size_t(col)]))
        piv = row;
    if (std::fabs(a[std::size_t(piv)][std::size_t(col)]) < 1e-10) return std::nullopt;
    std::swap(a[std::size_t(piv)], a[std::size_t(col)]);
    std::swap(b[std::size_t(piv)], b[std::size_t(col)]);
    for (int row = col + 1; row < n; ++row) {
      double f = a[std::size_t(row)][std::size_t(col)] / a[std::size_t(col)][std::size_t(col)];
      if (f == 0.0) continue;
      for (int t = col; t < n; ++t)
        a[std::size_t(row)][std::size_t(t)] -= f * a[std::size_t(col)][std::size_t(t)];
      b[std::size_t(row)] -= f * b[std::size_t(col)];
    }
  }
  std::vector<double> x(std::size_t(n), 0.0);
  for (int row = n - 1; row >= 0; --row) {
    double s = b[std::size_t(row)];
    for (int t = row + 1; t < n; ++t)
      s -= a[std::size_t(row)][std::size_t(t)] * x[std::size_t(t)];
    x[std::size_t(row)] = s / a[std::size_t(row)][std::size_t(row)];
  }
  return x;
}

inline int affine_dimension(const std::vector<std::vector<double>>& pts, double tol) {
  if (pts.size() <= 1) return 0;
  std::size_t dim = pts[0].size();
  std::vector<std::vector<double>> diffs;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    std::vector<double> d(dim);
    for (std::size_t t = 0; t < dim; ++t) d[t] = pts[i][t] - pts[0][t];
    diffs.push_back(d);
  }
  int rank = 0;
  for (std::size_t col = 0; col < dim && std::size_t(rank) < diffs.size(); ++col) {
    std::size_t piv = std::size_t(rank);
    for (std::size_t row = std::size_t(rank); row < diffs.size(); ++row)
      if (std::fabs(diffs[row][col]) > std::fabs(diffs[piv][col])) piv = row;
    if (std::fabs(diffs[piv][col]) < tol) continue;
    std::swap(diffs[std::size_t(rank)], diffs[piv]);
    for (std::size_t row = 0; row < diffs.size(); ++row) {
      if (row == std::size_t(rank)) continue;
      double f = diffs[row][col] / diffs[std::size_t(rank)][col];
      for (std::size_t t = 0; t < dim; ++t) diffs[row][t] -= f * diffs[std::size_t(rank)][t];
    }
    ++rank;
  }
  return rank;
}

}  // namespace detail

inline constexpr int vertex_enumeration_limit = 6;

/// Complete vertex set of A(r) by exhaustive active-set enumeration: every
/// choice of n facets is solved as a square system and kept when feasible.
/// Exact at desk scale; capped at n <= 6 where the subset count explodes.
inline vertex_set extreme_points(const distance_matrix& r, double tol = default_tol) {
  auto rep = validate(r, tol);
  if (!rep.ok) throw precondition_error("extreme_points: base matrix does not validate");
  if (r.n > vertex_enumeration_limit)
    throw capability_error(
        "extreme_points: enumeration capped at n = " +
        std::to_string(vertex_enumeration_limit) +
        "; sample admissible vectors instead for larger bases");
  auto poly = h_representation(r);
  auto rows = detail::one_sided_rows(poly);
  double te = effective_tol(r, tol);
  int n = r.n;
  vertex_set out;
  std::vector<std::vector<double>> found;

  std::vector<int> pick(std::size_t(n), 0);
  std::function<void(int, int)> enumerate = [&](int start, int depth) {
    if (depth == n) {
      auto a = std::vector<std::vector<double>>(std::size_t(n));
      auto b = std::vector<double>(std::size_t(n));
      for (int t = 0; t < n; ++t) {
        a[std::size_t(t)] = rows[std::size_t(pick[std::size_t(t)])].coeff;
        b[std::size_t(t)] = rows[std::size_t(pick[std::size_t(t)])].rhs;
      }
      auto sol = detail::solve_square(std::move(a), std::move(b));
      if (!sol) return;
      for (const auto& row : rows) {
        double dot = 0.0;
        for (int t = 0; t < n; ++t) dot += row.coeff[std::size_t(t)] * (*sol)[std::size_t(t)];
        if (dot < row.rhs - te) return;
      }
      for (const auto& v : found) {
        double d = 0.0;
        for (int t = 0; t < n; ++t) d = std::max(d, std::fabs(v[std::size_t(t)] - (*sol)[std::size_t(t)]));
        if (d <= 1e-9) return;
      }
      found.push_back(*sol);
      return;
    }
    for (int i = start; i <= int(rows.size()) - (n - depth); ++i) {
      pick[std::size_t(depth)] = i;
      enumerate(i + 1, depth + 1);
    }
  };
  enumerate(0, 0);

  for (auto& v : found)
    for (double& x : v)
      if (std::fabs(x) < 1e-12) x = 0.0;  // snap exact-zero coordinates
  std::sort(found.begin(), found.end());
  out.vertices = std::move(found);
  out.recession_rays = recession_cone(r).rays;
  out.affine_dim = detail::affine_dimension(out.vertices, 1e-9);
  return out;
}

/// The seven extreme points of A(r) for a strict triangle (alpha, beta,
/// gamma) = (d(1,2), d(1,3), d(2,3)), in the conventional order: the vertex
/// closest to the origin, the three far vertices, then the three base points.
inline std::vector<std::vector<double>> triangle_vertices_closed_form(double alpha,
                                                                      double beta,
                                                                      double gamma) {
  bool strict = alpha > 0.0 && beta > 0.0 && gamma > 0.0 &&
                alpha + beta > gamma && alpha + gamma > beta && beta + gamma > alpha;
  if (!strict)
    throw input_error(
        "triangle_vertices_closed_form: degenerate triangle (vertex multiplicity "
        "changes); use extreme_points");
  double delta = (alpha + beta + gamma) / 2.0;
  return {
      {delta - gamma, delta - beta, delta - alpha},
      {delta, delta - alpha, delta - beta},
      {delta - alpha, delta, delta - gamma},
      {delta - beta, delta - gamma, delta},
      {0.0, alpha, beta},
      {alpha, 0.0, gamma},
      {beta, gamma, 0.0},
  };
}

namespace detail {

/// Phase-1 simplex feasibility for A x = b, x >= 0 (b may have any sign).
inline bool phase1_feasible(std::vector<std::vector<double>> a, std::vector<double> b,
                            double tol) {
  std::size_t m = b.size();
  std::size_t v = a.empty() ? 0 : a[0].size();
  for (std::size_t i = 0; i < m; ++i)
    if (b[i] < 0.0) {
      for (double& x : a[i]) x = -x;
      b[i] = -b[i];
    }
  // tableau columns: v structural + m artificial + rhs
  std::vector<std::vector<double>> t(m, std::vector<double>(v + m + 1, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < v; ++j) t[i][j] = a[i][j];
    t[i][v + i] = 1.0;
    t[i][v + m] = b[i];
    basis[i] = v + i;
  }
  // cost row for minimizing the artificial sum
  std::vector<double> cost(v + m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= v + m; ++j) cost[j] -= t[i][j];
  for (std::size_t i = 0; i < m; ++i) cost[v + i] = 0.0;

  for (int iter = 0; iter < 10000; ++iter) {
    std::size_t enter = v + m;
    for (std::size_t j = 0; j < v + m; ++j)
      if (cost[j] < -1e-11) { enter = j; break; }  // Bland's rule
    if (enter == v + m) break;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
      if (t[i][enter] > 1e-11) {
        double ratio = t[i][v + m] / t[i][enter];
        if (ratio < best - 1e-15 ||
            (ratio < best + 1e-15 && (leave == m || basis[i] < basis[leave]))) {
          best = ratio;
          leave = i;
        }
      }
    if (leave == m) break;  // unbounded direction cannot happen in phase 1
    double piv = t[leave][enter];
    for (double& x : t[leave]) x /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      double f = t[i][enter];
      for (std::size_t j = 0; j <= v + m; ++j) t[i][j] -= f * t[leave][j];
    }
    {
      double f = cost[enter];
      if (f != 0.0)
        for (std::size_t j = 0; j <= v + m; ++j) cost[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  double artificial_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= v) artificial_sum += t[i][v + m];
  return artificial_sum <= tol;
}

}  // namespace detail

/// LP check that `point` lies in conv(vertices) + cone(rays): feasibility of
/// sum(lambda_i v_i) + sum(t_k ray_k) = point, sum(lambda) = 1, all >= 0.
inline bool in_vertex_ray_hull(const vertex_set& vs, const std::vector<double>& point,
                               double tol = 1e-7) {
  if (vs.vertices.empty()) throw input_error("in_vertex_ray_hull: no vertices");
  std::size_t dim = point.size();
  std::size_t cols = vs.vertices.size() + vs.recession_rays.size();
  std::vector<std::vector<double>> a(dim + 1, std::vector<double>(cols, 0.0));
  std::vector<double> b(dim + 1, 0.0);
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < vs.vertices.size(); ++i) a[d][i] = vs.vertices[i][d];
    for (std::size_t k = 0; k < vs.recession_rays.size(); ++k)
      a[d][vs.vertices.size() + k] = vs.recession_rays[k][d];
    b[d] = point[d];
  }
  for (std::size_t i = 0; i < vs.vertices.size(); ++i) a[dim][i] = 1.0;
  b[dim] = 1.0;
  double scale = 1.0;
  for (double x : point) scale = std::max(scale, std::fabs(x));
  return detail::phase1_feasible(std::move(a), std::move(b), tol * scale);
}

}  // namespace umet
