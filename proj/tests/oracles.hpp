#pragma once
/// Independent reference implementations used to freeze expected values in
/// tests. Everything here is deliberately brute force (full-matrix storage,
/// grid scans, exhaustive active-set enumeration, characteristic-polynomial
/// root isolation) and shares no code or data layout with the library under
/// test.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

namespace oracle {

using mat = std::vector<std::vector<double>>;

inline mat make_mat(int n) {
  return mat(std::size_t(n), std::vector<double>(std::size_t(n), 0.0));
}

/// Metric check by exhaustive triple scan on a full symmetric matrix.
inline bool is_metric(const mat& m, double tol) {
  int n = int(m.size());
  for (int i = 0; i < n; ++i) {
    if (m[std::size_t(i)][std::size_t(i)] != 0.0) return false;
    for (int j = 0; j < n; ++j)
      if (m[std::size_t(i)][std::size_t(j)] < -tol) return false;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (m[std::size_t(i)][std::size_t(k)] + m[std::size_t(k)][std::size_t(j)] <
            m[std::size_t(i)][std::size_t(j)] - tol)
          return false;
  return true;
}

inline bool is_p_metric(const mat& m, double p, double tol) {
  int n = int(m.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double lhs = std::pow(m[std::size_t(i)][std::size_t(k)], p) +
                     std::pow(m[std::size_t(k)][std::size_t(j)], p);
        if (lhs < std::pow(m[std::size_t(i)][std::size_t(j)], p) - tol) return false;
      }
  return true;
}

inline bool is_ultrametric(const mat& m, double tol) {
  int n = int(m.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (std::max(m[std::size_t(i)][std::size_t(k)],
                     m[std::size_t(k)][std::size_t(j)]) <
            m[std::size_t(i)][std::size_t(j)] - tol)
          return false;
  return true;
}

/// Attach two extra points with distance rows `a`, `b` and mutual distance h.
inline mat attach_two(const mat& base, const std::vector<double>& a,
                      const std::vector<double>& b, double h) {
  int n = int(base.size());
  mat m = make_mat(n + 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[std::size_t(i)][std::size_t(j)] = base[std::size_t(i)][std::size_t(j)];
  for (int i = 0; i < n; ++i) {
    m[std::size_t(i)][std::size_t(n)] = m[std::size_t(n)][std::size_t(i)] = a[std::size_t(i)];
    m[std::size_t(i)][std::size_t(n + 1)] = m[std::size_t(n + 1)][std::size_t(i)] = b[std::size_t(i)];
  }
  m[std::size_t(n)][std::size_t(n + 1)] = m[std::size_t(n + 1)][std::size_t(n)] = h;
  return m;
}

/// All grid values of h in [0, hmax] keeping the amalgamated space a metric.
inline std::vector<double> amalgam_scan(const mat& base, const std::vector<double>& a,
                                        const std::vector<double>& b, double step,
                                        double hmax) {
  std::vector<double> feasible;
  for (double h = 0.0; h <= hmax + step / 2; h += step)
    if (is_metric(attach_two(base, a, b, h), 1e-12)) feasible.push_back(h);
  return feasible;
}

inline std::vector<double> p_amalgam_scan(const mat& base, const std::vector<double>& a,
                                          const std::vector<double>& b, double p,
                                          double step, double hmax) {
  std::vector<double> feasible;
  for (double h = 0.0; h <= hmax + step / 2; h += step)
    if (is_p_metric(attach_two(base, a, b, h), p, 1e-12)) feasible.push_back(h);
  return feasible;
}

/// Candidate h values keeping the amalgamated space ultrametric; scans a grid
/// plus the exact coordinate values of a and b (where forced points live).
inline std::vector<double> ultra_amalgam_scan(const mat& base,
                                              const std::vector<double>& a,
                                              const std::vector<double>& b,
                                              double step, double hmax) {
  std::vector<double> candidates;
  for (double h = 0.0; h <= hmax + step / 2; h += step) candidates.push_back(h);
  for (double v : a) candidates.push_back(v);
  for (double v : b) candidates.push_back(v);
  std::sort(candidates.begin(), candidates.end());
  std::vector<double> feasible;
  for (double h : candidates)
    if (h >= 0.0 && is_ultrametric(attach_two(base, a, b, h), 1e-12))
      feasible.push_back(h);
  return feasible;
}

namespace detail {

struct row {
  std::vector<double> coeff;
  double rhs;  // constraint: coeff . a >= rhs
};

/// Admissibility constraints of a base matrix in >=-form.
inline std::vector<row> admissibility_rows(const mat& base) {
  int n = int(base.size());
  std::vector<row> rows;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double r = base[std::size_t(i)][std::size_t(j)];
      row d1{std::vector<double>(std::size_t(n), 0.0), -r};
      d1.coeff[std::size_t(i)] = 1.0;
      d1.coeff[std::size_t(j)] = -1.0;
      row d2{std::vector<double>(std::size_t(n), 0.0), -r};
      d2.coeff[std::size_t(i)] = -1.0;
      d2.coeff[std::size_t(j)] = 1.0;
      row s{std::vector<double>(std::size_t(n), 0.0), r};
      s.coeff[std::size_t(i)] = 1.0;
      s.coeff[std::size_t(j)] = 1.0;
      rows.push_back(d1);
      rows.push_back(d2);
      rows.push_back(s);
    }
  for (int i = 0; i < n; ++i) {
    row nn{std::vector<double>(std::size_t(n), 0.0), 0.0};
    nn.coeff[std::size_t(i)] = 1.0;
    rows.push_back(nn);
  }
  return rows;
}

inline double det2(double a, double b, double c, double d) { return a * d - b * c; }

inline double det3(const std::array<std::array<double, 3>, 3>& m) {
  return m[0][0] * det2(m[1][1], m[1][2], m[2][1], m[2][2]) -
         m[0][1] * det2(m[1][0], m[1][2], m[2][0], m[2][2]) +
         m[0][2] * det2(m[1][0], m[1][1], m[2][0], m[2][1]);
}

inline void keep_unique_sorted(std::vector<std::vector<double>>& pts) {
  std::vector<std::vector<double>> out;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : out) {
      double d = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) d = std::max(d, std::fabs(p[i] - q[i]));
      if (d <= 1e-9) { dup = true; break; }
    }
    if (!dup) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  pts = out;
}

}  // namespace detail

/// Vertices of the admissible set of a 2-point base at distance c, by
/// enumerating all active constraint pairs and filtering by feasibility.
inline std::vector<std::vector<double>> vertices_2d(double c) {
  mat base = make_mat(2);
  base[0][1] = base[1][0] = c;
  auto rows = detail::admissibility_rows(base);
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      double det = detail::det2(rows[i].coeff[0], rows[i].coeff[1],
                                rows[j].coeff[0], rows[j].coeff[1]);
      if (std::fabs(det) < 1e-12) continue;
      double x = detail::det2(rows[i].rhs, rows[i].coeff[1], rows[j].rhs, rows[j].coeff[1]) / det;
      double y = detail::det2(rows[i].coeff[0], rows[i].rhs, rows[j].coeff[0], rows[j].rhs) / det;
      bool ok = true;
      for (const auto& r : rows)
        if (r.coeff[0] * x + r.coeff[1] * y < r.rhs - 1e-9) { ok = false; break; }
      if (ok) pts.push_back({x, y});
    }
  detail::keep_unique_sorted(pts);
  return pts;
}

/// Vertices of the admissible set of a 3-point base (triangle alpha, beta,
/// gamma = d12, d13, d23) by exhaustive active triple enumeration.
inline std::vector<std::vector<double>> vertices_3d(double alpha, double beta,
                                                    double gamma) {
  mat base = make_mat(3);
  base[0][1] = base[1][0] = alpha;
  base[0][2] = base[2][0] = beta;
  base[1][2] = base[2][1] = gamma;
  auto rows = detail::admissibility_rows(base);
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      for (std::size_t k = j + 1; k < rows.size(); ++k) {
        std::array<std::array<double, 3>, 3> A{};
        std::array<double, 3> rhs{rows[i].rhs, rows[j].rhs, rows[k].rhs};
        for (int t = 0; t < 3; ++t) {
          A[0][std::size_t(t)] = rows[i].coeff[std::size_t(t)];
          A[1][std::size_t(t)] = rows[j].coeff[std::size_t(t)];
          A[2][std::size_t(t)] = rows[k].coeff[std::size_t(t)];
        }
        double det = detail::det3(A);
        if (std::fabs(det) < 1e-12) continue;
        std::array<double, 3> sol{};
        for (int col = 0; col < 3; ++col) {
          auto Ac = A;
          for (int r = 0; r < 3; ++r) Ac[std::size_t(r)][std::size_t(col)] = rhs[std::size_t(r)];
          sol[std::size_t(col)] = detail::det3(Ac) / det;
        }
        bool ok = true;
        for (const auto& r : rows) {
          double dot = 0.0;
          for (int t = 0; t < 3; ++t) dot += r.coeff[std::size_t(t)] * sol[std::size_t(t)];
          if (dot < r.rhs - 1e-9) { ok = false; break; }
        }
        if (ok) pts.push_back({sol[0], sol[1], sol[2]});
      }
  detail::keep_unique_sorted(pts);
  return pts;
}

/// Characteristic polynomial coefficients of a full matrix by the
/// Faddeev-LeVerrier recurrence: p(x) = x^n + c[n-1] x^(n-1) + ... + c[0].
inline std::vector<double> charpoly(const mat& a) {
  int n = int(a.size());
  std::vector<double> c(std::size_t(n) + 1, 0.0);
  c[std::size_t(n)] = 1.0;
  mat m = make_mat(n);
  for (int i = 0; i < n; ++i) m[std::size_t(i)][std::size_t(i)] = 1.0;
  for (int k = 1; k <= n; ++k) {
    mat am = make_mat(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int t = 0; t < n; ++t)
          s += a[std::size_t(i)][std::size_t(t)] * m[std::size_t(t)][std::size_t(j)];
        am[std::size_t(i)][std::size_t(j)] = s;
      }
    double tr = 0.0;
    for (int i = 0; i < n; ++i) tr += am[std::size_t(i)][std::size_t(i)];
    double ck = -tr / double(k);
    c[std::size_t(n - k)] = ck;
    m = am;
    for (int i = 0; i < n; ++i) m[std::size_t(i)][std::size_t(i)] += ck;
  }
  return c;
}

/// All real roots of a polynomial with distinct real roots, by sign-change
/// scanning inside the Gershgorin interval of the source matrix and bisection.
inline std::vector<double> charpoly_eigs(const mat& a) {
  int n = int(a.size());
  auto c = charpoly(a);
  auto eval = [&](double x) {
    double v = 0.0;
    for (int k = n; k >= 0; --k) v = v * x + c[std::size_t(k)];
    return v;
  };
  double radius = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::fabs(a[std::size_t(i)][std::size_t(j)]);
    radius = std::max(radius, s);
  }
  double lo = -radius - 1.0, hi = radius + 1.0;
  const int grid = 200000;
  std::vector<double> roots;
  double prev_x = lo, prev_v = eval(lo);
  for (int g = 1; g <= grid; ++g) {
    double x = lo + (hi - lo) * double(g) / double(grid);
    double v = eval(x);
    if (prev_v == 0.0) roots.push_back(prev_x);
    else if ((prev_v < 0.0) != (v < 0.0)) {
      double xl = prev_x, xh = x;
      for (int it = 0; it < 200; ++it) {
        double xm = 0.5 * (xl + xh);
        double vm = eval(xm);
        if ((vm < 0.0) == (prev_v < 0.0)) xl = xm;
        else xh = xm;
      }
      roots.push_back(0.5 * (xl + xh));
    }
    prev_x = x;
    prev_v = v;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Exact matrix distribution of a finite weighted space by tuple enumeration.
/// Keys are full k x k matrices flattened row-major.
inline std::map<std::vector<double>, double> exact_distribution(
    const mat& dist, const std::vector<double>& weights, int k) {
  int n = int(dist.size());
  std::map<std::vector<double>, double> out;
  std::vector<int> tuple(std::size_t(k), 0);
  while (true) {
    std::vector<double> key(std::size_t(k) * std::size_t(k), 0.0);
    double w = 1.0;
    for (int i = 0; i < k; ++i) {
      w *= weights[std::size_t(tuple[std::size_t(i)])];
      for (int j = 0; j < k; ++j)
        key[std::size_t(i) * std::size_t(k) + std::size_t(j)] =
            dist[std::size_t(tuple[std::size_t(i)])][std::size_t(tuple[std::size_t(j)])];
    }
    out[key] += w;
    int pos = k - 1;
    while (pos >= 0 && tuple[std::size_t(pos)] == n - 1) {
      tuple[std::size_t(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    tuple[std::size_t(pos)] += 1;
  }
  return out;
}

/// CDF of the arc distance between two uniform points on a circle of
/// circumference c: uniform on [0, c/2].
inline double circle_pair_cdf(double t, double c) {
  if (t <= 0.0) return 0.0;
  return std::min(1.0, 2.0 * t / c);
}

/// CDF of |u - v| for u, v uniform on an interval of length L.
inline double interval_pair_cdf(double t, double L) {
  if (t <= 0.0) return 0.0;
  if (t >= L) return 1.0;
  double s = t / L;
  return 2.0 * s - s * s;
}

}  // namespace oracle
