#pragma once
/// Eigenvalues of distance matrices: a symmetric eigensolver (Householder
/// tridiagonalization followed by implicit-shift QL) and ensemble statistics
/// of the centered bulk spectrum with the top eigenvalue tracked separately.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "distance_matrix.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "stats.hpp"

namespace umet {

namespace detail {

/// Householder reduction of a dense symmetric matrix to tridiagonal form.
/// On return d holds the diagonal and e the subdiagonal (e[0] = 0); the
/// input is clobbered. Eigenvector accumulation is omitted.
inline void tridiagonalize(std::vector<std::vector<double>>& a, std::vector<double>& d,
                           std::vector<double>& e) {
  int n = int(a.size());
  d.assign(std::size_t(n), 0.0);
  e.assign(std::size_t(n), 0.0);
  for (int i = n - 1; i >= 1; --i) {
    int l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (int k = 0; k <= l; ++k) scale += std::fabs(a[std::size_t(i)][std::size_t(k)]);
      if (scale == 0.0) {
        e[std::size_t(i)] = a[std::size_t(i)][std::size_t(l)];
      } else {
        for (int k = 0; k <= l; ++k) {
          a[std::size_t(i)][std::size_t(k)] /= scale;
          h += a[std::size_t(i)][std::size_t(k)] * a[std::size_t(i)][std::size_t(k)];
        }
        double f = a[std::size_t(i)][std::size_t(l)];
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[std::size_t(i)] = scale * g;
        h -= f * g;
        a[std::size_t(i)][std::size_t(l)] = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          g = 0.0;
          for (int k = 0; k <= j; ++k)
            g += a[std::size_t(j)][std::size_t(k)] * a[std::size_t(i)][std::size_t(k)];
          for (int k = j + 1; k <= l; ++k)
            g += a[std::size_t(k)][std::size_t(j)] * a[std::size_t(i)][std::size_t(k)];
          e[std::size_t(j)] = g / h;
          f += e[std::size_t(j)] * a[std::size_t(i)][std::size_t(j)];
        }
        double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = a[std::size_t(i)][std::size_t(j)];
          g = e[std::size_t(j)] - hh * f;
          e[std::size_t(j)] = g;
          for (int k = 0; k <= j; ++k)
            a[std::size_t(j)][std::size_t(k)] -=
                f * e[std::size_t(k)] + g * a[std::size_t(i)][std::size_t(k)];
        }
      }
    } else {
      e[std::size_t(i)] = a[std::size_t(i)][std::size_t(l)];
    }
  }
  for (int i = 0; i < n; ++i) d[std::size_t(i)] = a[std::size_t(i)][std::size_t(i)];
  if (n > 0) e[0] = 0.0;
}

/// Implicit-shift QL sweep on a tridiagonal matrix; d enters as the diagonal,
/// e as the subdiagonal (e[0] unused), and d leaves holding the eigenvalues
/// in no particular order.
inline void ql_implicit(std::vector<double>& d, std::vector<double>& e) {
  int n = int(d.size());
  if (n < 2) return;
  for (int i = 1; i < n; ++i) e[std::size_t(i - 1)] = e[std::size_t(i)];
  e[std::size_t(n - 1)] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::fabs(d[std::size_t(m)]) + std::fabs(d[std::size_t(m + 1)]);
        if (std::fabs(e[std::size_t(m)]) <= std::numeric_limits<double>::epsilon() * dd)
          break;
      }
      if (m != l) {
        if (iter++ == 50) throw state_error("spectrum: QL iteration did not converge");
        double g = (d[std::size_t(l + 1)] - d[std::size_t(l)]) / (2.0 * e[std::size_t(l)]);
        double r = std::hypot(g, 1.0);
        g = d[std::size_t(m)] - d[std::size_t(l)] +
            e[std::size_t(l)] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[std::size_t(i)];
          double b = c * e[std::size_t(i)];
          r = std::hypot(f, g);
          e[std::size_t(i + 1)] = r;
          if (r == 0.0) {
            d[std::size_t(i + 1)] -= p;
            e[std::size_t(m)] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[std::size_t(i + 1)] - p;
          r = (d[std::size_t(i)] - g) * s + 2.0 * c * b;
          p = s * r;
          d[std::size_t(i + 1)] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && i >= l) continue;
        d[std::size_t(l)] -= p;
        e[std::size_t(l)] = g;
        e[std::size_t(m)] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

/// Eigenvalues of the symmetric matrix behind r, ascending.
inline std::vector<double> spectrum(const distance_matrix& r, double tol = default_tol) {
  for (double v : r.upper)
    if (!std::isfinite(v)) throw input_error("spectrum: non-finite entry");
  if (!validate(r, tol).ok)
    throw precondition_error("spectrum: input violates the triangle inequality");
  if (r.n == 1) return {0.0};
  auto a = std::vector<std::vector<double>>(std::size_t(r.n));
  for (int i = 0; i < r.n; ++i) {
    a[std::size_t(i)].assign(std::size_t(r.n), 0.0);
    for (int j = 0; j < r.n; ++j) a[std::size_t(i)][std::size_t(j)] = r.at(i, j);
  }
  std::vector<double> d, e;
  detail::tridiagonalize(a, d, e);
  detail::ql_implicit(d, e);
  std::sort(d.begin(), d.end());
  return d;
}

struct spectrum_stats {
  int count = 0;
  long bulk_size = 0;
  std::vector<double> perron;  // top eigenvalue of each matrix, input order
  double bulk_mean = 0.0;      // of the pooled bulk before normalization
  double bulk_sd = 0.0;
  double fourth_moment_ratio = 0.0;  // E[x^4] of the normalized bulk; semicircle gives 2
  histogram hist;                    // normalized bulk on [-3, 3]
  bool degenerate = false;           // bulk variance vanished; ratio and hist unset
};

/// Pool the spectra of an ensemble: split off the top (Perron) eigenvalue of
/// each matrix, then center and variance-normalize the remaining bulk.
inline spectrum_stats ensemble_spectrum_stats(const std::vector<distance_matrix>& matrices,
                                              int bins = 64, int jobs = 1) {
  if (int(matrices.size()) < 30)
    throw input_error("ensemble_spectrum_stats: need at least 30 matrices");
  if (bins < 1) throw input_error("ensemble_spectrum_stats: need at least one bin");
  spectrum_stats out;
  out.count = int(matrices.size());
  auto spectra = std::vector<std::vector<double>>(matrices.size());
  parallel_for(out.count, jobs,
               [&](int i) { spectra[std::size_t(i)] = spectrum(matrices[std::size_t(i)]); });
  std::vector<double> bulk;
  for (const auto& eig : spectra) {
    out.perron.push_back(eig.back());
    bulk.insert(bulk.end(), eig.begin(), eig.end() - 1);
  }
  out.bulk_size = long(bulk.size());
  if (bulk.empty()) {
    out.degenerate = true;
    return out;
  }
  out.bulk_mean = mean(bulk);
  out.bulk_sd = std::sqrt(variance(bulk));
  if (!(out.bulk_sd > 1e-12 * std::max(1.0, std::fabs(out.bulk_mean)))) {
    out.degenerate = true;
    return out;
  }
  kahan_sum m4;
  for (double& x : bulk) {
    x = (x - out.bulk_mean) / out.bulk_sd;
    m4.add(x * x * x * x);
  }
  out.fourth_moment_ratio = m4.value() / double(bulk.size());
  out.hist = make_histogram(bulk, bins, -3.0, 3.0);
  return out;
}

}  // namespace umet
