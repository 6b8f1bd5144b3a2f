#pragma once
/// Numeric and statistical utilities: compensated summation, normal and
/// chi-square distribution functions, Kolmogorov-Smirnov tests, energy
/// distance with a permutation test, histograms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace umet {

/// Kahan compensated accumulator.
struct kahan_sum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

inline double mean(const std::vector<double>& v) {
  kahan_sum s;
  for (double x : v) s.add(x);
  return v.empty() ? 0.0 : s.value() / double(v.size());
}

inline double variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v);
  kahan_sum s;
  for (double x : v) s.add((x - m) * (x - m));
  return s.value() / double(v.size() - 1);
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(mid) - 1,
                   v.begin() + std::ptrdiff_t(mid));
  return 0.5 * (v[mid - 1] + hi);
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Inverse standard normal CDF (Acklam's rational approximation with one
/// Halley refinement step; absolute error far below 1e-12).
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw input_error("inverse_normal_cdf: p must lie in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double e = normal_cdf(x) - p;
  double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

namespace detail {

/// Regularized lower incomplete gamma P(a, x) by series expansion.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction.
inline double gamma_q_cf(double a, double x) {
  const double fpmin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw input_error("gamma_q: domain");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_cf(a, x);
}

/// Upper-tail p-value of a chi-square statistic with `dof` degrees of freedom.
inline double chi_square_pvalue(double stat, int dof) {
  if (stat <= 0.0) return 1.0;
  return gamma_q(double(dof) / 2.0, stat / 2.0);
}

/// Kolmogorov distribution complement Q(lambda) = P(D > lambda), asymptotic.
inline double ks_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    double term = std::exp(-2.0 * double(j) * double(j) * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

struct ks_result {
  double statistic = 0.0;
  double pvalue = 1.0;
};

/// One-sample KS test of `data` against the CDF `cdf` (data need not be sorted).
inline ks_result ks_test(std::vector<double> data,
                         const std::function<double(double)>& cdf) {
  if (data.empty()) throw input_error("ks_test: empty sample");
  std::sort(data.begin(), data.end());
  double n = double(data.size());
  double d = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double f = cdf(data[i]);
    d = std::max(d, std::fabs(f - double(i) / n));
    d = std::max(d, std::fabs(double(i + 1) / n - f));
  }
  double rn = std::sqrt(n);
  return {d, ks_q((rn + 0.12 + 0.11 / rn) * d)};
}

/// Two-sample KS test.
inline ks_result ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw input_error("ks_test_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(double(i) / double(a.size()) -
                              double(j) / double(b.size())));
  }
  double ne = std::sqrt(double(a.size()) * double(b.size()) /
                        double(a.size() + b.size()));
  return {d, ks_q((ne + 0.12 + 0.11 / ne) * d)};
}

struct chi_square_result {
  double statistic = 0.0;
  double pvalue = 1.0;
  int dof = 0;
};

/// Chi-square flatness test of `data` against uniform on [lo, hi].
inline chi_square_result chi_square_uniform(const std::vector<double>& data,
                                            double lo, double hi, int bins) {
  if (bins < 2 || data.empty()) throw input_error("chi_square_uniform: domain");
  std::vector<double> counts(std::size_t(bins), 0.0);
  for (double x : data) {
    int b = int((x - lo) / (hi - lo) * double(bins));
    b = std::clamp(b, 0, bins - 1);
    counts[std::size_t(b)] += 1.0;
  }
  double expected = double(data.size()) / double(bins);
  double stat = 0.0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;
  return {stat, chi_square_pvalue(stat, bins - 1), bins - 1};
}

namespace detail {

inline double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double energy_statistic(const std::vector<const std::vector<double>*>& pool,
                               const std::vector<int>& label, int na, int nb) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      double d = euclidean(*pool[i], *pool[j]);
      if (label[i] != label[j]) ab += d;
      else if (label[i] == 0) aa += d;
      else bb += d;
    }
  }
  double fa = double(na), fb = double(nb);
  return 2.0 * ab / (fa * fb) - 2.0 * aa / (fa * fa) - 2.0 * bb / (fb * fb);
}

}  // namespace detail

struct energy_result {
  double statistic = 0.0;
  double pvalue = 1.0;
};

/// Energy-distance two-sample test on vectors in R^d with a label-permutation
/// p-value over `permutations` shuffles.
inline energy_result energy_test(const std::vector<std::vector<double>>& a,
                                 const std::vector<std::vector<double>>& b,
                                 int permutations, rng& gen) {
  if (a.empty() || b.empty()) throw input_error("energy_test: empty sample");
  std::vector<const std::vector<double>*> pool;
  std::vector<int> label;
  for (const auto& v : a) { pool.push_back(&v); label.push_back(0); }
  for (const auto& v : b) { pool.push_back(&v); label.push_back(1); }
  double observed = detail::energy_statistic(pool, label, int(a.size()), int(b.size()));
  int at_least = 0;
  for (int p = 0; p < permutations; ++p) {
    gen.shuffle(label);
    if (detail::energy_statistic(pool, label, int(a.size()), int(b.size())) >=
        observed - 1e-15)
      ++at_least;
  }
  return {observed, double(at_least + 1) / double(permutations + 1)};
}

struct histogram {
  std::vector<double> edges;    // bins + 1 edges
  std::vector<double> density;  // bins values, integrates to 1
};

inline histogram make_histogram(const std::vector<double>& data, int bins,
                                double lo, double hi) {
  if (bins < 1 || !(hi > lo)) throw input_error("make_histogram: domain");
  histogram h;
  h.edges.resize(std::size_t(bins) + 1);
  for (int i = 0; i <= bins; ++i)
    h.edges[std::size_t(i)] = lo + (hi - lo) * double(i) / double(bins);
  h.density.assign(std::size_t(bins), 0.0);
  double width = (hi - lo) / double(bins);
  for (double x : data) {
    if (x < lo || x > hi) continue;
    int b = std::clamp(int((x - lo) / width), 0, bins - 1);
    h.density[std::size_t(b)] += 1.0;
  }
  double total = 0.0;
  for (double c : h.density) total += c;
  if (total > 0.0)
    for (double& c : h.density) c /= total * width;
  return h;
}

}  // namespace umet
