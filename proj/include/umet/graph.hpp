#pragma once
/// The (0,1)-adjacency toy model: Erdos-Renyi sampling, word universality at
/// truncated depth, a deterministic universal construction, the one-point
/// extension property, and the bridge to {1,2}-valued distance matrices.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "distance_matrix.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace umet {

/// Symmetric boolean matrix with zero diagonal, rows packed 64 bits a word.
struct adjacency_matrix {
  int n = 0;
  int words_per_row = 0;
  std::vector<std::uint64_t> bits;

  adjacency_matrix() = default;
  explicit adjacency_matrix(int n_) : n(n_) {
    if (n < 1) throw input_error("adjacency_matrix: need at least one vertex");
    words_per_row = (n + 63) / 64;
    bits.assign(std::size_t(n) * std::size_t(words_per_row), 0);
  }

  bool at(int i, int j) const {
    return (bits[std::size_t(i) * std::size_t(words_per_row) + std::size_t(j >> 6)] >>
            (j & 63)) &
           1u;
  }
  void set_edge(int i, int j, bool v) {
    if (i == j) throw input_error("adjacency_matrix: diagonal must stay zero");
    auto put = [&](int a, int b) {
      auto& w = bits[std::size_t(a) * std::size_t(words_per_row) + std::size_t(b >> 6)];
      std::uint64_t mask = 1ull << (b & 63);
      w = v ? (w | mask) : (w & ~mask);
    };
    put(i, j);
    put(j, i);
  }
  const std::uint64_t* row(int i) const {
    return bits.data() + std::size_t(i) * std::size_t(words_per_row);
  }
  long edge_count() const {
    long total = 0;
    for (std::uint64_t w : bits) total += __builtin_popcountll(w);
    return total / 2;
  }
};

/// Erdos-Renyi graph: each above-diagonal entry an independent Bernoulli(p).
inline adjacency_matrix sample_er(int n, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0))
    throw input_error("sample_er: edge probability must lie strictly inside (0,1)");
  if (n < 1) throw input_error("sample_er: need at least one vertex");
  adjacency_matrix a(n);
  rng g(seed);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (g.next_double() < p) a.set_edge(i, j, true);
  return a;
}

struct word_universality_report {
  bool universal = true;
  int depth = 0;
  std::vector<std::string> missing;  // words of 0/1 characters, shortest first
};

inline constexpr int word_depth_cap = 20;

/// Does every 0/1 word of length at most d appear as the top of some column
/// beyond its own length? Missing words are listed explicitly.
inline word_universality_report word_universality_depth(const adjacency_matrix& a, int d) {
  if (d < 1) throw input_error("word_universality_depth: depth must be at least 1");
  if (d > word_depth_cap)
    throw capability_error("word_universality_depth: depth capped at " +
                           std::to_string(word_depth_cap) + " (2^d word enumeration)");
  word_universality_report rep;
  rep.depth = d;
  for (int len = 1; len <= d; ++len) {
    std::vector<char> seen(std::size_t(1) << len, 0);
    for (int col = len; col < a.n; ++col) {
      std::uint32_t word = 0;
      for (int i = 0; i < len; ++i)
        word |= std::uint32_t(a.at(i, col)) << i;
      seen[word] = 1;
    }
    for (std::uint32_t w = 0; w < (std::uint32_t(1) << len); ++w)
      if (!seen[w]) {
        std::string text;
        for (int i = 0; i < len; ++i) text.push_back((w >> i) & 1 ? '1' : '0');
        rep.missing.push_back(std::move(text));
      }
  }
  rep.universal = rep.missing.empty();
  return rep;
}

/// Deterministic universal graph: vertices are numbers, i < j are adjacent
/// iff bit (i mod B) of j is set, with B = ceil(log2 n). Wrapping the bit
/// index keeps every vertex's degree healthy (the plain rule would isolate
/// vertices above the bit width and push the diameter past 2) while the
/// first B rows still read out binary digits, which is what makes every
/// word of length l appear by column 2^l + l.
inline adjacency_matrix construct_universal_graph(int n) {
  if (n < 2) throw input_error("construct_universal_graph: need at least two vertices");
  int b = 1;
  while ((1 << b) < n) ++b;
  adjacency_matrix a(n);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if ((j >> (i % b)) & 1) a.set_edge(i, j, true);
  return a;
}

struct extension_witness {
  bool found = false;
  int witness = -1;
};

/// One-point extension: a vertex outside U and V adjacent to everything in
/// U and nothing in V.
inline extension_witness extension_property_check(const adjacency_matrix& a,
                                                  const std::vector<int>& u,
                                                  const std::vector<int>& v) {
  std::vector<char> in_u(std::size_t(a.n), 0), in_v(std::size_t(a.n), 0);
  for (int x : u) {
    if (x < 0 || x >= a.n) throw input_error("extension_property_check: vertex out of range");
    in_u[std::size_t(x)] = 1;
  }
  for (int x : v) {
    if (x < 0 || x >= a.n) throw input_error("extension_property_check: vertex out of range");
    if (in_u[std::size_t(x)])
      throw input_error("extension_property_check: U and V must be disjoint");
    in_v[std::size_t(x)] = 1;
  }
  extension_witness res;
  for (int z = 0; z < a.n; ++z) {
    if (in_u[std::size_t(z)] || in_v[std::size_t(z)]) continue;
    bool ok = true;
    for (int x : u)
      if (!a.at(z, x)) {
        ok = false;
        break;
      }
    if (ok)
      for (int x : v)
        if (a.at(z, x)) {
          ok = false;
          break;
        }
    if (ok) {
      res.found = true;
      res.witness = z;
      return res;
    }
  }
  return res;
}

struct extension_scan_report {
  bool all_witnessed = true;
  long cases_checked = 0;
  // failures as (U, V) pairs
  std::vector<std::pair<std::vector<int>, std::vector<int>>> failures;
};

/// Splits of the leading prefix {0..len-1} for len <= d, with the witness
/// required beyond the prefix. Witnessing all of them is the same statement
/// as word universality at depth d, checked pattern by pattern.
inline extension_scan_report prefix_extension_scan(const adjacency_matrix& a, int d) {
  if (d < 1 || d > word_depth_cap)
    throw input_error("prefix_extension_scan: depth out of range");
  extension_scan_report rep;
  for (int len = 1; len <= d; ++len)
    for (std::uint32_t w = 0; w < (std::uint32_t(1) << len); ++w) {
      ++rep.cases_checked;
      bool witnessed = false;
      for (int z = len; z < a.n && !witnessed; ++z) {
        witnessed = true;
        for (int i = 0; i < len; ++i)
          if (a.at(i, z) != bool((w >> i) & 1)) {
            witnessed = false;
            break;
          }
      }
      if (!witnessed) {
        std::vector<int> u, v;
        for (int i = 0; i < len; ++i) ((w >> i) & 1 ? u : v).push_back(i);
        rep.failures.emplace_back(std::move(u), std::move(v));
      }
    }
  rep.all_witnessed = rep.failures.empty();
  return rep;
}

/// All disjoint (U, V) drawn from a support set with 1 <= |U| + |V| <= d,
/// witness allowed anywhere outside U and V. Candidates are intersected as
/// row bitmasks, so full-vertex supports stay tractable.
inline extension_scan_report extension_property_scan(const adjacency_matrix& a, int d,
                                                     const std::vector<int>& support) {
  if (d < 1) throw input_error("extension_property_scan: depth must be at least 1");
  std::vector<char> seen(std::size_t(a.n), 0);
  for (int x : support) {
    if (x < 0 || x >= a.n) throw input_error("extension_property_scan: vertex out of range");
    if (seen[std::size_t(x)])
      throw input_error("extension_property_scan: duplicate support vertex");
    seen[std::size_t(x)] = 1;
  }
  extension_scan_report rep;
  int m = int(support.size());
  int words = a.words_per_row;
  auto cand = std::vector<std::uint64_t>(std::size_t(words));
  std::vector<int> comb;
  auto run_splits = [&]() {
    int k = int(comb.size());
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << k); ++mask) {
      ++rep.cases_checked;
      std::fill(cand.begin(), cand.end(), ~0ull);
      for (int t = 0; t < k; ++t) {
        const std::uint64_t* row = a.row(comb[std::size_t(t)]);
        if ((mask >> t) & 1)
          for (int w = 0; w < words; ++w) cand[std::size_t(w)] &= row[w];
        else
          for (int w = 0; w < words; ++w) cand[std::size_t(w)] &= ~row[w];
      }
      for (int x : comb)
        cand[std::size_t(x >> 6)] &= ~(1ull << (x & 63));
      if (a.n & 63) cand[std::size_t(words - 1)] &= (1ull << (a.n & 63)) - 1;
      bool found = false;
      for (int w = 0; w < words && !found; ++w) found = cand[std::size_t(w)] != 0;
      if (!found) {
        std::vector<int> u, v;
        for (int t = 0; t < k; ++t)
          ((mask >> t) & 1 ? u : v).push_back(comb[std::size_t(t)]);
        rep.failures.emplace_back(std::move(u), std::move(v));
      }
    }
  };
  std::function<void(int, int)> pick = [&](int start, int left) {
    if (left == 0) {
      run_splits();
      return;
    }
    for (int s = start; s <= m - left; ++s) {
      comb.push_back(support[std::size_t(s)]);
      pick(s + 1, left - 1);
      comb.pop_back();
    }
  };
  for (int k = 1; k <= std::min(d, m); ++k) pick(0, k);
  rep.all_witnessed = rep.failures.empty();
  return rep;
}

/// Bridge to distance matrices: adjacent pairs at distance 1, everything
/// else at 2. Valid exactly when the graph has diameter at most 2.
inline distance_matrix graph_to_distance(const adjacency_matrix& a) {
  for (int j = 1; j < a.n; ++j)
    for (int i = 0; i < j; ++i) {
      if (a.at(i, j)) continue;
      bool mutual = false;
      const std::uint64_t* ri = a.row(i);
      const std::uint64_t* rj = a.row(j);
      for (int w = 0; w < a.words_per_row && !mutual; ++w) mutual = (ri[w] & rj[w]) != 0;
      if (!mutual)
        throw input_error("graph_to_distance: vertices " + std::to_string(i + 1) + " and " +
                          std::to_string(j + 1) + " have no common neighbor (diameter > 2)");
    }
  distance_matrix out = distance_matrix::zero(a.n);
  for (int j = 1; j < a.n; ++j)
    for (int i = 0; i < j; ++i) out.set(i, j, a.at(i, j) ? 1.0 : 2.0);
  return out;
}

}  // namespace umet
