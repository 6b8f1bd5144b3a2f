#pragma once
/// File formats and run plumbing: matrix JSON/CSV, growth-chain JSON lines,
/// metric-triple and distribution JSON, packed adjacency JSON, CSV reports,
/// atomic writes, content hashing, and the run manifest.
///
/// Writers are hand-rolled so every double is emitted as its shortest
/// round-trip decimal; reading goes through a JSON parser and re-checks the
/// documented invariants before handing objects to the library.

#include <openssl/evp.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "distance_matrix.hpp"
#include "errors.hpp"
#include "format.hpp"
#include "graph.hpp"
#include "growth.hpp"
#include "mdist.hpp"
#include "polytope.hpp"
#include "version.hpp"

namespace umet {

// ---------------------------------------------------------------- plumbing

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw state_error("sha256_hex: digest computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(std::size_t(len) * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Write through a temp file in the same directory, then rename over the
/// target, so a partially written file is never observable under `path`.
inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw state_error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  return out;
}

inline void append_double_array(std::string& out, const std::vector<double>& v) {
  out.push_back('[');
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(',');
    out += format_double(v[i]);
  }
  out.push_back(']');
}

namespace detail {

inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw input_error(what + ": not valid JSON");
  return j;
}

inline std::vector<double> double_array(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw input_error(what + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) throw input_error(what + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace detail

// ------------------------------------------------------- distance matrices

inline std::string write_matrix_json(const distance_matrix& r) {
  std::string out = "{\"n\":" + std::to_string(r.n) + ",\"upper\":";
  append_double_array(out, r.upper);
  out += "}\n";
  return out;
}

inline distance_matrix read_matrix_json(const std::string& text) {
  auto j = detail::parse_json(text, "matrix");
  if (!j.is_object() || !j.contains("n") || !j.contains("upper"))
    throw input_error("matrix: expected {\"n\": int, \"upper\": [...]}");
  if (!j["n"].is_number_integer()) throw input_error("matrix: n must be an integer");
  return distance_matrix(j["n"].get<int>(), detail::double_array(j["upper"], "matrix.upper"));
}

/// Full symmetric matrix with a header row of point labels.
inline std::string write_matrix_csv(const distance_matrix& r) {
  std::string out;
  for (int j = 0; j < r.n; ++j) {
    if (j) out.push_back(',');
    out += "x" + std::to_string(j + 1);
  }
  out.push_back('\n');
  for (int i = 0; i < r.n; ++i) {
    for (int j = 0; j < r.n; ++j) {
      if (j) out.push_back(',');
      out += format_double(r.at(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

inline distance_matrix read_matrix_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw input_error("matrix csv: empty file");
  int n = line.empty() ? 0 : 1;
  for (char c : line) n += c == ',';
  if (n < 1) throw input_error("matrix csv: empty header");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw input_error("matrix csv: bad number '" + cell + "'");
      }
    }
    if (int(row.size()) != n)
      throw input_error("matrix csv: row " + std::to_string(rows.size() + 1) + " has " +
                        std::to_string(row.size()) + " cells, header has " +
                        std::to_string(n));
    rows.push_back(std::move(row));
  }
  if (int(rows.size()) != n)
    throw input_error("matrix csv: " + std::to_string(rows.size()) + " rows for " +
                      std::to_string(n) + " columns");
  for (int i = 0; i < n; ++i) {
    if (rows[std::size_t(i)][std::size_t(i)] != 0.0)
      throw input_error("matrix csv: nonzero diagonal at row " + std::to_string(i + 1));
    for (int j = i + 1; j < n; ++j)
      if (rows[std::size_t(i)][std::size_t(j)] != rows[std::size_t(j)][std::size_t(i)])
        throw input_error("matrix csv: asymmetry at (" + std::to_string(i + 1) + "," +
                          std::to_string(j + 1) + ")");
  }
  distance_matrix out = distance_matrix::zero(n);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      out.upper[pair_index(i, j)] = rows[std::size_t(i)][std::size_t(j)];
  out.refresh_proper();
  return distance_matrix(out.n, std::move(out.upper));
}

/// Dispatch on the file extension: .json or .csv.
inline distance_matrix load_matrix(const std::string& path) {
  std::string text = read_file(path);
  if (path.size() >= 4 && path.rfind(".csv") == path.size() - 4)
    return read_matrix_csv(text);
  return read_matrix_json(text);
}

// ------------------------------------------------------------ growth chains

/// One chain per line; the matrix is not stored because replaying the steps
/// through extend reconstructs it bit for bit.
inline std::string write_chain_line(const growth_chain& c) {
  std::string out = "{\"seed\":" + std::to_string(c.seed) +
                    ",\"chain\":" + std::to_string(c.chain_index) + ",\"gamma\":\"" +
                    json_escape(c.gamma.to_string()) + "\",\"bound\":" +
                    format_double(c.bound) + ",\"p\":" + format_double(c.p) +
                    ",\"n\":" + std::to_string(c.matrix.n) + ",\"steps\":[";
  for (std::size_t k = 0; k < c.steps.size(); ++k) {
    if (k) out.push_back(',');
    append_double_array(out, c.steps[k]);
  }
  out += "]}\n";
  return out;
}

inline std::string write_chains_jsonl(const std::vector<growth_chain>& chains) {
  std::string out;
  for (const auto& c : chains) out += write_chain_line(c);
  return out;
}

inline growth_chain read_chain_line(const std::string& line) {
  auto j = detail::parse_json(line, "chain");
  for (const char* key : {"seed", "chain", "gamma", "bound", "n", "steps"})
    if (!j.contains(key))
      throw input_error(std::string("chain: missing field '") + key + "'");
  growth_chain c;
  c.seed = j["seed"].get<std::uint64_t>();
  c.chain_index = j["chain"].get<std::uint64_t>();
  c.gamma = gamma_spec::parse(j["gamma"].get<std::string>());
  c.bound = j["bound"].get<double>();
  c.p = j.contains("p") ? j["p"].get<double>() : 1.0;
  int n = j["n"].get<int>();
  distance_matrix r = distance_matrix::zero(1);
  for (const auto& step : j["steps"]) {
    auto a = detail::double_array(step, "chain.steps");
    r = extend(r, a);
    c.steps.push_back(std::move(a));
  }
  if (r.n != n)
    throw input_error("chain: steps describe " + std::to_string(r.n) + " points, n says " +
                      std::to_string(n));
  c.matrix = std::move(r);
  return c;
}

inline std::vector<growth_chain> read_chains_jsonl(const std::string& text) {
  std::vector<growth_chain> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(read_chain_line(line));
  }
  if (out.empty()) throw input_error("chains: no chain lines found");
  return out;
}

// ------------------------------------------------------------- adjacency

/// Rows hex-packed: byte k of a row holds vertices 8k..8k+7, least
/// significant bit first; two lowercase hex digits per byte.
inline std::string write_adjacency_json(const adjacency_matrix& a) {
  static const char* hex = "0123456789abcdef";
  int bytes_per_row = (a.n + 7) / 8;
  std::string out = "{\"n\":" + std::to_string(a.n) + ",\"rows\":[";
  for (int i = 0; i < a.n; ++i) {
    if (i) out.push_back(',');
    out.push_back('"');
    for (int b = 0; b < bytes_per_row; ++b) {
      unsigned byte = 0;
      for (int t = 0; t < 8; ++t) {
        int v = 8 * b + t;
        if (v < a.n && a.at(i, v)) byte |= 1u << t;
      }
      out.push_back(hex[byte >> 4]);
      out.push_back(hex[byte & 15]);
    }
    out.push_back('"');
  }
  out += "]}\n";
  return out;
}

inline adjacency_matrix read_adjacency_json(const std::string& text) {
  auto j = detail::parse_json(text, "adjacency");
  if (!j.is_object() || !j.contains("n") || !j.contains("rows"))
    throw input_error("adjacency: expected {\"n\": int, \"rows\": [hex,...]}");
  int n = j["n"].get<int>();
  adjacency_matrix a(n);
  if (int(j["rows"].size()) != n)
    throw input_error("adjacency: expected " + std::to_string(n) + " rows");
  int bytes_per_row = (n + 7) / 8;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (int i = 0; i < n; ++i) {
    std::string row = j["rows"][std::size_t(i)].get<std::string>();
    if (int(row.size()) != 2 * bytes_per_row)
      throw input_error("adjacency: row " + std::to_string(i + 1) + " has " +
                        std::to_string(row.size()) + " hex digits, expected " +
                        std::to_string(2 * bytes_per_row));
    for (int b = 0; b < bytes_per_row; ++b) {
      int hi = nibble(row[std::size_t(2 * b)]), lo = nibble(row[std::size_t(2 * b + 1)]);
      if (hi < 0 || lo < 0)
        throw input_error("adjacency: row " + std::to_string(i + 1) + " is not hex");
      unsigned byte = unsigned(hi) << 4 | unsigned(lo);
      for (int t = 0; t < 8; ++t) {
        int v = 8 * b + t;
        bool bit = (byte >> t) & 1;
        if (v >= n) {
          if (bit) throw input_error("adjacency: padding bits must be zero");
          continue;
        }
        if (v > i && bit) a.set_edge(i, v, true);
        if (v == i && bit)
          throw input_error("adjacency: nonzero diagonal at vertex " + std::to_string(i + 1));
      }
    }
  }
  // verify the lower triangles agreed with what set_edge mirrored
  for (int i = 0; i < n; ++i) {
    std::string row = j["rows"][std::size_t(i)].get<std::string>();
    for (int v = 0; v < i; ++v) {
      unsigned byte = unsigned(nibble(row[std::size_t(2 * (v / 8))])) << 4 |
                      unsigned(nibble(row[std::size_t(2 * (v / 8) + 1)]));
      if (bool((byte >> (v % 8)) & 1) != a.at(i, v))
        throw input_error("adjacency: asymmetry at (" + std::to_string(i + 1) + "," +
                          std::to_string(v + 1) + ")");
    }
  }
  return a;
}

// ----------------------------------------------------------- metric triples

inline std::string write_triple_json(const metric_triple& t) {
  switch (t.variant) {
    case metric_triple::kind::circle:
      return "{\"variant\":\"circle\",\"circumference\":" + format_double(t.size) + "}\n";
    case metric_triple::kind::interval:
      return "{\"variant\":\"interval\",\"length\":" + format_double(t.size) + "}\n";
    case metric_triple::kind::finite:
    default: {
      std::string out = "{\"variant\":\"finite\",\"matrix\":{\"n\":" +
                        std::to_string(t.matrix.n) + ",\"upper\":";
      append_double_array(out, t.matrix.upper);
      out += "},\"weights\":";
      append_double_array(out, t.weights);
      out += "}\n";
      return out;
    }
  }
}

inline metric_triple read_triple_json(const std::string& text) {
  auto j = detail::parse_json(text, "triple");
  if (!j.is_object() || !j.contains("variant"))
    throw input_error("triple: expected {\"variant\": ...}");
  std::string variant = j["variant"].get<std::string>();
  if (variant == "circle") {
    if (!j.contains("circumference"))
      throw input_error("triple: circle needs \"circumference\"");
    return metric_triple::circle(j["circumference"].get<double>());
  }
  if (variant == "interval") {
    if (!j.contains("length")) throw input_error("triple: interval needs \"length\"");
    return metric_triple::interval(j["length"].get<double>());
  }
  if (variant != "finite")
    throw input_error("triple: unknown variant '" + variant + "'");
  if (!j.contains("matrix") || !j.contains("weights"))
    throw input_error("triple: finite needs \"matrix\" and \"weights\"");
  distance_matrix m(j["matrix"]["n"].get<int>(),
                    detail::double_array(j["matrix"]["upper"], "triple.matrix.upper"));
  return metric_triple::finite(std::move(m),
                               detail::double_array(j["weights"], "triple.weights"));
}

// ----------------------------------------------------------- distributions

inline std::string write_distribution_json(const matrix_distribution& d) {
  std::string out = "{\"k\":" + std::to_string(d.k) +
                    ",\"exact\":" + (d.exact ? "true" : "false") + ",\"origin\":\"" +
                    json_escape(d.origin) + "\",";
  if (d.exact) {
    out += "\"entries\":[";
    for (std::size_t i = 0; i < d.entries.size(); ++i) {
      if (i) out.push_back(',');
      out += "{\"key\":";
      append_double_array(out, d.entries[i].first);
      out += ",\"p\":" + format_double(d.entries[i].second) + "}";
    }
    out += "]";
  } else {
    out += "\"samples\":[";
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
      if (i) out.push_back(',');
      append_double_array(out, d.samples[i]);
    }
    out += "]";
  }
  out += "}\n";
  return out;
}

inline matrix_distribution read_distribution_json(const std::string& text) {
  auto j = detail::parse_json(text, "distribution");
  if (!j.is_object() || !j.contains("k") || !j.contains("exact"))
    throw input_error("distribution: expected {\"k\": int, \"exact\": bool, ...}");
  matrix_distribution d;
  d.k = j["k"].get<int>();
  d.exact = j["exact"].get<bool>();
  d.origin = j.value("origin", std::string());
  std::size_t pairs = std::size_t(d.k) * std::size_t(d.k - 1) / 2;
  if (d.exact) {
    if (!j.contains("entries")) throw input_error("distribution: exact needs \"entries\"");
    for (const auto& e : j["entries"]) {
      auto key = detail::double_array(e["key"], "distribution.key");
      if (key.size() != pairs)
        throw input_error("distribution: key length does not match k");
      d.entries.emplace_back(std::move(key), e["p"].get<double>());
    }
  } else {
    if (!j.contains("samples")) throw input_error("distribution: sampled needs \"samples\"");
    for (const auto& s : j["samples"]) {
      auto key = detail::double_array(s, "distribution.samples");
      if (key.size() != pairs)
        throw input_error("distribution: sample length does not match k");
      d.samples.push_back(std::move(key));
    }
  }
  return d;
}

// ------------------------------------------------------------- CSV reports

inline std::string write_vertex_json(const vertex_set& v) {
  std::string out = "{\"vertices\":[";
  for (std::size_t i = 0; i < v.vertices.size(); ++i) {
    if (i) out.push_back(',');
    append_double_array(out, v.vertices[i]);
  }
  out += "],\"rays\":[";
  for (std::size_t i = 0; i < v.recession_rays.size(); ++i) {
    if (i) out.push_back(',');
    append_double_array(out, v.recession_rays[i]);
  }
  out += "],\"affine_dim\":" + std::to_string(v.affine_dim) + "}\n";
  return out;
}

inline std::string write_defect_csv(
    const std::vector<std::tuple<int, int, double>>& rows) {
  std::string out = "N,prefix,defect\n";
  for (const auto& [n, prefix, defect] : rows)
    out += std::to_string(n) + "," + std::to_string(prefix) + "," + format_double(defect) +
           "\n";
  return out;
}

inline std::string write_histogram_csv(const histogram& h) {
  std::string out = "bin_left,bin_right,density\n";
  for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
    out += format_double(h.edges[b]) + "," + format_double(h.edges[b + 1]) + "," +
           format_double(h.density[b]) + "\n";
  return out;
}

// ---------------------------------------------------------------- manifest

struct manifest {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, sha256)
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
};

inline std::string write_manifest_json(const manifest& m) {
  std::string out = "{\"command\":\"" + json_escape(m.command) + "\",\"version\":\"" +
                    version + "\",\"seed\":" + std::to_string(m.seed) + ",\"inputs\":[";
  for (std::size_t i = 0; i < m.inputs.size(); ++i) {
    if (i) out.push_back(',');
    out += "{\"path\":\"" + json_escape(m.inputs[i].first) + "\",\"sha256\":\"" +
           m.inputs[i].second + "\"}";
  }
  out += "],\"outputs\":[";
  for (std::size_t i = 0; i < m.outputs.size(); ++i) {
    if (i) out.push_back(',');
    out += "\"" + json_escape(m.outputs[i]) + "\"";
  }
  out += "],\"wall_seconds\":" + format_double(m.wall_seconds) + "}\n";
  return out;
}

}  // namespace umet
