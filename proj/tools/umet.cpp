// umet: command line front end for the distance-matrix library.
//
// Exit codes: 0 the requested property holds (or the artifact was produced),
// 1 the property fails (triangle violations, missing words, failed covering
// check, non-identifiable distribution), 2 bad input or usage.
//
// Runs that reach a verdict write <out>.manifest.json (umet.manifest.json
// when no --out) recording the command, seed, input hashes, and wall time.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"

#include "umet/io.hpp"
#include "umet/pmetric.hpp"
#include "umet/spectra.hpp"
#include "umet/universality.hpp"

namespace {

struct run_context {
  std::string command;
  std::uint64_t seed = 0;
  int jobs = 1;
  double tol = umet::default_tol;
  std::string out;
  bool quiet = false;
  umet::manifest record;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  std::string slurp(const std::string& path) {
    std::string bytes = umet::read_file(path);
    record.inputs.emplace_back(path, umet::sha256_hex(bytes));
    return bytes;
  }

  void emit(const std::string& content) {
    if (out.empty()) {
      std::cout << content;
    } else {
      umet::atomic_write(out, content);
      record.outputs.push_back(out);
    }
  }

  void emit_named(const std::string& path, const std::string& content) {
    umet::atomic_write(path, content);
    record.outputs.push_back(path);
  }

  void info(const std::string& line) {
    if (!quiet) std::cout << line << "\n";
  }

  void write_manifest() {
    record.command = command;
    record.seed = seed;
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string path = out.empty() ? "umet.manifest.json" : out + ".manifest.json";
    umet::atomic_write(path, umet::write_manifest_json(record));
  }
};

double parse_exponent(const std::string& s) {
  if (s == "inf" || s == "infinity")
    return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw umet::input_error("bad exponent '" + s + "' (use a number >= 1 or 'inf')");
  }
}

std::vector<int> parse_cuts(const std::string& s) {
  std::vector<int> cuts;
  std::istringstream in(s);
  std::string piece;
  while (std::getline(in, piece, ',')) {
    try {
      std::size_t used = 0;
      cuts.push_back(std::stoi(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw umet::input_error("bad cut '" + piece + "' in --cuts");
    }
  }
  if (cuts.empty()) throw umet::input_error("--cuts is empty");
  return cuts;
}

// ----------------------------------------------------------- subcommands

int run_check(run_context& ctx, const std::string& in, const std::string& p_text) {
  double p = parse_exponent(p_text);
  umet::distance_matrix r = in.size() >= 4 && in.rfind(".csv") == in.size() - 4
                                ? umet::read_matrix_csv(ctx.slurp(in))
                                : umet::read_matrix_json(ctx.slurp(in));
  auto rep = umet::validate_p(r, p, ctx.tol);
  if (rep.ok) {
    ctx.info("ok: " + std::to_string(r.n) + " points, max entry " +
             umet::format_double(r.max_entry()) + ", tolerance " +
             umet::format_double(rep.tol_used));
    return 0;
  }
  if (!ctx.quiet) {
    for (const auto& v : rep.violations)
      std::cout << "violation: triple (" << v.i + 1 << "," << v.j + 1 << "," << v.k + 1
                << ") slack " << umet::format_double(v.slack) << "\n";
    std::cout << "FAIL: " << rep.violations.size() << " violated triple(s)\n";
  }
  return 1;
}

int run_vertices(run_context& ctx, const std::string& in) {
  std::string text = ctx.slurp(in);
  umet::distance_matrix r = in.size() >= 4 && in.rfind(".csv") == in.size() - 4
                                ? umet::read_matrix_csv(text)
                                : umet::read_matrix_json(text);
  auto vs = umet::extreme_points(r, ctx.tol);
  ctx.emit(umet::write_vertex_json(vs));
  ctx.info("vertices: " + std::to_string(vs.vertices.size()) + ", rays: " +
           std::to_string(vs.recession_rays.size()));
  return 0;
}

int run_gen(run_context& ctx, int n, int count, const std::string& gamma_text,
            double bound) {
  auto gamma = umet::gamma_spec::parse(gamma_text);
  auto chains = umet::sample_ensemble(n, count, gamma, ctx.seed, bound, ctx.jobs);
  ctx.emit(umet::write_chains_jsonl(chains));
  if (!ctx.out.empty())
    ctx.info("wrote " + std::to_string(chains.size()) + " chain(s) of " +
             std::to_string(n) + " points to " + ctx.out);
  return 0;
}

int run_universality(run_context& ctx, const std::string& in, int prefix, int targets,
                     const std::string& cuts_text) {
  auto chains = umet::read_chains_jsonl(ctx.slurp(in));
  std::vector<std::tuple<int, int, double>> rows;
  umet::rng master(ctx.seed);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const auto& r = chains[c].matrix;
    if (prefix < 1 || prefix >= r.n)
      throw umet::input_error("universality: prefix must satisfy 1 <= prefix < " +
                              std::to_string(r.n));
    auto pre = umet::nw_corner(r, prefix);
    std::vector<std::vector<double>> columns;
    for (int j = prefix; j < r.n; ++j) {
      std::vector<double> col;
      for (int i = 0; i < prefix; ++i) col.push_back(r.at(i, j));
      columns.push_back(std::move(col));
    }
    std::uint64_t target_seed = master.child(c).next_u64();
    auto target_set = umet::sample_targets(pre, targets, target_seed, chains[c].bound);
    std::vector<int> cuts =
        cuts_text.empty() ? std::vector<int>{int(columns.size())} : parse_cuts(cuts_text);
    for (const auto& point : umet::defect_curve(pre, columns, cuts, target_set, ctx.tol))
      rows.emplace_back(point.columns_used, prefix, point.defect);
  }
  ctx.emit(umet::write_defect_csv(rows));
  if (!ctx.out.empty()) ctx.info("wrote " + std::to_string(rows.size()) + " row(s)");
  return 0;
}

int run_construct(run_context& ctx, int n, double delta, double bound) {
  auto r = umet::construct_universal(n, delta, bound, ctx.seed);
  ctx.emit(umet::write_matrix_json(r));
  ctx.info("constructed " + std::to_string(n) + " points, max entry " +
           umet::format_double(r.max_entry()));
  return 0;
}

int run_mdist_exact(run_context& ctx, const std::string& in, int k) {
  auto t = umet::read_triple_json(ctx.slurp(in));
  ctx.emit(umet::write_distribution_json(umet::exact_matrix_distribution(t, k)));
  return 0;
}

int run_mdist_sample(run_context& ctx, const std::string& in, int k, int count) {
  auto t = umet::read_triple_json(ctx.slurp(in));
  ctx.emit(umet::write_distribution_json(
      umet::sample_matrix_distribution(t, k, count, ctx.seed)));
  return 0;
}

int run_mdist_reconstruct(run_context& ctx, const std::string& in) {
  auto dist = umet::read_distribution_json(ctx.slurp(in));
  auto t = umet::reconstruct_finite(dist);
  ctx.emit(umet::write_triple_json(t));
  ctx.info("reconstructed " + std::to_string(t.matrix.n) + " point(s)");
  return 0;
}

int run_mdist_cond4(run_context& ctx, const std::string& in, const std::string& product,
                    double constant, bool have_constant, double eps, int nmax,
                    int horizon) {
  umet::matrix_source src;
  if (!in.empty()) {
    src = umet::triple_source(umet::read_triple_json(ctx.slurp(in)), ctx.seed);
  } else if (!product.empty()) {
    auto comma = product.find(',');
    if (comma == std::string::npos)
      throw umet::input_error("--product expects 'lo,hi'");
    umet::entry_spec spec(std::stod(product.substr(0, comma)),
                          std::stod(product.substr(comma + 1)));
    src = umet::product_matrix_source(umet::product_source{ctx.seed, spec});
  } else if (have_constant) {
    src = umet::constant_source(constant);
  } else {
    throw umet::input_error("cond4 needs one of --in, --product, --constant");
  }
  auto res = umet::condition4_check(src, eps, nmax, horizon);
  if (res.passed) {
    ctx.info("passes at N = " + std::to_string(res.smallest_n) + " (eps " +
             umet::format_double(eps) + ", horizon " + std::to_string(horizon) + ")");
    return 0;
  }
  ctx.info("fails for all N <= " + std::to_string(nmax) + ", best covering fraction " +
           umet::format_double(res.best_fraction));
  return 1;
}

int run_mdist_regularity(run_context& ctx, const std::string& in, int prefix, int points,
                         int permutations, double level) {
  auto src = umet::triple_source(umet::read_triple_json(ctx.slurp(in)), ctx.seed);
  umet::distance_matrix r = umet::distance_matrix::zero(points);
  for (int j = 1; j < points; ++j)
    for (int i = 0; i < j; ++i) r.set(i, j, src.at(i, j));
  r.refresh_proper();
  auto res = umet::regularity_report(r, prefix, permutations, ctx.seed, level);
  ctx.info("energy statistic " + umet::format_double(res.statistic) + ", p-value " +
           umet::format_double(res.pvalue) + " (" + std::to_string(res.per_group) +
           " columns per group)");
  ctx.info(res.consistent ? "consistent with a single column law"
                          : "column law drifts across the sample");
  return res.consistent ? 0 : 1;
}

int run_graph_gen(run_context& ctx, int n, double er_p, bool have_p) {
  auto a = have_p ? umet::sample_er(n, er_p, ctx.seed) : umet::construct_universal_graph(n);
  ctx.emit(umet::write_adjacency_json(a));
  ctx.info(std::to_string(n) + " vertices, " + std::to_string(a.edge_count()) + " edges");
  return 0;
}

int run_graph_check(run_context& ctx, const std::string& in, int depth) {
  auto a = umet::read_adjacency_json(ctx.slurp(in));
  auto rep = umet::word_universality_depth(a, depth);
  if (rep.universal) {
    ctx.info("universal to depth " + std::to_string(depth));
    return 0;
  }
  if (!ctx.quiet) {
    std::size_t shown = std::min<std::size_t>(rep.missing.size(), 16);
    for (std::size_t i = 0; i < shown; ++i)
      std::cout << "missing word: " << rep.missing[i] << "\n";
    if (shown < rep.missing.size())
      std::cout << "... and " << rep.missing.size() - shown << " more\n";
    std::cout << "FAIL: " << rep.missing.size() << " word(s) not realized at depth "
              << depth << "\n";
  }
  return 1;
}

int run_graph_bridge(run_context& ctx, const std::string& in) {
  auto a = umet::read_adjacency_json(ctx.slurp(in));
  auto r = umet::graph_to_distance(a);
  ctx.emit(umet::write_matrix_json(r));
  ctx.info("bridged " + std::to_string(r.n) + " vertices to a {1,2}-valued matrix");
  return 0;
}

int run_pmetric_gen(run_context& ctx, int n, const std::string& p_text,
                    const std::string& gamma_text, double scale) {
  double p = parse_exponent(p_text);
  umet::distance_matrix r =
      std::isinf(p) ? umet::sample_ultrametric(n, ctx.seed, scale)
                    : umet::sample_p_metric(n, p, umet::gamma_spec::parse(gamma_text),
                                            ctx.seed)
                          .matrix;
  ctx.emit(umet::write_matrix_json(r));
  ctx.info(std::to_string(n) + " points, max entry " + umet::format_double(r.max_entry()));
  return 0;
}

int run_spectrum(run_context& ctx, const std::string& in, int bins) {
  auto chains = umet::read_chains_jsonl(ctx.slurp(in));
  std::vector<umet::distance_matrix> mats;
  mats.reserve(chains.size());
  for (auto& c : chains) mats.push_back(std::move(c.matrix));
  auto stats = umet::ensemble_spectrum_stats(mats, bins, ctx.jobs);

  std::string stats_json = "{\"count\":" + std::to_string(stats.count) +
                           ",\"bulk_size\":" + std::to_string(stats.bulk_size) +
                           ",\"bulk_mean\":" + umet::format_double(stats.bulk_mean) +
                           ",\"bulk_sd\":" + umet::format_double(stats.bulk_sd) +
                           ",\"fourth_moment_ratio\":" +
                           umet::format_double(stats.fourth_moment_ratio) +
                           ",\"degenerate\":" + (stats.degenerate ? "true" : "false") +
                           ",\"perron\":";
  umet::append_double_array(stats_json, stats.perron);
  stats_json += "}\n";

  if (stats.degenerate) {
    ctx.info("bulk variance vanished; no histogram");
    if (!ctx.out.empty()) ctx.emit_named(ctx.out + ".stats.json", stats_json);
    return 0;
  }
  ctx.emit(umet::write_histogram_csv(stats.hist));
  if (!ctx.out.empty()) ctx.emit_named(ctx.out + ".stats.json", stats_json);
  ctx.info("pooled " + std::to_string(stats.bulk_size) + " bulk eigenvalue(s) from " +
           std::to_string(stats.count) + " matrices; fourth-moment ratio " +
           umet::format_double(stats.fourth_moment_ratio) + " (semicircle: 2)");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  run_context ctx;
  for (int i = 0; i < argc; ++i) {
    if (i) ctx.command.push_back(' ');
    ctx.command += argv[i];
  }

  CLI::App app{"distance-matrix toolkit: sampling, validation, and diagnostics"};
  app.require_subcommand(1);
  app.fallthrough();

  bool seed_given = false;
  std::uint64_t seed_flag = 0;
  app.add_option("--seed", seed_flag, "master seed (default: UMET_SEED env, then 0)")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--jobs", ctx.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tol", ctx.tol, "validation tolerance");
  app.add_option("--out", ctx.out, "output file (default: stdout)");
  app.add_flag("--quiet", ctx.quiet, "suppress informational output");

  int exit_code = 0;
  auto run = [&](auto&& fn) {
    return [&ctx, &exit_code, &seed_given, &seed_flag, fn]() {
      if (seed_given)
        ctx.seed = seed_flag;
      else if (const char* env = std::getenv("UMET_SEED"))
        ctx.seed = std::strtoull(env, nullptr, 10);
      exit_code = fn(ctx);
    };
  };

  // check
  std::string check_in, check_p = "1";
  auto* check = app.add_subcommand("check", "validate the triangle inequalities");
  check->add_option("--in", check_in, "matrix file (.json or .csv)")->required();
  check->add_option("--p", check_p, "exponent (number >= 1, or 'inf')");
  check->callback(
      run([&](run_context& c) { return run_check(c, check_in, check_p); }));

  // vertices
  std::string vert_in;
  auto* vert = app.add_subcommand("vertices", "extreme points of the admissible set");
  vert->add_option("--in", vert_in, "matrix file (.json or .csv)")->required();
  vert->callback(run([&](run_context& c) { return run_vertices(c, vert_in); }));

  // gen
  int gen_n = 0, gen_count = 1;
  std::string gen_gamma = "unif:0,1";
  double gen_bound = 0.0;
  auto* gen = app.add_subcommand("gen", "sample growth chains of random metrics");
  gen->add_option("--n", gen_n, "points per chain")->required()->check(CLI::PositiveNumber);
  gen->add_option("--count", gen_count, "number of chains");
  gen->add_option("--gamma", gen_gamma, "first-distance law, e.g. unif:0,1 exp:1");
  gen->add_option("--bound", gen_bound, "diameter bound (0 = unbounded)");
  gen->callback(run(
      [&](run_context& c) { return run_gen(c, gen_n, gen_count, gen_gamma, gen_bound); }));

  // universality
  std::string uni_in, uni_cuts;
  int uni_prefix = 0, uni_targets = 200;
  auto* uni = app.add_subcommand("universality", "defect of chains against a prefix");
  uni->add_option("--in", uni_in, "chains file (.jsonl)")->required();
  uni->add_option("--prefix", uni_prefix, "prefix size")->required();
  uni->add_option("--targets", uni_targets, "admissible targets per chain");
  uni->add_option("--cuts", uni_cuts, "comma-separated column counts, e.g. 50,200,2000");
  uni->callback(run([&](run_context& c) {
    return run_universality(c, uni_in, uni_prefix, uni_targets, uni_cuts);
  }));

  // construct
  int con_n = 0;
  double con_delta = 0.0625, con_bound = 1.0;
  auto* con = app.add_subcommand("construct", "deterministic universal metric space");
  con->add_option("--n", con_n, "number of points")->required()->check(CLI::PositiveNumber);
  con->add_option("--delta", con_delta, "grid step");
  con->add_option("--bound", con_bound, "diameter bound");
  con->callback(
      run([&](run_context& c) { return run_construct(c, con_n, con_delta, con_bound); }));

  // mdist
  auto* mdist = app.add_subcommand("mdist", "matrix distributions of metric triples");
  mdist->require_subcommand(1);

  std::string mx_in;
  int mx_k = 3;
  auto* mx = mdist->add_subcommand("exact", "exact matrix distribution");
  mx->add_option("--in", mx_in, "triple file (.json)")->required();
  mx->add_option("--k", mx_k, "sample size")->check(CLI::PositiveNumber);
  mx->callback(run([&](run_context& c) { return run_mdist_exact(c, mx_in, mx_k); }));

  std::string ms_in;
  int ms_k = 3, ms_count = 1000;
  auto* ms = mdist->add_subcommand("sample", "empirical matrix distribution");
  ms->add_option("--in", ms_in, "triple file (.json)")->required();
  ms->add_option("--k", ms_k, "sample size")->check(CLI::PositiveNumber);
  ms->add_option("--count", ms_count, "number of draws");
  ms->callback(
      run([&](run_context& c) { return run_mdist_sample(c, ms_in, ms_k, ms_count); }));

  std::string mr_in;
  auto* mr = mdist->add_subcommand("reconstruct", "recover a finite triple");
  mr->add_option("--in", mr_in, "distribution file (.json)")->required();
  mr->callback(run([&](run_context& c) { return run_mdist_reconstruct(c, mr_in); }));

  std::string c4_in, c4_product;
  double c4_constant = 0.0, c4_eps = 0.25;
  int c4_nmax = 100, c4_horizon = 1000;
  bool c4_have_constant = false;
  auto* c4 = mdist->add_subcommand("cond4", "finite-horizon covering check");
  c4->add_option("--in", c4_in, "triple file (.json)");
  c4->add_option("--product", c4_product, "i.i.d. entries uniform on 'lo,hi'");
  c4->add_option("--constant", c4_constant, "all off-diagonal entries equal")
      ->each([&](const std::string&) { c4_have_constant = true; });
  c4->add_option("--eps", c4_eps, "covering radius");
  c4->add_option("--nmax", c4_nmax, "largest N to try");
  c4->add_option("--horizon", c4_horizon, "columns inspected");
  c4->callback(run([&](run_context& c) {
    return run_mdist_cond4(c, c4_in, c4_product, c4_constant, c4_have_constant, c4_eps,
                           c4_nmax, c4_horizon);
  }));

  std::string rg_in;
  int rg_prefix = 3, rg_points = 512, rg_perms = 200;
  double rg_level = 0.01;
  auto* rg = mdist->add_subcommand("regularity", "column-law drift diagnostic");
  rg->add_option("--in", rg_in, "triple file (.json)")->required();
  rg->add_option("--n", rg_prefix, "prefix length");
  rg->add_option("--points", rg_points, "points drawn from the triple");
  rg->add_option("--permutations", rg_perms, "permutation p-value resolution");
  rg->add_option("--level", rg_level, "significance level");
  rg->callback(run([&](run_context& c) {
    return run_mdist_regularity(c, rg_in, rg_prefix, rg_points, rg_perms, rg_level);
  }));

  // graph
  auto* graph = app.add_subcommand("graph", "universal graphs and the distance bridge");
  graph->require_subcommand(1);

  int gg_n = 0;
  double gg_p = 0.0;
  bool gg_have_p = false;
  auto* gg = graph->add_subcommand("gen", "universal construction or random graph");
  gg->add_option("--n", gg_n, "vertices")->required()->check(CLI::PositiveNumber);
  gg->add_option("--p", gg_p, "edge probability (omit for the deterministic graph)")
      ->each([&](const std::string&) { gg_have_p = true; });
  gg->callback(
      run([&](run_context& c) { return run_graph_gen(c, gg_n, gg_p, gg_have_p); }));

  std::string gc_in;
  int gc_depth = 4;
  auto* gc = graph->add_subcommand("check", "word universality to a given depth");
  gc->add_option("--in", gc_in, "adjacency file (.json)")->required();
  gc->add_option("--depth", gc_depth, "word length")->check(CLI::PositiveNumber);
  gc->callback(run([&](run_context& c) { return run_graph_check(c, gc_in, gc_depth); }));

  std::string gb_in;
  auto* gb = graph->add_subcommand("bridge", "graph metric as a distance matrix");
  gb->add_option("--in", gb_in, "adjacency file (.json)")->required();
  gb->callback(run([&](run_context& c) { return run_graph_bridge(c, gb_in); }));

  // pmetric
  auto* pm = app.add_subcommand("pmetric", "power-triangle and ultrametric variants");
  pm->require_subcommand(1);

  int pg_n = 0;
  std::string pg_p = "2", pg_gamma = "unif:0,1";
  double pg_scale = 1.0;
  auto* pg = pm->add_subcommand("gen", "sample one matrix");
  pg->add_option("--n", pg_n, "points")->required()->check(CLI::PositiveNumber);
  pg->add_option("--p", pg_p, "exponent (number >= 1, or 'inf' for ultrametric)");
  pg->add_option("--gamma", pg_gamma, "first-distance law (finite p only)");
  pg->add_option("--scale", pg_scale, "barrier scale (p = inf only)");
  pg->callback(run(
      [&](run_context& c) { return run_pmetric_gen(c, pg_n, pg_p, pg_gamma, pg_scale); }));

  std::string pc_in, pc_p = "2";
  auto* pc = pm->add_subcommand("check", "validate under the power triangle inequality");
  pc->add_option("--in", pc_in, "matrix file (.json or .csv)")->required();
  pc->add_option("--p", pc_p, "exponent (number >= 1, or 'inf')");
  pc->callback(run([&](run_context& c) { return run_check(c, pc_in, pc_p); }));

  // spectrum
  std::string sp_in;
  int sp_bins = 64;
  auto* sp = app.add_subcommand("spectrum", "pooled bulk spectrum of an ensemble");
  sp->add_option("--in", sp_in, "chains file (.jsonl)")->required();
  sp->add_option("--bins", sp_bins, "histogram bins")->check(CLI::PositiveNumber);
  sp->callback(run([&](run_context& c) { return run_spectrum(c, sp_in, sp_bins); }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const umet::non_identifiable_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.write_manifest();
    return 1;
  } catch (const umet::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  ctx.write_manifest();
  return exit_code;
}
