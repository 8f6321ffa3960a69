// Command-line front end over the shared-library C interface. Subcommands:
//   gen        write a generated TREE v1 file
//   root       orient a forest (ORIENT v1)
//   decompose  layer decomposition (DECOMP v1)
//   solve      run the LCL solver (OUT v1 or "no solution")
//   check      validate an OUT v1 labeling (exit 0 valid, 2 invalid)
//   oracle     exhaustive reference solver (OUT v1 or "no solution")
//   bench      size sweep; one CSV row per size
//
// Exit codes: 0 success / valid; 1 parse or configuration error; 2 checker
// violations; 3 simulated-cluster memory violation.
#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "treelcl.h"

namespace {

struct ForestDel {
  void operator()(tl_forest* f) const { tl_forest_free(f); }
};
struct LclDel {
  void operator()(tl_lcl* l) const { tl_lcl_free(l); }
};
struct ResultDel {
  void operator()(tl_result* r) const { tl_result_free(r); }
};
using ForestPtr = std::unique_ptr<tl_forest, ForestDel>;
using LclPtr = std::unique_ptr<tl_lcl, LclDel>;
using ResultPtr = std::unique_ptr<tl_result, ResultDel>;

int exit_code(tl_status s) {
  switch (s) {
    case TL_OK:
      return 0;
    case TL_EMEMORY:
      return 3;
    default:
      return 1;
  }
}

[[noreturn]] void die(tl_status s) {
  std::cerr << "error: " << tl_last_error() << "\n";
  std::exit(exit_code(s));
}

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream all;
    all << std::cin.rdbuf();
    return all.str();
  }
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    std::exit(1);
  }
  std::ostringstream all;
  all << in.rdbuf();
  return all.str();
}

void spill(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    std::exit(1);
  }
  out << text;
}

ForestPtr load_forest(const std::string& tree_path) {
  tl_forest* f = nullptr;
  tl_status s = tl_forest_parse(slurp(tree_path).c_str(), &f);
  if (s != TL_OK) die(s);
  return ForestPtr(f);
}

// --lcl is a builtin name or a path to an LCL v1 file.
LclPtr load_lcl(const std::string& spec, int max_degree) {
  tl_lcl* l = nullptr;
  if (tl_lcl_builtin(spec.c_str(), max_degree, &l) == TL_OK) return LclPtr(l);
  tl_status s = tl_lcl_parse(slurp(spec).c_str(), &l);
  if (s != TL_OK) die(s);
  return LclPtr(l);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic MPC tree-LCL toolkit"};
  app.require_subcommand(1);

  std::string tree = "-", lcl_spec, out_path, trace_path, format = "text";
  std::string kind = "random-tree", sizes = "64,256,1024,4096";
  std::string check_labels = "-";
  int n = 16, max_degree = 3, l = 4;
  unsigned long long seed = 1;
  double delta = 0.5;
  long long budget = 0;
  bool direct = false;

  auto add_common = [&](CLI::App* cmd, bool needs_lcl) {
    cmd->add_option("--tree", tree, "TREE v1 file, or - for stdin");
    if (needs_lcl)
      cmd->add_option("--lcl", lcl_spec, "builtin name or LCL v1 file")
          ->required();
    cmd->add_option("--out", out_path, "output file (default stdout)");
    cmd->add_option("--delta", delta, "cluster memory exponent")
        ->default_val(0.5);
    cmd->add_flag("--direct", direct, "skip the simulated cluster");
    cmd->add_option("--max-degree", max_degree, "degree bound for built-ins")
        ->default_val(3);
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text"}))
        ->default_val("text");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a forest");
  gen->add_option("--kind", kind,
                  "path|star|balanced|caterpillar|random-tree|forest")
      ->default_val("random-tree");
  gen->add_option("--n", n, "node count")->default_val(16);
  gen->add_option("--max-degree", max_degree, "degree bound")->default_val(3);
  gen->add_option("--seed", seed, "generator seed")->default_val(1);
  gen->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* root = app.add_subcommand("root", "orient every component");
  add_common(root, false);
  root->add_option("--trace", trace_path, "write the round trace CSV here");

  CLI::App* dec = app.add_subcommand("decompose", "layer decomposition");
  add_common(dec, false);
  dec->add_option("--l", l, "path-length parameter")->default_val(4);
  dec->add_option("--trace", trace_path, "write the round trace CSV here");

  CLI::App* solve = app.add_subcommand("solve", "run the LCL solver");
  add_common(solve, true);
  solve->add_option("--trace", trace_path, "write the iteration trace here");

  CLI::App* check = app.add_subcommand("check", "validate an OUT v1 labeling");
  add_common(check, true);
  check->add_option("--labels", check_labels, "OUT v1 file, or - for stdin");

  CLI::App* oracle = app.add_subcommand("oracle", "exhaustive reference");
  add_common(oracle, true);
  oracle->add_option("--budget", budget, "enumeration budget (0 = default)");

  CLI::App* bench = app.add_subcommand("bench", "size sweep CSV");
  bench->add_option("--lcl", lcl_spec, "builtin name or LCL v1 file")
      ->required();
  bench->add_option("--sizes", sizes, "comma-separated node counts")
      ->default_val("64,256,1024,4096");
  bench->add_option("--kind", kind, "forest kind")->default_val("random-tree");
  bench->add_option("--seed", seed, "generator seed")->default_val(1);
  bench->add_option("--max-degree", max_degree, "degree bound")
      ->default_val(3);
  bench->add_option("--delta", delta, "cluster memory exponent")
      ->default_val(0.5);
  bench->add_option("--out", out_path, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  tl_options opt = tl_default_options();
  opt.delta = delta;
  opt.l = l;
  opt.use_cluster = direct ? 0 : 1;
  opt.want_trace = trace_path.empty() ? 0 : 1;

  if (gen->parsed()) {
    tl_forest* f = nullptr;
    tl_status s = tl_forest_generate(kind.c_str(), n, max_degree, seed, &f);
    if (s != TL_OK) die(s);
    ForestPtr fp(f);
    tl_result* r = nullptr;
    s = tl_forest_serialize(f, &r);
    if (s != TL_OK) die(s);
    ResultPtr rp(r);
    spill(out_path, tl_result_text(r));
    return 0;
  }

  if (bench->parsed()) {
    LclPtr lcl = load_lcl(lcl_spec, max_degree);
    std::ostringstream csv;
    csv << "n,m,delta,rounds,phase1_iters,phase2_iters,peak_local_words,"
           "global_words,wall_time_ms\n";
    std::stringstream sizes_in(sizes);
    std::string tok;
    while (std::getline(sizes_in, tok, ',')) {
      int sz = std::stoi(tok);
      tl_forest* f = nullptr;
      tl_status s =
          tl_forest_generate(kind.c_str(), sz, max_degree, seed, &f);
      if (s != TL_OK) die(s);
      ForestPtr fp(f);
      auto t0 = std::chrono::steady_clock::now();
      tl_result* r = nullptr;
      s = tl_solve(f, lcl.get(), &opt, &r);
      if (s != TL_OK) die(s);
      ResultPtr rp(r);
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
      csv << sz << "," << tl_forest_edges(f) << "," << delta << ","
          << tl_result_stat(r, "rounds") << ","
          << tl_result_stat(r, "phase1_iterations") << ","
          << tl_result_stat(r, "phase2_iterations") << ","
          << tl_result_stat(r, "peak_local_words") << ","
          << tl_result_stat(r, "peak_global_words") << "," << ms << "\n";
    }
    spill(out_path, csv.str());
    return 0;
  }

  ForestPtr f = load_forest(tree);

  if (root->parsed() || dec->parsed()) {
    tl_result* r = nullptr;
    tl_status s = root->parsed() ? tl_root(f.get(), &opt, &r)
                                 : tl_decompose(f.get(), &opt, &r);
    if (s != TL_OK) die(s);
    ResultPtr rp(r);
    spill(out_path, tl_result_text(r));
    if (!trace_path.empty()) spill(trace_path, tl_result_trace(r));
    return 0;
  }

  LclPtr lcl = load_lcl(lcl_spec, max_degree);

  if (solve->parsed()) {
    tl_result* r = nullptr;
    tl_status s = tl_solve(f.get(), lcl.get(), &opt, &r);
    if (s != TL_OK) die(s);
    ResultPtr rp(r);
    spill(out_path, tl_result_text(r));
    if (!trace_path.empty()) spill(trace_path, tl_result_trace(r));
    return 0;
  }

  if (check->parsed()) {
    std::string labels = slurp(check_labels);
    tl_result* r = nullptr;
    tl_status s = tl_check(f.get(), lcl.get(), labels.c_str(), &r);
    if (s != TL_OK) die(s);
    ResultPtr rp(r);
    if (tl_result_stat(r, "valid") == 1) return 0;
    std::cerr << tl_result_text(r);
    return 2;
  }

  if (oracle->parsed()) {
    tl_result* r = nullptr;
    tl_status s = tl_oracle(f.get(), lcl.get(), budget, &r);
    if (s != TL_OK) die(s);
    ResultPtr rp(r);
    spill(out_path, tl_result_text(r));
    return 0;
  }

  return 1;
}
