#include "treelcl.h"

#include <cstring>
#include <map>
#include <new>
#include <sstream>
#include <string>

#include "forest.hpp"
#include "lcl.hpp"
#include "mpc.hpp"
#include "oracle.hpp"
#include "rake.hpp"
#include "rooting.hpp"
#include "solver.hpp"

struct tl_forest {
  tl::Forest f;
  tl::HalfEdgeLabeling in_labels;
};

struct tl_lcl {
  tl::NodeEdgeLcl lcl;
};

struct tl_result {
  std::string text;
  std::string trace;
  std::map<std::string, long long> stats;
};

namespace {

thread_local std::string g_last_error = "no error";

tl_status fail(tl_status code, const std::string& what) {
  g_last_error = what;
  return code;
}

// Runs `body`, translating exceptions to status codes. `out` is cleared on
// failure so callers never see a partial product.
template <typename Out, typename Body>
tl_status guarded(Out** out, Body&& body) {
  if (!out) return fail(TL_EINVALID, "null out-parameter");
  *out = nullptr;
  try {
    *out = body();
    return TL_OK;
  } catch (const tl::ParseError& e) {
    return fail(TL_EPARSE, e.what());
  } catch (const tl::InvalidInput& e) {
    return fail(TL_EINVALID, e.what());
  } catch (const tl::mpc::MemoryViolation& e) {
    return fail(TL_EMEMORY, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TL_EMEMORY, "allocation failed");
  } catch (const std::exception& e) {
    return fail(TL_EUNKNOWN, e.what());
  }
}

tl_options sanitized(const tl_options* opt) {
  tl_options o = opt ? *opt : tl_default_options();
  if (o.delta <= 0.0 || o.delta >= 1.0)
    throw tl::InvalidInput("delta must lie strictly between 0 and 1");
  if (o.l < 1) throw tl::InvalidInput("l must be at least 1");
  return o;
}

tl::mpc::Config config_of(const tl_options& o) {
  tl::mpc::Config cfg;
  cfg.delta = o.delta;
  cfg.reverse_order = o.reverse_order != 0;
  cfg.nondeterminism_check = o.check_order != 0;
  return cfg;
}

void record_cluster(tl_result* r, const tl::mpc::Cluster& cl) {
  r->stats["rounds"] = cl.rounds();
  r->stats["peak_local_words"] = cl.peak_local_words();
  r->stats["peak_global_words"] = cl.peak_global_words();
  r->stats["local_capacity"] = cl.local_capacity();
  r->stats["global_capacity"] = cl.global_capacity();
}

// OUT v1: "outlabel <v> <u> <symbol>" per half-edge, or "no solution".
tl::HalfEdgeLabeling parse_out(const tl::Forest& f, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "OUT v1")
    throw tl::ParseError("expected OUT v1 header");
  tl::HalfEdgeLabeling out(2 * f.m());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word, sym;
    int vid, uid;
    if (!(ls >> word >> vid >> uid >> sym) || word != "outlabel")
      throw tl::ParseError("malformed line: " + line);
    std::string extra;
    if (ls >> extra) throw tl::ParseError("trailing tokens: " + line);
    if (!f.has_id(vid) || !f.has_id(uid))
      throw tl::ParseError("unknown node ID in: " + line);
    int v = f.index_of(vid), u = f.index_of(uid);
    int e = f.edge_index(v, u);
    if (e < 0) throw tl::ParseError("no such edge in: " + line);
    std::string& slot = out.label[f.half_edge(v, e)];
    if (!slot.empty()) throw tl::ParseError("duplicate half-edge in: " + line);
    slot = sym;
  }
  if (!out.complete())
    throw tl::ParseError("output labeling does not cover every half-edge");
  return out;
}

}  // namespace

extern "C" {

const char* tl_last_error(void) { return g_last_error.c_str(); }

tl_options tl_default_options(void) {
  tl_options o;
  o.delta = 0.5;
  o.l = 4;
  o.use_cluster = 1;
  o.reverse_order = 0;
  o.check_order = 0;
  o.want_trace = 0;
  return o;
}

tl_status tl_forest_parse(const char* text, tl_forest** out) {
  return guarded(out, [&] {
    if (!text) throw tl::InvalidInput("null text");
    tl::TreeFile tf = tl::parse_tree(text);
    return new tl_forest{std::move(tf.forest), std::move(tf.in_labels)};
  });
}

tl_status tl_forest_generate(const char* kind, int n, int max_degree,
                             unsigned long long seed, tl_forest** out) {
  return guarded(out, [&] {
    if (!kind) throw tl::InvalidInput("null kind");
    tl::Forest f = tl::generate_forest(kind, n, max_degree, seed);
    tl::HalfEdgeLabeling none(2 * f.m());
    return new tl_forest{std::move(f), std::move(none)};
  });
}

int tl_forest_nodes(const tl_forest* f) { return f ? f->f.n() : -1; }
int tl_forest_edges(const tl_forest* f) { return f ? f->f.m() : -1; }

tl_status tl_forest_serialize(const tl_forest* f, tl_result** out) {
  return guarded(out, [&] {
    if (!f) throw tl::InvalidInput("null forest");
    const tl::HalfEdgeLabeling* labels =
        f->in_labels.complete() ? &f->in_labels : nullptr;
    return new tl_result{tl::serialize_tree(f->f, labels), "", {}};
  });
}

void tl_forest_free(tl_forest* f) { delete f; }

tl_status tl_lcl_parse(const char* text, tl_lcl** out) {
  return guarded(out, [&] {
    if (!text) throw tl::InvalidInput("null text");
    return new tl_lcl{tl::parse_lcl(text)};
  });
}

tl_status tl_lcl_builtin(const char* name, int max_degree, tl_lcl** out) {
  return guarded(out, [&] {
    if (!name) throw tl::InvalidInput("null name");
    return new tl_lcl{tl::builtin_lcl(name, max_degree)};
  });
}

void tl_lcl_free(tl_lcl* lcl) { delete lcl; }

tl_status tl_root(const tl_forest* f, const tl_options* opt, tl_result** out) {
  return guarded(out, [&] {
    if (!f) throw tl::InvalidInput("null forest");
    tl_options o = sanitized(opt);
    auto r = new tl_result{};
    tl::RootingStats st;
    tl::Orientation orient;
    if (o.use_cluster) {
      tl::mpc::Cluster cl(f->f.n(), f->f.n(), f->f.m(), config_of(o));
      orient = tl::root_forest(f->f, cl, &st);
      record_cluster(r, cl);
      if (o.want_trace) r->trace = cl.trace_csv();
    } else {
      orient = tl::root_forest(f->f, config_of(o), &st);
    }
    r->text = tl::serialize_orientation(f->f, orient);
    r->stats["phases"] = st.phases;
    return r;
  });
}

tl_status tl_decompose(const tl_forest* f, const tl_options* opt,
                       tl_result** out) {
  return guarded(out, [&] {
    if (!f) throw tl::InvalidInput("null forest");
    tl_options o = sanitized(opt);
    tl::DecomposeOptions dopt;
    dopt.l = o.l;
    dopt.delta = o.delta;
    auto r = new tl_result{};
    tl::DecomposeStats st;
    tl::Decomposition d;
    if (o.use_cluster) {
      tl::mpc::Cluster cl(f->f.n(), f->f.n(), f->f.m(), config_of(o));
      d = tl::decompose(f->f, cl, dopt, &st);
      record_cluster(r, cl);
      if (o.want_trace) r->trace = cl.trace_csv();
    } else {
      d = tl::decompose(f->f, dopt, config_of(o), &st);
    }
    r->text = tl::serialize_decomposition(f->f, d);
    r->stats["layers"] = d.L;
    r->stats["phases"] = st.phases;
    return r;
  });
}

tl_status tl_solve(const tl_forest* f, const tl_lcl* lcl,
                   const tl_options* opt, tl_result** out) {
  return guarded(out, [&] {
    if (!f || !lcl) throw tl::InvalidInput("null forest or problem");
    tl_options o = sanitized(opt);
    auto r = new tl_result{};
    tl::SolveStats st;
    tl::SolveResult sr;
    if (o.use_cluster) {
      // The solver stores one link copy per pointer currently ending at a
      // machine, so it runs with larger fixed budget constants than the
      // simulator defaults; the budget shapes are unchanged.
      tl::mpc::Config cfg = config_of(o);
      cfg.c_local = 64;
      cfg.c_global = 64;
      tl::mpc::Cluster cl(f->f.n(), f->f.n(), f->f.m(), cfg);
      sr = tl::solve(f->f, lcl->lcl, f->in_labels, cl, &st);
      record_cluster(r, cl);
    } else {
      sr = tl::solve(f->f, lcl->lcl, f->in_labels, &st);
    }
    if (o.want_trace) r->trace = st.trace_csv();
    r->text = tl::serialize_solution(f->f, lcl->lcl, sr);
    r->stats["solved"] = sr.solved ? 1 : 0;
    r->stats["reduce_steps"] = st.reduce_steps;
    r->stats["phase1_iterations"] = st.phase1_iterations;
    r->stats["phase2_iterations"] = st.phase2_iterations;
    r->stats["total_links"] = st.total_links;
    r->stats["max_stored_links"] = st.max_stored_links;
    return r;
  });
}

tl_status tl_check(const tl_forest* f, const tl_lcl* lcl, const char* out_text,
                   tl_result** out) {
  return guarded(out, [&] {
    if (!f || !lcl || !out_text)
      throw tl::InvalidInput("null forest, problem, or output text");
    tl::HalfEdgeLabeling g_out = parse_out(f->f, out_text);
    tl::HalfEdgeLabeling gin =
        tl::effective_input(f->f, lcl->lcl, f->in_labels);
    tl::Verdict v = tl::check_solution(f->f, lcl->lcl, gin, g_out);
    auto r = new tl_result{};
    r->stats["valid"] = v.valid() ? 1 : 0;
    std::ostringstream text;
    for (const auto& viol : v.violations) text << viol.where << "\n";
    r->text = text.str();
    return r;
  });
}

tl_status tl_oracle(const tl_forest* f, const tl_lcl* lcl, long long budget,
                    tl_result** out) {
  return guarded(out, [&] {
    if (!f || !lcl) throw tl::InvalidInput("null forest or problem");
    tl::HalfEdgeLabeling gin =
        tl::effective_input(f->f, lcl->lcl, f->in_labels);
    tl::OracleVerdict v =
        budget > 0 ? tl::brute_solve(f->f, lcl->lcl, gin, budget)
                   : tl::brute_solve(f->f, lcl->lcl, gin);
    tl::SolveResult sr;
    sr.solved = v.solvable;
    if (v.witness) sr.g_out = *v.witness;
    auto r = new tl_result{};
    r->text = tl::serialize_solution(f->f, lcl->lcl, sr);
    r->stats["solved"] = v.solvable ? 1 : 0;
    return r;
  });
}

const char* tl_result_text(const tl_result* r) {
  return r ? r->text.c_str() : "";
}

const char* tl_result_trace(const tl_result* r) {
  return r ? r->trace.c_str() : "";
}

long long tl_result_stat(const tl_result* r, const char* key) {
  if (!r || !key) return -1;
  auto it = r->stats.find(key);
  return it == r->stats.end() ? -1 : it->second;
}

void tl_result_free(tl_result* r) { delete r; }

}  // extern "C"
