#include "lcl.hpp"

#include <algorithm>
#include <sstream>

namespace tl {

namespace {

int find_sym(const std::vector<std::string>& alphabet, const std::string& s) {
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (alphabet[i] == s) return static_cast<int>(i);
  return -1;
}

}  // namespace

int NodeEdgeLcl::in_index(const std::string& sym) const {
  return find_sym(sigma_in, sym);
}

int NodeEdgeLcl::out_index(const std::string& sym) const {
  return find_sym(sigma_out, sym);
}

void NodeEdgeLcl::validate() const {
  if (sigma_in.empty() || sigma_out.empty())
    throw InvalidInput("alphabets must be non-empty");
  if (max_degree < 1) throw InvalidInput("max_degree must be at least 1");
  auto check_distinct = [](const std::vector<std::string>& a,
                           const char* name) {
    auto copy = a;
    std::sort(copy.begin(), copy.end());
    if (std::adjacent_find(copy.begin(), copy.end()) != copy.end())
      throw InvalidInput(std::string("duplicate symbol in ") + name);
  };
  check_distinct(sigma_in, "sigma_in");
  check_distinct(sigma_out, "sigma_out");
  if (static_cast<int>(node_constraints.size()) != max_degree)
    throw InvalidInput("node_constraints must cover degrees 1..max_degree");
  int k = static_cast<int>(sigma_out.size());
  auto check_label = [&](int l) {
    if (l < 0 || l >= k) throw InvalidInput("output symbol index out of range");
  };
  for (int d = 1; d <= max_degree; ++d)
    for (const auto& ms : node_constraints[d - 1]) {
      if (static_cast<int>(ms.size()) != d)
        throw InvalidInput("multiset under node " + std::to_string(d) +
                           " has cardinality " + std::to_string(ms.size()));
      if (!std::is_sorted(ms.begin(), ms.end()))
        throw InvalidInput("node multiset not sorted");
      for (int l : ms) check_label(l);
    }
  for (auto [a, b] : edge_constraint) {
    check_label(a);
    check_label(b);
    if (a > b) throw InvalidInput("edge pair not sorted");
  }
  if (input_map.size() != sigma_in.size())
    throw InvalidInput("input_map must be total on sigma_in");
  for (const auto& outs : input_map) {
    if (!std::is_sorted(outs.begin(), outs.end()))
      throw InvalidInput("input_map entry not sorted");
    for (int l : outs) check_label(l);
  }
}

NodeEdgeLcl builtin_lcl(const std::string& name, int max_degree) {
  NodeEdgeLcl lcl;
  lcl.max_degree = max_degree;
  lcl.sigma_in = {"_"};
  int colors;
  if (name == "three-coloring")
    colors = 3;
  else if (name == "two-coloring")
    colors = 2;
  else if (name == "unsatisfiable-edge")
    colors = 2;
  else if (name == "free")
    colors = 2;
  else
    throw InvalidInput("unknown builtin LCL: " + name);
  lcl.sigma_out.clear();
  for (int c = 0; c < colors; ++c) lcl.sigma_out.push_back(std::to_string(c));

  lcl.node_constraints.resize(max_degree);
  for (int d = 1; d <= max_degree; ++d) {
    if (name == "free" || name == "unsatisfiable-edge") {
      // All multisets of cardinality d.
      std::vector<int> ms(d, 0);
      while (true) {
        lcl.node_constraints[d - 1].push_back(ms);
        int i = d - 1;
        while (i >= 0 && ms[i] == colors - 1) --i;
        if (i < 0) break;
        int v = ms[i] + 1;
        for (int j = i; j < d; ++j) ms[j] = v;
      }
    } else {
      // Coloring-style: a node uses one color on all its half-edges.
      for (int c = 0; c < colors; ++c)
        lcl.node_constraints[d - 1].emplace_back(d, c);
    }
  }
  for (int a = 0; a < colors; ++a)
    for (int b = a; b < colors; ++b) {
      bool ok;
      if (name == "unsatisfiable-edge")
        ok = false;
      else if (name == "free")
        ok = true;
      else
        ok = a != b;
      if (ok) lcl.edge_constraint.emplace_back(a, b);
    }
  std::vector<int> all(colors);
  for (int c = 0; c < colors; ++c) all[c] = c;
  lcl.input_map = {all};
  lcl.validate();
  return lcl;
}

namespace {

// Parses a brace-delimited group "{a b ...}" from the stream.
std::vector<std::string> parse_group(std::istringstream& in, bool& ok) {
  std::vector<std::string> items;
  ok = false;
  std::string tok;
  if (!(in >> tok)) return items;
  if (tok.front() != '{') {
    items.push_back(tok);  // surfaced to the caller as malformed
    return items;
  }
  tok.erase(tok.begin());
  bool closed = false;
  while (true) {
    if (!tok.empty() && tok.back() == '}') {
      tok.pop_back();
      closed = true;
    }
    if (!tok.empty()) items.push_back(tok);
    if (closed) break;
    if (!(in >> tok)) return items;
  }
  ok = true;
  return items;
}

}  // namespace

NodeEdgeLcl parse_lcl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& why) {
    throw ParseError("line " + std::to_string(lineno) + ": " + why);
  };
  NodeEdgeLcl lcl;
  bool have_header = false, have_edge = false;
  std::vector<std::pair<int, std::vector<std::vector<std::string>>>> node_lines;
  std::vector<std::vector<std::string>> edge_groups;
  std::vector<std::pair<std::string, std::vector<std::string>>> g_lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (!have_header) {
      std::string ver;
      ls >> ver;
      if (word != "LCL" || ver != "v1") fail("expected header 'LCL v1'");
      have_header = true;
      continue;
    }
    if (word == "sigma_in:") {
      std::string sym;
      while (ls >> sym) lcl.sigma_in.push_back(sym);
    } else if (word == "sigma_out:") {
      std::string sym;
      while (ls >> sym) lcl.sigma_out.push_back(sym);
    } else if (word == "node") {
      std::string dtok;
      if (!(ls >> dtok) || dtok.back() != ':') fail("expected 'node <d>:'");
      dtok.pop_back();
      int d = std::stoi(dtok);
      if (d < 1) fail("degree must be positive");
      std::vector<std::vector<std::string>> groups;
      while (true) {
        bool ok;
        auto group = parse_group(ls, ok);
        if (!ok) {
          if (!group.empty()) fail("malformed multiset group");
          break;
        }
        groups.push_back(group);
      }
      node_lines.emplace_back(d, groups);
    } else if (word == "edge:") {
      have_edge = true;
      while (true) {
        bool ok;
        auto group = parse_group(ls, ok);
        if (!ok) {
          if (!group.empty()) fail("malformed edge group");
          break;
        }
        if (group.size() != 2)
          fail("edge multiset must have cardinality 2");
        edge_groups.push_back(group);
      }
    } else if (word == "g:") {
      std::string insym, arrow;
      if (!(ls >> insym >> arrow) || arrow != "->") fail("expected 'g: <in> -> ...'");
      std::vector<std::string> outs;
      std::string sym;
      while (ls >> sym) outs.push_back(sym);
      g_lines.emplace_back(insym, outs);
    } else {
      fail("unknown directive '" + word + "'");
    }
  }
  ++lineno;
  if (!have_header) fail("missing header 'LCL v1'");
  if (lcl.sigma_in.empty()) fail("missing sigma_in");
  if (lcl.sigma_out.empty()) fail("missing sigma_out");
  if (!have_edge) fail("missing edge constraint line");
  int maxd = 0;
  for (auto& [d, groups] : node_lines) maxd = std::max(maxd, d);
  if (maxd == 0) fail("missing node constraint lines");
  lcl.max_degree = maxd;
  lcl.node_constraints.resize(maxd);
  auto out_idx = [&](const std::string& s) {
    int i = lcl.out_index(s);
    if (i < 0)
      throw ParseError("unknown output symbol '" + s + "'");
    return i;
  };
  for (auto& [d, groups] : node_lines)
    for (auto& group : groups) {
      if (static_cast<int>(group.size()) != d)
        throw ParseError("multiset under node " + std::to_string(d) +
                         " has cardinality " + std::to_string(group.size()));
      std::vector<int> ms;
      for (auto& s : group) ms.push_back(out_idx(s));
      std::sort(ms.begin(), ms.end());
      lcl.node_constraints[d - 1].push_back(ms);
    }
  for (auto& group : edge_groups) {
    int a = out_idx(group[0]), b = out_idx(group[1]);
    if (a > b) std::swap(a, b);
    lcl.edge_constraint.emplace_back(a, b);
  }
  lcl.input_map.resize(lcl.sigma_in.size());
  std::vector<char> seen(lcl.sigma_in.size(), 0);
  for (auto& [insym, outs] : g_lines) {
    int i = lcl.in_index(insym);
    if (i < 0) throw ParseError("unknown input symbol '" + insym + "'");
    if (seen[i]) throw ParseError("duplicate g line for '" + insym + "'");
    seen[i] = 1;
    std::vector<int> mapped;
    for (auto& s : outs) mapped.push_back(out_idx(s));
    std::sort(mapped.begin(), mapped.end());
    mapped.erase(std::unique(mapped.begin(), mapped.end()), mapped.end());
    lcl.input_map[i] = mapped;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw ParseError("missing g line for '" + lcl.sigma_in[i] + "'");
  // Dedupe and sort constraint sets for canonical form.
  for (auto& lists : lcl.node_constraints) {
    std::sort(lists.begin(), lists.end());
    lists.erase(std::unique(lists.begin(), lists.end()), lists.end());
  }
  std::sort(lcl.edge_constraint.begin(), lcl.edge_constraint.end());
  lcl.edge_constraint.erase(
      std::unique(lcl.edge_constraint.begin(), lcl.edge_constraint.end()),
      lcl.edge_constraint.end());
  lcl.validate();
  return lcl;
}

std::string serialize_lcl(const NodeEdgeLcl& lcl) {
  std::ostringstream out;
  out << "LCL v1\n";
  out << "sigma_in:";
  for (const auto& s : lcl.sigma_in) out << " " << s;
  out << "\nsigma_out:";
  for (const auto& s : lcl.sigma_out) out << " " << s;
  out << "\n";
  for (int d = 1; d <= lcl.max_degree; ++d) {
    out << "node " << d << ":";
    for (const auto& ms : lcl.node_constraints[d - 1]) {
      out << " {";
      for (std::size_t i = 0; i < ms.size(); ++i)
        out << (i ? " " : "") << lcl.sigma_out[ms[i]];
      out << "}";
    }
    out << "\n";
  }
  out << "edge:";
  for (auto [a, b] : lcl.edge_constraint)
    out << " {" << lcl.sigma_out[a] << " " << lcl.sigma_out[b] << "}";
  out << "\n";
  for (std::size_t i = 0; i < lcl.sigma_in.size(); ++i) {
    out << "g: " << lcl.sigma_in[i] << " ->";
    for (int l : lcl.input_map[i]) out << " " << lcl.sigma_out[l];
    out << "\n";
  }
  return out.str();
}

Verdict check_solution(const Forest& f, const NodeEdgeLcl& lcl,
                       const HalfEdgeLabeling& g_in,
                       const HalfEdgeLabeling& g_out) {
  Verdict verdict;
  auto blame = [&](Violation::Kind kind, const std::string& where) {
    verdict.violations.push_back({kind, where});
  };
  int H = 2 * f.m();
  std::vector<int> out_idx(H, -1), in_idx(H, -1);
  for (int h = 0; h < H; ++h) {
    int v = f.half_edge_node(h), u = f.half_edge_other(h);
    std::string loc = "half-edge (" + std::to_string(f.id(v)) + ",{" +
                      std::to_string(f.id(v)) + "," + std::to_string(f.id(u)) +
                      "})";
    out_idx[h] = lcl.out_index(g_out.label[h]);
    in_idx[h] = lcl.in_index(g_in.label[h]);
    if (out_idx[h] < 0) {
      blame(Violation::Alphabet, loc + ": output symbol '" + g_out.label[h] +
                                     "' not in sigma_out");
      continue;
    }
    if (in_idx[h] < 0) {
      blame(Violation::Alphabet, loc + ": input symbol '" + g_in.label[h] +
                                     "' not in sigma_in");
      continue;
    }
    const auto& allowed = lcl.input_map[in_idx[h]];
    if (!std::binary_search(allowed.begin(), allowed.end(), out_idx[h]))
      blame(Violation::InputMap,
            loc + ": output '" + g_out.label[h] + "' not in g(" +
                g_in.label[h] + ")");
  }
  if (!verdict.violations.empty() &&
      std::any_of(verdict.violations.begin(), verdict.violations.end(),
                  [](const Violation& v) { return v.kind == Violation::Alphabet; }))
    return verdict;  // multiset checks meaningless with foreign symbols
  for (int v = 0; v < f.n(); ++v) {
    int d = f.degree(v);
    if (d == 0) continue;
    if (d > lcl.max_degree) {
      blame(Violation::NodeMultiset,
            "node " + std::to_string(f.id(v)) + ": degree " +
                std::to_string(d) + " above the problem's max degree");
      continue;
    }
    std::vector<int> ms;
    for (int u : f.adj(v))
      ms.push_back(out_idx[f.half_edge(v, f.edge_index(v, u))]);
    std::sort(ms.begin(), ms.end());
    const auto& allowed = lcl.node_constraints[d - 1];
    if (std::find(allowed.begin(), allowed.end(), ms) == allowed.end())
      blame(Violation::NodeMultiset,
            "node " + std::to_string(f.id(v)) +
                ": output multiset not allowed for degree " +
                std::to_string(d));
  }
  for (int e = 0; e < f.m(); ++e) {
    auto [u, v] = f.edge(e);
    int a = out_idx[2 * e], b = out_idx[2 * e + 1];
    if (a > b) std::swap(a, b);
    if (!std::binary_search(lcl.edge_constraint.begin(),
                            lcl.edge_constraint.end(), std::make_pair(a, b)))
      blame(Violation::EdgePair, "edge {" + std::to_string(f.id(u)) + "," +
                                     std::to_string(f.id(v)) +
                                     "}: output pair not allowed");
  }
  return verdict;
}

HalfEdgeLabeling uniform_input(const Forest& f, const std::string& sym) {
  HalfEdgeLabeling lab(2 * f.m());
  for (auto& s : lab.label) s = sym;
  return lab;
}

HalfEdgeLabeling effective_input(const Forest& f, const NodeEdgeLcl& lcl,
                                 const HalfEdgeLabeling& provided) {
  HalfEdgeLabeling lab = provided;
  lab.label.resize(2 * f.m());
  for (auto& s : lab.label)
    if (s.empty()) {
      if (lcl.sigma_in.size() != 1)
        throw InvalidInput(
            "input labels required: the problem has several input symbols");
      s = lcl.sigma_in[0];
    }
  return lab;
}

}  // namespace tl
