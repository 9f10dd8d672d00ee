#include "endspace/contraction.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace endspace {

namespace {
constexpr int kWindow = 4;

bool id_subset(const std::vector<std::string>& sub,
               const std::vector<std::string>& sup) {
  return std::includes(sup.begin(), sup.end(), sub.begin(), sub.end());
}

}  // namespace

bool operator==(const ContractionImage& a, const ContractionImage& b) {
  return a.kind == b.kind && a.value == b.value;
}

int ContractionGraph::comp_of_vertex(int vertex_idx) const {
  int vc = top->vertex_count(comps.level);
  if (vertex_idx < vc) return comps.comp[vertex_idx];
  std::priority_queue<int, std::vector<int>, std::greater<int>> heap;
  std::set<int> seen;
  heap.push(vertex_idx);
  seen.insert(vertex_idx);
  while (!heap.empty()) {
    int v = heap.top();
    heap.pop();
    if (v < vc) return comps.comp[v];
    for (auto [nbr, e] : top->adj[v]) {
      if (std::binary_search(removed_idx.begin(), removed_idx.end(), e)) continue;
      if (seen.insert(nbr).second) heap.push(nbr);
    }
  }
  throw std::logic_error("vertex unreachable from the stable core");
}

int ContractionGraph::comp_of_rep_id(const std::string& rep_id) const {
  return comp_of_vertex(top->require_vertex(rep_id));
}

ContractionGraph build_contraction(const GraphPresentation& pres,
                                   std::vector<std::string> edge_ids,
                                   int level_budget) {
  ContractionGraph g;
  std::sort(edge_ids.begin(), edge_ids.end());
  edge_ids.erase(std::unique(edge_ids.begin(), edge_ids.end()), edge_ids.end());
  g.edge_set = edge_ids;
  g.top = std::make_shared<Truncation>(truncate(pres, level_budget));
  for (const auto& id : g.edge_set)
    g.removed_idx.push_back(g.top->require_edge(id));
  std::sort(g.removed_idx.begin(), g.removed_idx.end());

  if (g.edge_set.empty()) {
    g.comps = analyze_components(*g.top, pres.connectivity_level + kWindow - 1,
                                 g.removed_idx);
    g.level_used = g.comps.level;
  } else {
    auto stable = stabilize_removal(pres, *g.top, g.removed_idx, level_budget);
    if (!stable)
      throw EndspaceError("component structure not stable within the budget");
    g.comps = stable->stable;
    g.level_used = g.comps.level;
  }

  for (int c = 0; c < g.comps.count; ++c)
    g.vertices.push_back(
        {g.top->vertex_ids[g.comps.rep[c]], g.comps.growing[c] != 0});
  for (const auto& id : g.edge_set) {
    int e = g.top->require_edge(id);
    g.edges.push_back({id, g.comps.comp[g.top->edge_ends[e].first],
                       g.comps.comp[g.top->edge_ends[e].second]});
  }
  return g;
}

ContractionImage bond_image(const GraphPresentation& pres,
                            const ContractionGraph& sup,
                            const ContractionGraph& sub,
                            const ContractionImage& x) {
  (void)pres;
  if (!id_subset(sub.edge_set, sup.edge_set))
    throw EndspaceError("edge sets are not nested");
  if (x.kind == ContractionImage::Edge) {
    if (std::binary_search(sub.edge_set.begin(), sub.edge_set.end(), x.value))
      return x;  // edges of the smaller set map to themselves
    if (!std::binary_search(sup.edge_set.begin(), sup.edge_set.end(), x.value))
      throw EndspaceError("edge not in the finer contraction: " + x.value);
    int e = sub.top->require_edge(x.value);
    int comp = sub.comp_of_vertex(sub.top->edge_ends[e].first);
    return {ContractionImage::Vertex, sub.vertices[comp].representative};
  }
  int comp = sub.comp_of_rep_id(x.value);
  return {ContractionImage::Vertex, sub.vertices[comp].representative};
}

std::vector<FiniteCut> cuts_within(const GraphPresentation& pres,
                                   const std::vector<std::string>& edge_ids,
                                   int level_budget) {
  Truncation top = truncate(pres, level_budget);
  std::vector<int> idx;
  for (const auto& id : edge_ids) idx.push_back(top.require_edge(id));
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());

  std::vector<FiniteCut> cuts;
  int n = static_cast<int>(idx.size());
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> subset;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) subset.push_back(idx[i]);
    auto cut = certify_cut_on(pres, top, subset, level_budget);
    if (cut) cuts.push_back(std::move(*cut));
  }
  return canonical_cut_family(std::move(cuts));
}

ContractionImage ComparisonMap::image_of_word(const std::string& word) const {
  int w = quotient.index.word_of_pattern(word);
  if (w < 0) throw EndspaceError("word not realized: " + word);
  return {ContractionImage::Vertex,
          contraction.vertices[word_to_comp[w]].representative};
}

ContractionImage ComparisonMap::image_of_edge(const std::string& edge_id) const {
  if (std::binary_search(edge_set.begin(), edge_set.end(), edge_id))
    return {ContractionImage::Edge, edge_id};
  int e = contraction.top->require_edge(edge_id);
  int comp = contraction.comp_of_vertex(contraction.top->edge_ends[e].first);
  return {ContractionImage::Vertex, contraction.vertices[comp].representative};
}

ComparisonMap comparison_map(const GraphPresentation& pres,
                             std::vector<std::string> edge_ids,
                             int level_budget) {
  ComparisonMap m;
  std::sort(edge_ids.begin(), edge_ids.end());
  edge_ids.erase(std::unique(edge_ids.begin(), edge_ids.end()), edge_ids.end());
  m.edge_set = edge_ids;
  std::vector<FiniteCut> cuts = cuts_within(pres, m.edge_set, level_budget);
  int level = std::max(default_quotient_level(pres, cuts), level_budget);
  m.quotient = build_quotient(pres, cuts, level);
  m.contraction = build_contraction(pres, m.edge_set, level);

  m.word_to_comp.resize(m.quotient.word_count());
  for (int w = 0; w < m.quotient.word_count(); ++w)
    m.word_to_comp[w] = m.contraction.comp_of_vertex(m.quotient.index.word_rep[w]);

  // every fiber must land inside a single component
  const Truncation& t = *m.quotient.top;
  int vc = t.vertex_count(m.quotient.level_used);
  for (int v = 0; v < vc; ++v) {
    int w = m.quotient.index.word_of(v);
    if (m.contraction.comp_of_vertex(v) != m.word_to_comp[w])
      throw std::logic_error("fiber of word " + m.quotient.words()[w] +
                             " spans two components");
  }
  return m;
}

CheckReport verify_comparison_square(const GraphPresentation& pres,
                                     const std::vector<std::string>& outer,
                                     const std::vector<std::string>& inner,
                                     int level_budget) {
  CheckReport report;
  std::vector<std::string> big = outer, small = inner;
  std::sort(big.begin(), big.end());
  std::sort(small.begin(), small.end());
  if (!id_subset(small, big))
    throw EndspaceError("edge sets are not nested");

  ComparisonMap g_big = comparison_map(pres, big, level_budget);
  ComparisonMap g_small = comparison_map(pres, small, level_budget);

  for (const auto& w : g_big.quotient.words()) {
    ContractionImage lhs = bond_image(pres, g_big.contraction,
                                      g_small.contraction, g_big.image_of_word(w));
    ContractionImage rhs = g_small.image_of_word(
        project_word(g_big.quotient, g_small.quotient, w));
    if (!(lhs == rhs))
      report.fail("square fails on word " + w + ": " + lhs.value +
                  " != " + rhs.value);
  }
  const Truncation& t = *g_big.quotient.top;
  int ec = t.edge_count(g_big.quotient.level_used);
  for (int e = 0; e < ec; ++e) {
    const std::string& id = t.edge_ids[e];
    ContractionImage lhs = bond_image(pres, g_big.contraction,
                                      g_small.contraction, g_big.image_of_edge(id));
    ContractionImage rhs = g_small.image_of_edge(id);
    if (!(lhs == rhs))
      report.fail("square fails on edge " + id + ": " + lhs.value +
                  " != " + rhs.value);
  }
  return report;
}

CheckReport verify_bond_chain(const GraphPresentation& pres,
                              const std::vector<std::string>& e1,
                              const std::vector<std::string>& e2,
                              const std::vector<std::string>& e3,
                              int level_budget) {
  CheckReport report;
  ContractionGraph g1 = build_contraction(pres, e1, level_budget);
  ContractionGraph g2 = build_contraction(pres, e2, level_budget);
  ContractionGraph g3 = build_contraction(pres, e3, level_budget);

  auto check = [&](const ContractionImage& x, const std::string& what) {
    ContractionImage direct = bond_image(pres, g3, g1, x);
    ContractionImage via = bond_image(pres, g2, g1, bond_image(pres, g3, g2, x));
    if (!(direct == via))
      report.fail("bond composition fails on " + what + ": " + direct.value +
                  " != " + via.value);
    ContractionImage still = bond_image(pres, g3, g3, x);
    if (!(still == x)) report.fail("identity bond moved " + what);
  };
  for (const auto& v : g3.vertices)
    check({ContractionImage::Vertex, v.representative}, "component " + v.representative);
  for (const auto& e : g3.edge_set) check({ContractionImage::Edge, e}, "edge " + e);
  return report;
}

std::string contraction_to_dot(const ContractionGraph& g) {
  std::ostringstream os;
  os << "graph contraction {\n";
  for (size_t c = 0; c < g.vertices.size(); ++c) {
    os << "  n" << c << " [label=\"" << g.vertices[c].representative;
    if (g.vertices[c].live) os << "\\nlive";
    os << "\"];\n";
  }
  for (const auto& e : g.edges)
    os << "  n" << e.comp_a << " -- n" << e.comp_b << " [label=\"" << e.edge
       << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace endspace
