#include "endspace/tree.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace endspace {

namespace {

struct MiniUF {
  std::vector<int> parent;
  explicit MiniUF(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

// cross edges of a prefix quotient: sorted ids plus word endpoints
struct Skeleton {
  WordIndex widx;
  std::vector<std::string> cross_ids;              // sorted
  std::map<std::string, std::pair<int, int>> ends;  // id -> word pair
};

Skeleton skeleton_for(const GraphPresentation& pres, const Truncation& top,
                      int level, std::vector<FiniteCut> cuts) {
  Skeleton s;
  s.widx = build_word_index(pres, top, level, std::move(cuts));
  for (int e = 0; e < top.edge_count(level); ++e) {
    int wu = s.widx.word_of(top.edge_ends[e].first);
    int wv = s.widx.word_of(top.edge_ends[e].second);
    if (wu == wv) continue;
    s.cross_ids.push_back(top.edge_ids[e]);
    s.ends[top.edge_ids[e]] = {wu, wv};
  }
  std::sort(s.cross_ids.begin(), s.cross_ids.end());
  return s;
}

std::vector<FiniteCut> prefix_of(const std::vector<FiniteCut>& seq, int j) {
  return std::vector<FiniteCut>(seq.begin(), seq.begin() + j);
}

int tower_level(const GraphPresentation& pres,
                const std::vector<FiniteCut>& seq, int level_budget) {
  return std::max(default_quotient_level(pres, seq), level_budget);
}

}  // namespace

TreeTower build_tree_tower(const GraphPresentation& pres,
                           std::vector<FiniteCut> cut_sequence, int depth,
                           int level_budget) {
  if (cut_sequence.empty() || depth < 1 ||
      depth > static_cast<int>(cut_sequence.size()))
    throw EndspaceError("tower depth out of range");
  for (size_t i = 0; i < cut_sequence.size(); ++i) {
    if (cut_sequence[i].zero()) throw EndspaceError("zero cut in the sequence");
    for (size_t j = i + 1; j < cut_sequence.size(); ++j)
      if (cut_sequence[i] == cut_sequence[j])
        throw EndspaceError("duplicate cut in the sequence");
  }

  TreeTower tower;
  tower.cut_sequence = std::move(cut_sequence);
  tower.level_used = tower_level(pres, tower.cut_sequence, level_budget);
  Truncation top = truncate(pres, tower.level_used);

  std::set<std::string> limit;
  std::vector<std::string> prev_tree;
  std::vector<std::string> prev_cross;
  for (int j = 1; j <= depth; ++j) {
    Skeleton sk = skeleton_for(pres, top, tower.level_used,
                               prefix_of(tower.cut_sequence, j));
    MiniUF uf(sk.widx.word_count());
    for (const auto& id : prev_tree) {
      auto it = sk.ends.find(id);
      if (it == sk.ends.end())
        throw std::logic_error("retained tree edge left the skeleton: " + id);
      if (!uf.join(it->second.first, it->second.second))
        throw std::logic_error("retained tree edges close a circle at step " +
                               std::to_string(j));
    }
    std::vector<std::string> tree = prev_tree;
    for (const auto& id : sk.cross_ids) {
      if (std::binary_search(prev_cross.begin(), prev_cross.end(), id))
        continue;  // old crossings may not enter later trees
      auto [wu, wv] = sk.ends[id];
      if (uf.join(wu, wv)) tree.push_back(id);
    }
    int roots = 0;
    for (int w = 0; w < sk.widx.word_count(); ++w)
      if (uf.find(w) == w) ++roots;
    if (roots != 1)
      throw EndspaceError(
          "no consistent spanning extension at step " + std::to_string(j) +
          ": the new words cannot be reached by fresh cross edges");
    std::sort(tree.begin(), tree.end());
    tower.trees.push_back(tree);
    limit.insert(tree.begin(), tree.end());
    prev_tree = tree;
    prev_cross = sk.cross_ids;
  }
  tower.limit_edges.assign(limit.begin(), limit.end());
  return tower;
}

CheckReport check_consistency(const GraphPresentation& pres,
                              const TreeTower& tower) {
  CheckReport report;
  Truncation top = truncate(pres, tower.level_used);
  int depth = static_cast<int>(tower.trees.size());
  std::vector<Skeleton> sk;
  for (int j = 1; j <= depth; ++j)
    sk.push_back(skeleton_for(pres, top, tower.level_used,
                              prefix_of(tower.cut_sequence, j)));

  for (int j = 0; j < depth; ++j) {
    // per-level tree laws
    const auto& tree = tower.trees[j];
    if (static_cast<int>(tree.size()) != sk[j].widx.word_count() - 1)
      report.fail("tree " + std::to_string(j) + " has " +
                  std::to_string(tree.size()) + " edges for " +
                  std::to_string(sk[j].widx.word_count()) + " words");
    MiniUF uf(sk[j].widx.word_count());
    for (const auto& id : tree) {
      auto it = sk[j].ends.find(id);
      if (it == sk[j].ends.end()) {
        report.fail("tree " + std::to_string(j) + " uses non-cross edge " + id);
        continue;
      }
      if (!uf.join(it->second.first, it->second.second))
        report.fail("tree " + std::to_string(j) + " contains a circle through " + id);
    }
    int roots = 0;
    for (int w = 0; w < sk[j].widx.word_count(); ++w)
      if (uf.find(w) == w) ++roots;
    if (roots != 1) report.fail("tree " + std::to_string(j) + " does not span");
  }

  for (int j = 0; j + 1 < depth; ++j) {
    std::vector<std::string> inter;
    std::set_intersection(tower.trees[j + 1].begin(), tower.trees[j + 1].end(),
                          sk[j].cross_ids.begin(), sk[j].cross_ids.end(),
                          std::back_inserter(inter));
    if (inter != tower.trees[j])
      report.fail("consistency identity fails between levels " +
                  std::to_string(j) + " and " + std::to_string(j + 1));
  }
  for (int j = 0; j < depth; ++j) {
    std::vector<std::string> inter;
    std::set_intersection(tower.limit_edges.begin(), tower.limit_edges.end(),
                          sk[j].cross_ids.begin(), sk[j].cross_ids.end(),
                          std::back_inserter(inter));
    if (inter != tower.trees[j])
      report.fail("limit restriction fails at level " + std::to_string(j));
  }
  return report;
}

CheckReport check_coverage(const GraphPresentation& pres,
                           const TreeTower& tower) {
  (void)pres;
  CheckReport report;
  int depth = static_cast<int>(tower.trees.size());
  for (int i = 0; i < depth; ++i) {
    const auto& cut = tower.cut_sequence[i];
    bool crossed = false;
    for (const auto& e : cut.edges)
      if (std::binary_search(tower.limit_edges.begin(), tower.limit_edges.end(),
                             e))
        crossed = true;
    if (!crossed) report.fail("cut " + cut.id() + " has no limit edge");
  }
  return report;
}

CheckReport verify_no_circle(const GraphPresentation& pres,
                             const TreeTower& tower) {
  CheckReport report;
  Truncation top = truncate(pres, tower.level_used);
  int depth = static_cast<int>(tower.trees.size());
  for (int j = 0; j < depth; ++j) {
    Skeleton sk = skeleton_for(pres, top, tower.level_used,
                               prefix_of(tower.cut_sequence, j + 1));
    for (const auto& f : tower.trees[j]) {
      MiniUF uf(sk.widx.word_count());
      for (const auto& id : tower.trees[j]) {
        if (id == f) continue;
        auto it = sk.ends.find(id);
        if (it == sk.ends.end()) continue;
        uf.join(it->second.first, it->second.second);
      }
      auto split = sk.ends.find(f);
      if (split == sk.ends.end()) {
        report.fail("tree edge outside the skeleton: " + f);
        continue;
      }
      int side_a = uf.find(split->second.first);
      // fundamental cut: cross edges joining the two groups
      int crossings = 0;
      for (const auto& [id, ends] : sk.ends) {
        bool ina = uf.find(ends.first) == side_a;
        bool inb = uf.find(ends.second) == side_a;
        if (ina == inb) continue;
        if (std::binary_search(tower.limit_edges.begin(),
                               tower.limit_edges.end(), id))
          ++crossings;
      }
      if (crossings != 1)
        report.fail("fundamental cut of " + f + " at level " +
                    std::to_string(j) + " crossed " +
                    std::to_string(crossings) + " times");
    }
  }
  return report;
}

bool StandardSubspace::contains_vertex(const std::string& vertex_id) const {
  if (extra_vertices.count(vertex_id)) return true;
  auto bracket = vertex_id.find('[');
  std::string name =
      bracket == std::string::npos ? vertex_id : vertex_id.substr(0, bracket);
  return vertex_templates.count(name) > 0;
}

bool StandardSubspace::contains_edge(const std::string& edge_id) const {
  if (extra_edges.count(edge_id)) return true;
  if (edge_id.rfind("E:", 0) != 0) return false;
  auto at = edge_id.rfind('@');
  if (at == std::string::npos) return false;
  std::string text = edge_id.substr(2, at - 2);
  auto hash = text.rfind('#');
  if (hash != std::string::npos) text = text.substr(0, hash);
  return edge_templates.count(text) > 0;
}

CheckReport arc_connected(const GraphPresentation& pres,
                          const StandardSubspace& subspace,
                          const std::vector<FiniteCut>& cuts, int level_budget) {
  CheckReport report;
  int level = level_budget;
  for (const auto& c : cuts)
    level = std::max(level, c.stabilization_level + 4);
  Truncation top = truncate(pres, level);

  // closure membership at the vertex level: selected vertices plus the
  // endpoints of selected edges
  int vc = top.vertex_count(level);
  std::vector<char> in_h(vc, 0);
  for (int v = 0; v < vc; ++v)
    if (subspace.contains_vertex(top.vertex_ids[v])) in_h[v] = 1;
  for (int e = 0; e < top.edge_count(level); ++e)
    if (subspace.contains_edge(top.edge_ids[e]))
      in_h[top.edge_ends[e].first] = in_h[top.edge_ends[e].second] = 1;

  for (const auto& cut : cuts) {
    if (cut.zero()) continue;
    SideOracle oracle(pres, top, cut);
    bool meets_a = false, meets_b = false;
    for (int v = 0; v < vc && !(meets_a && meets_b); ++v) {
      if (!in_h[v]) continue;
      (oracle.side_of(v) == Side::A ? meets_a : meets_b) = true;
    }
    if (!(meets_a && meets_b)) continue;
    bool has_edge = false;
    for (const auto& id : cut.edges)
      if (subspace.contains_edge(id)) has_edge = true;
    if (!has_edge)
      report.fail("subspace meets both sides of " + cut.id() +
                  " without a crossing edge");
  }
  return report;
}

std::vector<std::string> tower_to_dot(const GraphPresentation& pres,
                                      const TreeTower& tower) {
  std::vector<std::string> out;
  Truncation top = truncate(pres, tower.level_used);
  for (size_t j = 0; j < tower.trees.size(); ++j) {
    Skeleton sk = skeleton_for(pres, top, tower.level_used,
                               prefix_of(tower.cut_sequence, static_cast<int>(j) + 1));
    std::ostringstream os;
    os << "graph tower_" << j << " {\n";
    for (int w = 0; w < sk.widx.word_count(); ++w)
      os << "  n" << w << " [label=\"" << sk.widx.patterns[w] << "\"];\n";
    for (const auto& id : sk.cross_ids) {
      auto [wu, wv] = sk.ends[id];
      os << "  n" << wu << " -- n" << wv << " [label=\"" << id << "\"";
      if (std::binary_search(tower.trees[j].begin(), tower.trees[j].end(), id))
        os << ", style=bold";
      os << "];\n";
    }
    os << "}\n";
    out.push_back(os.str());
  }
  return out;
}

}  // namespace endspace
