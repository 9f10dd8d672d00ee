#include "endspace/cutspace.hpp"

#include <algorithm>
#include <functional>
#include <cassert>
#include <map>
#include <numeric>
#include <queue>
#include <set>

namespace endspace {

namespace {

constexpr int kWindow = 4;     // consecutive stable levels required
constexpr int kEchoAhead = 8;  // extra spot-check distance

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
  void join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent[b] = a;  // roots stay at the least index
  }
};

// Least-index representative per vertex after removing an edge set.
std::vector<int> rep_array(const Truncation& t, int level,
                           const std::vector<int>& removed_sorted) {
  int vc = t.vertex_count(level);
  int ec = t.edge_count(level);
  MiniUF uf(vc);
  for (int e = 0; e < ec; ++e) {
    if (std::binary_search(removed_sorted.begin(), removed_sorted.end(), e))
      continue;
    uf.join(t.edge_ends[e].first, t.edge_ends[e].second);
  }
  std::vector<int> rep(vc);
  for (int v = 0; v < vc; ++v) rep[v] = uf.find(v);
  return rep;
}

}  // namespace

std::string FiniteCut::id() const {
  if (edges.empty()) return "0";
  std::string s;
  for (size_t i = 0; i < edges.size(); ++i) {
    if (i) s += '+';
    s += edges[i];
  }
  return s;
}

bool operator==(const FiniteCut& a, const FiniteCut& b) {
  return a.edges == b.edges;
}

bool cut_less(const FiniteCut& a, const FiniteCut& b) {
  return a.edges < b.edges;
}

bool operator==(const ComponentId& a, const ComponentId& b) {
  return a.representative == b.representative && a.live == b.live;
}

Components analyze_components(const Truncation& t, int level,
                              const std::vector<int>& removed_edges_sorted) {
  Components out;
  out.level = level;
  std::vector<int> rep = rep_array(t, level, removed_edges_sorted);
  int vc = t.vertex_count(level);
  std::vector<int> reps;
  for (int v = 0; v < vc; ++v)
    if (rep[v] == v) reps.push_back(v);
  out.rep = reps;
  out.count = static_cast<int>(reps.size());
  std::vector<int> ord(vc, -1);
  for (int i = 0; i < out.count; ++i) ord[reps[i]] = i;
  out.comp.resize(vc);
  out.growing.assign(out.count, 0);
  for (int v = 0; v < vc; ++v) {
    out.comp[v] = ord[rep[v]];
    if (t.frontier_at(v, level)) out.growing[out.comp[v]] = 1;
  }
  return out;
}

std::optional<StableStructure> stabilize_removal(const GraphPresentation& pres,
                                                 const Truncation& top,
                                                 const std::vector<int>& edges,
                                                 int level_budget) {
  if (level_budget > top.level)
    throw EndspaceError("truncation too shallow for the requested budget");
  std::vector<int> removed = edges;
  std::sort(removed.begin(), removed.end());
  removed.erase(std::unique(removed.begin(), removed.end()), removed.end());

  int base = pres.connectivity_level;
  for (int e : removed) base = std::max(base, top.edge_level[e]);

  std::map<int, std::vector<int>> reps_at;
  auto reps = [&](int level) -> const std::vector<int>& {
    auto it = reps_at.find(level);
    if (it == reps_at.end())
      it = reps_at.emplace(level, rep_array(top, level, removed)).first;
    return it->second;
  };

  int last_start = std::min(level_budget - (kWindow - 1), base + kWindow);
  for (int start = base; start <= last_start; ++start) {
    int vc0 = top.vertex_count(start);
    bool ok = true;
    // partitions restricted to old vertices must match through the window
    std::vector<int> window_levels;
    for (int w = 0; w < kWindow; ++w) window_levels.push_back(start + w);
    int echo = std::min(level_budget, start + kEchoAhead);
    if (echo > window_levels.back()) window_levels.push_back(echo);

    const std::vector<int>& base_rep = reps(start);
    for (int lvl : window_levels) {
      const std::vector<int>& r = reps(lvl);
      for (int v = 0; v < vc0 && ok; ++v)
        if (r[v] != base_rep[v]) ok = false;
      if (!ok) break;
      // every component must be anchored among the old vertices
      for (int v = vc0; v < top.vertex_count(lvl) && ok; ++v)
        if (r[v] >= vc0) ok = false;
      if (!ok) break;
    }
    if (!ok) continue;

    // growth pattern: the same components gain vertices at every step
    std::set<int> growth;
    bool first = true;
    for (int w = 0; w + 1 < kWindow && ok; ++w) {
      int lo = top.vertex_count(start + w);
      int hi = top.vertex_count(start + w + 1);
      const std::vector<int>& r = reps(start + w + 1);
      std::set<int> g;
      for (int v = lo; v < hi; ++v) g.insert(r[v]);
      if (first) {
        growth = g;
        first = false;
      } else if (g != growth) {
        ok = false;
      }
    }
    if (!ok) continue;

    StableStructure s;
    s.stabilization_level = start;
    s.stable = analyze_components(top, start + kWindow - 1, removed);
    return s;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// cut certification
// ---------------------------------------------------------------------------

namespace {

// 2-color the component multigraph; side A is the root's component.
// Fails when some candidate edge is a loop or an odd cycle appears.
std::optional<std::vector<Side>> color_components(const Truncation& top,
                                                  const Components& comps,
                                                  const std::vector<int>& cut_edges,
                                                  int root_vertex) {
  int n = comps.count;
  std::vector<std::vector<int>> h(n);
  for (int e : cut_edges) {
    int cu = comps.comp[top.edge_ends[e].first];
    int cv = comps.comp[top.edge_ends[e].second];
    if (cu == cv) return std::nullopt;  // loop: not exactly a crossing set
    h[cu].push_back(cv);
    h[cv].push_back(cu);
  }
  std::vector<int> color(n, -1);
  std::queue<int> q;
  color[comps.comp[root_vertex]] = 0;
  q.push(comps.comp[root_vertex]);
  int seen = 1;
  while (!q.empty()) {
    int c = q.front();
    q.pop();
    for (int d : h[c]) {
      if (color[d] == -1) {
        color[d] = 1 - color[c];
        ++seen;
        q.push(d);
      } else if (color[d] == color[c]) {
        return std::nullopt;  // odd cycle
      }
    }
  }
  if (seen != n) return std::nullopt;  // ambient graph not connected here
  std::vector<Side> side(n);
  for (int c = 0; c < n; ++c) side[c] = color[c] == 0 ? Side::A : Side::B;
  return side;
}

}  // namespace

std::optional<FiniteCut> certify_cut_on(const GraphPresentation& pres,
                                        const Truncation& top,
                                        const std::vector<int>& edge_idx,
                                        int level_budget) {
  if (edge_idx.empty()) return std::nullopt;
  for (int e : edge_idx)
    if (top.edge_ends[e].first == top.edge_ends[e].second)
      return std::nullopt;  // loops never cross
  auto stable = stabilize_removal(pres, top, edge_idx, level_budget);
  if (!stable) return std::nullopt;
  int root = top.require_vertex(pres.root());
  auto colors =
      color_components(top, stable->stable, edge_idx, root);
  if (!colors) return std::nullopt;
  FiniteCut cut;
  for (int e : edge_idx) cut.edges.push_back(top.edge_ids[e]);
  std::sort(cut.edges.begin(), cut.edges.end());
  cut.side_a_seed = pres.root();
  cut.stabilization_level = stable->stabilization_level;
  return cut;
}

namespace {

void enumerate_subsets(const std::vector<int>& pool, int max_size,
                       std::vector<int>& current, size_t from,
                       const std::function<void(const std::vector<int>&)>& sink) {
  if (!current.empty()) sink(current);
  if (static_cast<int>(current.size()) == max_size) return;
  for (size_t i = from; i < pool.size(); ++i) {
    current.push_back(pool[i]);
    enumerate_subsets(pool, max_size, current, i + 1, sink);
    current.pop_back();
  }
}

}  // namespace

CutEnumeration enumerate_cuts(const GraphPresentation& pres, int level_budget,
                              int size_budget, int max_candidate_edges) {
  if (level_budget < pres.connectivity_level + kWindow)
    throw EndspaceError("level budget below connectivity level plus window");
  Truncation top = truncate(pres, level_budget);

  auto nonloop_count = [&](int lvl) {
    int c = 0;
    for (int e = 0; e < top.edge_count(lvl); ++e)
      if (top.edge_ends[e].first != top.edge_ends[e].second) ++c;
    return c;
  };
  int cand_level = -1;
  for (int l = level_budget - kWindow; l >= 0; --l) {
    if (nonloop_count(l) <= max_candidate_edges) {
      cand_level = l;
      break;
    }
  }
  if (cand_level < 0)
    throw EndspaceError("candidate pool exceeds the edge budget at level 0");

  std::vector<int> pool;
  for (int e = 0; e < top.edge_count(cand_level); ++e)
    if (top.edge_ends[e].first != top.edge_ends[e].second) pool.push_back(e);

  CutEnumeration out;
  out.candidate_level = cand_level;
  std::vector<int> current;
  enumerate_subsets(pool, size_budget, current, 0,
                    [&](const std::vector<int>& subset) {
                      auto cut = certify_cut_on(pres, top, subset, level_budget);
                      if (cut) out.cuts.push_back(std::move(*cut));
                    });
  std::sort(out.cuts.begin(), out.cuts.end(), cut_less);
  out.budget_warning = out.cuts.empty();
  return out;
}

std::optional<FiniteCut> certify_cut(const GraphPresentation& pres,
                                     std::vector<std::string> edge_ids,
                                     int level_budget) {
  Truncation top = truncate(pres, level_budget);
  std::sort(edge_ids.begin(), edge_ids.end());
  edge_ids.erase(std::unique(edge_ids.begin(), edge_ids.end()), edge_ids.end());
  std::vector<int> idx;
  for (const auto& id : edge_ids) idx.push_back(top.require_edge(id));
  return certify_cut_on(pres, top, idx, level_budget);
}

FiniteCut zero_cut(const GraphPresentation& pres) {
  FiniteCut c;
  c.side_a_seed = pres.root();
  c.stabilization_level = pres.connectivity_level;
  return c;
}

FiniteCut cut_sum(const GraphPresentation& pres, const FiniteCut& c1,
                  const FiniteCut& c2) {
  std::vector<std::string> sym;
  std::set_symmetric_difference(c1.edges.begin(), c1.edges.end(),
                                c2.edges.begin(), c2.edges.end(),
                                std::back_inserter(sym));
  if (sym.empty()) return zero_cut(pres);
  int budget = std::max({pres.connectivity_level, c1.stabilization_level,
                         c2.stabilization_level}) +
               kEchoAhead;
  auto cut = certify_cut(pres, sym, budget);
  if (!cut)
    throw std::logic_error("cut_sum: symmetric difference failed revalidation");
  return *cut;
}

SideAssignment side_of_vertex(const GraphPresentation& pres, const FiniteCut& cut,
                              const std::string& vertex_id) {
  int vlevel = vertex_level_of_id(pres, vertex_id);
  if (cut.zero()) return {cut.id(), Side::A};
  int budget = std::max(vlevel, cut.stabilization_level + kWindow - 1);
  Truncation top = truncate(pres, budget);
  SideOracle oracle(pres, top, cut);
  return {cut.id(), oracle.side_of(top.require_vertex(vertex_id))};
}

// ---------------------------------------------------------------------------
// SideOracle
// ---------------------------------------------------------------------------

SideOracle::SideOracle(const GraphPresentation& pres, const Truncation& top,
                       const FiniteCut& cut)
    : top_(&top) {
  if (top.level < cut.stabilization_level)
    throw std::logic_error("SideOracle: truncation below stabilization level");
  for (const auto& id : cut.edges) cut_edge_idx_.push_back(top.require_edge(id));
  std::sort(cut_edge_idx_.begin(), cut_edge_idx_.end());
  coloring_level_ =
      std::min(top.level, cut.stabilization_level + kWindow - 1);

  Components comps = analyze_components(top, coloring_level_, cut_edge_idx_);
  int root = top.require_vertex(pres.root());
  std::optional<std::vector<Side>> colors;
  if (cut.zero()) {
    colors = std::vector<Side>(comps.count, Side::A);
  } else {
    colors = color_components(top, comps, cut_edge_idx_, root);
    if (!colors)
      throw std::logic_error("SideOracle: cut is not two-colorable (uncertified?)");
  }
  int vc = top.vertex_count(coloring_level_);
  side_.resize(vc);
  comp_rep_.resize(vc);
  comp_ord_.resize(vc);
  for (int v = 0; v < vc; ++v) {
    int c = comps.comp[v];
    side_[v] = (*colors)[c];
    comp_rep_[v] = comps.rep[c];
    comp_ord_[v] = c;
  }
  growing_.assign(comps.growing.begin(), comps.growing.end());
}

int SideOracle::resolve(int vertex_idx) const {
  int vc = top_->vertex_count(coloring_level_);
  if (vertex_idx < vc) return vertex_idx;
  // walk toward lower indices avoiding the cut edges; any colored vertex
  // reached this way shares the query vertex's side and component
  std::priority_queue<int, std::vector<int>, std::greater<int>> heap;
  std::set<int> seen;
  heap.push(vertex_idx);
  seen.insert(vertex_idx);
  while (!heap.empty()) {
    int v = heap.top();
    heap.pop();
    if (v < vc) return v;
    for (auto [nbr, e] : top_->adj[v]) {
      if (std::binary_search(cut_edge_idx_.begin(), cut_edge_idx_.end(), e))
        continue;
      if (seen.insert(nbr).second) heap.push(nbr);
    }
  }
  throw std::logic_error("SideOracle: vertex unreachable from the stable core");
}

Side SideOracle::side_of(int vertex_idx) const {
  return side_[resolve(vertex_idx)];
}

int SideOracle::component_rep(int vertex_idx) const {
  return comp_rep_[resolve(vertex_idx)];
}

bool SideOracle::component_growing(int rep_vertex_idx) const {
  return growing_[comp_ord_[rep_vertex_idx]] != 0;
}

// ---------------------------------------------------------------------------
// WordIndex
// ---------------------------------------------------------------------------

std::vector<FiniteCut> canonical_cut_family(std::vector<FiniteCut> cuts) {
  std::sort(cuts.begin(), cuts.end(), cut_less);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

int WordIndex::word_of_pattern(const std::string& pattern) const {
  auto it = std::lower_bound(patterns.begin(), patterns.end(), pattern);
  if (it == patterns.end() || *it != pattern) return -1;
  return static_cast<int>(it - patterns.begin());
}

WordIndex build_word_index(const GraphPresentation& pres, const Truncation& top,
                           int level, std::vector<FiniteCut> cuts) {
  WordIndex idx;
  idx.level = level;
  idx.cuts = canonical_cut_family(std::move(cuts));
  for (const auto& c : idx.cuts) idx.oracles.emplace_back(pres, top, c);

  // finest partition: components after removing every cut edge at once
  std::vector<int> all_edges;
  for (const auto& c : idx.cuts)
    for (const auto& id : c.edges) all_edges.push_back(top.require_edge(id));
  std::sort(all_edges.begin(), all_edges.end());
  all_edges.erase(std::unique(all_edges.begin(), all_edges.end()),
                  all_edges.end());
  std::vector<int> fine = rep_array(top, level, all_edges);

  int vc = top.vertex_count(level);
  std::map<int, std::string> pattern_of_rep;
  for (int v = 0; v < vc; ++v) {
    int r = fine[v];
    if (pattern_of_rep.count(r)) continue;
    std::string pat(idx.cuts.size(), 'A');
    for (size_t i = 0; i < idx.cuts.size(); ++i)
      pat[i] = side_char(idx.oracles[i].side_of(r));
    pattern_of_rep[r] = pat;
  }
  std::set<std::string> distinct;
  for (const auto& [rep, pat] : pattern_of_rep) distinct.insert(pat);
  idx.patterns.assign(distinct.begin(), distinct.end());
  idx.word_of_vertex.resize(vc);
  idx.word_rep.assign(idx.patterns.size(), -1);
  for (int v = 0; v < vc; ++v) {
    int w = idx.word_of_pattern(pattern_of_rep[fine[v]]);
    idx.word_of_vertex[v] = w;
    if (idx.word_rep[w] < 0) idx.word_rep[w] = v;
  }
  return idx;
}

}  // namespace endspace
