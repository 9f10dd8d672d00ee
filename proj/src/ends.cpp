#include "endspace/ends.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace endspace {

namespace {

constexpr int kWindow = 4;
constexpr long long kSearchBudget = 500000;

// Simple path ending at a frontier vertex with at least `threshold`
// edges, restricted to vertices where mask is set. Deterministic:
// starts and neighbor expansions ascend by creation index.
std::optional<std::vector<int>> find_ray_prefix(
    const Truncation& top, int level, const std::vector<char>& mask,
    int threshold, const std::vector<int>* forced_prefix = nullptr) {
  long long steps = 0;
  int vc = top.vertex_count(level);

  struct Frame {
    int vertex;
    size_t next = 0;
  };
  std::vector<char> on_path(vc, 0);
  std::vector<Frame> stack;
  std::vector<int> starts;
  if (forced_prefix) {
    for (int v : *forced_prefix) {
      if (v >= vc || !mask[v]) return std::nullopt;
      stack.push_back({v, 0});
      on_path[v] = 1;
    }
    starts.push_back(-1);  // unused
  } else {
    for (int v = 0; v < vc; ++v)
      if (mask[v]) starts.push_back(v);
  }

  size_t keep = forced_prefix ? forced_prefix->size() : 1;
  auto run = [&]() -> std::optional<std::vector<int>> {
    while (!stack.empty()) {
      if (++steps > kSearchBudget) return std::nullopt;
      Frame& f = stack.back();
      if (static_cast<int>(stack.size()) - 1 >= threshold &&
          top.frontier_at(f.vertex, level)) {
        std::vector<int> path;
        for (const Frame& fr : stack) path.push_back(fr.vertex);
        return path;
      }
      bool advanced = false;
      const auto& row = top.adj[f.vertex];
      while (f.next < row.size()) {
        auto [nbr, e] = row[f.next++];
        if (nbr >= vc || !mask[nbr] || on_path[nbr]) continue;
        if (e >= top.edge_count(level)) continue;
        stack.push_back({nbr, 0});
        on_path[nbr] = 1;
        advanced = true;
        break;
      }
      if (!advanced) {
        if (stack.size() <= keep) break;  // never shrink a forced prefix
        on_path[stack.back().vertex] = 0;
        stack.pop_back();
      }
    }
    return std::nullopt;
  };

  if (forced_prefix) return run();
  for (int s : starts) {
    stack.assign(1, {s, 0});
    std::fill(on_path.begin(), on_path.end(), 0);
    on_path[s] = 1;
    auto hit = run();
    if (hit) return hit;
    if (steps > kSearchBudget) break;
  }
  return std::nullopt;
}

// Shortest path from `from` through unused masked vertices to any vertex
// accepted by `goal`; all vertices except `from` must be unused.
std::optional<std::vector<int>> bfs_path(const Truncation& top, int level,
                                         const std::vector<char>& mask,
                                         const std::vector<char>& used, int from,
                                         const std::function<bool(int)>& goal,
                                         const std::function<bool(int)>& through) {
  int vc = top.vertex_count(level);
  std::vector<int> parent(vc, -2);
  std::queue<int> q;
  parent[from] = -1;
  q.push(from);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (auto [nbr, e] : top.adj[v]) {
      if (nbr >= vc || parent[nbr] != -2) continue;
      if (e >= top.edge_count(level)) continue;
      if (!mask[nbr] || used[nbr]) continue;
      parent[nbr] = v;
      if (goal(nbr)) {
        std::vector<int> path;
        for (int x = nbr; x != -1; x = parent[x]) path.push_back(x);
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (through(nbr)) q.push(nbr);
    }
  }
  return std::nullopt;
}

struct DetectionContext {
  Truncation top;
  WordIndex widx;
  EndDetection det;
  int level = 0;
};

// The witness search must reach `threshold` levels past every cut, so
// the budget acts as a floor and the resolution can push deeper.
int detection_level(const GraphPresentation& pres,
                    const std::vector<FiniteCut>& cuts, int level_budget,
                    int threshold) {
  int maxstab = pres.connectivity_level;
  for (const auto& c : cuts) maxstab = std::max(maxstab, c.stabilization_level);
  return std::max(level_budget, maxstab + threshold + 2);
}

std::optional<StarWitness> star_in_mask(const Truncation& top, int level,
                                        const std::vector<char>& mask,
                                        const std::vector<char>& in_u,
                                        int threshold) {
  int vc = top.vertex_count(level);
  for (int center = 0; center < vc; ++center) {
    if (!mask[center]) continue;
    int deg = 0;
    for (auto [nbr, e] : top.adj[center])
      if (nbr < vc && nbr != center && mask[nbr] && e < top.edge_count(level))
        ++deg;
    if (deg < threshold) continue;
    std::vector<char> used(vc, 0);
    StarWitness star;
    star.center = top.vertex_ids[center];
    while (static_cast<int>(star.leaf_paths.size()) < threshold) {
      auto path = bfs_path(
          top, level, mask, used, center,
          [&](int v) { return in_u[v] && v != center; },
          [&](int v) { return !in_u[v]; });
      if (!path) break;
      std::vector<std::string> ids;
      for (int v : *path) {
        ids.push_back(top.vertex_ids[v]);
        if (v != center) used[v] = 1;
      }
      star.leaf_paths.push_back(std::move(ids));
    }
    if (static_cast<int>(star.leaf_paths.size()) >= threshold) return star;
  }
  return std::nullopt;
}

DetectionContext make_detection(const GraphPresentation& pres,
                                std::vector<FiniteCut> resolution,
                                int level_budget, int threshold) {
  DetectionContext ctx;
  std::vector<FiniteCut> cuts = canonical_cut_family(std::move(resolution));
  ctx.level = detection_level(pres, cuts, level_budget, threshold);
  ctx.top = truncate(pres, ctx.level);
  ctx.widx = build_word_index(pres, ctx.top, ctx.level, cuts);
  ctx.det.level_used = ctx.level;

  int vc = ctx.top.vertex_count(ctx.level);
  for (int w = 0; w < ctx.widx.word_count(); ++w) {
    std::vector<char> mask(vc, 0);
    bool growing = false;
    for (int v = 0; v < vc; ++v) {
      if (ctx.widx.word_of(v) != w) continue;
      mask[v] = 1;
      if (ctx.top.frontier_at(v, ctx.level)) growing = true;
    }
    if (!growing) continue;

    auto prefix = find_ray_prefix(ctx.top, ctx.level, mask, threshold);
    if (prefix) {
      EndDescriptor end;
      end.resolution = ctx.widx.cuts;
      end.sides = ctx.widx.patterns[w];
      for (int v : *prefix) end.ray_prefix.push_back(ctx.top.vertex_ids[v]);
      int tail = prefix->back();
      for (size_t i = 0; i < ctx.widx.cuts.size(); ++i) {
        const SideOracle& oracle = ctx.widx.oracles[i];
        int rep = oracle.component_rep(tail);
        end.home_components.push_back(
            {ctx.top.vertex_ids[rep], oracle.component_growing(rep)});
      }
      ctx.det.ends.push_back(std::move(end));
      continue;
    }
    // no ray found: a star verdict settles the part, otherwise the
    // search ran out of budget
    if (!star_in_mask(ctx.top, ctx.level, mask, mask, threshold))
      ctx.det.incomplete = true;
  }
  std::sort(ctx.det.ends.begin(), ctx.det.ends.end(),
            [](const EndDescriptor& a, const EndDescriptor& b) {
              return a.sides < b.sides;
            });
  return ctx;
}

int resolution_position(const std::vector<FiniteCut>& resolution,
                        const FiniteCut& cut) {
  auto it = std::lower_bound(resolution.begin(), resolution.end(), cut, cut_less);
  if (it == resolution.end() || !(*it == cut)) return -1;
  return static_cast<int>(it - resolution.begin());
}

}  // namespace

bool operator==(const EndDescriptor& a, const EndDescriptor& b) {
  if (a.sides != b.sides || a.resolution.size() != b.resolution.size())
    return false;
  for (size_t i = 0; i < a.resolution.size(); ++i)
    if (!(a.resolution[i] == b.resolution[i])) return false;
  return true;
}

EndDetection detect_ends(const GraphPresentation& pres,
                         std::vector<FiniteCut> resolution, int level_budget,
                         int threshold) {
  return make_detection(pres, std::move(resolution), level_budget, threshold).det;
}

WitnessResult find_star_or_comb(const GraphPresentation& pres,
                                const std::function<bool(const std::string&)>& in_u,
                                int level_budget, int threshold) {
  Truncation top = truncate(pres, level_budget);
  int level = level_budget;
  int vc = top.vertex_count(level);
  std::vector<char> u_mask(vc, 0), all_mask(vc, 1);
  int u_count = 0;
  for (int v = 0; v < vc; ++v)
    if (in_u(top.vertex_ids[v])) {
      u_mask[v] = 1;
      ++u_count;
    }
  if (u_count < 2 * threshold)
    throw EndspaceError("vertex set too small within the level budget");

  WitnessResult out;

  // spine inside U: every spine vertex is a trivial tooth
  if (auto spine = find_ray_prefix(top, level, u_mask, threshold)) {
    out.kind = WitnessResult::Comb;
    for (int v : *spine) {
      out.comb.spine.push_back(top.vertex_ids[v]);
      out.comb.teeth.push_back({top.vertex_ids[v]});
    }
    return out;
  }

  // general spine plus greedily collected disjoint teeth into U
  if (auto spine = find_ray_prefix(top, level, all_mask, threshold)) {
    std::vector<char> on_spine(vc, 0), used(vc, 0), attached(vc, 0);
    for (int v : *spine) on_spine[v] = used[v] = 1;
    CombWitness comb;
    for (int v : *spine) comb.spine.push_back(top.vertex_ids[v]);
    for (int v : *spine)
      if (u_mask[v] && !attached[v]) {
        attached[v] = 1;
        comb.teeth.push_back({top.vertex_ids[v]});
      }
    for (int u = 0; u < vc &&
                    static_cast<int>(comb.teeth.size()) < threshold;
         ++u) {
      if (!u_mask[u] || used[u]) continue;
      // path from u through fresh vertices to an unattached spine vertex
      std::vector<char> usable(vc, 0);
      for (int v = 0; v < vc; ++v)
        usable[v] = (!used[v] && !on_spine[v]) || (on_spine[v] && !attached[v]);
      auto path = bfs_path(
          top, level, usable, used, u,
          [&](int v) { return on_spine[v] && !attached[v]; },
          [&](int v) { return !on_spine[v]; });
      if (!path) continue;
      std::reverse(path->begin(), path->end());  // spine vertex first
      attached[path->front()] = 1;
      std::vector<std::string> ids;
      for (int v : *path) {
        ids.push_back(top.vertex_ids[v]);
        if (!on_spine[v]) used[v] = 1;
      }
      comb.teeth.push_back(std::move(ids));
    }
    if (static_cast<int>(comb.teeth.size()) >= threshold) {
      out.kind = WitnessResult::Comb;
      out.comb = std::move(comb);
      return out;
    }
  }

  if (auto star = star_in_mask(top, level, all_mask, u_mask, threshold)) {
    out.kind = WitnessResult::Star;
    out.star = std::move(*star);
    return out;
  }
  return out;  // Undetermined
}

std::optional<Side> side_of_end(const GraphPresentation& pres,
                                const FiniteCut& cut, const EndDescriptor& end,
                                int level_budget) {
  if (cut.zero()) return Side::A;
  int pos = resolution_position(end.resolution, cut);
  if (pos >= 0) return end.sides[pos] == 'A' ? Side::A : Side::B;

  std::vector<FiniteCut> joint = end.resolution;
  joint.push_back(cut);
  joint = canonical_cut_family(std::move(joint));
  int maxstab = pres.connectivity_level;
  for (const auto& c : joint) maxstab = std::max(maxstab, c.stabilization_level);
  int level = std::max(level_budget, maxstab + kWindow);
  Truncation top = truncate(pres, level);
  WordIndex widx = build_word_index(pres, top, level, joint);
  int cut_pos = resolution_position(widx.cuts, cut);

  // subpatterns of the end's word that keep growing
  std::vector<std::string> growing_patterns;
  int vc = top.vertex_count(level);
  std::set<int> growing_words;
  for (int v = 0; v < vc; ++v)
    if (top.frontier_at(v, level)) growing_words.insert(widx.word_of(v));
  for (int w : growing_words) {
    const std::string& pat = widx.patterns[w];
    bool matches = true;
    for (size_t i = 0; i < end.resolution.size(); ++i) {
      int p = resolution_position(widx.cuts, end.resolution[i]);
      if (p < 0 || pat[p] != end.sides[i]) matches = false;
    }
    if (matches) growing_patterns.push_back(pat);
  }
  if (growing_patterns.size() == 1)
    return growing_patterns.front()[cut_pos] == 'A' ? Side::A : Side::B;
  if (growing_patterns.empty()) return std::nullopt;

  // several growing subparts: follow the stored witness ray
  std::vector<char> mask(vc, 0);
  for (int v = 0; v < vc; ++v) {
    const std::string& pat = widx.patterns[widx.word_of(v)];
    bool in_part = true;
    for (size_t i = 0; i < end.resolution.size(); ++i) {
      int p = resolution_position(widx.cuts, end.resolution[i]);
      if (p < 0 || pat[p] != end.sides[i]) in_part = false;
    }
    mask[v] = in_part;
  }
  std::vector<int> forced;
  for (const auto& id : end.ray_prefix) {
    auto it = top.vertex_index.find(id);
    if (it == top.vertex_index.end()) return std::nullopt;
    forced.push_back(it->second);
  }
  auto extended = find_ray_prefix(top, level, mask,
                                  static_cast<int>(forced.size()) + 1, &forced);
  if (!extended) extended = find_ray_prefix(top, level, mask, 1);
  if (!extended) return std::nullopt;
  return widx.oracles[cut_pos].side_of(extended->back());
}

std::optional<bool> separates(const GraphPresentation& pres,
                              const FiniteCut& cut, const Point& p,
                              const Point& q, int level_budget) {
  auto side_of_point = [&](const Point& pt) -> std::optional<Side> {
    if (const auto* id = std::get_if<std::string>(&pt))
      return side_of_vertex(pres, cut, *id).side;
    return side_of_end(pres, cut, std::get<EndDescriptor>(pt), level_budget);
  };
  auto sp = side_of_point(p);
  auto sq = side_of_point(q);
  if (!sp || !sq) return std::nullopt;
  return *sp != *sq;
}

ClassesResult itop_classes(const GraphPresentation& pres,
                           std::vector<FiniteCut> resolution, int level_budget,
                           int threshold) {
  DetectionContext ctx =
      make_detection(pres, std::move(resolution), level_budget, threshold);
  ClassesResult out;
  out.explored_level = ctx.level;

  out.classes.resize(ctx.widx.word_count());
  for (int w = 0; w < ctx.widx.word_count(); ++w) {
    out.classes[w].pattern = ctx.widx.patterns[w];
    out.classes[w].tentative = ctx.det.incomplete;
  }
  int vc = ctx.top.vertex_count(ctx.level);
  for (int v = 0; v < vc; ++v)
    out.classes[ctx.widx.word_of(v)].vertices.push_back(ctx.top.vertex_ids[v]);
  for (size_t i = 0; i < ctx.det.ends.size(); ++i) {
    int w = ctx.widx.word_of_pattern(ctx.det.ends[i].sides);
    if (w < 0)
      throw std::logic_error("end side pattern is not a realized word");
    out.classes[w].end_indices.push_back(static_cast<int>(i));
  }
  out.detection = std::move(ctx.det);
  return out;
}

bool dominates(const GraphPresentation& pres, const std::string& vertex_id,
               const EndDescriptor& end) {
  for (size_t i = 0; i < end.resolution.size(); ++i) {
    Side s = side_of_vertex(pres, end.resolution[i], vertex_id).side;
    if (side_char(s) != end.sides[i]) return false;
  }
  return true;
}

IntersectionResult intersect_basic_closed(const GraphPresentation& pres,
                                          const std::vector<ClosedMember>& members,
                                          int level_budget) {
  IntersectionResult out;
  std::vector<FiniteCut> cuts;
  for (const auto& m : members) cuts.push_back(m.cut);
  DetectionContext ctx = make_detection(pres, cuts, level_budget, 8);

  // positions of each member's cut in the canonical family
  std::vector<int> pos;
  for (const auto& m : members) {
    int p = resolution_position(ctx.widx.cuts, m.cut);
    if (p < 0) throw std::logic_error("member cut lost in canonicalization");
    pos.push_back(p);
  }
  // validate that the chosen components are stable representatives
  for (size_t i = 0; i < members.size(); ++i) {
    int idx = ctx.top.require_vertex(members[i].component.representative);
    if (ctx.top.vertex_ids[ctx.widx.oracles[pos[i]].component_rep(idx)] !=
        members[i].component.representative)
      throw EndspaceError("member does not name a component representative: " +
                          members[i].component.representative);
  }

  auto end_in = [&](const EndDescriptor& end, size_t i) {
    int p = resolution_position(end.resolution, members[i].cut);
    if (p < 0) return false;
    return end.home_components[p].representative ==
           members[i].component.representative;
  };
  auto vertex_in = [&](int v, size_t i) {
    int rep = ctx.widx.oracles[pos[i]].component_rep(v);
    return ctx.top.vertex_ids[rep] == members[i].component.representative;
  };

  // witness: prefer ends (the limit points), then the least vertex
  for (size_t e = 0; e < ctx.det.ends.size(); ++e) {
    bool all = true;
    for (size_t i = 0; i < members.size() && all; ++i)
      all = end_in(ctx.det.ends[e], i);
    if (all) {
      out.status = IntersectionResult::Witness;
      out.witness = Point(ctx.det.ends[e]);
      return out;
    }
  }
  int vc = ctx.top.vertex_count(ctx.level);
  for (int v = 0; v < vc; ++v) {
    bool all = true;
    for (size_t i = 0; i < members.size() && all; ++i) all = vertex_in(v, i);
    if (all) {
      out.status = IntersectionResult::Witness;
      out.witness = Point(ctx.top.vertex_ids[v]);
      return out;
    }
  }
  if (ctx.det.incomplete) return out;  // Undetermined

  // empty: certify with the smallest empty subfamily, pairs first
  auto subfamily_empty = [&](const std::vector<int>& sel) {
    for (const auto& end : ctx.det.ends) {
      bool all = true;
      for (int i : sel)
        if (!end_in(end, i)) {
          all = false;
          break;
        }
      if (all) return false;
    }
    for (int v = 0; v < vc; ++v) {
      bool all = true;
      for (int i : sel)
        if (!vertex_in(v, i)) {
          all = false;
          break;
        }
      if (all) return false;
    }
    return true;
  };
  int n = static_cast<int>(members.size());
  for (int size = 2; size <= n; ++size) {
    std::vector<int> sel(size);
    std::function<bool(int, int)> pick = [&](int from, int depth) {
      if (depth == size) return subfamily_empty(sel);
      for (int i = from; i < n; ++i) {
        sel[depth] = i;
        if (pick(i + 1, depth + 1)) return true;
      }
      return false;
    };
    if (pick(0, 0)) {
      out.status = IntersectionResult::Empty;
      out.certificate = sel;
      return out;
    }
  }
  out.status = IntersectionResult::Empty;  // whole family (size 1 possible)
  for (int i = 0; i < n; ++i) out.certificate.push_back(i);
  return out;
}

std::string word_of_end(const GraphPresentation& pres, const QuotientGraph& q,
                        const EndDescriptor& end) {
  std::string pat(q.cuts.size(), 'A');
  for (size_t i = 0; i < q.cuts.size(); ++i) {
    auto side = side_of_end(pres, q.cuts[i], end, q.level_used);
    if (!side) throw EndspaceError("undetermined end side for cut " + q.cuts[i].id());
    pat[i] = side_char(*side);
  }
  if (q.index.word_of_pattern(pat) < 0)
    throw std::logic_error("end maps to an unrealized word: " + pat);
  return pat;
}

}  // namespace endspace
