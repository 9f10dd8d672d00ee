#include "endspace/quotient.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "endspace/ends.hpp"

namespace endspace {

namespace {
constexpr int kWindow = 4;
}

int default_quotient_level(const GraphPresentation& pres,
                           const std::vector<FiniteCut>& cuts) {
  int stab = pres.connectivity_level;
  for (const auto& c : cuts) stab = std::max(stab, c.stabilization_level);
  return stab + kWindow;
}

QuotientGraph build_quotient(const GraphPresentation& pres,
                             std::vector<FiniteCut> cuts, int level) {
  return build_quotient(pres, std::move(cuts), level, nullptr);
}

QuotientGraph build_quotient(const GraphPresentation& pres,
                             std::vector<FiniteCut> cuts, int level,
                             std::shared_ptr<const Truncation> top) {
  QuotientGraph q;
  q.cuts = canonical_cut_family(std::move(cuts));
  int min_level = default_quotient_level(pres, q.cuts);
  if (level < min_level)
    throw EndspaceError("quotient level " + std::to_string(level) +
                        " below required " + std::to_string(min_level));
  if (top && top->level < level)
    throw EndspaceError("supplied truncation is too shallow");
  q.level_used = level;
  q.top = top ? std::move(top)
              : std::make_shared<Truncation>(truncate(pres, level));
  q.index = build_word_index(pres, *q.top, level, q.cuts);

  const Truncation& t = *q.top;
  std::set<std::string> cut_edge_ids;
  for (const auto& c : q.cuts)
    cut_edge_ids.insert(c.edges.begin(), c.edges.end());

  // loop counts per word across the stabilization window
  int words = q.index.word_count();
  std::vector<std::vector<int>> counts(kWindow, std::vector<int>(words, 0));
  for (int e = 0; e < t.edge_count(level); ++e) {
    int wu = q.index.word_of(t.edge_ends[e].first);
    int wv = q.index.word_of(t.edge_ends[e].second);
    if (wu != wv) {
      if (!cut_edge_ids.count(t.edge_ids[e]))
        throw std::logic_error("cross edge outside the cut family: " +
                               t.edge_ids[e]);
      q.cross_edges.push_back({t.edge_ids[e], std::min(wu, wv), std::max(wu, wv)});
      continue;
    }
    for (int w = 0; w < kWindow; ++w)
      if (t.edge_level[e] <= level - (kWindow - 1) + w) ++counts[w][wu];
  }
  std::sort(q.cross_edges.begin(), q.cross_edges.end(),
            [](const CrossEdge& a, const CrossEdge& b) { return a.edge < b.edge; });

  q.loops.resize(words);
  for (int w = 0; w < words; ++w) {
    q.loops[w].count_at_level = counts[kWindow - 1][w];
    bool strict = true;
    for (int i = 0; i + 1 < kWindow; ++i)
      if (counts[i][w] >= counts[i + 1][w]) strict = false;
    q.loops[w].unbounded = strict;
  }
  q.word_fiber_rep.resize(words);
  for (int w = 0; w < words; ++w)
    q.word_fiber_rep[w] = t.vertex_ids[q.index.word_rep[w]];
  return q;
}

std::string quotient_word_of_vertex(const GraphPresentation& pres,
                                    const QuotientGraph& q,
                                    const std::string& vertex_id) {
  auto it = q.top->vertex_index.find(vertex_id);
  if (it != q.top->vertex_index.end())
    return q.words()[q.index.word_of(it->second)];
  // vertex beyond the built truncation: fall back to one-shot side queries
  std::string pat(q.cuts.size(), 'A');
  for (size_t i = 0; i < q.cuts.size(); ++i)
    pat[i] = side_char(side_of_vertex(pres, q.cuts[i], vertex_id).side);
  if (q.index.word_of_pattern(pat) < 0)
    throw std::logic_error("vertex maps to an unrealized word: " + vertex_id);
  return pat;
}

std::string quotient_image_of_edge(const QuotientGraph& q,
                                   const std::string& edge_id) {
  q.top->require_edge(edge_id);
  return edge_id;
}

std::string project_word(const QuotientGraph& sup, const QuotientGraph& sub,
                         const std::string& word) {
  if (sup.index.word_of_pattern(word) < 0)
    throw EndspaceError("word not realized in the finer quotient: " + word);
  std::string out(sub.cuts.size(), 'A');
  for (size_t i = 0; i < sub.cuts.size(); ++i) {
    auto it = std::lower_bound(sup.cuts.begin(), sup.cuts.end(), sub.cuts[i],
                               cut_less);
    if (it == sup.cuts.end() || !(*it == sub.cuts[i]))
      throw EndspaceError("cut families are not nested");
    out[i] = word[static_cast<size_t>(it - sup.cuts.begin())];
  }
  if (sub.index.word_of_pattern(out) < 0)
    throw std::logic_error("projected word not realized: " + out);
  return out;
}

namespace {

bool family_subset(const std::vector<FiniteCut>& sub,
                   const std::vector<FiniteCut>& sup) {
  for (const auto& c : sub) {
    auto it = std::lower_bound(sup.begin(), sup.end(), c, cut_less);
    if (it == sup.end() || !(*it == c)) return false;
  }
  return true;
}

}  // namespace

CheckReport verify_inverse_system(const GraphPresentation& pres,
                                  std::vector<FiniteCut> m1,
                                  std::vector<FiniteCut> m2,
                                  std::vector<FiniteCut> m3, int level,
                                  std::span<const EndDescriptor> ends) {
  CheckReport report;
  m1 = canonical_cut_family(std::move(m1));
  m2 = canonical_cut_family(std::move(m2));
  m3 = canonical_cut_family(std::move(m3));
  if (!family_subset(m1, m2) || !family_subset(m2, m3))
    throw EndspaceError("cut chain is not nested");

  QuotientGraph q1 = build_quotient(pres, m1, level);
  QuotientGraph q2 = build_quotient(pres, m2, level);
  QuotientGraph q3 = build_quotient(pres, m3, level);

  for (const auto& w : q3.words()) {
    std::string direct = project_word(q3, q1, w);
    std::string via = project_word(q2, q1, project_word(q3, q2, w));
    if (direct != via)
      report.fail("triangle law fails on word " + w + ": " + direct +
                  " != " + via);
    if (project_word(q3, q3, w) != w)
      report.fail("identity bonding map moved word " + w);
  }

  const Truncation& t = *q3.top;
  for (int v = 0; v < t.vertex_count(level); ++v) {
    std::string p3 = q3.words()[q3.index.word_of(v)];
    std::string p2 = q2.words()[q2.index.word_of(v)];
    std::string p1 = q1.words()[q1.index.word_of(v)];
    if (project_word(q3, q2, p3) != p2 || project_word(q3, q1, p3) != p1 ||
        project_word(q2, q1, p2) != p1)
      report.fail("projection compatibility fails at vertex " + t.vertex_ids[v]);
  }

  for (const auto& end : ends) {
    std::string p3 = word_of_end(pres, q3, end);
    std::string p2 = word_of_end(pres, q2, end);
    std::string p1 = word_of_end(pres, q1, end);
    if (project_word(q3, q2, p3) != p2 || project_word(q3, q1, p3) != p1 ||
        project_word(q2, q1, p2) != p1)
      report.fail("projection compatibility fails at an end with sides " + p3);
  }
  return report;
}

std::string quotient_to_dot(const QuotientGraph& q) {
  std::ostringstream os;
  os << "graph quotient {\n";
  for (int w = 0; w < q.word_count(); ++w) {
    const auto& rec = q.loops[w];
    os << "  n" << w << " [label=\"" << q.words()[w];
    if (rec.unbounded)
      os << "\\nloops: \xCF\x89";  // omega
    else if (rec.count_at_level > 0)
      os << "\\nloops: " << rec.count_at_level;
    os << "\"];\n";
  }
  for (const auto& ce : q.cross_edges)
    os << "  n" << ce.word_a << " -- n" << ce.word_b << " [label=\"" << ce.edge
       << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace endspace
