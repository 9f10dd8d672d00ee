#include "endspace/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

namespace endspace {

using nlohmann::json;

namespace {

constexpr int kWindow = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EndspaceError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> symmetric_difference(const std::vector<std::string>& a,
                                              const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(out));
  return out;
}

// index subsets of size <= k, in lexicographic order (empty set first)
std::vector<std::vector<int>> index_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  out.push_back({});
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int from) {
    if (static_cast<int>(cur.size()) == k) return;
    for (int i = from; i < n; ++i) {
      cur.push_back(i);
      out.push_back(cur);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

std::vector<FiniteCut> pick(const std::vector<FiniteCut>& cuts,
                            const std::vector<int>& idx) {
  std::vector<FiniteCut> out;
  for (int i : idx) out.push_back(cuts[i]);
  return out;
}

}  // namespace

RunConfig config_from_env(RunConfig base) {
  if (const char* lvl = std::getenv("ENDSPACE_LEVEL")) {
    try {
      base.level_budget = std::stoi(lvl);
    } catch (const std::exception&) {
      throw EndspaceError("ENDSPACE_LEVEL is not an integer");
    }
  }
  if (const char* dir = std::getenv("ENDSPACE_CACHE_DIR")) base.cache_dir = dir;
  return base;
}

GraphPresentation load_presentation(const std::string& source) {
  if (source.rfind("file:", 0) == 0)
    return parse_presentation(slurp(source.substr(5)));
  if (source.size() > 4 && source.substr(source.size() - 4) == ".igp")
    return parse_presentation(slurp(source));
  return preset(source);
}

// ---------------------------------------------------------------------------
// law checkers
// ---------------------------------------------------------------------------

CheckReport check_gf2_laws(const GraphPresentation& pres,
                           const std::vector<FiniteCut>& cuts,
                           int level_budget) {
  CheckReport report;
  FiniteCut zero = zero_cut(pres);
  int maxstab = pres.connectivity_level;
  for (const auto& c : cuts) maxstab = std::max(maxstab, c.stabilization_level);
  int top_level = std::max(level_budget, maxstab + kWindow);
  Truncation top = truncate(pres, top_level);
  std::vector<SideOracle> oracles;
  for (const auto& c : cuts) oracles.emplace_back(pres, top, c);

  for (const auto& c : cuts) {
    if (!cut_sum(pres, c, c).zero())
      report.fail("self-inverse fails for " + c.id());
    if (!(cut_sum(pres, c, zero) == c))
      report.fail("identity fails for " + c.id());
  }

  int n = static_cast<int>(cuts.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      FiniteCut s;
      try {
        s = cut_sum(pres, cuts[i], cuts[j]);
      } catch (const std::logic_error& e) {
        report.fail(std::string("sum revalidation failed: ") + e.what());
        continue;
      }
      if (!(cut_sum(pres, cuts[j], cuts[i]) == s))
        report.fail("commutativity fails for " + cuts[i].id() + " and " +
                    cuts[j].id());
      if (s.zero()) continue;
      // side agreement: the sum puts a vertex on A exactly when the two
      // summands agree on it
      SideOracle so(pres, top, s);
      int probe = top.vertex_count(
          std::min(top_level, s.stabilization_level + kWindow));
      for (int v = 0; v < probe; ++v) {
        bool agree = oracles[i].side_of(v) == oracles[j].side_of(v);
        if (agree != (so.side_of(v) == Side::A)) {
          report.fail("side law fails for " + cuts[i].id() + " + " +
                      cuts[j].id() + " at " + top.vertex_ids[v]);
          break;
        }
      }
    }
  }

  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        auto left = symmetric_difference(
            symmetric_difference(cuts[i].edges, cuts[j].edges), cuts[k].edges);
        auto right = symmetric_difference(
            cuts[i].edges, symmetric_difference(cuts[j].edges, cuts[k].edges));
        if (left != right) {
          report.fail("associativity fails at indices " + std::to_string(i) +
                      "," + std::to_string(j) + "," + std::to_string(k));
          return report;
        }
      }
  return report;
}

CheckReport check_projection_laws(const GraphPresentation& pres,
                                  const std::vector<FiniteCut>& cuts, int level,
                                  const std::vector<EndDescriptor>& ends) {
  CheckReport report;
  auto top = std::make_shared<const Truncation>(truncate(pres, level));
  for (const auto& subset : index_subsets(static_cast<int>(cuts.size()), 3)) {
    QuotientGraph q = build_quotient(pres, pick(cuts, subset), level, top);
    for (int w = 0; w < q.word_count(); ++w)
      if (q.index.word_rep[w] < 0)
        report.fail("word without a fiber: " + q.words()[w]);
    for (const auto& end : ends) {
      try {
        word_of_end(pres, q, end);
      } catch (const std::exception& e) {
        report.fail(std::string("end misses every word: ") + e.what());
      }
    }
    for (int e = 0; e < top->edge_count(level); ++e)
      if (quotient_image_of_edge(q, top->edge_ids[e]) != top->edge_ids[e])
        report.fail("edge image is not the identity: " + top->edge_ids[e]);
  }
  return report;
}

CheckReport check_chain_laws(const GraphPresentation& pres,
                             const std::vector<FiniteCut>& cuts, int level,
                             const std::vector<EndDescriptor>& ends) {
  CheckReport report;
  auto top = std::make_shared<const Truncation>(truncate(pres, level));
  std::map<std::vector<int>, QuotientGraph> memo;
  auto quotient_of = [&](const std::vector<int>& idx) -> const QuotientGraph& {
    auto it = memo.find(idx);
    if (it == memo.end())
      it = memo.emplace(idx, build_quotient(pres, pick(cuts, idx), level, top))
               .first;
    return it->second;
  };
  auto sub_subsets = [](const std::vector<int>& idx) {
    std::vector<std::vector<int>> out;
    int m = static_cast<int>(idx.size());
    for (int mask = 0; mask < (1 << m); ++mask) {
      std::vector<int> s;
      for (int i = 0; i < m; ++i)
        if (mask & (1 << i)) s.push_back(idx[i]);
      out.push_back(std::move(s));
    }
    return out;
  };

  auto subsets = index_subsets(static_cast<int>(cuts.size()), 3);
  for (const auto& m3 : subsets) {
    const QuotientGraph& q3 = quotient_of(m3);
    for (const auto& m2 : sub_subsets(m3)) {
      const QuotientGraph& q2 = quotient_of(m2);
      for (const auto& m1 : sub_subsets(m2)) {
        const QuotientGraph& q1 = quotient_of(m1);
        for (const auto& w : q3.words()) {
          std::string direct = project_word(q3, q1, w);
          std::string via = project_word(q2, q1, project_word(q3, q2, w));
          if (direct != via) {
            report.fail("triangle fails on word " + w);
            return report;
          }
        }
      }
      // projection compatibility for the nested pair (m3, m2)
      int vc = top->vertex_count(level);
      for (int v = 0; v < vc; ++v) {
        std::string sup = q3.words()[q3.index.word_of(v)];
        std::string sub = q2.words()[q2.index.word_of(v)];
        if (project_word(q3, q2, sup) != sub) {
          report.fail("vertex compatibility fails at " + top->vertex_ids[v]);
          return report;
        }
      }
      for (const auto& end : ends) {
        std::string sup = word_of_end(pres, q3, end);
        std::string sub = word_of_end(pres, q2, end);
        if (project_word(q3, q2, sup) != sub) {
          report.fail("end compatibility fails for sides " + end.sides);
          return report;
        }
      }
    }
  }
  return report;
}

std::vector<std::vector<std::string>> cut_union_universe(
    const GraphPresentation& pres, const std::vector<FiniteCut>& cuts,
    int arity, int max_edges, int level_budget) {
  std::set<std::vector<std::string>> seen;
  seen.insert({});  // the empty edge set
  for (const auto& subset :
       index_subsets(static_cast<int>(cuts.size()), arity)) {
    if (subset.empty()) continue;
    std::set<std::string> uni;
    for (int i : subset)
      uni.insert(cuts[i].edges.begin(), cuts[i].edges.end());
    if (static_cast<int>(uni.size()) > max_edges) continue;
    seen.insert(std::vector<std::string>(uni.begin(), uni.end()));
  }
  std::vector<std::vector<std::string>> out;
  for (const auto& e : seen) {
    if (!e.empty()) {
      Truncation top = truncate(pres, level_budget);
      std::vector<int> idx;
      for (const auto& id : e) idx.push_back(top.require_edge(id));
      if (!stabilize_removal(pres, top, idx, level_budget)) continue;
    }
    out.push_back(e);
  }
  return out;
}

CheckReport check_bond_laws(const GraphPresentation& pres,
                            const std::vector<FiniteCut>& cuts,
                            int level_budget) {
  CheckReport report;
  auto universe = cut_union_universe(pres, cuts, 2, 4, level_budget);
  std::vector<ContractionGraph> graphs;
  for (const auto& e : universe)
    graphs.push_back(build_contraction(pres, e, level_budget));

  int n = static_cast<int>(universe.size());
  auto contains = [&](int sup, int sub) {
    return std::includes(universe[sup].begin(), universe[sup].end(),
                         universe[sub].begin(), universe[sub].end());
  };
  for (int i3 = 0; i3 < n; ++i3)
    for (int i2 = 0; i2 < n; ++i2) {
      if (!contains(i3, i2)) continue;
      for (int i1 = 0; i1 < n; ++i1) {
        if (!contains(i2, i1)) continue;
        const auto& g3 = graphs[i3];
        const auto& g2 = graphs[i2];
        const auto& g1 = graphs[i1];
        auto probe = [&](const ContractionImage& x) {
          ContractionImage direct = bond_image(pres, g3, g1, x);
          ContractionImage via =
              bond_image(pres, g2, g1, bond_image(pres, g3, g2, x));
          if (!(direct == via))
            report.fail("bond composition fails on " + x.value);
          if (!(bond_image(pres, g3, g3, x) == x))
            report.fail("identity bond moved " + x.value);
        };
        for (const auto& v : g3.vertices)
          probe({ContractionImage::Vertex, v.representative});
        for (const auto& e : g3.edge_set) probe({ContractionImage::Edge, e});
        if (!report.pass) return report;
      }
    }
  return report;
}

CheckReport check_square_laws(const GraphPresentation& pres,
                              const std::vector<FiniteCut>& cuts,
                              int level_budget) {
  CheckReport report;
  auto universe = cut_union_universe(pres, cuts, 2, 4, level_budget);
  std::vector<ComparisonMap> maps;
  for (const auto& e : universe)
    maps.push_back(comparison_map(pres, e, level_budget));

  int n = static_cast<int>(universe.size());
  for (int big = 0; big < n; ++big)
    for (int small = 0; small < n; ++small) {
      if (!std::includes(universe[big].begin(), universe[big].end(),
                         universe[small].begin(), universe[small].end()))
        continue;
      const ComparisonMap& gb = maps[big];
      const ComparisonMap& gs = maps[small];
      for (const auto& w : gb.quotient.words()) {
        ContractionImage lhs =
            bond_image(pres, gb.contraction, gs.contraction, gb.image_of_word(w));
        ContractionImage rhs =
            gs.image_of_word(project_word(gb.quotient, gs.quotient, w));
        if (!(lhs == rhs)) {
          report.fail("square fails on word " + w);
          return report;
        }
      }
      int level =
          std::min(gb.quotient.level_used, gs.quotient.level_used);
      const Truncation& t = *gb.quotient.top;
      for (int e = 0; e < t.edge_count(level); ++e) {
        const std::string& id = t.edge_ids[e];
        ContractionImage lhs =
            bond_image(pres, gb.contraction, gs.contraction, gb.image_of_edge(id));
        ContractionImage rhs = gs.image_of_edge(id);
        if (!(lhs == rhs)) {
          report.fail("square fails on edge " + id);
          return report;
        }
      }
    }
  return report;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

json cut_json(const FiniteCut& cut) {
  return json{{"edges", cut.edges}, {"stab_level", cut.stabilization_level}};
}

json report_json(const CheckReport& r) {
  return json{{"pass", r.pass}, {"violations", r.violations}};
}

json end_json(const EndDescriptor& end) {
  json sides = json::object();
  for (size_t i = 0; i < end.resolution.size(); ++i)
    sides[end.resolution[i].id()] = std::string(1, end.sides[i]);
  return json{{"sides", sides}, {"ray", end.ray_prefix}};
}

}  // namespace

std::string cut_to_json(const FiniteCut& cut) { return cut_json(cut).dump(2); }

std::string cuts_to_json(const CutEnumeration& enumeration) {
  json arr = json::array();
  for (const auto& c : enumeration.cuts) arr.push_back(cut_json(c));
  json out{{"candidate_level", enumeration.candidate_level},
           {"count", enumeration.cuts.size()},
           {"cuts", arr},
           {"warning", enumeration.budget_warning}};
  return out.dump(2);
}

std::string quotient_to_json(const QuotientGraph& q) {
  json cuts = json::array();
  for (const auto& c : q.cuts) cuts.push_back(c.id());
  json words = json::array();
  for (int w = 0; w < q.word_count(); ++w) {
    json loops{{"count", q.loops[w].count_at_level},
               {"unbounded", q.loops[w].unbounded}};
    words.push_back(json{{"pattern", q.words()[w]},
                         {"loops", loops},
                         {"rep", q.word_fiber_rep[w]}});
  }
  json cross = json::array();
  for (const auto& ce : q.cross_edges)
    cross.push_back(json{{"edge", ce.edge},
                         {"from", q.words()[ce.word_a]},
                         {"to", q.words()[ce.word_b]}});
  return json{{"cuts", cuts},
              {"level", q.level_used},
              {"words", words},
              {"cross_edges", cross}}
      .dump(2);
}

std::string contraction_to_json(const ContractionGraph& g) {
  json verts = json::array();
  for (const auto& v : g.vertices)
    verts.push_back(json{{"rep", v.representative}, {"live", v.live}});
  json joins = json::array();
  for (const auto& e : g.edges)
    joins.push_back(json{{"edge", e.edge},
                         {"from", g.vertices[e.comp_a].representative},
                         {"to", g.vertices[e.comp_b].representative}});
  return json{{"edges", g.edge_set},
              {"level", g.level_used},
              {"vertices", verts},
              {"joins", joins}}
      .dump(2);
}

std::string detection_to_json(const EndDetection& det) {
  json ends = json::array();
  for (const auto& e : det.ends) ends.push_back(end_json(e));
  return json{{"count", det.ends.size()},
              {"incomplete", det.incomplete},
              {"level", det.level_used},
              {"ends", ends}}
      .dump(2);
}

std::string classes_to_json(const ClassesResult& classes) {
  json arr = json::array();
  for (const auto& c : classes.classes) {
    std::vector<std::string> sample = c.vertices;
    if (sample.size() > 50) sample.resize(50);
    arr.push_back(json{{"pattern", c.pattern},
                       {"vertices", sample},
                       {"vertex_count", c.vertices.size()},
                       {"ends", c.end_indices},
                       {"tentative", c.tentative}});
  }
  return json{{"classes", arr},
              {"explored_level", classes.explored_level},
              {"end_count", classes.detection.ends.size()}}
      .dump(2);
}

std::string tower_report_to_json(const GraphPresentation& pres,
                                 const TreeTower& tower) {
  CheckReport consistency = check_consistency(pres, tower);
  CheckReport coverage = check_coverage(pres, tower);
  CheckReport single = verify_no_circle(pres, tower);
  std::vector<std::string> violations = consistency.violations;
  violations.insert(violations.end(), coverage.violations.begin(),
                    coverage.violations.end());
  violations.insert(violations.end(), single.violations.begin(),
                    single.violations.end());
  return json{{"consistency", consistency.pass},
              {"coverage", coverage.pass},
              {"single_crossing", single.pass},
              {"violations", violations}}
      .dump(2);
}

std::string presentation_to_json(const GraphPresentation& pres) {
  std::vector<std::string> templates;
  for (const auto& t : pres.edge_templates) templates.push_back(t.text());
  return json{{"name", pres.name},
              {"statics", pres.statics},
              {"layered", pres.layered},
              {"edge_templates", templates},
              {"connectivity_level", pres.connectivity_level},
              {"finite", pres.finite_flag}}
      .dump(2);
}

// ---------------------------------------------------------------------------
// cache
// ---------------------------------------------------------------------------

std::string cache_key(const std::vector<std::string>& parts) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0x1f;
    h *= 1099511628211ull;
  };
  mix(kToolVersion);
  for (const auto& p : parts) mix(p);
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::optional<std::string> cache_get(const std::string& dir,
                                     const std::string& key) {
  if (dir.empty()) return std::nullopt;
  std::filesystem::path path = std::filesystem::path(dir) / (key + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void cache_put(const std::string& dir, const std::string& key,
               const std::string& value) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::filesystem::path final_path =
      std::filesystem::path(dir) / (key + ".json");
  std::filesystem::path tmp =
      final_path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary);
    out << value;
  }
  std::filesystem::rename(tmp, final_path);
}

// ---------------------------------------------------------------------------
// verify pipeline
// ---------------------------------------------------------------------------

VerifyResult run_verify(const std::string& source, const RunConfig& config) {
  std::string config_fingerprint =
      std::to_string(config.level_budget) + ":" +
      std::to_string(config.cut_size_budget) + ":" +
      std::to_string(config.witness_threshold) + ":" +
      std::to_string(config.law_cut_cap);
  std::string key = cache_key({"verify", source, config_fingerprint});
  if (auto hit = cache_get(config.cache_dir, key)) {
    json cached = json::parse(*hit);
    return {cached.at("pass").get<bool>() ? 0 : 1, *hit};
  }

  GraphPresentation pres = load_presentation(source);
  CutEnumeration enumeration =
      enumerate_cuts(pres, config.level_budget, config.cut_size_budget);
  std::vector<FiniteCut> law_cuts = enumeration.cuts;
  if (static_cast<int>(law_cuts.size()) > config.law_cut_cap)
    law_cuts.resize(config.law_cut_cap);

  ClassesResult classes = itop_classes(pres, enumeration.cuts,
                                       config.level_budget,
                                       config.witness_threshold);
  const std::vector<EndDescriptor>& ends = classes.detection.ends;

  int law_level = default_quotient_level(pres, law_cuts);
  CheckReport gf2 = check_gf2_laws(pres, law_cuts, config.level_budget);
  CheckReport projection =
      check_projection_laws(pres, law_cuts, law_level, ends);
  CheckReport chains = check_chain_laws(pres, law_cuts, law_level, ends);
  CheckReport bonds = check_bond_laws(pres, law_cuts, config.level_budget);
  CheckReport squares = check_square_laws(pres, law_cuts, config.level_budget);

  json tree_report;
  bool tree_pass = true;
  if (!enumeration.cuts.empty()) {
    std::vector<FiniteCut> sequence = enumeration.cuts;
    if (sequence.size() > 3) sequence.resize(3);
    try {
      TreeTower tower =
          build_tree_tower(pres, sequence, static_cast<int>(sequence.size()),
                           config.level_budget);
      tree_report = json::parse(tower_report_to_json(pres, tower));
      tree_pass = tree_report.at("consistency").get<bool>() &&
                  tree_report.at("coverage").get<bool>() &&
                  tree_report.at("single_crossing").get<bool>();
    } catch (const EndspaceError& e) {
      tree_report = json{{"error", e.what()}};
      tree_pass = false;
    }
  } else {
    tree_report = json{{"skipped", "no cuts within budget"}};
  }

  bool pass = gf2.pass && projection.pass && chains.pass && bonds.pass &&
              squares.pass && tree_pass && !classes.detection.incomplete;

  json cut_ids = json::array();
  for (size_t i = 0; i < enumeration.cuts.size() && i < 64; ++i)
    cut_ids.push_back(enumeration.cuts[i].id());

  json report{
      {"source", source},
      {"tool_version", kToolVersion},
      {"config",
       {{"level_budget", config.level_budget},
        {"cut_size_budget", config.cut_size_budget},
        {"witness_threshold", config.witness_threshold},
        {"law_cut_cap", config.law_cut_cap}}},
      {"cuts",
       {{"count", enumeration.cuts.size()},
        {"candidate_level", enumeration.candidate_level},
        {"warning", enumeration.budget_warning},
        {"ids", cut_ids}}},
      {"laws",
       {{"cut_space", report_json(gf2)},
        {"projection", report_json(projection)},
        {"chains", report_json(chains)},
        {"bonding", report_json(bonds)},
        {"squares", report_json(squares)}}},
      {"ends", json::parse(detection_to_json(classes.detection))},
      {"classes", json::parse(classes_to_json(classes))},
      {"tree", tree_report},
      {"pass", pass}};

  VerifyResult result{pass ? 0 : 1, report.dump(2)};
  cache_put(config.cache_dir, key, result.report_json);
  return result;
}

}  // namespace endspace
