#include "endspace/presentation.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

namespace endspace {

namespace {

constexpr int kConnectivityLimit = 64;
constexpr int kConnectivityProbe = 68;
constexpr long long kVertexBudget = 1 << 22;

std::string layer_suffix(RefKind kind, int fixed) {
  switch (kind) {
    case RefKind::Static: return "";
    case RefKind::LayerSame: return "[n]";
    case RefKind::LayerNext: return "[n+1]";
    case RefKind::Fixed: return "[" + std::to_string(fixed) + "]";
  }
  return "";
}

}  // namespace

std::string TemplateRef::text() const {
  return name + layer_suffix(kind, fixed_layer);
}

std::string EdgeTemplate::text() const {
  std::string t = a.text() + "-" + b.text();
  if (occurrence > 1) t += "#" + std::to_string(occurrence);
  return t;
}

std::string GraphPresentation::root() const {
  if (generator == BuiltinGenerator::BinaryTree) return "b[1]";
  if (!statics.empty()) return statics.front();
  return layered.front() + "[0]";
}

std::vector<std::string> Truncation::frontier_ids() const {
  std::vector<std::string> out;
  for (size_t v = 0; v < vertex_ids.size(); ++v)
    if (is_frontier(static_cast<int>(v))) out.push_back(vertex_ids[v]);
  return out;
}

int Truncation::require_vertex(const std::string& id) const {
  auto it = vertex_index.find(id);
  if (it == vertex_index.end())
    throw EndspaceError("unknown vertex id: " + id);
  return it->second;
}

int Truncation::require_edge(const std::string& id) const {
  auto it = edge_index.find(id);
  if (it == edge_index.end())
    throw EndspaceError("unknown edge id: " + id);
  return it->second;
}

// ---------------------------------------------------------------------------
// DSL parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum Kind { Ident, Punct, End } kind = End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      bump();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::End;
      tok_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string s;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        s += src_[pos_];
        bump();
      }
      tok_.kind = Token::Ident;
      tok_.text = s;
      return;
    }
    tok_.kind = Token::Punct;
    tok_.text = std::string(1, c);
    bump();
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  GraphPresentation run() {
    GraphPresentation p;
    expect_ident("graph");
    p.name = expect_any_ident("graph name");
    expect_punct("{");
    if (peek_is_ident("static")) {
      lex_.next();
      p.statics.push_back(expect_any_ident("static name"));
      while (peek_is_punct(",")) {
        lex_.next();
        p.statics.push_back(expect_any_ident("static name"));
      }
      expect_punct(";");
    }
    expect_ident("layer");
    expect_ident("n");
    expect_punct(":");
    p.layered.push_back(expect_any_ident("layer template name"));
    while (peek_is_punct(",")) {
      lex_.next();
      p.layered.push_back(expect_any_ident("layer template name"));
    }
    expect_punct(";");
    expect_ident("edges");
    expect_punct(":");
    parse_edge(p);
    while (peek_is_punct(",")) {
      lex_.next();
      parse_edge(p);
    }
    expect_punct(";");
    expect_punct("}");
    if (lex_.peek().kind != Token::End)
      fail("trailing input after '}'");
    validate(p);
    return p;
  }

 private:
  void parse_edge(GraphPresentation& p) {
    EdgeTemplate e;
    e.a = parse_ref(p);
    expect_punct("-");
    e.b = parse_ref(p);
    if (e.a.kind == RefKind::Static && e.b.kind == RefKind::Static) {
      e.once = true;  // static-static edges instantiate a single time
    }
    int occ = 1;
    for (const auto& prev : p.edge_templates)
      if (prev.a.text() == e.a.text() && prev.b.text() == e.b.text()) ++occ;
    e.occurrence = occ;
    p.edge_templates.push_back(e);
  }

  TemplateRef parse_ref(GraphPresentation& p) {
    Token name = lex_.next();
    if (name.kind != Token::Ident)
      fail_at(name, "expected template reference");
    TemplateRef r;
    r.name = name.text;
    bool is_static =
        std::find(p.statics.begin(), p.statics.end(), r.name) != p.statics.end();
    bool is_layered =
        std::find(p.layered.begin(), p.layered.end(), r.name) != p.layered.end();
    if (!is_static && !is_layered)
      fail_at(name, "unknown template reference: " + r.name);
    if (peek_is_punct("[")) {
      lex_.next();
      Token idx = lex_.next();
      if (idx.kind != Token::Ident || idx.text != "n")
        fail_at(idx, "expected 'n' or 'n+1' layer index");
      if (peek_is_punct("+")) {
        lex_.next();
        Token one = lex_.next();
        if (one.text != "1")
          fail_at(one, "expected 'n+1'");
        r.kind = RefKind::LayerNext;
      } else {
        r.kind = RefKind::LayerSame;
      }
      expect_punct("]");
      if (is_static)
        fail_at(name, "static template '" + r.name + "' takes no layer index");
    } else {
      if (is_layered)
        fail_at(name, "layered template '" + r.name +
                          "' requires a [n] or [n+1] layer index");
      r.kind = RefKind::Static;
    }
    return r;
  }

  void validate(GraphPresentation& p) {
    std::set<std::string> seen;
    for (const auto& s : p.statics)
      if (!seen.insert(s).second) fail("duplicate template name: " + s);
    for (const auto& s : p.layered)
      if (!seen.insert(s).second) fail("duplicate template name: " + s);
    if (p.statics.empty() && p.layered.empty())
      fail("presentation declares no vertex templates");
  }

  bool peek_is_ident(const std::string& s) const {
    return lex_.peek().kind == Token::Ident && lex_.peek().text == s;
  }
  bool peek_is_punct(const std::string& s) const {
    return lex_.peek().kind == Token::Punct && lex_.peek().text == s;
  }
  void expect_ident(const std::string& s) {
    Token t = lex_.next();
    if (t.kind != Token::Ident || t.text != s)
      fail_at(t, "expected '" + s + "'");
  }
  std::string expect_any_ident(const std::string& what) {
    Token t = lex_.next();
    if (t.kind != Token::Ident)
      fail_at(t, "expected " + what);
    return t.text;
  }
  void expect_punct(const std::string& s) {
    Token t = lex_.next();
    if (t.kind != Token::Punct || t.text != s)
      fail_at(t, "expected '" + s + "'");
  }
  [[noreturn]] void fail(const std::string& msg) { fail_at(lex_.peek(), msg); }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) {
    throw ParseError(msg, t.line, t.col);
  }

  Lexer lex_;
};

// ---------------------------------------------------------------------------
// Expansion
// ---------------------------------------------------------------------------

int ref_layer(const TemplateRef& r, int k) {
  switch (r.kind) {
    case RefKind::Static: return 0;
    case RefKind::LayerSame: return k;
    case RefKind::LayerNext: return k + 1;
    case RefKind::Fixed: return r.fixed_layer;
  }
  return 0;
}

// Level at which the instance of template t at layer k appears: the
// largest layered endpoint layer (statics do not delay appearance).
int instance_appear_level(const EdgeTemplate& t, int k) {
  int lvl = 0;
  for (const TemplateRef* r : {&t.a, &t.b})
    if (r->kind != RefKind::Static) lvl = std::max(lvl, ref_layer(*r, k));
  return lvl;
}

struct NameTable {
  std::vector<std::string> names;  // statics then layered
  int static_count = 0;
};

NameTable name_table(const GraphPresentation& p) {
  NameTable t;
  t.names = p.statics;
  t.static_count = static_cast<int>(p.statics.size());
  t.names.insert(t.names.end(), p.layered.begin(), p.layered.end());
  return t;
}

FrontierKind frontier_kind_of(const GraphPresentation& p, int tmpl_idx,
                              bool is_static) {
  if (is_static) {
    const std::string& name = p.statics[tmpl_idx];
    for (const auto& e : p.edge_templates) {
      if (e.once) continue;
      bool touches = (e.a.kind == RefKind::Static && e.a.name == name) ||
                     (e.b.kind == RefKind::Static && e.b.name == name);
      bool layered = e.a.kind == RefKind::LayerSame ||
                     e.a.kind == RefKind::LayerNext ||
                     e.b.kind == RefKind::LayerSame ||
                     e.b.kind == RefKind::LayerNext;
      if (touches && layered) return FrontierKind::Always;
    }
    return FrontierKind::Never;
  }
  // A layered vertex x[k] gains a later edge only from a rule where x
  // appears at offset 0 and the other endpoint at offset +1.
  const std::string& name = p.layered[tmpl_idx];
  for (const auto& e : p.edge_templates) {
    if (e.once) continue;
    bool a0 = e.a.kind == RefKind::LayerSame && e.a.name == name;
    bool b0 = e.b.kind == RefKind::LayerSame && e.b.name == name;
    if ((a0 && e.b.kind == RefKind::LayerNext) ||
        (b0 && e.a.kind == RefKind::LayerNext))
      return FrontierKind::AtOwnLevel;
  }
  return FrontierKind::Never;
}

Truncation expand_templates(const GraphPresentation& p, int level) {
  NameTable table = name_table(p);
  Truncation t;
  t.level = level;

  long long projected = static_cast<long long>(p.statics.size()) +
                        static_cast<long long>(p.layered.size()) * (level + 1);
  if (projected > kVertexBudget)
    throw EndspaceError("truncation exceeds the vertex budget");

  t.vertex_count_at.assign(level + 2, 0);
  for (int i = 0; i < static_cast<int>(p.statics.size()); ++i) {
    t.vertex_ids.push_back(p.statics[i]);
    t.vertex_level.push_back(0);
    t.vertex_template.push_back(i);
    t.vertex_frontier_kind.push_back(frontier_kind_of(p, i, true));
  }
  for (int k = 0; k <= level; ++k) {
    for (int i = 0; i < static_cast<int>(p.layered.size()); ++i) {
      t.vertex_ids.push_back(p.layered[i] + "[" + std::to_string(k) + "]");
      t.vertex_level.push_back(k);
      t.vertex_template.push_back(table.static_count + i);
      t.vertex_frontier_kind.push_back(frontier_kind_of(p, i, false));
    }
    t.vertex_count_at[k + 1] = 0;  // filled below
  }
  // cumulative vertex counts: level l has statics + layered*(l+1)
  for (int l = 0; l <= level; ++l)
    t.vertex_count_at[l] = static_cast<int>(p.statics.size()) +
                           static_cast<int>(p.layered.size()) * (l + 1);
  t.vertex_count_at[level + 1] = t.vertex_count_at[level];
  for (size_t i = 0; i < t.vertex_ids.size(); ++i)
    t.vertex_index[t.vertex_ids[i]] = static_cast<int>(i);

  auto vertex_of_ref = [&](const TemplateRef& r, int k) -> int {
    if (r.kind == RefKind::Static)
      return t.require_vertex(r.name);
    return t.require_vertex(r.name + "[" + std::to_string(ref_layer(r, k)) + "]");
  };

  // gather instances ordered by (appear level, template index, layer)
  struct Instance {
    int appear;
    int tmpl;
    int layer;
  };
  std::vector<Instance> inst;
  for (int ti = 0; ti < static_cast<int>(p.edge_templates.size()); ++ti) {
    const auto& e = p.edge_templates[ti];
    if (e.once) {
      int ap = 0;
      for (const TemplateRef* r : {&e.a, &e.b})
        if (r->kind == RefKind::Fixed) ap = std::max(ap, r->fixed_layer);
      if (ap <= level) inst.push_back({ap, ti, 0});
      continue;
    }
    for (int k = 0;; ++k) {
      int ap = instance_appear_level(e, k);
      if (ap > level) break;
      inst.push_back({ap, ti, k});
      if (ap == 0 && k > level) break;  // safety; unreachable
    }
  }
  std::stable_sort(inst.begin(), inst.end(), [](const Instance& x, const Instance& y) {
    if (x.appear != y.appear) return x.appear < y.appear;
    if (x.tmpl != y.tmpl) return x.tmpl < y.tmpl;
    return x.layer < y.layer;
  });

  t.edge_count_at.assign(level + 2, 0);
  for (const auto& in : inst) {
    const auto& e = p.edge_templates[in.tmpl];
    int u = vertex_of_ref(e.a, in.layer);
    int v = vertex_of_ref(e.b, in.layer);
    std::string id = "E:" + e.text() + "@" + std::to_string(in.layer);
    t.edge_ids.push_back(id);
    t.edge_ends.emplace_back(u, v);
    t.edge_level.push_back(in.appear);
    t.edge_template.push_back(in.tmpl);
  }
  for (int l = 0, pos = 0; l <= level + 1; ++l) {
    while (pos < static_cast<int>(t.edge_ids.size()) &&
           t.edge_level[pos] <= std::min(l, level))
      ++pos;
    t.edge_count_at[l] = pos;
  }
  for (size_t i = 0; i < t.edge_ids.size(); ++i)
    t.edge_index[t.edge_ids[i]] = static_cast<int>(i);

  t.adj.assign(t.vertex_ids.size(), {});
  for (size_t e = 0; e < t.edge_ends.size(); ++e) {
    auto [u, v] = t.edge_ends[e];
    t.adj[u].emplace_back(v, static_cast<int>(e));
    if (u != v) t.adj[v].emplace_back(u, static_cast<int>(e));
  }
  for (auto& row : t.adj) std::sort(row.begin(), row.end());
  return t;
}

Truncation expand_bintree(int level) {
  Truncation t;
  t.level = level;
  long long n = (2LL << (level + 1)) - 1;
  if (n > kVertexBudget)
    throw EndspaceError("truncation exceeds the vertex budget");
  long long count = (1LL << (level + 1)) - 1;

  auto layer_of = [](long long j) {
    int l = 0;
    while ((2LL << l) <= j) ++l;
    return l;
  };

  t.vertex_count_at.assign(level + 2, 0);
  t.edge_count_at.assign(level + 2, 0);
  for (long long j = 1; j <= count; ++j) {
    t.vertex_ids.push_back("b[" + std::to_string(j) + "]");
    t.vertex_level.push_back(layer_of(j));
    t.vertex_template.push_back(0);
    t.vertex_frontier_kind.push_back(FrontierKind::AtOwnLevel);
  }
  for (int l = 0; l <= level; ++l)
    t.vertex_count_at[l] = static_cast<int>((1LL << (l + 1)) - 1);
  t.vertex_count_at[level + 1] = t.vertex_count_at[level];
  for (size_t i = 0; i < t.vertex_ids.size(); ++i)
    t.vertex_index[t.vertex_ids[i]] = static_cast<int>(i);

  for (long long j = 2; j <= count; ++j) {
    long long par = j / 2;
    int lvl = layer_of(j);
    std::string id = "E:b[" + std::to_string(par) + "]-b[" + std::to_string(j) +
                     "]@" + std::to_string(lvl);
    t.edge_ids.push_back(id);
    t.edge_ends.emplace_back(static_cast<int>(par - 1), static_cast<int>(j - 1));
    t.edge_level.push_back(lvl);
    t.edge_template.push_back(-1);
  }
  for (int l = 0; l <= level + 1; ++l) {
    int lv = std::min(l, level);
    t.edge_count_at[l] = static_cast<int>((1LL << (lv + 1)) - 2);
  }
  for (size_t i = 0; i < t.edge_ids.size(); ++i)
    t.edge_index[t.edge_ids[i]] = static_cast<int>(i);

  t.adj.assign(t.vertex_ids.size(), {});
  for (size_t e = 0; e < t.edge_ends.size(); ++e) {
    auto [u, v] = t.edge_ends[e];
    t.adj[u].emplace_back(v, static_cast<int>(e));
    t.adj[v].emplace_back(u, static_cast<int>(e));
  }
  for (auto& row : t.adj) std::sort(row.begin(), row.end());
  return t;
}

// Minimal union-find, roots kept at the least index.
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
    parent[b] = a;
  }
};

// Least level n0 such that G_n is connected for all probed n >= n0;
// -1 when the probe window never settles.
int connectivity_scan(const GraphPresentation& p) {
  Truncation t = expand_templates(p, kConnectivityProbe);
  MiniUF uf(static_cast<int>(t.vertex_ids.size()));
  int last_bad = -1;
  int epos = 0;
  for (int lvl = 0; lvl <= kConnectivityProbe; ++lvl) {
    while (epos < t.edge_count(lvl)) {
      uf.join(t.edge_ends[epos].first, t.edge_ends[epos].second);
      ++epos;
    }
    int roots = 0;
    for (int v = 0; v < t.vertex_count(lvl); ++v)
      if (uf.find(v) == v) ++roots;
    if (roots > 1) last_bad = lvl;
  }
  if (last_bad >= kConnectivityLimit) return -1;
  return last_bad + 1;
}

GraphPresentation finish_presentation(GraphPresentation p) {
  int lvl = connectivity_scan(p);
  if (lvl < 0)
    throw EndspaceError("presentation '" + p.name +
                        "' is not eventually connected within level " +
                        std::to_string(kConnectivityLimit));
  p.connectivity_level = lvl;
  bool touches_layers = false;
  for (const auto& e : p.edge_templates)
    if (!e.once) touches_layers = true;
  p.finite_flag = p.layered.empty() && !touches_layers;
  return p;
}

}  // namespace

GraphPresentation parse_presentation(const std::string& text) {
  Parser parser(text);
  GraphPresentation p = parser.run();
  return finish_presentation(std::move(p));
}

GraphPresentation preset(const std::string& name) {
  if (name == "ray")
    return parse_presentation("graph ray { layer n: v; edges: v[n]-v[n+1]; }");
  if (name == "ladder")
    return parse_presentation(
        "graph ladder { layer n: a, b;"
        " edges: a[n]-b[n], a[n]-a[n+1], b[n]-b[n+1]; }");
  if (name == "star")
    return parse_presentation("graph star { static c; layer n: l; edges: c-l[n]; }");
  if (name == "broom")
    return parse_presentation(
        "graph broom { static v; layer n: t, b;"
        " edges: t[n]-t[n+1], b[n]-b[n+1], v-t[n], v-b[n]; }");
  if (name == "double_ray") {
    GraphPresentation p;
    p.name = "double_ray";
    p.layered = {"l", "r"};
    EdgeTemplate rail_l{{"l", RefKind::LayerSame, 0}, {"l", RefKind::LayerNext, 0}};
    EdgeTemplate rail_r{{"r", RefKind::LayerSame, 0}, {"r", RefKind::LayerNext, 0}};
    EdgeTemplate bridge{{"l", RefKind::Fixed, 0}, {"r", RefKind::Fixed, 0}};
    bridge.once = true;
    p.edge_templates = {rail_l, rail_r, bridge};
    return finish_presentation(std::move(p));
  }
  if (name == "bintree") {
    GraphPresentation p;
    p.name = "bintree";
    p.layered = {"b"};
    p.generator = BuiltinGenerator::BinaryTree;
    p.connectivity_level = 0;
    return p;
  }
  throw EndspaceError("unknown preset: " + name);
}

Truncation truncate(const GraphPresentation& pres, int level) {
  if (level < 0) throw EndspaceError("truncation level must be >= 0");
  if (pres.generator == BuiltinGenerator::BinaryTree)
    return expand_bintree(level);
  return expand_templates(pres, level);
}

int vertex_level_of_id(const GraphPresentation& pres, const std::string& id) {
  auto bracket = id.find('[');
  if (bracket == std::string::npos) {
    if (std::find(pres.statics.begin(), pres.statics.end(), id) ==
        pres.statics.end())
      throw EndspaceError("unknown vertex id: " + id);
    return 0;
  }
  if (id.back() != ']')
    throw EndspaceError("malformed vertex id: " + id);
  std::string name = id.substr(0, bracket);
  std::string idx = id.substr(bracket + 1, id.size() - bracket - 2);
  if (idx.empty() ||
      !std::all_of(idx.begin(), idx.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw EndspaceError("malformed vertex id: " + id);
  long long k = std::stoll(idx);
  if (pres.generator == BuiltinGenerator::BinaryTree) {
    if (name != "b" || k < 1)
      throw EndspaceError("unknown vertex id: " + id);
    int l = 0;
    while ((2LL << l) <= k) ++l;
    return l;
  }
  if (std::find(pres.layered.begin(), pres.layered.end(), name) ==
      pres.layered.end())
    throw EndspaceError("unknown vertex id: " + id);
  return static_cast<int>(k);
}

}  // namespace endspace
