#ifndef ENDSPACE_PRESENTATION_HPP
#define ENDSPACE_PRESENTATION_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace endspace {

struct EndspaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : EndspaceError {
  int line;
  int col;
  ParseError(const std::string& msg, int line_, int col_)
      : EndspaceError("line " + std::to_string(line_) + " col " +
                      std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

/// How a template reference binds to a layer.
enum class RefKind : uint8_t {
  Static,     // a static vertex; no layer
  LayerSame,  // x[n]
  LayerNext,  // x[n+1]
  Fixed,      // x[k] for a fixed k (preset-internal, not in the DSL)
};

struct TemplateRef {
  std::string name;
  RefKind kind = RefKind::Static;
  int fixed_layer = 0;  // only for RefKind::Fixed

  std::string text() const;
};

/// An edge rule. Periodic rules instantiate at every layer k >= 0;
/// once rules instantiate a single time.
struct EdgeTemplate {
  TemplateRef a;
  TemplateRef b;
  bool once = false;
  int occurrence = 1;  // disambiguates duplicate rules

  std::string text() const;
};

enum class BuiltinGenerator : uint8_t { None, BinaryTree };

/// Finite description of an infinite graph: static vertices plus
/// per-layer vertex templates joined by edge rules with layer offsets
/// in {0, +1}. Immutable after construction.
struct GraphPresentation {
  std::string name;
  std::vector<std::string> statics;
  std::vector<std::string> layered;
  std::vector<EdgeTemplate> edge_templates;
  bool finite_flag = false;
  int connectivity_level = 0;
  BuiltinGenerator generator = BuiltinGenerator::None;

  /// Designated root vertex: first static, else first layered template
  /// at layer 0.
  std::string root() const;
};

enum class FrontierKind : uint8_t { Never, AtOwnLevel, Always };

/// Finite truncation G_n of a presented graph. Vertices and edges are
/// stored in a canonical creation order shared by all levels, so the
/// level-m truncation is a prefix of the level-n one for m <= n.
struct Truncation {
  int level = 0;
  std::vector<std::string> vertex_ids;
  std::vector<int> vertex_level;
  std::vector<int> vertex_template;  // index into statics/layered name table
  std::vector<FrontierKind> vertex_frontier_kind;

  std::vector<std::string> edge_ids;
  std::vector<std::pair<int, int>> edge_ends;  // vertex indices
  std::vector<int> edge_level;                 // level the edge first appears
  std::vector<int> edge_template;              // template index, -1 if generated

  std::vector<int> vertex_count_at;  // size level+2, cumulative per level
  std::vector<int> edge_count_at;

  std::unordered_map<std::string, int> vertex_index;
  std::unordered_map<std::string, int> edge_index;

  // adjacency: per vertex, (neighbor, edge) sorted ascending
  std::vector<std::vector<std::pair<int, int>>> adj;

  int vertex_count(int lvl) const { return vertex_count_at[lvl]; }
  int edge_count(int lvl) const { return edge_count_at[lvl]; }

  /// Would vertex v still gain incident edges after level lvl?
  bool frontier_at(int v, int lvl) const {
    switch (vertex_frontier_kind[v]) {
      case FrontierKind::Always: return true;
      case FrontierKind::AtOwnLevel: return vertex_level[v] == lvl;
      default: return false;
    }
  }
  bool is_frontier(int v) const { return frontier_at(v, level); }
  std::vector<std::string> frontier_ids() const;

  int require_vertex(const std::string& id) const;
  int require_edge(const std::string& id) const;
};

/// Parse the .igp graph-presentation DSL. Validates template
/// references and eventual connectivity (rejected beyond level 64).
GraphPresentation parse_presentation(const std::string& text);

/// Built-in presentations: ray, double_ray, ladder, star, broom, bintree.
GraphPresentation preset(const std::string& name);

/// Expand a presentation to its level-n truncation.
Truncation truncate(const GraphPresentation& pres, int level);

/// Level at which a vertex id first appears; throws on unknown ids.
int vertex_level_of_id(const GraphPresentation& pres, const std::string& id);

}  // namespace endspace

#endif
