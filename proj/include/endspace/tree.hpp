#ifndef ENDSPACE_TREE_HPP
#define ENDSPACE_TREE_HPP

#include <set>
#include <string>
#include <vector>

#include "endspace/quotient.hpp"

namespace endspace {

/// Spanning trees of the cross-edge skeletons along a growing cut
/// sequence, consistent from level to level; the limit edge set is
/// their union.
struct TreeTower {
  std::vector<FiniteCut> cut_sequence;          // prefix j uses the first j cuts
  std::vector<std::vector<std::string>> trees;  // sorted edge ids per prefix
  std::vector<std::string> limit_edges;         // sorted union
  int level_used = 0;
};

/// Build the tower: the first tree is the lexicographically least
/// spanning tree; each step keeps the previous tree and reconnects with
/// the least new cross edges.
TreeTower build_tree_tower(const GraphPresentation& pres,
                           std::vector<FiniteCut> cut_sequence, int depth,
                           int level_budget);

/// Intersection identities: each tree meets the coarser skeleton in
/// exactly the coarser tree, and the limit restricts back to each tree.
CheckReport check_consistency(const GraphPresentation& pres,
                              const TreeTower& tower);

/// Every cut of the sequence is crossed by at least one limit edge.
CheckReport check_coverage(const GraphPresentation& pres,
                           const TreeTower& tower);

/// Every fundamental cut of every tree is crossed by the limit edge set
/// exactly once.
CheckReport verify_no_circle(const GraphPresentation& pres,
                             const TreeTower& tower);

/// Template-level selection of a subgraph whose closure is analyzed.
struct StandardSubspace {
  std::set<std::string> vertex_templates;  // template names, all instances
  std::set<std::string> extra_vertices;    // explicit vertex ids
  std::set<std::string> edge_templates;    // template texts, all instances
  std::set<std::string> extra_edges;       // explicit edge ids
  std::string description;

  bool contains_vertex(const std::string& vertex_id) const;
  bool contains_edge(const std::string& edge_id) const;
};

/// Finite-resolution arc-connectivity criterion: whenever both sides of
/// a cut meet the subspace, the subspace holds a crossing edge.
CheckReport arc_connected(const GraphPresentation& pres,
                          const StandardSubspace& subspace,
                          const std::vector<FiniteCut>& cuts, int level_budget);

/// One DOT rendering per tower level, tree edges bold.
std::vector<std::string> tower_to_dot(const GraphPresentation& pres,
                                      const TreeTower& tower);

}  // namespace endspace

#endif
