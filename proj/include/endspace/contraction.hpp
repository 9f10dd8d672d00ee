#ifndef ENDSPACE_CONTRACTION_HPP
#define ENDSPACE_CONTRACTION_HPP

#include <memory>
#include <string>
#include <vector>

#include "endspace/quotient.hpp"

namespace endspace {

struct ContractionEdge {
  std::string edge;
  int comp_a = 0;
  int comp_b = 0;  // comp_a == comp_b for loops
};

/// The graph obtained by deleting a finite edge set and contracting each
/// remaining component to a vertex, rejoined by the deleted edges.
struct ContractionGraph {
  std::vector<std::string> edge_set;  // sorted ids
  int level_used = 0;                 // stable analysis level
  std::shared_ptr<const Truncation> top;
  Components comps;                    // at level_used
  std::vector<int> removed_idx;        // sorted edge indices in *top
  std::vector<ComponentId> vertices;   // per component, by ascending rep
  std::vector<ContractionEdge> edges;  // exactly the edge set, sorted by id

  /// Component index of any vertex of the truncation (descends from
  /// vertices beyond the stable level).
  int comp_of_vertex(int vertex_idx) const;
  int comp_of_rep_id(const std::string& rep_id) const;
};

ContractionGraph build_contraction(const GraphPresentation& pres,
                                   std::vector<std::string> edge_ids,
                                   int level_budget);

struct ContractionImage {
  enum Kind { Vertex, Edge } kind = Vertex;
  std::string value;  // component representative id, or edge id
};

bool operator==(const ContractionImage& a, const ContractionImage& b);

/// Bonding map between contractions of nested edge sets: components map
/// to the component containing them, deleted edges outside the smaller
/// set collapse to their component's vertex.
ContractionImage bond_image(const GraphPresentation& pres,
                            const ContractionGraph& sup,
                            const ContractionGraph& sub,
                            const ContractionImage& x);

/// All certified cuts contained in an edge set.
std::vector<FiniteCut> cuts_within(const GraphPresentation& pres,
                                   const std::vector<std::string>& edge_ids,
                                   int level_budget);

/// The comparison map from the quotient over the cuts inside E to the
/// contraction by E: words land in the component containing their fiber.
struct ComparisonMap {
  std::vector<std::string> edge_set;
  QuotientGraph quotient;  // over cuts_within(edge_set)
  ContractionGraph contraction;
  std::vector<int> word_to_comp;  // per word

  ContractionImage image_of_word(const std::string& word) const;
  ContractionImage image_of_edge(const std::string& edge_id) const;
};

ComparisonMap comparison_map(const GraphPresentation& pres,
                             std::vector<std::string> edge_ids,
                             int level_budget);

/// Commutation of bonding against comparison for nested edge sets.
CheckReport verify_comparison_square(const GraphPresentation& pres,
                                     const std::vector<std::string>& outer,
                                     const std::vector<std::string>& inner,
                                     int level_budget);

/// Composition law for bonding maps along a nested triple.
CheckReport verify_bond_chain(const GraphPresentation& pres,
                              const std::vector<std::string>& e1,
                              const std::vector<std::string>& e2,
                              const std::vector<std::string>& e3,
                              int level_budget);

std::string contraction_to_dot(const ContractionGraph& g);

}  // namespace endspace

#endif
