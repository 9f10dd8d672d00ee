#ifndef ENDSPACE_CUTSPACE_HPP
#define ENDSPACE_CUTSPACE_HPP

#include <optional>
#include <string>
#include <vector>

#include "endspace/presentation.hpp"

namespace endspace {

enum class Side : char { A = 'A', B = 'B' };

inline char side_char(Side s) { return static_cast<char>(s); }
inline Side side_flip(Side s) { return s == Side::A ? Side::B : Side::A; }

/// A stabilized bipartition of the vertex universe, represented by its
/// finite crossing edge set plus the canonical seed fixing side A.
struct FiniteCut {
  std::vector<std::string> edges;  // sorted edge ids
  std::string side_a_seed;         // root vertex; its side is A
  int stabilization_level = 0;

  bool zero() const { return edges.empty(); }
  std::string id() const;  // edge ids joined with '+'; "0" for the zero cut
};

bool operator==(const FiniteCut& a, const FiniteCut& b);
bool cut_less(const FiniteCut& a, const FiniteCut& b);

struct SideAssignment {
  std::string cut_id;
  Side side = Side::A;
};

/// A stable component of the graph minus a finite edge set, anchored to
/// its least vertex; live components keep growing.
struct ComponentId {
  std::string representative;
  bool live = false;
};

bool operator==(const ComponentId& a, const ComponentId& b);

// ---------------------------------------------------------------------------
// component machinery shared by cut certification and contraction
// ---------------------------------------------------------------------------

struct Components {
  int level = 0;
  int count = 0;
  std::vector<int> comp;     // component id per vertex index < vertex_count(level)
  std::vector<int> rep;      // least vertex index per component, ascending
  std::vector<char> growing; // component keeps acquiring vertices
};

Components analyze_components(const Truncation& t, int level,
                              const std::vector<int>& removed_edges_sorted);

struct StableStructure {
  int stabilization_level = 0;
  Components stable;  // analysis at stabilization_level + 3
};

/// Certify that removing the edge set leaves a component structure that
/// is constant through the safety window (4 consecutive levels plus an
/// echo probe). The truncation must be expanded to level_budget.
std::optional<StableStructure> stabilize_removal(const GraphPresentation& pres,
                                                 const Truncation& top,
                                                 const std::vector<int>& edges,
                                                 int level_budget);

// ---------------------------------------------------------------------------
// cuts
// ---------------------------------------------------------------------------

struct CutEnumeration {
  std::vector<FiniteCut> cuts;  // sorted lexicographically by edge-id sequence
  bool budget_warning = false;
  int candidate_level = 0;
};

/// All stabilized cuts with at most size_budget crossing edges, drawn
/// from the truncation at level_budget - 4 (further clamped so the
/// candidate pool stays at or below max_candidate_edges edges).
CutEnumeration enumerate_cuts(const GraphPresentation& pres, int level_budget,
                              int size_budget, int max_candidate_edges = 64);

/// Certify an explicit edge set as a finite cut; nullopt when the set
/// is not a stabilized crossing set within the budget.
std::optional<FiniteCut> certify_cut(const GraphPresentation& pres,
                                     std::vector<std::string> edge_ids,
                                     int level_budget);

/// Same, against an already expanded truncation (edge indices).
std::optional<FiniteCut> certify_cut_on(const GraphPresentation& pres,
                                        const Truncation& top,
                                        const std::vector<int>& edge_idx,
                                        int level_budget);

FiniteCut zero_cut(const GraphPresentation& pres);

/// GF(2) sum: symmetric difference of crossing sets. Throws on internal
/// revalidation failure (the cut space is closed under sums).
FiniteCut cut_sum(const GraphPresentation& pres, const FiniteCut& c1,
                  const FiniteCut& c2);

SideAssignment side_of_vertex(const GraphPresentation& pres, const FiniteCut& cut,
                              const std::string& vertex_id);

// ---------------------------------------------------------------------------
// side oracle and word index
// ---------------------------------------------------------------------------

/// Answers side and stable-component queries for one cut against a fixed
/// truncation. Pure after construction.
class SideOracle {
 public:
  SideOracle(const GraphPresentation& pres, const Truncation& top,
             const FiniteCut& cut);

  Side side_of(int vertex_idx) const;
  /// Least vertex index of the stable component containing the vertex.
  int component_rep(int vertex_idx) const;
  bool component_growing(int rep_vertex_idx) const;
  int coloring_level() const { return coloring_level_; }

 private:
  int resolve(int vertex_idx) const;  // descend to a colored vertex

  const Truncation* top_;
  std::vector<int> cut_edge_idx_;  // sorted
  int coloring_level_ = 0;
  std::vector<Side> side_;      // per vertex < vertex_count(coloring_level_)
  std::vector<int> comp_rep_;   // per vertex < vertex_count(coloring_level_)
  std::vector<char> growing_;   // per component (indexed by component order)
  std::vector<int> comp_ord_;   // per vertex: component index
};

/// Joint side patterns of every vertex of a truncation over a finite
/// cut family: the realized words, in sorted order.
struct WordIndex {
  int level = 0;
  std::vector<FiniteCut> cuts;  // canonical (sorted, deduplicated) order
  std::vector<SideOracle> oracles;
  std::vector<std::string> patterns;  // sorted side strings, one per word
  std::vector<int> word_of_vertex;    // per vertex < vertex_count(level)
  std::vector<int> word_rep;          // least vertex index per word

  int word_count() const { return static_cast<int>(patterns.size()); }
  int word_of(int v) const { return word_of_vertex[v]; }
  int word_of_pattern(const std::string& pattern) const;  // -1 if absent
};

std::vector<FiniteCut> canonical_cut_family(std::vector<FiniteCut> cuts);

WordIndex build_word_index(const GraphPresentation& pres, const Truncation& top,
                           int level, std::vector<FiniteCut> cuts);

}  // namespace endspace

#endif
